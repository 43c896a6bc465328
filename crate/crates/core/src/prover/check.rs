use super::facts::{rewrites, saturate_access};
use super::proof::{Conclusion, Leaf, ProofTree, Rule};
use crate::model::{
    Architecture, ComponentId, DepPremise, Equation, Multiplicity, Pred, Primitive, ProofItem,
    Statement, Subject, Substitution, Term,
};

/// Re-checks every node of `tree` against its rule and `arch`.
pub fn validate_proof(arch: &Architecture, tree: &ProofTree) -> bool {
    tree.premises.iter().all(|p| validate_proof(arch, p)) && node_ok(arch, tree)
}

fn node_ok(arch: &Architecture, t: &ProofTree) -> bool {
    let prims: Vec<&Primitive> = t
        .leaves
        .iter()
        .filter_map(|l| match l {
            Leaf::Primitive(p) => Some(p),
            _ => None,
        })
        .collect();
    if !prims.iter().all(|p| arch.primitives.contains(p)) {
        return false;
    }
    let kids: Vec<&Conclusion> = t.premises.iter().map(|p| &p.conclusion).collect();
    match (t.rule, &t.conclusion) {
        (Rule::H1 | Rule::H1p | Rule::H2 | Rule::H2p | Rule::H3, Conclusion::Has { comp, subject, count }) => {
            kids.is_empty() && prims.len() == 1 && access_primitive(t.rule, prims[0], comp, subject, *count)
        }
        (Rule::H4, Conclusion::Has { comp, subject, count }) => match kids.as_slice() {
            [Conclusion::Has {
                comp: c,
                subject: s,
                count: n,
            }] => c == comp && s == subject && count <= n,
            _ => false,
        },
        (Rule::H5 | Rule::H5p, Conclusion::Has { comp, subject, count }) => {
            let [Leaf::Dep(d)] = t.leaves.as_slice() else {
                return false;
            };
            let rule_fits = (t.rule == Rule::H5) == !subject.is_const();
            let wanted: Vec<Conclusion> = d
                .premises
                .iter()
                .map(|p| {
                    let (s, n) = match p {
                        DepPremise::Var { var, count } => (Subject::Var(var.clone()), Multiplicity::finite(*count)),
                        DepPremise::Const(c) => (Subject::Const(c.clone()), Some(Multiplicity::ONE)),
                    };
                    Conclusion::Has {
                        comp: comp.clone(),
                        subject: s,
                        count: n.unwrap_or(Multiplicity::ONE),
                    }
                })
                .collect();
            rule_fits
                && arch.deps.contains(d)
                && &d.owner == comp
                && &d.target == subject
                && *count == Multiplicity::ONE
                && kids.len() == wanted.len()
                && kids.iter().zip(&wanted).all(|(k, w)| *k == w)
        }
        (Rule::HN | Rule::HNp, Conclusion::HasNone { comp, subject }) => {
            let [Leaf::Digest(d)] = t.leaves.as_slice() else {
                return false;
            };
            let fb = saturate_access(arch);
            kids.is_empty()
                && (t.rule == Rule::HNp) == subject.is_const()
                && fb.has_count(comp, subject).is_none()
                && *d == fb.access_digest()
        }
        (Rule::K1, Conclusion::Know { comp, eq }) => {
            kids.is_empty()
                && matches!(prims.as_slice(), [Primitive::Compute { group, target, rhs, .. }]
                    if group.contains(comp) && *eq == Equation::eq(Term::of_var(target), rhs.clone()))
        }
        (Rule::K3, Conclusion::Know { comp, eq }) => {
            kids.is_empty()
                && matches!(prims.as_slice(), [Primitive::Verify { comp: c, statement: Statement::Proof { payload, .. }, .. }]
                    if c == comp && payload.contains(&ProofItem::Eq(eq.clone())))
        }
        (Rule::K4, Conclusion::Know { comp, eq }) => {
            let [Primitive::Verify {
                comp: c,
                statement: Statement::Proof { payload, .. },
                ..
            }, Primitive::Trust { truster, trustee }] = prims.as_slice()
            else {
                return false;
            };
            kids.is_empty()
                && c == comp
                && truster == comp
                && payload.iter().any(|item| {
                    matches!(item, ProofItem::Attest { issuer, claims } if issuer == trustee && claims.contains(eq))
                })
        }
        (Rule::K5, Conclusion::Know { comp, eq }) => {
            let [Primitive::Verify {
                comp: c,
                statement: Statement::Attest { issuer, claims },
                ..
            }, Primitive::Trust { truster, trustee }] = prims.as_slice()
            else {
                return false;
            };
            kids.is_empty() && c == comp && truster == comp && trustee == issuer && claims.contains(eq)
        }
        (Rule::KDed, Conclusion::Know { comp, eq }) => {
            let [Leaf::Rule(r)] = t.leaves.as_slice() else {
                return false;
            };
            let Some(eqs) = known_by(comp, &kids) else {
                return false;
            };
            if !arch.rules.contains(r) || !r.applies_to(comp) || eqs.len() != r.premises.len() {
                return false;
            }
            let mut s = Substitution::new();
            r.premises.iter().zip(&eqs).all(|(p, e)| p.match_into(e, &mut s)) && r.conclusion.substitute(&s) == *eq
        }
        (Rule::EqSym, Conclusion::Know { comp, eq }) => match known_by(comp, &kids).as_deref() {
            Some([a]) => a.pred == Pred::Equal && a.flipped() == *eq,
            _ => false,
        },
        (Rule::EqTrans, Conclusion::Know { comp, eq }) => match known_by(comp, &kids).as_deref() {
            Some([a, b]) => {
                a.pred == Pred::Equal
                    && b.pred == Pred::Equal
                    && eq.pred == Pred::Equal
                    && a.rhs == b.lhs
                    && eq.lhs == a.lhs
                    && eq.rhs == b.rhs
            }
            _ => false,
        },
        (Rule::EqSubst, Conclusion::Know { comp, eq }) => match known_by(comp, &kids).as_deref() {
            Some([s, target]) => s.pred == Pred::Equal && rewrites(target, &s.lhs, &s.rhs).contains(eq),
            _ => false,
        },
        (Rule::KAnd, Conclusion::Conj(parts)) => {
            let comp = match parts.first() {
                Some(Conclusion::Know { comp, .. }) => comp,
                _ => return false,
            };
            known_by(comp, &kids).is_some() && kids.len() == parts.len() && kids.iter().zip(parts).all(|(k, p)| *k == p)
        }
        (Rule::IAnd, Conclusion::Conj(parts)) => {
            kids.len() == parts.len() && kids.iter().zip(parts).all(|(k, p)| *k == p)
        }
        _ => false,
    }
}

fn access_primitive(rule: Rule, p: &Primitive, comp: &ComponentId, subject: &Subject, count: Multiplicity) -> bool {
    match (rule, p, subject) {
        (Rule::H1, Primitive::HasVar { comp: c, var, mult }, Subject::Var(v)) => c == comp && var == v && *mult == count,
        (Rule::H1p, Primitive::HasConst { comp: c, constant }, Subject::Const(k)) => {
            c == comp && constant == k && count == Multiplicity::ONE
        }
        (Rule::H2, Primitive::Receive { receiver, items, mult, .. }, Subject::Var(_)) => {
            receiver == comp && items.contains(subject) && *mult == count
        }
        (Rule::H2p, Primitive::Receive { receiver, items, .. }, Subject::Const(_)) => {
            receiver == comp && items.contains(subject) && count == Multiplicity::ONE
        }
        (Rule::H3, Primitive::Compute { group, target, mult, .. }, Subject::Var(v)) => {
            group.contains(comp) && target == v && *mult == count
        }
        _ => false,
    }
}

/// The equations of knowledge conclusions, all held by `comp`.
fn known_by(comp: &ComponentId, kids: &[&Conclusion]) -> Option<Vec<Equation>> {
    kids.iter()
        .map(|k| match k {
            Conclusion::Know { comp: c, eq } if c == comp => Some(eq.clone()),
            _ => None,
        })
        .collect()
}
