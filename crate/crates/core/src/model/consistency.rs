use std::collections::BTreeSet;
use std::fmt;

use super::arch::{Architecture, Primitive};
use super::ids::{ComponentId, Subject};
use super::multiplicity::Multiplicity;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A computation uses a value one of its group members cannot obtain
    /// through a `has`, `compute` or `receive` primitive.
    UnavailableInput {
        primitive: usize,
        component: ComponentId,
        subject: Subject,
    },
    /// Two primitives carry different finite multiplicities.
    MixedMultiplicity {
        first: (usize, Multiplicity),
        second: (usize, Multiplicity),
    },
    /// A trust edge or statement refers to an undeclared component.
    DanglingIssuer {
        primitive: usize,
        component: ComponentId,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnavailableInput {
                primitive,
                component,
                subject,
            } => write!(
                f,
                "primitive #{primitive}: {component} computes over `{subject}` without access to it"
            ),
            Violation::MixedMultiplicity { first, second } => write!(
                f,
                "primitive #{} has multiplicity {} but primitive #{} has {}",
                second.0, second.1, first.0, first.1
            ),
            Violation::DanglingIssuer {
                primitive,
                component,
            } => write!(f, "primitive #{primitive}: unknown component `{component}`"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub violations: Vec<Violation>,
    /// The architecture's uniform bound, present when consistent.
    pub bound: Option<Multiplicity>,
}

impl ConsistencyReport {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ConsistencyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bound {
            Some(b) if self.violations.is_empty() => writeln!(f, "consistent (bound {b})"),
            _ => {
                writeln!(f, "inconsistent: {} violation(s)", self.violations.len())?;
                for v in &self.violations {
                    writeln!(f, "  {v}")?;
                }
                Ok(())
            }
        }
    }
}

/// Checks the consistency assumptions of the extended architecture language.
pub fn check_consistency(arch: &Architecture) -> ConsistencyReport {
    let mut violations = Vec::new();

    let mut access: BTreeSet<(ComponentId, Subject)> = BTreeSet::new();
    for p in &arch.primitives {
        match p {
            Primitive::HasVar { comp, var, .. } => {
                access.insert((comp.clone(), Subject::Var(var.clone())));
            }
            Primitive::HasConst { comp, constant } => {
                access.insert((comp.clone(), Subject::Const(constant.clone())));
            }
            Primitive::Receive {
                receiver, items, ..
            } => {
                for it in items {
                    access.insert((receiver.clone(), it.clone()));
                }
            }
            Primitive::Compute { group, target, .. } => {
                for g in group {
                    access.insert((g.clone(), Subject::Var(target.clone())));
                }
            }
            _ => {}
        }
    }

    for (idx, p) in arch.primitives.iter().enumerate() {
        if let Primitive::Compute { group, rhs, .. } = p {
            let inputs = rhs
                .variables()
                .into_iter()
                .map(Subject::Var)
                .chain(rhs.constants().into_iter().map(Subject::Const));
            for subject in inputs {
                for member in group {
                    if !access.contains(&(member.clone(), subject.clone())) {
                        violations.push(Violation::UnavailableInput {
                            primitive: idx,
                            component: member.clone(),
                            subject: subject.clone(),
                        });
                    }
                }
            }
        }
    }

    let mut first_finite: Option<(usize, Multiplicity)> = None;
    for (idx, p) in arch.primitives.iter().enumerate() {
        let Some(m) = p.mult().filter(|m| !m.is_infinite()) else {
            continue;
        };
        match first_finite {
            None => first_finite = Some((idx, m)),
            Some((_, n)) if n == m => {}
            Some(first) => violations.push(Violation::MixedMultiplicity {
                first,
                second: (idx, m),
            }),
        }
    }

    for (idx, p) in arch.primitives.iter().enumerate() {
        let refs: Vec<&ComponentId> = match p {
            Primitive::Trust { truster, trustee } => vec![truster, trustee],
            Primitive::Verify {
                comp, statement, ..
            } => {
                let mut v = vec![comp];
                v.extend(statement.issuers());
                v
            }
            Primitive::Receive { statements, .. } => {
                statements.iter().flat_map(|s| s.issuers()).collect()
            }
            _ => continue,
        };
        for c in refs {
            if !arch.components.contains(c) {
                violations.push(Violation::DanglingIssuer {
                    primitive: idx,
                    component: c.clone(),
                });
            }
        }
    }

    let bound = violations.is_empty().then(|| arch.bound());
    ConsistencyReport { violations, bound }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ids::{ComponentId, VarId};
    use crate::model::term::Term;

    fn arch_with(prims: Vec<Primitive>) -> Architecture {
        let mut a = Architecture::new();
        a.components.insert(ComponentId::new("T"));
        for v in ["y", "z"] {
            a.variables.insert(VarId::new(v), 1);
        }
        a.functions.insert("F".into(), 1);
        a.primitives = prims;
        a
    }

    #[test]
    fn compute_without_access_is_reported() {
        let a = arch_with(vec![Primitive::Compute {
            group: vec![ComponentId::new("T")],
            target: VarId::new("y"),
            rhs: Term::app("F", vec![Term::var("z")]),
            mult: Multiplicity::Infinite,
        }]);
        let r = check_consistency(&a);
        assert_eq!(
            r.violations,
            vec![Violation::UnavailableInput {
                primitive: 0,
                component: ComponentId::new("T"),
                subject: Subject::var("z"),
            }]
        );
        assert_eq!(r.bound, None);
    }

    #[test]
    fn mixed_finite_multiplicities_are_reported() {
        let has = |v: &str, n| Primitive::HasVar {
            comp: ComponentId::new("T"),
            var: VarId::new(v),
            mult: Multiplicity::finite(n).unwrap(),
        };
        let r = check_consistency(&arch_with(vec![has("y", 3), has("z", 5)]));
        assert!(matches!(
            r.violations.as_slice(),
            [Violation::MixedMultiplicity { first: (0, _), second: (1, _) }]
        ));
    }

    #[test]
    fn infinite_mixes_with_a_single_finite_bound() {
        let a = arch_with(vec![
            Primitive::HasVar {
                comp: ComponentId::new("T"),
                var: VarId::new("y"),
                mult: Multiplicity::Infinite,
            },
            Primitive::HasVar {
                comp: ComponentId::new("T"),
                var: VarId::new("z"),
                mult: Multiplicity::finite(4).unwrap(),
            },
        ]);
        let r = check_consistency(&a);
        assert!(r.is_consistent());
        assert_eq!(r.bound, Multiplicity::finite(4));
    }

    #[test]
    fn dangling_trust_is_reported() {
        let a = arch_with(vec![Primitive::Trust {
            truster: ComponentId::new("T"),
            trustee: ComponentId::new("Q"),
        }]);
        let r = check_consistency(&a);
        assert_eq!(
            r.violations,
            vec![Violation::DanglingIssuer {
                primitive: 0,
                component: ComponentId::new("Q")
            }]
        );
    }
}
