use std::collections::BTreeSet;
use std::fmt;

use super::arch::{Architecture, WellFormednessError};
use super::ids::{ComponentId, ConstId, Subject, VarId};
use super::term::{Equation, Term};

/// A query in the privacy logic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    /// `Has_i(X^(n))`, `count >= 1`.
    HasVar {
        comp: ComponentId,
        var: VarId,
        count: u64,
    },
    HasConst {
        comp: ComponentId,
        constant: ConstId,
    },
    HasNoneVar {
        comp: ComponentId,
        var: VarId,
    },
    HasNoneConst {
        comp: ComponentId,
        constant: ConstId,
    },
    /// `K_i(Eq)`.
    Know {
        comp: ComponentId,
        eq: Equation,
    },
    Conj(Vec<Property>),
}

impl Property {
    pub fn has(comp: &str, subject: &Subject, count: u64) -> Property {
        let comp = ComponentId::new(comp);
        match subject {
            Subject::Var(var) => Property::HasVar {
                comp,
                var: var.clone(),
                count,
            },
            Subject::Const(constant) => Property::HasConst {
                comp,
                constant: constant.clone(),
            },
        }
    }

    pub fn has_none(comp: &str, subject: &Subject) -> Property {
        let comp = ComponentId::new(comp);
        match subject {
            Subject::Var(var) => Property::HasNoneVar {
                comp,
                var: var.clone(),
            },
            Subject::Const(constant) => Property::HasNoneConst {
                comp,
                constant: constant.clone(),
            },
        }
    }

    pub fn know(comp: &str, eq: Equation) -> Property {
        Property::Know {
            comp: ComponentId::new(comp),
            eq,
        }
    }

    /// Ground terms the property mentions.
    pub fn terms(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        self.collect_terms(&mut out);
        out
    }

    fn collect_terms(&self, out: &mut BTreeSet<Term>) {
        match self {
            Property::Know { eq, .. } => {
                for t in eq.terms() {
                    t.visit(&mut |s| {
                        out.insert(s.clone());
                    });
                }
            }
            Property::Conj(ps) => ps.iter().for_each(|p| p.collect_terms(out)),
            _ => {}
        }
    }

    /// Rebinds names parsed without context: a `HasVar`/`HasNoneVar` whose
    /// name is a declared constant becomes the constant form, and variable
    /// references inside equations that name constants become constants.
    pub fn resolve(self, arch: &Architecture) -> Property {
        let is_const = |v: &VarId| {
            !arch.variables.contains_key(v) && arch.constants.contains(&ConstId::new(v.as_str()))
        };
        match self {
            Property::HasVar { comp, var, count } if is_const(&var) => {
                let _ = count;
                Property::HasConst {
                    comp,
                    constant: ConstId::new(var.as_str()),
                }
            }
            Property::HasNoneVar { comp, var } if is_const(&var) => Property::HasNoneConst {
                comp,
                constant: ConstId::new(var.as_str()),
            },
            Property::Know { comp, eq } => Property::Know {
                comp,
                eq: Equation {
                    pred: eq.pred,
                    lhs: resolve_term(eq.lhs, arch),
                    rhs: resolve_term(eq.rhs, arch),
                },
            },
            Property::Conj(ps) => Property::Conj(ps.into_iter().map(|p| p.resolve(arch)).collect()),
            other => other,
        }
    }

    /// Structural checks against an architecture.
    pub fn validate(&self, arch: &Architecture) -> Vec<WellFormednessError> {
        let mut errs = Vec::new();
        self.validate_into(arch, &mut errs);
        errs
    }

    fn validate_into(&self, arch: &Architecture, errs: &mut Vec<WellFormednessError>) {
        let comp_ok = |c: &ComponentId, errs: &mut Vec<WellFormednessError>| {
            if !arch.components.contains(c) {
                errs.push(WellFormednessError::UnknownComponent(c.clone()));
            }
        };
        match self {
            Property::HasVar { comp, var, .. } | Property::HasNoneVar { comp, var } => {
                comp_ok(comp, errs);
                if !arch.variables.contains_key(var) {
                    errs.push(WellFormednessError::UnknownVariable(var.clone()));
                }
            }
            Property::HasConst { comp, constant } | Property::HasNoneConst { comp, constant } => {
                comp_ok(comp, errs);
                if !arch.constants.contains(constant) {
                    errs.push(WellFormednessError::UnknownConstant(constant.clone()));
                }
            }
            Property::Know { comp, eq } => {
                comp_ok(comp, errs);
                arch.check_term(&eq.lhs, false, errs);
                arch.check_term(&eq.rhs, false, errs);
            }
            Property::Conj(ps) => ps.iter().for_each(|p| p.validate_into(arch, errs)),
        }
    }
}

fn resolve_term(t: Term, arch: &Architecture) -> Term {
    match t {
        Term::Var {
            var,
            index: None,
            window: None,
        } if !arch.variables.contains_key(&var)
            && arch.constants.contains(&ConstId::new(var.as_str())) =>
        {
            Term::Const(ConstId::new(var.as_str()))
        }
        Term::Apply(f, args) => {
            Term::Apply(f, args.into_iter().map(|a| resolve_term(a, arch)).collect())
        }
        other => other,
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Property::HasVar { comp, var, count } => write!(f, "has^{count} {comp}({var})"),
            Property::HasConst { comp, constant } => write!(f, "has {comp}({constant})"),
            Property::HasNoneVar { comp, var } => write!(f, "hasnone {comp}({var})"),
            Property::HasNoneConst { comp, constant } => write!(f, "hasnone {comp}({constant})"),
            Property::Know { comp, eq } => write!(f, "knows {comp} ({eq})"),
            Property::Conj(ps) => {
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" & ")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
        }
    }
}
