use std::fmt::{self, Write};

use crate::model::{ComponentId, ConstId, DepEntry, DepPremise, FuncId, Statement, Subject, Term, VarId};

/// A concrete value. Function results are fingerprints of their arguments,
/// so evaluation is injective by construction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Token(u32),
    Const(ConstId),
    App(FuncId, Vec<Value>),
    /// The last `n` defined values of a windowed argument, oldest first.
    Window(Vec<Value>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Token(n) => write!(f, "t{n}"),
            Value::Const(c) => write!(f, "{c}"),
            Value::App(func, args) => {
                write!(f, "{func}(")?;
                write_list(f, args)?;
                f.write_str(")")
            }
            Value::Window(vs) => {
                f.write_str("[")?;
                write_list(f, vs)?;
                f.write_str("]")
            }
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, vs: &[Value]) -> fmt::Result {
    for (i, v) in vs.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Event {
    Has {
        comp: ComponentId,
        var: VarId,
        value: Value,
    },
    HasConst {
        comp: ComponentId,
        constant: ConstId,
    },
    Receive {
        receiver: ComponentId,
        sender: ComponentId,
        statements: Vec<Statement>,
        assignments: Vec<(Subject, Value)>,
    },
    /// `Compute_G(X = T)`. Dependences are executed as computations of
    /// their owner with a [`dep_function`] right-hand side.
    Compute {
        group: Vec<ComponentId>,
        target: Subject,
        rhs: Term,
    },
    Verify {
        comp: ComponentId,
        statement: Statement,
    },
    Session,
    Reset,
}

pub type Trace = Vec<Event>;

/// Function symbol standing for "whatever lets the owner derive `target`".
pub fn dep_function(target: &Subject) -> FuncId {
    FuncId::new(format!("Dep[{}]", target.name()))
}

/// The computation event a dependence entry gives rise to.
pub fn dep_event(d: &DepEntry) -> Event {
    let args = d
        .premises
        .iter()
        .map(|p| match p {
            DepPremise::Var { var, count } if *count > 1 => Term::windowed(var.as_str(), u32::try_from(*count).unwrap_or(u32::MAX)),
            DepPremise::Var { var, .. } => Term::of_var(var),
            DepPremise::Const(c) => Term::Const(c.clone()),
        })
        .collect();
    Event::Compute {
        group: vec![d.owner.clone()],
        target: d.target.clone(),
        rhs: Term::Apply(dep_function(&d.target), args),
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Has { comp, var, value } => write!(f, "has\t{comp}\t{var}\t{value}"),
            Event::HasConst { comp, constant } => write!(f, "hasconst\t{comp}\t{constant}"),
            Event::Receive {
                receiver,
                sender,
                statements,
                assignments,
            } => {
                write!(f, "receive\t{receiver}\t{sender}\t")?;
                for (i, s) in statements.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "{s}")?;
                }
                f.write_str("\t")?;
                for (i, (s, v)) in assignments.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{s}:{v}")?;
                }
                Ok(())
            }
            Event::Compute { group, target, rhs } => {
                f.write_str("compute\t")?;
                for (i, g) in group.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{g}")?;
                }
                write!(f, "\t{target} = {rhs}")
            }
            Event::Verify { comp, statement } => write!(f, "verify\t{comp}\t{statement}"),
            Event::Session => f.write_str("session"),
            Event::Reset => f.write_str("reset"),
        }
    }
}

/// One event per line, tab-separated fields.
pub fn format_trace(trace: &[Event]) -> String {
    let mut out = String::new();
    for e in trace {
        let _ = writeln!(out, "{e}");
    }
    out
}
