use std::fmt;

macro_rules! symbol_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(String);

        impl $name {
            pub fn new(name: impl Into<String>) -> Self {
                Self(name.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }
    };
}

symbol_id!(
    /// A component of an architecture (user, terminal, server, ...).
    ComponentId
);
symbol_id!(VarId);
symbol_id!(ConstId);
symbol_id!(FuncId);

/// Something a component can hold: a variable or a constant.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subject {
    Var(VarId),
    Const(ConstId),
}

impl Subject {
    pub fn var(name: &str) -> Self {
        Subject::Var(VarId::new(name))
    }

    pub fn constant(name: &str) -> Self {
        Subject::Const(ConstId::new(name))
    }

    pub fn name(&self) -> &str {
        match self {
            Subject::Var(v) => v.as_str(),
            Subject::Const(c) => c.as_str(),
        }
    }

    pub fn is_const(&self) -> bool {
        matches!(self, Subject::Const(_))
    }
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
