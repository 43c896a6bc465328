use std::cmp::Ordering;
use std::fmt;
use std::num::NonZeroU64;

/// Upper bound on how many times a primitive may be exercised between two
/// resets. Zero is not representable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Multiplicity {
    Finite(NonZeroU64),
    Infinite,
}

impl Multiplicity {
    pub const ONE: Multiplicity = Multiplicity::Finite(NonZeroU64::MIN);

    /// `None` for zero.
    pub fn finite(n: u64) -> Option<Self> {
        NonZeroU64::new(n).map(Multiplicity::Finite)
    }

    pub fn get(self) -> Option<u64> {
        match self {
            Multiplicity::Finite(n) => Some(n.get()),
            Multiplicity::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Multiplicity::Infinite)
    }

    /// True when at least `required` uses are available.
    pub fn covers(self, required: u64) -> bool {
        match self {
            Multiplicity::Finite(n) => n.get() >= required,
            Multiplicity::Infinite => true,
        }
    }

    /// Caps an infinite bound at `cap`.
    pub fn clamp_to(self, cap: u64) -> u64 {
        match self {
            Multiplicity::Finite(n) => n.get().min(cap),
            Multiplicity::Infinite => cap,
        }
    }
}

impl Ord for Multiplicity {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Multiplicity::Finite(a), Multiplicity::Finite(b)) => a.cmp(b),
            (Multiplicity::Finite(_), Multiplicity::Infinite) => Ordering::Less,
            (Multiplicity::Infinite, Multiplicity::Finite(_)) => Ordering::Greater,
            (Multiplicity::Infinite, Multiplicity::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Multiplicity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplicity::Finite(n) => write!(f, "{n}"),
            Multiplicity::Infinite => f.write_str("inf"),
        }
    }
}
