//! Forward-chaining derivation of access and knowledge properties, with
//! replayable proof trees.

mod check;
mod derive;
mod facts;
mod proof;

pub use check::validate_proof;
pub use derive::{derive, derive_in, derive_with, explain, Verdict};
pub use facts::{
    saturate, saturate_with, FactBase, HasFact, KnowFact, ProverConfig, ProverError, SaturationStats, DEFAULT_BUDGET,
};
pub use proof::{Conclusion, Leaf, ProofTree, Rule};
