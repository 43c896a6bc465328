//! Terms, architectures, properties and the reference corpus.

mod arch;
mod consistency;
mod corpus;
mod ids;
mod multiplicity;
mod property;
mod term;

pub use arch::{ArchDiff, Architecture, DepEntry, DepPremise, DeductiveRule, Primitive, WellFormednessError};
pub use consistency::{check_consistency, ConsistencyReport, Violation};
pub use corpus::{instantiate_corpus, CorpusError, CorpusName, CorpusParams};
pub use ids::{ComponentId, ConstId, FuncId, Subject, VarId};
pub use multiplicity::Multiplicity;
pub use property::Property;
pub use term::{Equation, Pred, ProofItem, Statement, Substitution, Term};
