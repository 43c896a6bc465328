//! Verification toolkit for privacy architectures.
//!
//! An [`Architecture`] describes which components hold, receive, compute and
//! verify which values, and whom they trust. The [`prover`] derives access
//! (`Has`, `HasNone`) and knowledge (`K`) properties with checkable proof
//! trees; [`semantics`] executes the same architectures as event traces so the
//! two can be cross-checked; [`leakage`] reproduces the quantization attack on
//! nearest-candidate identification modules.

pub mod dsl;
pub mod model;
pub mod prover;
pub mod report;
pub mod leakage;
pub mod semantics;

pub use model::*;
