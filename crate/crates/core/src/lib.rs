//! Generalized Turing machines for computable analysis.
//!
//! Machines whose tape cells hold elements of arbitrary carrier sets, the
//! naming layer that connects those sets to symbol sequences, realization
//! checking and lowering, stream evaluation through monotone word machines,
//! exact-real examples, and the machine-splitting construction behind
//! Weihrauch reductions.

pub mod analysis;
pub mod builtins;
pub mod corpus;
pub mod dsl;
pub mod exact;
pub mod machine;
pub mod names;
pub mod realize;
pub mod represent;
pub mod type2gen;
pub mod weihrauch;
