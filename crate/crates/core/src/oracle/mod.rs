//! Truncated-Fock Lindblad simulator for the same three-mode model.

pub mod fock;
pub mod generator;
pub mod report;

pub use fock::{
    expectation, moment_word, DensityMatrix, ExactCorrelators, FockBasisSpec, SparseOp,
    DEFAULT_DIMENSION_CAP,
};
pub use generator::{
    build_generator, evolve, evolve_observed, Liouvillian, EVOLUTION_POSITIVITY_SHIFT,
};
pub use report::{closure_report, ClosureColumn, ClosureReport};
