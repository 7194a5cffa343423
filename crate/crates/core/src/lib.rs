//! Moment dynamics, nonclassicality witnesses and a Fock-space oracle for a
//! driven cavity coupled to two atomic ensembles.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod closure;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod model;
pub mod ode;
pub mod oracle;
pub mod runner;
pub mod witnesses;

pub use dynamics::{integrate, Trajectory};
pub use error::Error;
pub use model::{ConfigurationLabel, Mode, Moment, MomentState, Scenario, SystemParams};
pub use runner::{run_scenario, table_matrix, WitnessSeries};
pub use witnesses::WitnessRecord;
