use thiserror::Error;

use crate::model::ParamReport;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(ParamReport),
    #[error("unknown configuration `{0}` (expected AA, AN, NA or NN)")]
    UnknownConfiguration(String),
}

/// Failure of the adaptive integrator. `last_good_time` is the last time
/// at which the state was accepted.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrationError {
    #[error("step size underflow at t = {last_good_time} (h = {step:e})")]
    StepSizeUnderflow { last_good_time: f64, step: f64 },
    #[error("non-finite state after t = {last_good_time}")]
    NonFinite { last_good_time: f64 },
    #[error("step budget of {max_steps} exhausted at t = {last_good_time}")]
    TooManySteps {
        last_good_time: f64,
        max_steps: usize,
    },
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
}

impl IntegrationError {
    pub fn last_good_time(&self) -> Option<f64> {
        match self {
            IntegrationError::StepSizeUnderflow { last_good_time, .. }
            | IntegrationError::NonFinite { last_good_time }
            | IntegrationError::TooManySteps { last_good_time, .. } => Some(*last_good_time),
            IntegrationError::InvalidGrid(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Integration(#[from] IntegrationError),
    #[error("first-moment system is singular; no unique steady state")]
    NoSteadyState,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WitnessError {
    #[error(
        "{witness} has imaginary residue {residue:e}; moment data is not Hermitian-consistent"
    )]
    ImaginaryResidue { witness: String, residue: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("Fock basis dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("invalid Fock basis: {0}")]
    InvalidBasis(String),
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("operator word of length {0} exceeds the supported maximum of 6")]
    WordTooLong(usize),
    #[error(
        "density matrix lost positivity (shift {shift:e} insufficient); increase the truncation"
    )]
    PositivityViolation { shift: f64 },
    #[error(transparent)]
    Integration(#[from] IntegrationError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Witness(#[from] WitnessError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Configuration file error, carrying the 1-based line number where
/// applicable.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}` (first set on line {first})")]
    DuplicateKey {
        line: usize,
        key: String,
        first: usize,
    },
    #[error("line {line}: malformed value `{value}` for `{key}`")]
    MalformedNumber {
        line: usize,
        key: String,
        value: String,
    },
    #[error("line {line}: expected `key = value`, got `{text}`")]
    MalformedLine { line: usize, text: String },
    #[error("line {line}: `{key}` conflicts with `preset` (line {preset_line}); only chi, detunings and bath occupations may override a preset")]
    PresetConflict {
        line: usize,
        key: String,
        preset_line: usize,
    },
    #[error("line {line}: {source}")]
    BadValue { line: usize, source: ModelError },
    #[error("invalid configuration: {0}")]
    Invalid(ModelError),
}

/// Crate-wide error for callers that do not care which stage failed.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Integration(#[from] IntegrationError),
    #[error(transparent)]
    Witness(#[from] WitnessError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
