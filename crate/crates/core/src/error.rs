//! Error types shared across the engine.

use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Error)]
pub enum EngineError {
    /// An input lies outside the domain an operation is defined on.
    #[error("domain error in {op}: {what} = {value} outside [{lo}, {hi}]")]
    Domain {
        op: &'static str,
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// A root find failed to reach its tolerance. Usually a sign of
    /// ill-conditioned stack parameters.
    #[error("root finding in {op} failed to converge: {detail}")]
    Convergence { op: &'static str, detail: String },

    /// Parameter invariants are violated.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The mechanism of a two-period scheme does not match the operation.
    #[error("mechanism mismatch: operation {op} requires {required}")]
    MechanismMismatch {
        op: &'static str,
        required: &'static str,
    },

    /// A PDE step left the admissible value range, which signals a violated
    /// stability (CFL) bound.
    #[error(
        "numerical instability at t = {time}: value {value} outside [{lo}, {hi}] \
         (time step too large for this mesh?)"
    )]
    Instability {
        time: f64,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// Grids that must be nested (for error norms) or identical (for the
    /// two-period coupling) are not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Allowance surfaces required by a dependent solve are missing levels.
    #[error("allowance surfaces do not cover the requested range: {0}")]
    MissingAllowance(String),

    /// Degenerate input to the refinement-rate fit.
    #[error("degenerate refinement study: {0}")]
    DegenerateStudy(String),

    /// I/O error while writing artifacts.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// CSV serialization error.
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// Errors produced while reading or validating a configuration file.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },

    #[error("cannot parse config {path}: {detail}")]
    Parse { path: String, detail: String },

    #[error("invalid configuration: {0}")]
    Invalid(String),

    #[error("invariant violations:\n{}", .0.join("\n"))]
    Violations(Vec<String>),
}
