use thiserror::Error;

/// Errors produced by the numerical routines and the command-line front end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of a function.
    #[error("domain error in {func}: argument {arg} ({reason})")]
    Domain {
        func: &'static str,
        arg: f64,
        reason: &'static str,
    },

    /// A fibre specification violates its invariants.
    #[error("invalid fibre specification: {0}")]
    InvalidSpec(String),

    /// A dipole pose or other model input violates its invariants.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The dispersion residual never changed sign on the scanned interval.
    #[error("no HE11 root bracketed; residual sign pattern: {pattern}")]
    NoBracket { pattern: String },

    /// Root refinement hit its iteration cap.
    #[error("root refinement did not converge after {iterations} iterations; best bracket [{lo}, {hi}]")]
    NoConvergence { iterations: usize, lo: f64, hi: f64 },

    /// Zero Jones vector or zero-intensity Stokes vector.
    #[error("degenerate polarization state: {0}")]
    DegenerateState(&'static str),

    /// Least-squares fit could not be performed.
    #[error("fit failure: {0}")]
    FitFailure(String),

    /// Configuration file or command-line override problem.
    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    /// Process exit code associated with the error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidSpec(_) | Error::InvalidInput(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
