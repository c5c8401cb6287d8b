use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A root-finding target is not bracketed by the supplied interval.
    #[error("bracket error: target {target} not in [{lo_value}, {hi_value}]")]
    Bracket { target: f64, lo_value: f64, hi_value: f64 },

    /// A declared function failed its sampled monotonicity or class-K check.
    #[error("map '{label}' is not admissible: {reason}")]
    NotAdmissible { label: String, reason: String },

    /// A time integrator produced non-finite values or a singular solve.
    #[error("solver diverged at step {step} (t = {time}): {reason}")]
    SolverDiverged { step: usize, time: f64, reason: String },

    /// A structural assumption of the model was violated during a solve.
    #[error("assumption violated: {0}")]
    AssumptionViolation(String),

    /// Two objects that must agree (grid/field, class/spec, series lengths) do not.
    #[error("mismatch: {0}")]
    Mismatch(String),

    /// A construct was used outside the setting it is defined for.
    #[error("misuse: {0}")]
    Misuse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
