use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("energy {0} is outside the bulk (-2, 2)")]
    Domain(f64),

    #[error("unsupported regime: {0}")]
    Unsupported(String),

    /// A kernel produced a non-finite or non-converged state.
    #[error("numerical failure in {context}: {detail}")]
    Numerical {
        context: &'static str,
        detail: String,
        step: Option<usize>,
        residual: Option<f64>,
    },

    #[error("stored stride too coarse: phase jump {jump:.3} at snapshot {index}")]
    StrideTooCoarse { index: usize, jump: f64 },

    /// A structural invariant (monotonicity, winding) was violated.
    #[error("integrity violation: {0}")]
    Integrity(String),

    #[error("configuration rejected:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),

    #[error("record was produced by version {recorded}, this build is {current}")]
    VersionMismatch { recorded: String, current: String },

    #[error("replayed payload digest {replayed} does not match stored {stored}")]
    DigestMismatch { stored: String, replayed: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn numerical(context: &'static str, detail: impl Into<String>) -> Self {
        Error::Numerical {
            context,
            detail: detail.into(),
            step: None,
            residual: None,
        }
    }

    pub(crate) fn non_finite(context: &'static str, step: usize) -> Self {
        Error::Numerical {
            context,
            detail: format!("non-finite state at step {step}"),
            step: Some(step),
            residual: None,
        }
    }

    /// Process exit code for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Argument(_) | Error::Domain(_) | Error::Unsupported(_) => 2,
            Error::Numerical { .. } => 3,
            Error::Integrity(_)
            | Error::StrideTooCoarse { .. }
            | Error::DigestMismatch { .. }
            | Error::VersionMismatch { .. } => 4,
            Error::Io(_) | Error::Json(_) => 1,
        }
    }
}
