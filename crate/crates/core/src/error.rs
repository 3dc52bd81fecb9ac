use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical inconsistency: {0}")]
    Inconsistency(String),

    #[error("unphysical state: {0}")]
    Unphysical(String),

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("step size underflow at t = {t} (last accepted time)")]
    StepSizeUnderflow { t: f64 },

    #[error("Fock cutoff insufficient after {doublings} doublings (cutoffs {cutoff_a}x{cutoff_b}, top-level population {population:.3e})")]
    CutoffInsufficient {
        doublings: usize,
        cutoff_a: usize,
        cutoff_b: usize,
        population: f64,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("{path}:{line}: {msg}")]
    Config {
        path: String,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidInput(_) | Error::UnsupportedRegime(_) => 2,
            Error::NoConvergence(_)
            | Error::StepSizeUnderflow { .. }
            | Error::CutoffInsufficient { .. } => 3,
            _ => 1,
        }
    }
}

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} is not finite ({value})")))
    }
}
