use thiserror::Error;

/// Errors raised by the solvers, the scheme and the I/O layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("incompatible right-hand side: |Qb| = {residual:e} exceeds {tolerance:e}")]
    Compatibility { residual: f64, tolerance: f64 },

    #[error("singular system: {0}")]
    Singularity(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("inadmissible state{}: {detail}", cell.map(|c| format!(" in cell {c}")).unwrap_or_default())]
    Admissibility { cell: Option<usize>, detail: String },

    #[error("time step {dt:e} violates the CFL bound {bound:e}")]
    CflViolation { dt: f64, bound: f64 },

    #[error("time step {dt:e} exceeds the explicit diffusion bound {bound:e}")]
    Stability { dt: f64, bound: f64 },

    #[error("{0} is not available for this model")]
    NotAvailable(&'static str),

    #[error("{0} is not implemented for this model")]
    NotImplemented(&'static str),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("step {step} at t = {time:e}: {source}")]
    Step {
        step: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error at line {line}: {detail}")]
    Parse { line: usize, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
