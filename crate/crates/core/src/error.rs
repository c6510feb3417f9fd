use thiserror::Error;

/// Everything that can go wrong in the geometric and shooting kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid needs an odd node count of at least {min}, got {n}")]
    InvalidGrid { n: usize, min: usize },

    #[error("array length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("inadmissible profile: {0}")]
    InadmissibleProfile(String),

    #[error("non-positive circumferential radius h = {value:e} at interior node {index}")]
    NonPositiveRadius { index: usize, value: f64 },

    #[error("pole regularization failed at s = {s}: |dh/dr| = {slope:e} is below {tol:e}")]
    PoleRegularization { s: f64, slope: f64, tol: f64 },

    #[error("potential gradient does not vanish at pole s = {s}: f_r = {value:e}")]
    PotentialAtPole { s: f64, value: f64 },

    #[error("arclength is not strictly increasing at node {index}")]
    NonMonotoneArclength { index: usize },

    #[error("time step {dt:e} exceeds the stability bound {limit:e}")]
    StabilityViolation { dt: f64, limit: f64 },

    #[error("step rejected at t = {t}: {reason}")]
    StepRejected { t: f64, reason: String },

    #[error("flow failed at t = {t}: {source}")]
    FlowFailed {
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("non-finite ODE state after r = {last_r}")]
    Blowup { last_r: f64 },

    #[error("shoot with a = {a} did not reach h = 0 before r = {r_max}")]
    NoClosure { a: f64, r_max: f64 },

    #[error("invalid bracket [{lo}, {hi}]")]
    NotBracketed { lo: f64, hi: f64 },

    #[error("degenerate least-squares fit: sum of h^2 = {0:e}")]
    DegenerateFit(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("profile I/O: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

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
