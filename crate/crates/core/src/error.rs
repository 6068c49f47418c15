use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("non-finite value in {what} at particle {index}")]
    NonFinite { what: &'static str, index: usize },
    #[error("non-positive density {rho} at particle {index} (t = {time})")]
    DensityViolation { index: usize, rho: f64, time: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dispersion relation has no root in [{lo}, {hi}] for period {period} s, depth {depth} m")]
    NoDispersionRoot { period: f64, depth: f64, lo: f64, hi: f64 },
    #[error("unknown body id {0}")]
    UnknownBody(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("time step {0} is not positive and finite")]
    BadTimeStep(f64),
    #[error("fixed time step {fixed} exceeds the CFL bound {bound}")]
    FixedStepTooLarge { fixed: f64, bound: f64 },
    #[error("gauge at x = {x} has no fluid particles in its strip")]
    EmptyGauge { x: f64 },
    #[error("series does not cover the window [{start}, {end}]")]
    WindowNotCovered { start: f64, end: f64 },
    #[error("corrupt or truncated binary data: {0}")]
    Decode(String),
    #[error("format version {found} is not supported (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("non-finite loss in {0}")]
    NonFiniteLoss(&'static str),
    #[error("non-finite gradient passed to the optimiser")]
    NonFiniteGradient,
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
