use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("state outside the admissible neighborhood: {0}")]
    Domain(String),
    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },
    #[error("entropy pair is only available for the small-disturbance system")]
    UnsupportedRegime,
    #[error("invalid boundary: {0}")]
    InvalidBoundary(String),
    #[error("invalid initial data: {0}")]
    InvalidData(String),
    #[error("invalid interaction: {0}")]
    InvalidInteraction(String),
    #[error("Glimm total {total:e} at x = {x} exceeds twice its initial value {initial:e}")]
    BudgetExceeded { x: f64, total: f64, initial: f64 },
    #[error("front count exceeded {0}")]
    FrontOverflow(usize),
    #[error("two events at x = {0}")]
    SimultaneousEvents(f64),
    #[error("event at x = {0} inside the step window")]
    EventInWindow(f64),
    #[error("profiles have different far-field states")]
    BackgroundMismatch,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
