use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    RejectParam(String),
    #[error("point {re}+{im}i is a pole of the derivative")]
    PoleInput { re: f64, im: f64 },
    #[error("root solver did not converge after {sweeps} sweeps")]
    SolverFail { sweeps: usize },
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("branch jump on curve {curve} at t = {t}")]
    BranchJump { curve: usize, t: f64 },
    #[error("path lifting stalled on sheet {sheet} at t = {t}")]
    LiftStall { sheet: usize, t: f64 },
    #[error("branch is ambiguous at {re}+{im}i")]
    BranchAmbiguous { re: f64, im: f64 },
    #[error("fiber matching is ambiguous at rho = {rho}")]
    MatchAmbiguous { rho: f64 },
    #[error("guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn reject<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::RejectParam(msg.into()))
}
