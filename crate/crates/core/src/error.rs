use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("no interior solution: {0}")]
    NoInteriorSolution(String),
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("root finder did not converge after {iterations} iterations")]
    NotConverged { iterations: usize },
    #[error("no real root: discriminant {0} is negative")]
    NoRealRoot(f64),
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error("insufficient rows: {0}")]
    InsufficientRows(String),
}

pub type Result<T> = std::result::Result<T, Error>;
