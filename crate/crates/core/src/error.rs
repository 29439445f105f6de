use crate::C64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("gamma pole: {what} = {at} is a nonpositive integer")]
    Pole { what: String, at: C64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("series did not certify tolerance {tol:e} within {terms} terms (tail bound {bound:e})")]
    NoConvergence { tol: f64, terms: usize, bound: f64 },
    #[error("asymptotic series diverges immediately (|t1| = {t1:e} >= |t0| = {t0:e})")]
    DivergentImmediately { t0: f64, t1: f64 },
    #[error("singular point: {0}")]
    Singular(String),
    #[error("degenerate parameters: {0}")]
    Degenerate(String),
    #[error("resonant parameters: {0}")]
    Resonant(String),
    #[error("step size collapsed at s = {at:.6} on segment {segment}")]
    StepCollapse { segment: usize, at: f64 },
    #[error("step budget exhausted on segment {segment}")]
    StepBudget { segment: usize },
    #[error("ill-conditioned frame (condition number {cond:e})")]
    IllConditioned { cond: f64 },
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("contour truncation insufficient; try T >= {suggested_t}")]
    Truncation { suggested_t: f64 },
    #[error("contour cannot separate poles: {0}")]
    Separation(String),
    #[error("slope fit degenerate: {0}")]
    FitDegenerate(String),
}
