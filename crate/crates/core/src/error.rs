use thiserror::Error;

use crate::bundle::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid bundle: {0}")]
    InvalidBundle(ValidationReport),

    #[error("failed to parse bundle file: {0}")]
    Parse(String),

    #[error("unknown catalog manifold `{0}`")]
    NotInCatalog(String),

    #[error("non-finite integrand value at x = {abscissa}")]
    Numerical { abscissa: f64 },

    #[error("no sign change on [{lo}, {hi}] (g(lo) = {g_lo}, g(hi) = {g_hi})")]
    NoSignChange { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },

    #[error("no convergence: {reason} (last bracket [{lo}, {hi}])")]
    NoConvergence { reason: String, lo: f64, hi: f64 },

    #[error("existence condition failed: {reason} (integral = {integral})")]
    ExistenceFailed { integral: f64, reason: String },

    #[error("no admissible root of the consistency quadratic at R = {r}")]
    NoAdmissibleRoot { r: f64 },

    #[error("only the trivial soliton (kappa1 = 0) was found")]
    TrivialSoliton,

    #[error("s = {s} outside the profile interval [0, {s_star}]")]
    Domain { s: f64, s_star: f64 },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("warped-product fiber dimension must be an integer >= 2, got m = {m}")]
    FiberDimension { m: f64 },

    #[error("unsupported input: {0}")]
    Unsupported(String),
}

impl Error {
    /// True for failures of the root finders and closing conditions, as
    /// opposed to bad input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::Numerical { .. }
                | Error::NoSignChange { .. }
                | Error::NoConvergence { .. }
                | Error::NoAdmissibleRoot { .. }
                | Error::TrivialSoliton
                | Error::InvalidProfile(_)
        )
    }
}
