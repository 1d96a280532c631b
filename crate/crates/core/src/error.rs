use thiserror::Error;

/// Errors raised by the numerical kernels and the verification pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("spectral-flow certification failed on [{t0}, {t1}] after {refinements} refinements")]
    Certification { t0: f64, t1: f64, refinements: usize },

    #[error("oracle inconclusive near t = {t}: {reason}")]
    OracleInconclusive { t: f64, reason: String },

    #[error("no admissible chart covers the path at sample {index} after {attempts} attempts")]
    ChartCover { index: usize, attempts: usize },

    #[error(
        "no nondegenerate subspace found in {attempts} draws \
         (smallest nullities observed: {min_nullity_first}, {min_nullity_second})"
    )]
    SearchExhausted {
        attempts: usize,
        min_nullity_first: usize,
        min_nullity_second: usize,
    },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonFinite(_) => "non_finite",
            Error::Domain(_) => "domain",
            Error::Certification { .. } => "certification",
            Error::OracleInconclusive { .. } => "oracle_inconclusive",
            Error::ChartCover { .. } => "chart_cover",
            Error::SearchExhausted { .. } => "search_exhausted",
            Error::Numeric(_) => "numeric",
            Error::Internal(_) => "internal",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
