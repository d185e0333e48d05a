use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not positive definite: eigenvalue {eigenvalue:e} is below the floor {floor:e}")]
    NotPositiveDefinite { eigenvalue: f64, floor: f64 },

    #[error(
        "sample covariance is rank deficient (n = {n}, p = {p}); whiten the design externally \
         or supply more observations than variables"
    )]
    RankDeficient { n: usize, p: usize },

    #[error("rank-one certificate undefined: rank1_gap {rank1_gap:e} is not below {tol:e}")]
    CertificateUndefined { rank1_gap: f64, tol: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::InvalidArgument(_))
    }
}
