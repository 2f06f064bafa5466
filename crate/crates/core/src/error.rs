use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("odd matrix dimension {0}; symplectic matrices are 2n x 2n")]
    OddDimension(usize),

    #[error("matrix is not skew-symplectic (defect {defect:.3e})")]
    NotSkewSymplectic { defect: f64 },

    #[error("matrix is not symplectic (defect {defect:.3e})")]
    SymplecticDefect { defect: f64 },

    #[error("complex structure check failed: {0}")]
    NotCompatible(String),

    #[error("commuting pair certificate failed (commutator {defect:.3e})")]
    CommutatorDefect { defect: f64 },

    #[error("matrix exponential overflow (norm {norm:.3e})")]
    Overflow { norm: f64 },

    #[error("matrix exponential self-check residual {residual:.3e} exceeds {tol:.3e}")]
    ExpmAccuracy { residual: f64, tol: f64 },

    #[error("matrix is numerically singular (condition number {condition:.3e})")]
    NearSingular { condition: f64 },

    #[error("matrix is not complex-linear (commutator with J0 {defect:.3e})")]
    NotComplexLinear { defect: f64 },

    #[error("phase path undersampled at sample {index} (gap {gap:.3} rad)")]
    Undersampled { index: usize, gap: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("matrix is not semi-simple ({0})")]
    NotSemisimple(String),

    #[error("eigenvalue {re:.3e}{im:+.3e}i is ambiguous between classification bands")]
    AmbiguousEigenvalue { re: f64, im: f64 },

    #[error("symplectic normalization failed: {0}")]
    Normalization(String),

    #[error("rank-one descriptor T(xi, eta) with xi != eta is not in sp(2n)")]
    DescriptorNotInSp,

    #[error("function is not odd: |f(u) + f(-u)| = {defect:.3e}")]
    NotOdd { defect: f64 },

    #[error("nilpotent Jordan check failed: {0}")]
    JordanCheck(String),

    #[error("power basis is ill-conditioned (Gram condition {condition:.3e})")]
    IllConditionedPowerBasis { condition: f64 },

    #[error("rank deficiency: rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("hypothesis not met: {0}")]
    Hypothesis(String),

    #[error("transversality failure: {0}")]
    Transversality(String),

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
