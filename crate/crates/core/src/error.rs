use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Exact factorization hit a factor that is not `y`, `x + a y` or a
    /// definite quadratic with rational coefficients.
    #[error("unsupported in exact mode: {0}")]
    Unsupported(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("matrix size {0} exceeds the limit {1}")]
    TooLarge(usize, usize),
    #[error("invalid canonical spec: {0}")]
    SpecInvalid(String),
    #[error("invalid metric: {0}")]
    MetricInvalid(String),
    #[error("algebra of full type has no dual")]
    FullType,
    #[error("operation requires {expected}, got {got}")]
    WrongCase { expected: &'static str, got: String },
    #[error("basis is not nice: {0}")]
    NotNice(String),
    #[error("diagonal derivations do not contain a pre-Einstein derivation in this basis")]
    NonDiagonalTorus,
    #[error("no witness exists: condition (A)(ii) holds")]
    ConditionHolds,
    #[error("optimizer did not converge: {0}")]
    NotConverged(String),
    #[error("certificate residual {0:e} above tolerance")]
    NotCertified(f64),
    #[error("bad dimensions: {0}")]
    BadDimensions(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// A structural identity that must hold by theory was violated.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
