use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix is not Hermitian (‖A − A†‖_F = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (‖U†U − 𝟙‖_F = {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("eigendecomposition did not converge")]
    NoConvergence,

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("Kraus family is not trace preserving (‖ΣA†A − 𝟙‖_F = {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },

    #[error("Kraus family is empty")]
    EmptyKraus,

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("invalid block spec: {0}")]
    InvalidBlockSpec(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("block ({m}, {n}) violates m ≥ n")]
    MultiplicityTooSmall { m: usize, n: usize },

    #[error("not a projection channel (‖J(Φ∘Φ) − J(Φ)‖_F = {deviation:.3e})")]
    NotProjection { deviation: f64 },

    #[error("not a commutant projection: {0}")]
    NotCommutantProjection(String),

    #[error("degenerate random elements after {attempts} attempts")]
    DegenerateRandomElements { attempts: usize },

    #[error("decomposition failed verification: {0}")]
    VerificationFailed(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("group too large: {0}")]
    GroupTooLarge(String),

    #[error("group closure failure: {0}")]
    NotClosed(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dims(rows: usize, cols: usize) -> String {
    format!("{rows}×{cols}")
}
