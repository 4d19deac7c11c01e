use thiserror::Error;

/// Every failure mode of the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("negative eigenvalue {min:.3e}")]
    NegativeEigenvalue { min: f64 },
    #[error("negative power of a singular matrix (min eigenvalue {min:.3e})")]
    SingularForNegativePower { min: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("no convergence after {iterations} iterations (last increment {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("element leaves the block structure (off-block mass {residual:.3e})")]
    BlockViolation { residual: f64 },
    #[error("density is too close to singular (min eigenvalue {min:.3e})")]
    SingularRho { min: f64 },
    #[error("operator is not 2-Markov: {witness}")]
    NotTwoMarkov { witness: String },
    #[error("reconstructed operator has norm {norm:.6} > 1")]
    NormViolation { norm: f64 },
    #[error("sequence is not made of self-adjoint contractions: {0}")]
    SequenceNotContractive(String),
    #[error("order interval not preserved: {witness}")]
    IntervalViolation { witness: String },
    #[error("invalid group table: {0}")]
    InvalidGroupTable(String),
    #[error("shape error: {0}")]
    ShapeError(String),
    #[error("axiom `{axiom}` fails with residual {residual:.3e}")]
    AxiomFailure { axiom: String, residual: f64 },
    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("functional is not conditionally positive: {witness}")]
    NotConditionallyPositive { witness: String },
    #[error("functional is not invariant under the unitary antipode (residual {residual:.3e})")]
    NotSymmetric { residual: f64 },
    #[error("series did not converge after {terms} terms")]
    SeriesDivergence { terms: usize },
    #[error("classification failed at step {step} ({predicate}), residual {residual:.3e}")]
    ClassificationFailure {
        step: String,
        predicate: String,
        residual: f64,
    },
    #[error("transport hypothesis fails at t = {t} (residual {residual:.3e})")]
    HypothesisFailed { t: f64, residual: f64 },
    #[error("not a bicharacter (residual {residual:.3e})")]
    NotBicharacter { residual: f64 },
    #[error("subgroup is not abelian")]
    NotAbelian,
    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
