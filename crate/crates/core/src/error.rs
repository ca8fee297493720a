use num_complex::Complex64;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed specification: {0}")]
    Malformed(String),

    #[error("invalid specification: {0}")]
    Invalid(String),

    #[error("domain truncation at x = {point:?}: {mass:.3e} of the kernel mass leaves the input support")]
    DomainTruncation { point: Vec<f64>, mass: f64 },

    #[error(
        "oscillation budget exceeded at s = {s:?}: {required} nodes required, budget {budget}, \
         achieved error estimate {error_estimate:.3e}"
    )]
    RefinementFailure {
        s: Vec<f64>,
        required: usize,
        budget: usize,
        error_estimate: f64,
    },

    #[error("unsupported symbol variant: {0}")]
    UnsupportedVariant(String),

    #[error("operation is only defined on L^2 (p = 2), got p = {0}")]
    RequiresL2(f64),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("gamma function pole at z = {0}")]
    GammaPole(Complex64),

    #[error("input carries {mass:.3e} relative mass at the edge of the logarithmic grid")]
    TruncationMass { mass: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("operator is not invertible: inf |F| on the unit circle is {inf:.3e}")]
    NotInvertible { inf: f64 },

    #[error("power series truncated at K = {k}: tail estimate {tail:.3e} exceeds target {target:.3e}")]
    Truncation { k: usize, tail: f64, target: f64 },

    #[error("matrix is not orthogonal: max |C^T C - I| = {0:.3e}")]
    NotOrthogonal(f64),

    #[error("joint diagonalization failed: off-diagonal residual {0:.3e}")]
    JointDiagonalization(f64),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
