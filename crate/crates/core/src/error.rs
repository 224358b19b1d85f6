use thiserror::Error;

/// Errors raised by the geometry, basis, operator and flow routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("quaternion is not unit: |q|^2 = {norm_sq}")]
    NotUnit { norm_sq: f64 },

    #[error("vector is not tangent at base point: <v, x> = {inner}")]
    NotTangent { inner: f64 },

    #[error("basis degree {requested} exceeds supported cap {cap}")]
    DegreeTooLarge { requested: usize, cap: usize },

    #[error("quadrature grid exact to degree {available}, need {required}")]
    InsufficientExactness { required: usize, available: usize },

    #[error("invalid grid levels ({t}, {xi1}, {xi2})")]
    InvalidGrid { t: usize, xi1: usize, xi2: usize },

    #[error("matrix is not Hermitian: ||M - M^H|| = {deviation}")]
    NotHermitian { deviation: f64 },

    #[error("eigenvalue {value} in degree block {degree} matches no closed-form value (nearest distance {distance})")]
    UnmatchedEigenvalue { degree: usize, value: f64, distance: f64 },

    #[error("field is not unit: max |1 - |F|^2| = {deviation}")]
    FieldNotUnit { deviation: f64 },

    #[error("field degree {field} does not match space degree {space}")]
    DegreeMismatch { field: usize, space: usize },

    #[error("{what} disagree: {lhs} vs {rhs}")]
    Disagreement { what: &'static str, lhs: f64, rhs: f64 },

    #[error("degenerate parameter: {0}")]
    Degenerate(&'static str),

    #[error("line search collapsed at iteration {iteration} (step {step})")]
    StepCollapse { iteration: usize, step: f64 },

    #[error("cache mismatch: {0}")]
    CacheMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
