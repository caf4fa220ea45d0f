use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh dimension must be 1, 2 or 3, got {0}")]
    InvalidDimension(usize),
    #[error("cell count along axis {axis} must be >= 1, got {count}")]
    InvalidCellCount { axis: usize, count: usize },
    #[error("length along axis {axis} must be > 0, got {length}")]
    InvalidLength { axis: usize, length: f64 },
    #[error("cochain degree {degree} out of range 0..={max}")]
    InvalidDegree { degree: usize, max: usize },
    #[error("no exterior derivative above top degree {0}")]
    DerivativeAtTopDegree(usize),
    #[error("operation requires degree {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("operation requires one primal and one dual cochain")]
    StaggeringMismatch,
    #[error("cochains live on different meshes")]
    MeshMismatch,
    #[error("cochain value count {got} does not match cell count {expected}")]
    ValueCountMismatch { expected: usize, got: usize },
    #[error("signature (n={n}, p={p}, q={q}) violates p+q=n+1 or degree bounds")]
    InvalidSignature { n: usize, p: usize, q: usize },
    #[error("signature (n={n}, p={p}, q={q}) is not one of the implemented cases")]
    UnsupportedSignature { n: usize, p: usize, q: usize },
    #[error("time step must be > 0, got {0}")]
    InvalidTimeStep(f64),
    #[error("pointwise energy density requires a 1-d mesh, got n={0}")]
    DensityNeedsOneD(usize),
    #[error("preset {preset} requires a {expected}-d mesh, got {got}")]
    PresetDimensionMismatch {
        preset: String,
        expected: usize,
        got: usize,
    },
    #[error("unknown preset {0}")]
    UnknownPreset(String),
    #[error("point is off the Legendre submanifold (max adapted residual {0:e})")]
    OffSubmanifold(f64),
    #[error("Legendre maximizer hit the search box boundary at coordinate {axis}: x = {value}")]
    BoxBoundaryHit { axis: usize, value: f64 },
    #[error("Hessian is not positive definite at the evaluated point")]
    NonConvex,
    #[error("Newton iteration for the Legendre transform did not converge")]
    NoConvergence,
    #[error("geodesics are not orthogonal at the corner point (defect {0:e})")]
    NotOrthogonal(f64),
    #[error("quadratic co-transform requires a unit quadratic energy spec")]
    NotQuadratic,
    #[error("config error: {0}")]
    Config(String),
    #[error("snapshot parse error: {0}")]
    Snapshot(String),
    #[error("unknown verification suite {0}")]
    UnknownSuite(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
