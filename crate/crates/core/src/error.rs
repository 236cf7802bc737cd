use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{kind} index {value} out of range (bound {bound})")]
    IndexOutOfRange {
        kind: &'static str,
        value: usize,
        bound: usize,
    },
    #[error("structure constants not totally antisymmetric at ({a}, {b}, {c})")]
    AntisymmetryViolation { a: usize, b: usize, c: usize },
    #[error("Jacobi identity fails at ({a}, {b}, {c}, {d}), defect {defect}")]
    JacobiViolation {
        a: usize,
        b: usize,
        c: usize,
        d: usize,
        defect: f64,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown symbol kind in jet position: {0}")]
    UnknownSymbolKind(String),
    #[error("unknown equation id {0:?}")]
    UnknownEquationId(String),
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("ansatz has {unknowns} unknowns, cap is {cap}")]
    AnsatzTooLarge { unknowns: usize, cap: usize },
    #[error("bracket degree {degree} exceeds cap {cap}")]
    DegreeOverflow { degree: usize, cap: usize },
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("instanton scale must be positive, got {0}")]
    InvalidScale(f64),
    #[error("field is not a solution: residual {residual:e} at sample {point}")]
    NotASolution { residual: f64, point: usize },
    #[error("invalid flow settings: {0}")]
    InvalidFlow(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
