use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("index kind mismatch: {0}")]
    KindMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("leading block of the metric series is singular")]
    SingularLeadingBlock,
    #[error("Levi form is degenerate")]
    DegenerateLeviForm,
    #[error("deformation tensor mu_ab is not symmetric: {0}")]
    AsymmetricMu(String),
    #[error("deformation is degenerate: {0}")]
    DegenerateDeformation(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("structure equation has no unique solution: {0}")]
    InconsistentStructureEquation(String),
    #[error("metric is not in normal form: {0}")]
    NormalFormViolation(String),
    #[error("indicial factor vanished: {0}")]
    IndicialSingular(String),
    #[error("Einstein coefficient expected to vanish does not: {0}")]
    FloorAssertFailed(String),
    #[error("Bianchi-determined component does not vanish: {0}")]
    BianchiAssertFailed(String),
    #[error("interpolation degree bound {0} exceeded")]
    DegreeBoundExceeded(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 4,
            Error::IndicialSingular(_)
            | Error::FloorAssertFailed(_)
            | Error::BianchiAssertFailed(_)
            | Error::DegreeBoundExceeded(_) => 3,
            Error::BadParameter(_) => 5,
            _ => 2,
        }
    }
}
