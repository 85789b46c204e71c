use thiserror::Error;

/// Every failure the library reports. The CLI maps each variant to one exit code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero polynomial where a nonzero one is required")]
    ZeroPolynomial,
    #[error("shape does not fit in the index bound: {0}")]
    ShapeOutOfBounds(String),
    #[error("tableau entry out of bounds: {0}")]
    EntryOutOfBounds(String),
    #[error("degree {degree} exceeds bound {bound}")]
    DegreeBoundExceeded { degree: u32, bound: u32 },
    #[error("polynomial is not in the requested ideal (min width {min_width}, need {required})")]
    NotInIdeal { min_width: u32, required: u32 },
    #[error("term budget of {0} exceeded")]
    BudgetExceeded(usize),
    #[error("epsilon exponent overflow")]
    ExponentOverflow,
    #[error("program has {vertices} vertices, at most {limit} allowed")]
    TooManyVertices { vertices: usize, limit: usize },
    #[error("replacement oracle does not agree with the original at delta = 0")]
    NotAnApproximation,
    #[error("only characteristic zero is supported")]
    UnsupportedCharacteristic,
    #[error("matrix has odd order {0}")]
    OddOrder(usize),
    #[error("matrix is not skew-symmetric")]
    NotSkew,
    #[error("inconsistent generator schedule: {0}")]
    InconsistentSchedule(String),
    #[error("omega must not be 0, 1 or -1")]
    BadOmega,
    #[error("condenser has {have} matrices, need at least {need}")]
    CondenserTooSmall { have: usize, need: usize },
    #[error("variable mismatch: {0}")]
    VariableMismatch(String),
    #[error("certificate does not verify")]
    CertificateInvalid,
    #[error("axiom system has no recorded witness")]
    NoWitness,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal verification failed: {0}")]
    VerificationFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code class: 2 input validation, 3 contract violation, 4 resource limits.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ShapeOutOfBounds(_)
            | Error::EntryOutOfBounds(_)
            | Error::DegreeBoundExceeded { .. }
            | Error::OddOrder(_)
            | Error::NotSkew
            | Error::InconsistentSchedule(_)
            | Error::BadOmega
            | Error::InvalidInput(_) => 2,
            Error::BudgetExceeded(_) | Error::ExponentOverflow => 4,
            _ => 3,
        }
    }
}
