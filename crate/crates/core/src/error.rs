use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("zero #{index} has modulus {modulus} (must be below 1 - {guard})")]
    ZeroTooCloseToBoundary {
        index: usize,
        modulus: f64,
        guard: f64,
    },

    #[error("point {re}+{im}i is not inside the open unit disc")]
    OutsideDisc { re: f64, im: f64 },

    #[error("angle {angle} is within {cutoff} rad of the atom at {atom}")]
    NearAtom { angle: f64, atom: f64, cutoff: f64 },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("angle {0} is not an atom of the measure")]
    NotAnAtom(f64),

    #[error("the candidate divisor does not divide the Blaschke product")]
    NotADivisor,

    #[error("{re}+{im}i is not a zero of the Blaschke product")]
    NotAZero { re: f64, im: f64 },

    #[error("model spaces need a Blaschke product of degree at least 1")]
    DegreeZero,

    #[error("grid size {size} is invalid: {reason}")]
    InvalidGrid { size: usize, reason: String },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("operands live on different model spaces")]
    SpaceMismatch,

    #[error("rank decision is ambiguous: singular value {value:e} lies between {threshold:e} and {upper:e}")]
    AmbiguousRank {
        value: f64,
        threshold: f64,
        upper: f64,
    },

    #[error("real null space has odd dimension {0}; the constraint system is not complex-linear")]
    OddNullity(usize),

    #[error("singular value decomposition did not converge")]
    SvdFailed,

    #[error("null-space basis leaves residual {0:.3e}")]
    InaccurateNullSpace(f64),

    #[error("target space does not match the composed Blaschke product")]
    TargetMismatch,

    #[error("{field}: {message}")]
    Parse { field: String, message: String },
}
