use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("zero vector where a nonzero {0} is required")]
    ZeroVector(&'static str),

    #[error("{0} is not primitive")]
    NotPrimitive(&'static str),

    #[error("outside framing cone: imaginary coefficient {index} is not positive")]
    OutsideFramingCone { index: usize },

    #[error("framing basis is not unimodular (determinant {0})")]
    NotUnimodular(String),

    #[error("cone is not full-dimensional")]
    NotFullDimensional,

    #[error("not adjacent chambers: interiors overlap")]
    NotAdjacent,

    #[error("overlapping chamber interiors: {0} and {1}")]
    OverlappingChambers(String, String),

    #[error("wall {0} is not a flopping wall")]
    NotFlopping(usize),

    #[error("wall {0} is not on this chart")]
    WallNotOnChart(usize),

    #[error("flopped nef cone undetermined: {0}")]
    FlopUndetermined(String),

    #[error("divisorial wall has no contracted divisor E")]
    MissingDivisor,

    #[error("not a reflection wall: E.Gamma = {0}, expected -2")]
    NotReflectionWall(i64),

    #[error("not expandable in this framing: exponent {0:?} has a negative component")]
    NotExpandable(Vec<i64>),

    #[error("on the wall locus: q^eta = 1 for eta = {0:?}")]
    OnWallLocus(Vec<i64>),

    #[error("pole: {0}")]
    Pole(String),

    #[error("mixed classes; use eval: {0:?} is not an integer multiple of the wall class")]
    MixedClasses(Vec<i64>),

    #[error("empty atlas")]
    EmptyAtlas,

    #[error("atlas: {0}")]
    Atlas(String),

    #[error("ray {0:?} lies outside the target cone")]
    RayOutsideTarget(Vec<i64>),

    #[error("scaling parameter s = 0 is not in C*")]
    ZeroScalar,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("integer overflow in exact arithmetic")]
    Overflow,

    #[error("{field}: {message}")]
    Invalid { field: String, message: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub(crate) fn check_rank(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::RankMismatch { expected, found })
    }
}
