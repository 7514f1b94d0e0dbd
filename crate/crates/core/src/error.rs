use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("horizon must be at least 1")]
    EmptyHorizon,
    #[error("{field}[{index}] = {value} is not a probability in [0, 1]")]
    InvalidProbability {
        field: &'static str,
        index: usize,
        value: f64,
    },
    #[error("stage {stage}: P(+1) + P(-1) = {sum} exceeds 1")]
    ProbabilitySumExceedsOne { stage: usize, sum: f64 },
    #[error("probability {value} at stage {stage} exceeds 1/2")]
    AboveOneHalf { stage: usize, value: f64 },
    #[error("sequence length {got} does not match horizon {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("kind `{kind}` requires field `{field}`")]
    MissingField {
        kind: &'static str,
        field: &'static str,
    },
    #[error("field `{field}` is not allowed for kind `{kind}`")]
    UnexpectedField {
        kind: &'static str,
        field: &'static str,
    },
    #[error("unknown problem kind `{0}`")]
    UnknownKind(String),
    #[error("spec kind `{expected}` required, got `{got}`")]
    WrongKind {
        expected: &'static str,
        got: &'static str,
    },
    #[error("stage {stage} outside 1..={n}")]
    StageOutOfRange { stage: usize, n: usize },
    #[error("observation {0} is not one of -1, 0, +1")]
    InvalidObservation(i64),
    #[error("trajectory length {got} does not match horizon {expected}")]
    TrajectoryLength { expected: usize, got: usize },
    #[error("horizon {n} exceeds the enumeration limit {max}")]
    HorizonTooLarge { n: usize, max: usize },
    #[error("P(-1) = 0: use the odds rule")]
    DegenerateMinus,
    #[error("P(+1) and P(-1) must both be positive for the closed form")]
    DegenerateClosedForm,
    #[error("x = {0} is outside [0, 1]")]
    CutOutOfRange(f64),
    #[error("p = {0} must lie in (0, 1/2]")]
    InvalidSymmetricProb(f64),
    #[error("need at least {min} observations, got {n}")]
    HorizonTooSmall { n: usize, min: usize },
    #[error("trials must be at least 1")]
    ZeroTrials,
    #[error("w map is not unimodal around index {index} ({context})")]
    UnimodalityViolation { index: usize, context: &'static str },
}
