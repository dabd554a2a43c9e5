use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("field error: {0}")]
    Field(String),
    #[error("mixed fields: {0}")]
    MixedFields(String),
    #[error("invalid sample space: {0}")]
    SampleSpace(String),
    #[error("event index {index} out of range for a space of {size} points")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("sample spaces do not match ({0} vs {1} points)")]
    MismatchedSpaces(usize, usize),
    #[error("invalid partition: {0}")]
    Partition(String),
    #[error("invalid distribution {name:?}: {reason}")]
    Distribution { name: String, reason: String },
    #[error("observation space is inconsistent ({0} violations)")]
    Inconsistent(usize),
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("null space has dimension {dim}, above the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("system has no solution: {0}")]
    Unsolvable(String),
    #[error("permutation is not an automorphism of the system: {0}")]
    NotAutomorphism(String),
    #[error("invalid parameterization: {0}")]
    Parameterization(String),
    #[error("space is not a product space: {0}")]
    NotProduct(String),
    #[error("quantum model error: {0}")]
    Quantum(String),
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("invalid frame: {0}")]
    Frame(String),
    #[error("degenerate direction: a and b are both zero")]
    DegenerateDirection,
    #[error("grid too coarse: {0}")]
    Nyquist(String),
    #[error("wave function error: {0}")]
    WaveFunction(String),
    #[error("i/o error: {0}")]
    Io(String),
}
