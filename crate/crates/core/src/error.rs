use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("unknown config key `{0}`")]
    UnknownConfigKey(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("feed coincides with element {0}")]
    SingularGeometry(usize),
    #[error("target amplitude {0} exceeds the reachable maximum 2/pi")]
    UnreachableAmplitude(f64),
    #[error("need a power of two >= {required} samples, got {got}")]
    InsufficientSamples { required: usize, got: usize },
    #[error("symbol modulus {0} exceeds 1")]
    AmplitudeViolation(f64),
    #[error("pilot pattern matrix is singular")]
    SingularPattern,
    #[error("near-field entry {0} is zero; cascaded channel is not separable")]
    NonSeparable(usize),
    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
