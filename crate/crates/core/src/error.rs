use thiserror::Error;

/// Errors raised by codecs, signal construction and the benchmark harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodecError {
    #[error("missing required parameter `{0}`")]
    MissingParameter(&'static str),
    #[error("parameter `{0}` is not used by this scheme")]
    UnexpectedParameter(&'static str),
    #[error("parameter `{name}` out of range: {reason}")]
    OutOfRange { name: &'static str, reason: String },
    #[error("signal too short: need at least {needed} samples, got {got}")]
    SignalTooShort { needed: usize, got: usize },
    #[error("threshold must be > 0, got {0}")]
    NonPositiveThreshold(f64),
    #[error("filter length {filter} must be shorter than the signal ({signal} samples)")]
    FilterTooLong { filter: usize, signal: usize },
    #[error("distribution must contain at least one finite value")]
    EmptyDistribution,
    #[error("malformed population spikes at timestep {timestep}: {reason}")]
    MalformedSpikes { timestep: usize, reason: String },
    #[error("signal is constant; receptive fields need max > min")]
    ConstantSignal,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid signal spec: {0}")]
    InvalidSpec(String),
    #[error("invalid signal: {0}")]
    InvalidSignal(String),
    #[error("codec expects a single-channel signal, got {0} channels")]
    MultiChannel(usize),
    #[error("tuning grid is empty")]
    EmptyGrid,
    #[error("{scheme} at duration {duration}s, sample {sample}: {source}")]
    Bench {
        scheme: String,
        duration: f64,
        sample: usize,
        #[source]
        source: Box<CodecError>,
    },
}

pub type Result<T> = std::result::Result<T, CodecError>;
