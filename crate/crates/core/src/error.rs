use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: timestamps decrease ({time} after {previous})")]
    DecreasingTime { line: usize, previous: f64, time: f64 },

    #[error("invalid event: {0}")]
    InvalidEvent(String),

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("invalid episode: {0}")]
    InvalidEpisode(String),

    #[error("episode kinds differ")]
    KindMismatch,

    #[error("parallel episode repeats event type `{0}`")]
    RepeatedEventType(String),

    #[error("serial episode {0} has no inter-event constraints")]
    MissingConstraints(String),

    #[error("candidate intervals overlap: {0} and {1}")]
    OverlappingIntervals(String, String),

    #[error("event sequence has an empty alphabet")]
    EmptyAlphabet,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("oracle instance too large: {events} events, episode of size {size}")]
    InstanceTooLarge { events: usize, size: usize },

    #[error("probability {0} must lie strictly between 0 and 1")]
    InvalidProbability(f64),

    #[error("unknown noise model {0} (expected 1-6)")]
    UnknownNoiseModel(u8),

    #[error("unknown neuron `{0}`")]
    UnknownNeuron(String),

    #[error("composite episodes share event type `{0}`")]
    OverlappingComposites(String),

    #[error("episode set mixes sizes {0} and {1}")]
    MixedSizes(usize, usize),

    #[error("resource budget exceeded: {0}")]
    Budget(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config: {0}")]
    Toml(#[from] toml::de::Error),
}

impl Error {
    /// True for problems with input data (spike files, episode files) as
    /// opposed to configuration or usage problems.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::DecreasingTime { .. }
                | Error::InvalidEvent(_)
                | Error::EmptyAlphabet
                | Error::MixedSizes(..)
                | Error::Json(_)
                | Error::Io(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
