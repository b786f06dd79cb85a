//! Frequent episode discovery in timestamped event streams, a spiking
//! network simulator to generate such streams, and analyses built on both.

pub mod analysis;
pub mod candidates;
pub mod episode;
pub mod error;
pub mod event;
pub mod mining;
pub mod sim;

pub use episode::{is_subepisode, Episode, EpisodeKind, Interval};
pub use error::{Error, Result};
pub use event::{parse_events, read_events, write_events, Event, EventSequence};
pub use mining::{mine, EpisodeCount, MiningConfig, MiningReport};
