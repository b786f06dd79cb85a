//! Non-overlapped occurrence counting and the level-wise mining driver.

mod driver;
mod oracle;
mod parallel;
mod profile;
mod serial;

pub use driver::{mine, level_threshold, LevelReport, MiningConfig, MiningReport};
pub use oracle::{oracle_count, ORACLE_MAX_EVENTS, ORACLE_MAX_SIZE};
pub use parallel::{count_parallel_expiry, track_parallel_expiry};
pub use profile::{frequency_profile, FrequencyProfile};
pub use serial::{count_serial_intervals, track_serial_intervals};

use serde::{Deserialize, Serialize};

use crate::episode::Episode;
use crate::event::{EventSequence, TypeId};

/// An episode together with its non-overlapped frequency.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeCount {
    pub episode: Episode,
    pub count: u64,
}

/// Event indices of one counted occurrence, listed in episode node order.
pub type Occurrence = Vec<usize>;

/// Maps episode nodes to the stream's type ids; `None` if some node never
/// occurs in the alphabet (such an episode cannot occur).
pub(crate) fn resolve(episode: &Episode, seq: &EventSequence) -> Option<Vec<TypeId>> {
    episode.nodes().iter().map(|n| seq.type_id(n)).collect()
}

/// Split `items` into at most `workers` contiguous chunks, run `f` on each
/// and concatenate the results in input order.
pub(crate) fn run_chunked<T, R, F>(items: &[T], workers: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&[T]) -> Vec<R> + Sync,
{
    if workers <= 1 || items.len() < 2 {
        return f(items);
    }
    use rayon::prelude::*;
    let chunk = items.len().div_ceil(workers);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool,
        Err(_) => return f(items),
    };
    pool.install(|| {
        items
            .par_chunks(chunk)
            .map(&f)
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    })
}
