use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::candidates::{gen_candidates_parallel, gen_candidates_serial_interval, seed_serial_pairs};
use crate::episode::{check_disjoint, Episode, EpisodeKind, Interval};
use crate::error::{Error, Result};
use crate::event::EventSequence;

use super::{parallel, run_chunked, serial, EpisodeCount};

/// Parameters of a level-wise mining run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiningConfig {
    /// Frequency threshold as a fraction of the stream length.
    pub threshold: f64,
    /// Threshold multiplier applied per extra node.
    pub decay: f64,
    pub max_size: usize,
    /// Maximum span of a parallel occurrence, seconds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expiry: Option<f64>,
    /// Candidate gap constraints for serial mining.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub intervals: Vec<Interval>,
    #[serde(default = "one")]
    pub workers: usize,
}

fn one() -> usize {
    1
}

impl Default for MiningConfig {
    fn default() -> Self {
        MiningConfig { threshold: 0.01, decay: 0.9, max_size: 10, expiry: None, intervals: Vec::new(), workers: 1 }
    }
}

impl MiningConfig {
    pub fn validate(&self, kind: EpisodeKind) -> Result<()> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::InvalidConfig(format!("threshold {} outside [0,1]", self.threshold)));
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(Error::InvalidConfig(format!("decay {} outside (0,1]", self.decay)));
        }
        if self.max_size == 0 {
            return Err(Error::InvalidConfig("max_size must be at least 1".into()));
        }
        if let Some(tx) = self.expiry {
            if tx.is_nan() || tx <= 0.0 {
                return Err(Error::InvalidConfig(format!("expiry must be positive, got {tx}")));
            }
        }
        if kind == EpisodeKind::Serial {
            if self.intervals.is_empty() {
                return Err(Error::InvalidConfig("serial mining needs at least one interval".into()));
            }
            check_disjoint(&self.intervals)?;
        }
        Ok(())
    }
}

/// Absolute threshold for episodes of `size` nodes on an `n`-event stream.
/// Never below one, so an episode has to occur to be reported.
pub fn level_threshold(n: usize, threshold: f64, decay: f64, size: usize) -> u64 {
    let raw = n as f64 * threshold * decay.powi(size as i32 - 1);
    ((raw - 1e-9).ceil().max(1.0)) as u64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub size: usize,
    pub threshold: u64,
    pub candidates: usize,
    pub elapsed_seconds: f64,
    /// Frequent episodes, most frequent first.
    pub episodes: Vec<EpisodeCount>,
}

/// Frequent episodes of every size found by [`mine`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiningReport {
    pub kind: EpisodeKind,
    pub config: MiningConfig,
    pub stream_length: usize,
    pub levels: Vec<LevelReport>,
    pub elapsed_seconds: f64,
}

impl MiningReport {
    pub fn level(&self, size: usize) -> Option<&LevelReport> {
        self.levels.iter().find(|l| l.size == size)
    }

    /// Frequent episodes of the given size (empty if none).
    pub fn episodes(&self, size: usize) -> &[EpisodeCount] {
        self.level(size).map(|l| l.episodes.as_slice()).unwrap_or(&[])
    }

    /// Size of the largest frequent episodes, 0 if nothing was frequent.
    pub fn largest_size(&self) -> usize {
        self.levels.iter().filter(|l| !l.episodes.is_empty()).map(|l| l.size).max().unwrap_or(0)
    }

    pub fn count_of(&self, episode: &Episode) -> Option<u64> {
        self.episodes(episode.len()).iter().find(|c| &c.episode == episode).map(|c| c.count)
    }

    /// Frequent multi-node episodes that are not contained in a larger
    /// frequent episode.
    pub fn maximal(&self) -> Vec<&EpisodeCount> {
        let all: Vec<&EpisodeCount> = self.levels.iter().flat_map(|l| &l.episodes).collect();
        all.iter()
            .copied()
            .filter(|c| c.episode.len() > 1)
            .filter(|c| {
                !all.iter().any(|d| {
                    d.episode.len() > c.episode.len()
                        && crate::episode::is_subepisode(&c.episode, &d.episode).unwrap_or(false)
                })
            })
            .collect()
    }
}

fn count(kind: EpisodeKind, candidates: &[Episode], seq: &EventSequence, config: &MiningConfig) -> Result<Vec<EpisodeCount>> {
    let counts = run_chunked(candidates, config.workers, |chunk| match kind {
        EpisodeKind::Parallel => parallel::count_parallel_expiry(chunk, seq, config.expiry)
            .map(|v| v.into_iter().map(Ok).collect())
            .unwrap_or_else(|e| vec![Err(e)]),
        EpisodeKind::Serial => serial::count_serial_intervals(chunk, seq)
            .map(|v| v.into_iter().map(Ok).collect())
            .unwrap_or_else(|e| vec![Err(e)]),
    });
    counts.into_iter().collect()
}

/// Level-wise discovery of frequent episodes of the given kind.
pub fn mine(seq: &EventSequence, kind: EpisodeKind, config: &MiningConfig) -> Result<MiningReport> {
    config.validate(kind)?;
    if seq.alphabet().is_empty() {
        return Err(Error::EmptyAlphabet);
    }
    let start = Instant::now();
    let n = seq.len();
    let mut levels = Vec::new();

    let t0 = Instant::now();
    let threshold = level_threshold(n, config.threshold, config.decay, 1);
    let mut frequent: Vec<EpisodeCount> = seq
        .alphabet()
        .iter()
        .zip(seq.histogram())
        .filter(|&(_, c)| c >= threshold)
        .map(|(sym, c)| {
            let episode = match kind {
                EpisodeKind::Parallel => Episode::parallel([sym.as_str()]),
                EpisodeKind::Serial => Episode::serial_unconstrained([sym.as_str()]),
            }
            .expect("alphabet symbols are valid");
            EpisodeCount { episode, count: c }
        })
        .collect();
    sort_by_count(&mut frequent);
    levels.push(LevelReport {
        size: 1,
        threshold,
        candidates: seq.alphabet().len(),
        elapsed_seconds: t0.elapsed().as_secs_f64(),
        episodes: frequent.clone(),
    });

    for size in 2..=config.max_size {
        let t0 = Instant::now();
        let previous: Vec<Episode> = frequent.iter().map(|c| c.episode.clone()).collect();
        let mut candidates = match (kind, size) {
            (EpisodeKind::Parallel, _) => gen_candidates_parallel(&previous),
            (EpisodeKind::Serial, 2) => seed_serial_pairs(&previous, &config.intervals),
            (EpisodeKind::Serial, _) => gen_candidates_serial_interval(&previous),
        };
        candidates.retain(|c| !c.has_repeated_types());
        if candidates.is_empty() {
            break;
        }
        let threshold = level_threshold(n, config.threshold, config.decay, size);
        frequent = count(kind, &candidates, seq, config)?.into_iter().filter(|c| c.count >= threshold).collect();
        sort_by_count(&mut frequent);
        levels.push(LevelReport {
            size,
            threshold,
            candidates: candidates.len(),
            elapsed_seconds: t0.elapsed().as_secs_f64(),
            episodes: frequent.clone(),
        });
        if frequent.is_empty() {
            break;
        }
    }

    Ok(MiningReport {
        kind,
        config: config.clone(),
        stream_length: n,
        levels,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

fn sort_by_count(v: &mut [EpisodeCount]) {
    v.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.episode.cmp(&b.episode)));
}
