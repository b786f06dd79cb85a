use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::episode::{Episode, EpisodeKind, Interval};
use crate::error::{Error, Result};
use crate::event::{quantize_time, EventSequence, TypeId};
use crate::mining::{mine, track_parallel_expiry, EpisodeCount, MiningConfig, MiningReport};

/// Result of collapsing parallel-episode occurrences into composite events.
#[derive(Debug, Clone)]
pub struct Rewrite {
    pub sequence: EventSequence,
    /// Number of occurrences replaced, per input episode.
    pub replaced: Vec<u64>,
}

/// Replaces every counted occurrence of each parallel episode by one event
/// named after the episode (e.g. `[B C D]`) at the occurrence's mean time.
pub fn rewrite_with_composites(seq: &EventSequence, episodes: &[Episode], expiry: Option<f64>) -> Result<Rewrite> {
    let mut owner: HashMap<&str, usize> = HashMap::new();
    for (k, ep) in episodes.iter().enumerate() {
        if ep.kind() != EpisodeKind::Parallel {
            return Err(Error::KindMismatch);
        }
        for node in ep.nodes() {
            if owner.insert(node, k).is_some() {
                return Err(Error::OverlappingComposites(node.clone()));
            }
        }
    }
    let tracked = track_parallel_expiry(episodes, seq, expiry)?;

    let times = seq.times();
    let mut removed = vec![false; seq.len()];
    // (time, order key, symbol): untouched events keep their order, a
    // composite sorts right after the last event it replaces.
    let mut merged: Vec<(f64, usize, Option<String>)> = Vec::with_capacity(seq.len());
    for (ep, occs) in episodes.iter().zip(&tracked) {
        let symbol = ep.composite_symbol();
        for occ in occs {
            let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
            for &i in occ {
                removed[i] = true;
                lo = lo.min(times[i]);
                hi = hi.max(times[i]);
                sum += times[i];
            }
            let mean = quantize_time(sum / occ.len() as f64).clamp(lo, hi);
            let last = *occ.iter().max().expect("occurrences are non-empty");
            merged.push((mean, 2 * last + 1, Some(symbol.clone())));
        }
    }
    for i in 0..seq.len() {
        if !removed[i] {
            merged.push((times[i], 2 * i, None));
        }
    }
    merged.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut alphabet: BTreeSet<String> = BTreeSet::new();
    for (_, key, sym) in &merged {
        match sym {
            Some(s) => alphabet.insert(s.clone()),
            None => alphabet.insert(seq.get(key / 2).event_type.to_string()),
        };
    }
    // Types that never occurred in the input stay in the alphabet.
    for (ty, &c) in seq.histogram().iter().enumerate() {
        if c == 0 {
            alphabet.insert(seq.symbol(ty as TypeId).to_string());
        }
    }
    let alphabet: Vec<String> = alphabet.into_iter().collect();
    let lookup: HashMap<&str, TypeId> = alphabet.iter().enumerate().map(|(i, s)| (s.as_str(), i as TypeId)).collect();
    let types = merged
        .iter()
        .map(|(_, key, sym)| match sym {
            Some(s) => lookup[s.as_str()],
            None => lookup[seq.get(key / 2).event_type],
        })
        .collect();
    let times = merged.iter().map(|m| m.0).collect();
    Ok(Rewrite {
        sequence: EventSequence::from_parts(alphabet, types, times),
        replaced: tracked.iter().map(|o| o.len() as u64).collect(),
    })
}

/// Settings of the parallel, rewrite, serial pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynfireConfig {
    pub expiry: f64,
    pub intervals: Vec<Interval>,
    pub threshold: f64,
    pub decay: f64,
    pub max_size: usize,
    #[serde(default = "one")]
    pub workers: usize,
}

fn one() -> usize {
    1
}

impl SynfireConfig {
    pub fn new(expiry: f64, intervals: Vec<Interval>) -> Self {
        SynfireConfig { expiry, intervals, threshold: 0.01, decay: 0.9, max_size: 10, workers: 1 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynfireReport {
    pub parallel: MiningReport,
    /// Maximal frequent parallel episodes that were collapsed.
    pub composites: Vec<EpisodeCount>,
    /// Maximal episodes left out because they share types with a larger or
    /// more frequent one.
    pub skipped: Vec<EpisodeCount>,
    pub rewritten_length: usize,
    pub serial: MiningReport,
}

/// Mines parallel episodes, collapses the maximal ones into composite
/// events and mines serial episodes over the rewritten stream.
pub fn discover_synfire(seq: &EventSequence, config: &SynfireConfig) -> Result<(SynfireReport, EventSequence)> {
    let pcfg = MiningConfig {
        threshold: config.threshold,
        decay: config.decay,
        max_size: config.max_size,
        expiry: Some(config.expiry),
        intervals: Vec::new(),
        workers: config.workers,
    };
    let parallel = mine(seq, EpisodeKind::Parallel, &pcfg)?;
    let mut maximal: Vec<EpisodeCount> = parallel.maximal().into_iter().cloned().collect();
    maximal.sort_by(|a, b| {
        b.episode.len().cmp(&a.episode.len()).then(b.count.cmp(&a.count)).then(a.episode.cmp(&b.episode))
    });
    let mut taken: BTreeSet<String> = BTreeSet::new();
    let (mut composites, mut skipped) = (Vec::new(), Vec::new());
    for c in maximal {
        if c.episode.nodes().iter().any(|n| taken.contains(n)) {
            skipped.push(c);
        } else {
            taken.extend(c.episode.nodes().iter().cloned());
            composites.push(c);
        }
    }
    let episodes: Vec<Episode> = composites.iter().map(|c| c.episode.clone()).collect();
    let rewritten = rewrite_with_composites(seq, &episodes, Some(config.expiry))?.sequence;
    let scfg = MiningConfig { expiry: None, intervals: config.intervals.clone(), ..pcfg };
    let serial = mine(&rewritten, EpisodeKind::Serial, &scfg)?;
    let report = SynfireReport { parallel, composites, skipped, rewritten_length: rewritten.len(), serial };
    Ok((report, rewritten))
}
