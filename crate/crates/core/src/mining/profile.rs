use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::episode::{check_disjoint, EpisodeKind, Interval};
use crate::error::{Error, Result};
use crate::event::EventSequence;

/// Per-size summary of all episodes (distinct event types) that occur at
/// least once under the given constraints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyProfile {
    /// `max[n-1]`: largest non-overlapped frequency of any n-node episode.
    pub max: Vec<u64>,
    /// `distinct[n-1]`: number of n-node episodes with frequency ≥ 1.
    pub distinct: Vec<usize>,
}

#[derive(Default)]
struct Greedy {
    count: u64,
    last_end: Option<usize>,
}

struct Tally {
    per_size: Vec<HashMap<Vec<u32>, Greedy>>,
    pending: HashMap<Vec<u32>, usize>,
    enumerated: u64,
    budget: u64,
}

impl Tally {
    fn new(max_size: usize, budget: u64) -> Self {
        Tally {
            per_size: (0..max_size).map(|_| HashMap::new()).collect(),
            pending: HashMap::new(),
            enumerated: 0,
            budget,
        }
    }

    fn offer(&mut self, key: &[u32], start: usize) -> Result<()> {
        self.enumerated += 1;
        if self.enumerated > self.budget {
            return Err(Error::Budget(format!("more than {} occurrences enumerated", self.budget)));
        }
        match self.pending.get_mut(key) {
            Some(s) => *s = (*s).max(start),
            None => {
                self.pending.insert(key.to_vec(), start);
            }
        }
        Ok(())
    }

    /// Closes all occurrences ending at `end`; `size_of` recovers the size.
    fn close(&mut self, end: usize, size_of: impl Fn(&[u32]) -> usize) {
        for (key, start) in self.pending.drain() {
            let size = size_of(&key);
            let g = self.per_size[size - 1].entry(key).or_default();
            if g.last_end.is_none_or(|e| start > e) {
                g.count += 1;
                g.last_end = Some(end);
            }
        }
    }

    fn finish(self) -> FrequencyProfile {
        FrequencyProfile {
            max: self.per_size.iter().map(|m| m.values().map(|g| g.count).max().unwrap_or(0)).collect(),
            distinct: self.per_size.iter().map(|m| m.len()).collect(),
        }
    }
}

/// Exact per-size maximum frequency, equivalent to mining with a zero
/// threshold, computed by enumerating every occurrence once.
///
/// Parallel episodes use `expiry`; serial episodes use `intervals`, each
/// gap labelled by the interval containing it. `budget` caps the number
/// of enumerated occurrences.
pub fn frequency_profile(
    seq: &EventSequence,
    kind: EpisodeKind,
    expiry: Option<f64>,
    intervals: &[Interval],
    max_size: usize,
    budget: u64,
) -> Result<FrequencyProfile> {
    if max_size == 0 {
        return Err(Error::InvalidConfig("max_size must be at least 1".into()));
    }
    let types = seq.types();
    let times = seq.times();
    let mut tally = Tally::new(max_size, budget);
    match kind {
        EpisodeKind::Parallel => {
            let tx = expiry.ok_or_else(|| Error::InvalidConfig("parallel profile needs an expiry".into()))?;
            let mut lo = 0;
            let mut key = Vec::with_capacity(max_size);
            for i in 0..seq.len() {
                while times[i] - times[lo] > tx {
                    lo += 1;
                }
                key.clear();
                key.push(types[i]);
                tally.offer(&key, i)?;
                subsets(&mut tally, types, lo, i, &mut key, max_size)?;
                tally.close(i, |k| k.len());
            }
        }
        EpisodeKind::Serial => {
            if intervals.is_empty() {
                return Err(Error::InvalidConfig("serial profile needs at least one interval".into()));
            }
            check_disjoint(intervals)?;
            let reach = intervals.iter().map(|iv| iv.high()).fold(0.0, f64::max);
            let mut chain = Vec::with_capacity(2 * max_size);
            for i in 0..seq.len() {
                chain.clear();
                chain.push(types[i]);
                tally.offer(&chain, i)?;
                backward(&mut tally, seq, intervals, reach, i, &mut chain, max_size)?;
                tally.close(i, |k| k.len() / 2 + 1);
            }
        }
    }
    Ok(tally.finish())
}

/// Extends the type set `key` with earlier events in
/// `lo..upto`, taking indices in decreasing order to avoid repeats.
fn subsets(
    tally: &mut Tally,
    types: &[u32],
    lo: usize,
    upto: usize,
    key: &mut Vec<u32>,
    max_size: usize,
) -> Result<()> {
    if key.len() == max_size {
        return Ok(());
    }
    for j in (lo..upto).rev() {
        if key.contains(&types[j]) {
            continue;
        }
        key.push(types[j]);
        let mut sorted = key.clone();
        sorted.sort_unstable();
        tally.offer(&sorted, j)?;
        subsets(tally, types, lo, j, key, max_size)?;
        key.pop();
    }
    Ok(())
}

/// Grows `chain` (stored reversed as type, label, type, ...) backwards from
/// the event at `head`.
fn backward(
    tally: &mut Tally,
    seq: &EventSequence,
    intervals: &[Interval],
    reach: f64,
    head: usize,
    chain: &mut Vec<u32>,
    max_size: usize,
) -> Result<()> {
    if chain.len() / 2 + 1 == max_size {
        return Ok(());
    }
    let (types, times) = (seq.types(), seq.times());
    let t = times[head];
    for p in (0..head).rev() {
        let gap = t - times[p];
        if gap > reach {
            break;
        }
        let Some(label) = intervals.iter().position(|iv| iv.contains(gap)) else { continue };
        if chain.iter().step_by(2).any(|&ty| ty == types[p]) {
            continue;
        }
        chain.push(label as u32);
        chain.push(types[p]);
        let mut key = chain.clone();
        key.reverse();
        tally.offer(&key, p)?;
        backward(tally, seq, intervals, reach, p, chain, max_size)?;
        chain.truncate(chain.len() - 2);
    }
    Ok(())
}
