use crate::episode::{Episode, EpisodeKind};
use crate::error::{Error, Result};
use crate::event::EventSequence;

pub const ORACLE_MAX_EVENTS: usize = 200;
pub const ORACLE_MAX_SIZE: usize = 5;

/// Brute-force frequency: enumerates every constraint-satisfying occurrence
/// and picks a maximum set of pairwise disjoint index spans greedily by end.
///
/// Serial episodes without gaps are only order-constrained. `expiry` applies
/// to parallel episodes and is ignored for serial ones.
pub fn oracle_count(episode: &Episode, seq: &EventSequence, expiry: Option<f64>) -> Result<u64> {
    if seq.len() > ORACLE_MAX_EVENTS || episode.len() > ORACLE_MAX_SIZE {
        return Err(Error::InstanceTooLarge { events: seq.len(), size: episode.len() });
    }
    // best_start[end] = latest start index among occurrences ending at `end`.
    let mut best_start: Vec<Option<usize>> = vec![None; seq.len()];
    let mut record = |idx: &[usize]| {
        let (lo, hi) = (*idx.iter().min().unwrap(), *idx.iter().max().unwrap());
        let slot = &mut best_start[hi];
        if slot.is_none_or(|s| s < lo) {
            *slot = Some(lo);
        }
    };
    let positions: Vec<Vec<usize>> = episode
        .nodes()
        .iter()
        .map(|n| {
            let ty = seq.type_id(n);
            (0..seq.len()).filter(|&i| Some(seq.types()[i]) == ty).collect()
        })
        .collect();
    let times = seq.times();
    let mut chosen = Vec::with_capacity(episode.len());

    match episode.kind() {
        EpisodeKind::Serial => {
            fn walk(
                j: usize,
                ep: &Episode,
                positions: &[Vec<usize>],
                times: &[f64],
                chosen: &mut Vec<usize>,
                record: &mut dyn FnMut(&[usize]),
            ) {
                if j == positions.len() {
                    record(chosen);
                    return;
                }
                for &i in &positions[j] {
                    if let Some(&p) = chosen.last() {
                        if i <= p {
                            continue;
                        }
                        if let Some(g) = ep.gaps().get(j - 1) {
                            if !g.contains(times[i] - times[p]) {
                                continue;
                            }
                        }
                    }
                    chosen.push(i);
                    walk(j + 1, ep, positions, times, chosen, record);
                    chosen.pop();
                }
            }
            walk(0, episode, &positions, times, &mut chosen, &mut record);
        }
        EpisodeKind::Parallel => {
            let tx = expiry.unwrap_or(f64::INFINITY);
            fn walk(
                j: usize,
                positions: &[Vec<usize>],
                times: &[f64],
                tx: f64,
                chosen: &mut Vec<usize>,
                record: &mut dyn FnMut(&[usize]),
            ) {
                if j == positions.len() {
                    let first = times[*chosen.iter().min().unwrap()];
                    let last = times[*chosen.iter().max().unwrap()];
                    if last - first <= tx {
                        record(chosen);
                    }
                    return;
                }
                for &i in &positions[j] {
                    if chosen.contains(&i) {
                        continue;
                    }
                    chosen.push(i);
                    walk(j + 1, positions, times, tx, chosen, record);
                    chosen.pop();
                }
            }
            walk(0, &positions, times, tx, &mut chosen, &mut record);
        }
    }

    let mut count = 0;
    let mut last_end: Option<usize> = None;
    for (end, start) in best_start.iter().enumerate() {
        if let Some(s) = *start {
            if last_end.is_none_or(|e| s > e) {
                count += 1;
                last_end = Some(end);
            }
        }
    }
    Ok(count)
}
