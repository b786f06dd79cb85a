use crate::episode::{Episode, EpisodeKind};
use crate::error::{Error, Result};
use crate::event::EventSequence;

use super::{resolve, EpisodeCount, Occurrence};

#[derive(Clone, Copy)]
struct Slot {
    seen: bool,
    init: f64,
    index: usize,
}

struct Automaton {
    counter: usize,
    freq: u64,
    slots: Vec<Slot>,
    occurrences: Option<Vec<Occurrence>>,
}

fn validate(candidates: &[Episode], expiry: Option<f64>) -> Result<()> {
    if let Some(tx) = expiry {
        if tx.is_nan() || tx <= 0.0 {
            return Err(Error::InvalidConfig(format!("expiry must be positive, got {tx}")));
        }
    }
    for e in candidates {
        if e.kind() != EpisodeKind::Parallel {
            return Err(Error::KindMismatch);
        }
        if e.has_repeated_types() {
            return Err(Error::RepeatedEventType(e.to_string()));
        }
    }
    Ok(())
}

fn run(candidates: &[Episode], seq: &EventSequence, expiry: Option<f64>, track: bool) -> Vec<Automaton> {
    let tx = expiry.unwrap_or(f64::INFINITY);
    let mut automata = Vec::with_capacity(candidates.len());
    let mut waits: Vec<Vec<(u32, u32)>> = vec![Vec::new(); seq.alphabet().len()];
    for (e, ep) in candidates.iter().enumerate() {
        automata.push(Automaton {
            counter: 0,
            freq: 0,
            slots: vec![Slot { seen: false, init: 0.0, index: 0 }; ep.len()],
            occurrences: track.then(Vec::new),
        });
        if let Some(ids) = resolve(ep, seq) {
            for (s, &ty) in ids.iter().enumerate() {
                waits[ty as usize].push((e as u32, s as u32));
            }
        }
    }

    for (i, (&ty, &t)) in seq.types().iter().zip(seq.times()).enumerate() {
        for &(e, s) in &waits[ty as usize] {
            let a = &mut automata[e as usize];
            let slot = &mut a.slots[s as usize];
            if !slot.seen {
                slot.seen = true;
                a.counter += 1;
            }
            slot.init = t;
            slot.index = i;
            if a.counter < a.slots.len() {
                continue;
            }
            for slot in a.slots.iter_mut() {
                if t - slot.init > tx {
                    slot.seen = false;
                    a.counter -= 1;
                }
            }
            if a.counter == a.slots.len() {
                a.freq += 1;
                if let Some(occ) = a.occurrences.as_mut() {
                    occ.push(a.slots.iter().map(|s| s.index).collect());
                }
                for slot in a.slots.iter_mut() {
                    slot.seen = false;
                }
                a.counter = 0;
            }
        }
    }
    automata
}

/// Non-overlapped frequency of each parallel candidate, counting only
/// occurrences whose span is at most `expiry` (`None` means unbounded).
pub fn count_parallel_expiry(
    candidates: &[Episode],
    seq: &EventSequence,
    expiry: Option<f64>,
) -> Result<Vec<EpisodeCount>> {
    validate(candidates, expiry)?;
    Ok(run(candidates, seq, expiry, false)
        .into_iter()
        .zip(candidates)
        .map(|(a, ep)| EpisodeCount { episode: ep.clone(), count: a.freq })
        .collect())
}

/// Like [`count_parallel_expiry`] but also returns the counted occurrences
/// as event indices in node order.
pub fn track_parallel_expiry(
    candidates: &[Episode],
    seq: &EventSequence,
    expiry: Option<f64>,
) -> Result<Vec<Vec<Occurrence>>> {
    validate(candidates, expiry)?;
    Ok(run(candidates, seq, expiry, true).into_iter().map(|a| a.occurrences.unwrap_or_default()).collect())
}
