use std::collections::VecDeque;
use std::rc::Rc;

use crate::episode::{Episode, EpisodeKind};
use crate::error::{Error, Result};
use crate::event::EventSequence;

use super::{resolve, EpisodeCount, Occurrence};

struct Link {
    index: usize,
    prev: Option<Rc<Link>>,
}

struct Entry {
    time: f64,
    link: Option<Rc<Link>>,
}

struct Chain {
    freq: u64,
    bounds: Vec<(f64, f64)>,
    tlists: Vec<VecDeque<Entry>>,
    completed_at: usize,
    occurrences: Option<Vec<Occurrence>>,
}

impl Chain {
    fn reset(&mut self) {
        for tl in &mut self.tlists {
            tl.clear();
        }
    }
}

fn validate(candidates: &[Episode]) -> Result<()> {
    for e in candidates {
        if e.kind() != EpisodeKind::Serial {
            return Err(Error::KindMismatch);
        }
        if e.len() > 1 && e.gaps().is_empty() {
            return Err(Error::MissingConstraints(e.to_string()));
        }
    }
    Ok(())
}

fn unwind(link: &Option<Rc<Link>>, last: usize) -> Occurrence {
    let mut out = vec![last];
    let mut cur = link.as_ref();
    while let Some(l) = cur {
        out.push(l.index);
        cur = l.prev.as_ref();
    }
    out.reverse();
    out
}

pub(crate) fn run(candidates: &[Episode], seq: &EventSequence, track: bool) -> Vec<(u64, Option<Vec<Occurrence>>)> {
    let mut chains = Vec::with_capacity(candidates.len());
    let mut waits: Vec<Vec<(u32, u32)>> = vec![Vec::new(); seq.alphabet().len()];
    for (e, ep) in candidates.iter().enumerate() {
        let bounds = if ep.gaps().is_empty() {
            vec![(f64::NEG_INFINITY, f64::INFINITY); ep.len().saturating_sub(1)]
        } else {
            ep.gaps().iter().map(|g| (g.low(), g.high())).collect()
        };
        chains.push(Chain {
            freq: 0,
            bounds,
            tlists: (0..ep.len()).map(|_| VecDeque::new()).collect(),
            completed_at: usize::MAX,
            occurrences: track.then(Vec::new),
        });
        if let Some(ids) = resolve(ep, seq) {
            // Later nodes first so one event never feeds itself forward.
            for (j, &ty) in ids.iter().enumerate().rev() {
                waits[ty as usize].push((e as u32, j as u32));
            }
        }
    }

    for (i, (&ty, &t)) in seq.types().iter().zip(seq.times()).enumerate() {
        for &(e, j) in &waits[ty as usize] {
            let c = &mut chains[e as usize];
            if c.completed_at == i {
                continue;
            }
            let j = j as usize;
            let n = c.tlists.len();
            let link = if j == 0 {
                None
            } else {
                let (lo, hi) = c.bounds[j - 1];
                let prev = &mut c.tlists[j - 1];
                while prev.front().is_some_and(|p| t - p.time > hi) {
                    prev.pop_front();
                }
                match prev.front() {
                    Some(p) if t - p.time > lo => {}
                    _ => continue,
                }
                if track {
                    // Latest admissible predecessor keeps the occurrence innermost.
                    let k = prev.partition_point(|p| t - p.time > lo);
                    prev[k - 1].link.clone()
                } else {
                    None
                }
            };
            if j + 1 == n {
                c.freq += 1;
                if let Some(occ) = c.occurrences.as_mut() {
                    occ.push(unwind(&link, i));
                }
                c.reset();
                c.completed_at = i;
                continue;
            }
            let tl = &mut c.tlists[j];
            if tl.back().is_some_and(|b| b.time == t) {
                continue;
            }
            let link = track.then(|| Rc::new(Link { index: i, prev: link }));
            tl.push_back(Entry { time: t, link });
        }
    }
    chains.into_iter().map(|c| (c.freq, c.occurrences)).collect()
}

/// Non-overlapped frequency of each serial candidate where every
/// consecutive gap of an occurrence satisfies its interval.
pub fn count_serial_intervals(candidates: &[Episode], seq: &EventSequence) -> Result<Vec<EpisodeCount>> {
    validate(candidates)?;
    Ok(run(candidates, seq, false)
        .into_iter()
        .zip(candidates)
        .map(|((freq, _), ep)| EpisodeCount { episode: ep.clone(), count: freq })
        .collect())
}

/// Like [`count_serial_intervals`] but also returns the counted occurrences
/// as event indices in node order.
pub fn track_serial_intervals(candidates: &[Episode], seq: &EventSequence) -> Result<Vec<Vec<Occurrence>>> {
    validate(candidates)?;
    Ok(run(candidates, seq, true).into_iter().map(|(_, o)| o.unwrap_or_default()).collect())
}
