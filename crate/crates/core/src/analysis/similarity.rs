use std::collections::HashMap;

use crate::episode::{Episode, EpisodeKind};
use crate::error::{Error, Result};

type Multiset = HashMap<Vec<String>, u64>;

fn size_of(set: &[Episode]) -> Result<Option<usize>> {
    let mut size = None;
    for ep in set {
        if ep.kind() != EpisodeKind::Serial {
            return Err(Error::KindMismatch);
        }
        match size {
            None => size = Some(ep.len()),
            Some(n) if n != ep.len() => return Err(Error::MixedSizes(n, ep.len())),
            _ => {}
        }
    }
    Ok(size)
}

fn to_multiset(set: &[Episode]) -> Multiset {
    let mut m = Multiset::new();
    for ep in set {
        *m.entry(ep.nodes().to_vec()).or_default() += 1;
    }
    m
}

/// Removes the common part of `a` and `b` and returns its size.
fn intersect(a: &mut Multiset, b: &mut Multiset) -> u64 {
    let mut matched = 0;
    for (key, na) in a.iter_mut() {
        if let Some(nb) = b.get_mut(key) {
            let m = (*na).min(*nb);
            *na -= m;
            *nb -= m;
            matched += m;
        }
    }
    a.retain(|_, n| *n > 0);
    b.retain(|_, n| *n > 0);
    matched
}

/// Replaces each sequence by its two one-shorter sub-chains.
fn shrink(m: Multiset) -> Multiset {
    let mut out = Multiset::new();
    for (key, n) in m {
        *out.entry(key[1..].to_vec()).or_default() += n;
        *out.entry(key[..key.len() - 1].to_vec()).or_default() += n;
    }
    out
}

/// Similarity of two sets of equal-size serial episodes.
///
/// Common episodes of size `i` score `2^i` each; what is left is reduced
/// to its sub-chains of size `i - 1` and matched again, down to size 1.
/// Inter-event constraints are ignored.
pub fn similarity(a: &[Episode], b: &[Episode]) -> Result<u64> {
    let (sa, sb) = (size_of(a)?, size_of(b)?);
    let n = match (sa, sb) {
        (Some(x), Some(y)) if x != y => return Err(Error::MixedSizes(x, y)),
        (Some(x), _) | (None, Some(x)) => x,
        (None, None) => return Ok(0),
    };
    let (mut ma, mut mb) = (to_multiset(a), to_multiset(b));
    let mut score = 0u64;
    for size in (1..=n).rev() {
        score += intersect(&mut ma, &mut mb) << size;
        if size > 1 {
            ma = shrink(ma);
            mb = shrink(mb);
        }
    }
    Ok(score)
}

/// Pairwise similarity matrix of several episode sets.
pub fn similarity_matrix(sets: &[Vec<Episode>]) -> Result<Vec<Vec<u64>>> {
    let k = sets.len();
    let mut out = vec![vec![0; k]; k];
    for i in 0..k {
        for j in i..k {
            let s = similarity(&sets[i], &sets[j])?;
            out[i][j] = s;
            out[j][i] = s;
        }
    }
    Ok(out)
}
