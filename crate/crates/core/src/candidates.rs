//! Level-wise candidate generation for parallel and serial episodes.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::episode::{Episode, EpisodeKind, Interval};

/// Joins k-node parallel episodes that share their first k-1 nodes and keeps
/// a (k+1)-node result only if every k-node subset is in `frequent_k`.
pub fn gen_candidates_parallel(frequent_k: &[Episode]) -> Vec<Episode> {
    let sorted: BTreeSet<&Episode> =
        frequent_k.iter().filter(|e| e.kind() == EpisodeKind::Parallel).collect();
    let known: HashSet<&[String]> = sorted.iter().map(|e| e.nodes()).collect();
    let sorted: Vec<&Episode> = sorted.into_iter().collect();

    let mut out = Vec::new();
    let mut start = 0;
    while start < sorted.len() {
        let k = sorted[start].len();
        let head = &sorted[start].nodes()[..k - 1];
        let mut end = start + 1;
        while end < sorted.len() && sorted[end].len() == k && &sorted[end].nodes()[..k - 1] == head {
            end += 1;
        }
        for i in start..end {
            for j in i + 1..end {
                let mut nodes = sorted[i].nodes().to_vec();
                nodes.push(sorted[j].nodes()[k - 1].clone());
                if all_subsets_known(&nodes, &known) {
                    out.push(Episode::from_raw_parts(EpisodeKind::Parallel, nodes, Vec::new()));
                }
            }
        }
        start = end;
    }
    out
}

fn all_subsets_known(nodes: &[String], known: &HashSet<&[String]>) -> bool {
    // The two generating parents are known; check the remaining k-1 subsets.
    let k = nodes.len();
    let mut sub: Vec<String> = Vec::with_capacity(k - 1);
    (0..k.saturating_sub(2)).all(|skip| {
        sub.clear();
        sub.extend(nodes.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, n)| n.clone()));
        known.contains(sub.as_slice())
    })
}

/// Two-node serial candidates: every ordered pair of distinct frequent event
/// types crossed with every interval.
pub fn seed_serial_pairs(frequent_1: &[Episode], intervals: &[Interval]) -> Vec<Episode> {
    let types: BTreeSet<&String> = frequent_1.iter().map(|e| &e.nodes()[0]).collect();
    let mut out = Vec::with_capacity(types.len() * types.len() * intervals.len());
    for a in &types {
        for b in &types {
            if a == b {
                continue;
            }
            for iv in intervals {
                out.push(Episode::from_raw_parts(
                    EpisodeKind::Serial,
                    vec![(*a).clone(), (*b).clone()],
                    vec![*iv],
                ));
            }
        }
    }
    out
}

/// Joins α and β whenever α without its first node equals β without its
/// last node, constraints included. No further pruning is applied.
pub fn gen_candidates_serial_interval(frequent_k: &[Episode]) -> Vec<Episode> {
    let episodes: BTreeSet<&Episode> = frequent_k
        .iter()
        .filter(|e| e.kind() == EpisodeKind::Serial && e.len() >= 2 && e.gaps().len() + 1 == e.len())
        .collect();
    let mut by_prefix: HashMap<(&[String], &[Interval]), Vec<&Episode>> = HashMap::new();
    for &b in &episodes {
        let k = b.len();
        by_prefix.entry((&b.nodes()[..k - 1], &b.gaps()[..k - 2])).or_default().push(b);
    }
    let mut out = Vec::new();
    for &a in &episodes {
        let key = (&a.nodes()[1..], &a.gaps()[1..]);
        let Some(matches) = by_prefix.get(&key) else { continue };
        for b in matches {
            if b.len() != a.len() {
                continue;
            }
            let mut nodes = a.nodes().to_vec();
            nodes.push(b.nodes()[b.len() - 1].clone());
            let mut gaps = a.gaps().to_vec();
            gaps.push(b.gaps()[b.gaps().len() - 1]);
            out.push(Episode::from_raw_parts(EpisodeKind::Serial, nodes, gaps));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn par(nodes: &[&str]) -> Episode {
        Episode::parallel(nodes.iter().copied()).unwrap()
    }

    fn ser(text: &str) -> Episode {
        text.parse().unwrap()
    }

    #[test]
    fn parallel_join_with_pruning() {
        let got = gen_candidates_parallel(&[par(&["A", "B"]), par(&["A", "C"]), par(&["B", "C"])]);
        assert_eq!(got, vec![par(&["A", "B", "C"])]);
        assert!(gen_candidates_parallel(&[par(&["A", "B"]), par(&["A", "C"])]).is_empty());
    }

    #[test]
    fn parallel_singletons_give_all_pairs() {
        let got = gen_candidates_parallel(&[par(&["C"]), par(&["A"]), par(&["B"])]);
        assert_eq!(got, vec![par(&["A", "B"]), par(&["A", "C"]), par(&["B", "C"])]);
    }

    #[test]
    fn parallel_join_checks_every_subset() {
        let level: Vec<Episode> = [["A", "B", "C"], ["A", "B", "D"], ["A", "C", "D"]]
            .iter()
            .map(|n| par(n))
            .collect();
        assert!(gen_candidates_parallel(&level).is_empty());
        let mut level = level;
        level.push(par(&["B", "C", "D"]));
        assert_eq!(gen_candidates_parallel(&level), vec![par(&["A", "B", "C", "D"])]);
    }

    #[test]
    fn serial_join_matches_on_nodes_and_constraints() {
        let a = ser("A -(0,5]-> B -(5,10]-> C");
        let b = ser("B -(5,10]-> C -(0,5]-> D");
        let got = gen_candidates_serial_interval(&[a, b]);
        assert_eq!(got, vec![ser("A -(0,5]-> B -(5,10]-> C -(0,5]-> D")]);

        let got = gen_candidates_serial_interval(&[ser("A -(0,5]-> B"), ser("B -(5,10]-> C")]);
        assert_eq!(got, vec![ser("A -(0,5]-> B -(5,10]-> C")]);

        assert!(gen_candidates_serial_interval(&[ser("A -(0,5]-> B"), ser("C -(5,10]-> D")]).is_empty());
        assert!(gen_candidates_serial_interval(&[ser("A -(0,5]-> B -(0,5]-> C"), ser("B -(5,10]-> C -(0,5]-> D")])
            .is_empty());
    }

    #[test]
    fn serial_seeding_crosses_pairs_and_intervals() {
        let singles: Vec<Episode> =
            ["A", "B", "C"].iter().map(|s| Episode::serial_unconstrained([*s]).unwrap()).collect();
        let ivs = Interval::parse_list("0-0.002,0.002-0.004").unwrap();
        let got = seed_serial_pairs(&singles, &ivs);
        assert_eq!(got.len(), 3 * 2 * 2);
        let unique: HashSet<&Episode> = got.iter().collect();
        assert_eq!(unique.len(), got.len());
        assert!(got.iter().all(|e| e.nodes()[0] != e.nodes()[1]));
    }
}
