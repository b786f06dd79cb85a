//! Serial and parallel episodes with their temporal constraints.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Inter-event constraint `(low, high]`: a gap `d` satisfies it iff
/// `low < d <= high`. `high` may be infinite.
#[derive(Debug, Clone, Copy)]
pub struct Interval {
    low: f64,
    high: f64,
}

impl Interval {
    pub fn new(low: f64, high: f64) -> Result<Self> {
        if !(low.is_finite() && low >= 0.0 && high > low) || high.is_nan() {
            return Err(Error::InvalidInterval(format!("({low},{high}]")));
        }
        Ok(Interval { low, high })
    }

    /// `(0, inf]`: any strictly positive gap.
    pub fn unbounded() -> Self {
        Interval { low: 0.0, high: f64::INFINITY }
    }

    pub fn low(&self) -> f64 {
        self.low
    }

    pub fn high(&self) -> f64 {
        self.high
    }

    #[inline]
    pub fn contains(&self, gap: f64) -> bool {
        gap > self.low && gap <= self.high
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.low < other.high && other.low < self.high
    }

    /// Parses a comma-separated list such as `0-0.002,0.002-0.004`.
    pub fn parse_list(text: &str) -> Result<Vec<Interval>> {
        text.split(',').filter(|s| !s.trim().is_empty()).map(|s| s.trim().parse()).collect()
    }
}

/// Rejects interval sets whose members overlap.
pub fn check_disjoint(intervals: &[Interval]) -> Result<()> {
    for (i, a) in intervals.iter().enumerate() {
        for b in &intervals[i + 1..] {
            if a.overlaps(b) {
                return Err(Error::OverlappingIntervals(a.to_string(), b.to_string()));
            }
        }
    }
    Ok(())
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.low.to_bits() == other.low.to_bits() && self.high.to_bits() == other.high.to_bits()
    }
}

impl Eq for Interval {}

impl Hash for Interval {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.low.to_bits().hash(state);
        self.high.to_bits().hash(state);
    }
}

impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Interval {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.low.total_cmp(&other.low).then(self.high.total_cmp(&other.high))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.high.is_infinite() {
            write!(f, "({},inf]", self.low)
        } else {
            write!(f, "({},{}]", self.low, self.high)
        }
    }
}

fn parse_bound(s: &str) -> Result<f64> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("inf") {
        return Ok(f64::INFINITY);
    }
    s.parse().map_err(|_| Error::InvalidInterval(format!("bad bound `{s}`")))
}

impl FromStr for Interval {
    type Err = Error;

    /// Accepts `(low,high]` or the table form `low-high`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(']')) {
            let (lo, hi) = inner
                .split_once(',')
                .ok_or_else(|| Error::InvalidInterval(s.to_string()))?;
            return Interval::new(parse_bound(lo)?, parse_bound(hi)?);
        }
        let (lo, hi) = s.split_once('-').ok_or_else(|| Error::InvalidInterval(s.to_string()))?;
        Interval::new(parse_bound(lo)?, parse_bound(hi)?)
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EpisodeKind {
    Serial,
    Parallel,
}

impl fmt::Display for EpisodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EpisodeKind::Serial => "serial",
            EpisodeKind::Parallel => "parallel",
        })
    }
}

impl FromStr for EpisodeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "serial" => Ok(EpisodeKind::Serial),
            "parallel" => Ok(EpisodeKind::Parallel),
            other => Err(Error::InvalidConfig(format!("unknown episode kind `{other}`"))),
        }
    }
}

/// A serial or parallel episode.
///
/// Parallel episodes keep their event types sorted and distinct. Serial
/// episodes either carry exactly one constraint per consecutive pair of
/// nodes or none at all (plain order).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawEpisode", into = "RawEpisode")]
pub struct Episode {
    kind: EpisodeKind,
    nodes: Vec<String>,
    gaps: Vec<Interval>,
}

#[derive(Serialize, Deserialize)]
struct RawEpisode {
    kind: EpisodeKind,
    nodes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    gaps: Vec<Interval>,
}

impl TryFrom<RawEpisode> for Episode {
    type Error = Error;
    fn try_from(raw: RawEpisode) -> Result<Self> {
        match raw.kind {
            EpisodeKind::Parallel if raw.gaps.is_empty() => Episode::parallel(raw.nodes),
            EpisodeKind::Parallel => Err(Error::InvalidEpisode("parallel episodes carry no gaps".into())),
            EpisodeKind::Serial if raw.gaps.is_empty() => Episode::serial_unconstrained(raw.nodes),
            EpisodeKind::Serial => Episode::serial(raw.nodes, raw.gaps),
        }
    }
}

impl From<Episode> for RawEpisode {
    fn from(e: Episode) -> Self {
        RawEpisode { kind: e.kind, nodes: e.nodes, gaps: e.gaps }
    }
}

fn check_nodes(nodes: &[String]) -> Result<()> {
    if nodes.is_empty() {
        return Err(Error::InvalidEpisode("episode has no nodes".into()));
    }
    if let Some(bad) = nodes.iter().find(|n| n.is_empty() || n.contains(',')) {
        return Err(Error::InvalidEpisode(format!("bad event type `{bad}`")));
    }
    Ok(())
}

impl Episode {
    /// Parallel episode over distinct event types, stored sorted.
    pub fn parallel<S: Into<String>>(nodes: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut nodes: Vec<String> = nodes.into_iter().map(Into::into).collect();
        check_nodes(&nodes)?;
        nodes.sort();
        if let Some(w) = nodes.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::RepeatedEventType(w[0].clone()));
        }
        Ok(Episode { kind: EpisodeKind::Parallel, nodes, gaps: Vec::new() })
    }

    /// Serial episode with one constraint per consecutive pair.
    pub fn serial<S: Into<String>>(
        nodes: impl IntoIterator<Item = S>,
        gaps: impl IntoIterator<Item = Interval>,
    ) -> Result<Self> {
        let nodes: Vec<String> = nodes.into_iter().map(Into::into).collect();
        let gaps: Vec<Interval> = gaps.into_iter().collect();
        check_nodes(&nodes)?;
        if gaps.len() + 1 != nodes.len() {
            return Err(Error::InvalidEpisode(format!(
                "{} nodes need {} gaps, got {}",
                nodes.len(),
                nodes.len() - 1,
                gaps.len()
            )));
        }
        Ok(Episode { kind: EpisodeKind::Serial, nodes, gaps })
    }

    /// Serial episode that only prescribes order.
    pub fn serial_unconstrained<S: Into<String>>(nodes: impl IntoIterator<Item = S>) -> Result<Self> {
        let nodes: Vec<String> = nodes.into_iter().map(Into::into).collect();
        check_nodes(&nodes)?;
        Ok(Episode { kind: EpisodeKind::Serial, nodes, gaps: Vec::new() })
    }

    pub fn kind(&self) -> EpisodeKind {
        self.kind
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn gaps(&self) -> &[Interval] {
        &self.gaps
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// True when a serial episode of two or more nodes lacks constraints.
    pub fn is_unconstrained(&self) -> bool {
        self.kind == EpisodeKind::Serial && self.nodes.len() > 1 && self.gaps.is_empty()
    }

    pub fn has_repeated_types(&self) -> bool {
        let mut seen: Vec<&String> = self.nodes.iter().collect();
        seen.sort();
        seen.windows(2).any(|w| w[0] == w[1])
    }

    /// The same nodes with every gap replaced by `(0, inf]`.
    pub fn with_unbounded_gaps(&self) -> Episode {
        let mut e = self.clone();
        if e.kind == EpisodeKind::Serial {
            e.gaps = vec![Interval::unbounded(); e.nodes.len() - 1];
        }
        e
    }

    /// Serial prefix of `k` nodes with the matching constraints.
    pub fn prefix(&self, k: usize) -> Episode {
        assert!(k >= 1 && k <= self.len());
        let gaps = if self.gaps.is_empty() { Vec::new() } else { self.gaps[..k - 1].to_vec() };
        Episode { kind: self.kind, nodes: self.nodes[..k].to_vec(), gaps }
    }

    /// Serial suffix of `k` nodes with the matching constraints.
    pub fn suffix(&self, k: usize) -> Episode {
        assert!(k >= 1 && k <= self.len());
        let n = self.len();
        let gaps = if self.gaps.is_empty() { Vec::new() } else { self.gaps[n - k..].to_vec() };
        Episode { kind: self.kind, nodes: self.nodes[n - k..].to_vec(), gaps }
    }

    /// Event types joined by spaces, the way result tables list patterns.
    pub fn label(&self) -> String {
        self.nodes.join(" ")
    }

    /// Symbol used for a parallel episode once it is collapsed into a single
    /// composite event, e.g. `[B C D]`.
    pub fn composite_symbol(&self) -> String {
        format!("[{}]", self.nodes.join(" "))
    }

    pub(crate) fn from_raw_parts(kind: EpisodeKind, nodes: Vec<String>, gaps: Vec<Interval>) -> Self {
        Episode { kind, nodes, gaps }
    }
}

/// Whether `beta` is a subepisode of `alpha`.
///
/// Serial: `beta`'s types embed into `alpha` in order (not necessarily
/// contiguously). Parallel: `beta`'s types are a subset of `alpha`'s.
/// Interval constraints play no part.
pub fn is_subepisode(beta: &Episode, alpha: &Episode) -> Result<bool> {
    if beta.kind != alpha.kind {
        return Err(Error::KindMismatch);
    }
    Ok(match alpha.kind {
        EpisodeKind::Serial => {
            let mut rest = alpha.nodes.iter();
            beta.nodes.iter().all(|b| rest.any(|a| a == b))
        }
        EpisodeKind::Parallel => beta.nodes.iter().all(|b| alpha.nodes.binary_search(b).is_ok()),
    })
}

impl fmt::Display for Episode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            EpisodeKind::Parallel => write!(f, "({})", self.nodes.join(" ")),
            EpisodeKind::Serial => {
                f.write_str(&self.nodes[0])?;
                for (i, node) in self.nodes[1..].iter().enumerate() {
                    match self.gaps.get(i) {
                        Some(gap) => write!(f, " -{gap}-> {node}")?,
                        None => write!(f, " -> {node}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

impl FromStr for Episode {
    type Err = Error;

    /// Parses `(A B C)`, `A -> B -> C` or `A -(0.004,0.006]-> [B C] -> ...`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |why: &str| Error::InvalidEpisode(format!("{why} in `{s}`"));
        if let Some(inner) = s.strip_prefix('(') {
            let inner = inner.strip_suffix(')').ok_or_else(|| bad("unclosed parenthesis"))?;
            return Episode::parallel(inner.split_whitespace());
        }
        let mut nodes = Vec::new();
        let mut gaps = Vec::new();
        let mut rest = s;
        loop {
            rest = rest.trim_start();
            let end = if rest.starts_with('[') {
                rest.find(']').map(|i| i + 1).ok_or_else(|| bad("unclosed bracket"))?
            } else {
                rest.find(char::is_whitespace).unwrap_or(rest.len())
            };
            if end == 0 {
                return Err(bad("missing node"));
            }
            nodes.push(rest[..end].to_string());
            rest = rest[end..].trim_start();
            if rest.is_empty() {
                break;
            }
            if let Some(r) = rest.strip_prefix("->") {
                rest = r;
            } else if let Some(r) = rest.strip_prefix("-(") {
                let close = r.find("]->").ok_or_else(|| bad("unterminated constraint"))?;
                gaps.push(format!("({}]", &r[..close]).parse()?);
                rest = &r[close + 3..];
            } else {
                return Err(bad("expected `->`"));
            }
        }
        if gaps.is_empty() {
            Episode::serial_unconstrained(nodes)
        } else {
            Episode::serial(nodes, gaps)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn interval_is_half_open_on_the_left() {
        let i = iv(0.004, 0.006);
        assert!(!i.contains(0.004));
        assert!(i.contains(0.005));
        assert!(i.contains(0.006));
        assert!(!i.contains(0.0061));
        assert!(!Interval::unbounded().contains(0.0));
        assert!(Interval::unbounded().contains(1e9));
    }

    #[test]
    fn interval_validation() {
        assert!(Interval::new(0.5, 0.5).is_err());
        assert!(Interval::new(-1.0, 0.5).is_err());
        assert!(Interval::new(0.0, f64::NAN).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_ok());
    }

    #[test]
    fn interval_parsing_and_overlap() {
        assert_eq!("0.004-0.006".parse::<Interval>().unwrap(), iv(0.004, 0.006));
        assert_eq!("(0,inf]".parse::<Interval>().unwrap(), Interval::unbounded());
        let list = Interval::parse_list("0-0.002,0.002-0.004").unwrap();
        assert!(check_disjoint(&list).is_ok());
        let list = Interval::parse_list("0-0.003,0.002-0.004").unwrap();
        assert!(matches!(check_disjoint(&list), Err(Error::OverlappingIntervals(..))));
    }

    #[test]
    fn parallel_nodes_are_sorted_and_distinct() {
        let e = Episode::parallel(["C", "A", "B"]).unwrap();
        assert_eq!(e.nodes(), ["A", "B", "C"]);
        assert_eq!(e.to_string(), "(A B C)");
        assert!(matches!(Episode::parallel(["A", "A"]), Err(Error::RepeatedEventType(_))));
    }

    #[test]
    fn serial_requires_matching_gap_count() {
        assert!(Episode::serial(["A", "B"], []).is_err());
        assert!(Episode::serial(["A", "B"], [iv(0.0, 5.0)]).is_ok());
    }

    #[test]
    fn subepisode_relation() {
        let abc: Episode = "A -> B -> C".parse().unwrap();
        let ab: Episode = "A -> B".parse().unwrap();
        let ba: Episode = "B -> A".parse().unwrap();
        let ac: Episode = "A -> C".parse().unwrap();
        assert!(is_subepisode(&ab, &abc).unwrap());
        assert!(is_subepisode(&ac, &abc).unwrap());
        assert!(!is_subepisode(&ba, &abc).unwrap());
        let p_abc = Episode::parallel(["A", "B", "C"]).unwrap();
        let p_ac = Episode::parallel(["A", "C"]).unwrap();
        assert!(is_subepisode(&p_ac, &p_abc).unwrap());
        assert!(!is_subepisode(&p_abc, &p_ac).unwrap());
        assert!(matches!(is_subepisode(&p_ac, &abc), Err(Error::KindMismatch)));
    }

    #[test]
    fn constraints_do_not_affect_subepisode() {
        let a: Episode = "A -(0,5]-> B -(5,10]-> C".parse().unwrap();
        let b: Episode = "A -(7,9]-> C".parse().unwrap();
        assert!(is_subepisode(&b, &a).unwrap());
    }

    #[test]
    fn notation_round_trips() {
        for text in [
            "A -(0.004,0.006]-> B -(0.002,0.004]-> C",
            "(A B C)",
            "A -> B -> C",
            "X -(0.004,0.006]-> [A B C] -(0.002,0.004]-> D",
            "A",
        ] {
            let e: Episode = text.parse().unwrap();
            assert_eq!(e.to_string(), text);
        }
        let e: Episode = "X -(0.004,0.006]-> [A B C]".parse().unwrap();
        assert_eq!(e.nodes(), ["X", "[A B C]"]);
    }

    #[test]
    fn json_shape() {
        let e: Episode = "A -(0,5]-> B".parse().unwrap();
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(json, r#"{"kind":"serial","nodes":["A","B"],"gaps":["(0,5]"]}"#);
        assert_eq!(serde_json::from_str::<Episode>(&json).unwrap(), e);
        let bad = r#"{"kind":"parallel","nodes":["A","A"]}"#;
        assert!(serde_json::from_str::<Episode>(bad).is_err());
    }

    #[test]
    fn prefix_and_suffix_keep_constraints() {
        let e: Episode = "A -(0,5]-> B -(5,10]-> C".parse().unwrap();
        assert_eq!(e.prefix(2).to_string(), "A -(0,5]-> B");
        assert_eq!(e.suffix(2).to_string(), "B -(5,10]-> C");
        assert_eq!(e.composite_symbol(), "[A B C]");
    }
}
