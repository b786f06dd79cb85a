//! Timestamped event streams and the plain-text spike file format.
//!
//! A spike file is UTF-8 text with one `event_type,time` record per line.
//! Lines starting with `#` are comments. Times are seconds. A comment of the
//! form `# alphabet: A B C` declares event types that may not occur in the
//! body (silent neurons); other tools can treat it as an ordinary comment.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense index of an event type inside one [`EventSequence`].
pub type TypeId = u32;

const ALPHABET_DIRECTIVE: &str = "# alphabet:";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub event_type: String,
    pub time: f64,
}

impl Event {
    pub fn new(event_type: impl Into<String>, time: f64) -> Self {
        Event { event_type: event_type.into(), time }
    }
}

fn check_symbol(symbol: &str) -> Result<()> {
    if symbol.is_empty() {
        return Err(Error::InvalidEvent("empty event type".into()));
    }
    if symbol.contains([',', '\n', '\r']) || symbol.starts_with('#') || symbol.trim() != symbol {
        return Err(Error::InvalidEvent(format!("unusable event type `{symbol}`")));
    }
    Ok(())
}

fn check_time(time: f64) -> Result<()> {
    if !time.is_finite() || time < 0.0 {
        return Err(Error::InvalidEvent(format!("time {time} is not a finite non-negative number")));
    }
    Ok(())
}

/// A time-ordered, validated stream of events.
///
/// Event types are interned: `types()[i]` indexes into `alphabet()`, which is
/// sorted lexicographically. The sequence is immutable once built.
#[derive(Debug, Clone)]
pub struct EventSequence {
    alphabet: Vec<String>,
    lookup: HashMap<String, TypeId>,
    types: Vec<TypeId>,
    times: Vec<f64>,
}

impl PartialEq for EventSequence {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
            && self.times.len() == other.times.len()
            && self.iter().zip(other.iter()).all(|(a, b)| a == b)
    }
}

/// Borrowed view of one event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRef<'a> {
    pub event_type: &'a str,
    pub time: f64,
}

impl<'a> PartialEq<EventRef<'a>> for Event {
    fn eq(&self, other: &EventRef<'a>) -> bool {
        self.event_type == other.event_type && self.time == other.time
    }
}

impl EventSequence {
    /// Builds a sequence whose alphabet is exactly the set of observed types.
    pub fn from_events(events: impl IntoIterator<Item = Event>) -> Result<Self> {
        Self::with_alphabet(std::iter::empty::<String>(), events)
    }

    /// Builds a sequence over an explicit alphabet. Observed types missing
    /// from `alphabet` are added to it.
    pub fn with_alphabet<S: Into<String>>(
        alphabet: impl IntoIterator<Item = S>,
        events: impl IntoIterator<Item = Event>,
    ) -> Result<Self> {
        let events: Vec<Event> = events.into_iter().collect();
        let mut symbols = BTreeSet::new();
        for s in alphabet {
            let s = s.into();
            check_symbol(&s)?;
            symbols.insert(s);
        }
        let mut previous = f64::NEG_INFINITY;
        for (i, e) in events.iter().enumerate() {
            check_symbol(&e.event_type)?;
            check_time(e.time)?;
            if e.time < previous {
                return Err(Error::DecreasingTime { line: i + 1, previous, time: e.time });
            }
            previous = e.time;
            if !symbols.contains(&e.event_type) {
                symbols.insert(e.event_type.clone());
            }
        }
        let alphabet: Vec<String> = symbols.into_iter().collect();
        let lookup: HashMap<String, TypeId> =
            alphabet.iter().enumerate().map(|(i, s)| (s.clone(), i as TypeId)).collect();
        let types = events.iter().map(|e| lookup[&e.event_type]).collect();
        let times = events.iter().map(|e| e.time).collect();
        Ok(EventSequence { alphabet, lookup, types, times })
    }

    /// Assembles a sequence from interned parts produced inside the crate.
    pub(crate) fn from_parts(alphabet: Vec<String>, types: Vec<TypeId>, times: Vec<f64>) -> Self {
        debug_assert!(alphabet.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(times.windows(2).all(|w| w[0] <= w[1]));
        let lookup = alphabet.iter().enumerate().map(|(i, s)| (s.clone(), i as TypeId)).collect();
        EventSequence { alphabet, lookup, types, times }
    }

    pub fn empty() -> Self {
        Self::from_parts(Vec::new(), Vec::new(), Vec::new())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn type_id(&self, symbol: &str) -> Option<TypeId> {
        self.lookup.get(symbol).copied()
    }

    pub fn symbol(&self, id: TypeId) -> &str {
        &self.alphabet[id as usize]
    }

    pub fn types(&self) -> &[TypeId] {
        &self.types
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn get(&self, index: usize) -> EventRef<'_> {
        EventRef { event_type: self.symbol(self.types[index]), time: self.times[index] }
    }

    pub fn iter(&self) -> impl Iterator<Item = EventRef<'_>> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn to_events(&self) -> Vec<Event> {
        self.iter().map(|e| Event::new(e.event_type, e.time)).collect()
    }

    /// Number of occurrences of each alphabet entry.
    pub fn histogram(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.alphabet.len()];
        for &t in &self.types {
            counts[t as usize] += 1;
        }
        counts
    }

    /// Time of the last event, or zero for an empty stream.
    pub fn end_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }
}

/// Parses spike-file text. Order among equal timestamps is preserved;
/// decreasing timestamps are rejected rather than sorted.
pub fn parse_events(text: &str) -> Result<EventSequence> {
    parse_reader(text.as_bytes())
}

pub fn parse_reader(reader: impl BufRead) -> Result<EventSequence> {
    let mut declared: Vec<String> = Vec::new();
    let mut events = Vec::new();
    let mut previous = f64::NEG_INFINITY;
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix(ALPHABET_DIRECTIVE) {
            declared.extend(rest.split_whitespace().map(str::to_owned));
            continue;
        }
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let bad = |message: String| Error::Parse { line: lineno, message };
        let (symbol, time) = trimmed
            .rsplit_once(',')
            .ok_or_else(|| bad(format!("expected `event_type,time`, got `{trimmed}`")))?;
        let symbol = symbol.trim();
        let time: f64 = time
            .trim()
            .parse()
            .map_err(|_| bad(format!("`{}` is not a decimal time", time.trim())))?;
        check_symbol(symbol).map_err(|e| bad(e.to_string()))?;
        check_time(time).map_err(|e| bad(e.to_string()))?;
        if time < previous {
            return Err(Error::DecreasingTime { line: lineno, previous, time });
        }
        previous = time;
        events.push(Event::new(symbol, time));
    }
    EventSequence::with_alphabet(declared, events)
}

pub fn read_events(path: impl AsRef<Path>) -> Result<EventSequence> {
    let file = std::fs::File::open(path)?;
    parse_reader(std::io::BufReader::new(file))
}

/// Renders a sequence in spike-file format. Times use the shortest decimal
/// that parses back to the same value, so `parse_events(write_events(s)) == s`.
pub fn write_events(seq: &EventSequence) -> String {
    let mut out = String::with_capacity(seq.len() * 12 + 64);
    out.push_str("# event_type,time\n");
    let hist = seq.histogram();
    if hist.contains(&0) {
        let _ = writeln!(out, "{ALPHABET_DIRECTIVE} {}", seq.alphabet().join(" "));
    }
    for e in seq.iter() {
        let _ = writeln!(out, "{},{}", e.event_type, e.time);
    }
    out
}

pub fn write_events_to(seq: &EventSequence, path: impl AsRef<Path>) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(write_events(seq).as_bytes())?;
    file.flush()?;
    Ok(())
}

/// Rounds a time to whole nanoseconds, the resolution of spike files.
pub fn quantize_time(t: f64) -> f64 {
    (t * 1e9).round() / 1e9
}
