//! Ready-made networks for the worked examples and the significance study.

use crate::error::{Error, Result};

use super::network::{ModelKind, NetworkSpec, PatternKind, PatternSpec};

fn stages(groups: &[&[&str]]) -> Vec<Vec<String>> {
    groups.iter().map(|g| g.iter().map(|s| s.to_string()).collect()).collect()
}

fn with_patterns(model: ModelKind, patterns: Vec<PatternSpec>) -> NetworkSpec {
    let mut spec = NetworkSpec::new(26, model);
    spec.patterns = patterns;
    spec
}

/// A drives B; B drives C and E; C drives D; E drives F.
pub fn example1(model: ModelKind) -> NetworkSpec {
    let chain = |s: &[&[&str]]| PatternSpec { kind: PatternKind::SerialChain, stages: stages(s), delays: None, rho: None };
    with_patterns(model, vec![chain(&[&["A"], &["B"], &["C"], &["D"]]), chain(&[&["A"], &["B"], &["E"], &["F"]])])
}

/// Synfire chain A, {B C D}, E, {F G H I}, J, {K L}.
pub fn example2(model: ModelKind) -> NetworkSpec {
    with_patterns(
        model,
        vec![PatternSpec {
            kind: PatternKind::SynfireChain,
            stages: stages(&[&["A"], &["B", "C", "D"], &["E"], &["F", "G", "H", "I"], &["J"], &["K", "L"]]),
            delays: None,
            rho: None,
        }],
    )
}

/// X drives {A B C} after 5 steps, which drive D after 3, then E after 7
/// and F after 3.
pub fn example3(model: ModelKind) -> NetworkSpec {
    with_patterns(
        model,
        vec![PatternSpec {
            kind: PatternKind::SynfireChain,
            stages: stages(&[&["X"], &["A", "B", "C"], &["D"], &["E"], &["F"]]),
            delays: Some(vec![5, 3, 7, 3]),
            rho: None,
        }],
    )
}

/// A drives the ten neurons B..K simultaneously.
pub fn synchrony(model: ModelKind, rho: f64) -> NetworkSpec {
    let mut spec = with_patterns(
        model,
        vec![PatternSpec {
            kind: PatternKind::SynchronyFanout,
            stages: stages(&[&["A"], &["B", "C", "D", "E", "F", "G", "H", "I", "J", "K"]]),
            delays: None,
            rho: None,
        }],
    );
    spec.rho = rho;
    spec
}

/// Ordered chain A -> B -> ... -> J.
pub fn chain(model: ModelKind, rho: f64) -> NetworkSpec {
    let names = ["A", "B", "C", "D", "E", "F", "G", "H", "I", "J"];
    let mut spec = with_patterns(
        model,
        vec![PatternSpec {
            kind: PatternKind::SerialChain,
            stages: names.iter().map(|n| vec![n.to_string()]).collect(),
            delays: None,
            rho: None,
        }],
    );
    spec.rho = rho;
    spec
}

pub const PRESET_NAMES: [&str; 5] = ["example1", "example2", "example3", "synchrony", "chain"];

/// Looks up a preset by name; `synchrony` and `chain` use ρ = 0.8.
pub fn preset(name: &str, model: ModelKind) -> Result<NetworkSpec> {
    match name {
        "example1" => Ok(example1(model)),
        "example2" => Ok(example2(model)),
        "example3" => Ok(example3(model)),
        "synchrony" => Ok(synchrony(model, 0.8)),
        "chain" => Ok(chain(model, 0.8)),
        other => Err(Error::InvalidConfig(format!("unknown preset `{other}` (expected one of {})", PRESET_NAMES.join(", ")))),
    }
}
