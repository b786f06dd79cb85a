//! Several synthetic "cultures", each a network with its own embedded
//! chains, recorded on several "days". Serial episodes mined from each
//! day are compared with the similarity score; days of the same culture
//! should resemble each other more than days of different cultures.
//!
//! Run with `cargo run --release -p epimine --example culture_similarity`.

use epimine::analysis::similarity_matrix;
use epimine::sim::{build_network, simulate, ModelKind, NetworkSpec, PatternKind, PatternSpec};
use epimine::{mine, Episode, EpisodeKind, Interval, MiningConfig};

pub const EPISODE_SIZE: usize = 4;

fn chain(names: &str) -> PatternSpec {
    PatternSpec {
        kind: PatternKind::SerialChain,
        stages: names.split_whitespace().map(|n| vec![n.to_string()]).collect(),
        delays: None,
        rho: Some(0.8),
    }
}

/// Culture 2 reuses the head of culture 0's first chain.
pub fn cultures() -> Vec<NetworkSpec> {
    let chains = [["A B C D E", "F G H I"], ["J K L M N", "O P Q R"], ["A B C S T", "U V W X"]];
    chains
        .iter()
        .map(|pair| {
            let mut spec = NetworkSpec::new(26, ModelKind::Sigmoid);
            spec.patterns = pair.iter().map(|c| chain(c)).collect();
            spec
        })
        .collect()
}

pub struct Demo {
    /// Culture of each recording.
    pub labels: Vec<usize>,
    pub episodes: Vec<Vec<Episode>>,
    pub matrix: Vec<Vec<u64>>,
}

impl Demo {
    /// Mean similarity between distinct recordings of the same culture and
    /// of different cultures.
    pub fn within_and_across(&self) -> (f64, f64) {
        let (mut within, mut across) = (Vec::new(), Vec::new());
        for i in 0..self.labels.len() {
            for j in 0..i {
                let s = self.matrix[i][j] as f64;
                if self.labels[i] == self.labels[j] { within.push(s) } else { across.push(s) }
            }
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
        (mean(&within), mean(&across))
    }

    /// True if every recording's most similar other recording comes from
    /// the same culture.
    pub fn nearest_neighbours_agree(&self) -> bool {
        (0..self.labels.len()).all(|i| {
            let best = (0..self.labels.len()).filter(|&j| j != i).max_by_key(|&j| (self.matrix[i][j], std::cmp::Reverse(j)));
            best.is_some_and(|j| self.labels[j] == self.labels[i])
        })
    }
}

pub fn run(days: usize, duration: f64) -> epimine::Result<Demo> {
    let config = MiningConfig {
        intervals: vec![Interval::new(0.004, 0.006)?],
        max_size: EPISODE_SIZE,
        ..MiningConfig::default()
    };
    let (mut labels, mut episodes) = (Vec::new(), Vec::new());
    for (c, spec) in cultures().iter().enumerate() {
        let net = build_network(spec, 100 + c as u64)?;
        for day in 0..days {
            let seq = simulate(&net, duration, 1000 * c as u64 + day as u64);
            let report = mine(&seq, EpisodeKind::Serial, &config)?;
            labels.push(c);
            episodes.push(report.episodes(EPISODE_SIZE).iter().map(|e| e.episode.clone()).collect());
        }
    }
    let matrix = similarity_matrix(&episodes)?;
    Ok(Demo { labels, episodes, matrix })
}

#[allow(dead_code)]
fn main() -> epimine::Result<()> {
    let demo = run(3, 20.0)?;
    for (i, row) in demo.matrix.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|s| format!("{s:>6}")).collect();
        println!("culture {} day {}: {} episodes |{}", demo.labels[i], i % 3, demo.episodes[i].len(), cells.join(""));
    }
    let (within, across) = demo.within_and_across();
    println!("mean similarity within cultures {within:.1}, across cultures {across:.1}");
    Ok(())
}
