use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::episode::{Episode, EpisodeKind, Interval};
use crate::error::{Error, Result};
use crate::event::EventSequence;
use crate::mining::{count_parallel_expiry, count_serial_intervals, frequency_profile, run_chunked};
use crate::sim::{build_network, gen_noise, presets, simulate, ModelKind};

const SYNCHRONY_TARGETS: [&str; 10] = ["B", "C", "D", "E", "F", "G", "H", "I", "J", "K"];
const CHAIN: [&str; 10] = ["A", "B", "C", "D", "E", "F", "G", "H", "I", "J"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternData {
    pub model: ModelKind,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignificanceConfig {
    pub replicates: usize,
    pub duration: f64,
    pub noise_models: Vec<u8>,
    /// Fan-out datasets (A drives B..K) for the parallel study.
    pub synchrony: Vec<PatternData>,
    /// Chain datasets (A..J) for the serial study.
    pub chains: Vec<PatternData>,
    pub max_size: usize,
    pub expiry: f64,
    pub interval: Interval,
    pub seed: u64,
    pub workers: usize,
    /// Cap on occurrences enumerated per noise profile.
    pub occurrence_budget: u64,
    /// Cap on replicates x duration x datasets, in simulated seconds.
    pub max_simulated_seconds: f64,
}

impl Default for SignificanceConfig {
    fn default() -> Self {
        let p = |model, rho| PatternData { model, rho };
        SignificanceConfig {
            replicates: 10,
            duration: 50.0,
            noise_models: (1..=6).collect(),
            synchrony: vec![p(ModelKind::Sigmoid, 0.8)],
            chains: vec![
                p(ModelKind::Sigmoid, 0.8),
                p(ModelKind::Sigmoid, 0.6),
                p(ModelKind::Sigmoid, 0.4),
                p(ModelKind::Linear, 0.8),
                p(ModelKind::Linear, 0.7),
            ],
            max_size: 10,
            expiry: 0.001,
            interval: Interval::new(0.004, 0.006).expect("valid interval"),
            seed: 1,
            workers: 1,
            occurrence_budget: 50_000_000,
            max_simulated_seconds: 100_000.0,
        }
    }
}

impl SignificanceConfig {
    /// A quick configuration for trying the pipeline out.
    pub fn smoke() -> Self {
        SignificanceConfig { replicates: 1, duration: 5.0, ..Default::default() }
    }

    fn datasets(&self) -> Vec<Dataset> {
        let mut out: Vec<Dataset> = self.noise_models.iter().map(|&m| Dataset::Noise(m)).collect();
        out.extend(self.synchrony.iter().map(|&p| Dataset::Synchrony(p)));
        out.extend(self.chains.iter().map(|&p| Dataset::Chain(p)));
        out
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.replicates == 0 {
            return bad("replicates must be positive");
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return bad("duration must be positive");
        }
        if self.max_size == 0 || self.max_size > CHAIN.len() {
            return bad("max_size must be between 1 and 10");
        }
        if !(self.expiry > 0.0 && self.expiry.is_finite()) {
            return bad("expiry must be positive");
        }
        if self.workers == 0 {
            return bad("workers must be positive");
        }
        if let Some(&m) = self.noise_models.iter().find(|&&m| !(1..=6).contains(&m)) {
            return Err(Error::UnknownNoiseModel(m));
        }
        for p in self.synchrony.iter().chain(&self.chains) {
            if !(p.rho > 0.0 && p.rho < 1.0) {
                return Err(Error::InvalidProbability(p.rho));
            }
        }
        let total = self.replicates as f64 * self.duration * self.datasets().len() as f64;
        if total > self.max_simulated_seconds {
            return Err(Error::Budget(format!(
                "{total} simulated seconds requested, limit is {}",
                self.max_simulated_seconds
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Dataset {
    Noise(u8),
    Synchrony(PatternData),
    Chain(PatternData),
}

fn model_name(m: ModelKind) -> &'static str {
    match m {
        ModelKind::Sigmoid => "sigmoid",
        ModelKind::Linear => "linear",
    }
}

impl Dataset {
    fn label(&self) -> String {
        match self {
            Dataset::Noise(m) => format!("noise-{m}"),
            Dataset::Synchrony(p) => format!("synchrony-{}-{}", model_name(p.model), p.rho),
            Dataset::Chain(p) => format!("chain-{}-{}", model_name(p.model), p.rho),
        }
    }

    fn generate(&self, seed: u64, duration: f64) -> Result<EventSequence> {
        match *self {
            Dataset::Noise(m) => gen_noise(m, seed, duration, 26),
            Dataset::Synchrony(p) => {
                let spec = presets::synchrony(p.model, p.rho);
                Ok(simulate(&build_network(&spec, seed)?, duration, seed))
            }
            Dataset::Chain(p) => {
                let spec = presets::chain(p.model, p.rho);
                Ok(simulate(&build_network(&spec, seed)?, duration, seed))
            }
        }
    }
}

/// Whether a curve is the largest frequency over all episodes of a size
/// (noise) or the smallest over the embedded pattern's members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    Max,
    Min,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub study: EpisodeKind,
    pub dataset: String,
    pub statistic: Statistic,
    /// `per_replicate[r][n-1]` for episode size n.
    pub per_replicate: Vec<Vec<u64>>,
    pub mean: Vec<f64>,
}

/// Noise versus pattern comparison at one size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    pub study: EpisodeKind,
    pub size: usize,
    /// Highest mean noise maximum over the noise datasets.
    pub noise_max: f64,
    /// Lowest mean pattern minimum over the pattern datasets.
    pub pattern_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceReport {
    pub config: SignificanceConfig,
    pub curves: Vec<Curve>,
    pub separation: Vec<Separation>,
    pub elapsed_seconds: f64,
}

impl SignificanceReport {
    pub fn separation_at(&self, study: EpisodeKind, size: usize) -> Option<&Separation> {
        self.separation.iter().find(|s| s.study == study && s.size == size)
    }

    /// Smallest size at which every noise dataset has mean maximum zero.
    pub fn noise_zero_size(&self, study: EpisodeKind) -> Option<usize> {
        self.separation.iter().filter(|s| s.study == study).find(|s| s.noise_max == 0.0).map(|s| s.size)
    }

    /// Tab-separated curves, one row per study, dataset and size.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("study\tdataset\tstatistic\tsize\tmean\tlow\thigh\n");
        for c in &self.curves {
            for (i, mean) in c.mean.iter().enumerate() {
                let vals = c.per_replicate.iter().map(|r| r[i]);
                let low = vals.clone().min().unwrap_or(0);
                let high = vals.max().unwrap_or(0);
                let stat = match c.statistic {
                    Statistic::Max => "max",
                    Statistic::Min => "min",
                };
                let _ = writeln!(out, "{}\t{}\t{}\t{}\t{:.3}\t{}\t{}", c.study, c.dataset, stat, i + 1, mean, low, high);
            }
        }
        out
    }
}

/// Same stream-splitting recipe as SplitMix64.
fn derive_seed(base: u64, dataset: u64, replicate: u64) -> u64 {
    let mut z = base ^ dataset.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ replicate.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn choose(items: &[&'static str], k: usize) -> Vec<Vec<&'static str>> {
    fn rec(items: &[&'static str], k: usize, start: usize, cur: &mut Vec<&'static str>, out: &mut Vec<Vec<&'static str>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, k, 0, &mut Vec::new(), &mut out);
    out
}

fn singleton_min(seq: &EventSequence, members: &[&str]) -> u64 {
    let hist = seq.histogram();
    members.iter().map(|m| seq.type_id(m).map_or(0, |t| hist[t as usize])).min().unwrap_or(0)
}

/// Smallest frequency among the synchrony pattern's sub-episodes, per size.
fn synchrony_minima(seq: &EventSequence, cfg: &SignificanceConfig) -> Result<Vec<u64>> {
    let mut out = vec![singleton_min(seq, &SYNCHRONY_TARGETS)];
    for n in 2..=cfg.max_size {
        let eps = choose(&SYNCHRONY_TARGETS, n)
            .into_iter()
            .map(Episode::parallel)
            .collect::<Result<Vec<_>>>()?;
        let counts = count_parallel_expiry(&eps, seq, Some(cfg.expiry))?;
        out.push(counts.iter().map(|c| c.count).min().unwrap_or(0));
    }
    Ok(out)
}

/// Smallest frequency among the chain's contiguous sub-chains, per size.
fn chain_minima(seq: &EventSequence, cfg: &SignificanceConfig) -> Result<Vec<u64>> {
    let mut out = vec![singleton_min(seq, &CHAIN)];
    for n in 2..=cfg.max_size {
        let eps = CHAIN
            .windows(n)
            .map(|w| Episode::serial(w.iter().copied(), vec![cfg.interval; n - 1]))
            .collect::<Result<Vec<_>>>()?;
        let counts = count_serial_intervals(&eps, seq)?;
        out.push(counts.iter().map(|c| c.count).min().unwrap_or(0));
    }
    Ok(out)
}

/// Per-size values of one replicate: (parallel, serial), either may be absent.
type Measured = (Option<Vec<u64>>, Option<Vec<u64>>);

fn measure(d: &Dataset, seq: &EventSequence, cfg: &SignificanceConfig) -> Result<Measured> {
    match d {
        Dataset::Noise(_) => {
            let par = frequency_profile(seq, EpisodeKind::Parallel, Some(cfg.expiry), &[], cfg.max_size, cfg.occurrence_budget)?;
            let ser = frequency_profile(seq, EpisodeKind::Serial, None, &[cfg.interval], cfg.max_size, cfg.occurrence_budget)?;
            Ok((Some(par.max), Some(ser.max)))
        }
        Dataset::Synchrony(_) => Ok((Some(synchrony_minima(seq, cfg)?), None)),
        Dataset::Chain(_) => Ok((None, Some(chain_minima(seq, cfg)?))),
    }
}

fn mean_curve(rows: &[Vec<u64>], size: usize) -> Vec<f64> {
    (0..size).map(|i| rows.iter().map(|r| r[i] as f64).sum::<f64>() / rows.len() as f64).collect()
}

/// Simulates every dataset `replicates` times and compares the largest
/// frequency in structure-free noise with the smallest frequency of the
/// embedded patterns, size by size.
pub fn significance_run(cfg: &SignificanceConfig) -> Result<SignificanceReport> {
    cfg.validate()?;
    let start = std::time::Instant::now();
    let datasets = cfg.datasets();
    let jobs: Vec<(usize, usize)> =
        (0..datasets.len()).flat_map(|d| (0..cfg.replicates).map(move |r| (d, r))).collect();
    let results: Vec<Result<Measured>> = run_chunked(&jobs, cfg.workers, |chunk| {
        chunk
            .iter()
            .map(|&(d, r)| {
                let seed = derive_seed(cfg.seed, d as u64, r as u64);
                let seq = datasets[d].generate(seed, cfg.duration)?;
                measure(&datasets[d], &seq, cfg)
            })
            .collect()
    });
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;

    let mut curves = Vec::new();
    for (d, dataset) in datasets.iter().enumerate() {
        let reps = &results[d * cfg.replicates..(d + 1) * cfg.replicates];
        let statistic = if matches!(dataset, Dataset::Noise(_)) { Statistic::Max } else { Statistic::Min };
        for (study, pick) in [(EpisodeKind::Parallel, 0), (EpisodeKind::Serial, 1)] {
            let rows: Vec<Vec<u64>> =
                reps.iter().filter_map(|m| if pick == 0 { m.0.clone() } else { m.1.clone() }).collect();
            if rows.is_empty() {
                continue;
            }
            let mean = mean_curve(&rows, cfg.max_size);
            curves.push(Curve { study, dataset: dataset.label(), statistic, per_replicate: rows, mean });
        }
    }

    let mut separation = Vec::new();
    for study in [EpisodeKind::Parallel, EpisodeKind::Serial] {
        for n in 1..=cfg.max_size {
            let of = |s: Statistic| curves.iter().filter(move |c| c.study == study && c.statistic == s).map(move |c| c.mean[n - 1]);
            let noise_max = of(Statistic::Max).fold(0.0, f64::max);
            let pattern_min = of(Statistic::Min).fold(f64::INFINITY, f64::min);
            if of(Statistic::Max).next().is_none() && of(Statistic::Min).next().is_none() {
                continue;
            }
            separation.push(Separation { study, size: n, noise_max, pattern_min });
        }
    }
    Ok(SignificanceReport { config: cfg.clone(), curves, separation, elapsed_seconds: start.elapsed().as_secs_f64() })
}
