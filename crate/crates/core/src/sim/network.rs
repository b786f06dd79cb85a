use std::collections::HashMap;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::{quantize_time, EventSequence};

use super::rate::{calibrate_weight, target_rate, RateModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Sigmoid,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    SerialChain,
    SynchronyFanout,
    SynfireChain,
}

/// A connectivity pattern laid over the random network: every neuron of a
/// stage projects to every neuron of the next stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternSpec {
    pub kind: PatternKind,
    pub stages: Vec<Vec<String>>,
    /// Delay in steps for each stage transition; defaults to the network delay.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delays: Option<Vec<u32>>,
    /// Conditional probability for this pattern; defaults to the network's.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
}

fn default_lambda0() -> f64 {
    20.0
}
fn default_rho() -> f64 {
    0.95
}
fn default_dt() -> f64 {
    0.001
}
fn default_delay() -> u32 {
    5
}
fn default_c() -> f64 {
    0.75
}
fn default_prob_range() -> [f64; 2] {
    [0.012, 0.032]
}

/// Everything needed to build a network. Loads from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub n_neurons: usize,
    /// Neuron names; defaults to A..Z for up to 26 neurons, else N0, N1, ...
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    pub model: ModelKind,
    #[serde(default = "default_lambda0")]
    pub lambda0: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_dt")]
    pub delta_t: f64,
    /// Default synaptic delay in steps.
    #[serde(default = "default_delay")]
    pub delay: u32,
    /// Refractory period in seconds; defaults to `delta_t`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_r: Option<f64>,
    /// Random outgoing synapses per neuron; defaults to half the network.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fanout: Option<usize>,
    /// Random sigmoid weights are uniform in `[-c, c]`.
    #[serde(default = "default_c")]
    pub random_weight: f64,
    /// Conditional-probability range of random synapses. Linear weights are
    /// drawn in this range; sigmoid background neurons are scaled so that
    /// weight `c` maps to its upper end.
    #[serde(default = "default_prob_range")]
    pub random_probability: [f64; 2],
    #[serde(default)]
    pub patterns: Vec<PatternSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl NetworkSpec {
    pub fn new(n_neurons: usize, model: ModelKind) -> Self {
        NetworkSpec {
            n_neurons,
            names: None,
            model,
            lambda0: default_lambda0(),
            rho: default_rho(),
            delta_t: default_dt(),
            delay: default_delay(),
            tau_r: None,
            fanout: None,
            random_weight: default_c(),
            random_probability: default_prob_range(),
            patterns: Vec::new(),
            seed: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: NetworkSpec = toml::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("network spec serializes")
    }

    pub fn names(&self) -> Vec<String> {
        match &self.names {
            Some(n) => n.clone(),
            None => default_names(self.n_neurons),
        }
    }

    pub fn tau_r(&self) -> f64 {
        self.tau_r.unwrap_or(self.delta_t)
    }

    pub fn fanout(&self) -> usize {
        self.fanout.unwrap_or(self.n_neurons / 2)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.n_neurons == 0 {
            return bad("n_neurons must be positive".into());
        }
        if let Some(names) = &self.names {
            if names.len() != self.n_neurons {
                return bad(format!("{} names for {} neurons", names.len(), self.n_neurons));
            }
            let mut sorted = names.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != names.len() {
                return bad("neuron names must be distinct".into());
            }
            for n in names {
                if n.is_empty() || n.contains([',', '\n', ' ', '[', ']']) || n.starts_with('#') {
                    return bad(format!("unusable neuron name `{n}`"));
                }
            }
        }
        if !(self.delta_t > 0.0 && self.delta_t.is_finite()) {
            return bad(format!("delta_t must be positive, got {}", self.delta_t));
        }
        if self.tau_r() < 0.0 || !self.tau_r().is_finite() {
            return bad(format!("tau_r must be non-negative, got {}", self.tau_r()));
        }
        if self.delay == 0 {
            return bad("delay must be at least one step".into());
        }
        if !(self.lambda0 > 0.0 && self.lambda0.is_finite()) {
            return bad(format!("lambda0 must be positive, got {}", self.lambda0));
        }
        target_rate(self.rho, self.delta_t)?;
        if self.fanout() >= self.n_neurons && self.fanout() > 0 {
            return bad(format!("fanout {} needs more than {} neurons", self.fanout(), self.n_neurons));
        }
        if !(self.random_weight >= 0.0 && self.random_weight.is_finite()) {
            return bad(format!("random_weight must be non-negative, got {}", self.random_weight));
        }
        let [lo, hi] = self.random_probability;
        if !(0.0 < lo && lo <= hi && hi < 1.0) {
            return bad(format!("random_probability must satisfy 0 < lo <= hi < 1, got [{lo}, {hi}]"));
        }
        let names = self.names();
        for p in &self.patterns {
            if p.stages.len() < 2 {
                return bad("a pattern needs at least two stages".into());
            }
            if p.stages.iter().any(|s| s.is_empty()) {
                return bad("pattern stages must be non-empty".into());
            }
            for n in p.stages.iter().flatten() {
                if !names.contains(n) {
                    return Err(Error::UnknownNeuron(n.clone()));
                }
            }
            match p.kind {
                PatternKind::SerialChain if p.stages.iter().any(|s| s.len() != 1) => {
                    return bad("serial_chain stages must be single neurons".into());
                }
                PatternKind::SynchronyFanout if p.stages.len() != 2 || p.stages[0].len() != 1 => {
                    return bad("synchrony_fanout is one driver stage followed by one group".into());
                }
                _ => {}
            }
            if let Some(d) = &p.delays {
                if d.len() != p.stages.len() - 1 || d.contains(&0) {
                    return bad("pattern delays need one positive entry per stage transition".into());
                }
            }
            if let Some(rho) = p.rho {
                target_rate(rho, self.delta_t)?;
            }
            for w in p.stages.windows(2) {
                if w[0].iter().any(|a| w[1].contains(a)) {
                    return bad("pattern would create a self-synapse".into());
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn default_names(n: usize) -> Vec<String> {
    if n <= 26 {
        (0..n).map(|i| ((b'A' + i as u8) as char).to_string()).collect()
    } else {
        (0..n).map(|i| format!("N{i}")).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Synapse {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
    pub delay: u32,
}

/// A built network ready to simulate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub names: Vec<String>,
    pub models: Vec<RateModel>,
    pub synapses: Vec<Synapse>,
    pub delta_t: f64,
    pub tau_r: f64,
}

/// Wires random synapses and embedded patterns. Pattern synapses replace
/// any random synapse between the same pair.
pub fn build_network(spec: &NetworkSpec, seed: u64) -> Result<Network> {
    spec.validate()?;
    let names = spec.names();
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let n = spec.n_neurons;
    let dt = spec.delta_t;
    let [p_lo, p_hi] = spec.random_probability;

    // Pattern synapses first, since they decide each target's rate ceiling.
    let mut pattern: Vec<(usize, usize, f64, u32, usize)> = Vec::new();
    let mut incoming_rho = vec![None::<f64>; n];
    for p in &spec.patterns {
        let rho = p.rho.unwrap_or(spec.rho);
        for (s, pair) in p.stages.windows(2).enumerate() {
            let delay = p.delays.as_ref().map_or(spec.delay, |d| d[s]);
            for tgt in &pair[1] {
                let t = index[tgt.as_str()];
                incoming_rho[t] = Some(incoming_rho[t].map_or(rho, |r: f64| r.max(rho)));
                for src in &pair[0] {
                    pattern.push((index[src.as_str()], t, rho, delay, pair[0].len()));
                }
            }
        }
    }

    let background = match spec.model {
        ModelKind::Sigmoid if spec.random_weight > 0.0 => {
            RateModel::sigmoid_for_weight(spec.lambda0, spec.random_weight, p_hi, dt)?
        }
        ModelKind::Sigmoid => RateModel::sigmoid_for(spec.lambda0, spec.rho, dt)?,
        ModelKind::Linear => RateModel::linear_for(spec.lambda0, spec.rho, dt)?,
    };
    let models: Vec<RateModel> = incoming_rho
        .iter()
        .map(|r| match (r, spec.model) {
            (None, _) => Ok(background),
            (Some(rho), ModelKind::Sigmoid) => RateModel::sigmoid_for(spec.lambda0, *rho, dt),
            (Some(rho), ModelKind::Linear) => RateModel::linear_for(spec.lambda0, *rho, dt),
        })
        .collect::<Result<_>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    let mut synapses: HashMap<(usize, usize), Synapse> = HashMap::new();
    let fanout = spec.fanout();
    for source in 0..n {
        if fanout == 0 {
            break;
        }
        let picks = sample(&mut rng, n - 1, fanout);
        for k in picks.iter() {
            let target = if k >= source { k + 1 } else { k };
            let weight = match spec.model {
                ModelKind::Sigmoid => rng.random_range(-spec.random_weight..=spec.random_weight),
                ModelKind::Linear => {
                    let p = rng.random_range(p_lo..=p_hi);
                    models[target].weight_for_rate(target_rate(p, dt)?)?
                }
            };
            synapses.insert((source, target), Synapse { source, target, weight, delay: spec.delay });
        }
    }
    for (source, target, rho, delay, fan_in) in pattern {
        let weight = calibrate_weight(rho, &models[target], dt)? / fan_in as f64;
        synapses.insert((source, target), Synapse { source, target, weight, delay });
    }
    let mut synapses: Vec<Synapse> = synapses.into_values().collect();
    synapses.sort_by_key(|s| (s.source, s.target));
    Ok(Network { names, models, synapses, delta_t: dt, tau_r: spec.tau_r() })
}

/// Per-neuron Poisson spike generation, one step of length `delta_t` at a time.
pub(crate) struct Spiker {
    rngs: Vec<ChaCha8Rng>,
    last: Vec<f64>,
    delta_t: f64,
    tau_r: f64,
    duration: f64,
    buf: Vec<f64>,
    spikes: Vec<(f64, u32)>,
}

/// Number of whole or partial steps covering `duration`.
pub(crate) fn step_count(duration: f64, delta_t: f64) -> u64 {
    if duration <= 0.0 {
        0
    } else {
        (duration / delta_t - 1e-9).ceil() as u64
    }
}

impl Spiker {
    pub(crate) fn new(n: usize, delta_t: f64, tau_r: f64, duration: f64, seed: u64) -> Self {
        let rngs = (0..n)
            .map(|j| {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                r.set_stream(j as u64 + 1);
                r
            })
            .collect();
        Spiker {
            rngs,
            last: vec![f64::NEG_INFINITY; n],
            delta_t,
            tau_r,
            duration,
            buf: Vec::new(),
            spikes: Vec::new(),
        }
    }

    /// Fires every neuron over step `k`, i.e. `(k dt, (k+1) dt]`, and
    /// writes per-neuron spike counts.
    pub(crate) fn step(&mut self, k: u64, rates: &[f64], counts: &mut [u32]) {
        let start = k as f64 * self.delta_t;
        for (j, &rate) in rates.iter().enumerate() {
            counts[j] = 0;
            let mean = rate * self.delta_t;
            if !(mean > 0.0) {
                continue;
            }
            let rng = &mut self.rngs[j];
            let m = Poisson::new(mean).map(|p| p.sample(rng) as usize).unwrap_or(0);
            if m == 0 {
                continue;
            }
            self.buf.clear();
            for _ in 0..m {
                let u: f64 = rng.random();
                self.buf.push(quantize_time(start + (1.0 - u) * self.delta_t));
            }
            self.buf.sort_by(f64::total_cmp);
            for &t in &self.buf {
                if t > self.duration || t - self.last[j] < self.tau_r {
                    continue;
                }
                self.last[j] = t;
                self.spikes.push((t, j as u32));
                counts[j] += 1;
            }
        }
    }

    pub(crate) fn finish(mut self, names: &[String]) -> EventSequence {
        self.spikes.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut order: Vec<usize> = (0..names.len()).collect();
        order.sort_by(|&a, &b| names[a].cmp(&names[b]));
        let mut rank = vec![0u32; names.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r as u32;
        }
        let alphabet: Vec<String> = order.iter().map(|&i| names[i].clone()).collect();
        let types = self.spikes.iter().map(|&(_, j)| rank[j as usize]).collect();
        let times = self.spikes.iter().map(|&(t, _)| t).collect();
        EventSequence::from_parts(alphabet, types, times)
    }
}

/// Runs the network for `duration` seconds. Spikes in step `s` feed the
/// rate of step `s + delay` of each target.
pub fn simulate(net: &Network, duration: f64, seed: u64) -> EventSequence {
    let n = net.names.len();
    let steps = step_count(duration, net.delta_t);
    let max_delay = net.synapses.iter().map(|s| s.delay).max().unwrap_or(1) as u64;
    let ring_len = (max_delay + 1) as usize;
    let mut ring = vec![vec![0u32; n]; ring_len];
    let mut outgoing: Vec<Vec<(usize, f64, u64)>> = vec![Vec::new(); n];
    for s in &net.synapses {
        outgoing[s.source].push((s.target, s.weight, s.delay as u64));
    }
    let mut spiker = Spiker::new(n, net.delta_t, net.tau_r, duration, seed);
    let mut input = vec![0.0; n];
    let mut rates = vec![0.0; n];
    for k in 0..steps {
        input.iter_mut().for_each(|x| *x = 0.0);
        for (src, outs) in outgoing.iter().enumerate() {
            for &(tgt, w, h) in outs {
                if h <= k {
                    let c = ring[((k - h) % ring_len as u64) as usize][src];
                    if c > 0 {
                        input[tgt] += w * c as f64;
                    }
                }
            }
        }
        for j in 0..n {
            rates[j] = net.models[j].rate(input[j]);
        }
        let slot = (k % ring_len as u64) as usize;
        spiker.step(k, &rates, &mut ring[slot]);
    }
    spiker.finish(&net.names)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_and_validation() {
        let text = r#"
            n_neurons = 4
            model = "sigmoid"
            [[patterns]]
            kind = "serial_chain"
            stages = [["A"], ["B"], ["C"]]
            delays = [5, 3]
        "#;
        let spec = NetworkSpec::from_toml(text).unwrap();
        assert_eq!(spec.fanout(), 2);
        assert_eq!(NetworkSpec::from_toml(&spec.to_toml()).unwrap(), spec);

        let bad = text.replace("[\"C\"]]", "[\"Q\"]]");
        assert!(matches!(NetworkSpec::from_toml(&bad), Err(Error::UnknownNeuron(_))));
        assert!(NetworkSpec::from_toml("n_neurons = 4\nmodel = \"sigmoid\"\nbogus = 1\n").is_err());
    }

    #[test]
    fn pattern_synapses_are_calibrated() {
        let mut spec = NetworkSpec::new(6, ModelKind::Linear);
        spec.fanout = Some(0);
        spec.patterns.push(PatternSpec {
            kind: PatternKind::SynfireChain,
            stages: vec![vec!["A".into()], vec!["B".into(), "C".into()], vec!["D".into()]],
            delays: Some(vec![5, 3]),
            rho: None,
        });
        let net = build_network(&spec, 1).unwrap();
        assert_eq!(net.synapses.len(), 4);
        let bd = net.synapses.iter().find(|s| s.source == 1 && s.target == 3).unwrap();
        assert!((bd.weight - 0.5).abs() < 1e-12);
        assert_eq!(bd.delay, 3);
    }

    #[test]
    fn random_wiring_has_requested_fanout() {
        let spec = NetworkSpec::new(26, ModelKind::Sigmoid);
        let net = build_network(&spec, 3).unwrap();
        assert_eq!(net.synapses.len(), 26 * 13);
        assert!(net.synapses.iter().all(|s| s.source != s.target && s.weight.abs() <= 0.75));
    }

    #[test]
    fn zero_duration_is_empty() {
        let net = build_network(&NetworkSpec::new(3, ModelKind::Sigmoid), 0).unwrap();
        let seq = simulate(&net, 0.0, 1);
        assert!(seq.is_empty());
        assert_eq!(seq.alphabet().len(), 3);
    }

    #[test]
    fn refractory_period_holds() {
        let mut spec = NetworkSpec::new(3, ModelKind::Sigmoid);
        spec.lambda0 = 400.0;
        spec.random_weight = 0.0;
        spec.fanout = Some(0);
        let net = build_network(&spec, 0).unwrap();
        let seq = simulate(&net, 5.0, 9);
        for ty in 0..3 {
            let ts: Vec<f64> = seq.iter().filter(|e| e.event_type == seq.symbol(ty)).map(|e| e.time).collect();
            assert!(ts.windows(2).all(|w| w[1] - w[0] >= 0.001 - 1e-12));
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let net = build_network(&NetworkSpec::new(8, ModelKind::Linear), 5).unwrap();
        assert_eq!(simulate(&net, 2.0, 11), simulate(&net, 2.0, 11));
        assert_ne!(simulate(&net, 2.0, 11), simulate(&net, 2.0, 12));
    }
}
