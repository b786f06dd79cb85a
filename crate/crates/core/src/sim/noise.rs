use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::EventSequence;

use super::network::{build_network, default_names, simulate, step_count, ModelKind, NetworkSpec, Spiker};

pub const NOISE_GROUPS: usize = 5;
const RATE_RANGE: (f64, f64) = (10.0, 30.0);
const DELTA_T: f64 = 0.001;
const PARAM_STREAM: u64 = 1 << 32;

/// Randomly drawn parameters of the structure-free models 3-6.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseParameters {
    /// Fixed per-neuron rates (model 3) or per-group rates (model 5).
    pub rates: Vec<f64>,
    /// Group of each neuron (models 5 and 6).
    pub groups: Vec<usize>,
}

/// Parameters `gen_noise` draws for `model` with this seed.
pub fn noise_parameters(model: u8, seed: u64, n_neurons: usize) -> Result<NoiseParameters> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(PARAM_STREAM);
    let (lo, hi) = RATE_RANGE;
    match model {
        1 | 2 | 4 => Ok(NoiseParameters { rates: Vec::new(), groups: Vec::new() }),
        3 => Ok(NoiseParameters {
            rates: (0..n_neurons).map(|_| rng.random_range(lo..=hi)).collect(),
            groups: Vec::new(),
        }),
        5 | 6 => {
            if n_neurons < NOISE_GROUPS {
                return Err(Error::InvalidConfig(format!("{NOISE_GROUPS} groups need at least {NOISE_GROUPS} neurons")));
            }
            let mut order: Vec<usize> = (0..n_neurons).collect();
            order.shuffle(&mut rng);
            let mut groups = vec![0; n_neurons];
            for (k, &j) in order.iter().enumerate() {
                groups[j] = if k < NOISE_GROUPS { k } else { rng.random_range(0..NOISE_GROUPS) };
            }
            let rates = if model == 5 { (0..NOISE_GROUPS).map(|_| rng.random_range(lo..=hi)).collect() } else { Vec::new() };
            Ok(NoiseParameters { rates, groups })
        }
        other => Err(Error::UnknownNoiseModel(other)),
    }
}

/// Structure-free spike data for significance testing.
///
/// 1: random network, sigmoid rates. 2: random network, linear rates.
/// 3: independent neurons at fixed rates in [10, 30] Hz. 4: as 3 with
/// rates redrawn every step. 5: five groups, one fixed rate per group.
/// 6: as 5 with group rates redrawn every step.
pub fn gen_noise(model: u8, seed: u64, duration: f64, n_neurons: usize) -> Result<EventSequence> {
    if n_neurons == 0 {
        return Err(Error::InvalidConfig("n_neurons must be positive".into()));
    }
    match model {
        1 | 2 => {
            let kind = if model == 1 { ModelKind::Sigmoid } else { ModelKind::Linear };
            let spec = NetworkSpec::new(n_neurons, kind);
            let net = build_network(&spec, seed)?;
            return Ok(simulate(&net, duration, seed));
        }
        3..=6 => {}
        other => return Err(Error::UnknownNoiseModel(other)),
    }
    let params = noise_parameters(model, seed, n_neurons)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(PARAM_STREAM + 1);
    let (lo, hi) = RATE_RANGE;
    let mut spiker = Spiker::new(n_neurons, DELTA_T, DELTA_T, duration, seed);
    let mut rates = vec![0.0; n_neurons];
    let mut group_rates = [0.0; NOISE_GROUPS];
    let mut counts = vec![0; n_neurons];
    for k in 0..step_count(duration, DELTA_T) {
        match model {
            3 => rates.copy_from_slice(&params.rates),
            4 => rates.iter_mut().for_each(|r| *r = rng.random_range(lo..=hi)),
            5 => rates.iter_mut().zip(&params.groups).for_each(|(r, &g)| *r = params.rates[g]),
            _ => {
                group_rates.iter_mut().for_each(|r| *r = rng.random_range(lo..=hi));
                rates.iter_mut().zip(&params.groups).for_each(|(r, &g)| *r = group_rates[g]);
            }
        }
        spiker.step(k, &rates, &mut counts);
    }
    Ok(spiker.finish(&default_names(n_neurons)))
}
