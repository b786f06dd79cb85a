//! Stochastic spiking-network simulator and structure-free noise models.

mod network;
mod noise;
pub mod presets;
mod rate;

pub use network::{build_network, simulate, ModelKind, Network, NetworkSpec, PatternKind, PatternSpec, Synapse};
pub use noise::{gen_noise, noise_parameters, NoiseParameters, NOISE_GROUPS};
pub use rate::{calibrate_weight, rate_linear, rate_sigmoid, spike_probability, target_rate, RateModel};
