use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Firing rate (Hz) as a function of weighted input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RateModel {
    /// `lambda1 / (1 + exp(d - I))`.
    Sigmoid { lambda0: f64, lambda1: f64, d: f64 },
    /// Zero below `-lambda0/a`, `a*I + lambda0` up to `i1`, `lambda1` above.
    Linear { lambda0: f64, lambda1: f64, a: f64, i1: f64 },
}

/// Rate whose Poisson process fires at least once in `delta_t` with
/// probability `rho`.
pub fn target_rate(rho: f64, delta_t: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidProbability(rho));
    }
    Ok(-(1.0 - rho).ln() / delta_t)
}

/// Probability of at least one spike in `delta_t` at a constant `rate`.
pub fn spike_probability(rate: f64, delta_t: f64) -> f64 {
    1.0 - (-rate * delta_t).exp()
}

pub fn rate_sigmoid(input: f64, lambda1: f64, d: f64) -> f64 {
    lambda1 / (1.0 + (d - input).exp())
}

pub fn rate_linear(input: f64, lambda0: f64, lambda1: f64, a: f64, i1: f64) -> f64 {
    if input <= -lambda0 / a {
        0.0
    } else if input <= i1 {
        a * input + lambda0
    } else {
        lambda1
    }
}

impl RateModel {
    /// Sigmoid with resting rate `lambda0` and asymptote `lambda1`.
    pub fn sigmoid(lambda0: f64, lambda1: f64) -> Result<Self> {
        if !(lambda0 > 0.0 && lambda1 > lambda0 && lambda1.is_finite()) {
            return Err(Error::InvalidConfig(format!("sigmoid needs 0 < lambda0 < lambda1, got {lambda0}, {lambda1}")));
        }
        Ok(RateModel::Sigmoid { lambda0, lambda1, d: (lambda1 / lambda0 - 1.0).ln() })
    }

    /// Sigmoid whose calibrated weight reaches the rate for `rho`; the
    /// asymptote sits just above that rate.
    pub fn sigmoid_for(lambda0: f64, rho: f64, delta_t: f64) -> Result<Self> {
        Self::sigmoid(lambda0, target_rate(rho, delta_t)? / 0.999)
    }

    /// Sigmoid whose asymptote is chosen so that weight `c` yields
    /// conditional probability `p_high`.
    pub fn sigmoid_for_weight(lambda0: f64, c: f64, p_high: f64, delta_t: f64) -> Result<Self> {
        let target = target_rate(p_high, delta_t)?;
        let e = (-c).exp();
        let denom = 1.0 - target * e / lambda0;
        if !(c > 0.0 && target > lambda0 && denom > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "no sigmoid maps weight {c} to probability {p_high} at rest rate {lambda0}"
            )));
        }
        Self::sigmoid(lambda0, target * (1.0 - e) / denom)
    }

    /// Linear model that saturates at the rate for `rho` when the input
    /// reaches 1.
    pub fn linear_for(lambda0: f64, rho: f64, delta_t: f64) -> Result<Self> {
        let lambda1 = target_rate(rho, delta_t)?;
        if !(lambda0 > 0.0 && lambda1 > lambda0) {
            return Err(Error::InvalidConfig(format!("linear model needs 0 < lambda0 < {lambda1}, got {lambda0}")));
        }
        Ok(RateModel::Linear { lambda0, lambda1, a: lambda1 - lambda0, i1: 1.0 })
    }

    pub fn rate(&self, input: f64) -> f64 {
        match *self {
            RateModel::Sigmoid { lambda1, d, .. } => rate_sigmoid(input, lambda1, d),
            RateModel::Linear { lambda0, lambda1, a, i1 } => rate_linear(input, lambda0, lambda1, a, i1),
        }
    }

    pub fn lambda0(&self) -> f64 {
        match *self {
            RateModel::Sigmoid { lambda0, .. } | RateModel::Linear { lambda0, .. } => lambda0,
        }
    }

    pub fn lambda1(&self) -> f64 {
        match *self {
            RateModel::Sigmoid { lambda1, .. } | RateModel::Linear { lambda1, .. } => lambda1,
        }
    }

    /// Input that drives the neuron to `rate`.
    pub fn weight_for_rate(&self, rate: f64) -> Result<f64> {
        match *self {
            RateModel::Sigmoid { lambda1, d, .. } => {
                if !(rate > 0.0 && rate < lambda1) {
                    return Err(Error::InvalidConfig(format!("rate {rate} Hz unreachable below {lambda1} Hz")));
                }
                Ok(d - (lambda1 / rate - 1.0).ln())
            }
            RateModel::Linear { lambda0, lambda1, a, .. } => {
                if !(rate >= 0.0 && rate <= lambda1) {
                    return Err(Error::InvalidConfig(format!("rate {rate} Hz outside [0, {lambda1}] Hz")));
                }
                Ok((rate - lambda0) / a)
            }
        }
    }
}

/// Weight for which one presynaptic spike makes the target fire in the
/// following step with probability `rho`.
pub fn calibrate_weight(rho: f64, model: &RateModel, delta_t: f64) -> Result<f64> {
    model.weight_for_rate(target_rate(rho, delta_t)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_rest_and_midpoint() {
        let m = RateModel::sigmoid(20.0, 100.0).unwrap();
        assert!((m.rate(0.0) - 20.0).abs() < 1e-9);
        let RateModel::Sigmoid { d, .. } = m else { unreachable!() };
        assert!((m.rate(d) - 50.0).abs() < 1e-9);
        assert!((m.rate(1e6) - 100.0).abs() < 1e-9);
    }

    #[test]
    fn linear_branches() {
        let m = RateModel::Linear { lambda0: 20.0, lambda1: 120.0, a: 100.0, i1: 1.0 };
        assert_eq!(m.rate(0.0), 20.0);
        assert_eq!(m.rate(-0.2), 0.0);
        assert_eq!(m.rate(-5.0), 0.0);
        assert_eq!(m.rate(2.0), 120.0);
        assert!((m.rate(0.5) - 70.0).abs() < 1e-12);
    }

    #[test]
    fn target_rate_closed_form() {
        assert!((target_rate(0.95, 0.001).unwrap() - 2995.732).abs() < 1e-3);
        assert!(target_rate(1e-12, 0.001).unwrap() < 1e-6);
        assert!(matches!(target_rate(1.0, 0.001), Err(Error::InvalidProbability(_))));
        assert!(target_rate(0.0, 0.001).is_err());
    }

    #[test]
    fn calibrated_weights_reach_target() {
        for model in [RateModel::sigmoid_for(20.0, 0.95, 0.001).unwrap(), RateModel::linear_for(20.0, 0.95, 0.001).unwrap()] {
            let w = calibrate_weight(0.95, &model, 0.001).unwrap();
            let p = spike_probability(model.rate(w), 0.001);
            assert!((p - 0.95).abs() < 1e-9, "{model:?}: {p}");
        }
        let linear = RateModel::linear_for(20.0, 0.95, 0.001).unwrap();
        assert!((calibrate_weight(0.95, &linear, 0.001).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn background_sigmoid_matches_probability_range() {
        let m = RateModel::sigmoid_for_weight(20.0, 0.75, 0.032, 0.001).unwrap();
        assert!((spike_probability(m.rate(0.75), 0.001) - 0.032).abs() < 1e-9);
        let low = spike_probability(m.rate(-0.75), 0.001);
        assert!((low - 0.012).abs() < 0.002, "{low}");
    }
}
