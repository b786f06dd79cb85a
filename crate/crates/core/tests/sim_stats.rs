use epimine::sim::{
    build_network, calibrate_weight, gen_noise, noise_parameters, presets, simulate, target_rate, ModelKind, NetworkSpec,
    RateModel,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

/// Output rate of a Poisson source whose spikes are dropped within `tau`
/// of the previous kept spike.
fn dead_time_rate(rate: f64, tau: f64) -> f64 {
    rate / (1.0 + rate * tau)
}

fn silent_network(model: ModelKind, tau_r: Option<f64>) -> NetworkSpec {
    let mut spec = NetworkSpec::new(26, model);
    spec.fanout = Some(0);
    spec.tau_r = tau_r;
    spec
}

#[test]
fn unconnected_network_fires_at_rest_rate() {
    for model in [ModelKind::Sigmoid, ModelKind::Linear] {
        let spec = silent_network(model, Some(1e-9));
        let seq = simulate(&build_network(&spec, 11).unwrap(), 50.0, 11);
        let expected = 26.0 * 50.0 * 20.0;
        let n = seq.len() as f64;
        assert!((n - expected).abs() <= 3.0 * expected.sqrt(), "{model:?}: {n} spikes");
    }
}

#[test]
fn refractory_period_thins_at_dead_time_rate() {
    let spec = silent_network(ModelKind::Sigmoid, None);
    let seq = simulate(&build_network(&spec, 12).unwrap(), 50.0, 12);
    let expected = 26.0 * 50.0 * dead_time_rate(20.0, 0.001);
    let n = seq.len() as f64;
    assert!((n - expected).abs() <= 3.0 * expected.sqrt(), "{n} spikes, expected {expected}");
    for ty in 0..26u32 {
        let times: Vec<f64> = seq.iter().filter(|e| seq.type_id(e.event_type) == Some(ty)).map(|e| e.time).collect();
        assert!(times.windows(2).all(|w| w[1] - w[0] >= 0.001 - 1e-9));
    }
}

#[test]
fn fixed_rate_noise_matches_its_rates() {
    let params = noise_parameters(3, 5, 26).unwrap();
    let expected: f64 = params.rates.iter().map(|&r| dead_time_rate(r, 0.001) * 50.0).sum();
    let n = gen_noise(3, 5, 50.0, 26).unwrap().len() as f64;
    assert!((n / expected - 1.0).abs() < 0.10, "{n} spikes, expected {expected}");
}

#[test]
fn chain_link_fires_with_calibrated_probability() {
    let seq = simulate(&build_network(&presets::chain(ModelKind::Sigmoid, 0.8), 21).unwrap(), 50.0, 21);
    let step = |t: f64| (t / 0.001).ceil() as i64 - 1;
    let a: Vec<i64> = seq.iter().filter(|e| e.event_type == "A").map(|e| step(e.time)).collect();
    let b: std::collections::HashSet<i64> = seq.iter().filter(|e| e.event_type == "B").map(|e| step(e.time)).collect();
    let hits = a.iter().filter(|&&s| b.contains(&(s + 5))).count();
    let p = hits as f64 / a.len() as f64;
    assert!((p - 0.8).abs() < 0.05, "P(B | A) = {p}");
}

#[test]
fn calibrated_weight_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for rho in [0.4, 0.8, 0.95] {
        for model in [RateModel::sigmoid_for(20.0, rho, 0.001).unwrap(), RateModel::linear_for(20.0, rho, 0.001).unwrap()] {
            let w = calibrate_weight(rho, &model, 0.001).unwrap();
            let rate = model.rate(w);
            assert!((rate - target_rate(rho, 0.001).unwrap()).abs() < 1e-6);
            let poisson = Poisson::new(rate * 0.001).unwrap();
            let trials = 100_000;
            let fired = (0..trials).filter(|_| poisson.sample(&mut rng) >= 1.0).count();
            let p = fired as f64 / trials as f64;
            assert!((p - rho).abs() < 0.01, "{model:?}: {p} vs {rho}");
        }
    }
}

#[test]
fn same_seed_same_spikes() {
    let net = build_network(&presets::example1(ModelKind::Linear), 4).unwrap();
    assert_eq!(simulate(&net, 3.0, 4), simulate(&net, 3.0, 4));
    assert_ne!(simulate(&net, 3.0, 4), simulate(&net, 3.0, 5));
}

#[test]
fn shipped_configs_match_presets() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in ["example1", "example2", "example3"] {
        for (model, tag) in [(ModelKind::Sigmoid, "sigmoid"), (ModelKind::Linear, "linear")] {
            let text = std::fs::read_to_string(dir.join(format!("{name}-{tag}.net"))).unwrap();
            assert_eq!(NetworkSpec::from_toml(&text).unwrap(), presets::preset(name, model).unwrap(), "{name}-{tag}");
        }
    }
}
