use stable_flows::catalog::{catalog_entry, QChoice};
use stable_flows::paths::Covariance;
use stable_flows::simulate::{replicate, simulate_series, simulate_substable, SeriesConfig};
use stable_flows::stats::{ks_critical, ks_statistic, quantile_sorted};
use stable_flows::{kernel_norm, sample_sas, RngStream, StabilityIndex, StableScale};

fn alpha() -> StabilityIndex {
    StabilityIndex::new(1.5).unwrap()
}

fn cms(n: usize, scale: f64, seed: u64) -> Vec<f64> {
    let s = StableScale::new(scale).unwrap();
    let mut rng = RngStream::new(seed, 0);
    (0..n).map(|_| sample_sas(alpha(), s, &mut rng)).collect()
}

fn series_at(name: &str, q: QChoice, times: &[f64], paths: usize, n_terms: usize, seed: u64) -> Vec<Vec<f64>> {
    let k = catalog_entry(name, alpha(), q).unwrap().kernel;
    let cfg = SeriesConfig::new(n_terms).unwrap();
    replicate(paths, &RngStream::new(seed, 0), |r| Ok(simulate_series(&k, times, &cfg, r)?.values)).unwrap()
}

#[test]
fn constant_kernel_matches_cms() {
    let n = 10_000;
    let x: Vec<f64> = series_at("constant_atom", QChoice::Default, &[0.0], n, 10_000, 3).into_iter().map(|v| v[0]).collect();
    let d = ks_statistic(&x, &cms(n, 1.0, 4));
    assert!(d < ks_critical(n, n, 0.01), "KS {d}");
}

#[test]
fn zero_kernel_gives_zero_paths() {
    let mut k = catalog_entry("moving_average", alpha(), QChoice::Default).unwrap().kernel;
    k.amplitude = 0.0;
    let p = simulate_series(&k, &[0.0, 1.5, 3.0], &SeriesConfig::default(), &mut RngStream::new(1, 1)).unwrap();
    assert!(p.values.iter().all(|&v| v == 0.0));
}

#[test]
fn moving_average_far_times_are_independent() {
    let n = 10_000;
    let v = series_at("moving_average", QChoice::Default, &[0.0, 5.0], n, 1_000, 5);
    let corr = v.iter().map(|p| p[0].signum() * p[1].signum()).sum::<f64>() / n as f64;
    assert!(corr.abs() < 4.0 / (n as f64).sqrt(), "{corr}");
}

#[test]
fn doubling_terms_stays_within_reported_truncation() {
    let k = catalog_entry("moving_average", alpha(), QChoice::Default).unwrap().kernel;
    let times = [0.0, 0.5, 2.0];
    let n = 2_000;
    let mut inside = 0;
    for i in 0..n {
        let a = simulate_series(&k, &times, &SeriesConfig::new(1_000).unwrap(), &mut RngStream::new(8, i)).unwrap();
        let b = simulate_series(&k, &times, &SeriesConfig::new(2_000).unwrap(), &mut RngStream::new(8, i)).unwrap();
        if (0..times.len()).all(|j| (a.values[j] - b.values[j]).abs() < a.truncation[j]) {
            inside += 1;
        }
    }
    assert!(inside as f64 >= 0.99 * n as f64, "{inside} of {n}");
}

#[test]
fn marginal_scales_match_kernel_norms() {
    let n = 10_000;
    for (name, t) in [("moving_average", 0.0), ("rotation", 0.3), ("cyclic", 0.3), ("markov_chain", 0.0)] {
        let k = catalog_entry(name, alpha(), QChoice::Default).unwrap().kernel;
        let norm = kernel_norm(&k, t).unwrap().get();
        let mut sim: Vec<f64> = series_at(name, QChoice::Default, &[t], n, 10_000, 9).into_iter().map(|v| v[0].abs()).collect();
        // A large reference sample keeps the oracle's own noise negligible.
        let mut exact: Vec<f64> = cms(1_000_000, norm, 10).into_iter().map(f64::abs).collect();
        sim.sort_by(f64::total_cmp);
        exact.sort_by(f64::total_cmp);
        let (a, b) = (quantile_sorted(&sim, 0.9), quantile_sorted(&exact, 0.9));
        assert!((a / b - 1.0).abs() < 0.05, "{name}: {a} vs {b}");
    }
}

#[test]
fn simulated_law_is_stationary() {
    let n = 6_000;
    // Both times sit where the alternate q has mass; with a q that misses a
    // window the truncated series is not stationary.
    let v = series_at("moving_average", QChoice::Alternate, &[0.0, 2.0], n, 2_000, 11);
    let early: Vec<f64> = v[..n / 2].iter().map(|p| p[0]).collect();
    let late: Vec<f64> = v[n / 2..].iter().map(|p| p[1]).collect();
    let d = ks_statistic(&early, &late);
    assert!(d < ks_critical(n / 2, n / 2, 0.01), "KS {d}");
}

#[test]
fn sub_gaussian_marginal_is_sas() {
    let n = 10_000;
    let cov = Covariance::Exponential { rate: 1.0 };
    let x = replicate(n, &RngStream::new(12, 0), |r| {
        Ok(simulate_substable(alpha(), 2.0, cov, &[0.0, 1.0], r, None)?.values[0])
    })
    .unwrap();
    let d = ks_statistic(&x, &cms(n, 1.0, 13));
    assert!(d < ks_critical(n, n, 0.01), "KS {d}");
}
