//! The specialised series samplers reproduce the exact finite-dimensional
//! laws: empirical characteristic functions of two-time combinations are
//! compared with `exp(-σ^α)` where `σ` comes from the kernel norms. The
//! series tail has variance of order `N^{1-2/α}`, so the check runs at
//! α = 0.8 where a few hundred terms leave a negligible tail, with the
//! heavy-tailed alternate `q` so that `dm/dq` grows only polynomially.

use stable_flows::catalog::{catalog_entry, QChoice};
use stable_flows::simulate::{simulate_series, SeriesConfig};
use stable_flows::{scale_of_combination, RngStream, StabilityIndex};

const ALPHA: f64 = 0.8;

fn check_chf(name: &str, paths: usize, n_terms: usize) {
    let alpha = StabilityIndex::new(ALPHA).unwrap();
    let entry = catalog_entry(name, alpha, QChoice::Alternate).unwrap();
    let times = [1.0, 2.0, 3.0, 4.0, 5.0];
    let combos: [[(f64, usize); 2]; 3] = [[(1.0, 0), (-1.0, 3)], [(0.7, 1), (0.7, 4)], [(1.0, 2), (0.0, 0)]];
    let cfg = SeriesConfig::new(n_terms).unwrap();
    let root = RngStream::new(2024, 0);
    let samples: Vec<Vec<f64>> = (0..paths)
        .map(|i| simulate_series(&entry.kernel, &times, &cfg, &mut root.substream(i as u64)).unwrap().values)
        .collect();
    for combo in combos {
        let coeffs: Vec<(f64, f64)> = combo.iter().map(|&(c, k)| (c, times[k])).collect();
        let sigma = scale_of_combination(&entry.kernel, &coeffs).unwrap().get();
        let exact = (-sigma.powf(ALPHA)).exp();
        let vals: Vec<f64> = samples.iter().map(|v| combo.iter().map(|&(c, k)| c * v[k]).sum::<f64>().cos()).collect();
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        assert!(
            (mean - exact).abs() < 4.0 * se + 0.01,
            "{name} {combo:?}: empirical {mean:.4} vs exact {exact:.4} (se {se:.4})"
        );
    }
}

#[test]
fn unsigned_walk_hits() {
    check_chf("markov_chain", 4000, 400);
}

#[test]
fn signed_walk_chunks() {
    check_chf("markov_chain_signed", 4000, 400);
}

#[test]
fn brownian_first_passage() {
    check_chf("brownian_increments", 4000, 400);
}

#[test]
fn drifted_brownian_first_passage() {
    check_chf("drifted_brownian_increments", 4000, 400);
}

#[test]
fn fresh_fbm_paths() {
    check_chf("fbm_increments", 4000, 400);
}

#[test]
fn translation_windows() {
    check_chf("mixed_moving_average", 4000, 400);
}
