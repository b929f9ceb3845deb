use stable_flows::catalog::{catalog_entry, QChoice, CLASSIFIED_NAMES};
use stable_flows::diagnostics::{ergodicity_verdict, gross_criterion, maxima_scaling, ErgodicityConfig};
use stable_flows::simulate::SeriesConfig;
use stable_flows::{FlowClass, RngStream, StabilityIndex};

fn alpha() -> StabilityIndex {
    StabilityIndex::new(1.5).unwrap()
}

fn average_at(seq: &[(f64, f64)], m: f64) -> f64 {
    seq.iter().find(|p| p.0 == m).unwrap().1
}

// For f = 1_[0,1) the scale of X(t) − X(0) is 2 min(t, 1), so the integrand is
// e^{2 − 2t} on [0, 1] and 1 afterwards.
#[test]
fn moving_average_functional_matches_closed_form() {
    let e = catalog_entry("moving_average", alpha(), QChoice::Default).unwrap();
    let (v, seq) = ergodicity_verdict(&e.kernel, &ErgodicityConfig::default()).unwrap();
    let exact = 1.0 + ((2.0f64).exp() - 3.0) / 200.0;
    let got = average_at(&seq, 100.0);
    assert!((got - exact).abs() < 1e-3, "{got} vs {exact}");
    assert!(v.ergodic);
}

// With ‖X(0)‖^α = 1 and ‖X(t) − X(0)‖^α → 2^{α/2}, the integrand
// exp(2‖X(0)‖^α − ‖X(t) − X(0)‖^α) tends to exp(2 − 2^{α/2}).
#[test]
fn sub_gaussian_functional_is_not_ergodic() {
    let e = catalog_entry("sub_gaussian", alpha(), QChoice::Default).unwrap();
    let (v, _) = ergodicity_verdict(&e.kernel, &ErgodicityConfig::default()).unwrap();
    let limit = (2.0 - 2.0f64.powf(0.75)).exp();
    assert!((v.final_average - limit).abs() < 1e-2, "{} vs {limit}", v.final_average);
    assert!(!v.ergodic);
}

// Null flows are ergodic; positive ones are not.
#[test]
fn ergodicity_verdicts_follow_ground_truth() {
    for name in CLASSIFIED_NAMES {
        let e = catalog_entry(name, alpha(), QChoice::Default).unwrap();
        let (v, _) = ergodicity_verdict(&e.kernel, &ErgodicityConfig::default()).unwrap();
        assert_eq!(v.ergodic, e.ground_truth != FlowClass::Positive, "{name}: {v:?}");
        if v.ergodic && *name != "markov_chain_signed" {
            assert!((v.final_average - 1.0).abs() < 0.02, "{name}: {v:?}");
        }
    }
}

#[test]
fn gross_averages_decay_only_for_mixing_kernels() {
    let grid = [1usize, 16, 256, 4096];
    let ma = catalog_entry("moving_average", alpha(), QChoice::Default).unwrap();
    let g = gross_criterion(&ma.kernel, (0.5, 2.0), 0.1, &grid, 20_000, &RngStream::new(5, 0)).unwrap();
    assert!(g.values[3].1 < 1e-2 * g.values[0].1, "{:?}", g.values);
    assert!(g.values.windows(2).all(|w| w[1].1 <= w[0].1));

    let rot = catalog_entry("rotation", alpha(), QChoice::Default).unwrap();
    let g = gross_criterion(&rot.kernel, (0.5, 2.0), 0.1, &grid, 20_000, &RngStream::new(5, 1)).unwrap();
    let first = g.values[0].1;
    assert!(g.values.iter().all(|v| v.1 >= 0.99 * first), "{:?}", g.values);
}

#[test]
fn gross_rejects_bad_inputs() {
    let ma = catalog_entry("moving_average", alpha(), QChoice::Default).unwrap();
    let r = RngStream::new(1, 0);
    assert!(gross_criterion(&ma.kernel, (0.0, 1.0), 0.1, &[1], 10, &r).is_err());
    assert!(gross_criterion(&ma.kernel, (0.5, 1.0), 0.1, &[0], 10, &r).is_err());
    assert!(gross_criterion(&ma.kernel, (0.5, 1.0), 0.0, &[1], 10, &r).is_err());
}

#[test]
fn maxima_stable_for_moving_average_and_decaying_for_walk() {
    let cfg = SeriesConfig::new(10_000).unwrap();
    let grid = [1usize << 10, 1 << 13, 1 << 16];
    let ma = catalog_entry("moving_average", alpha(), QChoice::Broad).unwrap();
    let t = maxima_scaling(&ma.kernel, None, &grid, 200, &cfg, &RngStream::new(9, 0)).unwrap();
    let ratio = t.rows[2].median / t.rows[0].median;
    assert!((0.8..=1.25).contains(&ratio), "{ratio}");

    let mc = catalog_entry("markov_chain", alpha(), QChoice::Broad).unwrap();
    let t = maxima_scaling(&mc.kernel, None, &grid, 40, &cfg, &RngStream::new(9, 1)).unwrap();
    assert!(t.rows[2].median < 0.6 * t.rows[0].median, "{:?}", t.rows);
    assert!(t.rows.iter().all(|r| r.q25 <= r.median && r.median <= r.q75));
}
