use proptest::prelude::*;
use stable_flows::catalog::{catalog_entry, QChoice, CATALOG_NAMES};
use stable_flows::kernels::Integrator;
use stable_flows::{kernel_norm, scale_of_combination, StabilityIndex, TimeDomain};

fn alpha() -> StabilityIndex {
    StabilityIndex::new(1.5).unwrap()
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Finite-dimensional scales are shift invariant: the process is stationary.
    #[test]
    fn scales_are_shift_invariant(
        which in 0..CATALOG_NAMES.len(),
        cs in prop::collection::vec(-3.0f64..3.0, 1..4),
        ts in prop::collection::vec(-20i32..20, 3),
        h in -30i32..30,
    ) {
        let k = catalog_entry(CATALOG_NAMES[which], alpha(), QChoice::Default).unwrap().kernel;
        let unit = match k.time_domain {
            TimeDomain::Discrete => 1.0,
            TimeDomain::Continuous => 0.5,
        };
        let coeffs: Vec<(f64, f64)> = cs.iter().zip(&ts).map(|(&c, &t)| (c, t as f64 * unit)).collect();
        let shifted: Vec<(f64, f64)> = coeffs.iter().map(|&(c, t)| (c, t + h as f64 * unit)).collect();
        let a = scale_of_combination(&k, &coeffs).unwrap().get();
        let b = scale_of_combination(&k, &shifted).unwrap().get();
        let tol = match k.integrator {
            Integrator::Deterministic { .. } | Integrator::GaussianLinear { .. } | Integrator::Empirical { .. } => 1e-6,
            _ => 1e-3,
        };
        prop_assert!(relative(a, b) < tol, "{}: {} vs {}", CATALOG_NAMES[which], a, b);
    }

    #[test]
    fn scales_are_absolutely_homogeneous(
        which in 0..CATALOG_NAMES.len(),
        cs in prop::collection::vec(-3.0f64..3.0, 1..3),
        c in prop_oneof![-50.0f64..-0.01, 0.01f64..50.0],
    ) {
        let k = catalog_entry(CATALOG_NAMES[which], alpha(), QChoice::Default).unwrap().kernel;
        let coeffs: Vec<(f64, f64)> = cs.iter().enumerate().map(|(i, &x)| (x, 2.0 * i as f64)).collect();
        let scaled: Vec<(f64, f64)> = coeffs.iter().map(|&(x, t)| (c * x, t)).collect();
        let a = scale_of_combination(&k, &coeffs).unwrap().get();
        let b = scale_of_combination(&k, &scaled).unwrap().get();
        prop_assert!(relative(c.abs() * a, b) < 1e-9, "{}: {} vs {}", CATALOG_NAMES[which], c.abs() * a, b);
    }
}

#[test]
fn norms_do_not_depend_on_time() {
    for name in CATALOG_NAMES {
        let k = catalog_entry(name, alpha(), QChoice::Default).unwrap().kernel;
        let n0 = kernel_norm(&k, 0.0).unwrap().get();
        for t in [1.0, 7.0, 123.0] {
            let nt = kernel_norm(&k, t).unwrap().get();
            assert!(relative(n0, nt) < 1e-3, "{name} at {t}: {n0} vs {nt}");
        }
    }
}
