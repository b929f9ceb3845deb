use proptest::prelude::*;
use stable_flows::catalog::{catalog_entry, QChoice, CATALOG_NAMES};
use stable_flows::flows::check_flow_axioms;
use stable_flows::{eval_kernel, RngStream, StabilityIndex, TimeDomain};

fn alpha() -> StabilityIndex {
    StabilityIndex::new(1.5).unwrap()
}

#[test]
fn axioms_hold_for_every_shipped_flow() {
    for (i, name) in CATALOG_NAMES.iter().enumerate() {
        let k = catalog_entry(name, alpha(), QChoice::Default).unwrap().kernel;
        let rep = check_flow_axioms(k.flow.as_ref(), Some(k.cocycle.as_ref()), 10_000, &mut RngStream::new(77, i as u64));
        assert!(rep.max_residual() < 1e-10, "{name}: {rep:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// `f_{t+s}(x) = a_s(x) rn(s, x)^{1/α} f_t(φ_s x)`.
    #[test]
    fn kernel_composes_along_orbits(which in 0..CATALOG_NAMES.len(), seed in any::<u64>(), t in -40i32..40, s in -40i32..40) {
        let name = CATALOG_NAMES[which];
        let k = catalog_entry(name, alpha(), QChoice::Default).unwrap().kernel;
        let mut rng = RngStream::new(seed, 0);
        let x = k.space.sample(&mut rng);
        let scale = match k.time_domain {
            TimeDomain::Discrete => 1.0,
            TimeDomain::Continuous => 0.25,
        };
        let (t, s) = (t as f64 * scale, s as f64 * scale);
        let lhs = eval_kernel(&k, t + s, &x).unwrap();
        let xs = k.flow.apply(s, &x);
        let rhs = k.cocycle.eval(s, &x).unwrap()
            * k.flow.rn_derivative(s, &x).powf(k.alpha.inv())
            * eval_kernel(&k, t, &xs).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0), "{}: {} vs {}", name, lhs, rhs);
    }
}
