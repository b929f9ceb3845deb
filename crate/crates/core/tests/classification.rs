use stable_flows::catalog::{catalog_entry, QChoice, CLASSIFIED_NAMES};
use stable_flows::classify::{
    classify_points, classify_process, decompose, CdVerdict, ClassificationReport, ClassifyConfig, PnVerdict,
};
use stable_flows::{kernel_norm, RngStream, StabilityIndex};

fn alpha() -> StabilityIndex {
    StabilityIndex::new(1.5).unwrap()
}

fn report(name: &str, q: QChoice, n: usize) -> ClassificationReport {
    let k = catalog_entry(name, alpha(), q).unwrap().kernel;
    classify_process(&k, n, &ClassifyConfig::default(), &RngStream::new(31, 0)).unwrap()
}

const CHEAP: [&str; 6] =
    ["moving_average", "rotation", "cyclic", "markov_chain", "drifted_brownian_increments", "sub_gaussian"];

#[test]
fn partial_sums_are_monotone_and_dissipative_implies_null() {
    for name in CHEAP {
        let r = report(name, QChoice::Default, 24);
        for p in &r.per_point {
            let ps = &p.partial_sums;
            assert!(ps.unweighted.windows(2).all(|w| w[0] <= w[1]), "{name}: {:?}", ps.unweighted);
            for s in &ps.weighted {
                assert!(s.windows(2).all(|w| w[0] <= w[1]), "{name}: {s:?}");
            }
            if p.cons_diss == CdVerdict::Dissipative {
                assert_eq!(p.positive_null, PnVerdict::Null, "{name}");
            }
        }
    }
}

#[test]
fn verdicts_survive_scaling_of_f() {
    for name in ["moving_average", "rotation", "markov_chain"] {
        let base = catalog_entry(name, alpha(), QChoice::Default).unwrap().kernel;
        let r = classify_process(&base, 24, &ClassifyConfig::default(), &RngStream::new(5, 0)).unwrap();
        let points: Vec<_> = r.per_point.iter().map(|p| p.point).collect();
        for c in [0.1, 10.0] {
            let mut k = base.clone();
            k.amplitude *= c;
            let s = classify_points(&k, &points, &ClassifyConfig::default()).unwrap();
            for (a, b) in r.per_point.iter().zip(&s.per_point) {
                assert_eq!((a.positive_null, a.cons_diss), (b.positive_null, b.cons_diss), "{name} c={c}");
            }
        }
    }
}

#[test]
fn verdicts_do_not_depend_on_q() {
    for name in CLASSIFIED_NAMES.iter().filter(|n| !n.starts_with("fbm")) {
        let a = catalog_entry(name, alpha(), QChoice::Default).unwrap().kernel;
        let b = catalog_entry(name, alpha(), QChoice::Alternate).unwrap().kernel;
        let r = classify_process(&a, 16, &ClassifyConfig::default(), &RngStream::new(6, 0)).unwrap();
        let points: Vec<_> = r.per_point.iter().map(|p| p.point).collect();
        let s = classify_points(&b, &points, &ClassifyConfig::default()).unwrap();
        for (x, y) in r.per_point.iter().zip(&s.per_point) {
            assert_eq!((x.positive_null, x.cons_diss), (y.positive_null, y.cons_diss), "{name}");
        }
    }
}

#[test]
fn cheap_entries_match_ground_truth() {
    for name in CHEAP {
        let entry = catalog_entry(name, alpha(), QChoice::Default).unwrap();
        let r = report(name, QChoice::Default, 100);
        let (class, share) = r.majority();
        assert_eq!(class, entry.ground_truth, "{name}");
        assert!(share >= 0.9, "{name}: {share}");
    }
}

#[test]
fn mixture_splits_evenly() {
    for q in [QChoice::Default, QChoice::Alternate] {
        let entry = catalog_entry("rotation_translation_mixture", alpha(), q).unwrap();
        let r = classify_process(&entry.kernel, 1_000, &ClassifyConfig::default(), &RngStream::new(8, 0)).unwrap();
        let d = decompose(&entry.kernel, &r).unwrap();
        let total: f64 = d.norms_alpha.iter().sum::<f64>() + d.unassigned_alpha;
        assert!((total - 2.0).abs() < 1e-9, "{total}");
        let [dis, cn, pos] = d.norms_alpha;
        assert!((pos / total - 0.5).abs() < 0.1 && (dis / total - 0.5).abs() < 0.1, "{:?}", d.norms_alpha);
        assert!(cn.abs() < 1e-12);
        assert!((pos.powf(1.0 / 1.5) - 1.0).abs() < 0.05 && (dis.powf(1.0 / 1.5) - 1.0).abs() < 0.05, "{:?}", d.norms_alpha);
        let part = kernel_norm(&d.positive, 0.0).unwrap().get();
        assert!((part.powf(1.5) - pos).abs() < 1e-9 * pos.max(1.0), "{part} vs {pos}");
    }
}
