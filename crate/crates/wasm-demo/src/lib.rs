//! Browser bindings: classify a catalog entry, simulate one path, and trace
//! the ergodicity functional. Every function returns a JSON string.

use serde_json::{json, Value};
use stable_flows::catalog::{catalog_entry, CatalogEntry, QChoice, CLASSIFIED_NAMES};
use stable_flows::classify::{classify_process, ClassifyConfig};
use stable_flows::diagnostics::{ergodicity_verdict, ErgodicityConfig};
use stable_flows::simulate::{simulate_series, SeriesConfig};
use stable_flows::{RngStream, StabilityIndex, TimeDomain};
use wasm_bindgen::prelude::*;

fn entry(name: &str, alpha: f64) -> Result<CatalogEntry, String> {
    let a = StabilityIndex::new(alpha).map_err(|e| e.to_string())?;
    catalog_entry(name, a, QChoice::Default).map_err(|e| e.to_string())
}

fn respond(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

/// Names of the entries with a single ground-truth class.
#[wasm_bindgen]
pub fn catalog_names() -> String {
    json!(CLASSIFIED_NAMES).to_string()
}

/// Fractions of `points` sampled points per class, and the majority.
#[wasm_bindgen]
pub fn classify(name: &str, alpha: f64, points: usize, seed: u64) -> String {
    respond((|| {
        let e = entry(name, alpha)?;
        let cfg = ClassifyConfig::default();
        let r = classify_process(&e.kernel, points.clamp(1, 500), &cfg, &RngStream::new(seed, 1))
            .map_err(|e| e.to_string())?;
        let (class, share) = r.majority();
        Ok(json!({
            "name": e.name,
            "ground_truth": e.ground_truth,
            "majority": class,
            "share": share,
            "fractions": r.fractions,
            "off_support": r.off_support_fraction,
        }))
    })())
}

/// One path on `0, step, …, (n − 1) step` (integer steps in discrete time).
#[wasm_bindgen]
pub fn simulate(name: &str, alpha: f64, n: usize, n_terms: usize, seed: u64) -> String {
    respond((|| {
        let e = entry(name, alpha)?;
        let step = if e.kernel.time_domain == TimeDomain::Discrete { 1.0 } else { 0.25 };
        let times: Vec<f64> = (0..n.clamp(2, 4000)).map(|i| i as f64 * step).collect();
        let mut rng = RngStream::new(seed, 2);
        let path = match &e.direct {
            Some(d) => d.simulate(e.kernel.alpha, &times, &mut rng),
            None => {
                let cfg = SeriesConfig::new(n_terms.max(100)).map_err(|e| e.to_string())?;
                simulate_series(&e.kernel, &times, &cfg, &mut rng)
            }
        }
        .map_err(|e| e.to_string())?;
        Ok(json!({ "name": e.name, "times": path.times, "values": path.values }))
    })())
}

/// Cesàro averages of the ergodicity functional up to `m_max`.
#[wasm_bindgen]
pub fn ergodicity(name: &str, alpha: f64, m_max: f64) -> String {
    respond((|| {
        let e = entry(name, alpha)?;
        let cfg = ErgodicityConfig {
            m_max: m_max.clamp(2.0, 1.0e4),
            m_max_discrete: m_max.clamp(2.0, 65536.0) as usize,
            ..ErgodicityConfig::default()
        };
        let (v, seq) = ergodicity_verdict(&e.kernel, &cfg).map_err(|e| e.to_string())?;
        Ok(json!({ "name": e.name, "verdict": v, "sequence": seq }))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bindings_return_json() {
        let v: Value = serde_json::from_str(&classify("moving_average", 1.5, 10, 1)).unwrap();
        assert_eq!(v["majority"], "dissipative");
        let v: Value = serde_json::from_str(&simulate("sub_gaussian", 1.5, 50, 100, 1)).unwrap();
        assert_eq!(v["values"].as_array().unwrap().len(), 50);
        let v: Value = serde_json::from_str(&ergodicity("rotation", 1.5, 100.0)).unwrap();
        assert_eq!(v["verdict"]["ergodic"], false);
        let v: Value = serde_json::from_str(&classify("nope", 1.5, 10, 1)).unwrap();
        assert!(v["error"].is_string());
    }
}
