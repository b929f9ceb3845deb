//! Ergodicity and extreme-value diagnostics.
//!
//! * [`ergodicity_functional`]: Cesàro averages of
//!   `exp{2‖X(0)‖^α − ‖X(t) − X(0)‖^α}` from exact scale norms.
//! * [`gross_criterion`]: Cesàro averages of `m(|f_0|^α ∈ K, |f_j|^α > ε)`.
//! * [`maxima_scaling`]: quantiles of `n^{-1/α} max_{j ≤ n} |X_j|` over
//!   simulated paths.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::flows::TimeDomain;
use crate::kernels::KernelSpec;
use crate::quadrature::cumulative_trapezoid;
use crate::rng::RngStream;
use crate::simulate::{simulate_series, DirectSimulator, SeriesConfig};
use crate::stats::quantile_sorted;

/// Quadrature grid of the continuous-time functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ErgodicityConfig {
    /// Uniform step on `[0, 1]`.
    pub fine_step: f64,
    /// Ratio of the geometric grid beyond `t = 1`.
    pub ratio: f64,
    /// Largest `M` used for the verdict.
    pub m_max: f64,
    /// Largest `M` in discrete time.
    pub m_max_discrete: usize,
}

impl Default for ErgodicityConfig {
    fn default() -> Self {
        Self { fine_step: 0.01, ratio: 1.01, m_max: 1.0e4, m_max_discrete: 1 << 16 }
    }
}

impl ErgodicityConfig {
    fn validate(&self) -> Result<()> {
        if !(self.fine_step > 0.0 && self.fine_step <= 1.0 && self.ratio > 1.0 && self.m_max > 0.0) {
            return Err(invalid("ergodicity", "need 0 < fine_step ≤ 1, ratio > 1, m_max > 0"));
        }
        if self.m_max_discrete == 0 {
            return Err(invalid("m_max_discrete", "must be positive"));
        }
        Ok(())
    }
}

fn integrand(kernel: &KernelSpec, norm0: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(norm0.mul_add(2.0, 0.0).exp());
    }
    let d = kernel.integral_abs_alpha(&[(1.0, t), (-1.0, 0.0)])?;
    Ok((2.0 * norm0 - d).exp())
}

/// `(M, (1/M)∫_0^M g)` for each `M` in `m_grid` (continuous time) or
/// `(M, (1/M)Σ_{j<M} g(j))` (discrete time).
pub fn ergodicity_functional(kernel: &KernelSpec, m_grid: &[f64], cfg: &ErgodicityConfig) -> Result<Vec<(f64, f64)>> {
    cfg.validate()?;
    if m_grid.iter().any(|m| !(*m > 0.0 && m.is_finite())) {
        return Err(invalid("m_grid", "entries must be positive"));
    }
    let norm0 = kernel.integral_abs_alpha(&[(1.0, 0.0)])?;
    let m_top = m_grid.iter().copied().fold(0.0, f64::max);
    match kernel.time_domain {
        TimeDomain::Discrete => {
            let n = m_top.round() as usize;
            let g: Vec<f64> =
                (0..n).into_par_iter().map(|j| integrand(kernel, norm0, j as f64)).collect::<Result<_>>()?;
            let mut cum = Vec::with_capacity(n + 1);
            let mut acc = 0.0;
            cum.push(0.0);
            for v in &g {
                acc += v;
                cum.push(acc);
            }
            Ok(m_grid
                .iter()
                .map(|&m| {
                    let k = (m.round() as usize).clamp(1, n);
                    (m, cum[k] / k as f64)
                })
                .collect())
        }
        TimeDomain::Continuous => {
            let mut nodes: Vec<f64> = Vec::new();
            let fine = (1.0 / cfg.fine_step).round() as usize;
            for k in 0..=fine {
                nodes.push((k as f64 * cfg.fine_step).min(m_top));
            }
            let mut t = 1.0;
            while t < m_top {
                t *= cfg.ratio;
                nodes.push(t.min(m_top));
            }
            nodes.extend(m_grid.iter().copied());
            nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
            nodes.dedup();
            let g: Vec<f64> =
                nodes.par_iter().map(|&t| integrand(kernel, norm0, t)).collect::<Result<_>>()?;
            let cum = cumulative_trapezoid(&nodes, &g);
            Ok(m_grid
                .iter()
                .map(|&m| {
                    let i = nodes.partition_point(|&x| x < m);
                    (m, cum[i] / m)
                })
                .collect())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErgodicityVerdict {
    pub m_max: f64,
    pub final_average: f64,
    /// `|avg(M) − avg(3M/4)|`.
    pub drift: f64,
    pub ergodic: bool,
    /// Distance of the final average from 1.
    pub margin: f64,
}

/// Final-average tolerance around 1 for an ergodic verdict.
pub const ERGODIC_TOLERANCE: f64 = 0.05;
/// Largest drift over the last quarter for an ergodic verdict.
pub const ERGODIC_DRIFT: f64 = 0.01;

/// Ergodicity verdict at the configured `M_max`, along with the averages on
/// a logarithmic `M` grid.
pub fn ergodicity_verdict(kernel: &KernelSpec, cfg: &ErgodicityConfig) -> Result<(ErgodicityVerdict, Vec<(f64, f64)>)> {
    let m_max = match kernel.time_domain {
        TimeDomain::Discrete => cfg.m_max_discrete as f64,
        TimeDomain::Continuous => cfg.m_max,
    };
    let mut grid: Vec<f64> = Vec::new();
    let mut m = 1.0;
    while m < m_max {
        grid.push(m);
        m *= 2.0;
    }
    grid.extend([100.0f64.min(m_max), 0.75 * m_max, m_max]);
    if kernel.time_domain == TimeDomain::Discrete {
        grid.iter_mut().for_each(|m| *m = m.round().max(1.0));
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    let seq = ergodicity_functional(kernel, &grid, cfg)?;
    let at = |m: f64| seq.iter().find(|(x, _)| (*x - m).abs() < 1e-9).map(|p| p.1).unwrap();
    let q = if kernel.time_domain == TimeDomain::Discrete { (0.75 * m_max).round() } else { 0.75 * m_max };
    let final_average = at(m_max);
    let drift = (final_average - at(q)).abs();
    let margin = (final_average - 1.0).abs();
    let ergodic = margin <= ERGODIC_TOLERANCE && drift < ERGODIC_DRIFT;
    Ok((ErgodicityVerdict { m_max, final_average, drift, ergodic, margin }, seq))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrossResult {
    /// Estimate of `m(|f_0|^α ∈ K)`.
    pub conditioning_mass: f64,
    pub accepted: usize,
    pub samples: usize,
    /// `(n, (1/n) Σ_{j<n} m(|f_0|^α ∈ K, |f_j|^α > ε))`.
    pub values: Vec<(usize, f64)>,
}

/// Importance-sampling estimate of the Cesàro averages of
/// `m(|f_0|^α ∈ K, |f_j|^α > ε)` at integer `j`.
pub fn gross_criterion(
    kernel: &KernelSpec,
    k: (f64, f64),
    eps: f64,
    n_grid: &[usize],
    samples: usize,
    rng: &RngStream,
) -> Result<GrossResult> {
    if !(k.0 > 0.0 && k.1 >= k.0 && k.1.is_finite()) {
        return Err(invalid("K", "need 0 < inf K ≤ sup K < ∞"));
    }
    if !(eps > 0.0) || samples == 0 || n_grid.contains(&0) {
        return Err(invalid("gross", "need eps > 0, samples > 0, n ≥ 1"));
    }
    let n_max = n_grid.iter().copied().max().unwrap_or(1);
    let times: Vec<f64> = (0..n_max).map(|j| j as f64).collect();
    // Per sample: dm/dq weight and first-n hit counts, or nothing if rejected.
    let rows: Vec<Option<(f64, Vec<u32>)>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut r = rng.substream(i as u64);
            let x = kernel.space.sample(&mut r);
            let f0 = kernel.orbit_abs_alpha(&x, &[0.0])?[0];
            if !(f0 >= k.0 && f0 <= k.1) {
                return Ok(None);
            }
            let w = kernel.space.density_dm_dq(&x);
            let v = kernel.orbit_abs_alpha(&x, &times)?;
            let mut counts = Vec::with_capacity(n_grid.len());
            for &n in n_grid {
                counts.push(v[..n].iter().filter(|&&u| u > eps).count() as u32);
            }
            Ok(Some((w, counts)))
        })
        .collect::<Result<_>>()?;
    let acc: Vec<&(f64, Vec<u32>)> = rows.iter().flatten().collect();
    if acc.is_empty() {
        return Err(Error::EmptyConditioningSet);
    }
    let s = samples as f64;
    let conditioning_mass = acc.iter().map(|(w, _)| w).sum::<f64>() / s;
    let values = n_grid
        .iter()
        .enumerate()
        .map(|(gi, &n)| {
            let v: f64 = acc.iter().map(|(w, c)| w * c[gi] as f64).sum::<f64>() / (s * n as f64);
            (n, v)
        })
        .collect();
    Ok(GrossResult { conditioning_mass, accepted: acc.len(), samples, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaximaVerdict {
    Decaying,
    Stable,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaximaRow {
    pub n: usize,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximaTable {
    pub rows: Vec<MaximaRow>,
    /// Least-squares slope of `ln median` against `ln n`.
    pub slope: f64,
    pub verdict: MaximaVerdict,
    pub replications: usize,
}

/// Slope below which maxima are called decaying.
pub const DECAY_SLOPE: f64 = -0.1;
/// Largest `|slope|` for stable maxima.
pub const STABLE_SLOPE: f64 = 0.05;

/// `n^{-1/α} max_{1 ≤ j ≤ n} |X_j|` over `replications` independent paths on
/// the integer grid `1..=max(n_grid)`. `direct` replaces the series when set.
pub fn maxima_scaling(
    kernel: &KernelSpec,
    direct: Option<&DirectSimulator>,
    n_grid: &[usize],
    replications: usize,
    cfg: &SeriesConfig,
    rng: &RngStream,
) -> Result<MaximaTable> {
    if n_grid.is_empty() || n_grid.contains(&0) || replications == 0 {
        return Err(invalid("maxima", "need a nonempty grid of positive n and replications > 0"));
    }
    let n_max = *n_grid.iter().max().unwrap();
    let times: Vec<f64> = (1..=n_max).map(|j| j as f64).collect();
    let inv = kernel.alpha.inv();
    let per_rep: Vec<Vec<f64>> = (0..replications)
        .into_par_iter()
        .map(|i| {
            let mut r = rng.substream(i as u64);
            let path = match direct {
                Some(d) => d.simulate(kernel.alpha, &times, &mut r)?,
                None => simulate_series(kernel, &times, cfg, &mut r)?,
            };
            let mut run = Vec::with_capacity(n_max);
            let mut m = 0.0f64;
            for v in &path.values {
                m = m.max(v.abs());
                run.push(m);
            }
            Ok(n_grid.iter().map(|&n| run[n - 1] * (n as f64).powf(-inv)).collect())
        })
        .collect::<Result<_>>()?;
    let rows: Vec<MaximaRow> = n_grid
        .iter()
        .enumerate()
        .map(|(gi, &n)| {
            let mut col: Vec<f64> = per_rep.iter().map(|r| r[gi]).collect();
            col.sort_by(|a, b| a.partial_cmp(b).unwrap());
            MaximaRow { n, median: quantile_sorted(&col, 0.5), q25: quantile_sorted(&col, 0.25), q75: quantile_sorted(&col, 0.75) }
        })
        .collect();
    let slope = log_slope(&rows);
    let verdict = if slope < DECAY_SLOPE {
        MaximaVerdict::Decaying
    } else if slope.abs() < STABLE_SLOPE {
        MaximaVerdict::Stable
    } else {
        MaximaVerdict::Indeterminate
    };
    Ok(MaximaTable { rows, slope, verdict, replications })
}

fn log_slope(rows: &[MaximaRow]) -> f64 {
    let pts: Vec<(f64, f64)> =
        rows.iter().filter(|r| r.median > 0.0).map(|r| ((r.n as f64).ln(), r.median.ln())).collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// All diagnostics for one kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub ergodicity_cesaro: Vec<(f64, f64)>,
    pub ergodicity: ErgodicityVerdict,
    pub gross: Option<GrossResult>,
    pub maxima: Option<MaximaTable>,
}

impl DiagnosticsReport {
    /// The signature of a conservative null flow: ergodic with decaying maxima.
    pub fn conservative_null_signature(&self) -> Option<bool> {
        self.maxima.as_ref().map(|m| self.ergodicity.ergodic && m.verdict == MaximaVerdict::Decaying)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog_entry, QChoice};
    use crate::stable::StabilityIndex;

    fn entry(name: &str) -> KernelSpec {
        catalog_entry(name, StabilityIndex::new(1.5).unwrap(), QChoice::Default).unwrap().kernel
    }

    #[test]
    fn moving_average_average_at_100() {
        let k = entry("moving_average");
        let v = ergodicity_functional(&k, &[100.0], &ErgodicityConfig::default()).unwrap();
        let want = 1.0 + (std::f64::consts::E.powi(2) - 3.0) / 200.0;
        assert!((v[0].1 - want).abs() < 1e-3, "{} vs {want}", v[0].1);
    }

    #[test]
    fn constant_atom_is_not_ergodic() {
        let k = entry("constant_atom");
        let v = ergodicity_functional(&k, &[10.0], &ErgodicityConfig::default()).unwrap();
        assert!((v[0].1 - 2f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn gross_values_bounded_by_conditioning_mass() {
        let k = entry("moving_average");
        let g = gross_criterion(&k, (0.5, 2.0), 0.1, &[1, 4, 64], 4000, &RngStream::new(3, 0)).unwrap();
        for (_, v) in &g.values {
            assert!(*v >= 0.0 && *v <= g.conditioning_mass + 1e-12);
        }
        assert!((g.values[2].1 - g.conditioning_mass / 64.0).abs() < 1e-12);
    }

    #[test]
    fn empty_conditioning_set_is_an_error() {
        let k = entry("moving_average");
        let r = gross_criterion(&k, (5.0, 6.0), 0.1, &[1], 100, &RngStream::new(3, 0));
        assert_eq!(r, Err(Error::EmptyConditioningSet));
    }

    #[test]
    fn slope_of_power_law() {
        let rows: Vec<MaximaRow> = [16usize, 64, 256]
            .iter()
            .map(|&n| MaximaRow { n, median: (n as f64).powf(-0.5), q25: 0.0, q75: 0.0 })
            .collect();
        assert!((log_slope(&rows) + 0.5).abs() < 1e-12);
    }
}
