//! Positive/null and conservative/dissipative verdicts from weighted
//! occupation sums `S_H(x) = ∫_{|t|≤H} w(t) |f_t(x)|^α λ(dt)`.
//!
//! Weights are nonincreasing in `|t|` on both half-lines with divergent
//! integrals. A point is null when some weight's sum has stopped growing by
//! the largest horizon, positive when every weight's sum keeps growing in
//! proportion to the weight mass over the last doublings. The unweighted
//! sum (`w ≡ 1`) decides conservative versus dissipative the same way.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::flows::{FlowClass, Point, TimeDomain};
use crate::kernels::{Integrator, KernelSpec};
use crate::rng::RngStream;
use crate::spaces::EmpiricalSpace;

/// Shipped weight functions, all functions of `|t|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WeightFunction {
    /// `(1 + |t|)^{-p}`, `0 < p ≤ 1`.
    Power { p: f64 },
    /// `1 / ((1 + |t|) ln(e + |t|))`.
    Log,
    /// `w ≡ 1`, the Hopf statistic.
    Unit,
}

impl WeightFunction {
    pub fn eval(&self, t: f64) -> f64 {
        let a = t.abs();
        match *self {
            WeightFunction::Power { p } => (1.0 + a).powf(-p),
            WeightFunction::Log => 1.0 / ((1.0 + a) * (std::f64::consts::E + a).ln()),
            WeightFunction::Unit => 1.0,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            WeightFunction::Power { p } => format!("w_{p}"),
            WeightFunction::Log => "w_log".into(),
            WeightFunction::Unit => "w_1".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightFunction::Power { p } if !(p > 0.0 && p <= 1.0) => {
                Err(invalid("weights", format!("power {p} outside (0, 1]: integral would converge")))
            }
            _ => Ok(()),
        }
    }

    /// `w_{1/2}, w_{3/4}, w_1, w_log`.
    pub fn shipped() -> Vec<WeightFunction> {
        vec![
            WeightFunction::Power { p: 0.5 },
            WeightFunction::Power { p: 0.75 },
            WeightFunction::Power { p: 1.0 },
            WeightFunction::Log,
        ]
    }
}

/// Thresholds and horizons of the classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifyConfig {
    pub weights: Vec<WeightFunction>,
    /// Largest horizon for continuous time.
    pub h_max_continuous: f64,
    /// Largest horizon for discrete time.
    pub h_max_discrete: f64,
    /// Trapezoid step for continuous time.
    pub time_step: f64,
    /// Number of dyadic horizons `H_max / 2^k` recorded per point.
    pub n_horizons: usize,
    /// Null: `S_{H} - S_{H/2} < eps_conv · S_H` for some weight.
    pub eps_conv: f64,
    /// Positive: `ΔS ≥ eps_div · S · ΔW / W` over each tail doubling, i.e.
    /// the sum grows at least this fraction as fast as the weight mass.
    pub eps_div: f64,
    /// Conservative: `S_{H_max} − S_{lo} ≥ eps_hopf · S_{H_max}` for the
    /// unweighted sum over the Hopf window.
    pub eps_hopf: f64,
    /// Doublings checked by the positive test.
    pub tail_doublings: usize,
    /// Doublings spanned by the conservative/dissipative window.
    pub hopf_doublings: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            weights: WeightFunction::shipped(),
            h_max_continuous: 1.0e4,
            h_max_discrete: 262144.0,
            time_step: 0.05,
            n_horizons: 12,
            eps_conv: 6e-3,
            eps_div: 0.25,
            eps_hopf: 1e-2,
            tail_doublings: 4,
            hopf_doublings: 9,
        }
    }
}

impl ClassifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.weights.is_empty() {
            return Err(invalid("weights", "at least one weight is required"));
        }
        for w in &self.weights {
            w.validate()?;
        }
        if !(self.h_max_continuous > 0.0 && self.h_max_discrete >= 1.0 && self.time_step > 0.0) {
            return Err(invalid("h_max", "horizons and step must be positive"));
        }
        if !(self.eps_conv > 0.0 && self.eps_div > 0.0 && self.eps_hopf >= self.eps_conv) {
            return Err(invalid("eps", "thresholds must be positive with eps_hopf ≥ eps_conv"));
        }
        let need = self.tail_doublings.max(self.hopf_doublings).max(1) + 1;
        if self.n_horizons < need {
            return Err(invalid("n_horizons", format!("need at least {need} dyadic horizons")));
        }
        Ok(())
    }

    /// Increasing dyadic horizons ending at `H_max` for `domain`.
    pub fn horizons(&self, domain: TimeDomain) -> Vec<f64> {
        let (h, step) = self.grid(domain);
        let mut out: Vec<f64> = (0..self.n_horizons)
            .rev()
            .map(|k| {
                let n = (h / 2f64.powi(k as i32) / step).round().max(1.0);
                n * step
            })
            .collect();
        out.dedup();
        out
    }

    fn grid(&self, domain: TimeDomain) -> (f64, f64) {
        match domain {
            TimeDomain::Discrete => (self.h_max_discrete.round(), 1.0),
            TimeDomain::Continuous => (self.h_max_continuous, self.time_step),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PnVerdict {
    Positive,
    Null,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CdVerdict {
    Conservative,
    Dissipative,
    Undecided,
}

/// Partial sums of one point at the recorded horizons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialSums {
    pub horizons: Vec<f64>,
    /// `weighted[i][k]`: weight `i` at horizon `k`.
    pub weighted: Vec<Vec<f64>>,
    pub unweighted: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointVerdict {
    pub index: usize,
    pub point: Point,
    pub positive_null: PnVerdict,
    pub cons_diss: CdVerdict,
    /// `f_t(x) = 0` for every grid time up to `H_max`.
    pub off_support: bool,
    pub partial_sums: PartialSums,
}

/// Fractions with their binomial 95% half-widths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fraction {
    pub value: f64,
    pub half_width: f64,
}

impl Fraction {
    fn of(count: usize, n: usize) -> Self {
        if n == 0 {
            return Self { value: 0.0, half_width: 0.0 };
        }
        let p = count as f64 / n as f64;
        Self { value: p, half_width: 1.96 * (p * (1.0 - p) / n as f64).sqrt() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fractions {
    pub positive: Fraction,
    pub null: Fraction,
    pub conservative: Fraction,
    pub dissipative: Fraction,
    pub conservative_null: Fraction,
}

/// Result of classifying `n_points` draws from `q`.
///
/// Fractions are taken over points where the kernel is not identically zero
/// up to `H_max`; the rest are counted in `off_support_fraction`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub kernel: String,
    pub n_points: usize,
    pub fractions: Fractions,
    /// Share of on-support points with an undecided positive/null verdict.
    pub undecided_fraction: f64,
    /// Share of on-support points with an undecided conservative/dissipative verdict.
    pub undecided_hopf_fraction: f64,
    pub off_support_fraction: f64,
    pub weight_labels: Vec<String>,
    /// Orientation convention of the weight class.
    pub weight_orientation: String,
    pub config: ClassifyConfig,
    pub per_point: Vec<PointVerdict>,
}

impl ClassificationReport {
    /// Verdict shared by the largest number of on-support points, mapped to
    /// a flow class, together with its share.
    pub fn majority(&self) -> (FlowClass, f64) {
        let on: Vec<&PointVerdict> = self.per_point.iter().filter(|p| !p.off_support).collect();
        if on.is_empty() {
            return (FlowClass::Unknown, 0.0);
        }
        let mut counts = [0usize; 4];
        for p in &on {
            counts[class_index(point_class(p))] += 1;
        }
        let (i, c) = counts.iter().enumerate().max_by_key(|(i, c)| (**c, usize::MAX - i)).unwrap();
        let class = [FlowClass::Dissipative, FlowClass::ConservativeNull, FlowClass::Positive, FlowClass::Unknown][i];
        (class, *c as f64 / on.len() as f64)
    }
}

fn class_index(c: FlowClass) -> usize {
    match c {
        FlowClass::Dissipative => 0,
        FlowClass::ConservativeNull => 1,
        FlowClass::Positive => 2,
        FlowClass::Unknown => 3,
    }
}

/// Flow class of a single verdict; undecided combinations map to `Unknown`.
pub fn point_class(p: &PointVerdict) -> FlowClass {
    match (p.positive_null, p.cons_diss) {
        (_, CdVerdict::Dissipative) => FlowClass::Dissipative,
        (PnVerdict::Null, CdVerdict::Conservative) => FlowClass::ConservativeNull,
        (PnVerdict::Positive, CdVerdict::Conservative) => FlowClass::Positive,
        _ => FlowClass::Unknown,
    }
}

const ORIENTATION: &str = "weights are nonincreasing in |t| on both half-lines";

/// Time grid and tabulated weights shared by every point of one run.
struct SumGrid {
    discrete: bool,
    step: f64,
    /// Grid index of each horizon.
    ks: Vec<usize>,
    /// `0, −0, step, −step, …` up to the last horizon.
    times: Vec<f64>,
    /// `w(k step)` for each weight, then the unit weight.
    values: Vec<Vec<f64>>,
}

impl SumGrid {
    fn new(domain: TimeDomain, weights: &[WeightFunction], horizons: &[f64], step: f64) -> Result<Self> {
        let discrete = domain == TimeDomain::Discrete;
        let step = if discrete { 1.0 } else { step };
        let ks: Vec<usize> = horizons.iter().map(|h| (h / step).round() as usize).collect();
        if ks.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid("horizons", "must be increasing"));
        }
        let kmax = ks.last().copied().unwrap_or(0);
        let times: Vec<f64> = (0..=kmax)
            .flat_map(|k| {
                let t = k as f64 * step;
                [t, -t]
            })
            .collect();
        let mut values: Vec<Vec<f64>> =
            weights.iter().map(|w| (0..=kmax).map(|k| w.eval(k as f64 * step)).collect()).collect();
        values.push(vec![1.0; kmax + 1]);
        Ok(Self { discrete, step, ks, times, values })
    }

    /// Cumulative sums of `w(t)|f_t(x)|^α` at the horizons, for every weight
    /// and then the unit weight, from one orbit evaluation.
    fn sums(&self, kernel: &KernelSpec, x: &Point) -> Result<Vec<Vec<f64>>> {
        let v = kernel.orbit_abs_alpha(x, &self.times)?;
        let kmax = self.values[0].len() - 1;
        // pair[k] = g(k step) + g(-k step); k = 0 counted once.
        let pair: Vec<f64> = (0..=kmax).map(|k| if k == 0 { v[0] } else { v[2 * k] + v[2 * k + 1] }).collect();
        Ok(self.values.iter().map(|w| self.accumulate(w, &pair)).collect())
    }

    /// `∫_{|t|≤H} w` on the same grid as the sums.
    fn masses(&self, wi: usize) -> Vec<f64> {
        let kmax = self.values[wi].len() - 1;
        let ones: Vec<f64> = (0..=kmax).map(|k| if k == 0 { 1.0 } else { 2.0 }).collect();
        self.accumulate(&self.values[wi], &ones)
    }

    fn accumulate(&self, w: &[f64], pair: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.ks.len());
        // inner = Σ_{|k| < K} w g; trapezoid adds half the endpoint pair.
        let mut inner = 0.0;
        let mut next = 0;
        for (k, (&wk, &pk)) in w.iter().zip(pair).enumerate() {
            let term = wk * pk;
            while next < self.ks.len() && self.ks[next] == k {
                out.push(if self.discrete { inner + term } else { self.step * (inner + 0.5 * term) });
                next += 1;
            }
            inner += term;
        }
        out
    }
}

/// `S_H(x)` for each `H` in `horizons` (increasing).
pub fn weighted_trajectory_sums(
    kernel: &KernelSpec,
    x: &Point,
    w: WeightFunction,
    horizons: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let grid = SumGrid::new(kernel.time_domain, &[w], horizons, kernel.config.time_step)?;
    let s = grid.sums(kernel, x)?.remove(0);
    Ok(horizons.iter().copied().zip(s).collect())
}

/// Growth test over doublings `H/2 → H` for the last `d` recorded horizons.
fn keeps_growing(s: &[f64], mass: &[f64], d: usize, eps: f64) -> bool {
    let n = s.len();
    (n - d..n).all(|k| {
        let (s0, s1, w0, w1) = (s[k - 1], s[k], mass[k - 1], mass[k]);
        s0 > 0.0 && s1 - s0 >= eps * s0 * (w1 - w0) / w0
    })
}

/// Verdict for one point.
pub fn classify_point(kernel: &KernelSpec, x: &Point, cfg: &ClassifyConfig) -> Result<PointVerdict> {
    cfg.validate()?;
    classify_on(kernel, x, cfg, &point_grid(kernel, cfg)?)
}

fn point_grid(kernel: &KernelSpec, cfg: &ClassifyConfig) -> Result<SumGrid> {
    SumGrid::new(kernel.time_domain, &cfg.weights, &cfg.horizons(kernel.time_domain), cfg.time_step)
}

fn classify_on(kernel: &KernelSpec, x: &Point, cfg: &ClassifyConfig, grid: &SumGrid) -> Result<PointVerdict> {
    let horizons = cfg.horizons(kernel.time_domain);
    let mut weighted = grid.sums(kernel, x)?;
    let unweighted = weighted.pop().unwrap();
    let n = horizons.len();
    let last = n - 1;
    let partial_sums = PartialSums { horizons: horizons.clone(), weighted, unweighted };
    let ps = &partial_sums;
    if ps.unweighted[last] == 0.0 {
        return Ok(PointVerdict {
            index: 0,
            point: *x,
            positive_null: PnVerdict::Undecided,
            cons_diss: CdVerdict::Undecided,
            off_support: true,
            partial_sums,
        });
    }

    let null = ps.weighted.iter().any(|s| s[last] > 0.0 && s[last] - s[last - 1] < cfg.eps_conv * s[last]);
    let d = cfg.tail_doublings.min(last);
    let positive = !null
        && ps.weighted.iter().enumerate().all(|(wi, s)| keeps_growing(s, &grid.masses(wi), d, cfg.eps_div));
    let mut pn = if null {
        PnVerdict::Null
    } else if positive {
        PnVerdict::Positive
    } else {
        PnVerdict::Undecided
    };

    let u = &ps.unweighted;
    let lo = last - cfg.hopf_doublings.min(last);
    let inc = u[last] - u[lo];
    let mut cd = if inc < cfg.eps_conv * u[last] {
        CdVerdict::Dissipative
    } else if inc >= cfg.eps_hopf * u[last] {
        CdVerdict::Conservative
    } else {
        CdVerdict::Undecided
    };
    if cd == CdVerdict::Dissipative {
        if pn == PnVerdict::Positive {
            pn = PnVerdict::Undecided;
            cd = CdVerdict::Undecided;
        } else {
            pn = PnVerdict::Null;
        }
    }
    Ok(PointVerdict { index: 0, point: *x, positive_null: pn, cons_diss: cd, off_support: false, partial_sums })
}

/// Classify `n_points` independent draws from the kernel's `q`. Point `i`
/// is drawn from substream `i` of `rng`, so results do not depend on the
/// number of worker threads.
pub fn classify_process(
    kernel: &KernelSpec,
    n_points: usize,
    cfg: &ClassifyConfig,
    rng: &RngStream,
) -> Result<ClassificationReport> {
    if n_points == 0 {
        return Err(invalid("n_points", "must be at least 1"));
    }
    cfg.validate()?;
    let grid = point_grid(kernel, cfg)?;
    let per_point: Vec<PointVerdict> = (0..n_points)
        .into_par_iter()
        .map(|i| {
            let x = kernel.space.sample(&mut rng.substream(i as u64));
            let mut v = classify_on(kernel, &x, cfg, &grid)?;
            v.index = i;
            Ok(v)
        })
        .collect::<Result<_>>()?;
    Ok(summarize(kernel.label.clone(), per_point, cfg))
}

/// Re-classify the points of an existing report, e.g. under another
/// representation of the same process.
pub fn classify_points(kernel: &KernelSpec, points: &[Point], cfg: &ClassifyConfig) -> Result<ClassificationReport> {
    cfg.validate()?;
    let grid = point_grid(kernel, cfg)?;
    let per_point: Vec<PointVerdict> = points
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let mut v = classify_on(kernel, x, cfg, &grid)?;
            v.index = i;
            Ok(v)
        })
        .collect::<Result<_>>()?;
    Ok(summarize(kernel.label.clone(), per_point, cfg))
}

fn summarize(kernel: String, per_point: Vec<PointVerdict>, cfg: &ClassifyConfig) -> ClassificationReport {
    let n = per_point.len();
    let on: Vec<&PointVerdict> = per_point.iter().filter(|p| !p.off_support).collect();
    let m = on.len();
    let count = |f: &dyn Fn(&PointVerdict) -> bool| on.iter().filter(|p| f(p)).count();
    let fractions = Fractions {
        positive: Fraction::of(count(&|p| p.positive_null == PnVerdict::Positive), m),
        null: Fraction::of(count(&|p| p.positive_null == PnVerdict::Null), m),
        conservative: Fraction::of(count(&|p| p.cons_diss == CdVerdict::Conservative), m),
        dissipative: Fraction::of(count(&|p| p.cons_diss == CdVerdict::Dissipative), m),
        conservative_null: Fraction::of(
            count(&|p| p.cons_diss == CdVerdict::Conservative && p.positive_null == PnVerdict::Null),
            m,
        ),
    };
    let share = |c: usize| if m == 0 { 0.0 } else { c as f64 / m as f64 };
    ClassificationReport {
        kernel,
        n_points: n,
        fractions,
        undecided_fraction: share(count(&|p| p.positive_null == PnVerdict::Undecided)),
        undecided_hopf_fraction: share(count(&|p| p.cons_diss == CdVerdict::Undecided)),
        off_support_fraction: (n - m) as f64 / n as f64,
        weight_labels: cfg.weights.iter().map(|w| w.label()).collect(),
        weight_orientation: ORIENTATION.into(),
        config: cfg.clone(),
        per_point,
    }
}

/// The three parts `X^D`, `X^{CN}`, `X^P` of a process.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub dissipative: KernelSpec,
    pub conservative_null: KernelSpec,
    pub positive: KernelSpec,
    /// Estimated `‖·(0)‖_α^α` of each part, in the order above.
    pub norms_alpha: [f64; 3],
    /// Share of the total norm carried by points with undecided verdicts.
    pub unassigned_alpha: f64,
}

/// Split a kernel by the per-point verdicts of `report`.
///
/// Each part lives on the empirical measure of its classified points with
/// masses `dm/dq(x_i) / n`, rescaled by one common factor so that the masses
/// of all points reproduce the exact `‖f_0‖_α^α`. Empty parts are returned
/// as zero kernels.
pub fn decompose(kernel: &KernelSpec, report: &ClassificationReport) -> Result<Decomposition> {
    let n = report.per_point.len();
    if n == 0 {
        return Err(invalid("report", "no points"));
    }
    let mut parts: [(Vec<Point>, Vec<f64>); 4] = Default::default();
    let mut contrib = [0.0f64; 4];
    for p in &report.per_point {
        let m = kernel.space.density_dm_dq(&p.point) / n as f64;
        let f0 = kernel.orbit_abs_alpha(&p.point, &[0.0])?[0];
        let k = match point_class(p) {
            FlowClass::Dissipative => 0,
            FlowClass::ConservativeNull => 1,
            FlowClass::Positive => 2,
            FlowClass::Unknown => 3,
        };
        contrib[k] += m * f0;
        if m > 0.0 && m.is_finite() {
            parts[k].0.push(p.point);
            parts[k].1.push(m);
        }
    }
    let total_mc: f64 = contrib.iter().sum();
    let exact = kernel.integral_abs_alpha(&[(1.0, 0.0)])?;
    let scale = if total_mc > 0.0 { exact / total_mc } else { 1.0 };
    let build = |k: usize| -> Result<KernelSpec> {
        let (pts, masses) = &parts[k];
        let mut out = kernel.clone();
        if pts.is_empty() || contrib[k] == 0.0 {
            out.amplitude = 0.0;
        } else {
            let masses: Vec<f64> = masses.iter().map(|m| m * scale).collect();
            out.space = Arc::new(EmpiricalSpace::new(pts.clone(), masses.clone())?);
            out.integrator = Integrator::Empirical { points: pts.clone(), masses };
        }
        out.label = format!("{}[{}]", kernel.label, ["D", "CN", "P"][k]);
        Ok(out)
    };
    Ok(Decomposition {
        dissipative: build(0)?,
        conservative_null: build(1)?,
        positive: build(2)?,
        norms_alpha: [contrib[0] * scale, contrib[1] * scale, contrib[2] * scale],
        unassigned_alpha: contrib[3] * scale,
    })
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
    fn moving_average_unit_sum_is_one() {
        let k = entry("moving_average");
        let s = weighted_trajectory_sums(&k, &Point::Real(0.3), WeightFunction::Unit, &[0.5, 2.0, 8.0]).unwrap();
        // one grid step of discretisation error at the window edges
        assert!((s[1].1 - 1.0).abs() <= 0.05 + 1e-9 && s[2].1 == s[1].1, "{s:?}");
    }

    #[test]
    fn weight_masses_match_direct_sums() {
        let w = WeightFunction::Power { p: 1.0 };
        let g = SumGrid::new(TimeDomain::Discrete, &[w], &[2.0, 4.0], 1.0).unwrap();
        let direct: f64 = (-4..=4).map(|k: i32| 1.0 / (1.0 + k.abs() as f64)).sum();
        assert!((g.masses(0)[1] - direct).abs() < 1e-12);
        let g = SumGrid::new(TimeDomain::Continuous, &[w], &[4.0], 0.5).unwrap();
        // trapezoid of 2/(1+t) on [0, 4] at step 1/2
        let trap: f64 = 0.5 * (0..=8).map(|k| 2.0 * w.eval(k as f64 * 0.5) * if k == 0 || k == 8 { 0.5 } else { 1.0 }).sum::<f64>();
        assert!((g.masses(0)[0] - trap).abs() < 1e-12, "{} vs {}", g.masses(0)[0], trap);
    }

    #[test]
    fn rotation_point_is_positive() {
        let k = entry("rotation");
        let v = classify_point(&k, &Point::Real(0.25), &ClassifyConfig::default()).unwrap();
        assert_eq!((v.positive_null, v.cons_diss), (PnVerdict::Positive, CdVerdict::Conservative));
    }

    #[test]
    fn moving_average_point_is_dissipative() {
        let k = entry("moving_average");
        let v = classify_point(&k, &Point::Real(-3.2), &ClassifyConfig::default()).unwrap();
        assert_eq!((v.positive_null, v.cons_diss), (PnVerdict::Null, CdVerdict::Dissipative));
    }

    #[test]
    fn bad_config_is_rejected() {
        let cfg = ClassifyConfig { weights: vec![WeightFunction::Power { p: 1.5 }], ..Default::default() };
        assert!(cfg.validate().is_err());
    }
}
