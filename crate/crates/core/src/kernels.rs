//! Stationary kernels `f_t = a_t · (dm∘φ_t/dm)^{1/α} · f∘φ_t` and their
//! `L^α(m)` calculus.
//!
//! Every kernel carries an [`Integrator`] describing how integrals
//! `∫ |Σ c_j f_{t_j}|^α dm` are computed for its measure space. Deterministic
//! rules are used where the space allows it; Monte Carlo rules use a fixed
//! integration seed and draw their random numbers from the time gaps only, so
//! shifted time sets reuse identical samples and stationarity holds exactly
//! for the estimator as well as for the target.

use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::error::{invalid, Error, Result};
use crate::flows::{Cocycle, Flow, FlowClass, Point, TimeDomain};
use crate::paths::{Covariance, PathModel};
use crate::quadrature::{gauss_legendre_panels, merge_intervals, normalize_breaks, piecewise_rule};
use crate::rng::RngStream;
use crate::spaces::MeasureSpace;
use crate::stable::{gaussian_abs_moment, StabilityIndex, StableScale};

/// Real functions used as kernel profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LineFunction {
    /// `1_{[lo, hi)}`.
    Indicator { lo: f64, hi: f64 },
    /// Triangle of height 1 on `[center - half_width, center + half_width]`.
    Tent { center: f64, half_width: f64 },
    /// `(1 + |x|)^{-exponent}`.
    PowerTail { exponent: f64 },
    /// `x ↦ x`, used for path functionals `ω ↦ ω(0)`.
    Identity,
    Zero,
}

impl LineFunction {
    pub fn unit_indicator() -> Self {
        LineFunction::Indicator { lo: 0.0, hi: 1.0 }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            LineFunction::Indicator { lo, hi } => {
                if x >= lo && x < hi {
                    1.0
                } else {
                    0.0
                }
            }
            LineFunction::Tent { center, half_width } => (1.0 - (x - center).abs() / half_width).max(0.0),
            LineFunction::PowerTail { exponent } => (1.0 + x.abs()).powf(-exponent),
            LineFunction::Identity => x,
            LineFunction::Zero => 0.0,
        }
    }

    /// Closed interval outside of which the function vanishes; `None` when
    /// unbounded. The zero function has an empty support.
    pub fn support(&self) -> Option<(f64, f64)> {
        match *self {
            LineFunction::Indicator { lo, hi } => Some((lo, hi)),
            LineFunction::Tent { center, half_width } => Some((center - half_width, center + half_width)),
            LineFunction::Zero => Some((0.0, 0.0)),
            LineFunction::PowerTail { .. } | LineFunction::Identity => None,
        }
    }

    pub fn breaks(&self) -> Vec<f64> {
        match *self {
            LineFunction::Indicator { lo, hi } => vec![lo, hi],
            LineFunction::Tent { center, half_width } => vec![center - half_width, center, center + half_width],
            LineFunction::PowerTail { .. } => vec![0.0],
            _ => Vec::new(),
        }
    }

    pub fn is_piecewise_constant(&self) -> bool {
        matches!(self, LineFunction::Indicator { .. } | LineFunction::Zero)
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            LineFunction::Zero => true,
            LineFunction::Indicator { lo, hi } => hi <= lo,
            _ => false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            LineFunction::Indicator { lo, hi } => lo.is_finite() && hi.is_finite(),
            LineFunction::Tent { center, half_width } => center.is_finite() && half_width > 0.0,
            LineFunction::PowerTail { exponent } => exponent.is_finite() && exponent > 0.0,
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(invalid("f", format!("{self:?}")))
        }
    }
}

/// The base function `f = f_0` of a kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BaseFn {
    /// `f(x) = φ(x)` on `Real` points.
    Line(LineFunction),
    /// `f(k, x) = φ_k(x)` on `Tagged` points.
    Union(Vec<LineFunction>),
    /// `f(ω, z) = φ(z + W_ω(offset))` on `Path` points.
    Path { model: PathModel, phi: LineFunction },
}

impl BaseFn {
    pub fn eval(&self, x: &Point) -> Result<f64> {
        match (self, x) {
            (BaseFn::Line(phi), Point::Real(v)) => Ok(phi.eval(*v)),
            (BaseFn::Union(phis), Point::Tagged { tag, x }) => {
                Ok(phis.get(*tag as usize).map_or(0.0, |phi| phi.eval(*x)))
            }
            (BaseFn::Path { model, phi }, Point::Path { seed, offset, z }) => {
                Ok(phi.eval(z + model.value_at(*seed, *offset)?))
            }
            _ => Err(invalid("point", format!("{x:?} is not a point of this kernel's space"))),
        }
    }

    /// `f` at each point; path points of one trajectory share a cache lookup.
    pub fn eval_many(&self, pts: &[Point]) -> Result<Vec<f64>> {
        if let (BaseFn::Path { model, phi }, Some(Point::Path { seed, z, .. })) = (self, pts.first()) {
            if pts.iter().all(|p| matches!(p, Point::Path { seed: s, z: zz, .. } if s == seed && zz == z)) {
                let offsets: Vec<f64> = pts.iter().map(|p| p.coord()).collect();
                let w = model.values_at(*seed, &offsets)?;
                return Ok(w.into_iter().map(|v| phi.eval(z + v)).collect());
            }
        }
        pts.iter().map(|p| self.eval(p)).collect()
    }

    pub fn is_zero(&self) -> bool {
        match self {
            BaseFn::Line(phi) | BaseFn::Path { phi, .. } => phi.is_zero(),
            BaseFn::Union(phis) => phis.iter().all(LineFunction::is_zero),
        }
    }
}

/// Deterministic rule for one real-coordinate component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ComponentRule {
    /// Translation flow on the line: `f_t(x) = φ(x + t)`.
    Translation { m_weight: f64 },
    /// `f_t(v) = b^{⌊(v + rate t)/period⌋} φ((v + rate t) mod period)` on `[0, period)`.
    Periodic { period: f64, rate: f64, b: f64, m_weight: f64 },
    /// Identity flow on `[0, length)`.
    Frozen { length: f64, m_weight: f64 },
}

/// How `∫ |Σ c_j f_{t_j}|^α dm` is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Integrator {
    /// Composite Gauss–Legendre quadrature per component (one component for
    /// `Real` points, one per tag for unions).
    Deterministic { components: Vec<ComponentRule> },
    /// `m = P × Lebesgue`: Monte Carlo over path increments, exact quadrature
    /// in the level.
    PathLevel,
    /// `m = P` with Gaussian paths and `f = ω(0)`: closed form
    /// `(c'Rc)^{α/2} E|Z|^α`.
    GaussianLinear { cov: Covariance },
    /// Walk path space with counting level measure: exact for one or two
    /// times with trivial cocycle, Monte Carlo otherwise.
    Walk { parity_cocycle: bool },
    /// Exact sum over the atoms of an empirical measure.
    Empirical { points: Vec<Point>, masses: Vec<f64> },
    /// Importance sampling against `q`.
    MonteCarlo,
}

/// Numerical settings attached to a kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    /// Quadrature nodes per deterministic integral.
    pub nodes: usize,
    /// Monte Carlo samples per stochastic integral.
    pub mc_samples: usize,
    /// Seed of the common random numbers used by Monte Carlo integrals.
    pub integration_seed: u64,
    /// Time step of continuous-time trajectory grids.
    pub time_step: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self { nodes: 1 << 14, mc_samples: 1 << 15, integration_seed: 0x5eed_0f_1a7e, time_step: 0.05 }
    }
}

/// How one series term `f_t(U)` is evaluated on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TermSampler {
    /// Evaluate every grid time.
    Dense,
    /// Translation kernels: `f_t(x) ≠ 0` only for `t ∈ [lo - x, hi - x]`
    /// with `[lo, hi]` the support of the component at the point's tag.
    TranslationWindow { supports: Vec<(f64, f64)> },
    /// Walk kernels with trivial cocycle: only grid times at which the walk
    /// sits in `sites` contribute; positions are drawn by binomial jumps.
    WalkHits { sites: Vec<i64> },
    /// Walk kernels with the site-sign cocycle: the walk advances in
    /// tabulated 8-step chunks that carry their sign product.
    SignedWalk { sites: Vec<i64> },
    /// Brownian increment kernels with `φ` supported in `[lo, hi]`: outside
    /// the window the path jumps to its first passage time of the nearer edge.
    BrownianHits { support: (f64, f64) },
    /// Fresh fBm trajectory per term on the grid.
    FreshPath,
}

/// A stationary SαS representation.
#[derive(Debug, Clone)]
pub struct KernelSpec {
    pub alpha: StabilityIndex,
    pub space: Arc<dyn MeasureSpace>,
    pub flow: Arc<dyn Flow>,
    pub cocycle: Arc<dyn Cocycle>,
    pub f: BaseFn,
    /// Constant factor multiplying `f`.
    pub amplitude: f64,
    pub time_domain: TimeDomain,
    pub label: String,
    pub integrator: Integrator,
    pub term_sampler: TermSampler,
    pub config: KernelConfig,
}

impl KernelSpec {
    pub fn ground_truth(&self) -> FlowClass {
        self.flow.ground_truth()
    }

    /// Same kernel with `f` multiplied by `c`.
    pub fn scaled(&self, c: f64) -> KernelSpec {
        let mut k = self.clone();
        k.amplitude *= c;
        k
    }

    /// Same kernel sampled from a different equivalent law.
    pub fn with_space(&self, space: Arc<dyn MeasureSpace>) -> KernelSpec {
        let mut k = self.clone();
        k.space = space;
        k
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if self.time_domain.contains(t) {
            Ok(())
        } else {
            Err(invalid("t", format!("{t} is not in the {:?} time domain", self.time_domain)))
        }
    }

    /// `f_t(x)` for each `t` in `times`.
    pub fn orbit(&self, x: &Point, times: &[f64]) -> Result<Vec<f64>> {
        let mut out = self.orbit_unsigned(x, times)?;
        if !self.cocycle.is_trivial() {
            let a = self.cocycle.orbit(x, times)?;
            for (o, s) in out.iter_mut().zip(a) {
                *o *= s;
            }
        }
        Ok(out)
    }

    /// `|f_t(x)|^α` for each `t`; the ±1 cocycle drops out.
    pub fn orbit_abs_alpha(&self, x: &Point, times: &[f64]) -> Result<Vec<f64>> {
        let a = self.alpha.get();
        let pow = |v: f64| {
            let v = v.abs();
            if v == 0.0 || v == 1.0 {
                v
            } else {
                v.powf(a)
            }
        };
        Ok(self.orbit_unsigned(x, times)?.into_iter().map(pow).collect())
    }

    fn orbit_unsigned(&self, x: &Point, times: &[f64]) -> Result<Vec<f64>> {
        let inv = self.alpha.inv();
        let pts: Vec<Point> = times.iter().map(|&t| self.flow.apply(t, x)).collect();
        let mut vals = self.f.eval_many(&pts)?;
        for (v, &t) in vals.iter_mut().zip(times) {
            let rn = self.flow.rn_derivative(t, x);
            *v *= self.amplitude * if rn == 1.0 { 1.0 } else { rn.powf(inv) };
        }
        Ok(vals)
    }

    /// `∫ |Σ_j c_j f_{t_j}|^α dm`.
    pub fn integral_abs_alpha(&self, coeffs: &[(f64, f64)]) -> Result<f64> {
        let coeffs: Vec<(f64, f64)> = coeffs.iter().copied().filter(|(c, _)| *c != 0.0).collect();
        if coeffs.is_empty() || self.amplitude == 0.0 || self.f.is_zero() {
            return Ok(0.0);
        }
        for &(c, t) in &coeffs {
            self.check_time(t)?;
            if !c.is_finite() {
                return Err(invalid("coeffs", "coefficients must be finite"));
            }
        }
        let a = self.alpha.get();
        let raw = match &self.integrator {
            Integrator::Deterministic { components } => self.deterministic(components, &coeffs)?,
            Integrator::PathLevel => self.path_level(&coeffs)?,
            Integrator::GaussianLinear { cov } => {
                let mut var = 0.0;
                for &(ci, ti) in &coeffs {
                    for &(cj, tj) in &coeffs {
                        var += ci * cj * cov.eval(ti - tj);
                    }
                }
                var.max(0.0).powf(a / 2.0) * gaussian_abs_moment(a) * self.base_gaussian_factor()?
            }
            Integrator::Walk { parity_cocycle } => self.walk(&coeffs, *parity_cocycle)?,
            Integrator::Empirical { points, masses } => {
                let mut s = 0.0;
                for (p, m) in points.iter().zip(masses) {
                    s += m * self.combination_at(p, &coeffs)?.abs().powf(a);
                }
                s / self.amplitude.abs().powf(a)
            }
            Integrator::MonteCarlo => self.monte_carlo(&coeffs)?,
        };
        let v = raw * self.amplitude.abs().powf(a);
        if !v.is_finite() {
            return Err(Error::Divergent { partial_sums: vec![v] });
        }
        Ok(v)
    }

    fn base_gaussian_factor(&self) -> Result<f64> {
        match &self.f {
            BaseFn::Path { phi: LineFunction::Identity, .. } => Ok(1.0),
            _ => Err(Error::Unsupported("closed-form Gaussian integral needs f(ω) = ω(0)".into())),
        }
    }

    /// `Σ_j c_j f_{t_j}(x)` including amplitude and cocycle.
    fn combination_at(&self, x: &Point, coeffs: &[(f64, f64)]) -> Result<f64> {
        let times: Vec<f64> = coeffs.iter().map(|c| c.1).collect();
        let vals = self.orbit(x, &times)?;
        Ok(vals.iter().zip(coeffs).map(|(v, (c, _))| c * v).sum())
    }

    fn deterministic(&self, components: &[ComponentRule], coeffs: &[(f64, f64)]) -> Result<f64> {
        let phis: Vec<LineFunction> = match &self.f {
            BaseFn::Line(phi) => vec![*phi],
            BaseFn::Union(phis) => phis.clone(),
            BaseFn::Path { .. } => return Err(Error::Unsupported("deterministic rule on path space".into())),
        };
        if phis.len() != components.len() {
            return Err(invalid("integrator", "one rule per component is required"));
        }
        let a = self.alpha.get();
        let cs: Vec<f64> = coeffs.iter().map(|c| c.0).collect();
        let ts: Vec<f64> = coeffs.iter().map(|c| c.1).collect();
        let mut total = 0.0;
        for (phi, rule) in phis.iter().zip(components) {
            if phi.is_zero() {
                continue;
            }
            total += match *rule {
                ComponentRule::Translation { m_weight } => {
                    m_weight * line_abs_alpha(phi, &ts, &cs, a, self.config.nodes)?
                }
                ComponentRule::Periodic { period, rate, b, m_weight } => {
                    m_weight * periodic_abs_alpha(phi, period, rate, b, &ts, &cs, a, self.config.nodes)
                }
                ComponentRule::Frozen { length, m_weight } => {
                    let sum: f64 = cs.iter().sum();
                    let breaks = normalize_breaks(phi.breaks(), 0.0, length);
                    let mass: f64 = node_rule(phi, &breaks, self.config.nodes)
                        .iter()
                        .map(|(x, w)| w * phi.eval(*x).abs().powf(a))
                        .sum();
                    m_weight * sum.abs().powf(a) * mass
                }
            };
        }
        Ok(total)
    }

    fn path_level(&self, coeffs: &[(f64, f64)]) -> Result<f64> {
        let BaseFn::Path { model, phi } = &self.f else {
            return Err(Error::Unsupported("path-level rule needs a path base function".into()));
        };
        let a = self.alpha.get();
        let ts: Vec<f64> = coeffs.iter().map(|c| c.1).collect();
        let cs: Vec<f64> = coeffs.iter().map(|c| c.0).collect();
        let n = self.config.mc_samples.max(1);
        let root = RngStream::new(self.config.integration_seed, 0x11);
        let nodes = (self.config.nodes / 16).max(64);
        let mut acc = 0.0;
        for i in 0..n {
            let mut rng = root.substream(i as u64);
            let y = model.sample_increments(&ts, &mut rng)?;
            acc += line_abs_alpha(phi, &y, &cs, a, nodes)?;
        }
        Ok(acc / n as f64)
    }

    fn walk(&self, coeffs: &[(f64, f64)], parity: bool) -> Result<f64> {
        let BaseFn::Path { phi, .. } = &self.f else {
            return Err(Error::Unsupported("walk rule needs a path base function".into()));
        };
        let a = self.alpha.get();
        let sites = integer_sites(phi)?;
        let vals: Vec<f64> = sites.iter().map(|&s| phi.eval(s as f64)).collect();
        let at = |site: i64| -> f64 { sites.iter().position(|&s| s == site).map_or(0.0, |i| vals[i]) };
        let mass: f64 = vals.iter().map(|v| v.abs().powf(a)).sum();
        let ts: Vec<i64> = coeffs.iter().map(|c| c.1.round() as i64).collect();
        let cs: Vec<f64> = coeffs.iter().map(|c| c.0).collect();
        if !parity && coeffs.len() == 1 {
            return Ok(cs[0].abs().powf(a) * mass);
        }
        if !parity && coeffs.len() == 2 {
            let gap = (ts[1] - ts[0]).unsigned_abs();
            let (c0, c1) = if ts[1] >= ts[0] { (cs[0], cs[1]) } else { (cs[1], cs[0]) };
            let separate = (c0.abs().powf(a) + c1.abs().powf(a)) * mass;
            let mut diffs: Vec<i64> = sites.iter().flat_map(|&s| sites.iter().map(move |&u| u - s)).collect();
            diffs.sort_unstable();
            diffs.dedup();
            let mut total = 0.0;
            let mut covered = 0.0;
            for d in diffs {
                let p = walk_pmf(gap, d);
                if p == 0.0 {
                    continue;
                }
                covered += p;
                let mut zs: Vec<i64> = sites.iter().flat_map(|&s| [s, s - d]).collect();
                zs.sort_unstable();
                zs.dedup();
                let s: f64 = zs.iter().map(|&z| (c0 * at(z) + c1 * at(z + d)).abs().powf(a)).sum();
                total += p * s;
            }
            return Ok(total + (1.0 - covered).max(0.0) * separate);
        }
        if parity && coeffs.len() == 2 {
            let (g0, g1) = if ts[1] >= ts[0] { ((cs[0], ts[0]), (cs[1], ts[1])) } else { ((cs[1], ts[1]), (cs[0], ts[0])) };
            let gap = (g1.1 - g0.1) as usize;
            let signed = signed_returns(&sites, gap);
            let (c0, c1) = (g0.0, g1.0);
            let mut total = 0.0;
            let mut out_of = vec![1.0; sites.len()];
            let mut into = vec![1.0; sites.len()];
            for (i, &z) in sites.iter().enumerate() {
                for (j, &u) in sites.iter().enumerate() {
                    let p = walk_pmf(gap as u64, u - z);
                    let g = signed[i * sites.len() + j];
                    let (plus, minus) = (0.5 * (p + g), 0.5 * (p - g));
                    total += plus * (c0 * vals[i] + c1 * vals[j]).abs().powf(a)
                        + minus * (c0 * vals[i] - c1 * vals[j]).abs().powf(a);
                    out_of[i] -= p;
                    into[j] -= p;
                }
            }
            for i in 0..sites.len() {
                total += (c0 * vals[i]).abs().powf(a) * out_of[i].max(0.0) + (c1 * vals[i]).abs().powf(a) * into[i].max(0.0);
            }
            return Ok(total);
        }
        // Monte Carlo over the walk from the earliest time; the sign factor
        // a_{t_min} has modulus one and drops out.
        let t0 = *ts.iter().min().unwrap();
        let rel: Vec<i64> = ts.iter().map(|t| t - t0).collect();
        let len = *rel.iter().max().unwrap() as usize;
        let n = self.config.mc_samples.max(1);
        let root = RngStream::new(self.config.integration_seed, 0x22);
        let mut acc = 0.0;
        let mut path = vec![0i64; len + 1];
        for i in 0..n {
            let mut rng = root.substream(i as u64);
            let mut bits = 0u64;
            for k in 1..=len {
                if (k - 1) % 64 == 0 {
                    bits = rand::RngCore::next_u64(&mut rng);
                }
                path[k] = path[k - 1] + if bits & 1 == 1 { 1 } else { -1 };
                bits >>= 1;
            }
            let path_ref = &path;
            let mut zs: Vec<i64> =
                sites.iter().flat_map(|&s| rel.iter().map(move |&r| s - path_ref[r as usize])).collect();
            zs.sort_unstable();
            zs.dedup();
            for z in zs {
                let mut sum = 0.0;
                for (j, &r) in rel.iter().enumerate() {
                    let sign = if parity { parity_sign(z, &path[..r as usize]) } else { 1.0 };
                    sum += cs[j] * sign * at(z + path[r as usize]);
                }
                acc += sum.abs().powf(a);
            }
        }
        Ok(acc / n as f64)
    }

    fn monte_carlo(&self, coeffs: &[(f64, f64)]) -> Result<f64> {
        let a = self.alpha.get();
        let n = self.config.mc_samples.max(16);
        let mut rng = RngStream::new(self.config.integration_seed, 0x33);
        let mut acc = 0.0;
        let mut partial = Vec::new();
        let mut next = 16;
        for i in 1..=n {
            let x = self.space.sample(&mut rng);
            let w = self.space.density_dm_dq(&x);
            acc += w * self.combination_at(&x, coeffs)?.abs().powf(a);
            if i == next {
                partial.push(acc / i as f64);
                next *= 2;
            }
        }
        let est = acc / n as f64;
        if !est.is_finite() {
            partial.push(est);
            return Err(Error::Divergent { partial_sums: partial });
        }
        Ok(est / self.amplitude.abs().powf(a))
    }
}

/// Signed return table of the parity cocycle: entry `i * k + j` is
/// `E_{s_i}[Π_{m<n} h(ω(m)); ω(n) = s_j]` for sites `s_0..s_{k-1}`.
/// Forward recursions are cached per site set and extended on demand.
fn signed_returns(sites: &[i64], n: usize) -> Vec<f64> {
    use std::collections::HashMap;
    use std::sync::{Mutex, OnceLock};

    struct Table {
        // signed mass over positions start - n ..= start + n, per start site
        fronts: Vec<Vec<f64>>,
        steps: usize,
        rows: Vec<Vec<f64>>,
    }
    static CACHE: OnceLock<Mutex<HashMap<Vec<i64>, Table>>> = OnceLock::new();
    let k = sites.len();
    let mut guard = CACHE.get_or_init(|| Mutex::new(HashMap::new())).lock().unwrap();
    let table = guard.entry(sites.to_vec()).or_insert_with(|| Table {
        fronts: vec![vec![1.0]; k],
        steps: 0,
        rows: vec![(0..k * k).map(|e| if e / k == e % k { 1.0 } else { 0.0 }).collect()],
    });
    while table.steps < n {
        let m = table.steps;
        for (i, front) in table.fronts.iter_mut().enumerate() {
            // front[p] sits at position sites[i] - m + p
            let base = sites[i] - m as i64;
            let mut next = vec![0.0; front.len() + 2];
            for (p, &v) in front.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                let h = if (base + p as i64).rem_euclid(4) >= 2 { -0.5 } else { 0.5 };
                next[p] += h * v;
                next[p + 2] += h * v;
            }
            *front = next;
        }
        table.steps += 1;
        let m = table.steps as i64;
        let mut row = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                let p = sites[j] - (sites[i] - m);
                if p >= 0 && (p as usize) < table.fronts[i].len() {
                    row[i * k + j] = table.fronts[i][p as usize];
                }
            }
        }
        table.rows.push(row);
    }
    table.rows[n].clone()
}

fn parity_sign(z: i64, prefix: &[i64]) -> f64 {
    let flips = prefix.iter().filter(|&&p| (z + p).rem_euclid(4) >= 2).count();
    if flips % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `P(S_gap = d)` for the simple symmetric walk.
pub fn walk_pmf(gap: u64, d: i64) -> f64 {
    let g = gap as i64;
    if d.abs() > g || (g + d).rem_euclid(2) != 0 {
        return 0.0;
    }
    let k = ((g + d) / 2) as u64;
    (ln_binomial(gap, k) - gap as f64 * std::f64::consts::LN_2).exp()
}

/// Integer sites at which a site function is nonzero.
pub fn integer_sites(phi: &LineFunction) -> Result<Vec<i64>> {
    let (lo, hi) = phi
        .support()
        .ok_or_else(|| Error::Unsupported("walk kernels need a boundedly supported site function".into()))?;
    Ok(((lo.ceil() as i64)..=(hi.floor() as i64)).filter(|&s| phi.eval(s as f64) != 0.0).collect())
}

fn node_rule(phi: &LineFunction, breaks: &[f64], nodes: usize) -> Vec<(f64, f64)> {
    if phi.is_piecewise_constant() {
        breaks.windows(2).filter(|w| w[1] > w[0]).map(|w| (0.5 * (w[0] + w[1]), w[1] - w[0])).collect()
    } else {
        piecewise_rule(breaks, nodes)
    }
}

/// `∫_ℝ |Σ_j c_j φ(x + s_j)|^α dx`.
pub fn line_abs_alpha(phi: &LineFunction, shifts: &[f64], coeffs: &[f64], alpha: f64, nodes: usize) -> Result<f64> {
    let integrand = |x: f64| -> f64 {
        let v: f64 = shifts.iter().zip(coeffs).map(|(s, c)| c * phi.eval(x + s)).sum();
        v.abs().powf(alpha)
    };
    match phi.support() {
        Some((lo, hi)) => {
            if hi <= lo {
                return Ok(0.0);
            }
            let pieces = merge_intervals(shifts.iter().map(|s| (lo - s, hi - s)).collect());
            let span: f64 = pieces.iter().map(|(a, b)| b - a).sum();
            let mut total = 0.0;
            for (a, b) in pieces {
                let br: Vec<f64> = shifts.iter().flat_map(|s| phi.breaks().into_iter().map(move |x| x - s)).collect();
                let breaks = normalize_breaks(br, a, b);
                let share = (((b - a) / span) * nodes as f64).ceil() as usize;
                total += node_rule(phi, &breaks, share.max(8)).iter().map(|(x, w)| w * integrand(*x)).sum::<f64>();
            }
            Ok(total)
        }
        None => {
            // Expanding shells with divergence detection.
            let smin = shifts.iter().cloned().fold(f64::INFINITY, f64::min);
            let smax = shifts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let (c_lo, c_hi) = (-smax - 1.0, -smin + 1.0);
            let mut rule = Vec::new();
            let mut br: Vec<f64> = shifts.iter().flat_map(|s| phi.breaks().into_iter().map(move |x| x - s)).collect();
            br.push(c_lo);
            br.push(c_hi);
            let breaks = normalize_breaks(br, c_lo, c_hi);
            rule.extend(piecewise_rule(&breaks, nodes));
            let mut total: f64 = rule.iter().map(|(x, w)| w * integrand(*x)).sum();
            let mut partial = vec![total];
            let mut reach = 0.0f64;
            let mut prev_inc = f64::INFINITY;
            let mut slow = 0;
            for _ in 0..48 {
                let width = reach.max(1.0);
                let mut shell = Vec::new();
                gauss_legendre_panels(c_lo - reach - width, c_lo - reach, 16, &mut shell);
                gauss_legendre_panels(c_hi + reach, c_hi + reach + width, 16, &mut shell);
                let inc: f64 = shell.iter().map(|(x, w)| w * integrand(*x)).sum();
                total += inc;
                partial.push(total);
                reach += width;
                let ratio = inc / prev_inc;
                let prev_inc_known = prev_inc.is_finite();
                prev_inc = inc;
                if prev_inc_known && ratio.is_finite() && ratio < 0.95 {
                    slow = 0;
                    let tail = inc * ratio / (1.0 - ratio);
                    if tail <= 1e-9 * total {
                        return Ok(total + tail);
                    }
                } else if inc > 0.0 {
                    slow += 1;
                    if slow >= 8 {
                        return Err(Error::Divergent { partial_sums: partial });
                    }
                } else if inc == 0.0 && total > 0.0 {
                    return Ok(total);
                }
            }
            Err(Error::Divergent { partial_sums: partial })
        }
    }
}

/// `∫_0^q |Σ_j c_j b^{⌊(v + r t_j)/q⌋} φ((v + r t_j) mod q)|^α dv`.
#[allow(clippy::too_many_arguments)]
fn periodic_abs_alpha(
    phi: &LineFunction,
    period: f64,
    rate: f64,
    b: f64,
    times: &[f64],
    coeffs: &[f64],
    alpha: f64,
    nodes: usize,
) -> f64 {
    let mut br = Vec::new();
    let mut pb: Vec<f64> = phi.breaks().into_iter().filter(|x| *x > 0.0 && *x < period).collect();
    pb.push(0.0);
    for &t in times {
        for &x in &pb {
            br.push((x - rate * t).rem_euclid(period));
        }
    }
    let breaks = normalize_breaks(br, 0.0, period);
    let integrand = |v: f64| -> f64 {
        let mut s = 0.0;
        for (&t, &c) in times.iter().zip(coeffs) {
            let u = v + rate * t;
            let k = (u / period).floor();
            let sign = if b == 1.0 || k.rem_euclid(2.0) == 0.0 { 1.0 } else { -1.0 };
            s += c * sign * phi.eval(u.rem_euclid(period));
        }
        s.abs().powf(alpha)
    };
    node_rule(phi, &breaks, nodes).iter().map(|(x, w)| w * integrand(*x)).sum()
}

/// `f_t(x) = a_t(x) (rn(t, x))^{1/α} f(φ_t x)`.
pub fn eval_kernel(kernel: &KernelSpec, t: f64, x: &Point) -> Result<f64> {
    kernel.check_time(t)?;
    Ok(kernel.orbit(x, &[t])?[0])
}

/// `(∫ |f_t|^α dm)^{1/α}`.
pub fn kernel_norm(kernel: &KernelSpec, t: f64) -> Result<StableScale> {
    scale_of_combination(kernel, &[(1.0, t)])
}

/// Scale of `Σ c_i X(t_i)`, i.e. `(∫ |Σ c_i f_{t_i}|^α dm)^{1/α}`, for
/// `coeffs = [(c_i, t_i)]`.
pub fn scale_of_combination(kernel: &KernelSpec, coeffs: &[(f64, f64)]) -> Result<StableScale> {
    let v = kernel.integral_abs_alpha(coeffs)?;
    StableScale::new(v.max(0.0).powf(kernel.alpha.inv()))
}

/// Fraction of `x ~ q` with `sup_{t ∈ window grid} |f_t(x)| > 0`.
pub fn support_fraction(kernel: &KernelSpec, window: (f64, f64), samples: usize, rng: &mut RngStream) -> Result<f64> {
    if samples == 0 {
        return Ok(0.0);
    }
    let step = match kernel.time_domain {
        TimeDomain::Discrete => 1.0,
        TimeDomain::Continuous => kernel.config.time_step,
    };
    let start = match kernel.time_domain {
        TimeDomain::Discrete => window.0.ceil(),
        TimeDomain::Continuous => window.0,
    };
    let n = ((window.1 - start) / step).floor().max(0.0) as usize + 1;
    let times: Vec<f64> = (0..n).map(|k| start + k as f64 * step).collect();
    let mut hits = 0usize;
    for _ in 0..samples {
        let x = kernel.space.sample(rng);
        if kernel.orbit_abs_alpha(&x, &times)?.iter().any(|v| *v > 0.0) {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_of_shifted_indicators() {
        let phi = LineFunction::unit_indicator();
        for (t, a) in [(0.3, 1.5), (0.8, 0.7), (2.5, 1.2)] {
            let v = line_abs_alpha(&phi, &[t, 0.0], &[1.0, -1.0], a, 1 << 10).unwrap();
            let want = 2.0 * f64::min(t, 1.0);
            assert!((v - want).abs() < 1e-12, "t={t}: {v} vs {want}");
        }
    }

    #[test]
    fn tent_norm_matches_closed_form() {
        // ∫ (1 - |x|)_+^α dx = 2 / (α + 1).
        let phi = LineFunction::Tent { center: 0.0, half_width: 1.0 };
        let a = 1.3;
        let v = line_abs_alpha(&phi, &[0.0], &[1.0], a, 1 << 12).unwrap();
        assert!((v - 2.0 / (a + 1.0)).abs() < 1e-8, "{v}");
    }

    #[test]
    fn power_tail_converges_or_diverges() {
        // (1 + |x|)^{-p}: integrable to power α iff pα > 1; ∫ = 2/(pα - 1).
        let phi = LineFunction::PowerTail { exponent: 2.0 };
        let v = line_abs_alpha(&phi, &[0.0], &[1.0], 1.5, 1 << 12).unwrap();
        assert!((v - 1.0).abs() < 1e-5, "{v}");
        let heavy = LineFunction::PowerTail { exponent: 0.5 };
        assert!(matches!(line_abs_alpha(&heavy, &[0.0], &[1.0], 1.5, 1 << 10), Err(Error::Divergent { .. })));
    }

    #[test]
    fn walk_pmf_sums_to_one() {
        for gap in [0u64, 1, 7, 100] {
            let s: f64 = (-(gap as i64)..=gap as i64).map(|d| walk_pmf(gap, d)).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
        assert!((walk_pmf(2, 0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn periodic_sign_flip_norm() {
        // b = -1, φ ≡ 1 on [0,1): f_t(v) = (-1)^{⌊v+t⌋}; f_{0.25} - f_0 is 2 on a set of measure 1/4.
        let phi = LineFunction::unit_indicator();
        let v = periodic_abs_alpha(&phi, 1.0, 1.0, -1.0, &[0.25, 0.0], &[1.0, -1.0], 1.5, 256);
        assert!((v - 0.25 * 2f64.powf(1.5)).abs() < 1e-12, "{v}");
    }

    #[test]
    fn signed_walk_pairs_match_path_enumeration() {
        let sites = [-1i64, 0, 1];
        let f = |x: i64| if sites.contains(&x) { 1.0 } else { 0.0 };
        let h = |x: i64| if x.rem_euclid(4) >= 2 { -1.0 } else { 1.0 };
        let a = 1.3;
        for n in 0..8usize {
            let (c0, c1) = (-1.0f64, 0.7f64);
            let mut brute = 0.0;
            for z in -12i64..=12 {
                for bits in 0u32..(1 << n) {
                    let (mut x, mut sign) = (z, 1.0);
                    for k in 0..n {
                        sign *= h(x);
                        x += if bits >> k & 1 == 1 { 1 } else { -1 };
                    }
                    brute += (c0 * f(z) + c1 * sign * f(x)).abs().powf(a) / (1u64 << n) as f64;
                }
            }
            let e = crate::catalog::catalog_entry(
                "markov_chain_signed",
                StabilityIndex::new(a).unwrap(),
                crate::catalog::QChoice::Default,
            )
            .unwrap();
            let v = e.kernel.integral_abs_alpha(&[(c0, 3.0), (c1, 3.0 + n as f64)]).unwrap();
            assert!((v - brute).abs() < 1e-12, "n={n}: {v} vs {brute}");
        }
    }
}
