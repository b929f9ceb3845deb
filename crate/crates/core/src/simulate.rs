//! Sample paths of SαS integrals.
//!
//! [`simulate_series`] realises `X(t) = ∫ f_t dM` through the LePage series
//! `c_α^{1/α} Σ_i ε_i Γ_i^{-1/α} (dm/dq)^{1/α}(U_i) f_t(U_i)`, with one
//! `(ε, Γ, U)` sequence shared by every grid time. [`simulate_substable`]
//! draws `c W^{1/β} B(t)` directly.

use std::sync::OnceLock;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::flows::Point;
use crate::kernels::{integer_sites, BaseFn, KernelSpec, LineFunction, TermSampler};
use crate::linalg::{cholesky_psd, lower_mul};
use crate::paths::{fbm_on_grid, first_passage, walk_displacement, Covariance, PathModel, TrajectoryModel};
use crate::rng::{RngStream, StreamKey};
use crate::stable::{sample_positive_stable, series_constant, StabilityIndex};

/// Smallest admissible number of series terms.
pub const MIN_TERMS: usize = 100;

/// Series truncation settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    pub n_terms: usize,
}

impl SeriesConfig {
    pub fn new(n_terms: usize) -> Result<Self> {
        if n_terms < MIN_TERMS {
            return Err(invalid("n_terms", format!("{n_terms} < {MIN_TERMS}")));
        }
        Ok(Self { n_terms })
    }
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self { n_terms: 10_000 }
    }
}

/// Simulated values on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Four standard deviations of the omitted series tail at each time
    /// (zero for exact simulators).
    pub truncation: Vec<f64>,
    pub n_terms: usize,
    pub stream: StreamKey,
}

/// A simulator that bypasses the series for a specific kernel family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DirectSimulator {
    /// `c W^{1/β} B(t)` with `B` sub-Gaussian β-stable (Gaussian for β = 2)
    /// with covariance `cov`.
    SubStable { beta: f64, cov: Covariance },
}

impl DirectSimulator {
    pub fn simulate(&self, alpha: StabilityIndex, times: &[f64], rng: &mut RngStream) -> Result<PathSample> {
        match *self {
            DirectSimulator::SubStable { beta, cov } => simulate_substable(alpha, beta, cov, times, rng, None),
        }
    }
}

fn sorted(times: &[f64]) -> bool {
    times.windows(2).all(|w| w[0] <= w[1])
}

/// Grid times rounded to integers, for the walk samplers.
struct IntGrid {
    values: Vec<i64>,
    contiguous: bool,
}

impl IntGrid {
    fn new(times: &[f64]) -> Self {
        let values: Vec<i64> = times.iter().map(|t| t.round() as i64).collect();
        let contiguous = values.windows(2).all(|w| w[1] == w[0] + 1);
        Self { values, contiguous }
    }

    /// Smallest `j ≥ i` with `values[j] ≥ target` (sorted values), or `len`.
    fn first_at_or_after(&self, i: usize, target: i64) -> usize {
        if self.contiguous {
            let j = (target - self.values[0]).max(i as i64) as usize;
            return j.min(self.values.len());
        }
        i + self.values[i..].partition_point(|&g| g < target)
    }
}

/// One series term: `(dm/dq(U), [(grid index, f_t(U))])` with zero entries
/// omitted where the sampler knows them in advance.
fn draw_term(
    kernel: &KernelSpec,
    times: &[f64],
    is_sorted: bool,
    grid: &IntGrid,
    rng: &mut RngStream,
) -> Result<(f64, Vec<(usize, f64)>)> {
    let x = kernel.space.sample(rng);
    let w = kernel.space.density_dm_dq(&x);
    let dense = |x: &Point| -> Result<Vec<(usize, f64)>> {
        Ok(kernel.orbit(x, times)?.into_iter().enumerate().filter(|(_, v)| *v != 0.0).collect())
    };
    let entries = match &kernel.term_sampler {
        TermSampler::Dense => dense(&x)?,
        TermSampler::TranslationWindow { supports } => {
            let tag = match x {
                Point::Tagged { tag, .. } => tag as usize,
                _ => 0,
            };
            match supports.get(tag) {
                Some(&(lo, hi)) if is_sorted => {
                    let c = x.coord();
                    let a = times.partition_point(|&t| t < lo - c);
                    let b = times.partition_point(|&t| t <= hi - c);
                    if a < b {
                        let vals = kernel.orbit(&x, &times[a..b])?;
                        vals.into_iter().enumerate().filter(|(_, v)| *v != 0.0).map(|(i, v)| (a + i, v)).collect()
                    } else {
                        Vec::new()
                    }
                }
                _ => dense(&x)?,
            }
        }
        TermSampler::WalkHits { sites } if is_sorted => walk_hits(kernel, sites, &x, grid, rng)?,
        TermSampler::WalkHits { .. } => dense(&x)?,
        TermSampler::SignedWalk { sites } if is_sorted => signed_walk(kernel, sites, &x, grid, rng)?,
        TermSampler::BrownianHits { support } if is_sorted => brownian_hits(kernel, *support, &x, times, rng)?,
        TermSampler::FreshPath => fresh_path(kernel, &x, times, rng)?,
        TermSampler::SignedWalk { .. } | TermSampler::BrownianHits { .. } => dense(&x)?,
    };
    Ok((w, entries))
}

/// Positions of a fresh walk started at the point's site, observed on the
/// sorted integer grid; only visits to `sites` are recorded. Between
/// possible visits the walk advances by binomial jumps.
fn walk_hits(
    kernel: &KernelSpec,
    sites: &[i64],
    x: &Point,
    int_grid: &IntGrid,
    rng: &mut RngStream,
) -> Result<Vec<(usize, f64)>> {
    let grid = &int_grid.values[..];
    let BaseFn::Path { phi, .. } = &kernel.f else {
        return Err(Error::Unsupported("walk sampler needs a path kernel".into()));
    };
    let Point::Path { z, .. } = *x else {
        return Err(invalid("point", "walk sampler needs a path point"));
    };
    let mut out = Vec::new();
    if grid.is_empty() || sites.is_empty() {
        return Ok(out);
    }
    let mut pos = z as i64 + walk_displacement(grid[0].unsigned_abs(), rng) as i64;
    let mut i = 0;
    loop {
        let d = sites.iter().map(|s| (pos - s).abs()).min().unwrap();
        if d == 0 {
            out.push((i, kernel.amplitude * phi.eval(pos as f64)));
        }
        let target = grid[i] + d.max(1);
        let j = int_grid.first_at_or_after(i, target);
        if j >= grid.len() {
            break;
        }
        pos += walk_displacement((grid[j] - grid[i]) as u64, rng) as i64;
        i = j;
    }
    Ok(out)
}

fn path_parts<'a>(kernel: &'a KernelSpec, x: &Point) -> Result<(&'a PathModel, &'a LineFunction, f64)> {
    let BaseFn::Path { model, phi } = &kernel.f else {
        return Err(Error::Unsupported("path sampler needs a path kernel".into()));
    };
    let Point::Path { z, .. } = *x else {
        return Err(invalid("point", "path sampler needs a path point"));
    };
    Ok((model, phi, z))
}

fn site_sign(site: i64) -> i8 {
    if site.rem_euclid(4) >= 2 {
        -1
    } else {
        1
    }
}

const CHUNK: u32 = 16;

/// `table[(r << 8) | bits]`: sign product over the 8 sites occupied before
/// each step and the net displacement, for a walk started at residue `r`
/// mod 4 whose steps are the bits of `bits` (1 = up).
fn chunk_table() -> &'static [(i8, i8)] {
    static TABLE: OnceLock<Vec<(i8, i8)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(4 << CHUNK);
        for r in 0..4i64 {
            for bits in 0..(1u32 << CHUNK) {
                let (mut pos, mut sign) = (r, 1i8);
                for k in 0..CHUNK {
                    sign *= site_sign(pos);
                    pos += if bits >> k & 1 == 1 { 1 } else { -1 };
                }
                t.push((sign, (pos - r) as i8));
            }
        }
        t
    })
}

/// Walk with the site-sign cocycle on the sorted integer grid. The sign
/// accumulated before `grid[0]` is common to every entry of the term and is
/// absorbed by the symmetric series sign.
fn signed_walk(
    kernel: &KernelSpec,
    sites: &[i64],
    x: &Point,
    int_grid: &IntGrid,
    rng: &mut RngStream,
) -> Result<Vec<(usize, f64)>> {
    let grid = &int_grid.values[..];
    let (_, phi, z) = path_parts(kernel, x)?;
    let mut out = Vec::new();
    let (Some(&smin), Some(&smax)) = (sites.iter().min(), sites.iter().max()) else {
        return Ok(out);
    };
    let Some(&last) = grid.last() else {
        return Ok(out);
    };
    let table = chunk_table();
    let mut pos = z as i64 + walk_displacement(grid[0].unsigned_abs(), rng) as i64;
    let mut sign = 1i8;
    let mut i = 0;
    loop {
        if pos >= smin && pos <= smax && sites.contains(&pos) {
            out.push((i, f64::from(sign) * kernel.amplitude * phi.eval(pos as f64)));
        }
        let d = if pos < smin { smin - pos } else { (pos - smax).max(0) };
        // No site is reachable before `grid[i] + d`.
        let target = grid[i] + d.max(1);
        let j = int_grid.first_at_or_after(i, target);
        if j >= grid.len() || target > last {
            break;
        }
        let mut gap = (grid[j] - grid[i]) as u64;
        let chunk = |bits: u64, pos: &mut i64, sign: &mut i8| {
            let (s, dx) = table[(((*pos & 3) as usize) << CHUNK) | (bits & 0xffff) as usize];
            *sign *= s;
            *pos += i64::from(dx);
        };
        while gap >= 64 {
            let w = rng.next_u64();
            for k in 0..4 {
                chunk(w >> (16 * k), &mut pos, &mut sign);
            }
            gap -= 64;
        }
        if gap > 0 {
            let mut w = rng.next_u64();
            while gap >= 16 {
                chunk(w, &mut pos, &mut sign);
                w >>= 16;
                gap -= 16;
            }
            for _ in 0..gap {
                sign *= site_sign(pos);
                pos += if w & 1 == 1 { 1 } else { -1 };
                w >>= 1;
            }
        }
        i = j;
    }
    Ok(out)
}

/// `φ(z + Y(t))` for Brownian `Y` with drift on sorted times, `Y(0) = 0`.
fn brownian_hits(
    kernel: &KernelSpec,
    (lo, hi): (f64, f64),
    x: &Point,
    times: &[f64],
    rng: &mut RngStream,
) -> Result<Vec<(usize, f64)>> {
    let (model, phi, z) = path_parts(kernel, x)?;
    let TrajectoryModel::BrownianMotion { drift } = model.model else {
        return Err(Error::Unsupported("first-passage sampler needs a Brownian model".into()));
    };
    let mut out = Vec::new();
    let Some(&t0) = times.first() else {
        return Ok(out);
    };
    let mut y = z + drift * t0 + t0.abs().sqrt() * rng.normal();
    let mut i = 0;
    loop {
        if (lo..=hi).contains(&y) {
            let v = kernel.amplitude * phi.eval(y);
            if v != 0.0 {
                out.push((i, v));
            }
            if i + 1 == times.len() {
                break;
            }
            let dt = times[i + 1] - times[i];
            y += drift * dt + dt.sqrt() * rng.normal();
            i += 1;
            continue;
        }
        let (level, dir) = if y < lo { (lo, 1.0) } else { (hi, -1.0) };
        let Some(tau) = first_passage((level - y).abs(), dir * drift, rng) else {
            break;
        };
        let target = times[i] + tau;
        let j = i + times[i..].partition_point(|&t| t < target);
        if j >= times.len() {
            break;
        }
        let dt = times[j] - target;
        y = level + drift * dt + dt.sqrt() * rng.normal();
        i = j;
    }
    Ok(out)
}

/// `φ(z + W(t))` on a freshly drawn fBm trajectory.
fn fresh_path(kernel: &KernelSpec, x: &Point, times: &[f64], rng: &mut RngStream) -> Result<Vec<(usize, f64)>> {
    let (model, phi, z) = path_parts(kernel, x)?;
    let TrajectoryModel::Fbm { hurst } = model.model else {
        return Err(Error::Unsupported("fresh-path sampler needs an fBm model".into()));
    };
    let w = fbm_on_grid(hurst, times, rng)?;
    Ok(w.into_iter()
        .enumerate()
        .map(|(i, v)| (i, kernel.amplitude * phi.eval(z + v)))
        .filter(|(_, v)| *v != 0.0)
        .collect())
}

/// Truncated LePage series on the grid `times`.
pub fn simulate_series(kernel: &KernelSpec, times: &[f64], cfg: &SeriesConfig, rng: &mut RngStream) -> Result<PathSample> {
    SeriesConfig::new(cfg.n_terms)?;
    let alpha = kernel.alpha;
    let inv = alpha.inv();
    let c = series_constant(alpha).powf(inv);
    let stream = rng.key();
    let mut values = vec![0.0; times.len()];
    let mut second = vec![0.0; times.len()];
    let mut gamma = 0.0;
    let is_sorted = sorted(times);
    let grid = match kernel.term_sampler {
        TermSampler::WalkHits { .. } | TermSampler::SignedWalk { .. } => IntGrid::new(times),
        _ => IntGrid { values: Vec::new(), contiguous: false },
    };
    for _ in 0..cfg.n_terms {
        gamma += rng.exp1();
        let eps = rng.sign();
        let (w, entries) = draw_term(kernel, times, is_sorted, &grid, rng)?;
        let wa = w.powf(inv);
        let coef = c * eps * gamma.powf(-inv) * wa;
        for (i, v) in entries {
            let term = coef * v;
            if !term.is_finite() {
                return Err(Error::NonFinite { time: times[i], point: format!("term with dm/dq = {w}") });
            }
            values[i] += term;
            second[i] += (wa * v).powi(2);
        }
    }
    let n = cfg.n_terms as f64;
    let tail = gamma.powf(1.0 - 2.0 * inv) / (2.0 * inv - 1.0);
    let truncation = second.iter().map(|s| 4.0 * c * (tail * s / n).sqrt()).collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { time: times[i], point: "accumulated series".into() });
    }
    Ok(PathSample { times: times.to_vec(), values, truncation, n_terms: cfg.n_terms, stream })
}

/// Stationary centered Gaussian vector with covariance `r(t_i - t_j)`.
fn gaussian_path(cov: Covariance, times: &[f64], rng: &mut RngStream) -> Result<Vec<f64>> {
    match cov {
        Covariance::Constant => {
            let g = rng.normal();
            Ok(vec![g; times.len()])
        }
        Covariance::Exponential { rate } if sorted(times) => {
            let mut out = Vec::with_capacity(times.len());
            let mut y = rng.normal();
            for (k, &t) in times.iter().enumerate() {
                if k > 0 {
                    let rho = (-rate * (t - times[k - 1])).exp();
                    y = rho * y + (1.0 - rho * rho).max(0.0).sqrt() * rng.normal();
                }
                out.push(y);
            }
            Ok(out)
        }
        _ => {
            let n = times.len();
            let mut c = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    c[i * n + j] = cov.eval(times[i] - times[j]);
                }
            }
            let l = cholesky_psd(&c, n)?;
            let z: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
            Ok(lower_mul(&l, &z))
        }
    }
}

/// `X(t) = c W^{1/β} B(t)`, with `W` positive (α/β)-stable and `B`
/// sub-Gaussian β-stable with covariance `cov` (Gaussian for β = 2).
///
/// `c = √2` makes `‖X(0)‖_α = 1` for every β: `W^{2/β} V` is positive
/// (α/2)-stable when `V` is the positive (β/2)-stable mixing variable of `B`.
/// `w_override` fixes `W` (conditioning device).
pub fn simulate_substable(
    alpha: StabilityIndex,
    beta: f64,
    cov: Covariance,
    times: &[f64],
    rng: &mut RngStream,
    w_override: Option<f64>,
) -> Result<PathSample> {
    let a = alpha.get();
    if !(beta > a && beta <= 2.0) {
        return Err(invalid("beta", format!("need alpha < beta <= 2, got beta = {beta}")));
    }
    let stream = rng.key();
    let w = match w_override {
        Some(w) if w > 0.0 && w.is_finite() => w,
        Some(w) => return Err(invalid("w_override", format!("{w} must be positive"))),
        None => sample_positive_stable(a / beta, rng)?,
    };
    let mut b = gaussian_path(cov, times, rng)?;
    if beta < 2.0 {
        let v = sample_positive_stable(beta / 2.0, rng)?;
        b.iter_mut().for_each(|x| *x *= v.sqrt());
    }
    let c = std::f64::consts::SQRT_2;
    let scale = c * w.powf(1.0 / beta);
    let values = b.into_iter().map(|x| scale * x).collect();
    Ok(PathSample { times: times.to_vec(), values, truncation: vec![0.0; times.len()], n_terms: 0, stream })
}

/// Sites visited with nonzero weight by a walk kernel.
pub fn walk_sites(kernel: &KernelSpec) -> Result<Vec<i64>> {
    match &kernel.f {
        BaseFn::Path { phi, .. } => integer_sites(phi),
        _ => Err(Error::Unsupported("not a path kernel".into())),
    }
}

/// Independent replications of a path, one substream each.
pub fn replicate<T: Send>(
    n: usize,
    rng: &RngStream,
    f: impl Fn(&mut RngStream) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(|i| f(&mut rng.substream(i as u64))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_rejects_few_terms() {
        assert!(SeriesConfig::new(99).is_err());
        assert!(SeriesConfig::new(100).is_ok());
    }

    #[test]
    fn frozen_covariance_gives_constant_path() {
        let alpha = StabilityIndex::new(1.5).unwrap();
        let times: Vec<f64> = (0..50).map(|k| k as f64 * 0.3).collect();
        let p = simulate_substable(alpha, 2.0, Covariance::Constant, &times, &mut RngStream::new(1, 0), None).unwrap();
        assert!(p.values.iter().all(|v| *v == p.values[0]));
    }

    #[test]
    fn fixed_mixing_variable_gives_scaled_gaussian() {
        let alpha = StabilityIndex::new(1.2).unwrap();
        let times = [0.0, 0.5, 2.0];
        let cov = Covariance::Exponential { rate: 1.0 };
        let p = simulate_substable(alpha, 2.0, cov, &times, &mut RngStream::new(4, 0), Some(1.0)).unwrap();
        let b = gaussian_path(cov, &times, &mut RngStream::new(4, 0)).unwrap();
        for (x, g) in p.values.iter().zip(b) {
            assert_eq!(*x, std::f64::consts::SQRT_2 * g);
        }
    }

    #[test]
    fn beta_range_is_checked() {
        let alpha = StabilityIndex::new(1.5).unwrap();
        let cov = Covariance::Constant;
        assert!(simulate_substable(alpha, 1.4, cov, &[0.0], &mut RngStream::new(1, 0), None).is_err());
        assert!(simulate_substable(alpha, 2.1, cov, &[0.0], &mut RngStream::new(1, 0), None).is_err());
    }

    #[test]
    fn indefinite_covariance_is_rejected() {
        let c = [1.0, 1.5, 1.5, 1.0];
        assert!(cholesky_psd(&c, 2).is_err());
    }
}
