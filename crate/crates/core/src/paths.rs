//! Seed-identified random trajectories for path-space measure spaces.
//!
//! A trajectory is a two-sided path `W` with `W(0) = 0` (or a stationary
//! path for Gaussian models) determined entirely by a 64-bit seed. Values are
//! produced on demand on a uniform grid of step `dt` and kept in a small
//! per-thread cache, so path-space points only ever store `(seed, offset, z)`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;
use std::sync::Arc;
use std::str::FromStr;

use rand::RngCore;
use rand_distr::{Binomial, Distribution, InverseGaussian};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{cholesky_psd, lower_mul};
use crate::rng::RngStream;

/// Steps generated per lazily extended block of a Markov trajectory.
const BLOCK: usize = 4096;
/// Trajectories kept per thread.
const CACHE_SLOTS: usize = 8;

/// Stationary covariance functions for Gaussian models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Covariance {
    /// `r(t) = exp(-rate |t|)` (Ornstein–Uhlenbeck).
    Exponential { rate: f64 },
    /// `r(t) = 1`: a path frozen at its initial value.
    Constant,
    /// `r(t) = exp(-t² / (2 length²))`.
    SquaredExponential { length: f64 },
}

impl Covariance {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Covariance::Exponential { rate } => (-rate * t.abs()).exp(),
            Covariance::Constant => 1.0,
            Covariance::SquaredExponential { length } => (-t * t / (2.0 * length * length)).exp(),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Covariance::Exponential { rate } if !(rate.is_finite() && rate > 0.0) => {
                Err(invalid("rate", "exponential covariance rate must be positive"))
            }
            Covariance::SquaredExponential { length } if !(length.is_finite() && length > 0.0) => {
                Err(invalid("length", "covariance length must be positive"))
            }
            _ => Ok(()),
        }
    }
}

/// Law of the trajectory attached to each path-space point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrajectoryModel {
    /// Simple symmetric random walk on ℤ (discrete time).
    NullRecurrentWalk,
    /// Brownian motion with linear drift.
    BrownianMotion { drift: f64 },
    /// Fractional Brownian motion with Hurst index `hurst ∈ (0, 1)`.
    Fbm { hurst: f64 },
    /// Centered stationary Gaussian process with unit variance.
    StationaryGaussian { cov: Covariance },
    /// The zero path.
    Zero,
}

impl TrajectoryModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TrajectoryModel::BrownianMotion { drift } if !drift.is_finite() => {
                Err(invalid("drift", "must be finite"))
            }
            TrajectoryModel::Fbm { hurst } if !(hurst > 0.0 && hurst < 1.0) => {
                Err(invalid("hurst", format!("{hurst} must lie in (0, 1)")))
            }
            TrajectoryModel::StationaryGaussian { cov } => cov.validate(),
            _ => Ok(()),
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, TrajectoryModel::NullRecurrentWalk)
    }

    /// Whether the law of the path is invariant under time shifts.
    pub fn is_stationary(&self) -> bool {
        matches!(self, TrajectoryModel::StationaryGaussian { .. } | TrajectoryModel::Zero)
    }

    fn key_bits(&self) -> (u8, u64) {
        match *self {
            TrajectoryModel::NullRecurrentWalk => (0, 0),
            TrajectoryModel::BrownianMotion { drift } => (1, drift.to_bits()),
            TrajectoryModel::Fbm { hurst } => (2, hurst.to_bits()),
            TrajectoryModel::StationaryGaussian { cov } => match cov {
                Covariance::Exponential { rate } => (3, rate.to_bits()),
                Covariance::Constant => (4, 0),
                Covariance::SquaredExponential { length } => (5, length.to_bits()),
            },
            TrajectoryModel::Zero => (6, 0),
        }
    }
}

impl fmt::Display for TrajectoryModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TrajectoryModel::NullRecurrentWalk => write!(f, "null_recurrent_walk"),
            TrajectoryModel::BrownianMotion { drift } if drift == 0.0 => write!(f, "brownian_motion"),
            TrajectoryModel::BrownianMotion { drift } => write!(f, "brownian_motion(drift={drift})"),
            TrajectoryModel::Fbm { hurst } => write!(f, "fbm({hurst})"),
            TrajectoryModel::StationaryGaussian { cov } => match cov {
                Covariance::Exponential { rate } => write!(f, "stationary_gaussian(exp,{rate})"),
                Covariance::Constant => write!(f, "stationary_gaussian(constant)"),
                Covariance::SquaredExponential { length } => write!(f, "stationary_gaussian(sqexp,{length})"),
            },
            TrajectoryModel::Zero => write!(f, "zero"),
        }
    }
}

impl FromStr for TrajectoryModel {
    type Err = Error;

    /// Parses descriptors such as `fbm(0.7)`, `brownian_motion(drift=0.5)`,
    /// `stationary_gaussian(exp,1.0)` or `null_recurrent_walk`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let unknown = || Error::UnknownModel(s.to_string());
        let (head, args) = match s.find('(') {
            Some(i) if s.ends_with(')') => (&s[..i], Some(&s[i + 1..s.len() - 1])),
            Some(_) => return Err(unknown()),
            None => (s, None),
        };
        let args: Vec<&str> = args
            .map(|a| a.split(',').map(str::trim).filter(|x| !x.is_empty()).collect())
            .unwrap_or_default();
        let num = |v: &str| -> Result<f64> {
            let v = v.rsplit('=').next().unwrap_or(v);
            v.trim().parse::<f64>().map_err(|_| unknown())
        };
        let model = match (head, args.as_slice()) {
            ("null_recurrent_walk" | "walk", []) => TrajectoryModel::NullRecurrentWalk,
            ("brownian_motion" | "brownian", []) => TrajectoryModel::BrownianMotion { drift: 0.0 },
            ("brownian_motion" | "brownian", [d]) => TrajectoryModel::BrownianMotion { drift: num(d)? },
            ("fbm", [h]) => TrajectoryModel::Fbm { hurst: num(h)? },
            ("stationary_gaussian", [kind, rest @ ..]) => {
                let cov = match (*kind, rest) {
                    ("exp" | "exponential", [r]) => Covariance::Exponential { rate: num(r)? },
                    ("exp" | "exponential", []) => Covariance::Exponential { rate: 1.0 },
                    ("constant", []) => Covariance::Constant,
                    ("sqexp", [l]) => Covariance::SquaredExponential { length: num(l)? },
                    _ => return Err(unknown()),
                };
                TrajectoryModel::StationaryGaussian { cov }
            }
            ("stationary_gaussian", []) => {
                TrajectoryModel::StationaryGaussian { cov: Covariance::Exponential { rate: 1.0 } }
            }
            ("zero", []) => TrajectoryModel::Zero,
            _ => return Err(unknown()),
        };
        model.validate()?;
        Ok(model)
    }
}

/// A trajectory model together with its sampling grid.
///
/// `horizon` bounds the generated window only for models that cannot be
/// extended lazily (fBm); Markov models grow on demand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathModel {
    pub model: TrajectoryModel,
    pub dt: f64,
    pub horizon: f64,
}

impl PathModel {
    pub fn new(model: TrajectoryModel, dt: f64, horizon: f64) -> Result<Self> {
        model.validate()?;
        if model.is_discrete() && dt != 1.0 {
            return Err(invalid("dt", "the random walk lives on integer times (dt = 1)"));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid("dt", "grid step must be positive"));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(invalid("horizon", "must be positive"));
        }
        if let TrajectoryModel::StationaryGaussian { cov: Covariance::SquaredExponential { .. } } = model {
            return Err(Error::Unsupported(
                "pathwise generation of squared-exponential Gaussian trajectories".into(),
            ));
        }
        Ok(Self { model, dt, horizon })
    }

    /// Default grid: unit steps for the walk, `dt = 0.05` otherwise, with a
    /// window covering `[-horizon, horizon]`.
    pub fn with_defaults(model: TrajectoryModel, horizon: f64) -> Result<Self> {
        let dt = if model.is_discrete() { 1.0 } else { 0.05 };
        Self::new(model, dt, horizon)
    }

    fn cache_key(&self, seed: u64) -> CacheKey {
        let (kind, bits) = self.model.key_bits();
        CacheKey { kind, bits, dt: self.dt.to_bits(), horizon: self.horizon.to_bits(), seed }
    }

    /// `W(t)` for the trajectory identified by `seed`.
    pub fn value_at(&self, seed: u64, t: f64) -> Result<f64> {
        with_trajectory(self, seed, |tr| tr.value(self, seed, t))
    }

    /// `W(t)` for each `t` in `times`, sharing one cache lookup.
    pub fn values_at(&self, seed: u64, times: &[f64]) -> Result<Vec<f64>> {
        with_trajectory(self, seed, |tr| times.iter().map(|&t| tr.value(self, seed, t)).collect())
    }

    /// One draw of `(Y(t_i) - Y(t_min))_i` from the finite-dimensional law of
    /// the model. The output depends on `times` only through their gaps, so
    /// shifted time sets reuse identical random numbers.
    pub fn sample_increments(&self, times: &[f64], rng: &mut RngStream) -> Result<Vec<f64>> {
        let k = times.len();
        if k == 0 {
            return Ok(Vec::new());
        }
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| times[a].partial_cmp(&times[b]).unwrap());
        let t0 = times[order[0]];
        let mut out = vec![0.0; k];
        match self.model {
            TrajectoryModel::Zero | TrajectoryModel::StationaryGaussian { cov: Covariance::Constant } => {}
            TrajectoryModel::NullRecurrentWalk => {
                let mut pos = 0.0;
                for w in order.windows(2) {
                    let gap = (times[w[1]] - times[w[0]]).round() as u64;
                    pos += walk_displacement(gap, rng);
                    out[w[1]] = pos;
                }
            }
            TrajectoryModel::BrownianMotion { drift } => {
                let mut pos = 0.0;
                for w in order.windows(2) {
                    let gap = times[w[1]] - times[w[0]];
                    pos += drift * gap + gap.sqrt() * rng.normal();
                    out[w[1]] = pos;
                }
            }
            TrajectoryModel::StationaryGaussian { cov: Covariance::Exponential { rate } } => {
                let y0 = rng.normal();
                let mut y = y0;
                for w in order.windows(2) {
                    let rho = (-rate * (times[w[1]] - times[w[0]])).exp();
                    y = rho * y + (1.0 - rho * rho).max(0.0).sqrt() * rng.normal();
                    out[w[1]] = y - y0;
                }
            }
            TrajectoryModel::Fbm { .. } | TrajectoryModel::StationaryGaussian { .. } => {
                let lags: Vec<f64> = order.iter().map(|&i| times[i] - t0).collect();
                let cov = self.increment_covariance(&lags);
                let l = cholesky_psd(&cov, k)?;
                let z: Vec<f64> = (0..k).map(|_| rng.normal()).collect();
                let y = lower_mul(&l, &z);
                for (pos, &i) in order.iter().enumerate() {
                    out[i] = y[pos];
                }
            }
        }
        Ok(out)
    }

    /// Covariance of `Y(s_i) - Y(0)` for lags `s_i ≥ 0` (Gaussian models).
    fn increment_covariance(&self, lags: &[f64]) -> Vec<f64> {
        let k = lags.len();
        let mut c = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                let (a, b) = (lags[i], lags[j]);
                c[i * k + j] = match self.model {
                    TrajectoryModel::Fbm { hurst } => {
                        let h2 = 2.0 * hurst;
                        0.5 * (a.abs().powf(h2) + b.abs().powf(h2) - (a - b).abs().powf(h2))
                    }
                    TrajectoryModel::StationaryGaussian { cov } => {
                        cov.eval(a - b) - cov.eval(a) - cov.eval(b) + cov.eval(0.0)
                    }
                    TrajectoryModel::BrownianMotion { .. } => a.min(b),
                    _ => 0.0,
                };
            }
        }
        c
    }
}

/// `2·Binomial(gap, 1/2) − gap`: displacement of the walk over `gap` steps.
pub fn walk_displacement(gap: u64, rng: &mut RngStream) -> f64 {
    if gap == 0 {
        return 0.0;
    }
    // Popcounts of random words are exact and beat binomial setup costs
    // for short gaps.
    let b = if gap <= 1024 {
        let (full, rest) = (gap / 64, gap % 64);
        let mut ones: u32 = (0..full).map(|_| rand::RngCore::next_u64(rng).count_ones()).sum();
        if rest > 0 {
            ones += (rand::RngCore::next_u64(rng) & ((1u64 << rest) - 1)).count_ones();
        }
        f64::from(ones)
    } else {
        Binomial::new(gap, 0.5).expect("valid binomial").sample(rng) as f64
    };
    2.0 * b - gap as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct CacheKey {
    kind: u8,
    bits: u64,
    dt: u64,
    horizon: u64,
    seed: u64,
}

/// Grid values: `fwd[k] = W(k dt)`, `bwd[k] = W(-k dt)`.
#[derive(Debug)]
struct Trajectory {
    fwd: Vec<f64>,
    bwd: Vec<f64>,
    /// Grid extent of a trajectory that cannot be extended.
    fixed: Option<usize>,
}

thread_local! {
    static CACHE: RefCell<Vec<(CacheKey, Rc<RefCell<Trajectory>>)>> = const { RefCell::new(Vec::new()) };
}

fn with_trajectory<R>(model: &PathModel, seed: u64, f: impl FnOnce(&mut Trajectory) -> Result<R>) -> Result<R> {
    let key = model.cache_key(seed);
    let tr = CACHE.with(|c| -> Result<Rc<RefCell<Trajectory>>> {
        let mut c = c.borrow_mut();
        if let Some(pos) = c.iter().position(|(k, _)| *k == key) {
            let entry = c.remove(pos);
            let tr = entry.1.clone();
            c.push(entry);
            return Ok(tr);
        }
        let tr = Rc::new(RefCell::new(Trajectory::new(model, seed)?));
        if c.len() >= CACHE_SLOTS {
            c.remove(0);
        }
        c.push((key, tr.clone()));
        Ok(tr)
    })?;
    let mut guard = tr.borrow_mut();
    f(&mut guard)
}

impl Trajectory {
    fn new(model: &PathModel, seed: u64) -> Result<Self> {
        match model.model {
            TrajectoryModel::Fbm { hurst } => {
                let n = (model.horizon / model.dt).ceil() as usize + 1;
                let (fwd, bwd) = fbm_window(hurst, model.dt, n, seed);
                Ok(Self { fwd, bwd, fixed: Some(n) })
            }
            _ => {
                let y0 = match model.model {
                    TrajectoryModel::StationaryGaussian { .. } => RngStream::new(seed, 0).normal(),
                    _ => 0.0,
                };
                Ok(Self { fwd: vec![y0], bwd: vec![y0], fixed: None })
            }
        }
    }

    fn ensure(&mut self, model: &PathModel, seed: u64, forward: bool, upto: usize, time: f64) -> Result<()> {
        if let Some(n) = self.fixed {
            if upto > n {
                return Err(Error::OutsideTrajectoryWindow { time, horizon: model.horizon });
            }
            return Ok(());
        }
        let side = if forward { &mut self.fwd } else { &mut self.bwd };
        while side.len() <= upto {
            let block = (side.len() - 1) / BLOCK;
            let stream = 1 + 2 * block as u64 + u64::from(!forward);
            let mut rng = RngStream::new(seed, stream);
            extend_block(model, side, &mut rng);
        }
        Ok(())
    }

    fn grid(&mut self, model: &PathModel, seed: u64, k: i64, time: f64) -> Result<f64> {
        let idx = k.unsigned_abs() as usize;
        let forward = k >= 0;
        self.ensure(model, seed, forward, idx, time)?;
        Ok(if forward { self.fwd[idx] } else { self.bwd[idx] })
    }

    fn value(&mut self, model: &PathModel, seed: u64, t: f64) -> Result<f64> {
        if model.model == TrajectoryModel::Zero {
            return Ok(0.0);
        }
        if !t.is_finite() {
            return Err(invalid("time", "non-finite trajectory time"));
        }
        let u = t / model.dt;
        let k0 = u.floor();
        let frac = u - k0;
        let k0 = k0 as i64;
        let v0 = self.grid(model, seed, k0, t)?;
        if frac < 1e-9 || model.model.is_discrete() {
            return Ok(v0);
        }
        if frac > 1.0 - 1e-9 {
            return self.grid(model, seed, k0 + 1, t);
        }
        let v1 = self.grid(model, seed, k0 + 1, t)?;
        Ok(v0 + frac * (v1 - v0))
    }
}

fn extend_block(model: &PathModel, side: &mut Vec<f64>, rng: &mut RngStream) {
    let dt = model.dt;
    let mut y = *side.last().unwrap();
    match model.model {
        TrajectoryModel::NullRecurrentWalk => {
            let mut bits = 0u64;
            for i in 0..BLOCK {
                if i % 64 == 0 {
                    bits = rng.next_u64();
                }
                y += if bits & 1 == 1 { 1.0 } else { -1.0 };
                bits >>= 1;
                side.push(y);
            }
        }
        TrajectoryModel::BrownianMotion { drift } => {
            let sd = dt.sqrt();
            for _ in 0..BLOCK {
                y += drift * dt + sd * rng.normal();
                side.push(y);
            }
        }
        TrajectoryModel::StationaryGaussian { cov: Covariance::Exponential { rate } } => {
            let rho = (-rate * dt).exp();
            let sd = (1.0 - rho * rho).sqrt();
            for _ in 0..BLOCK {
                y = rho * y + sd * rng.normal();
                side.push(y);
            }
        }
        _ => side.extend(std::iter::repeat_n(y, BLOCK)),
    }
}

type Embedding = (Rc<Vec<f64>>, Arc<dyn Fft<f64>>);

thread_local! {
    static EMBEDDINGS: RefCell<(FftPlanner<f64>, HashMap<(u64, usize), Embedding>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

/// Square roots of the circulant eigenvalues (scaled by `1/m`) and the FFT
/// of size `m`, cached per thread.
fn embedding(hurst: f64, m: usize) -> Embedding {
    EMBEDDINGS.with(|cell| {
        let (planner, cache) = &mut *cell.borrow_mut();
        if let Some(e) = cache.get(&(hurst.to_bits(), m)) {
            return e.clone();
        }
        let h2 = 2.0 * hurst;
        let gamma = |k: f64| 0.5 * ((k + 1.0).abs().powf(h2) - 2.0 * k.abs().powf(h2) + (k - 1.0).abs().powf(h2));
        let half = m / 2;
        let mut row: Vec<Complex<f64>> = (0..m)
            .map(|j| {
                let k = if j <= half { j } else { m - j };
                Complex::new(gamma(k as f64), 0.0)
            })
            .collect();
        let fft = planner.plan_fft_forward(m);
        fft.process(&mut row);
        let sq = row.iter().map(|l| (l.re.max(0.0) / m as f64).sqrt()).collect();
        let e = (Rc::new(sq), fft);
        cache.insert((hurst.to_bits(), m), e.clone());
        e
    })
}

/// Fractional Gaussian noise of length `n` with unit step variance, by
/// circulant embedding (Davies–Harte). Requires `hurst ≥ 1/2` for the
/// embedding to be nonnegative; small negative eigenvalues are clipped.
pub fn fgn_davies_harte(hurst: f64, n: usize, rng: &mut RngStream) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    let m = (2 * n).next_power_of_two().max(2);
    let (sq, fft) = embedding(hurst, m);
    let mut xi: Vec<Complex<f64>> = sq.iter().map(|&s| Complex::new(s * rng.normal(), s * rng.normal())).collect();
    fft.process(&mut xi);
    xi.iter().take(n).map(|c| c.re).collect()
}

/// A fresh fBm draw `W(t_i)`, `W(0) = 0`. Grids of the form `t_i = (k0 + i)Δ`
/// with integer `k0 ≥ 0` use circulant embedding; other grids a Cholesky
/// factor of the covariance.
pub fn fbm_on_grid(hurst: f64, times: &[f64], rng: &mut RngStream) -> Result<Vec<f64>> {
    let n = times.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let step = if n > 1 { times[1] - times[0] } else { times[0].abs() };
    let k0 = if step > 0.0 { times[0] / step } else { f64::NAN };
    let arithmetic = step > 0.0
        && k0 >= -1e-9
        && (k0 - k0.round()).abs() < 1e-9
        && times.iter().enumerate().all(|(i, &t)| (t - (k0.round() + i as f64) * step).abs() <= 1e-9 * step.max(t.abs()));
    if arithmetic {
        let k0 = k0.round() as usize;
        let noise = fgn_davies_harte(hurst, k0 + n - 1, rng);
        let scale = step.powf(hurst);
        let mut acc = 0.0;
        let mut path = Vec::with_capacity(k0 + n);
        path.push(0.0);
        for g in noise {
            acc += scale * g;
            path.push(acc);
        }
        return Ok(path[k0..k0 + n].to_vec());
    }
    let h2 = 2.0 * hurst;
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (times[i], times[j]);
            c[i * n + j] = 0.5 * (a.abs().powf(h2) + b.abs().powf(h2) - (a - b).abs().powf(h2));
        }
    }
    let l = cholesky_psd(&c, n)?;
    let z: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
    Ok(lower_mul(&l, &z))
}

/// First passage time of `x + νt + B(t)` to a level at distance `d > 0` in
/// the direction of drift `ν`; `None` when the level is never reached.
pub fn first_passage(d: f64, nu: f64, rng: &mut RngStream) -> Option<f64> {
    if d <= 0.0 {
        return Some(0.0);
    }
    if nu == 0.0 {
        let g = rng.normal();
        return Some(d * d / (g * g));
    }
    if nu < 0.0 && rng.uniform_open() > (2.0 * nu * d).exp() {
        return None;
    }
    let ig = InverseGaussian::new(d / nu.abs(), d * d).expect("valid inverse Gaussian");
    Some(ig.sample(rng))
}

/// fBm on the grid `k dt`, `|k| ≤ n`, pinned at `W(0) = 0`.
fn fbm_window(hurst: f64, dt: f64, n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = RngStream::new(seed, 0);
    let noise = fgn_davies_harte(hurst, 2 * n, &mut rng);
    let scale = dt.powf(hurst);
    let mut path = Vec::with_capacity(2 * n + 1);
    let mut acc = 0.0;
    path.push(0.0);
    for g in noise {
        acc += scale * g;
        path.push(acc);
    }
    let origin = path[n];
    let fwd = (0..=n).map(|k| path[n + k] - origin).collect();
    let bwd = (0..=n).map(|k| path[n - k] - origin).collect();
    (fwd, bwd)
}
