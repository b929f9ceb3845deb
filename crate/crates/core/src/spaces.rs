//! Control measure spaces `(E, m)` with equivalent sampling laws `q`.
//!
//! Each space draws points from a probability measure `q ~ m` and reports
//! `dm/dq`, so integrals against `m` become importance-weighted averages.

use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::Arc;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::flows::{LevelMeasure, Point};
use crate::paths::PathModel;
use crate::rng::RngStream;

/// A σ-finite measure space with a sampling law.
pub trait MeasureSpace: Send + Sync + Debug {
    fn name(&self) -> String;
    fn sample(&self, rng: &mut RngStream) -> Point;
    /// `dm/dq (x)`, strictly positive on the support of `q`.
    fn density_dm_dq(&self, x: &Point) -> f64;
    /// `m(E)`, or `None` for infinite measure.
    fn total_mass(&self) -> Option<f64>;
}

/// Sampling laws on the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LineSampler {
    Gaussian { mean: f64, sd: f64 },
    Laplace { mean: f64, scale: f64 },
    Cauchy { center: f64, scale: f64 },
    /// Uniform on `[lo, hi]` with mass `1 - tail` and exponential tails of
    /// rate 1 carrying `tail / 2` on each side.
    UniformWithTails { lo: f64, hi: f64, tail: f64 },
}

impl LineSampler {
    pub fn standard_gaussian() -> Self {
        LineSampler::Gaussian { mean: 0.0, sd: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            LineSampler::Gaussian { sd, .. } => sd > 0.0,
            LineSampler::Laplace { scale, .. } | LineSampler::Cauchy { scale, .. } => scale > 0.0,
            LineSampler::UniformWithTails { lo, hi, tail } => hi > lo && tail > 0.0 && tail < 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(invalid("line_sampler", format!("{self:?}")))
        }
    }

    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        match *self {
            LineSampler::Gaussian { mean, sd } => mean + sd * rng.normal(),
            LineSampler::Laplace { mean, scale } => mean + rng.sign() * scale * rng.exp1(),
            LineSampler::Cauchy { center, scale } => center + scale * (PI * (rng.uniform_open() - 0.5)).tan(),
            LineSampler::UniformWithTails { lo, hi, tail } => {
                let u = rng.uniform_open();
                if u < tail / 2.0 {
                    lo - rng.exp1()
                } else if u < tail {
                    hi + rng.exp1()
                } else {
                    lo + (hi - lo) * rng.uniform_open()
                }
            }
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        match *self {
            LineSampler::Gaussian { mean, sd } => {
                let z = (x - mean) / sd;
                (-0.5 * z * z).exp() / (sd * (2.0 * PI).sqrt())
            }
            LineSampler::Laplace { mean, scale } => (-(x - mean).abs() / scale).exp() / (2.0 * scale),
            LineSampler::Cauchy { center, scale } => {
                let z = (x - center) / scale;
                1.0 / (PI * scale * (1.0 + z * z))
            }
            LineSampler::UniformWithTails { lo, hi, tail } => {
                if x < lo {
                    0.5 * tail * (x - lo).exp()
                } else if x > hi {
                    0.5 * tail * (hi - x).exp()
                } else {
                    (1.0 - tail) / (hi - lo)
                }
            }
        }
    }
}

/// The real line with Lebesgue measure.
#[derive(Debug, Clone, Copy)]
pub struct LineSpace {
    pub sampler: LineSampler,
}

impl MeasureSpace for LineSpace {
    fn name(&self) -> String {
        format!("line(q={:?})", self.sampler)
    }
    fn sample(&self, rng: &mut RngStream) -> Point {
        Point::Real(self.sampler.sample(rng))
    }
    fn density_dm_dq(&self, x: &Point) -> f64 {
        1.0 / self.sampler.density(x.coord())
    }
    fn total_mass(&self) -> Option<f64> {
        None
    }
}

/// Sampling laws on a bounded interval `[0, length)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum IntervalSampler {
    Uniform,
    /// Density `(1 + tilt·(2u - 1)) / length` at `u = x / length`, `|tilt| < 1`.
    Tilted { tilt: f64 },
}

/// `[0, length)` with Lebesgue measure.
#[derive(Debug, Clone, Copy)]
pub struct IntervalSpace {
    pub length: f64,
    pub sampler: IntervalSampler,
}

impl IntervalSpace {
    pub fn new(length: f64, sampler: IntervalSampler) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(invalid("length", "interval length must be positive"));
        }
        if let IntervalSampler::Tilted { tilt } = sampler {
            if !(tilt.abs() < 1.0) {
                return Err(invalid("tilt", "must lie in (-1, 1)"));
            }
        }
        Ok(Self { length, sampler })
    }

    fn q_density(&self, x: f64) -> f64 {
        match self.sampler {
            IntervalSampler::Uniform => 1.0 / self.length,
            IntervalSampler::Tilted { tilt } => {
                let u = x / self.length;
                (1.0 + tilt * (2.0 * u - 1.0)) / self.length
            }
        }
    }
}

impl MeasureSpace for IntervalSpace {
    fn name(&self) -> String {
        format!("interval[0,{})", self.length)
    }
    fn sample(&self, rng: &mut RngStream) -> Point {
        let u = rng.uniform_open();
        let v = match self.sampler {
            IntervalSampler::Uniform => u,
            IntervalSampler::Tilted { tilt } if tilt.abs() < 1e-12 => u,
            IntervalSampler::Tilted { tilt } => {
                // Inverse CDF of (1 + tilt(2v - 1)) on [0, 1).
                let a = tilt;
                let b = 1.0 - tilt;
                (-b + (b * b + 4.0 * a * u).sqrt()) / (2.0 * a)
            }
        };
        Point::Real((v * self.length).min(self.length * (1.0 - f64::EPSILON)))
    }
    fn density_dm_dq(&self, x: &Point) -> f64 {
        1.0 / self.q_density(x.coord())
    }
    fn total_mass(&self) -> Option<f64> {
        Some(self.length)
    }
}

/// One component of a [`UnionSpace`].
#[derive(Debug, Clone)]
pub struct UnionComponent {
    pub space: Arc<dyn MeasureSpace>,
    /// Probability that `q` picks this component.
    pub q_weight: f64,
    /// Multiplier of the component's own measure inside `m`.
    pub m_weight: f64,
}

/// Disjoint union of real-coordinate spaces; points are `Tagged`.
#[derive(Debug, Clone)]
pub struct UnionSpace {
    pub components: Vec<UnionComponent>,
}

impl UnionSpace {
    pub fn new(components: Vec<UnionComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(invalid("components", "union needs at least one component"));
        }
        let total: f64 = components.iter().map(|c| c.q_weight).sum();
        if components.iter().any(|c| !(c.q_weight > 0.0 && c.m_weight > 0.0)) || (total - 1.0).abs() > 1e-9 {
            return Err(invalid("components", "q weights must be positive and sum to 1; m weights positive"));
        }
        Ok(Self { components })
    }
}

impl MeasureSpace for UnionSpace {
    fn name(&self) -> String {
        let names: Vec<String> = self.components.iter().map(|c| c.space.name()).collect();
        format!("union[{}]", names.join(", "))
    }
    fn sample(&self, rng: &mut RngStream) -> Point {
        let u = rng.uniform_open();
        let mut acc = 0.0;
        let mut k = self.components.len() - 1;
        for (i, c) in self.components.iter().enumerate() {
            acc += c.q_weight;
            if u < acc {
                k = i;
                break;
            }
        }
        let x = self.components[k].space.sample(rng).coord();
        Point::Tagged { tag: k as u32, x }
    }
    fn density_dm_dq(&self, x: &Point) -> f64 {
        match *x {
            Point::Tagged { tag, x } => {
                let c = &self.components[tag as usize];
                c.m_weight * c.space.density_dm_dq(&Point::Real(x)) / c.q_weight
            }
            _ => f64::NAN,
        }
    }
    fn total_mass(&self) -> Option<f64> {
        self.components.iter().map(|c| c.space.total_mass().map(|m| m * c.m_weight)).sum()
    }
}

/// Sampling law of the level coordinate of path-space points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LevelSampler {
    /// No level (probability spaces).
    None,
    /// Level drawn from a law on the line (Lebesgue level measure).
    Line(LineSampler),
    /// Two-sided geometric on ℤ: `q(z) = (1-ρ)/(1+ρ) · ρ^{|z|}`.
    Geometric { rho: f64 },
    /// Cauchy(0, scale) rounded to the nearest integer.
    DiscreteCauchy { scale: f64 },
}

impl LevelSampler {
    fn validate(&self, level: LevelMeasure) -> Result<()> {
        let ok = match (*self, level) {
            (LevelSampler::None, LevelMeasure::Probability) => true,
            (LevelSampler::Line(s), LevelMeasure::Lebesgue) => s.validate().is_ok(),
            (LevelSampler::Geometric { rho }, LevelMeasure::Counting) => rho > 0.0 && rho < 1.0,
            (LevelSampler::DiscreteCauchy { scale }, LevelMeasure::Counting) => scale >= 1.0,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(invalid("level_sampler", format!("{self:?} does not match level measure {level:?}")))
        }
    }

    fn sample(&self, rng: &mut RngStream) -> f64 {
        match *self {
            LevelSampler::None => 0.0,
            LevelSampler::Line(s) => s.sample(rng),
            LevelSampler::Geometric { rho } => {
                let u = rng.uniform_open();
                let p0 = (1.0 - rho) / (1.0 + rho);
                if u < p0 {
                    return 0.0;
                }
                // |z| ≥ 1 is geometric with ratio ρ, symmetric sign.
                let k = 1.0 + (rng.uniform_open().ln() / rho.ln()).floor();
                rng.sign() * k
            }
            LevelSampler::DiscreteCauchy { scale } => loop {
                let z = (scale * (PI * (rng.uniform_open() - 0.5)).tan()).round();
                if z.abs() < 1e15 {
                    break z;
                }
            },
        }
    }

    fn q(&self, z: f64) -> f64 {
        match *self {
            LevelSampler::None => 1.0,
            LevelSampler::Line(s) => s.density(z),
            LevelSampler::Geometric { rho } => (1.0 - rho) / (1.0 + rho) * rho.powf(z.abs()),
            LevelSampler::DiscreteCauchy { scale } => {
                (((z + 0.5) / scale).atan() - ((z - 0.5) / scale).atan()) / PI
            }
        }
    }
}

/// Path space: seed-identified trajectories times a level coordinate.
#[derive(Debug, Clone, Copy)]
pub struct PathSpace {
    pub model: PathModel,
    pub level: LevelMeasure,
    pub sampler: LevelSampler,
}

impl PathSpace {
    pub fn new(model: PathModel, level: LevelMeasure, sampler: LevelSampler) -> Result<Self> {
        sampler.validate(level)?;
        Ok(Self { model, level, sampler })
    }
}

impl MeasureSpace for PathSpace {
    fn name(&self) -> String {
        format!("paths({}, level={:?})", self.model.model, self.level)
    }
    fn sample(&self, rng: &mut RngStream) -> Point {
        let seed = rng.next_u64();
        let z = self.sampler.sample(rng);
        Point::Path { seed, offset: 0.0, z }
    }
    fn density_dm_dq(&self, x: &Point) -> f64 {
        match *x {
            Point::Path { z, .. } => 1.0 / self.sampler.q(z),
            _ => f64::NAN,
        }
    }
    fn total_mass(&self) -> Option<f64> {
        match self.level {
            LevelMeasure::Probability => Some(1.0),
            _ => None,
        }
    }
}

/// A finite empirical measure `Σ_i mass_i δ_{x_i}`, sampled uniformly.
#[derive(Debug, Clone)]
pub struct EmpiricalSpace {
    pub points: Vec<Point>,
    pub masses: Vec<f64>,
}

impl EmpiricalSpace {
    pub fn new(points: Vec<Point>, masses: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != masses.len() || masses.iter().any(|m| !(*m > 0.0)) {
            return Err(invalid("points", "empirical measure needs matching points and positive masses"));
        }
        Ok(Self { points, masses })
    }

    fn index_of(&self, x: &Point) -> Option<usize> {
        self.points.iter().position(|p| p == x)
    }
}

impl MeasureSpace for EmpiricalSpace {
    fn name(&self) -> String {
        format!("empirical({} atoms)", self.points.len())
    }
    fn sample(&self, rng: &mut RngStream) -> Point {
        let i = (rng.uniform_open() * self.points.len() as f64) as usize % self.points.len();
        self.points[i]
    }
    fn density_dm_dq(&self, x: &Point) -> f64 {
        self.index_of(x).map_or(f64::NAN, |i| self.masses[i] * self.points.len() as f64)
    }
    fn total_mass(&self) -> Option<f64> {
        Some(self.masses.iter().sum())
    }
}
