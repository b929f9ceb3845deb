//! Nonsingular flows `φ_t` and ±1 cocycles `a_t` on the supported point types.
//!
//! Ground-truth labels on flows are a testing convenience: the underlying
//! notions are defined modulo null sets, so a label only states what the
//! construction is known to be.

use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::paths::PathModel;
use crate::rng::RngStream;

/// A point of one of the shipped measure spaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Point {
    /// A point of the real line or of an interval.
    Real(f64),
    /// A point of component `tag` of a disjoint union.
    Tagged { tag: u32, x: f64 },
    /// A path-space point: the trajectory identified by `seed`, observed from
    /// time `offset`, with additive level `z` (the walk's starting site for
    /// the random walk, the Lebesgue coordinate for increment kernels).
    Path { seed: u64, offset: f64, z: f64 },
}

impl Point {
    /// The real coordinate of `Real` and `Tagged` points.
    pub fn coord(&self) -> f64 {
        match *self {
            Point::Real(x) | Point::Tagged { x, .. } => x,
            Point::Path { offset, .. } => offset,
        }
    }
}

/// Discrete (`ℤ`, counting measure) or continuous (`ℝ`, Lebesgue) time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeDomain {
    Discrete,
    Continuous,
}

impl TimeDomain {
    /// Whether `t` is an admissible time.
    pub fn contains(&self, t: f64) -> bool {
        match self {
            TimeDomain::Discrete => t.is_finite() && t.fract() == 0.0,
            TimeDomain::Continuous => t.is_finite(),
        }
    }
}

/// Declared structure of a flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowClass {
    Dissipative,
    ConservativeNull,
    Positive,
    Unknown,
}

/// A measurable nonsingular flow.
pub trait Flow: Send + Sync + Debug {
    fn name(&self) -> String;
    fn time_domain(&self) -> TimeDomain;
    /// `φ_t(x)`.
    fn apply(&self, t: f64, x: &Point) -> Point;
    /// `d(m∘φ_t)/dm (x)`.
    fn rn_derivative(&self, _t: f64, _x: &Point) -> f64 {
        1.0
    }
    fn ground_truth(&self) -> FlowClass;
    /// Whether the flow preserves a probability measure equivalent to `m`.
    fn invariant_probability(&self) -> bool {
        false
    }
    /// Distance used to measure axiom residuals.
    fn distance(&self, a: &Point, b: &Point) -> f64;
    /// A test point for the axiom harness.
    fn sample_point(&self, rng: &mut RngStream) -> Point;
}

/// A ±1-valued cocycle for a flow.
pub trait Cocycle: Send + Sync + Debug {
    fn eval(&self, t: f64, x: &Point) -> Result<f64>;
    /// `a_t(x)` for many `t`. Implementations that accumulate along the
    /// orbit override this.
    fn orbit(&self, x: &Point, times: &[f64]) -> Result<Vec<f64>> {
        times.iter().map(|&t| self.eval(t, x)).collect()
    }
    fn is_trivial(&self) -> bool {
        false
    }
}

/// `x ↦ x + t` on the real line with Lebesgue measure.
#[derive(Debug, Clone, Copy)]
pub struct TranslationFlow {
    pub domain: TimeDomain,
}

/// `φ_t(x) = x + t`, continuous time.
pub fn make_translation_flow() -> TranslationFlow {
    TranslationFlow { domain: TimeDomain::Continuous }
}

impl Flow for TranslationFlow {
    fn name(&self) -> String {
        "translation".into()
    }
    fn time_domain(&self) -> TimeDomain {
        self.domain
    }
    fn apply(&self, t: f64, x: &Point) -> Point {
        Point::Real(x.coord() + t)
    }
    fn ground_truth(&self) -> FlowClass {
        FlowClass::Dissipative
    }
    fn distance(&self, a: &Point, b: &Point) -> f64 {
        (a.coord() - b.coord()).abs()
    }
    fn sample_point(&self, rng: &mut RngStream) -> Point {
        // Dyadic points keep the affine arithmetic exact.
        Point::Real(((rng.uniform_open() - 0.5) * 204_800.0).round() / 1024.0)
    }
}

/// `x ↦ x + rate·t mod period` on `[0, period)` with Lebesgue measure.
#[derive(Debug, Clone, Copy)]
pub struct PeriodicFlow {
    pub period: f64,
    pub rate: f64,
    pub domain: TimeDomain,
}

impl PeriodicFlow {
    pub fn new(period: f64, rate: f64, domain: TimeDomain) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(invalid("period", "must be positive"));
        }
        if !(rate.is_finite() && rate != 0.0) {
            return Err(invalid("rate", "must be finite and nonzero"));
        }
        Ok(Self { period, rate, domain })
    }
}

/// Rotation of the unit circle `[0, 1)` by `angle_rate` per unit time.
pub fn make_rotation_flow(angle_rate: f64) -> Result<PeriodicFlow> {
    PeriodicFlow::new(1.0, angle_rate, TimeDomain::Continuous)
}

impl Flow for PeriodicFlow {
    fn name(&self) -> String {
        format!("periodic(period={}, rate={})", self.period, self.rate)
    }
    fn time_domain(&self) -> TimeDomain {
        self.domain
    }
    fn apply(&self, t: f64, x: &Point) -> Point {
        Point::Real((x.coord() + self.rate * t).rem_euclid(self.period))
    }
    fn ground_truth(&self) -> FlowClass {
        FlowClass::Positive
    }
    fn invariant_probability(&self) -> bool {
        true
    }
    fn distance(&self, a: &Point, b: &Point) -> f64 {
        let d = (a.coord() - b.coord()).rem_euclid(self.period);
        d.min(self.period - d)
    }
    fn sample_point(&self, rng: &mut RngStream) -> Point {
        Point::Real(self.period * rng.uniform_open())
    }
}

/// `φ_t = id`.
#[derive(Debug, Clone, Copy)]
pub struct IdentityFlow {
    pub domain: TimeDomain,
}

impl Flow for IdentityFlow {
    fn name(&self) -> String {
        "identity".into()
    }
    fn time_domain(&self) -> TimeDomain {
        self.domain
    }
    fn apply(&self, _t: f64, x: &Point) -> Point {
        *x
    }
    fn ground_truth(&self) -> FlowClass {
        FlowClass::Positive
    }
    fn invariant_probability(&self) -> bool {
        true
    }
    fn distance(&self, a: &Point, b: &Point) -> f64 {
        (a.coord() - b.coord()).abs()
    }
    fn sample_point(&self, rng: &mut RngStream) -> Point {
        Point::Real(rng.uniform_open())
    }
}

/// How the level coordinate of a path-space point is distributed under `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelMeasure {
    /// `m = P` (probability space, level unused).
    Probability,
    /// `m = P × Lebesgue` in the level `z`.
    Lebesgue,
    /// `m = Σ_z P_z`, counting measure over starting sites of the walk.
    Counting,
}

/// Left shift on path space: advances the offset of a path point.
#[derive(Debug, Clone, Copy)]
pub struct PathShiftFlow {
    pub model: PathModel,
    pub level: LevelMeasure,
}

/// Shift flow for a trajectory model given by its descriptor, e.g.
/// `"fbm(0.7)"`. The level measure is Lebesgue for non-stationary models,
/// counting for the walk and the probability itself for stationary ones.
pub fn make_path_shift_flow(trajectory_model: &str) -> Result<PathShiftFlow> {
    let model = trajectory_model.parse::<crate::paths::TrajectoryModel>()?;
    let level = if model.is_discrete() {
        LevelMeasure::Counting
    } else if model.is_stationary() {
        LevelMeasure::Probability
    } else {
        LevelMeasure::Lebesgue
    };
    Ok(PathShiftFlow { model: PathModel::with_defaults(model, 1e4)?, level })
}

impl Flow for PathShiftFlow {
    fn name(&self) -> String {
        format!("path_shift({})", self.model.model)
    }
    fn time_domain(&self) -> TimeDomain {
        if self.model.model.is_discrete() {
            TimeDomain::Discrete
        } else {
            TimeDomain::Continuous
        }
    }
    fn apply(&self, t: f64, x: &Point) -> Point {
        match *x {
            Point::Path { seed, offset, z } => Point::Path { seed, offset: offset + t, z },
            other => other,
        }
    }
    fn ground_truth(&self) -> FlowClass {
        use crate::paths::TrajectoryModel as M;
        match (self.level, self.model.model) {
            (LevelMeasure::Probability, _) => FlowClass::Positive,
            (_, M::NullRecurrentWalk | M::Fbm { .. }) => FlowClass::ConservativeNull,
            (_, M::BrownianMotion { drift }) if drift == 0.0 => FlowClass::ConservativeNull,
            (_, M::BrownianMotion { .. }) => FlowClass::Dissipative,
            (_, M::StationaryGaussian { .. } | M::Zero) => FlowClass::Positive,
        }
    }
    fn invariant_probability(&self) -> bool {
        self.level == LevelMeasure::Probability
    }
    fn distance(&self, a: &Point, b: &Point) -> f64 {
        match (a, b) {
            (Point::Path { seed: s1, offset: o1, z: z1 }, Point::Path { seed: s2, offset: o2, z: z2 }) if s1 == s2 => {
                (o1 - o2).abs() + (z1 - z2).abs()
            }
            _ => f64::INFINITY,
        }
    }
    fn sample_point(&self, rng: &mut RngStream) -> Point {
        let z = if self.level == LevelMeasure::Probability { 0.0 } else { (rng.normal() * 8.0).round() };
        let offset = if self.model.model.is_discrete() {
            (rng.normal() * 20.0).round()
        } else {
            ((rng.normal() * 20.0) * 64.0).round() / 64.0
        };
        Point::Path { seed: rand::RngCore::next_u64(rng), offset, z }
    }
}

/// Disjoint union: component `k` acts on `Tagged { tag: k, .. }` points.
#[derive(Debug, Clone)]
pub struct UnionFlow {
    pub components: Vec<Arc<dyn Flow>>,
}

impl UnionFlow {
    fn component(&self, x: &Point) -> Option<(u32, &Arc<dyn Flow>)> {
        match *x {
            Point::Tagged { tag, .. } => self.components.get(tag as usize).map(|f| (tag, f)),
            _ => None,
        }
    }
}

impl Flow for UnionFlow {
    fn name(&self) -> String {
        let names: Vec<String> = self.components.iter().map(|c| c.name()).collect();
        format!("union[{}]", names.join(", "))
    }
    fn time_domain(&self) -> TimeDomain {
        if self.components.iter().all(|c| c.time_domain() == TimeDomain::Discrete) {
            TimeDomain::Discrete
        } else {
            TimeDomain::Continuous
        }
    }
    fn apply(&self, t: f64, x: &Point) -> Point {
        match self.component(x) {
            Some((tag, f)) => Point::Tagged { tag, x: f.apply(t, &Point::Real(x.coord())).coord() },
            None => *x,
        }
    }
    fn rn_derivative(&self, t: f64, x: &Point) -> f64 {
        self.component(x).map_or(1.0, |(_, f)| f.rn_derivative(t, &Point::Real(x.coord())))
    }
    fn ground_truth(&self) -> FlowClass {
        let mut classes: Vec<FlowClass> = self.components.iter().map(|c| c.ground_truth()).collect();
        classes.dedup();
        if classes.len() == 1 {
            classes[0]
        } else {
            FlowClass::Unknown
        }
    }
    fn invariant_probability(&self) -> bool {
        self.components.iter().all(|c| c.invariant_probability())
    }
    fn distance(&self, a: &Point, b: &Point) -> f64 {
        match (self.component(a), self.component(b)) {
            (Some((ta, f)), Some((tb, _))) if ta == tb => {
                f.distance(&Point::Real(a.coord()), &Point::Real(b.coord()))
            }
            _ => f64::INFINITY,
        }
    }
    fn sample_point(&self, rng: &mut RngStream) -> Point {
        let k = (rng.uniform_open() * self.components.len() as f64) as usize % self.components.len();
        Point::Tagged { tag: k as u32, x: self.components[k].sample_point(rng).coord() }
    }
}

/// `a_t ≡ 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct TrivialCocycle;

impl Cocycle for TrivialCocycle {
    fn eval(&self, _t: f64, _x: &Point) -> Result<f64> {
        Ok(1.0)
    }
    fn orbit(&self, _x: &Point, times: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![1.0; times.len()])
    }
    fn is_trivial(&self) -> bool {
        true
    }
}

/// `a_t(v) = b^{⌊(v + rate·t)/period⌋}` with `b = ±1`: the sign factor of a
/// cyclic kernel.
#[derive(Debug, Clone, Copy)]
pub struct PeriodicSignCocycle {
    pub period: f64,
    pub rate: f64,
    pub b: f64,
}

impl Cocycle for PeriodicSignCocycle {
    fn eval(&self, t: f64, x: &Point) -> Result<f64> {
        if self.b == 1.0 {
            return Ok(1.0);
        }
        let k = ((x.coord() + self.rate * t) / self.period).floor();
        Ok(if k.rem_euclid(2.0) == 0.0 { 1.0 } else { -1.0 })
    }
    fn is_trivial(&self) -> bool {
        self.b == 1.0
    }
}

/// Component-wise cocycle on a disjoint union.
#[derive(Debug, Clone)]
pub struct UnionCocycle {
    pub components: Vec<Arc<dyn Cocycle>>,
}

impl Cocycle for UnionCocycle {
    fn eval(&self, t: f64, x: &Point) -> Result<f64> {
        match *x {
            Point::Tagged { tag, x } => match self.components.get(tag as usize) {
                Some(c) => c.eval(t, &Point::Real(x)),
                None => Ok(1.0),
            },
            _ => Ok(1.0),
        }
    }
    fn is_trivial(&self) -> bool {
        self.components.iter().all(|c| c.is_trivial())
    }
}

/// Walk cocycle `a_n = Π_{k ∈ [0, n)} h(ω(k))` with `h(s) = -1` when
/// `s mod 4 ∈ {2, 3}` and `+1` otherwise (`[0, n)` read as `[n, 0)` for
/// `n < 0`). Site values come from the point's trajectory.
#[derive(Debug, Clone, Copy)]
pub struct WalkParityCocycle {
    pub model: PathModel,
}

fn site_sign(site: f64) -> f64 {
    if (site.round() as i64).rem_euclid(4) >= 2 {
        -1.0
    } else {
        1.0
    }
}

impl Cocycle for WalkParityCocycle {
    fn eval(&self, t: f64, x: &Point) -> Result<f64> {
        Ok(self.orbit(x, &[t])?[0])
    }

    fn orbit(&self, x: &Point, times: &[f64]) -> Result<Vec<f64>> {
        let Point::Path { seed, offset, z } = *x else {
            return Ok(vec![1.0; times.len()]);
        };
        let ns: Vec<i64> = times.iter().map(|t| t.round() as i64).collect();
        let lo = ns.iter().copied().min().unwrap_or(0).min(0);
        let hi = ns.iter().copied().max().unwrap_or(0).max(0);
        let grid: Vec<f64> = (lo..hi).map(|k| offset + k as f64).collect();
        let sites = self.model.values_at(seed, &grid)?;
        // prefix[k - lo] = Π_{j ∈ [lo, k)} h(ω(j))
        let mut prefix = Vec::with_capacity(sites.len() + 1);
        let mut acc = 1.0;
        prefix.push(acc);
        for s in &sites {
            acc *= site_sign(z + s);
            prefix.push(acc);
        }
        let at = |k: i64| prefix[(k - lo) as usize];
        // Π over [0, n) equals at(n)·at(0) for ±1 factors, in either direction.
        Ok(ns.iter().map(|&n| at(n) * at(0)).collect())
    }
}

/// Maximum residuals of the flow and cocycle identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowAxiomReport {
    pub samples: usize,
    pub identity_residual: f64,
    pub group_residual: f64,
    pub chain_rule_residual: f64,
    pub cocycle_residual: f64,
}

impl FlowAxiomReport {
    pub fn max_residual(&self) -> f64 {
        self.identity_residual
            .max(self.group_residual)
            .max(self.chain_rule_residual)
            .max(self.cocycle_residual)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual() < tol
    }
}

fn sample_time(domain: TimeDomain, rng: &mut RngStream) -> f64 {
    let u = rng.uniform_open() - 0.5;
    match domain {
        TimeDomain::Discrete => (u * 100.0).round(),
        TimeDomain::Continuous => (u * 100.0 * 64.0).round() / 64.0,
    }
}

/// Check identity, group law, RN chain rule and cocycle identity on
/// `samples` random triples `(t, s, x)`. Failures are reported, not raised;
/// cocycle evaluation errors count as an infinite residual.
pub fn check_flow_axioms(
    flow: &dyn Flow,
    cocycle: Option<&dyn Cocycle>,
    samples: usize,
    rng: &mut RngStream,
) -> FlowAxiomReport {
    let mut rep = FlowAxiomReport {
        samples,
        identity_residual: 0.0,
        group_residual: 0.0,
        chain_rule_residual: 0.0,
        cocycle_residual: 0.0,
    };
    let domain = flow.time_domain();
    for _ in 0..samples {
        let x = flow.sample_point(rng);
        let t = sample_time(domain, rng);
        let s = sample_time(domain, rng);
        rep.identity_residual = rep.identity_residual.max(flow.distance(&flow.apply(0.0, &x), &x));
        let xs = flow.apply(s, &x);
        let lhs = flow.apply(t + s, &x);
        let rhs = flow.apply(t, &xs);
        rep.group_residual = rep.group_residual.max(flow.distance(&lhs, &rhs));
        let rn_l = flow.rn_derivative(t + s, &x);
        let rn_r = flow.rn_derivative(t, &xs) * flow.rn_derivative(s, &x);
        rep.chain_rule_residual = rep.chain_rule_residual.max((rn_l - rn_r).abs() / rn_l.abs().max(1.0));
        if let Some(c) = cocycle {
            let r = (|| -> Result<f64> {
                let zero = (c.eval(0.0, &x)? - 1.0).abs();
                let split = (c.eval(t + s, &x)? - c.eval(s, &x)? * c.eval(t, &xs)?).abs();
                Ok(zero.max(split))
            })();
            rep.cocycle_residual = rep.cocycle_residual.max(r.unwrap_or(f64::INFINITY));
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::TrajectoryModel;

    #[test]
    fn translation_examples() {
        let f = make_translation_flow();
        assert_eq!(f.apply(3.5, &Point::Real(1.0)), Point::Real(4.5));
        assert_eq!(f.rn_derivative(2.0, &Point::Real(-7.0)), 1.0);
        assert_eq!(f.apply(2.25, &f.apply(-2.25, &Point::Real(0.375))), Point::Real(0.375));
    }

    #[test]
    fn rotation_examples() {
        let f = make_rotation_flow(0.5).unwrap();
        assert_eq!(f.apply(1.0, &Point::Real(0.25)), Point::Real(0.75));
        assert_eq!(f.apply(2.0, &Point::Real(0.25)), Point::Real(0.25));
        assert_eq!(f.rn_derivative(0.3, &Point::Real(0.1)), 1.0);
        assert!(make_rotation_flow(0.0).is_err());
    }

    #[test]
    fn path_shift_examples() {
        let f = make_path_shift_flow("null_recurrent_walk").unwrap();
        let x = Point::Path { seed: 1, offset: 3.0, z: 0.0 };
        assert_eq!(f.apply(2.0, &x), Point::Path { seed: 1, offset: 5.0, z: 0.0 });
        assert_eq!(f.ground_truth(), FlowClass::ConservativeNull);
        assert_eq!(make_path_shift_flow("brownian_motion").unwrap().ground_truth(), FlowClass::ConservativeNull);
        assert!(make_path_shift_flow("levy").is_err());
    }

    #[test]
    fn translation_axioms_are_exact() {
        let rep = check_flow_axioms(&make_translation_flow(), Some(&TrivialCocycle), 10_000, &mut RngStream::new(1, 0));
        assert_eq!(rep.max_residual(), 0.0);
    }

    #[test]
    fn rotation_axioms_hold_to_rounding() {
        let f = make_rotation_flow(std::f64::consts::SQRT_2).unwrap();
        let c = PeriodicSignCocycle { period: 1.0, rate: std::f64::consts::SQRT_2, b: -1.0 };
        let rep = check_flow_axioms(&f, Some(&c), 10_000, &mut RngStream::new(2, 0));
        assert!(rep.group_residual < 1e-12, "{rep:?}");
        assert!(rep.passes(1e-10), "{rep:?}");
    }

    #[test]
    fn walk_parity_cocycle_identity() {
        let model = PathModel::with_defaults(TrajectoryModel::NullRecurrentWalk, 1e4).unwrap();
        let f = PathShiftFlow { model, level: LevelMeasure::Counting };
        let c = WalkParityCocycle { model };
        let rep = check_flow_axioms(&f, Some(&c), 2_000, &mut RngStream::new(3, 0));
        assert_eq!(rep.max_residual(), 0.0, "{rep:?}");
    }

    #[derive(Debug)]
    struct Broken;

    impl Flow for Broken {
        fn name(&self) -> String {
            "broken".into()
        }
        fn time_domain(&self) -> TimeDomain {
            TimeDomain::Continuous
        }
        fn apply(&self, t: f64, x: &Point) -> Point {
            Point::Real(x.coord() + t * t)
        }
        fn ground_truth(&self) -> FlowClass {
            FlowClass::Unknown
        }
        fn distance(&self, a: &Point, b: &Point) -> f64 {
            (a.coord() - b.coord()).abs()
        }
        fn sample_point(&self, rng: &mut RngStream) -> Point {
            Point::Real(rng.normal())
        }
    }

    #[test]
    fn broken_flow_is_reported() {
        let rep = check_flow_axioms(&Broken, None, 100, &mut RngStream::new(4, 0));
        assert!(rep.group_residual > 0.0);
        assert!(!rep.passes(1e-10));
    }
}
