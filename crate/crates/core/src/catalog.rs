//! Example processes with known structure.
//!
//! Every constructor returns a [`CatalogEntry`] whose kernel carries a
//! default sampling law `q`. [`QChoice::Alternate`] swaps in an equivalent
//! law (same null sets, different shape); [`QChoice::Broad`] spreads `q` over
//! long time windows for maxima experiments.

use std::f64::consts::SQRT_2;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::flows::{
    Cocycle, Flow, FlowClass, IdentityFlow, LevelMeasure, PathShiftFlow, PeriodicFlow, PeriodicSignCocycle,
    TimeDomain, TranslationFlow, TrivialCocycle, UnionCocycle, UnionFlow, WalkParityCocycle,
};
use crate::kernels::{
    integer_sites, kernel_norm, BaseFn, ComponentRule, Integrator, KernelConfig, KernelSpec, LineFunction,
    TermSampler,
};
use crate::paths::{Covariance, PathModel, TrajectoryModel};
use crate::simulate::DirectSimulator;
use crate::spaces::{
    IntervalSampler, IntervalSpace, LevelSampler, LineSampler, LineSpace, MeasureSpace, PathSpace, UnionComponent,
    UnionSpace,
};
use crate::stable::{gaussian_abs_moment, StabilityIndex};

/// Horizon of generated trajectories for path-space entries.
pub const PATH_HORIZON: f64 = 1.0e4 + 1.0;

/// Which sampling law the kernel is built with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QChoice {
    #[default]
    Default,
    Alternate,
    /// Wide sampling law for long time grids.
    Broad,
}

/// A process constructor's output.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub kernel: KernelSpec,
    pub ground_truth: FlowClass,
    /// Where the example comes from, in words.
    pub provenance: String,
    /// Direct path generator, when one exists.
    pub direct: Option<DirectSimulator>,
}

impl CatalogEntry {
    fn new(name: &str, kernel: KernelSpec, provenance: &str) -> Self {
        let ground_truth = kernel.ground_truth();
        Self { name: name.into(), kernel, ground_truth, provenance: provenance.into(), direct: None }
    }
}

fn base_kernel(
    alpha: StabilityIndex,
    space: Arc<dyn MeasureSpace>,
    flow: Arc<dyn Flow>,
    f: BaseFn,
    integrator: Integrator,
    label: &str,
) -> KernelSpec {
    KernelSpec {
        alpha,
        space,
        time_domain: flow.time_domain(),
        flow,
        cocycle: Arc::new(TrivialCocycle),
        f,
        amplitude: 1.0,
        label: label.into(),
        integrator,
        term_sampler: TermSampler::Dense,
        config: KernelConfig::default(),
    }
}

fn line_sampler(q: QChoice) -> LineSampler {
    match q {
        QChoice::Default => LineSampler::Gaussian { mean: 0.0, sd: 2.0 },
        QChoice::Alternate => LineSampler::Laplace { mean: -1.0, scale: 3.0 },
        QChoice::Broad => LineSampler::Cauchy { center: -32768.0, scale: 32768.0 },
    }
}

fn interval_sampler(q: QChoice) -> IntervalSampler {
    match q {
        QChoice::Alternate => IntervalSampler::Tilted { tilt: 0.6 },
        _ => IntervalSampler::Uniform,
    }
}

fn ensure_finite_norm(kernel: &KernelSpec) -> Result<()> {
    let n = kernel_norm(kernel, 0.0)?;
    if n.get().is_finite() {
        Ok(())
    } else {
        Err(Error::Divergent { partial_sums: vec![n.get()] })
    }
}

/// `X(t) = ∫ 1_{[0,1)}(x + t) M(dx)`.
pub fn moving_average(alpha: StabilityIndex, q: QChoice) -> Result<CatalogEntry> {
    let mut e = mixed_moving_average(alpha, &[(1.0, LineFunction::unit_indicator())], q)?;
    e.name = "moving_average".into();
    e.kernel.label = "moving_average".into();
    e.provenance = "mixed moving average with a single atom and window [0, 1)".into();
    Ok(e)
}

/// `X(t) = Σ_v ν_v ∫ f_v(x + t) M(dx)` with an atomic mixing measure
/// `atoms = [(ν_v, f_v)]`.
pub fn mixed_moving_average(
    alpha: StabilityIndex,
    atoms: &[(f64, LineFunction)],
    q: QChoice,
) -> Result<CatalogEntry> {
    if atoms.is_empty() {
        return Err(invalid("atoms", "need at least one atom"));
    }
    for (nu, f) in atoms {
        if !(nu.is_finite() && *nu > 0.0) {
            return Err(invalid("atoms", "mixing weights must be positive"));
        }
        f.validate()?;
    }
    let supports: Option<Vec<(f64, f64)>> = atoms.iter().map(|(_, f)| f.support()).collect();
    let flow_of = || -> Arc<dyn Flow> { Arc::new(TranslationFlow { domain: TimeDomain::Continuous }) };
    let mut kernel = if atoms.len() == 1 {
        let (nu, f) = atoms[0];
        base_kernel(
            alpha,
            Arc::new(LineSpace { sampler: line_sampler(q) }),
            flow_of(),
            BaseFn::Line(f),
            Integrator::Deterministic { components: vec![ComponentRule::Translation { m_weight: 1.0 }] },
            "mixed_moving_average",
        )
        .scaled(nu.powf(alpha.inv()))
    } else {
        let n = atoms.len() as f64;
        let components = atoms
            .iter()
            .map(|(nu, _)| UnionComponent {
                space: Arc::new(LineSpace { sampler: line_sampler(q) }),
                q_weight: 1.0 / n,
                m_weight: *nu,
            })
            .collect();
        base_kernel(
            alpha,
            Arc::new(UnionSpace::new(components)?),
            Arc::new(UnionFlow { components: atoms.iter().map(|_| flow_of()).collect() }),
            BaseFn::Union(atoms.iter().map(|a| a.1).collect()),
            Integrator::Deterministic {
                components: atoms.iter().map(|(nu, _)| ComponentRule::Translation { m_weight: *nu }).collect(),
            },
            "mixed_moving_average",
        )
    };
    if let Some(s) = supports {
        kernel.term_sampler = TermSampler::TranslationWindow { supports: s };
    }
    ensure_finite_norm(&kernel)?;
    Ok(CatalogEntry::new(
        "mixed_moving_average",
        kernel,
        "mixed moving average over an atomic mixing space (dissipative)",
    ))
}

/// One atom of a cyclic kernel: period `period`, speed `rate`, sign `b`,
/// profile `g` on `[0, period)` and mixing weight `weight`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CyclicAtom {
    pub period: f64,
    pub rate: f64,
    pub b: f64,
    pub g: LineFunction,
    pub weight: f64,
}

/// `f_t(z, v) = b(z)^{⌊v + s(z)t⌋_{q(z)}} g(z, {v + s(z)t}_{q(z)})` on the
/// disjoint union of the intervals `[0, q(z))`.
pub fn cyclic_kernel(alpha: StabilityIndex, atoms: &[CyclicAtom], q: QChoice) -> Result<CatalogEntry> {
    if atoms.is_empty() {
        return Err(invalid("atoms", "need at least one atom"));
    }
    let n = atoms.len() as f64;
    let mut components = Vec::new();
    let mut flows: Vec<Arc<dyn Flow>> = Vec::new();
    let mut cocycles: Vec<Arc<dyn Cocycle>> = Vec::new();
    let mut rules = Vec::new();
    for a in atoms {
        if a.b != 1.0 && a.b != -1.0 {
            return Err(invalid("b", "sign must be ±1"));
        }
        if !(a.weight > 0.0 && a.weight.is_finite()) {
            return Err(invalid("weight", "must be positive"));
        }
        a.g.validate()?;
        let full = match a.g.support() {
            Some((lo, hi)) => lo < a.period && hi > 0.0,
            None => !a.g.is_zero(),
        };
        if !full {
            return Err(invalid("g", "profile vanishes on the period interval"));
        }
        flows.push(Arc::new(PeriodicFlow::new(a.period, a.rate, TimeDomain::Continuous)?));
        cocycles.push(Arc::new(PeriodicSignCocycle { period: a.period, rate: a.rate, b: a.b }));
        components.push(UnionComponent {
            space: Arc::new(IntervalSpace::new(a.period, interval_sampler(q))?),
            q_weight: 1.0 / n,
            m_weight: a.weight,
        });
        rules.push(ComponentRule::Periodic { period: a.period, rate: a.rate, b: a.b, m_weight: a.weight });
    }
    let mut kernel = base_kernel(
        alpha,
        Arc::new(UnionSpace::new(components)?),
        Arc::new(UnionFlow { components: flows }),
        BaseFn::Union(atoms.iter().map(|a| a.g).collect()),
        Integrator::Deterministic { components: rules },
        "cyclic",
    );
    kernel.cocycle = Arc::new(UnionCocycle { components: cocycles });
    Ok(CatalogEntry::new("cyclic", kernel, "cyclic representation over periodic flows (positive)"))
}

/// Rotation of the unit circle with `f ≡ 1`.
pub fn rotation(alpha: StabilityIndex, rate: f64, q: QChoice) -> Result<CatalogEntry> {
    let flow = PeriodicFlow::new(1.0, rate, TimeDomain::Continuous)?;
    let kernel = base_kernel(
        alpha,
        Arc::new(IntervalSpace::new(1.0, interval_sampler(q))?),
        Arc::new(flow),
        BaseFn::Line(LineFunction::unit_indicator()),
        Integrator::Deterministic {
            components: vec![ComponentRule::Periodic { period: 1.0, rate, b: 1.0, m_weight: 1.0 }],
        },
        "rotation",
    );
    Ok(CatalogEntry::new("rotation", kernel, "circle rotation preserving Lebesgue measure, f ≡ 1 (positive)"))
}

fn walk_sampler(q: QChoice) -> LevelSampler {
    match q {
        QChoice::Default => LevelSampler::Geometric { rho: 0.5 },
        QChoice::Alternate => LevelSampler::DiscreteCauchy { scale: 2.0 },
        QChoice::Broad => LevelSampler::DiscreteCauchy { scale: 256.0 },
    }
}

/// Simple symmetric walk path space with counting measure over starting
/// sites; `f(ω) = φ(ω(0))` with `φ` supported on finitely many sites.
/// `signed` attaches the site-parity cocycle.
pub fn markov_chain_kernel(
    alpha: StabilityIndex,
    phi: LineFunction,
    signed: bool,
    q: QChoice,
) -> Result<CatalogEntry> {
    let model = PathModel::with_defaults(TrajectoryModel::NullRecurrentWalk, PATH_HORIZON)?;
    let sites = integer_sites(&phi)?;
    if sites.is_empty() {
        return Err(invalid("phi", "cylinder function vanishes on every site"));
    }
    let mut kernel = base_kernel(
        alpha,
        Arc::new(PathSpace::new(model, LevelMeasure::Counting, walk_sampler(q))?),
        Arc::new(PathShiftFlow { model, level: LevelMeasure::Counting }),
        BaseFn::Path { model, phi },
        Integrator::Walk { parity_cocycle: signed },
        "markov_chain",
    );
    if signed {
        kernel.cocycle = Arc::new(WalkParityCocycle { model });
        kernel.label = "markov_chain_signed".into();
        kernel.term_sampler = TermSampler::SignedWalk { sites };
    } else {
        kernel.term_sampler = TermSampler::WalkHits { sites };
    }
    let name = kernel.label.clone();
    Ok(CatalogEntry::new(&name, kernel, "shift on the path space of a null-recurrent walk (conservative null)"))
}

fn level_sampler(q: QChoice, y: TrajectoryModel) -> LevelSampler {
    match q {
        QChoice::Broad if matches!(y, TrajectoryModel::BrownianMotion { drift } if drift != 0.0) => {
            LevelSampler::Line(line_sampler(QChoice::Broad))
        }
        QChoice::Alternate => LevelSampler::Line(LineSampler::Cauchy { center: 0.5, scale: 1.5 }),
        QChoice::Broad => LevelSampler::Line(LineSampler::Cauchy { center: 0.0, scale: 256.0 }),
        QChoice::Default => LevelSampler::Line(LineSampler::standard_gaussian()),
    }
}

/// `f_t(ω, z) = φ(Y(t, ω) + z)` on `P × Lebesgue` for a trajectory model `Y`.
pub fn stationary_increment_kernel(
    alpha: StabilityIndex,
    phi: LineFunction,
    y: TrajectoryModel,
    q: QChoice,
) -> Result<CatalogEntry> {
    phi.validate()?;
    if y.is_discrete() {
        return Err(Error::UnknownModel(format!("{y} is not a continuous-time increment model")));
    }
    let model = PathModel::with_defaults(y, PATH_HORIZON)?;
    let mut kernel = base_kernel(
        alpha,
        Arc::new(PathSpace::new(model, LevelMeasure::Lebesgue, level_sampler(q, y))?),
        Arc::new(PathShiftFlow { model, level: LevelMeasure::Lebesgue }),
        BaseFn::Path { model, phi },
        Integrator::PathLevel,
        "stationary_increment",
    );
    kernel.term_sampler = match (y, phi.support()) {
        (TrajectoryModel::BrownianMotion { .. }, Some(support)) => TermSampler::BrownianHits { support },
        (TrajectoryModel::Fbm { .. }, _) => TermSampler::FreshPath,
        _ => TermSampler::Dense,
    };
    let provenance = match y {
        TrajectoryModel::StationaryGaussian { .. } | TrajectoryModel::Zero => {
            "increment representation with a stationary level process (positive)"
        }
        TrajectoryModel::BrownianMotion { drift } if drift != 0.0 => {
            "increment representation with drifting Brownian motion, leaves every window a.s. (dissipative)"
        }
        _ => "increment representation with a path that leaves windows in probability (conservative null)",
    };
    let mut e = CatalogEntry::new("stationary_increment", kernel, provenance);
    e.kernel.label = format!("stationary_increment({y})");
    Ok(e)
}

/// `X(t) = ∫ κ B(t) dM'` with `M'` controlled by the law of a stationary
/// Gaussian `B`, normalised by `κ = (E|Z|^α)^{-1/α}` so that `‖X(0)‖_α = 1`.
pub fn doubly_stationary_kernel(alpha: StabilityIndex, cov: Covariance) -> Result<CatalogEntry> {
    let model = PathModel::with_defaults(TrajectoryModel::StationaryGaussian { cov }, PATH_HORIZON)?;
    let mut kernel = base_kernel(
        alpha,
        Arc::new(PathSpace::new(model, LevelMeasure::Probability, LevelSampler::None)?),
        Arc::new(PathShiftFlow { model, level: LevelMeasure::Probability }),
        BaseFn::Path { model, phi: LineFunction::Identity },
        Integrator::GaussianLinear { cov },
        "doubly_stationary",
    );
    kernel.amplitude = gaussian_abs_moment(alpha.get()).powf(-alpha.inv());
    Ok(CatalogEntry::new(
        "doubly_stationary",
        kernel,
        "stationary process integrated against a probability control measure (positive)",
    ))
}

/// Sub-stable process `c W^{1/β} B(t)` with sub-Gaussian β-stable `B` of
/// covariance `cov`. The kernel is the β = 2 doubly stationary one: the
/// mixing variable of `B` only rescales `∫|Σ c_j B(t_j)|^α dP`, and the
/// normalisation absorbs it.
pub fn sub_stable_entry(alpha: StabilityIndex, beta: f64, cov: Covariance) -> Result<CatalogEntry> {
    if !(beta > alpha.get() && beta <= 2.0) {
        return Err(invalid("beta", format!("need alpha < beta <= 2, got {beta}")));
    }
    let mut e = doubly_stationary_kernel(alpha, cov)?;
    e.name = if beta == 2.0 { "sub_gaussian".into() } else { format!("sub_stable(beta={beta})") };
    e.kernel.label = e.name.clone();
    e.provenance = "sub-stable process c W^{1/β} B(t) (positive)".into();
    e.direct = Some(DirectSimulator::SubStable { beta, cov });
    Ok(e)
}

/// `f_t(x) = 1_{[0,1)}(x)` under the identity flow on `[0, 1)`.
pub fn constant_atom(alpha: StabilityIndex, q: QChoice) -> Result<CatalogEntry> {
    let kernel = base_kernel(
        alpha,
        Arc::new(IntervalSpace::new(1.0, interval_sampler(q))?),
        Arc::new(IdentityFlow { domain: TimeDomain::Continuous }),
        BaseFn::Line(LineFunction::unit_indicator()),
        Integrator::Deterministic { components: vec![ComponentRule::Frozen { length: 1.0, m_weight: 1.0 }] },
        "constant_atom",
    );
    Ok(CatalogEntry::new(
        "constant_atom",
        kernel,
        "constant kernel, X(t) = X(0) ~ SαS(1) (positive)",
    ))
}

/// Disjoint union of a rotation component (`f ≡ 1` on the circle) and a
/// moving-average component, each of `m`-mass one and `q`-mass one half.
pub fn rotation_translation_mixture(alpha: StabilityIndex, q: QChoice) -> Result<CatalogEntry> {
    let rate = SQRT_2 - 1.0;
    let (circle_q, line_q) = match q {
        QChoice::Alternate => (0.3, 0.7),
        _ => (0.5, 0.5),
    };
    let space = UnionSpace::new(vec![
        UnionComponent {
            space: Arc::new(IntervalSpace::new(1.0, interval_sampler(q))?),
            q_weight: circle_q,
            m_weight: 1.0,
        },
        UnionComponent { space: Arc::new(LineSpace { sampler: mixture_line_sampler(q) }), q_weight: line_q, m_weight: 1.0 },
    ])?;
    let flow = UnionFlow {
        components: vec![
            Arc::new(PeriodicFlow::new(1.0, rate, TimeDomain::Continuous)?),
            Arc::new(TranslationFlow { domain: TimeDomain::Continuous }),
        ],
    };
    let kernel = base_kernel(
        alpha,
        Arc::new(space),
        Arc::new(flow),
        BaseFn::Union(vec![LineFunction::unit_indicator(), LineFunction::unit_indicator()]),
        Integrator::Deterministic {
            components: vec![
                ComponentRule::Periodic { period: 1.0, rate, b: 1.0, m_weight: 1.0 },
                ComponentRule::Translation { m_weight: 1.0 },
            ],
        },
        "rotation_translation_mixture",
    );
    let mut e = CatalogEntry::new(
        "rotation_translation_mixture",
        kernel,
        "disjoint union of a positive rotation part and a dissipative moving-average part",
    );
    e.ground_truth = FlowClass::Unknown;
    Ok(e)
}

// The translation half of the mixture keeps its points near the window so
// that both parts are well represented in finite samples.
fn mixture_line_sampler(q: QChoice) -> LineSampler {
    match q {
        QChoice::Alternate => LineSampler::Laplace { mean: 0.5, scale: 1.0 },
        _ => LineSampler::Gaussian { mean: 0.5, sd: 1.0 },
    }
}

/// Names accepted by [`catalog_entry`].
pub const CATALOG_NAMES: &[&str] = &[
    "moving_average",
    "mixed_moving_average",
    "rotation",
    "cyclic",
    "markov_chain",
    "markov_chain_signed",
    "brownian_increments",
    "fbm_increments",
    "drifted_brownian_increments",
    "stationary_y_increments",
    "frozen_increments",
    "sub_gaussian",
    "constant_atom",
    "rotation_translation_mixture",
];

/// Entries whose classification is checked against a single ground truth.
pub const CLASSIFIED_NAMES: &[&str] = &[
    "moving_average",
    "mixed_moving_average",
    "rotation",
    "cyclic",
    "markov_chain",
    "markov_chain_signed",
    "brownian_increments",
    "fbm_increments",
    "drifted_brownian_increments",
    "stationary_y_increments",
    "frozen_increments",
    "sub_gaussian",
    "constant_atom",
];

/// Catalog entry by name with the shipped parameters.
pub fn catalog_entry(name: &str, alpha: StabilityIndex, q: QChoice) -> Result<CatalogEntry> {
    let window = LineFunction::unit_indicator();
    let mut e = match name {
        "moving_average" => moving_average(alpha, q)?,
        "mixed_moving_average" => mixed_moving_average(
            alpha,
            &[(0.5, window), (1.0, LineFunction::Tent { center: 0.0, half_width: 2.0 })],
            q,
        )?,
        "rotation" => rotation(alpha, SQRT_2 - 1.0, q)?,
        "cyclic" => cyclic_kernel(
            alpha,
            &[
                CyclicAtom { period: 1.0, rate: 1.0, b: 1.0, g: window, weight: 1.0 },
                CyclicAtom { period: 1.0, rate: SQRT_2, b: -1.0, g: window, weight: 1.0 },
            ],
            q,
        )?,
        "markov_chain" => markov_chain_kernel(alpha, LineFunction::unit_indicator(), false, q)?,
        "markov_chain_signed" => {
            markov_chain_kernel(alpha, LineFunction::Indicator { lo: -1.0, hi: 2.0 }, true, q)?
        }
        "brownian_increments" => {
            stationary_increment_kernel(alpha, window, TrajectoryModel::BrownianMotion { drift: 0.0 }, q)?
        }
        "fbm_increments" => stationary_increment_kernel(alpha, window, TrajectoryModel::Fbm { hurst: 0.7 }, q)?,
        "drifted_brownian_increments" => {
            stationary_increment_kernel(alpha, window, TrajectoryModel::BrownianMotion { drift: 1.0 }, q)?
        }
        "stationary_y_increments" => stationary_increment_kernel(
            alpha,
            window,
            TrajectoryModel::StationaryGaussian { cov: Covariance::Exponential { rate: 1.0 } },
            q,
        )?,
        "frozen_increments" => stationary_increment_kernel(alpha, window, TrajectoryModel::Zero, q)?,
        "sub_gaussian" => sub_stable_entry(alpha, 2.0, Covariance::Exponential { rate: 1.0 })?,
        "constant_atom" => constant_atom(alpha, q)?,
        "rotation_translation_mixture" => rotation_translation_mixture(alpha, q)?,
        other => return Err(Error::UnknownCatalogEntry(other.into())),
    };
    e.name = name.into();
    e.kernel.label = name.into();
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(x: f64) -> StabilityIndex {
        StabilityIndex::new(x).unwrap()
    }

    #[test]
    fn every_name_builds() {
        for name in CATALOG_NAMES {
            for q in [QChoice::Default, QChoice::Alternate] {
                let e = catalog_entry(name, a(1.5), q).unwrap();
                assert_eq!(e.name, *name);
            }
        }
        assert!(matches!(catalog_entry("nope", a(1.5), QChoice::Default), Err(Error::UnknownCatalogEntry(_))));
    }

    #[test]
    fn mixed_moving_average_norm_adds_windows() {
        let e = mixed_moving_average(
            a(1.3),
            &[(0.25, LineFunction::Indicator { lo: 0.0, hi: 2.0 }), (2.0, LineFunction::unit_indicator())],
            QChoice::Default,
        )
        .unwrap();
        let v = e.kernel.integral_abs_alpha(&[(1.0, 0.0)]).unwrap();
        assert!((v - 2.5).abs() < 1e-12, "{v}");
    }

    #[test]
    fn non_integrable_profile_is_rejected() {
        let e = mixed_moving_average(a(1.5), &[(1.0, LineFunction::PowerTail { exponent: 0.5 })], QChoice::Default);
        assert!(matches!(e, Err(Error::Divergent { .. })));
    }

    #[test]
    fn ground_truth_labels() {
        let gt = |n: &str| catalog_entry(n, a(1.5), QChoice::Default).unwrap().ground_truth;
        assert_eq!(gt("moving_average"), FlowClass::Dissipative);
        assert_eq!(gt("drifted_brownian_increments"), FlowClass::Dissipative);
        assert_eq!(gt("markov_chain"), FlowClass::ConservativeNull);
        assert_eq!(gt("fbm_increments"), FlowClass::ConservativeNull);
        assert_eq!(gt("rotation"), FlowClass::Positive);
        assert_eq!(gt("sub_gaussian"), FlowClass::Positive);
        assert_eq!(gt("stationary_y_increments"), FlowClass::Positive);
        assert_eq!(gt("rotation_translation_mixture"), FlowClass::Unknown);
    }

    #[test]
    fn walk_indicator_norm_is_one() {
        let e = catalog_entry("markov_chain", a(1.2), QChoice::Default).unwrap();
        assert_eq!(e.kernel.integral_abs_alpha(&[(1.0, 0.0)]).unwrap(), 1.0);
    }

    #[test]
    fn sub_gaussian_has_unit_scale() {
        let e = catalog_entry("sub_gaussian", a(1.5), QChoice::Default).unwrap();
        let s = kernel_norm(&e.kernel, 0.0).unwrap().get();
        assert!((s - 1.0).abs() < 1e-12);
    }
}
