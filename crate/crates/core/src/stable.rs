//! Symmetric alpha-stable sampling and scale arithmetic.
//!
//! Characteristic function convention: a SαS variable with scale `σ`
//! satisfies `E exp(iθX) = exp(-σ^α |θ|^α)`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{invalid, Error, Result};
use crate::rng::RngStream;

/// Smallest supported stability index.
pub const ALPHA_MIN: f64 = 0.05;
/// Largest supported stability index.
pub const ALPHA_MAX: f64 = 1.99;

/// Stability index α of a SαS law, restricted to `[0.05, 1.99]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct StabilityIndex(f64);

impl StabilityIndex {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && (ALPHA_MIN..=ALPHA_MAX).contains(&alpha) {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidAlpha(alpha))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn inv(self) -> f64 {
        1.0 / self.0
    }
}

impl TryFrom<f64> for StabilityIndex {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<StabilityIndex> for f64 {
    fn from(a: StabilityIndex) -> f64 {
        a.0
    }
}

/// Scale parameter `‖X‖_α` of a SαS variable.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct StableScale(f64);

impl StableScale {
    pub const ZERO: StableScale = StableScale(0.0);
    pub const ONE: StableScale = StableScale(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value >= 0.0 {
            Ok(Self(value))
        } else {
            Err(invalid("scale", format!("{value} is not a finite nonnegative number")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// `scale^α`, the L^α mass of the representing kernel.
    pub fn pow_alpha(self, alpha: StabilityIndex) -> f64 {
        self.0.powf(alpha.get())
    }
}

/// One SαS draw via the Chambers–Mallows–Stuck transform.
pub fn sample_sas(alpha: StabilityIndex, scale: StableScale, rng: &mut RngStream) -> f64 {
    if scale.get() == 0.0 {
        return 0.0;
    }
    let a = alpha.get();
    let v = PI * (rng.uniform_open() - 0.5);
    let w = rng.exp1();
    let x = if (a - 1.0).abs() < 1e-12 {
        v.tan()
    } else {
        let first = (a * v).sin() / v.cos().powf(1.0 / a);
        let second = (((1.0 - a) * v).cos() / w).powf((1.0 - a) / a);
        first * second
    };
    scale.get() * x
}

/// One draw of a standard positive strictly stable variable with
/// `E exp(-sW) = exp(-s^index)`, using Kanter's representation.
pub fn sample_positive_stable(index: f64, rng: &mut RngStream) -> Result<f64> {
    if !(index > 0.0 && index < 1.0) {
        return Err(invalid("index", format!("{index} must lie in (0, 1)")));
    }
    let a = index;
    loop {
        let u = PI * rng.uniform_open();
        let e = rng.exp1();
        let kanter = ((a * u).sin() / u.sin()).powf(1.0 / (1.0 - a)) * ((1.0 - a) * u).sin() / (a * u).sin();
        let w = (kanter / e).powf((1.0 - a) / a);
        if w.is_finite() && w > 0.0 {
            return Ok(w);
        }
    }
}

fn sinc(y: f64) -> f64 {
    if y.abs() < 1e-8 {
        1.0 - y * y / 6.0
    } else {
        y.sin() / y
    }
}

/// `∫_0^∞ x^{-α} sin x dx`, evaluated as `Γ(2-α) · (π/2) · sinc(π(1-α)/2)`,
/// which is continuous through α = 1.
pub fn sine_integral(alpha: StabilityIndex) -> f64 {
    let a = alpha.get();
    gamma(2.0 - a) * FRAC_PI_2 * sinc(FRAC_PI_2 * (1.0 - a))
}

/// Normalising constant `c_α = (∫_0^∞ x^{-α} sin x dx)^{-1}` of the LePage
/// series `X = c_α^{1/α} Σ ε_i Γ_i^{-1/α} (dm/dq)^{1/α}(U_i) f(U_i)`.
pub fn series_constant(alpha: StabilityIndex) -> f64 {
    1.0 / sine_integral(alpha)
}

/// `E|Z|^p` for a standard normal `Z`.
pub fn gaussian_abs_moment(p: f64) -> f64 {
    2f64.powf(p / 2.0) * gamma((p + 1.0) / 2.0) / PI.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_range_is_enforced() {
        assert!(StabilityIndex::new(0.0).is_err());
        assert!(StabilityIndex::new(0.04).is_err());
        assert!(StabilityIndex::new(1.995).is_err());
        assert!(StabilityIndex::new(2.0).is_err());
        assert!(StabilityIndex::new(f64::NAN).is_err());
        assert!(StabilityIndex::new(0.05).is_ok());
        assert!(StabilityIndex::new(1.99).is_ok());
    }

    #[test]
    fn scale_rejects_negative() {
        assert!(StableScale::new(-1e-9).is_err());
        assert!(StableScale::new(f64::INFINITY).is_err());
        assert_eq!(StableScale::new(0.0).unwrap(), StableScale::ZERO);
    }

    #[test]
    fn zero_scale_gives_exact_zero() {
        let mut rng = RngStream::new(1, 0);
        for a in [0.3, 1.0, 1.8] {
            let alpha = StabilityIndex::new(a).unwrap();
            for _ in 0..100 {
                assert_eq!(sample_sas(alpha, StableScale::ZERO, &mut rng), 0.0);
            }
        }
    }

    #[test]
    fn cauchy_median_is_centered() {
        let alpha = StabilityIndex::new(1.0).unwrap();
        let scale = StableScale::new(1.0).unwrap();
        let mut rng = RngStream::new(2024, 0);
        let mut xs: Vec<f64> = (0..100_000).map(|_| sample_sas(alpha, scale, &mut rng)).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = 0.5 * (xs[49_999] + xs[50_000]);
        assert!(median.abs() <= 0.02, "median {median}");
    }

    #[test]
    fn positive_stable_rejects_boundary() {
        let mut rng = RngStream::new(1, 0);
        assert!(sample_positive_stable(1.0, &mut rng).is_err());
        assert!(sample_positive_stable(0.0, &mut rng).is_err());
        assert!(sample_positive_stable(1.2, &mut rng).is_err());
    }

    #[test]
    fn positive_stable_is_positive() {
        let mut rng = RngStream::new(3, 0);
        for _ in 0..10_000 {
            assert!(sample_positive_stable(0.75, &mut rng).unwrap() > 0.0);
        }
    }

    #[test]
    fn sine_integral_known_values() {
        // α = 1/2: ∫ x^{-1/2} sin x dx = sqrt(π/2).
        let half = StabilityIndex::new(0.5).unwrap();
        assert!((sine_integral(half) - (PI / 2.0).sqrt()).abs() < 1e-12);
        let one = StabilityIndex::new(1.0).unwrap();
        assert!((sine_integral(one) - FRAC_PI_2).abs() < 1e-12);
        // Continuity across α = 1.
        let below = sine_integral(StabilityIndex::new(1.0 - 1e-7).unwrap());
        let above = sine_integral(StabilityIndex::new(1.0 + 1e-7).unwrap());
        assert!((below - above).abs() < 1e-6);
    }

    #[test]
    fn gaussian_moment_values() {
        assert!((gaussian_abs_moment(2.0) - 1.0).abs() < 1e-12);
        assert!((gaussian_abs_moment(1.0) - (2.0 / PI).sqrt()).abs() < 1e-12);
    }
}
