//! Experiment configuration and its TOML file format.
//!
//! Every section and field has a default, so a file only needs the values it
//! changes. Unknown keys are rejected.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use stable_flows::catalog::{
    catalog_entry, cyclic_kernel, markov_chain_kernel, mixed_moving_average, rotation, stationary_increment_kernel,
    sub_stable_entry, CatalogEntry, CyclicAtom, QChoice,
};
use stable_flows::classify::ClassifyConfig;
use stable_flows::diagnostics::ErgodicityConfig;
use stable_flows::kernels::LineFunction;
use stable_flows::paths::{Covariance, TrajectoryModel};
use stable_flows::StabilityIndex;

use crate::error::{usage, CliError};

/// Environment variable holding the seed used when neither flag nor file sets one.
pub const SEED_ENV: &str = "SAS_FLOWS_SEED";
pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    #[default]
    Classify,
    Simulate,
    Diagnose,
    Maxima,
    Decompose,
    Catalog,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Simulate => "simulate",
            Command::Diagnose => "diagnose",
            Command::Maxima => "maxima",
            Command::Decompose => "decompose",
            Command::Catalog => "catalog",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    pub seed: u64,
    pub alpha: f64,
    /// Worker cap; all cores when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub kernel: KernelSelector,
    pub classify: ClassifySection,
    pub simulate: SimulateSection,
    pub diagnose: DiagnoseSection,
    pub maxima: MaximaSection,
    pub verify: VerifySection,
    pub output: OutputSection,
}

fn seed_from_env() -> u64 {
    std::env::var(SEED_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_SEED)
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: Command::default(),
            seed: seed_from_env(),
            alpha: 1.5,
            threads: None,
            kernel: KernelSelector::default(),
            classify: ClassifySection::default(),
            simulate: SimulateSection::default(),
            diagnose: DiagnoseSection::default(),
            maxima: MaximaSection::default(),
            verify: VerifySection::default(),
            output: OutputSection::default(),
        }
    }
}

/// One `(weight, profile)` atom of a mixed moving average.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MovingAverageAtom {
    pub weight: f64,
    pub phi: LineFunction,
}

/// A catalog entry by name, or an inline kernel built by one of the catalog
/// constructors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSelector {
    Catalog {
        name: String,
        #[serde(default)]
        q: QChoice,
    },
    MixedMovingAverage {
        atoms: Vec<MovingAverageAtom>,
        #[serde(default)]
        q: QChoice,
    },
    Cyclic {
        atoms: Vec<CyclicAtom>,
        #[serde(default)]
        q: QChoice,
    },
    Rotation {
        rate: f64,
        #[serde(default)]
        q: QChoice,
    },
    MarkovChain {
        phi: LineFunction,
        #[serde(default)]
        signed: bool,
        #[serde(default)]
        q: QChoice,
    },
    StationaryIncrement {
        phi: LineFunction,
        y: TrajectoryModel,
        #[serde(default)]
        q: QChoice,
    },
    SubStable {
        beta: f64,
        cov: Covariance,
    },
}

impl Default for KernelSelector {
    fn default() -> Self {
        KernelSelector::Catalog { name: "moving_average".into(), q: QChoice::Default }
    }
}

impl KernelSelector {
    pub fn build(&self, alpha: StabilityIndex) -> stable_flows::Result<CatalogEntry> {
        match self {
            KernelSelector::Catalog { name, q } => catalog_entry(name, alpha, *q),
            KernelSelector::MixedMovingAverage { atoms, q } => {
                let atoms: Vec<(f64, LineFunction)> = atoms.iter().map(|a| (a.weight, a.phi)).collect();
                mixed_moving_average(alpha, &atoms, *q)
            }
            KernelSelector::Cyclic { atoms, q } => cyclic_kernel(alpha, atoms, *q),
            KernelSelector::Rotation { rate, q } => rotation(alpha, *rate, *q),
            KernelSelector::MarkovChain { phi, signed, q } => markov_chain_kernel(alpha, *phi, *signed, *q),
            KernelSelector::StationaryIncrement { phi, y, q } => stationary_increment_kernel(alpha, *phi, *y, *q),
            KernelSelector::SubStable { beta, cov } => sub_stable_entry(alpha, *beta, *cov),
        }
    }

    /// Same kernel under a different sampling law, where it has one.
    pub fn with_q(&self, new_q: QChoice) -> Self {
        let mut out = self.clone();
        match &mut out {
            KernelSelector::Catalog { q, .. }
            | KernelSelector::MixedMovingAverage { q, .. }
            | KernelSelector::Cyclic { q, .. }
            | KernelSelector::Rotation { q, .. }
            | KernelSelector::MarkovChain { q, .. }
            | KernelSelector::StationaryIncrement { q, .. } => *q = new_q,
            KernelSelector::SubStable { .. } => {}
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifySection {
    pub n_points: usize,
    pub thresholds: ClassifyConfig,
}

impl Default for ClassifySection {
    fn default() -> Self {
        Self { n_points: 200, thresholds: ClassifyConfig::default() }
    }
}

/// Paths on the grid `start, start + step, …` up to and including `stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    pub paths: usize,
    pub n_terms: usize,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self { paths: 1, n_terms: 10_000, start: 0.0, stop: 100.0, step: 1.0 }
    }
}

impl SimulateSection {
    pub fn times(&self) -> Result<Vec<f64>, CliError> {
        if !(self.step > 0.0 && self.stop >= self.start && self.start.is_finite() && self.stop.is_finite()) {
            return Err(usage("simulate: need step > 0 and start <= stop"));
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        if n > 10_000_000 {
            return Err(usage("simulate: more than 10^7 grid points"));
        }
        Ok((0..n).map(|i| self.start + i as f64 * self.step).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrossSection {
    /// Conditioning set `K = [k_lo, k_hi]` for `|f_0|^α`.
    pub k_lo: f64,
    pub k_hi: f64,
    pub eps: f64,
    pub n_grid: Vec<usize>,
    pub samples: usize,
}

impl Default for GrossSection {
    fn default() -> Self {
        Self { k_lo: 0.5, k_hi: 2.0, eps: 0.1, n_grid: vec![1, 16, 256, 4096], samples: 20_000 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnoseSection {
    pub ergodicity: ErgodicityConfig,
    pub gross: GrossSection,
    /// Also run the maxima survey with the `[maxima]` settings.
    pub maxima: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaximaSection {
    pub n_grid: Vec<usize>,
    pub replications: usize,
    pub n_terms: usize,
    /// Sampling law used for the maxima paths; long grids need a wide one.
    pub q: QChoice,
}

impl Default for MaximaSection {
    fn default() -> Self {
        Self { n_grid: (10..=16).map(|k| 1usize << k).collect(), replications: 200, n_terms: 10_000, q: QChoice::Broad }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    /// Criteria to run, from 1 to 9. Empty means all.
    pub criteria: Vec<u8>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// JSON report path; standard output when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
    /// Directory for CSV tables; none are written when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| usage(format!("config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable in TOML")
    }

    pub fn stability_index(&self) -> Result<StabilityIndex, CliError> {
        StabilityIndex::new(self.alpha).map_err(|e| usage(format!("alpha: {e}")))
    }

    /// Checks that do not need a kernel.
    pub fn validate(&self) -> Result<(), CliError> {
        self.stability_index()?;
        if self.threads == Some(0) {
            return Err(usage("threads must be at least 1"));
        }
        if self.classify.n_points == 0 {
            return Err(usage("classify.n_points must be at least 1"));
        }
        if self.simulate.paths == 0 {
            return Err(usage("simulate.paths must be at least 1"));
        }
        if self.maxima.replications == 0 || self.maxima.n_grid.is_empty() || self.maxima.n_grid.contains(&0) {
            return Err(usage("maxima: need replications >= 1 and a grid of positive n"));
        }
        if let Some(c) = self.verify.criteria.iter().find(|c| !(1..=9).contains(*c)) {
            return Err(usage(format!("verify.criteria: {c} is not in 1..=9")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = ExperimentConfig::default();
        assert_eq!(ExperimentConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn inline_kernels_round_trip() {
        let mut c = ExperimentConfig { threads: Some(3), ..Default::default() };
        c.output.json = Some("out/report.json".into());
        c.verify.criteria = vec![1, 7];
        c.kernel = KernelSelector::StationaryIncrement {
            phi: LineFunction::Tent { center: 0.0, half_width: 0.5 },
            y: TrajectoryModel::Fbm { hurst: 0.3 },
            q: QChoice::Alternate,
        };
        assert_eq!(ExperimentConfig::from_toml(&c.to_toml()).unwrap(), c);
        c.kernel = KernelSelector::MixedMovingAverage {
            atoms: vec![
                MovingAverageAtom { weight: 0.5, phi: LineFunction::unit_indicator() },
                MovingAverageAtom { weight: 2.0, phi: LineFunction::PowerTail { exponent: 3.0 } },
            ],
            q: QChoice::Broad,
        };
        assert_eq!(ExperimentConfig::from_toml(&c.to_toml()).unwrap(), c);
        c.kernel = KernelSelector::SubStable { beta: 1.8, cov: Covariance::Exponential { rate: 1.0 } };
        assert_eq!(ExperimentConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn partial_files_fill_defaults() {
        let c = ExperimentConfig::from_toml(
            "command = \"diagnose\"\nalpha = 1.2\n[kernel]\nkind = \"catalog\"\nname = \"rotation\"\n[classify.thresholds]\neps_div = 0.3\n",
        )
        .unwrap();
        assert_eq!(c.command, Command::Diagnose);
        assert_eq!(c.alpha, 1.2);
        assert_eq!(c.classify.thresholds.eps_div, 0.3);
        assert_eq!(c.classify.thresholds.eps_conv, ClassifyConfig::default().eps_conv);
        assert_eq!(c.classify.n_points, 200);
    }

    #[test]
    fn malformed_files_are_usage_errors() {
        for bad in ["alpha = \"x\"", "bogus = 1", "[classify]\nn_pts = 3", "[kernel]\nkind = \"nope\""] {
            let e = ExperimentConfig::from_toml(bad).unwrap_err();
            assert_eq!(e.exit_code(), 64, "{bad}");
        }
        let c = ExperimentConfig { alpha: 2.5, ..Default::default() };
        assert_eq!(c.validate().unwrap_err().exit_code(), 64);
    }
}
