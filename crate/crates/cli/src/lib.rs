//! Command-line experiment runner for `stable-flows`.
//!
//! A run is described by an [`ExperimentConfig`], read from a TOML file and
//! overridden by flags. It writes one JSON report and optional CSV tables.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use stable_flows::catalog::QChoice;

pub use config::{Command, ExperimentConfig};
pub use error::CliError;

use error::{io, usage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum QArg {
    Default,
    Alternate,
    Broad,
}

impl From<QArg> for QChoice {
    fn from(q: QArg) -> Self {
        match q {
            QArg::Default => QChoice::Default,
            QArg::Alternate => QChoice::Alternate,
            QArg::Broad => QChoice::Broad,
        }
    }
}

/// Flags override the config file, which overrides the defaults.
#[derive(Debug, Parser)]
#[command(name = "stable-flows", version, about = "Classify, simulate and diagnose stationary SαS processes")]
pub struct Cli {
    /// Command to run; taken from the config file when omitted.
    #[arg(value_enum)]
    command: Option<Command>,
    /// TOML experiment file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed (default: $SAS_FLOWS_SEED, else 7).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Cap on worker threads.
    #[arg(long)]
    threads: Option<usize>,
    /// Catalog entry to use as the kernel.
    #[arg(long, value_name = "NAME")]
    catalog: Option<String>,
    /// Sampling law of the kernel.
    #[arg(long, value_enum)]
    q: Option<QArg>,
    /// Points sampled by classify and decompose.
    #[arg(long)]
    points: Option<usize>,
    /// Series terms for simulate and maxima.
    #[arg(long)]
    n_terms: Option<usize>,
    /// Paths drawn by simulate.
    #[arg(long)]
    paths: Option<usize>,
    /// Replications of the maxima survey.
    #[arg(long)]
    replications: Option<usize>,
    /// Run the maxima survey inside diagnose.
    #[arg(long)]
    with_maxima: bool,
    /// Run every verification criterion.
    #[arg(long)]
    all: bool,
    /// Verification criterion to run; repeatable.
    #[arg(long = "criterion", value_name = "N")]
    criteria: Vec<u8>,
    /// Where to write the JSON report (default: stdout).
    #[arg(long)]
    json: Option<PathBuf>,
    /// Directory for CSV tables.
    #[arg(long)]
    csv_dir: Option<PathBuf>,
    /// Print the resolved config as TOML and exit.
    #[arg(long)]
    print_config: bool,
}

impl Cli {
    /// The config this invocation describes.
    pub fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::from_toml(&std::fs::read_to_string(path).map_err(io(path))?)?,
            None => ExperimentConfig::default(),
        };
        if let Some(cmd) = self.command {
            c.command = cmd;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(a) = self.alpha {
            c.alpha = a;
        }
        if self.threads.is_some() {
            c.threads = self.threads;
        }
        if let Some(name) = &self.catalog {
            c.kernel = config::KernelSelector::Catalog { name: name.clone(), q: QChoice::Default };
        }
        if let Some(q) = self.q {
            c.kernel = c.kernel.with_q(q.into());
        }
        if let Some(n) = self.points {
            c.classify.n_points = n;
        }
        if let Some(n) = self.n_terms {
            c.simulate.n_terms = n;
            c.maxima.n_terms = n;
        }
        if let Some(n) = self.paths {
            c.simulate.paths = n;
        }
        if let Some(n) = self.replications {
            c.maxima.replications = n;
        }
        if self.with_maxima {
            c.diagnose.maxima = true;
        }
        if self.all {
            c.verify.criteria.clear();
        } else if !self.criteria.is_empty() {
            c.verify.criteria = self.criteria.clone();
        }
        if self.json.is_some() {
            c.output.json = self.json.clone();
        }
        if self.csv_dir.is_some() {
            c.output.csv_dir = self.csv_dir.clone();
        }
        c.validate()?;
        Ok(c)
    }
}

/// Run one experiment and write its outputs. Returns the exit status.
pub fn run(cfg: &ExperimentConfig) -> Result<i32, CliError> {
    if let Some(n) = cfg.threads {
        // Fails only when a pool already exists, e.g. on a second run in-process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let start = Instant::now();
    let outcome = commands::run(cfg)?;
    report::emit(cfg, &outcome)?;
    eprintln!("{} finished in {:.1}s", cfg.command.name(), start.elapsed().as_secs_f64());
    Ok(outcome.status.exit_code())
}

/// Entry point of the binary: parse, run, map errors to exit codes.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = cli.resolve().and_then(|cfg| {
        if cli.print_config {
            print!("{}", cfg.to_toml());
            return Ok(0);
        }
        if cli.command.is_none() && cli.config.is_none() {
            return Err(usage("give a command or --config (see --help)"));
        }
        run(&cfg)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("stable-flows: {e}");
            e.exit_code()
        }
    }
}
