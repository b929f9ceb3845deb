//! One function per subcommand. Each returns the JSON result and its tables.

use serde_json::json;
use stable_flows::catalog::{catalog_entry, CatalogEntry, QChoice, CATALOG_NAMES, CLASSIFIED_NAMES};
use stable_flows::classify::{classify_process, decompose, ClassificationReport};
use stable_flows::diagnostics::{
    ergodicity_verdict, gross_criterion, maxima_scaling, DiagnosticsReport, GrossResult, MaximaTable,
};
use stable_flows::simulate::{replicate, simulate_series, SeriesConfig};
use stable_flows::{Error, FlowClass, RngStream};

use crate::config::{Command, ExperimentConfig};
use crate::error::CliError;
use crate::report::{num, tag, Outcome, Status, Table};

/// Stream ids, one per kind of randomness, so that commands sharing a seed
/// draw the same points.
pub mod streams {
    pub const CLASSIFY: u64 = 1;
    pub const SIMULATE: u64 = 2;
    pub const GROSS: u64 = 3;
    pub const MAXIMA: u64 = 4;
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    match cfg.command {
        Command::Classify => classify(cfg),
        Command::Simulate => simulate(cfg),
        Command::Diagnose => diagnose(cfg),
        Command::Maxima => maxima(cfg),
        Command::Decompose => decompose_cmd(cfg),
        Command::Catalog => catalog(cfg),
        Command::Verify => crate::verify::run(cfg),
    }
}

fn entry(cfg: &ExperimentConfig) -> Result<CatalogEntry, CliError> {
    Ok(cfg.kernel.build(cfg.stability_index()?)?)
}

pub fn classification_table(report: &ClassificationReport) -> Table {
    let mut header = vec!["point_id".to_string(), "pn_verdict".into(), "cd_verdict".into(), "off_support".into()];
    header.extend(report.weight_labels.iter().map(|l| format!("S_final_{l}")));
    header.push("S_final_unweighted".into());
    let mut t = Table { name: "classification".into(), header, rows: Vec::new() };
    for p in &report.per_point {
        let mut row = vec![p.index.to_string(), tag(&p.positive_null), tag(&p.cons_diss), p.off_support.to_string()];
        row.extend(p.partial_sums.weighted.iter().map(|w| num(w.last().copied().unwrap_or(0.0))));
        row.push(num(p.partial_sums.unweighted.last().copied().unwrap_or(0.0)));
        t.push(row);
    }
    t
}

fn status_of(report: &ClassificationReport) -> Status {
    if report.majority().0 == FlowClass::Unknown {
        Status::Undecided
    } else {
        Status::Ok
    }
}

fn classify(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let e = entry(cfg)?;
    let rng = RngStream::new(cfg.seed, streams::CLASSIFY);
    let report = classify_process(&e.kernel, cfg.classify.n_points, &cfg.classify.thresholds, &rng)?;
    let (class, share) = report.majority();
    let result = json!({
        "kernel": e.name,
        "ground_truth": e.ground_truth,
        "majority": { "class": class, "share": share },
        "report": report,
    });
    Ok(Outcome { result, tables: vec![classification_table(&report)], status: status_of(&report) })
}

fn simulate(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let e = entry(cfg)?;
    let times = cfg.simulate.times()?;
    let series = SeriesConfig::new(cfg.simulate.n_terms)?;
    let rng = RngStream::new(cfg.seed, streams::SIMULATE);
    let paths = replicate(cfg.simulate.paths, &rng, |r| match &e.direct {
        Some(d) => d.simulate(e.kernel.alpha, &times, r),
        None => simulate_series(&e.kernel, &times, &series, r),
    })?;
    let mut t = Table::new("paths", &["path_id", "t", "value", "truncation"]);
    for (i, p) in paths.iter().enumerate() {
        for k in 0..p.times.len() {
            t.push(vec![i.to_string(), num(p.times[k]), num(p.values[k]), num(p.truncation[k])]);
        }
    }
    let result = json!({ "kernel": e.name, "direct": e.direct.is_some(), "paths": paths });
    Ok(Outcome { result, tables: vec![t], status: Status::Ok })
}

pub fn ergodicity_table(seq: &[(f64, f64)]) -> Table {
    let mut t = Table::new("ergodicity", &["M", "average"]);
    for &(m, a) in seq {
        t.push(vec![num(m), num(a)]);
    }
    t
}

pub fn gross_table(g: &GrossResult) -> Table {
    let mut t = Table::new("gross", &["n", "average"]);
    for &(n, a) in &g.values {
        t.push(vec![n.to_string(), num(a)]);
    }
    t
}

pub fn maxima_table(m: &MaximaTable) -> Table {
    let mut t = Table::new("maxima", &["n", "median", "q25", "q75"]);
    for r in &m.rows {
        t.push(vec![r.n.to_string(), num(r.median), num(r.q25), num(r.q75)]);
    }
    t
}

fn run_maxima(cfg: &ExperimentConfig) -> Result<MaximaTable, CliError> {
    let m = &cfg.maxima;
    let e = cfg.kernel.with_q(m.q).build(cfg.stability_index()?)?;
    let series = SeriesConfig::new(m.n_terms)?;
    let rng = RngStream::new(cfg.seed, streams::MAXIMA);
    Ok(maxima_scaling(&e.kernel, e.direct.as_ref(), &m.n_grid, m.replications, &series, &rng)?)
}

fn diagnose(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let e = entry(cfg)?;
    let d = &cfg.diagnose;
    let (ergodicity, seq) = ergodicity_verdict(&e.kernel, &d.ergodicity)?;
    let g = &d.gross;
    let rng = RngStream::new(cfg.seed, streams::GROSS);
    let gross = match gross_criterion(&e.kernel, (g.k_lo, g.k_hi), g.eps, &g.n_grid, g.samples, &rng) {
        Ok(r) => Some(r),
        Err(Error::EmptyConditioningSet) => None,
        Err(err) => return Err(err.into()),
    };
    let maxima = if d.maxima { Some(run_maxima(cfg)?) } else { None };
    let report = DiagnosticsReport { ergodicity_cesaro: seq, ergodicity, gross, maxima };
    let mut tables = vec![ergodicity_table(&report.ergodicity_cesaro)];
    tables.extend(report.gross.as_ref().map(gross_table));
    tables.extend(report.maxima.as_ref().map(maxima_table));
    let result = json!({
        "kernel": e.name,
        "ground_truth": e.ground_truth,
        "conservative_null_signature": report.conservative_null_signature(),
        "report": report,
    });
    Ok(Outcome { result, tables, status: Status::Ok })
}

fn maxima(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let table = run_maxima(cfg)?;
    let e = entry(cfg)?;
    let t = maxima_table(&table);
    let result = json!({ "kernel": e.name, "q": cfg.maxima.q, "maxima": table });
    Ok(Outcome { result, tables: vec![t], status: Status::Ok })
}

fn decompose_cmd(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let e = entry(cfg)?;
    let rng = RngStream::new(cfg.seed, streams::CLASSIFY);
    let report = classify_process(&e.kernel, cfg.classify.n_points, &cfg.classify.thresholds, &rng)?;
    let d = decompose(&e.kernel, &report)?;
    let inv = e.kernel.alpha.inv();
    let names = ["dissipative", "conservative_null", "positive"];
    let mut t = Table::new("decomposition", &["part", "norm_alpha", "scale"]);
    let mut parts = serde_json::Map::new();
    for (name, &v) in names.iter().zip(&d.norms_alpha) {
        t.push(vec![name.to_string(), num(v), num(v.powf(inv))]);
        parts.insert(name.to_string(), json!({ "norm_alpha": v, "scale": v.powf(inv) }));
    }
    let (class, share) = report.majority();
    let result = json!({
        "kernel": e.name,
        "n_points": report.n_points,
        "majority": { "class": class, "share": share },
        "fractions": report.fractions,
        "undecided_fraction": report.undecided_fraction,
        "undecided_hopf_fraction": report.undecided_hopf_fraction,
        "parts": parts,
        "unassigned_alpha": d.unassigned_alpha,
        "total_norm_alpha": e.kernel.integral_abs_alpha(&[(1.0, 0.0)])?,
    });
    Ok(Outcome { result, tables: vec![t, classification_table(&report)], status: status_of(&report) })
}

fn catalog(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let alpha = cfg.stability_index()?;
    let mut t = Table::new("catalog", &["name", "ground_truth", "time_domain", "classified", "provenance"]);
    let mut list = Vec::new();
    for name in CATALOG_NAMES {
        let e = catalog_entry(name, alpha, QChoice::Default)?;
        let classified = CLASSIFIED_NAMES.contains(name);
        t.push(vec![
            e.name.clone(),
            tag(&e.ground_truth),
            tag(&e.kernel.time_domain),
            classified.to_string(),
            e.provenance.clone(),
        ]);
        list.push(json!({
            "name": e.name,
            "ground_truth": e.ground_truth,
            "time_domain": e.kernel.time_domain,
            "classified": classified,
            "direct_simulator": e.direct,
            "provenance": e.provenance,
        }));
    }
    Ok(Outcome { result: json!({ "entries": list }), tables: vec![t], status: Status::Ok })
}
