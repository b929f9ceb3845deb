use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_stable-flows"));
    c.env_remove("SAS_FLOWS_SEED");
    c
}

fn tmp(name: &str) -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn run(c: &mut Command) -> (i32, Value, Output) {
    let out = c.output().unwrap();
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), json, out)
}

#[test]
fn classify_moving_average_is_dissipative() {
    let (code, j, _) = run(bin().args(["classify", "--catalog", "moving_average", "--alpha", "1.5", "--seed", "7", "--points", "40"]));
    assert_eq!(code, 0);
    assert_eq!(j["result"]["report"]["fractions"]["dissipative"]["value"], 1.0);
    assert_eq!(j["seed"], 7);
    assert_eq!(j["config"]["kernel"]["name"], "moving_average");
    assert_eq!(j["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn diagnose_rotation_is_not_ergodic() {
    let (code, j, _) = run(bin().args(["diagnose", "--catalog", "rotation", "--alpha", "1.2"]));
    assert_eq!(code, 0);
    assert_eq!(j["result"]["report"]["ergodicity"]["ergodic"], false);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(run(bin().arg("frobnicate")).0, 64);
    assert_eq!(run(bin().args(["classify", "--alpha", "2.5"])).0, 64);
    assert_eq!(run(bin().args(["classify", "--points", "lots"])).0, 64);
    assert_eq!(run(&mut bin()).0, 64);
    let dir = tmp("usage");
    let bad = dir.join("bad.toml");
    std::fs::write(&bad, "alpha = 1.5\nunknown_key = 3\n").unwrap();
    assert_eq!(run(bin().arg("--config").arg(&bad)).0, 64);
    std::fs::write(&bad, "[classify]\nn_points = 0\n").unwrap();
    assert_eq!(run(bin().arg("classify").arg("--config").arg(&bad)).0, 64);
}

#[test]
fn runtime_errors_exit_1() {
    let (code, _, out) = run(bin().args(["classify", "--catalog", "no_such_entry"]));
    assert_eq!(code, 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no_such_entry"));
}

#[test]
fn undecided_majority_exits_2() {
    let dir = tmp("undecided");
    let cfg = dir.join("c.toml");
    std::fs::write(
        &cfg,
        "command = \"classify\"\n[kernel]\nkind = \"catalog\"\nname = \"rotation\"\n[classify]\nn_points = 10\n[classify.thresholds]\neps_div = 100.0\n",
    )
    .unwrap();
    let (code, j, _) = run(bin().arg("--config").arg(&cfg));
    assert_eq!(code, 2);
    assert_eq!(j["result"]["majority"]["class"], "unknown");
}

#[test]
fn flags_override_file_and_env_sets_default_seed() {
    let dir = tmp("override");
    let cfg = dir.join("c.toml");
    std::fs::write(&cfg, "command = \"catalog\"\nseed = 11\nalpha = 1.2\n").unwrap();
    let (_, j, _) = run(bin().arg("--config").arg(&cfg));
    assert_eq!((j["seed"].as_u64(), j["config"]["alpha"].as_f64()), (Some(11), Some(1.2)));
    let (_, j, _) = run(bin().arg("--config").arg(&cfg).args(["--seed", "5", "--alpha", "0.9"]));
    assert_eq!((j["seed"].as_u64(), j["config"]["alpha"].as_f64()), (Some(5), Some(0.9)));
    let (_, j, _) = run(bin().arg("catalog").env("SAS_FLOWS_SEED", "99"));
    assert_eq!(j["seed"], 99);
    let (_, j, _) = run(bin().arg("--config").arg(&cfg).env("SAS_FLOWS_SEED", "99"));
    assert_eq!(j["seed"], 11);
}

#[test]
fn printed_config_reproduces_the_run() {
    let dir = tmp("print");
    let out = bin()
        .args(["simulate", "--catalog", "moving_average", "--seed", "3", "--paths", "2", "--n-terms", "500", "--print-config"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let cfg = dir.join("c.toml");
    std::fs::write(&cfg, &out.stdout).unwrap();
    let (code, from_file, _) = run(bin().arg("--config").arg(&cfg));
    let (_, from_flags, _) = run(bin().args(["simulate", "--catalog", "moving_average", "--seed", "3", "--paths", "2", "--n-terms", "500"]));
    assert_eq!(code, 0);
    assert_eq!(from_file, from_flags);
    assert_eq!(from_file["result"]["paths"].as_array().unwrap().len(), 2);
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = tmp("determinism");
    let args = ["decompose", "--catalog", "rotation_translation_mixture", "--points", "60", "--seed", "4"];
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    assert_eq!(bin().args(args).arg("--json").arg(&a).status().unwrap().code(), Some(0));
    assert_eq!(bin().args(args).args(["--threads", "1"]).arg("--json").arg(&b).status().unwrap().code(), Some(0));
    let (ja, jb): (Value, Value) =
        (serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap(), serde_json::from_slice(&std::fs::read(&b).unwrap()).unwrap());
    // Only the echoed thread cap differs.
    assert_eq!(ja["result"], jb["result"]);
    // The echoed config includes the output path, so reuse it.
    let first = std::fs::read(&a).unwrap();
    assert_eq!(bin().args(args).arg("--json").arg(&a).status().unwrap().code(), Some(0));
    assert!(first == std::fs::read(&a).unwrap(), "reports differ");
}

fn header(path: &PathBuf) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn csv_tables_follow_the_documented_schemas() {
    let dir = tmp("csv");
    let run_csv = |args: &[&str]| {
        let s = bin().args(args).arg("--csv-dir").arg(&dir).arg("--json").arg(dir.join("r.json")).status().unwrap();
        assert_eq!(s.code(), Some(0), "{args:?}");
    };
    run_csv(&["classify", "--catalog", "moving_average", "--points", "5"]);
    assert_eq!(
        header(&dir.join("classification.csv")),
        "point_id,pn_verdict,cd_verdict,off_support,S_final_w_0.5,S_final_w_0.75,S_final_w_1,S_final_w_log,S_final_unweighted"
    );
    assert_eq!(std::fs::read_to_string(dir.join("classification.csv")).unwrap().lines().count(), 6);
    run_csv(&["diagnose", "--catalog", "moving_average"]);
    assert_eq!(header(&dir.join("ergodicity.csv")), "M,average");
    assert_eq!(header(&dir.join("gross.csv")), "n,average");
    run_csv(&["maxima", "--catalog", "moving_average", "--replications", "4", "--n-terms", "200"]);
    assert_eq!(header(&dir.join("maxima.csv")), "n,median,q25,q75");
    run_csv(&["simulate", "--catalog", "sub_gaussian"]);
    assert_eq!(header(&dir.join("paths.csv")), "path_id,t,value,truncation");
    run_csv(&["catalog"]);
    assert_eq!(header(&dir.join("catalog.csv")), "name,ground_truth,time_domain,classified,provenance");
}

#[test]
fn quick_criteria_pass() {
    let (code, j, _) = run(bin().args(["verify", "--criterion", "1", "--criterion", "3", "--criterion", "7"]));
    assert_eq!(code, 0);
    let ids: Vec<u64> = j["result"]["criteria"].as_array().unwrap().iter().map(|c| c["id"].as_u64().unwrap()).collect();
    assert_eq!(ids, vec![1, 3, 7]);
    assert_eq!(j["result"]["all_passed"], true);
}
