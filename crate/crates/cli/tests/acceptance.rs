//! Runs `verify --all` twice and prints one line per acceptance criterion.
//! Criterion 10 compares the two JSON reports byte for byte.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use serde_json::Value;

fn verify(out: &Path) -> (i32, Vec<u8>) {
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_stable-flows"))
        .args(["verify", "--all", "--seed", "7", "--json"])
        .arg(out)
        .env_remove("SAS_FLOWS_SEED")
        .status()
        .expect("binary runs");
    eprintln!("verify run took {:.0}s", start.elapsed().as_secs_f64());
    (status.code().unwrap_or(-1), std::fs::read(out).unwrap_or_default())
}

fn main() -> ExitCode {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    // Same output path both times: the report echoes it.
    let out = dir.join("verify.json");
    let (code_a, first) = verify(&out);
    let (code_b, second) = verify(&out);

    let mut all = true;
    match serde_json::from_slice::<Value>(&first) {
        Ok(report) => {
            let criteria = report["result"]["criteria"].as_array().cloned().unwrap_or_default();
            for id in 1..=9u64 {
                let line = match criteria.iter().find(|c| c["id"].as_u64() == Some(id)) {
                    Some(c) => {
                        let passed = c["passed"].as_bool() == Some(true);
                        all &= passed;
                        format!(
                            "criterion {id}: {} | {} | {}",
                            if passed { "PASS" } else { "FAIL" },
                            c["title"].as_str().unwrap_or(""),
                            c["summary"].as_str().unwrap_or("")
                        )
                    }
                    None => {
                        all = false;
                        format!("criterion {id}: FAIL | missing from report")
                    }
                };
                println!("{line}");
            }
        }
        Err(e) => {
            all = false;
            println!("could not read the report (exit code {code_a}): {e}");
        }
    }
    let same = !first.is_empty() && first == second;
    all &= same;
    println!(
        "criterion 10: {} | determinism | two runs with seed 7 {} ({} bytes, exit codes {code_a}/{code_b})",
        if same { "PASS" } else { "FAIL" },
        if same { "gave identical JSON" } else { "differ" },
        first.len()
    );
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
