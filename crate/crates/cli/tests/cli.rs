//! Behavior of the installed binary: exit codes, JSON stability, environment
//! default and diagnostics.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cr-nondeg"))
}

fn write_job(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("cr-nondeg-test-{name}-{}.json", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

const NONDEG_JOB: &str = r#"{
    "source": {"type": "graph", "vars": ["z", "w"], "s_vars": ["s"],
               "phi": ["z^2*conj(z)^2"]},
    "target": {"type": "graph", "vars": ["zp", "wp"], "s_vars": ["t"],
               "phi": ["zp*conj(zp)"]},
    "map": {"components": ["z^2", "w"]}
}"#;

const DEGENERATE_JOB: &str = r#"{
    "truncation_order": 6,
    "source": {"type": "graph", "vars": ["z", "w"], "s_vars": ["s"],
               "phi": ["z^2*conj(z)^2"]},
    "target": {"type": "graph", "vars": ["zp", "wp"], "s_vars": ["t"],
               "phi": ["zp^2*conj(zp)^2"]},
    "map": {"components": ["z", "w"]}
}"#;

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn analyze_nondegenerate_exits_zero_with_ladder_table() {
    let path = write_job("nondeg", NONDEG_JOB);
    let out = bin().arg("analyze").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("k | dim E_k"), "output:\n{text}");
    assert!(text.contains("k0 = 2"), "output:\n{text}");
    assert!(!text.contains("alpha ="), "witnesses shown without the flag");
}

#[test]
fn analyze_witnesses_flag_prints_multiindices() {
    let path = write_job("witness", NONDEG_JOB);
    let out = bin()
        .arg("analyze")
        .arg(&path)
        .arg("--witnesses")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("alpha = (0), l = 1"), "output:\n{text}");
    assert!(text.contains("alpha = (2), l = 1"), "output:\n{text}");
}

#[test]
fn analyze_degenerate_exits_two() {
    let path = write_job("degen", DEGENERATE_JOB);
    let out = bin().arg("analyze").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("degenerate up to order 6"));
}

#[test]
fn analyze_input_error_exits_one_with_context() {
    let bad = NONDEG_JOB.replace("z^2*conj(z)^2", "z^2*conj(q)^2");
    let path = write_job("bad-var", &bad);
    let out = bin().arg("analyze").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("source.phi[0]"), "stderr:\n{err}");
    assert!(err.contains("unknown variable `q`"), "stderr:\n{err}");
}

#[test]
fn analyze_rejects_map_that_misses_the_target() {
    let bad = NONDEG_JOB.replace("\"z^2\", \"w\"", "\"z\", \"2*w\"");
    let path = write_job("bad-map", &bad);
    let out = bin().arg("analyze").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(
        err.contains("does not send the source manifold into the target"),
        "stderr:\n{err}"
    );
}

#[test]
fn json_reports_are_bitwise_stable_modulo_timing() {
    let path = write_job("stable", NONDEG_JOB);
    let mut texts = Vec::new();
    for _ in 0..2 {
        let out = bin().arg("analyze").arg(&path).arg("--json").output().unwrap();
        assert_eq!(out.status.code(), Some(0));
        let mut v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        v["timing_ms"] = serde_json::json!(0);
        texts.push(serde_json::to_string(&v).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn json_report_round_trips_through_the_schema() {
    let path = write_job("schema", NONDEG_JOB);
    let out = bin().arg("analyze").arg(&path).arg("--json").output().unwrap();
    let report: cr_nondeg_cli::AnalysisReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report.verdict, cr_nondeg_cli::ReportVerdict::Nondegenerate { k0: 2 });
    assert_eq!(report.dims, vec![1, 1, 2]);
    assert_eq!(report.max_order, 10);
    assert_eq!(report.working_order, 11);
    assert_eq!(report.target_dim, 2);
    assert_eq!(*report.dims.last().unwrap(), report.target_dim);
    let back = serde_json::to_string(&report).unwrap();
    let reparsed: cr_nondeg_cli::AnalysisReport = serde_json::from_str(&back).unwrap();
    assert_eq!(report, reparsed);
}

#[test]
fn env_var_sets_the_default_max_order() {
    let path = write_job("env", NONDEG_JOB);
    let out = bin()
        .arg("analyze")
        .arg(&path)
        .env("CR_NONDEG_MAX_ORDER", "1")
        .output()
        .unwrap();
    // order 1 is not enough for this map, so the verdict flips to degenerate
    assert_eq!(out.status.code(), Some(2), "stdout: {}", stdout(&out));
    assert!(stdout(&out).contains("degenerate up to order 1"));

    // an explicit flag wins over the environment
    let out = bin()
        .arg("analyze")
        .arg(&path)
        .arg("--max-order")
        .arg("10")
        .env("CR_NONDEG_MAX_ORDER", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn corpus_passes_with_exit_zero() {
    let out = bin().arg("corpus").output().unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("all corpus jobs pass"));
    for name in ["quartic-to-quadric", "sphere-faran-h3", "sheared-hyperquadric"] {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
}

#[test]
fn corpus_json_is_machine_readable() {
    let out = bin().arg("corpus").arg("--json").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: cr_nondeg_cli::CorpusReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report.all_pass);
    assert_eq!(report.results.len(), 8);
}

#[test]
fn invariance_with_zero_trials_is_a_vacuous_pass() {
    let path = write_job("vacuous", NONDEG_JOB);
    let out = bin()
        .arg("invariance")
        .arg(&path)
        .arg("--seed")
        .arg("42")
        .arg("--trials")
        .arg("0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("all trials hold"));
}

#[test]
fn invariance_reports_record_the_seed() {
    let path = write_job("seeded", NONDEG_JOB);
    let out = bin()
        .arg("invariance")
        .arg(&path)
        .arg("--seed")
        .arg("7")
        .arg("--trials")
        .arg("2")
        .arg("--max-order")
        .arg("4")
        .arg("--json")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let report: cr_nondeg_cli::InvarianceReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report.seed, 7);
    assert_eq!(report.trials, 2);
    assert!(report.all_hold);
}

#[test]
fn invariance_json_is_bitwise_stable_for_a_fixed_seed() {
    let path = write_job("inv-stable", NONDEG_JOB);
    let mut texts = Vec::new();
    for _ in 0..2 {
        let out = bin()
            .arg("invariance")
            .arg(&path)
            .arg("--seed")
            .arg("3")
            .arg("--trials")
            .arg("2")
            .arg("--max-order")
            .arg("4")
            .arg("--json")
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        let mut v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        v["timing_ms"] = serde_json::json!(0);
        texts.push(serde_json::to_string(&v).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn missing_job_file_exits_one() {
    let out = bin().arg("analyze").arg("/nonexistent/job.json").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
