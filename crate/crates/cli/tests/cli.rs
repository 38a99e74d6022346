use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use secrecy_ascent_cli::output::{
    FIXED_AGGREGATE_HEADER, TRACE_HEADER, VARIABLE_AGGREGATE_HEADER,
};
use secrecy_ascent_cli::RunReport;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_secrecy-ascent"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect();
    (header, rows)
}

fn assert_finite_cells(rows: &[Vec<String>]) {
    assert!(!rows.is_empty());
    for row in rows {
        for cell in row {
            let v: f64 = cell.parse().unwrap_or_else(|_| panic!("non-numeric cell {cell}"));
            assert!(v.is_finite(), "cell {cell}");
        }
    }
}

#[test]
fn validate_accepts_bundled_configs() {
    for name in ["mmwave.cfg", "sub6.cfg"] {
        let o = run(&["validate", "--config", config(name).to_str().unwrap()]);
        assert!(o.status.success(), "{name}: {}", stderr(&o));
        let text = String::from_utf8(o.stdout).unwrap();
        assert!(text.contains("n_trials = 1000"));
    }
}

#[test]
fn invalid_values_exit_with_config_status() {
    let cfg = config("mmwave.cfg");
    let cfg = cfg.to_str().unwrap();
    let o = run(&["validate", "--config", cfg, "--trials", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("n_trials"));

    let o = run(&["validate", "--config", cfg, "--p-s-db=-ten"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("p_s_db"));

    let o = run(&["validate", "--config", cfg, "--experiment", "variable_power"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("zeta"));

    let o = run(&["validate", "--config", cfg, "--set", "no_such_key=1"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["validate", "--config", "/nonexistent/file.cfg"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn run_with_bad_config_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&[
        "run",
        "--config",
        config("sub6.cfg").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--set",
        "delta0=0",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn gradcheck_passes_and_negative_control_fails() {
    let o = run(&["gradcheck", "--n-rx", "2", "--n-tx", "4", "--instances", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = run(&["gradcheck", "--instances", "3", "--corrupt-gradient"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["gradcheck", "--n-rx", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fixed_power_run_writes_schema_conforming_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "run",
        "--config",
        config("sub6.cfg").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--trials",
        "3",
        "--max-iters",
        "200",
        "--threads",
        "2",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));

    for name in ["trace.csv", "trace_benchmark.csv"] {
        let (header, rows) = read_csv(&dir.path().join(name));
        assert_eq!(header, TRACE_HEADER);
        assert_finite_cells(&rows);
        let trials: std::collections::BTreeSet<&str> = rows.iter().map(|r| r[0].as_str()).collect();
        assert_eq!(trials.len(), 3);
    }
    let (header, rows) = read_csv(&dir.path().join("aggregate.csv"));
    assert_eq!(header, FIXED_AGGREGATE_HEADER);
    assert_finite_cells(&rows);

    let json = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let report: RunReport = serde_json::from_str(&json).unwrap();
    assert_eq!(report.report.n_trials, 3);
    assert_eq!(report.manifest.master_seed, 1);
    assert_eq!(report.manifest.outputs.len(), 4);
    let again: RunReport = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(again, report);
}

#[test]
fn variable_power_run_writes_power_curve() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "run",
        "--config",
        config("mmwave.cfg").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--experiment",
        "variable_power",
        "--zeta",
        "4",
        "--trials",
        "2",
        "--max-iters",
        "50",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(!dir.path().join("trace_benchmark.csv").exists());
    let (header, rows) = read_csv(&dir.path().join("aggregate.csv"));
    assert_eq!(header, VARIABLE_AGGREGATE_HEADER);
    assert_finite_cells(&rows);
    let json = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let report: RunReport = serde_json::from_str(&json).unwrap();
    assert!(report.report.cycles.is_some());
}
