//! CSV and JSON artifacts of a run.
//!
//! `trace.csv` columns: `trial,cycle,iteration,c_s,c_l,c_e,delta,p_s_db`.
//! Fixed-power runs also write `trace_benchmark.csv` with the same columns for
//! the optimized eavesdropper-combiner runs.
//!
//! `aggregate.csv` columns depend on the experiment:
//! `iteration,mean_c_s,mean_c_s_optimized_we,mean_svd_bound` for fixed power,
//! `cycle,mean_c_s,mean_p_s_db` for variable power.

use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{Context, Result};
use secrecy_ascent::config::{ExperimentKind, SystemConfig};
use secrecy_ascent::experiment::{AggregateReport, ExperimentOutput, TrialOutcome};
use secrecy_ascent::linear_to_db;
use secrecy_ascent::optimizer::OptimizeResult;
use serde::{Deserialize, Serialize};

pub const TRACE_HEADER: [&str; 8] = [
    "trial",
    "cycle",
    "iteration",
    "c_s",
    "c_l",
    "c_e",
    "delta",
    "p_s_db",
];
pub const FIXED_AGGREGATE_HEADER: [&str; 4] = [
    "iteration",
    "mean_c_s",
    "mean_c_s_optimized_we",
    "mean_svd_bound",
];
pub const VARIABLE_AGGREGATE_HEADER: [&str; 3] = ["cycle", "mean_c_s", "mean_p_s_db"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// Resolved config in file form.
    pub config_text: String,
    pub config: SystemConfig,
    pub master_seed: u64,
    pub version: String,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<String>,
}

/// Contents of `report.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub report: AggregateReport,
    pub manifest: RunManifest,
}

fn write_trace<'a>(
    path: &Path,
    runs: impl Iterator<Item = (u64, &'a OptimizeResult)>,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(TRACE_HEADER)?;
    for (trial, run) in runs {
        for r in &run.trace.records {
            w.write_record(&[
                trial.to_string(),
                r.cycle.to_string(),
                r.iteration.to_string(),
                r.c_s.to_string(),
                r.c_l.to_string(),
                r.c_e.to_string(),
                r.delta.to_string(),
                linear_to_db(r.p_s).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace_csv(path: &Path, trials: &[TrialOutcome]) -> Result<()> {
    write_trace(path, trials.iter().map(|t| (t.trial, &t.primary)))
}

pub fn write_benchmark_trace_csv(path: &Path, trials: &[TrialOutcome]) -> Result<()> {
    write_trace(
        path,
        trials
            .iter()
            .filter_map(|t| t.benchmark.as_ref().map(|b| (t.trial, b))),
    )
}

pub fn write_aggregate_csv(path: &Path, report: &AggregateReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    match report.experiment {
        ExperimentKind::FixedPower => {
            w.write_record(FIXED_AGGREGATE_HEADER)?;
            for (i, c_s) in report.mean_curve.iter().enumerate() {
                let bench = report.benchmark_curve.get(i).copied().unwrap_or(*c_s);
                w.write_record(&[
                    i.to_string(),
                    c_s.to_string(),
                    bench.to_string(),
                    report.svd_bound.mean.to_string(),
                ])?;
            }
        }
        ExperimentKind::VariablePower => {
            w.write_record(VARIABLE_AGGREGATE_HEADER)?;
            for (i, (c_s, p)) in report
                .mean_curve
                .iter()
                .zip(&report.power_curve_db)
                .enumerate()
            {
                w.write_record(&[i.to_string(), c_s.to_string(), p.to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes every artifact and returns their paths, `report.json` last.
pub fn write_all(
    cfg: &SystemConfig,
    output: &ExperimentOutput,
    out_dir: &Path,
    elapsed: Duration,
) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();

    let trace = out_dir.join("trace.csv");
    write_trace_csv(&trace, &output.trials)?;
    paths.push(trace);

    if cfg.experiment == ExperimentKind::FixedPower {
        let bench = out_dir.join("trace_benchmark.csv");
        write_benchmark_trace_csv(&bench, &output.trials)?;
        paths.push(bench);
    }

    let aggregate = out_dir.join("aggregate.csv");
    write_aggregate_csv(&aggregate, &output.report)?;
    paths.push(aggregate);

    let report_path = out_dir.join("report.json");
    paths.push(report_path.clone());

    let run = RunReport {
        report: output.report.clone(),
        manifest: RunManifest {
            config_text: cfg.to_config_string(),
            config: cfg.clone(),
            master_seed: cfg.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_seconds: elapsed.as_secs_f64(),
            outputs: paths.iter().map(|p| p.display().to_string()).collect(),
        },
    };
    let json = serde_json::to_string_pretty(&run)?;
    std::fs::write(&report_path, json).with_context(|| format!("writing {}", report_path.display()))?;
    Ok(paths)
}
