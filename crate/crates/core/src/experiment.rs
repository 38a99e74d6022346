//! Seeded Monte Carlo campaigns and their aggregation.
//!
//! Every trial owns an independent ChaCha stream derived from the master seed
//! and the trial index, so results do not depend on how trials are scheduled
//! across threads. Aggregation walks trials in index order.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{draw_channel_set, CarrierBand};
use crate::config::{ExperimentKind, SystemConfig};
use crate::metrics::svd_upper_bound;
use crate::optimizer::{
    ascend_fixed_power, ascend_variable_power, warm_start, OptimizeResult, OptimizerConfig,
    Termination, TraceRecord,
};
use crate::{linear_to_db, Error, Result};

/// Random source for one trial: stream `trial` of the ChaCha generator keyed
/// by `master_seed`.
pub fn seed_fanout(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub trial: u64,
    /// Run with the eavesdropper combiner held at its random draw.
    pub primary: OptimizeResult,
    /// Same channel and start with the eavesdropper combiner optimized too.
    /// Fixed-power experiments only.
    pub benchmark: Option<OptimizeResult>,
    /// Singular-value diagnostic at the initial source power.
    pub svd_bound: f64,
}

pub fn run_trial(cfg: &SystemConfig, trial: u64) -> Result<TrialOutcome> {
    let wrap = |e: Error| Error::Trial {
        trial,
        seed: cfg.seed,
        source: Box::new(e),
    };
    let mut rng = seed_fanout(cfg.seed, trial);
    let ch = draw_channel_set(&cfg.channel, &mut rng).map_err(wrap)?;
    let init = warm_start(&cfg.channel, &mut rng);
    let svd_bound = svd_upper_bound(&ch, &cfg.powers, cfg.svd_bound_literal).map_err(wrap)?;
    let plain = OptimizerConfig {
        optimize_we: false,
        ..cfg.optimizer.clone()
    };
    match cfg.experiment {
        ExperimentKind::FixedPower => {
            let primary = ascend_fixed_power(&ch, &cfg.powers, &plain, &init).map_err(wrap)?;
            let bench_cfg = OptimizerConfig {
                optimize_we: true,
                ..plain
            };
            let benchmark = ascend_fixed_power(&ch, &cfg.powers, &bench_cfg, &init).map_err(wrap)?;
            Ok(TrialOutcome {
                trial,
                primary,
                benchmark: Some(benchmark),
                svd_bound,
            })
        }
        ExperimentKind::VariablePower => {
            let primary = ascend_variable_power(&ch, &cfg.powers, &plain, &init).map_err(wrap)?;
            Ok(TrialOutcome {
                trial,
                primary,
                benchmark: None,
                svd_bound,
            })
        }
    }
}

/// Runs every trial on the current rayon pool and returns them in index
/// order. The first failing trial (by index) aborts the experiment.
pub fn run_trials(cfg: &SystemConfig) -> Result<Vec<TrialOutcome>> {
    cfg.validate()?;
    let outcomes: Vec<Result<TrialOutcome>> = (0..cfg.n_trials as u64)
        .into_par_iter()
        .map(|t| run_trial(cfg, t))
        .collect();
    outcomes.into_iter().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    /// Population statistics. Empty input gives all zeros.
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Summary {
                mean: 0.0,
                std: 0.0,
                min: 0.0,
                max: 0.0,
            };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Summary {
            mean,
            std: var.sqrt(),
            min: values.iter().cloned().fold(f64::INFINITY, f64::min),
            max: values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub experiment: ExperimentKind,
    pub band: CarrierBand,
    pub n_trials: usize,
    /// Mean secrecy rate per iteration (fixed power) or at the end of each
    /// cycle (variable power), carried forward past each trial's end.
    pub mean_curve: Vec<f64>,
    /// Mean secrecy rate per iteration with the eavesdropper combiner also
    /// optimized. Empty for variable-power runs.
    pub benchmark_curve: Vec<f64>,
    /// Mean source power in dB per cycle. Empty for fixed-power runs.
    pub power_curve_db: Vec<f64>,
    pub svd_bound: Summary,
    pub converged_cs: Summary,
    pub benchmark_cs: Option<Summary>,
    /// Attempted iterations until termination: of the single run for fixed
    /// power, summed over cycles for variable power.
    pub iterations: Summary,
    pub cycles: Option<Summary>,
    pub final_p_s_db: Option<Summary>,
    pub terminations: BTreeMap<Termination, usize>,
    /// Trials whose converged rate exceeds the singular-value bound.
    pub bound_violations: usize,
    /// Trials where the fixed-combiner run beat the optimized-combiner run.
    pub benchmark_violations: usize,
}

/// Secrecy rate per iteration index, holding the last accepted value.
pub fn iteration_curve(records: &[TraceRecord]) -> Vec<f64> {
    let Some(last) = records.last() else {
        return Vec::new();
    };
    let mut curve = Vec::with_capacity(last.iteration + 1);
    let mut current = records[0].c_s;
    let mut next = 0;
    for n in 0..=last.iteration {
        while next < records.len() && records[next].iteration <= n {
            current = records[next].c_s;
            next += 1;
        }
        curve.push(current);
    }
    curve
}

/// Extends `curve` to `len` by repeating its final value.
pub fn pad_carry_forward(curve: &[f64], len: usize) -> Vec<f64> {
    let mut out = curve.to_vec();
    if let Some(&last) = curve.last() {
        out.resize(len.max(curve.len()), last);
    }
    out
}

fn mean_curve(curves: &[Vec<f64>]) -> Vec<f64> {
    let len = curves.iter().map(Vec::len).max().unwrap_or(0);
    let mut sum = vec![0.0; len];
    for c in curves {
        for (acc, v) in sum.iter_mut().zip(pad_carry_forward(c, len)) {
            *acc += v;
        }
    }
    let n = curves.len().max(1) as f64;
    sum.into_iter().map(|s| s / n).collect()
}

pub fn aggregate(cfg: &SystemConfig, trials: &[TrialOutcome]) -> AggregateReport {
    let mut terminations = BTreeMap::new();
    for t in trials {
        *terminations.entry(t.primary.trace.termination).or_insert(0) += 1;
    }
    let converged: Vec<f64> = trials.iter().map(|t| t.primary.snapshot.c_s).collect();
    let bounds: Vec<f64> = trials.iter().map(|t| t.svd_bound).collect();
    let bound_violations = trials
        .iter()
        .filter(|t| t.primary.snapshot.c_s > t.svd_bound)
        .count();
    let iterations: Vec<f64> = trials
        .iter()
        .map(|t| {
            t.primary
                .trace
                .records
                .last()
                .map_or(0.0, |r| r.iteration as f64)
        })
        .collect();

    let mut report = AggregateReport {
        experiment: cfg.experiment,
        band: cfg.channel.band,
        n_trials: trials.len(),
        mean_curve: Vec::new(),
        benchmark_curve: Vec::new(),
        power_curve_db: Vec::new(),
        svd_bound: Summary::of(&bounds),
        converged_cs: Summary::of(&converged),
        benchmark_cs: None,
        iterations: Summary::of(&iterations),
        cycles: None,
        final_p_s_db: None,
        terminations,
        bound_violations,
        benchmark_violations: 0,
    };

    match cfg.experiment {
        ExperimentKind::FixedPower => {
            let primary: Vec<_> = trials
                .iter()
                .map(|t| iteration_curve(&t.primary.trace.records))
                .collect();
            let bench: Vec<_> = trials
                .iter()
                .filter_map(|t| t.benchmark.as_ref())
                .map(|b| iteration_curve(&b.trace.records))
                .collect();
            let len = primary
                .iter()
                .chain(bench.iter())
                .map(Vec::len)
                .max()
                .unwrap_or(0);
            report.mean_curve = pad_carry_forward(&mean_curve(&primary), len);
            report.benchmark_curve = pad_carry_forward(&mean_curve(&bench), len);
            let bench_cs: Vec<f64> = trials
                .iter()
                .filter_map(|t| t.benchmark.as_ref())
                .map(|b| b.snapshot.c_s)
                .collect();
            report.benchmark_cs = Some(Summary::of(&bench_cs));
            report.benchmark_violations = trials
                .iter()
                .filter(|t| {
                    t.benchmark
                        .as_ref()
                        .is_some_and(|b| t.primary.snapshot.c_s > b.snapshot.c_s)
                })
                .count();
        }
        ExperimentKind::VariablePower => {
            let ends: Vec<Vec<TraceRecord>> =
                trials.iter().map(|t| t.primary.trace.cycle_ends()).collect();
            let cs: Vec<Vec<f64>> = ends.iter().map(|e| e.iter().map(|r| r.c_s).collect()).collect();
            let ps: Vec<Vec<f64>> = ends
                .iter()
                .map(|e| e.iter().map(|r| linear_to_db(r.p_s)).collect())
                .collect();
            report.mean_curve = mean_curve(&cs);
            report.power_curve_db = mean_curve(&ps);
            let cycles: Vec<f64> = trials.iter().map(|t| t.primary.cycles as f64).collect();
            let final_p: Vec<f64> = trials.iter().map(|t| linear_to_db(t.primary.p_s)).collect();
            report.cycles = Some(Summary::of(&cycles));
            report.final_p_s_db = Some(Summary::of(&final_p));
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutput {
    pub trials: Vec<TrialOutcome>,
    pub report: AggregateReport,
}

/// Runs the configured experiment and aggregates it.
pub fn run_experiment(cfg: &SystemConfig) -> Result<ExperimentOutput> {
    let trials = run_trials(cfg)?;
    let report = aggregate(cfg, &trials);
    Ok(ExperimentOutput { trials, report })
}

pub fn run_fixed_power_experiment(cfg: &SystemConfig) -> Result<AggregateReport> {
    if cfg.experiment != ExperimentKind::FixedPower {
        return Err(Error::invalid("experiment", "expected fixed_power"));
    }
    run_experiment(cfg).map(|o| o.report)
}

pub fn run_variable_power_experiment(cfg: &SystemConfig) -> Result<AggregateReport> {
    if cfg.experiment != ExperimentKind::VariablePower {
        return Err(Error::invalid("experiment", "expected variable_power"));
    }
    run_experiment(cfg).map(|o| o.report)
}
