use secrecy_ascent::channel::CarrierBand;
use secrecy_ascent::config::{ExperimentKind, SystemConfig};
use secrecy_ascent::experiment::{run_experiment, run_trial};

fn small(band: CarrierBand) -> SystemConfig {
    let mut cfg = SystemConfig::preset(band, ExperimentKind::FixedPower);
    cfg.n_trials = 4;
    cfg.optimizer.max_iters = 300;
    cfg
}

#[test]
fn report_counts_benchmark_and_bound_violations() {
    let out = run_experiment(&small(CarrierBand::Sub6)).unwrap();
    assert_eq!(out.trials.len(), 4);
    let bench = out.report.benchmark_cs.expect("fixed power has a benchmark");
    let mut bench_sum = 0.0;
    let mut bench_viol = 0;
    let mut bound_viol = 0;
    for t in &out.trials {
        let b = t.benchmark.as_ref().expect("fixed power has a benchmark");
        bench_sum += b.snapshot.c_s;
        if t.primary.snapshot.c_s > b.snapshot.c_s {
            bench_viol += 1;
        }
        if t.primary.snapshot.c_s > t.svd_bound {
            bound_viol += 1;
        }
    }
    assert!((bench.mean - bench_sum / 4.0).abs() < 1e-12);
    assert_eq!(out.report.benchmark_violations, bench_viol);
    assert_eq!(out.report.bound_violations, bound_viol);
}

#[test]
fn trials_are_reproducible_from_the_master_seed() {
    let cfg = small(CarrierBand::MmWave);
    let a = run_trial(&cfg, 3).unwrap();
    let b = run_trial(&cfg, 3).unwrap();
    assert_eq!(a.primary.trace.records, b.primary.trace.records);
    let c = run_trial(&cfg, 4).unwrap();
    assert_ne!(a.primary.trace.records, c.primary.trace.records);
}

#[test]
fn variable_power_report_has_power_curve() {
    let mut cfg = SystemConfig::preset(CarrierBand::Sub6, ExperimentKind::VariablePower);
    cfg.n_trials = 3;
    cfg.optimizer.max_iters = 100;
    let out = run_experiment(&cfg).unwrap();
    assert!(out.report.cycles.is_some());
    assert!(out.report.final_p_s_db.is_some());
    assert_eq!(out.report.mean_curve.len(), out.report.power_curve_db.len());
    assert!(out.report.benchmark_cs.is_none());
}
