//! Projected gradient ascent over constant-amplitude beamformers.
//!
//! One iteration takes a gradient step on every active beamformer from the
//! same point, then projects each result onto the unit sphere and onto the
//! constant-amplitude set. A step that lowers the secrecy rate is rejected
//! and the step size halved, so accepted trajectories are non-decreasing.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelParams, ChannelSet};
use crate::gradients::gradient_bundle;
use crate::metrics::{secrecy_capacity, BeamformerState, PowerConfig, SecrecySnapshot};
use crate::{CVector, Error, Result};

/// Entries with modulus below this are treated as zero by [`project_ca`].
pub const CA_ZERO_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Initial step size.
    pub delta0: f64,
    /// Convergence threshold on the change of the secrecy rate.
    pub epsilon: f64,
    /// Relative source-power increment per cycle.
    pub kappa: f64,
    /// Secrecy target in bps/Hz; required for the adaptive-power run.
    pub zeta: Option<f64>,
    /// Source power ceiling, linear.
    pub mu: f64,
    pub max_iters: usize,
    pub max_cycles: usize,
    pub delta_min: f64,
    /// Also ascend on the eavesdropper combiner (benchmark only).
    pub optimize_we: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            delta0: 0.1,
            epsilon: 1e-7,
            kappa: 1e-2,
            zeta: None,
            mu: 1000.0,
            max_iters: 10_000,
            max_cycles: 1_000,
            delta_min: 1e-6,
            optimize_we: false,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |field: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(field, "must be finite and positive"))
            }
        };
        positive("delta0", self.delta0)?;
        positive("epsilon", self.epsilon)?;
        positive("kappa", self.kappa)?;
        positive("mu", self.mu)?;
        positive("delta_min", self.delta_min)?;
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters", "must be at least 1"));
        }
        if self.max_cycles == 0 {
            return Err(Error::invalid("max_cycles", "must be at least 1"));
        }
        if let Some(z) = self.zeta {
            if !(z.is_finite() && z >= 0.0) {
                return Err(Error::invalid("zeta", "must be finite and non-negative"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Termination {
    Converged,
    IterCap,
    PowerCap,
    TargetReached,
    CycleCap,
}

/// One accepted iterate. Iteration 0 of each cycle is the cycle's starting
/// point; `iteration` counts attempted steps, rejected ones included, across
/// all cycles of a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub cycle: usize,
    pub iteration: usize,
    pub c_s: f64,
    pub c_l: f64,
    pub c_e: f64,
    pub delta: f64,
    pub p_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerTrace {
    pub records: Vec<TraceRecord>,
    pub termination: Termination,
}

impl OptimizerTrace {
    /// Last record of each cycle, in cycle order.
    pub fn cycle_ends(&self) -> Vec<TraceRecord> {
        let mut ends: Vec<TraceRecord> = Vec::new();
        for r in &self.records {
            match ends.last_mut() {
                Some(last) if last.cycle == r.cycle => *last = *r,
                _ => ends.push(*r),
            }
        }
        ends
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizeResult {
    pub state: BeamformerState,
    pub snapshot: SecrecySnapshot,
    /// Linear source power at exit.
    pub p_s: f64,
    /// Number of cycles run (1 for a fixed-power run).
    pub cycles: usize,
    /// Iterations attempted in the final cycle.
    pub final_cycle_iterations: usize,
    pub trace: OptimizerTrace,
}

/// `v / ||v||`.
pub fn project_unit_norm(v: &CVector) -> Result<CVector> {
    let norm = v.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::Degenerate(format!(
            "cannot normalize vector with norm {norm}"
        )));
    }
    Ok(v.unscale(norm))
}

/// Entry-wise `v_k / (sqrt(N) |v_k|)`. Entries that are numerically zero get
/// phase 0.
pub fn project_ca(v: &CVector) -> CVector {
    let amplitude = 1.0 / (v.len() as f64).sqrt();
    v.map(|z| {
        let m = z.norm();
        if m < CA_ZERO_THRESHOLD || !m.is_finite() {
            Complex64::new(amplitude, 0.0)
        } else {
            z * (amplitude / m)
        }
    })
}

fn random_ca<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    });
    project_ca(&v)
}

/// Gaussian draws projected onto the constant-amplitude set, drawn in the
/// order `w_l, w_e, f_s, f_j`.
pub fn warm_start<R: Rng + ?Sized>(params: &ChannelParams, rng: &mut R) -> BeamformerState {
    let w_l = random_ca(params.n_rx, rng);
    let w_e = random_ca(params.n_rx, rng);
    let f_s = random_ca(params.n_tx, rng);
    let f_j = random_ca(params.n_tx, rng);
    BeamformerState { w_l, w_e, f_s, f_j }
}

fn step(v: &CVector, g: &CVector, delta: f64) -> Result<CVector> {
    let moved = v + g * Complex64::new(delta, 0.0);
    Ok(project_ca(&project_unit_norm(&moved)?))
}

fn propose(
    ch: &ChannelSet,
    pw: &PowerConfig,
    state: &BeamformerState,
    delta: f64,
    optimize_we: bool,
) -> Result<BeamformerState> {
    let g = gradient_bundle(ch, state, pw, optimize_we)?;
    let w_l = step(&state.w_l, &g.g_wl, delta)?;
    let w_e = match &g.g_we {
        Some(g_we) => step(&state.w_e, g_we, delta)?,
        None => state.w_e.clone(),
    };
    let f_j = step(&state.f_j, &g.g_fj, delta)?;
    let f_s = step(&state.f_s, &g.g_fs, delta)?;
    Ok(BeamformerState { w_l, w_e, f_s, f_j })
}

fn evaluate(ch: &ChannelSet, bf: &BeamformerState, pw: &PowerConfig) -> Result<SecrecySnapshot> {
    let s = secrecy_capacity(ch, bf, pw)?;
    if !(s.c_l.is_finite() && s.c_e.is_finite()) {
        return Err(Error::NonFinite("secrecy rate".into()));
    }
    Ok(s)
}

struct CycleOutcome {
    state: BeamformerState,
    snapshot: SecrecySnapshot,
    termination: Termination,
    iterations: usize,
}

/// Callback invoked with every accepted iterate.
pub type Observer<'a> = &'a mut dyn FnMut(&TraceRecord, &BeamformerState);

/// Inner ascent at constant power. Appends accepted iterates to `records`
/// and advances `clock` by the number of attempted steps.
#[allow(clippy::too_many_arguments)]
fn run_cycle(
    ch: &ChannelSet,
    pw: &PowerConfig,
    cfg: &OptimizerConfig,
    init: BeamformerState,
    cycle: usize,
    clock: &mut usize,
    records: &mut Vec<TraceRecord>,
    observe: &mut dyn FnMut(&TraceRecord, &BeamformerState),
) -> Result<CycleOutcome> {
    let mut state = init;
    let mut current = evaluate(ch, &state, pw)?;
    let mut delta = cfg.delta0;
    let record = |s: &SecrecySnapshot, iteration: usize, delta: f64| TraceRecord {
        cycle,
        iteration,
        c_s: s.c_s,
        c_l: s.c_l,
        c_e: s.c_e,
        delta,
        p_s: pw.p_s,
    };
    records.push(record(&current, *clock, delta));
    observe(records.last().expect("just pushed"), &state);

    for n in 1..=cfg.max_iters {
        *clock += 1;
        let candidate = propose(ch, pw, &state, delta, cfg.optimize_we)?;
        let next = evaluate(ch, &candidate, pw)?;
        let change = next.raw_secrecy() - current.raw_secrecy();
        if change >= 0.0 {
            state = candidate;
            current = next;
            records.push(record(&current, *clock, delta));
            observe(records.last().expect("just pushed"), &state);
            if change <= cfg.epsilon {
                return Ok(CycleOutcome {
                    state,
                    snapshot: current,
                    termination: Termination::Converged,
                    iterations: n,
                });
            }
        } else if -change <= cfg.epsilon || delta <= cfg.delta_min {
            // rejected, and either the loss is within tolerance or the step
            // cannot shrink further
            return Ok(CycleOutcome {
                state,
                snapshot: current,
                termination: Termination::Converged,
                iterations: n,
            });
        } else {
            delta = (delta * 0.5).max(cfg.delta_min);
        }
    }
    Ok(CycleOutcome {
        state,
        snapshot: current,
        termination: Termination::IterCap,
        iterations: cfg.max_iters,
    })
}

fn check_inputs(
    ch: &ChannelSet,
    pw: &PowerConfig,
    cfg: &OptimizerConfig,
    init: &BeamformerState,
) -> Result<()> {
    cfg.validate()?;
    pw.validate()?;
    init.check_dims(ch)
}

/// Ascent at fixed source power. `w_e` is held at its initial value unless
/// `cfg.optimize_we` is set.
pub fn ascend_fixed_power(
    ch: &ChannelSet,
    pw: &PowerConfig,
    cfg: &OptimizerConfig,
    init: &BeamformerState,
) -> Result<OptimizeResult> {
    ascend_fixed_power_observed(ch, pw, cfg, init, &mut |_, _| {})
}

/// [`ascend_fixed_power`] reporting every accepted iterate to `observe`.
pub fn ascend_fixed_power_observed(
    ch: &ChannelSet,
    pw: &PowerConfig,
    cfg: &OptimizerConfig,
    init: &BeamformerState,
    observe: Observer<'_>,
) -> Result<OptimizeResult> {
    check_inputs(ch, pw, cfg, init)?;
    let mut records = Vec::new();
    let mut clock = 0;
    let out = run_cycle(ch, pw, cfg, init.clone(), 0, &mut clock, &mut records, observe)?;
    Ok(OptimizeResult {
        state: out.state,
        snapshot: out.snapshot,
        p_s: pw.p_s,
        cycles: 1,
        final_cycle_iterations: out.iterations,
        trace: OptimizerTrace {
            records,
            termination: out.termination,
        },
    })
}

/// Repeats fixed-power cycles, raising the source power by the factor
/// `1 + kappa` after every cycle that misses the target. The beamformers carry
/// over between cycles and the step size restarts at `delta0`.
pub fn ascend_variable_power(
    ch: &ChannelSet,
    pw: &PowerConfig,
    cfg: &OptimizerConfig,
    init: &BeamformerState,
) -> Result<OptimizeResult> {
    ascend_variable_power_observed(ch, pw, cfg, init, &mut |_, _| {})
}

/// [`ascend_variable_power`] reporting every accepted iterate to `observe`.
pub fn ascend_variable_power_observed(
    ch: &ChannelSet,
    pw: &PowerConfig,
    cfg: &OptimizerConfig,
    init: &BeamformerState,
    observe: Observer<'_>,
) -> Result<OptimizeResult> {
    check_inputs(ch, pw, cfg, init)?;
    let zeta = cfg
        .zeta
        .ok_or_else(|| Error::invalid("zeta", "required for the adaptive-power run"))?;

    let mut power = *pw;
    let mut records = Vec::new();
    let mut clock = 0;
    let mut state = init.clone();

    if power.p_s > cfg.mu {
        let snapshot = evaluate(ch, &state, &power)?;
        return Ok(OptimizeResult {
            state,
            snapshot,
            p_s: power.p_s,
            cycles: 0,
            final_cycle_iterations: 0,
            trace: OptimizerTrace {
                records,
                termination: Termination::PowerCap,
            },
        });
    }

    let mut cycle = 0;
    loop {
        let out = run_cycle(ch, &power, cfg, state, cycle, &mut clock, &mut records, observe)?;
        cycle += 1;
        state = out.state;
        let done = |termination| OptimizeResult {
            state: state.clone(),
            snapshot: out.snapshot,
            p_s: power.p_s,
            cycles: cycle,
            final_cycle_iterations: out.iterations,
            trace: OptimizerTrace {
                records: records.clone(),
                termination,
            },
        };
        if out.snapshot.c_s >= zeta {
            return Ok(done(Termination::TargetReached));
        }
        if cycle >= cfg.max_cycles {
            return Ok(done(Termination::CycleCap));
        }
        let next_power = power.p_s + cfg.kappa * power.p_s;
        if next_power > cfg.mu {
            return Ok(done(Termination::PowerCap));
        }
        power.p_s = next_power;
    }
}
