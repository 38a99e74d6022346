//! Flat `key = value` run configuration.
//!
//! Blank lines and `#` comments are ignored. Unknown or repeated keys are
//! errors. Unset keys take the preset of the chosen `band`; powers are read in
//! dB with unit noise variances unless overridden.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{CarrierBand, ChannelParams};
use crate::metrics::PowerConfig;
use crate::optimizer::OptimizerConfig;
use crate::{db_to_linear, linear_to_db, Error, Result};

/// Every key accepted in a config file or as an override, in output order.
pub const KEYS: &[&str] = &[
    "experiment",
    "band",
    "n_tx",
    "n_rx",
    "n_clusters",
    "n_rays",
    "angular_spread_deg",
    "p_s_db",
    "p_j_db",
    "sigma2_l",
    "sigma2_e",
    "delta0",
    "epsilon",
    "kappa",
    "zeta",
    "mu_db",
    "max_iters",
    "max_cycles",
    "delta_min",
    "n_trials",
    "seed",
    "svd_bound_literal",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExperimentKind {
    FixedPower,
    VariablePower,
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fixed_power" => Ok(ExperimentKind::FixedPower),
            "variable_power" => Ok(ExperimentKind::VariablePower),
            other => Err(format!(
                "expected `fixed_power` or `variable_power`, got `{other}`"
            )),
        }
    }
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ExperimentKind::FixedPower => "fixed_power",
            ExperimentKind::VariablePower => "variable_power",
        })
    }
}

impl FromStr for CarrierBand {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sub6" => Ok(CarrierBand::Sub6),
            "mmwave" => Ok(CarrierBand::MmWave),
            other => Err(format!("expected `sub6` or `mmwave`, got `{other}`")),
        }
    }
}

/// Everything needed to run one Monte Carlo experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub experiment: ExperimentKind,
    pub channel: ChannelParams,
    pub powers: PowerConfig,
    pub optimizer: OptimizerConfig,
    pub n_trials: usize,
    pub seed: u64,
    /// Evaluate the singular-value bound without the jammer power in its
    /// first denominator.
    pub svd_bound_literal: bool,
}

impl SystemConfig {
    /// Table values for a band with 1000 trials and the jammer at 10 dB.
    pub fn preset(band: CarrierBand, experiment: ExperimentKind) -> Self {
        let channel = match band {
            CarrierBand::Sub6 => ChannelParams::sub6(),
            CarrierBand::MmWave => ChannelParams::mmwave(),
        };
        let zeta = match experiment {
            ExperimentKind::FixedPower => None,
            ExperimentKind::VariablePower => Some(4.0),
        };
        SystemConfig {
            experiment,
            channel,
            powers: PowerConfig::from_db(10.0, 10.0),
            optimizer: OptimizerConfig {
                zeta,
                ..OptimizerConfig::default()
            },
            n_trials: 1000,
            seed: 1,
            svd_bound_literal: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        self.powers.validate()?;
        self.optimizer.validate()?;
        if self.n_trials == 0 {
            return Err(Error::invalid("n_trials", "must be at least 1"));
        }
        if self.experiment == ExperimentKind::VariablePower && self.optimizer.zeta.is_none() {
            return Err(Error::invalid(
                "zeta",
                "required when experiment = variable_power",
            ));
        }
        Ok(())
    }

    /// Parses a config file body and validates the result.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_overrides(text, &[])
    }

    /// Parses a config file body, then applies `(key, value)` overrides in
    /// order before validating.
    pub fn parse_with_overrides(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut entries = parse_entries(text)?;
        for (key, value) in overrides {
            check_key(key).map_err(|reason| Error::invalid(key, reason))?;
            entries.insert(key.clone(), value.trim().to_string());
        }
        let cfg = build(&entries)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Resolved config in the same `key = value` form, one key per line.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let opt = &self.optimizer;
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        line("experiment", self.experiment.to_string());
        line("band", self.channel.band.to_string());
        line("n_tx", self.channel.n_tx.to_string());
        line("n_rx", self.channel.n_rx.to_string());
        line("n_clusters", self.channel.n_clusters.to_string());
        line("n_rays", self.channel.n_rays.to_string());
        line("angular_spread_deg", self.channel.angular_spread_deg.to_string());
        line("p_s_db", linear_to_db(self.powers.p_s).to_string());
        line("p_j_db", linear_to_db(self.powers.p_j).to_string());
        line("sigma2_l", self.powers.sigma2_l.to_string());
        line("sigma2_e", self.powers.sigma2_e.to_string());
        line("delta0", opt.delta0.to_string());
        line("epsilon", opt.epsilon.to_string());
        line("kappa", opt.kappa.to_string());
        if let Some(z) = opt.zeta {
            line("zeta", z.to_string());
        }
        line("mu_db", linear_to_db(opt.mu).to_string());
        line("max_iters", opt.max_iters.to_string());
        line("max_cycles", opt.max_cycles.to_string());
        line("delta_min", opt.delta_min.to_string());
        line("n_trials", self.n_trials.to_string());
        line("seed", self.seed.to_string());
        line("svd_bound_literal", self.svd_bound_literal.to_string());
        out
    }
}

fn check_key(key: &str) -> std::result::Result<(), String> {
    if KEYS.contains(&key) {
        Ok(())
    } else {
        Err(format!("unknown key; expected one of {}", KEYS.join(", ")))
    }
}

fn parse_entries(text: &str) -> Result<BTreeMap<String, String>> {
    let mut entries = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: line_no,
            reason: format!("expected `key = value`, got `{line}`"),
        })?;
        let key = key.trim();
        let value = value.trim();
        check_key(key).map_err(|reason| Error::Parse {
            line: line_no,
            reason: format!("`{key}`: {reason}"),
        })?;
        if value.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                reason: format!("`{key}` has no value"),
            });
        }
        if entries.insert(key.to_string(), value.to_string()).is_some() {
            return Err(Error::Parse {
                line: line_no,
                reason: format!("`{key}` given twice"),
            });
        }
    }
    Ok(entries)
}

fn value<T>(entries: &BTreeMap<String, String>, key: &str) -> Result<Option<T>>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    entries
        .get(key)
        .map(|raw| {
            raw.parse::<T>()
                .map_err(|e| Error::invalid(key, format!("cannot parse `{raw}`: {e}")))
        })
        .transpose()
}

fn build(entries: &BTreeMap<String, String>) -> Result<SystemConfig> {
    let experiment = value(entries, "experiment")?.unwrap_or(ExperimentKind::FixedPower);
    let band = value(entries, "band")?.unwrap_or(CarrierBand::Sub6);
    let mut cfg = SystemConfig::preset(band, experiment);

    let ch = &mut cfg.channel;
    if let Some(v) = value(entries, "n_tx")? {
        ch.n_tx = v;
    }
    if let Some(v) = value(entries, "n_rx")? {
        ch.n_rx = v;
    }
    if let Some(v) = value(entries, "n_clusters")? {
        ch.n_clusters = v;
    }
    if let Some(v) = value(entries, "n_rays")? {
        ch.n_rays = v;
    }
    if let Some(v) = value(entries, "angular_spread_deg")? {
        ch.angular_spread_deg = v;
    }

    let finite_db = |key: &str| -> Result<Option<f64>> {
        let v: Option<f64> = value(entries, key)?;
        match v {
            Some(db) if !db.is_finite() => Err(Error::invalid(key, "must be finite")),
            other => Ok(other),
        }
    };
    if let Some(db) = finite_db("p_s_db")? {
        cfg.powers.p_s = db_to_linear(db);
    }
    if let Some(db) = finite_db("p_j_db")? {
        cfg.powers.p_j = db_to_linear(db);
    }
    if let Some(v) = value(entries, "sigma2_l")? {
        cfg.powers.sigma2_l = v;
    }
    if let Some(v) = value(entries, "sigma2_e")? {
        cfg.powers.sigma2_e = v;
    }

    let opt = &mut cfg.optimizer;
    if let Some(v) = value(entries, "delta0")? {
        opt.delta0 = v;
    }
    if let Some(v) = value(entries, "epsilon")? {
        opt.epsilon = v;
    }
    if let Some(v) = value(entries, "kappa")? {
        opt.kappa = v;
    }
    // no default target: a variable-power file must name one
    opt.zeta = value(entries, "zeta")?;
    if let Some(db) = finite_db("mu_db")? {
        opt.mu = db_to_linear(db);
    }
    if let Some(v) = value(entries, "max_iters")? {
        opt.max_iters = v;
    }
    if let Some(v) = value(entries, "max_cycles")? {
        opt.max_cycles = v;
    }
    if let Some(v) = value(entries, "delta_min")? {
        opt.delta_min = v;
    }

    if let Some(v) = value(entries, "n_trials")? {
        cfg.n_trials = v;
    }
    if let Some(v) = value(entries, "seed")? {
        cfg.seed = v;
    }
    if let Some(v) = value(entries, "svd_bound_literal")? {
        cfg.svd_bound_literal = v;
    }
    Ok(cfg)
}

/// Bundled Sub-6 GHz configuration.
pub const SUB6_CFG: &str = include_str!("../../../configs/sub6.cfg");
/// Bundled mmWave configuration.
pub const MMWAVE_CFG: &str = include_str!("../../../configs/mmwave.cfg");
