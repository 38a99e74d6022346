use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use secrecy_ascent_cli::gradcheck::{run_gradcheck, TOLERANCE};
use secrecy_ascent_cli::{cmd_run, load_config, parse_assignment, CliError};

#[derive(Parser)]
#[command(name = "secrecy-ascent", version, about = "Secrecy-rate maximization by projected gradient ascent")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured Monte Carlo experiment and write its artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Worker threads for the trials.
        #[arg(long, env = "SECRECY_ASCENT_THREADS")]
        threads: Option<usize>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Parse and validate a config, then print it with defaults filled in.
    Validate {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Compare analytic gradients with finite differences.
    Gradcheck {
        #[arg(long, default_value_t = 4)]
        n_rx: usize,
        #[arg(long, default_value_t = 16)]
        n_tx: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        instances: usize,
        /// Perturb one analytic gradient (negative control).
        #[arg(long, hide = true)]
        corrupt_gradient: bool,
    },
}

/// Per-key config overrides. Values are validated with the config file.
#[derive(Args, Default)]
struct Overrides {
    #[arg(long = "trials")]
    n_trials: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    seed: Option<String>,
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long)]
    band: Option<String>,
    #[arg(long)]
    n_tx: Option<String>,
    #[arg(long)]
    n_rx: Option<String>,
    #[arg(long)]
    n_clusters: Option<String>,
    #[arg(long)]
    n_rays: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    angular_spread_deg: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    p_s_db: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    p_j_db: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    sigma2_l: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    sigma2_e: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    delta0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    zeta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mu_db: Option<String>,
    #[arg(long)]
    max_iters: Option<String>,
    #[arg(long)]
    max_cycles: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    delta_min: Option<String>,
    #[arg(long)]
    svd_bound_literal: Option<String>,
    /// Generic `key=value` override, repeatable.
    #[arg(long = "set", value_parser = parse_assignment)]
    set: Vec<(String, String)>,
}

impl Overrides {
    fn into_pairs(self) -> Vec<(String, String)> {
        let named = [
            ("n_trials", self.n_trials),
            ("seed", self.seed),
            ("experiment", self.experiment),
            ("band", self.band),
            ("n_tx", self.n_tx),
            ("n_rx", self.n_rx),
            ("n_clusters", self.n_clusters),
            ("n_rays", self.n_rays),
            ("angular_spread_deg", self.angular_spread_deg),
            ("p_s_db", self.p_s_db),
            ("p_j_db", self.p_j_db),
            ("sigma2_l", self.sigma2_l),
            ("sigma2_e", self.sigma2_e),
            ("delta0", self.delta0),
            ("epsilon", self.epsilon),
            ("kappa", self.kappa),
            ("zeta", self.zeta),
            ("mu_db", self.mu_db),
            ("max_iters", self.max_iters),
            ("max_cycles", self.max_cycles),
            ("delta_min", self.delta_min),
            ("svd_bound_literal", self.svd_bound_literal),
        ];
        let mut pairs: Vec<(String, String)> = self.set;
        pairs.extend(
            named
                .into_iter()
                .filter_map(|(k, v)| v.map(|v| (k.to_string(), v))),
        );
        pairs
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            config,
            out,
            threads,
            overrides,
        } => {
            let cfg = load_config(&config, &overrides.into_pairs())?;
            let paths = cmd_run(&cfg, &out, threads)?;
            for p in paths {
                println!("wrote {}", p.display());
            }
            Ok(())
        }
        Command::Validate { config, overrides } => {
            let cfg = load_config(&config, &overrides.into_pairs())?;
            print!("{}", cfg.to_config_string());
            Ok(())
        }
        Command::Gradcheck {
            n_rx,
            n_tx,
            seed,
            instances,
            corrupt_gradient,
        } => {
            let report = run_gradcheck(n_rx, n_tx, seed, instances, corrupt_gradient)
                .map_err(CliError::config)?;
            println!("gradient  max_relative_error  (dims {n_rx}x{n_tx}, {instances} instances)");
            for (beam, err) in &report.max_errors {
                let mark = if *err < TOLERANCE { "ok" } else { "FAIL" };
                println!("{:<9} {err:.3e}  {mark}", beam.name());
            }
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::runtime(anyhow::anyhow!(
                    "gradient check failed (tolerance {TOLERANCE:e})"
                )))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
