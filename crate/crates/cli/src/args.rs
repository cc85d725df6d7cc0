use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{coverage_rows, deployment_rows, gain_rows, render_checks, validation_rows, write_csv};
use crate::config::{parse_grid, ConfigLayer, Method, RunConfig, ScenarioSelect};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "schedgeo", version, about = "Coverage, rate and scheduling gain of normalized-SNR scheduling in Poisson cellular networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coverage probability over the theta x ratio grid.
    Coverage(SweepArgs),
    /// Average rates and scheduling gain per ratio and scenario.
    Gain(SweepArgs),
    /// One sampled deployment of BSs and users (uses the first ratio).
    Deployment(SweepArgs),
    /// Analysis-versus-simulation checks with a pass/fail table.
    Validate(SweepArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    /// TOML file with any of the settings below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// SINR thresholds in dB, e.g. "-10,0,10" or "-10:5:20".
    #[arg(long, allow_hyphen_values = true)]
    pub theta_db: Option<String>,
    /// User-to-BS density ratios, same syntax as --theta-db.
    #[arg(long)]
    pub ratios: Option<String>,
    /// 1 (every BS transmits), 2 (only BSs with users transmit) or both.
    #[arg(long)]
    pub scenario: Option<ScenarioSelect>,
    /// Comma-separated subset of general, special, approx, montecarlo.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<Method>>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Path-loss exponent.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Noise power.
    #[arg(long)]
    pub noise: Option<f64>,
    /// BS transmit power.
    #[arg(long)]
    pub power: Option<f64>,
    /// BS density.
    #[arg(long)]
    pub lambda_b: Option<f64>,
}

impl SweepArgs {
    pub fn to_layer(&self) -> CliResult<ConfigLayer> {
        let grid = |s: &Option<String>, what: &str| {
            s.as_deref()
                .map(parse_grid)
                .transpose()
                .map_err(|e| CliError::Invalid(format!("--{what}: {e}")))
        };
        Ok(ConfigLayer {
            lambda_b: self.lambda_b,
            power: self.power,
            noise: self.noise,
            alpha: self.alpha,
            theta_db: grid(&self.theta_db, "theta-db")?,
            ratios: grid(&self.ratios, "ratios")?,
            scenario: self.scenario,
            methods: self.methods.clone(),
            trials: self.trials,
            seed: self.seed,
            out: self.out.clone(),
            numerics: None,
            simulation: None,
        })
    }

    pub fn resolve(&self) -> CliResult<RunConfig> {
        let file = self.config.as_deref().map(ConfigLayer::load).transpose()?;
        RunConfig::resolve(file.as_ref(), &self.to_layer()?)
    }
}

pub fn run(command: &Command) -> CliResult<()> {
    match command {
        Command::Coverage(a) => {
            let run = a.resolve()?;
            write_csv(&coverage_rows(&run)?, run.out.as_deref())
        }
        Command::Gain(a) => {
            let run = a.resolve()?;
            write_csv(&gain_rows(&run)?, run.out.as_deref())
        }
        Command::Deployment(a) => {
            let run = a.resolve()?;
            write_csv(&deployment_rows(&run)?, run.out.as_deref())
        }
        Command::Validate(a) => {
            let run = a.resolve()?;
            let rows = validation_rows(&run)?;
            write_csv(&rows, run.out.as_deref())?;
            let table = render_checks(&rows);
            if run.out.is_some() {
                print!("{table}");
            } else {
                eprint!("{table}");
            }
            let failed = rows.iter().filter(|r| !r.pass).count();
            if failed > 0 {
                return Err(CliError::ChecksFailed {
                    failed,
                    total: rows.len(),
                });
            }
            Ok(())
        }
    }
}
