use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use uavcre::experiments::{coverage_sweep, rate_vs_density, se_vs_antennas, ExperimentConfig};
use uavcre::simulator::GainMode;
use uavcre::validation::{full_report, Report, SampleSizes};
use uavcre::Error;

#[derive(Parser)]
#[command(name = "uavcre", version, about = "Two-tier UAV network coverage, SE and rate experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coverage probability against the SINR threshold.
    CoverageSweep(Common),
    /// Per-user rate against the mmWave/low-band density ratio.
    RateVsDensity(Common),
    /// Spectral efficiency against the mmWave array size.
    SeVsAntennas(Common),
    /// Run the oracle checks and print a JSON report.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment file; the bundled default profile when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Output file; stdout when absent and the config names none.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    gain_mode: Option<GainModeArg>,
    /// `cre`, `map` or `beta=<float>`.
    #[arg(long, value_parser = parse_policy)]
    policy: Option<PolicyArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GainModeArg {
    Geometric,
    Approximate,
}

#[derive(Clone, Copy)]
enum PolicyArg {
    Cre,
    Map,
    Fixed(f64),
}

fn parse_policy(s: &str) -> Result<PolicyArg, String> {
    match s {
        "cre" => Ok(PolicyArg::Cre),
        "map" => Ok(PolicyArg::Map),
        _ => {
            let v = s
                .strip_prefix("beta=")
                .ok_or_else(|| format!("expected cre, map or beta=<float>, got `{s}`"))?;
            let b: f64 = v.parse().map_err(|e| format!("bad bias `{v}`: {e}"))?;
            if b.is_finite() && b > 0.0 {
                Ok(PolicyArg::Fixed(b))
            } else {
                Err(format!("bias must be positive, got {b}"))
            }
        }
    }
}

#[derive(Serialize)]
struct ValidateOutput<'a> {
    passed: bool,
    samples: SampleSizes,
    checks: &'a [uavcre::validation::Check],
}

impl Common {
    fn load(&self) -> uavcre::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.simulation.seed = s;
        }
        if let Some(t) = self.trials {
            cfg.simulation.trials = t;
        }
        if let Some(g) = self.gain_mode {
            cfg.simulation.gain_mode = match g {
                GainModeArg::Geometric => GainMode::Geometric,
                GainModeArg::Approximate => GainMode::Approximate,
            };
        }
        match self.policy {
            Some(PolicyArg::Cre) | None => {}
            Some(PolicyArg::Map) => cfg.cre.fixed_bias = Some(1.0),
            Some(PolicyArg::Fixed(b)) => cfg.cre.fixed_bias = Some(b),
        }
        if let Some(p) = &self.out {
            cfg.output.path = Some(p.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(cfg: &ExperimentConfig, text: &str) -> uavcre::Result<()> {
    match &cfg.output.path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> uavcre::Result<bool> {
    match cli.command {
        Command::CoverageSweep(c) => {
            let cfg = c.load()?;
            emit(&cfg, &coverage_sweep(&cfg)?.to_csv())?;
        }
        Command::RateVsDensity(c) => {
            let cfg = c.load()?;
            emit(&cfg, &rate_vs_density(&cfg)?.1.to_csv())?;
        }
        Command::SeVsAntennas(c) => {
            let cfg = c.load()?;
            emit(&cfg, &se_vs_antennas(&cfg)?.1.to_csv())?;
        }
        Command::Validate(c) => {
            let cfg = c.load()?;
            let report: Report = full_report(&cfg)?;
            let out = ValidateOutput {
                passed: report.passed(),
                samples: SampleSizes::from_trials(cfg.simulation.trials),
                checks: &report.checks,
            };
            let mut text = serde_json::to_string_pretty(&out)
                .map_err(|e| Error::Numeric(format!("report serialization: {e}")))?;
            text.push('\n');
            emit(&cfg, &text)?;
            return Ok(report.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Parameter { .. } => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}
