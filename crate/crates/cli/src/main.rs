//! `ingham-rates`: runs one experiment and writes its report files.
//!
//! Exit status is 0 when every invariant holds, 1 when one fails or a
//! quadrature did not converge, and 2 on configuration or runtime errors (in
//! which case no file is written).

mod config;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use toml::{Table, Value};

use config::{env_tolerances, parse_assignment, resolve, set_dotted, Experiment, RunConfig, TOL_ENV};

#[derive(Parser)]
#[command(name = "ingham-rates", version, about = "Decay-rate experiments for diagonal semigroup models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Bound values over a time grid.
    Bound,
    /// Numeric against closed-form kernel transforms.
    Kernel,
    /// Time-side against frequency-side smoothed orbits.
    Parseval,
    /// Mollifier error against the kernel scale.
    Mollifier,
    /// t times the mollifier error for admissible kernels.
    Regularity,
    /// Measured orbit norms against the decay bound.
    Decay,
    /// Raw two-term minimisation against the closed-form bound.
    Oracle,
}

impl Command {
    fn experiment(self) -> Experiment {
        match self {
            Command::Bound => Experiment::BoundTable,
            Command::Kernel => Experiment::KernelCheck,
            Command::Parseval => Experiment::Parseval,
            Command::Mollifier => Experiment::MollifierRate,
            Command::Regularity => Experiment::AsymptoticRegularity,
            Command::Decay => Experiment::CompareDecay,
            Command::Oracle => Experiment::RawBoundOracle,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Both,
}

/// Flags override the config file, which overrides `INGHAM_RATES_TOL`, which
/// overrides the built-in defaults.
#[derive(Args)]
struct Common {
    /// TOML config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output base path; `.csv` and `.json` are appended.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Reserved; all computations are deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Any config key, as `section.key=value` (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, global = true)]
    variant: Option<String>,
    #[arg(long, global = true)]
    c: Option<f64>,
    #[arg(long, global = true)]
    kernel: Option<String>,
    /// Growth source as `family[:alpha]`, e.g. `power:1`.
    #[arg(long, global = true)]
    growth: Option<String>,
    /// Decay source as `family[:alpha]`.
    #[arg(long, global = true)]
    decay: Option<String>,
    /// Scenario family.
    #[arg(long, global = true)]
    family: Option<String>,
    /// Scenario mode count.
    #[arg(long, global = true)]
    n: Option<u64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    re: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    im: Option<f64>,
    #[arg(long = "t-min", global = true)]
    t_min: Option<f64>,
    #[arg(long = "t-max", global = true)]
    t_max: Option<f64>,
    /// Grid points (mollifier: time points per radius).
    #[arg(long = "t-points", global = true)]
    t_points: Option<u64>,
}

impl Common {
    fn overrides(&self, experiment: Experiment) -> Result<Vec<(String, Value)>> {
        let mut out: Vec<(String, Value)> = Vec::new();
        let mut put = |k: &str, v: Value| out.push((k.to_string(), v));
        if let Some(p) = &self.out {
            put("output.path", Value::String(p.to_string_lossy().into_owned()));
        }
        if let Some(f) = self.format {
            let name = match f {
                FormatArg::Csv => "csv",
                FormatArg::Json => "json",
                FormatArg::Both => "both",
            };
            put("output.format", Value::String(name.into()));
        }
        if let Some(s) = self.seed {
            put("seed", Value::Integer(s as i64));
        }
        if let Some(v) = &self.variant {
            put("bound.variant", Value::String(v.clone()));
        }
        if let Some(c) = self.c {
            put("bound.c", Value::Float(c));
        }
        if let Some(k) = &self.kernel {
            put("kernel.name", Value::String(k.clone()));
        }
        for (section, raw) in [("growth", &self.growth), ("decay", &self.decay)] {
            if let Some(raw) = raw {
                let (family, alpha) = match raw.split_once(':') {
                    Some((f, a)) => (f, Some(a.parse::<f64>().with_context(|| format!("--{section} {raw}"))?)),
                    None => (raw.as_str(), None),
                };
                put(&format!("{section}.family"), Value::String(family.into()));
                if let Some(a) = alpha {
                    let key = if family == "constant" { "value" } else { "alpha" };
                    put(&format!("{section}.{key}"), Value::Float(a));
                }
            }
        }
        if let Some(f) = &self.family {
            put("scenario.family", Value::String(f.clone()));
        }
        if let Some(n) = self.n {
            put("scenario.n", Value::Integer(n as i64));
        }
        if let Some(v) = self.re {
            put("scenario.re", Value::Float(v));
        }
        if let Some(v) = self.im {
            put("scenario.im", Value::Float(v));
        }
        if let Some(v) = self.t_min {
            put("grid.min", Value::Float(v));
        }
        if let Some(v) = self.t_max {
            let key = if experiment == Experiment::MollifierRate { "mollifier.t_max" } else { "grid.max" };
            put(key, Value::Float(v));
        }
        if let Some(v) = self.t_points {
            let key = if experiment == Experiment::MollifierRate { "mollifier.t_points" } else { "grid.points" };
            put(key, Value::Integer(v as i64));
        }
        for raw in &self.set {
            out.push(parse_assignment(raw).map_err(|e| anyhow!(e))?);
        }
        Ok(out)
    }
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let experiment = cli.command.experiment();
    let mut table = match &cli.common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            toml::from_str::<Table>(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => Table::new(),
    };
    for (key, value) in cli.common.overrides(experiment)? {
        set_dotted(&mut table, &key, value).map_err(|e| anyhow!(e))?;
    }
    let env_tol = match std::env::var(TOL_ENV) {
        Ok(raw) => Some(env_tolerances(&raw).map_err(|e| anyhow!(e))?),
        Err(_) => None,
    };
    Ok(resolve(table, Some(experiment), env_tol)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = output::check_writable(&config.output.path) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    let report = match run::run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    match output::write(&config, &report) {
        Ok(paths) => {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    }
    for check in &report.checks {
        println!("{} {}: {}", if check.passed { "PASS" } else { "FAIL" }, check.name, check.detail);
    }
    if !report.converged {
        let flagged = report.rows.iter().filter(|r| !r.converged).count();
        println!("FAIL converged: {flagged} of {} rows missed the quadrature tolerance", report.rows.len());
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
