use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use deltashock::nt_scheme::{Grid, SimConfig};
use deltashock::{Eps, State};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "deltashock",
    version,
    about = "Riemann solutions, epsilon sweeps and simulations for the deposition model"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact solution at one eps, or of the limit system when --eps is absent.
    Solve(Options),
    /// Threshold eps0 and the closed-form eps -> 0 targets.
    LimitTargets(Options),
    /// Intermediate states and speeds over a list of eps values.
    Sweep(Options),
    /// Run the central scheme from Riemann data.
    Simulate(Options),
    /// Simulation against the exact solution: L1 errors and delta weight.
    Compare(Options),
    /// Concentration sequence over several eps, with threshold and sweep.
    Report(Options),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

fn pair(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => Ok((a.parse().map_err(|e| format!("{a}: {e}"))?, b.parse().map_err(|e| format!("{b}: {e}"))?)),
        _ => Err(format!("expected two comma-separated numbers, got '{s}'")),
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// Left state u,v
    #[arg(long, value_parser = pair, allow_hyphen_values = true)]
    pub left: Option<(f64, f64)>,
    /// Right state u,v
    #[arg(long, value_parser = pair, allow_hyphen_values = true)]
    pub right: Option<(f64, f64)>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Comma-separated eps values
    #[arg(long, allow_hyphen_values = true)]
    pub eps_list: Option<String>,
    #[arg(long)]
    pub cells: Option<usize>,
    #[arg(long)]
    pub cfl: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Comparison time (same as --t-end)
    #[arg(long)]
    pub t: Option<f64>,
    /// Domain a,b
    #[arg(long, value_parser = pair, allow_hyphen_values = true)]
    pub domain: Option<(f64, f64)>,
    /// Limiter parameter in [1, 2]
    #[arg(long)]
    pub theta: Option<f64>,
    /// Similarity-variable range a,b for sampled profiles
    #[arg(long, value_parser = pair, allow_hyphen_values = true)]
    pub xi: Option<(f64, f64)>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Directory for output files
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with any of the options above; flags win
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Config file contents. Field names follow the flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
struct FileOptions {
    left: Option<(f64, f64)>,
    right: Option<(f64, f64)>,
    eps: Option<f64>,
    eps_list: Option<Vec<f64>>,
    cells: Option<usize>,
    cfl: Option<f64>,
    t_end: Option<f64>,
    t: Option<f64>,
    domain: Option<(f64, f64)>,
    theta: Option<f64>,
    xi: Option<(f64, f64)>,
    samples: Option<usize>,
    out: Option<PathBuf>,
    format: Option<Format>,
}

/// Options after merging the config file, with defaults applied and states validated.
#[derive(Debug, Clone)]
pub struct Settings {
    pub left: State,
    pub right: State,
    pub eps: Option<Eps>,
    /// `None` when no list was given; validated non-empty otherwise.
    pub eps_list: Option<Vec<Eps>>,
    pub cells: usize,
    pub cfl: f64,
    pub t_end: f64,
    pub domain: (f64, f64),
    pub theta: f64,
    pub xi: Option<(f64, f64)>,
    pub samples: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn parse_eps_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<f64>().map_err(|e| CliError::Validation(format!("eps list entry '{p}': {e}"))))
        .collect()
}

fn state((u, v): (f64, f64)) -> Result<State, CliError> {
    Ok(State::new(u, v)?)
}

impl Settings {
    pub fn resolve(opts: &Options) -> Result<Settings, CliError> {
        let file = match &opts.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str::<FileOptions>(&text)
                    .map_err(|e| CliError::Validation(format!("bad config {}: {e}", path.display())))?
            }
            None => FileOptions::default(),
        };

        let eps_list = match &opts.eps_list {
            Some(s) => Some(parse_eps_list(s)?),
            None => file.eps_list,
        };
        let eps_list = match eps_list {
            Some(list) if list.is_empty() => return Err(CliError::Validation("eps list is empty".into())),
            Some(list) => Some(list.into_iter().map(Eps::new).collect::<Result<Vec<_>, _>>()?),
            None => None,
        };

        Ok(Settings {
            left: state(opts.left.or(file.left).unwrap_or((1.0, 1.0)))?,
            right: state(opts.right.or(file.right).unwrap_or((-1.0, 1.5)))?,
            eps: opts.eps.or(file.eps).map(Eps::new).transpose()?,
            eps_list,
            cells: opts.cells.or(file.cells).unwrap_or(500),
            cfl: opts.cfl.or(file.cfl).unwrap_or(0.475),
            t_end: opts.t.or(opts.t_end).or(file.t).or(file.t_end).unwrap_or(0.4),
            domain: opts.domain.or(file.domain).unwrap_or((-2.0, 2.0)),
            theta: opts.theta.or(file.theta).unwrap_or(1.0),
            xi: opts.xi.or(file.xi),
            samples: opts.samples.or(file.samples).unwrap_or(401),
            out: opts.out.clone().or(file.out),
            format: opts.format.or(file.format).unwrap_or(Format::Json),
        })
    }

    pub fn require_eps(&self) -> Result<Eps, CliError> {
        self.eps.ok_or_else(|| CliError::Validation("--eps is required for this command".into()))
    }

    pub fn sim_config(&self, eps: Eps) -> Result<SimConfig, CliError> {
        let config = SimConfig {
            grid: Grid::new(self.domain.0, self.domain.1, self.cells)?,
            cfl: self.cfl,
            t_end: self.t_end,
            limiter_theta: self.theta,
            ..SimConfig::with_defaults(eps)
        };
        config.validate()?;
        Ok(config)
    }
}
