//! Experiment configuration: command-line flags merged over an optional
//! `key = value` file, with environment and built-in defaults underneath.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use remctl_core::reach::campaign::{default_final_times, Accounting, DEFAULT_PAIRS, DEFAULT_SEED};
use remctl_core::reach::trial::DEFAULT_EPSILON;

use crate::error::CliError;

pub const SEED_ENV: &str = "REMCTL_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Campaign,
    Reachability,
    Geometry,
    DecoherenceDemo,
    KrausDemo,
}

impl Command {
    fn writes_files(self) -> bool {
        matches!(self, Command::Campaign | Command::Geometry)
    }
}

/// Flags shared by every subcommand. Flags a command does not use are
/// ignored.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Number of random (initial, target) pairs
    #[arg(long)]
    pub pairs: Option<usize>,
    /// Comma-separated final times
    #[arg(long)]
    pub times: Option<String>,
    /// Fidelity slack: reached iff fidelity >= 1 - epsilon
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Master seed (falls back to REMCTL_SEED, then 42)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Search grid (`64`) or sphere grid `BANDSxAZIMUTHS[xSWEEP]`
    #[arg(long)]
    pub grid: Option<String>,
    /// Output file
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Net-probability averaging: all-pairs or reached-only
    #[arg(long)]
    pub accounting: Option<String>,
    /// Worker threads (0 = all cores)
    #[arg(long)]
    pub parallelism: Option<usize>,
    /// Flat `key = value` file; flags win over it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated real Schmidt coefficients
    #[arg(long)]
    pub coeffs: Option<String>,
    /// Rotation angle θ of the control unitary
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Phase φ of the control unitary
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub n_pairs: usize,
    pub final_times: Vec<f64>,
    pub epsilon: f64,
    pub master_seed: u64,
    pub grid: Vec<usize>,
    pub output_path: Option<PathBuf>,
    pub output_format: Format,
    pub accounting: Accounting,
    pub parallelism: usize,
    pub coeffs: Vec<f64>,
    pub theta: f64,
    pub phi: f64,
}

const KEYS: &[&str] = &[
    "pairs",
    "times",
    "final_times",
    "epsilon",
    "seed",
    "grid",
    "out",
    "format",
    "accounting",
    "parallelism",
    "coeffs",
    "theta",
    "phi",
];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value, got '{line}'", n + 1)))?;
        let k = k.trim().replace('-', "_");
        if !KEYS.contains(&k.as_str()) {
            return Err(CliError::Usage(format!("unknown config key '{k}'")));
        }
        let k = if k == "final_times" { "times".to_string() } else { k };
        out.insert(k, v.trim().to_string());
    }
    Ok(out)
}

fn parse_num<T: FromStr>(name: &str, tok: &str) -> Result<T, CliError> {
    tok.trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("malformed number '{}' for {name}", tok.trim())))
}

/// Comma- or whitespace-separated numbers, optionally in brackets.
pub fn parse_list<T: FromStr>(name: &str, s: &str) -> Result<Vec<T>, CliError> {
    let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
    inner
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| parse_num(name, t))
        .collect()
}

fn parse_grid(s: &str) -> Result<Vec<usize>, CliError> {
    let g: Vec<usize> = s
        .split(['x', 'X'])
        .map(|t| parse_num("--grid", t))
        .collect::<Result<_, _>>()?;
    if g.is_empty() || g.len() > 3 || g.contains(&0) {
        return Err(CliError::Usage(format!("malformed grid '{s}'")));
    }
    Ok(g)
}

fn parse_accounting(s: &str) -> Result<Accounting, CliError> {
    match s.trim() {
        "all-pairs" | "all_pairs" => Ok(Accounting::AllPairs),
        "reached-only" | "reached_only" => Ok(Accounting::ReachedOnly),
        other => Err(CliError::Usage(format!("unknown accounting '{other}'"))),
    }
}

fn parse_format(s: &str) -> Result<Format, CliError> {
    Format::from_str(s.trim(), true).map_err(|_| CliError::Usage(format!("unknown format '{}'", s.trim())))
}

fn default_grid(cmd: Command) -> Vec<usize> {
    match cmd {
        Command::Reachability => vec![32, 64, 512],
        _ => vec![64],
    }
}

fn default_coeffs(cmd: Command) -> Vec<f64> {
    match cmd {
        Command::KrausDemo => vec![std::f64::consts::FRAC_1_SQRT_2; 2],
        _ => vec![0.6, 0.8],
    }
}

/// Reads the config file named by the flags (if any) and resolves.
pub fn load(cmd: Command, flags: &Flags, env_seed: Option<String>) -> Result<ExperimentConfig, CliError> {
    let file = match &flags.config {
        Some(p) => Some(read_config(p)?),
        None => None,
    };
    resolve(cmd, flags, file.as_deref(), env_seed)
}

fn read_config(p: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("cannot read config '{}': {e}", p.display())))
}

/// Precedence: flag, then file, then (for the seed) the environment, then
/// defaults.
pub fn resolve(
    cmd: Command,
    flags: &Flags,
    file: Option<&str>,
    env_seed: Option<String>,
) -> Result<ExperimentConfig, CliError> {
    let file = match file {
        Some(t) => parse_config_file(t)?,
        None => BTreeMap::new(),
    };
    let get = |k: &str| file.get(k).map(String::as_str);

    let n_pairs = match (flags.pairs, get("pairs")) {
        (Some(n), _) => n,
        (None, Some(t)) => parse_num("pairs", t)?,
        (None, None) => DEFAULT_PAIRS,
    };
    let final_times = match flags
        .times
        .as_deref()
        .map(|t| ("--times", t))
        .or(get("times").map(|t| ("times", t)))
    {
        Some((name, t)) => parse_list(name, t)?,
        None => default_final_times(),
    };
    let epsilon = match (flags.epsilon, get("epsilon")) {
        (Some(e), _) => e,
        (None, Some(t)) => parse_num("epsilon", t)?,
        (None, None) => DEFAULT_EPSILON,
    };
    let master_seed = match (flags.seed, get("seed"), env_seed) {
        (Some(s), _, _) => s,
        (None, Some(t), _) => parse_num("seed", t)?,
        (None, None, Some(t)) => parse_num(SEED_ENV, &t)?,
        (None, None, None) => DEFAULT_SEED,
    };
    let grid = match flags.grid.as_deref().or(get("grid")) {
        Some(g) => parse_grid(g)?,
        None => default_grid(cmd),
    };
    let output_path = flags.out.clone().or(get("out").map(PathBuf::from));
    let output_format = match (flags.format, get("format")) {
        (Some(f), _) => f,
        (None, Some(t)) => parse_format(t)?,
        (None, None) => Format::Csv,
    };
    let accounting = match flags.accounting.as_deref().or(get("accounting")) {
        Some(a) => parse_accounting(a)?,
        None => Accounting::AllPairs,
    };
    let parallelism = match (flags.parallelism, get("parallelism")) {
        (Some(p), _) => p,
        (None, Some(t)) => parse_num("parallelism", t)?,
        (None, None) => 0,
    };
    let coeffs = match flags
        .coeffs
        .as_deref()
        .map(|t| ("--coeffs", t))
        .or(get("coeffs").map(|t| ("coeffs", t)))
    {
        Some((name, t)) => parse_list(name, t)?,
        None => default_coeffs(cmd),
    };
    let theta = match (flags.theta, get("theta")) {
        (Some(x), _) => x,
        (None, Some(t)) => parse_num("theta", t)?,
        (None, None) => std::f64::consts::FRAC_PI_3,
    };
    let phi = match (flags.phi, get("phi")) {
        (Some(x), _) => x,
        (None, Some(t)) => parse_num("phi", t)?,
        (None, None) => 0.0,
    };

    let cfg = ExperimentConfig {
        command: cmd,
        n_pairs,
        final_times,
        epsilon,
        master_seed,
        grid,
        output_path,
        output_format,
        accounting,
        parallelism,
        coeffs,
        theta,
        phi,
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &ExperimentConfig) -> Result<(), CliError> {
    if !(cfg.epsilon > 0.0 && cfg.epsilon < 1.0) {
        return Err(CliError::Usage("epsilon must lie in (0,1)".into()));
    }
    if cfg.n_pairs == 0 {
        return Err(CliError::Usage("pairs must be at least 1".into()));
    }
    if cfg.final_times.is_empty() {
        return Err(CliError::Usage("final times must be nonempty".into()));
    }
    if let Some(t) = cfg.final_times.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(CliError::Usage(format!("final time '{t}' must be positive")));
    }
    if cfg.command == Command::Reachability && cfg.grid.len() < 2 {
        return Err(CliError::Usage(
            "reachability grid must be BANDSxAZIMUTHS[xSWEEP]".into(),
        ));
    }
    if cfg.coeffs.len() < 2 {
        return Err(CliError::Usage("coeffs needs at least two entries".into()));
    }
    let norm: f64 = cfg.coeffs.iter().map(|c| c * c).sum();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(CliError::Usage(format!(
            "coeffs must have unit norm (squared norm {norm})"
        )));
    }
    if cfg.command.writes_files() && cfg.output_path.is_none() {
        return Err(CliError::Usage("missing output path: pass --out".into()));
    }
    Ok(())
}
