//! Experiment configuration: a JSON file, command-line flags, or both (flags win).

use std::path::PathBuf;

use clap::Parser;
use serde::{Deserialize, Serialize};
use torus_cpi::KernelKind;

use crate::UsageError;

pub const COMMANDS: [&str; 10] = [
    "coeffs",
    "norm",
    "convolve",
    "kernel-sweep",
    "dirichlet-bound",
    "divergence",
    "parseval",
    "fejer-lemma",
    "bv-test",
    "fubini-check",
];

/// Environment variable that replaces the default norm grid.
pub const GRID_ENV: &str = "TORUS_CPI_GRID";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Option<String>,
    /// Catalog names, comma separated; `catalog`, `lebesgue` and ranges like
    /// `exp:1..8` expand.
    pub distribution: Option<String>,
    /// Multiplier names, comma separated.
    pub multiplier: Option<String>,
    pub kernel: Option<KernelKind>,
    pub n: Option<usize>,
    pub ns: Option<Vec<usize>>,
    pub n_max: Option<usize>,
    /// Coefficient window `N`.
    pub window: Option<usize>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub intervals: Option<Vec<[f64; 2]>>,
    pub deltas: Option<Vec<f64>>,
    pub points: Option<usize>,
    pub growth: Option<bool>,
    pub demo: Option<bool>,
    pub l1: Option<bool>,
    /// `[re, im]` for `k = −N..=N`.
    pub coefficients: Option<Vec<[f64; 2]>>,
    pub bound: Option<f64>,
    pub output: Option<PathBuf>,
}

fn parse_interval(s: &str) -> Result<[f64; 2], String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected a:b, got `{s}`"))?;
    let a: f64 = a.trim().parse().map_err(|e| format!("`{a}`: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("`{b}`: {e}"))?;
    Ok([a, b])
}

#[derive(Debug, Parser)]
#[command(name = "torus-cpi", version, about = "Fourier analysis of continuous-primitive distributions on the circle")]
pub struct Cli {
    /// One of: coeffs, norm, convolve, kernel-sweep, dirichlet-bound,
    /// divergence, parseval, fejer-lemma, bv-test, fubini-check
    pub command: Option<String>,
    /// JSON experiment config; flags override its fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Distributions: catalog names, `catalog`, `lebesgue`, or ranges like exp:1..32
    #[arg(long = "f")]
    pub distribution: Option<String>,
    /// Multipliers: square, saw, bump, cos:k, sin:k, one, const:c, indicator:a:b,
    /// testset, rsqrt, @file.json, or sums like one+cos:1
    #[arg(long = "g", allow_hyphen_values = true)]
    pub multiplier: Option<String>,
    /// fejer, dirichlet or vallee_poussin
    #[arg(long)]
    pub kernel: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    /// List of indices, comma separated
    #[arg(long, value_delimiter = ',')]
    pub ns: Option<Vec<usize>>,
    #[arg(long = "n-max")]
    pub n_max: Option<usize>,
    /// Coefficient window
    #[arg(long = "N")]
    pub window: Option<usize>,
    /// Starting grid of the norm evaluation (intervals per period)
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Integration interval a:b, repeatable
    #[arg(long = "interval", value_parser = parse_interval, allow_hyphen_values = true)]
    pub intervals: Vec<[f64; 2]>,
    /// Tail cut-offs δ, comma separated
    #[arg(long, value_delimiter = ',')]
    pub deltas: Option<Vec<f64>>,
    /// Number of sample points for convolution dumps
    #[arg(long)]
    pub points: Option<usize>,
    /// Add the growth bounds to the coefficient table
    #[arg(long)]
    pub growth: bool,
    /// Run the bilinear unboundedness demonstration
    #[arg(long)]
    pub demo: bool,
    /// Treat the multiplier as an integrable function (dyadic limit)
    #[arg(long)]
    pub l1: bool,
    /// Bound for bv-test with explicit coefficients
    #[arg(long)]
    pub bound: Option<f64>,
    /// Output CSV path; standard output when absent
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<ExperimentConfig, UsageError> {
        serde_json::from_str(text).map_err(|e| UsageError(format!("invalid config: {e}")))
    }

    /// Fields set in `over` replace those in `self`.
    pub fn merged(self, over: ExperimentConfig) -> ExperimentConfig {
        macro_rules! pick {
            ($($f:ident),*) => {
                ExperimentConfig { $($f: over.$f.or(self.$f)),* }
            };
        }
        pick!(
            command, distribution, multiplier, kernel, n, ns, n_max, window, grid, tol, intervals, deltas, points,
            growth, demo, l1, coefficients, bound, output
        )
    }

    /// Builds the config from parsed flags, reading `--config` first.
    pub fn from_cli(cli: Cli) -> Result<ExperimentConfig, UsageError> {
        let base = match &cli.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
                ExperimentConfig::from_json(&text)?
            }
            None => ExperimentConfig::default(),
        };
        let kernel = match cli.kernel {
            Some(k) => Some(k.parse::<KernelKind>().map_err(|e| UsageError(e.to_string()))?),
            None => None,
        };
        let over = ExperimentConfig {
            command: cli.command,
            distribution: cli.distribution,
            multiplier: cli.multiplier,
            kernel,
            n: cli.n,
            ns: cli.ns,
            n_max: cli.n_max,
            window: cli.window,
            grid: cli.grid,
            tol: cli.tol,
            intervals: (!cli.intervals.is_empty()).then_some(cli.intervals),
            deltas: cli.deltas,
            points: cli.points,
            growth: cli.growth.then_some(true),
            demo: cli.demo.then_some(true),
            l1: cli.l1.then_some(true),
            coefficients: None,
            bound: cli.bound,
            output: cli.output,
        };
        Ok(base.merged(over))
    }

    /// Checks the command name and the ranges of numeric fields.
    pub fn validate(&self) -> Result<&str, UsageError> {
        let command = self
            .command
            .as_deref()
            .ok_or_else(|| UsageError(format!("no command given; expected one of {}", COMMANDS.join(", "))))?;
        if !COMMANDS.contains(&command) {
            return Err(UsageError(format!(
                "unknown command `{command}`; expected one of {}",
                COMMANDS.join(", ")
            )));
        }
        let positive = [
            ("n_max", self.n_max),
            ("window", self.window),
            ("grid", self.grid),
            ("points", self.points),
        ];
        for (name, v) in positive {
            if v == Some(0) {
                return Err(UsageError(format!("{name} must be positive")));
            }
        }
        if let Some(ns) = &self.ns {
            if ns.is_empty() || ns.contains(&0) {
                return Err(UsageError("ns must be a nonempty list of positive integers".into()));
            }
        }
        for (name, v) in [("tol", self.tol), ("bound", self.bound)] {
            if let Some(x) = v {
                if !(x.is_finite() && x > 0.0) {
                    return Err(UsageError(format!("{name} must be positive and finite, got {x}")));
                }
            }
        }
        if let Some(g) = self.grid {
            if g > 1 << 24 {
                return Err(UsageError(format!("grid {g} exceeds 2^24")));
            }
        }
        if let Some(ds) = &self.deltas {
            if let Some(d) = ds.iter().find(|d| !(**d > 0.0 && **d <= std::f64::consts::PI)) {
                return Err(UsageError(format!("δ must lie in (0, π], got {d}")));
            }
        }
        if let Some(iv) = &self.intervals {
            if let Some([a, b]) = iv.iter().find(|[a, b]| !(a.is_finite() && b.is_finite() && a < b)) {
                return Err(UsageError(format!("interval {a}:{b} must satisfy a < b")));
            }
        }
        if let Some(c) = &self.coefficients {
            if c.len() % 2 == 0 {
                return Err(UsageError("coefficients must have odd length 2N+1".into()));
            }
            if c.iter().flatten().any(|x| !x.is_finite()) {
                return Err(UsageError("coefficients must be finite".into()));
            }
        }
        Ok(command)
    }

    /// Starting norm grid: the config, then the environment, then `None`.
    pub fn effective_grid(&self) -> Result<Option<usize>, UsageError> {
        if let Some(g) = self.grid {
            return Ok(Some(g));
        }
        match std::env::var(GRID_ENV) {
            Ok(v) => {
                let g: usize = v
                    .trim()
                    .parse()
                    .map_err(|_| UsageError(format!("{GRID_ENV} must be a positive integer, got `{v}`")))?;
                if g == 0 || g > 1 << 24 {
                    return Err(UsageError(format!("{GRID_ENV} out of range: {g}")));
                }
                Ok(Some(g))
            }
            Err(_) => Ok(None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_the_file() {
        let file = ExperimentConfig::from_json(r#"{"command": "norm", "distribution": "exp:4", "tol": 1e-3}"#).unwrap();
        let flags = ExperimentConfig {
            distribution: Some("exp:2".into()),
            ..Default::default()
        };
        let m = file.merged(flags);
        assert_eq!(m.command.as_deref(), Some("norm"));
        assert_eq!(m.distribution.as_deref(), Some("exp:2"));
        assert_eq!(m.tol, Some(1e-3));
    }

    #[test]
    fn unknown_fields_and_commands_are_usage_errors() {
        assert!(ExperimentConfig::from_json(r#"{"comand": "norm"}"#).is_err());
        let c = ExperimentConfig::from_json(r#"{"command": "plot"}"#).unwrap();
        assert!(c.validate().is_err());
        let c = ExperimentConfig::from_json(r#"{"command": "norm", "tol": -1}"#).unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn parses_flags() {
        let cli = Cli::try_parse_from(["torus-cpi", "fubini-check", "--interval", "-1:1", "--interval", "0:2", "--N", "4"])
            .unwrap();
        let c = ExperimentConfig::from_cli(cli).unwrap();
        assert_eq!(c.intervals, Some(vec![[-1.0, 1.0], [0.0, 2.0]]));
        assert_eq!(c.window, Some(4));
        assert_eq!(c.validate().unwrap(), "fubini-check");
    }
}
