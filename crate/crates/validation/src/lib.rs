//! Runs experiment-runner invocations and exposes their tables for checking.
//!
//! Each invocation goes through the same argument parser, config merge and
//! dispatch as the `torus-cpi` binary, then through its CSV rendering, so a
//! check sees exactly what the command line would print.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use clap::Parser;
use torus_cpi_cli::table::split_rendered;
use torus_cpi_cli::{run, Cli, ExperimentConfig};

/// Values at or below this are quadrature noise around an exact zero.
pub const ZERO: f64 = 1e-9;

/// A finished invocation with its parsed table.
pub struct Run {
    pub code: i32,
    pub meta: HashMap<String, String>,
    pub body: String,
    pub rows: Vec<HashMap<String, String>>,
    pub elapsed: Duration,
    pub error: Option<String>,
}

impl Run {
    pub fn col(&self, row: usize, name: &str) -> f64 {
        let v = &self.rows[row][name];
        v.parse().unwrap_or_else(|_| panic!("column {name} = `{v}` is not a number"))
    }

    /// Index of the first row whose columns match all of `keys`.
    pub fn find(&self, keys: &[(&str, &str)]) -> usize {
        self.rows
            .iter()
            .position(|r| keys.iter().all(|(k, v)| r[*k] == *v))
            .unwrap_or_else(|| panic!("no row with {keys:?}"))
    }

    /// Distinct values of a column in order of appearance.
    pub fn labels(&self, name: &str) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r[name]) {
                out.push(r[name].clone());
            }
        }
        out
    }

    pub fn max(&self, name: &str) -> f64 {
        (0..self.rows.len()).map(|i| self.col(i, name)).fold(0.0, f64::max)
    }
}

/// Runs one invocation, given the arguments after the program name.
/// Exit codes follow the binary: 0 clean, 1 usage or computation error, 2 violations.
pub fn invoke(args: &[&str]) -> Run {
    let start = Instant::now();
    let argv = std::iter::once("torus-cpi").chain(args.iter().copied());
    let result = Cli::try_parse_from(argv)
        .map_err(|e| e.to_string())
        .and_then(|cli| ExperimentConfig::from_cli(cli).map_err(|e| e.to_string()))
        .and_then(|cfg| run(&cfg).map_err(|e| e.to_string()));
    let elapsed = start.elapsed();
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            return Run {
                code: 1,
                meta: HashMap::new(),
                body: String::new(),
                rows: Vec::new(),
                elapsed,
                error: Some(e),
            }
        }
    };
    let (meta, body) = split_rendered(&outcome.table.render());
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let header = reader.headers().expect("rendered header").clone();
    let rows = reader
        .records()
        .map(|r| {
            let r = r.expect("well-formed csv");
            header.iter().zip(r.iter()).map(|(k, v)| (k.to_string(), v.to_string())).collect()
        })
        .collect();
    Run {
        code: outcome.exit_code(),
        meta: meta.into_iter().collect(),
        body,
        rows,
        elapsed,
        error: None,
    }
}

/// Whether `now` fell below `factor·before`. Both at or below [`ZERO`] counts as
/// met: the quantity is identically zero and has nothing left to decay.
pub fn decayed(now: f64, before: f64, factor: f64) -> bool {
    now < factor * before || (now <= ZERO && before <= ZERO)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invoke_reports_usage_errors() {
        let r = invoke(&["plot"]);
        assert_eq!(r.code, 1);
        assert!(r.error.unwrap().contains("unknown command"));
    }

    #[test]
    fn invoke_parses_the_table() {
        let r = invoke(&["dirichlet-bound", "--n-max", "2"]);
        assert_eq!(r.code, 0);
        assert_eq!(r.meta["command"], "dirichlet-bound");
        assert_eq!(r.labels("n"), ["1", "2"]);
        let d1 = 4.0 * std::f64::consts::PI / 3.0 + 2.0 * 3f64.sqrt();
        assert!((r.col(r.find(&[("n", "1")]), "norm_t") - d1).abs() < 1e-6);
    }

    #[test]
    fn decay_rule() {
        assert!(decayed(0.01, 1.0, 0.1));
        assert!(!decayed(0.2, 1.0, 0.1));
        assert!(decayed(1e-12, 1e-13, 0.1));
        assert!(!decayed(1e-12, 1e-3, 1e-12));
    }
}
