//! Parsing of distribution and multiplier lists.

use std::f64::consts::PI;

use torus_cpi::bv::test_set;
use torus_cpi::catalog::{build, standard};
use torus_cpi::convolution::L1Function;
use torus_cpi::{BvFunction, CatalogEntry, CatalogName, DistributionAc};

use crate::UsageError;

/// A named distribution from the catalog.
#[derive(Debug, Clone)]
pub struct Input {
    pub label: String,
    pub dist: DistributionAc,
    pub lebesgue: bool,
}

impl Input {
    fn from_entry(e: CatalogEntry, grid: Option<usize>) -> Input {
        let dist = match grid {
            Some(g) => DistributionAc::new(e.primitive().clone().with_grid_hint(g)),
            None => e.distribution,
        };
        Input {
            label: e.name.to_string(),
            dist,
            lebesgue: e.lebesgue,
        }
    }
}

fn usage<E: std::fmt::Display>(e: E) -> UsageError {
    UsageError(e.to_string())
}

/// Expands `exp:a..b` into `exp:a, …, exp:b`.
fn expand(token: &str) -> Result<Vec<String>, UsageError> {
    if let Some((head, range)) = token.split_once(':') {
        if let Some((lo, hi)) = range.split_once("..") {
            let lo: i64 = lo.parse().map_err(|_| usage(format!("bad range start in `{token}`")))?;
            let hi: i64 = hi.parse().map_err(|_| usage(format!("bad range end in `{token}`")))?;
            if hi < lo || hi - lo > 4096 {
                return Err(usage(format!("bad range in `{token}`")));
            }
            return Ok((lo..=hi).map(|j| format!("{head}:{j}")).collect());
        }
    }
    Ok(vec![token.to_string()])
}

pub fn distributions(spec: &str, grid: Option<usize>) -> Result<Vec<Input>, UsageError> {
    let mut out = Vec::new();
    for token in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match token {
            "catalog" => out.extend(standard().into_iter().map(|e| Input::from_entry(e, grid))),
            "lebesgue" => out.extend(
                standard()
                    .into_iter()
                    .filter(|e| e.lebesgue)
                    .map(|e| Input::from_entry(e, grid)),
            ),
            _ => {
                for name in expand(token)? {
                    let parsed: CatalogName = name.parse().map_err(usage)?;
                    out.push(Input::from_entry(build(parsed), grid));
                }
            }
        }
    }
    if out.is_empty() {
        return Err(usage("no distributions given"));
    }
    Ok(out)
}

/// A named multiplier.
#[derive(Debug, Clone)]
pub struct Multiplier {
    pub label: String,
    pub g: BvFunction,
}

fn number(s: &str, what: &str) -> Result<f64, UsageError> {
    let x: f64 = s.parse().map_err(|_| usage(format!("bad number `{s}` in {what}")))?;
    if !x.is_finite() {
        return Err(usage(format!("{what} needs finite numbers")));
    }
    Ok(x)
}

fn mode(s: &str, what: &str) -> Result<u64, UsageError> {
    let k: u64 = s.parse().map_err(|_| usage(format!("bad frequency `{s}` in {what}")))?;
    if k == 0 || k > 64 {
        return Err(usage(format!("frequency in {what} must lie in 1..=64")));
    }
    Ok(k)
}

fn single(term: &str) -> Result<BvFunction, UsageError> {
    let parts: Vec<&str> = term.split(':').collect();
    let g = match parts.as_slice() {
        ["one"] => BvFunction::constant(1.0),
        ["const", c] => BvFunction::constant(number(c, term)?),
        ["cos", k] => BvFunction::cos_mode(mode(k, term)?),
        ["sin", k] => BvFunction::sin_mode(mode(k, term)?),
        ["indicator", a, b] => BvFunction::indicator(number(a, term)?, number(b, term)?).map_err(usage)?,
        [name] if name.starts_with('@') => {
            let path = &name[1..];
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {path}: {e}")))?;
            BvFunction::from_json(&text).map_err(usage)?
        }
        [name] => test_set()
            .into_iter()
            .find(|(n, _)| n == name)
            .map(|(_, g)| g)
            .ok_or_else(|| {
                usage(format!(
                    "unknown multiplier `{term}`; known: square, cos1, sin1, saw, bump, one, const:c, cos:k, sin:k, indicator:a:b, testset, @file.json"
                ))
            })?,
        _ => return Err(usage(format!("unknown multiplier `{term}`"))),
    };
    Ok(g)
}

pub fn multipliers(spec: &str) -> Result<Vec<Multiplier>, UsageError> {
    let mut out = Vec::new();
    for token in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if token == "testset" {
            out.extend(test_set().into_iter().map(|(n, g)| Multiplier { label: n.into(), g }));
            continue;
        }
        let mut terms = token.split('+');
        let mut g = single(terms.next().expect("split yields one item"))?;
        for t in terms {
            g = g.add(&single(t)?);
        }
        out.push(Multiplier {
            label: token.to_string(),
            g,
        });
    }
    if out.is_empty() {
        return Err(usage("no multipliers given"));
    }
    Ok(out)
}

/// Integrable multipliers: `rsqrt` is `|t|^{-1/2}`; anything else is read as a BV function.
pub fn l1_function(spec: &str) -> Result<(String, L1Function), UsageError> {
    match spec.trim() {
        "rsqrt" => Ok(("rsqrt".into(), L1Function::new(|t| t.abs().powf(-0.5), &[0.0]))),
        other => {
            let m = multipliers(other)?;
            if m.len() != 1 {
                return Err(usage("the L¹ convolution takes a single multiplier"));
            }
            Ok((m[0].label.clone(), L1Function::from_bv(&m[0].g)))
        }
    }
}

/// Closed-form Alexiewicz norms where one is known.
pub fn known_norm(label: &str) -> Option<f64> {
    match label.parse::<CatalogName>().ok()? {
        CatalogName::Const1 | CatalogName::Exp(0) => Some(2.0 * PI),
        CatalogName::Exp(j) => Some(2.0 / j.unsigned_abs() as f64),
        CatalogName::Osc(a) => Some(PI.powf(1.0 - a) / (1.0 - a)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        let d = distributions("exp:1..3,const1", None).unwrap();
        let labels: Vec<_> = d.iter().map(|i| i.label.as_str()).collect();
        assert_eq!(labels, ["exp:1", "exp:2", "exp:3", "const1"]);
        assert!(distributions("nope", None).is_err());
        assert!(distributions("lebesgue", None).unwrap().iter().all(|i| i.lebesgue));
    }

    #[test]
    fn multiplier_sums() {
        let m = multipliers("one+cos:1,square").unwrap();
        assert_eq!(m.len(), 2);
        assert!((m[0].g.eval(0.0) - 2.0).abs() < 1e-9);
        assert_eq!(multipliers("testset").unwrap().len(), 5);
        assert!(multipliers("cos:0").is_err());
        assert!(multipliers("indicator:1:0").is_err());
    }

    #[test]
    fn closed_form_norms() {
        assert_eq!(known_norm("exp:4"), Some(0.5));
        assert!((known_norm("osc:0.5").unwrap() - 2.0 * PI.sqrt()).abs() < 1e-15);
        assert_eq!(known_norm("xsin"), None);
    }
}
