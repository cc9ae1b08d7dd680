//! Fourier coefficients through the primitive:
//! `f̂(n) = (−1)ⁿF(π) + in∫F(t)e^{−int}dt`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::norm::NormOptions;
use crate::primitive::DistributionAc;
use crate::quad::Tolerance;

/// Panels per period for frequency `n`: at least `32·max(|n|, 1)`.
pub fn coefficient_tolerance(n: i64) -> Tolerance {
    Tolerance::new(1e-12, 1e-9).with_density(32.0 * (n.unsigned_abs().max(1)) as f64 / (2.0 * PI))
}

/// `∫_{-π}^{π} F(t) e^{-int} dt`.
pub fn primitive_coeff(f: &DistributionAc, n: i64) -> Result<C64> {
    let nf = n as f64;
    let w = move |t: f64| C64::from_polar(1.0, -nf * t);
    f.primitive()
        .weighted(&w, -PI, PI, coefficient_tolerance(n))
        .certified(-PI, PI)
}

/// `f̂(n) = ∫ f e^{−int}`, with no `1/2π` factor.
pub fn coeff(f: &DistributionAc, n: i64) -> Result<C64> {
    let drift = f.primitive().drift();
    if n == 0 {
        return Ok(drift);
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(drift * sign + C64::new(0.0, n as f64) * primitive_coeff(f, n)?)
}

/// Coefficients `f̂(n)` for `|n| ≤ window`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierCoeffs {
    pub window: usize,
    values: Vec<C64>,
}

impl FourierCoeffs {
    pub fn from_fn(window: usize, c: impl Fn(i64) -> C64) -> FourierCoeffs {
        let w = window as i64;
        FourierCoeffs {
            window,
            values: (-w..=w).map(c).collect(),
        }
    }

    /// `f̂(n)`, or `None` outside the window.
    pub fn get(&self, n: i64) -> Option<C64> {
        let w = self.window as i64;
        (n.abs() <= w).then(|| self.values[(n + w) as usize])
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        let w = self.window as i64;
        self.values.iter().enumerate().map(move |(i, c)| (i as i64 - w, *c))
    }
}

/// Coefficients for `|n| ≤ window`, computed in parallel.
pub fn coeffs(f: &DistributionAc, window: usize) -> Result<FourierCoeffs> {
    let w = window as i64;
    let values = (-w..=w).into_par_iter().map(|n| coeff(f, n)).collect::<Result<Vec<_>>>()?;
    Ok(FourierCoeffs { window, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DNorm {
    pub value: f64,
    /// Index where the supremum is attained.
    pub at: i64,
}

/// `sup |σ_n|/(|n|+1)` over the window.
pub fn d_norm(c: &FourierCoeffs) -> DNorm {
    c.iter()
        .map(|(n, v)| DNorm {
            value: v.norm() / (n.abs() as f64 + 1.0),
            at: n,
        })
        .fold(DNorm { value: 0.0, at: 0 }, |a, b| if b.value > a.value { b } else { a })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthRow {
    pub n: i64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    /// `|F(π)| + |n|∫|F|`
    pub bound_e: f64,
    /// `4√2|n|‖f‖`
    pub bound_f: f64,
    /// `2√2|n|‖f − τ_{π/n} f‖`
    pub bound_h: f64,
    /// `|f̂(n)|/|n|`
    pub ratio: f64,
}

impl GrowthRow {
    /// Bounds (f) and (h); `bound_e` is informational.
    pub fn holds(&self, tol: f64) -> bool {
        let slack = tol * (1.0 + self.abs);
        self.abs <= self.bound_f + slack && self.abs <= self.bound_h + slack
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub norm: f64,
    pub rows: Vec<GrowthRow>,
    pub violations: usize,
}

/// Relative slack allowed in the growth bounds, covering quadrature and grid error.
pub const GROWTH_TOL: f64 = 1e-6;

/// Norm estimate that falls back to the best refinement when the grid cap is hit.
pub(crate) fn lenient(r: Result<f64>) -> Result<f64> {
    match r {
        Err(Error::NotConverged { best, .. }) => Ok(best),
        other => other,
    }
}

/// Growth diagnostics for `1 ≤ |n| ≤ window`.
pub fn growth_report(f: &DistributionAc, window: usize) -> Result<GrowthReport> {
    let norm = lenient(f.alexiewicz_norm())?;
    let l1_primitive = {
        let w = |_: f64| C64::new(1.0, 0.0);
        let abs = crate::primitive::Primitive::from_real_fn({
            let p = f.primitive().clone();
            move |x| p.eval(x).norm()
        })?;
        // ∫|F| needs no oscillation handling beyond what the sampling resolves
        let t = Tolerance::new(1e-10, 1e-8).with_density(64.0);
        abs.weighted(&w, -PI, PI, t).value.re
    };
    // ‖f − τ_{−s}f‖ = ‖τ_s f − f‖, so one norm serves ±n
    // A sampled norm never exceeds the true one, so capping the resolution
    // can only make bound (h) harder to meet.
    let hint = f.primitive().grid_hint();
    let capped = NormOptions {
        max_grid: 4 * hint,
        ..NormOptions::with_grid(hint)
    };
    let mods = (1..=window)
        .into_par_iter()
        .map(|m| {
            let d = f.sub(&f.translate(PI / m as f64)?);
            match d.alexiewicz_norm_with(Some(capped)) {
                Ok(e) => Ok(e.value),
                Err(Error::NotConverged { best, .. }) => Ok(best),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let w = window as i64;
    let ns: Vec<i64> = (-w..=w).filter(|&n| n != 0).collect();
    let rows = ns
        .par_iter()
        .map(|&n| {
            let c = coeff(f, n)?;
            let nf = n.abs() as f64;
            Ok(GrowthRow {
                n,
                re: c.re,
                im: c.im,
                abs: c.norm(),
                bound_e: f.primitive().drift().norm() + nf * l1_primitive,
                bound_f: 4.0 * 2f64.sqrt() * nf * norm,
                bound_h: 2.0 * 2f64.sqrt() * nf * mods[n.unsigned_abs() as usize - 1],
                ratio: c.norm() / nf,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let violations = rows.iter().filter(|r| !r.holds(GROWTH_TOL)).count();
    Ok(GrowthReport { norm, rows, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog;

    #[test]
    fn constant_coefficients() {
        let f = catalog("const1").unwrap().distribution;
        assert!((coeff(&f, 0).unwrap().re - 2.0 * PI).abs() < 1e-14);
        for n in 1..6 {
            assert!(coeff(&f, n).unwrap().norm() < 1e-10);
        }
    }

    #[test]
    fn exponential_picks_its_frequency() {
        for j in [1i64, 4, -3] {
            let f = catalog(&format!("exp:{j}")).unwrap().distribution;
            let c = coeff(&f, j).unwrap();
            assert!((c - C64::new(2.0 * PI, 0.0)).norm() < 1e-9, "{j}: {c}");
            assert!(coeff(&f, j + 1).unwrap().norm() < 1e-9);
        }
    }

    #[test]
    fn d_norm_of_linear_growth() {
        let c = FourierCoeffs::from_fn(5, |n| C64::new(n.abs() as f64 + 1.0, 0.0));
        assert!((d_norm(&c).value - 1.0).abs() < 1e-15);
        assert_eq!(d_norm(&FourierCoeffs::from_fn(3, |_| C64::new(0.0, 0.0))).value, 0.0);
    }
}
