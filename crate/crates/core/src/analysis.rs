//! Cesàro-weighted Parseval sums, Fejér's lemma, coefficient tests for BV
//! and the interchange of integrals in the convolution.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::bv::{integrate_product, BvFunction};
use crate::convolution::{fubini_inner_first, BvConvolution};
use crate::error::{Error, Result};
use crate::fourier::{coeffs, FourierCoeffs};
use crate::kernels::cesaro_from;
use crate::primitive::DistributionAc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParsevalSum {
    pub n: usize,
    /// `(1/2π) Σ (1 − |k|/(n+1)) f̂(k) ĝ(−k)`
    pub value: C64,
    /// `Σ (1 − |k|/(n+1)) f̂(k) ĝ(k)`, the sum without normalization or reflection
    pub printed: C64,
    /// `∫ fg`
    pub target: C64,
    pub gap: f64,
}

/// Both weighted sums from coefficient windows covering `n`.
pub fn parseval_from(fc: &FourierCoeffs, gc: &FourierCoeffs, target: C64, n: usize) -> Result<ParsevalSum> {
    if n > fc.window || n > gc.window {
        return Err(Error::InvalidParameter(format!("index {n} exceeds a coefficient window")));
    }
    let d = n as i64;
    let mut value = C64::new(0.0, 0.0);
    let mut printed = C64::new(0.0, 0.0);
    for k in -d..=d {
        let w = 1.0 - k.abs() as f64 / (n as f64 + 1.0);
        let f = fc.get(k).expect("inside window");
        value += f * gc.get(-k).expect("inside window") * w;
        printed += f * gc.get(k).expect("inside window") * w;
    }
    value /= 2.0 * PI;
    Ok(ParsevalSum {
        n,
        value,
        printed,
        target,
        gap: (value - target).norm(),
    })
}

pub fn g_coeffs(g: &BvFunction, window: usize) -> FourierCoeffs {
    FourierCoeffs::from_fn(window, |k| g.fourier_coeff(k))
}

pub fn parseval_sum(f: &DistributionAc, g: &BvFunction, n: usize) -> Result<ParsevalSum> {
    let target = integrate_product(f, g)?;
    parseval_from(&coeffs(f, n)?, &g_coeffs(g, n), target, n)
}

/// Parseval sums for every `n` in `ns`, sharing one coefficient window.
pub fn parseval_sweep(f: &DistributionAc, g: &BvFunction, ns: &[usize]) -> Result<Vec<ParsevalSum>> {
    let top = ns.iter().copied().max().unwrap_or(0);
    let target = integrate_product(f, g)?;
    let fc = coeffs(f, top)?;
    let gc = g_coeffs(g, top);
    ns.iter().map(|&n| parseval_from(&fc, &gc, target, n)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FejerRow {
    pub n: u32,
    /// `I_n = ∫ f(t) g(nt) dt`
    pub value: C64,
    /// `|I_n| / n`
    pub over_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FejerReport {
    pub rows: Vec<FejerRow>,
    /// `f̂(0)ĝ(0)/(2π)`, the limit of `I_n` for integrable `f`
    pub limit: Option<C64>,
}

/// `I_n` for each dilation factor in `ns`. Pass `integrable` when `f` is a
/// function, which adds the limit of `I_n`.
pub fn fejer_lemma_sweep(f: &DistributionAc, g: &BvFunction, ns: &[u32], integrable: bool) -> Result<FejerReport> {
    let rows = ns
        .par_iter()
        .map(|&n| {
            let value = integrate_product(f, &g.dilate(n)?)?;
            Ok(FejerRow {
                n,
                value,
                over_n: value.norm() / n as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let limit = integrable.then(|| f.primitive().drift() * g.fourier_coeff(0) / (2.0 * PI));
    Ok(FejerReport { rows, limit })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BvRow {
    pub n: usize,
    pub bv_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BvCoefficientReport {
    pub rows: Vec<BvRow>,
    pub max: f64,
    pub bound: f64,
    pub passes: bool,
}

/// `‖σ_n[S]‖_BV` for `0 ≤ n ≤ n_max`, compared against `bound`.
pub fn bv_coefficient_test(a: &FourierCoeffs, bound: f64, n_max: usize) -> Result<BvCoefficientReport> {
    let rows = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            Ok(BvRow {
                n,
                bv_norm: cesaro_from(a, n)?.bv_norm().bv_norm,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max = rows.iter().map(|r| r.bv_norm).fold(0.0, f64::max);
    Ok(BvCoefficientReport {
        rows,
        max,
        bound,
        passes: max <= bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FubiniReport {
    pub a: f64,
    pub b: f64,
    /// `∫_a^b (f∗g)(x) dx`
    pub lhs: C64,
    /// `∫ g(y) (F(b−y) − F(a−y)) dy`
    pub rhs: C64,
    pub gap: f64,
}

pub fn fubini_check(f: &DistributionAc, g: &BvFunction, a: f64, b: f64) -> Result<FubiniReport> {
    if !(a < b) {
        return Err(Error::InvalidParameter(format!("need a < b, got [{a}, {b}]")));
    }
    let lhs = BvConvolution::new(f, g).integrate(a, b)?;
    let rhs = fubini_inner_first(f, g, a, b)?;
    Ok(FubiniReport {
        a,
        b,
        lhs,
        rhs,
        gap: (lhs - rhs).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog;

    fn dist(name: &str) -> DistributionAc {
        catalog(name).unwrap().distribution
    }

    #[test]
    fn constants_reproduce_two_pi() {
        let s = parseval_sum(&dist("const1"), &BvFunction::constant(1.0), 8).unwrap();
        assert!((s.target.re - 2.0 * PI).abs() < 1e-13);
        assert!((s.value.re - 2.0 * PI).abs() < 1e-12);
        // the unnormalized form gives 4π²
        assert!((s.printed.re - 4.0 * PI * PI).abs() < 1e-11);
    }

    #[test]
    fn fejer_lemma_on_constants() {
        let one = dist("const1");
        let r = fejer_lemma_sweep(&one, &BvFunction::sin_mode(1), &[1, 2, 5], true).unwrap();
        assert!(r.rows.iter().all(|row| row.value.norm() < 1e-9));
        let g = BvFunction::constant(1.0).add(&BvFunction::cos_mode(1));
        let r = fejer_lemma_sweep(&one, &g, &[2, 3], true).unwrap();
        let limit = r.limit.unwrap();
        assert!((limit.re - 2.0 * PI).abs() < 1e-9);
        assert!(r.rows.iter().all(|row| (row.value - limit).norm() < 1e-8));
    }

    #[test]
    fn square_wave_coefficients_stay_below_its_bv_norm() {
        let g = BvFunction::indicator(0.0, PI).unwrap();
        let r = bv_coefficient_test(&g_coeffs(&g, 24), 3.0 + 1e-9, 24).unwrap();
        assert!(r.passes, "{}", r.max);
        let growing = FourierCoeffs::from_fn(24, |k| C64::new(k.abs() as f64 + 1.0, 0.0));
        let r = bv_coefficient_test(&growing, 3.0, 24).unwrap();
        assert!(r.rows[24].bv_norm > 4.0 * r.rows[4].bv_norm);
    }

    #[test]
    fn fubini_on_a_smooth_pair() {
        let r = fubini_check(&dist("exp:2"), &BvFunction::cos_mode(2), -1.0, 1.0).unwrap();
        assert!(r.gap < 1e-8, "{r:?}");
    }
}
