//! Fejér, Dirichlet and de la Vallée Poussin kernels, Cesàro means, partial
//! sums and the Dirichlet divergence construction.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{coeffs, FourierCoeffs};
use crate::primitive::{reduce, DistributionAc, Feature, Primitive};
use crate::quad::gl16;
use crate::trig::TrigPoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Fejer,
    Dirichlet,
    ValleePoussin,
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelKind::Fejer => "fejer",
            KernelKind::Dirichlet => "dirichlet",
            KernelKind::ValleePoussin => "vallee_poussin",
        })
    }
}

impl FromStr for KernelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "fejer" => Ok(KernelKind::Fejer),
            "dirichlet" => Ok(KernelKind::Dirichlet),
            "vallee_poussin" | "vallee-poussin" => Ok(KernelKind::ValleePoussin),
            other => Err(Error::InvalidParameter(format!(
                "unknown kernel `{other}`; expected fejer, dirichlet or vallee_poussin"
            ))),
        }
    }
}

/// Below this `|t|` the closed forms switch to their Taylor series.
pub const SERIES_CUTOFF: f64 = 1e-4;

/// `sin(m·u)/sin(u)`, with the removable singularity at `u = 0` handled by series.
fn sine_ratio(m: f64, u: f64) -> f64 {
    if u.abs() < 0.5 * SERIES_CUTOFF {
        let q = m * m - 1.0;
        let u2 = u * u;
        return m
            * (1.0 - q * u2 / 6.0 + q * (3.0 * m * m - 7.0) * u2 * u2 / 360.0
                - q * (3.0 * m.powi(4) - 18.0 * m * m + 31.0) * u2 * u2 * u2 / 15120.0);
    }
    (m * u).sin() / u.sin()
}

/// A kernel with its coefficients and its closed form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Kernel {
    pub kind: KernelKind,
    pub n: usize,
    pub poly: TrigPoly,
}

fn fejer_closed(n: usize, t: f64) -> f64 {
    let m = (n + 1) as f64;
    let r = sine_ratio(m, 0.5 * t);
    r * r / (2.0 * PI * m)
}

impl Kernel {
    /// Closed-form value at `t`.
    pub fn closed_form(&self, t: f64) -> f64 {
        let t = reduce(t);
        match self.kind {
            KernelKind::Dirichlet => sine_ratio(2.0 * self.n as f64 + 1.0, 0.5 * t),
            KernelKind::Fejer => fejer_closed(self.n, t),
            KernelKind::ValleePoussin => 2.0 * fejer_closed(2 * self.n + 1, t) - fejer_closed(self.n, t),
        }
    }

    /// Value from the coefficient list.
    pub fn eval(&self, t: f64) -> f64 {
        self.poly.eval(t).re
    }

    /// `∫_{-π}^{π} k_n`.
    pub fn integral(&self) -> f64 {
        2.0 * PI * self.poly.coeff(0).re
    }
}

fn fejer_coeff(n: usize, k: i64) -> f64 {
    let a = k.unsigned_abs() as f64;
    if a > n as f64 {
        0.0
    } else {
        (1.0 - a / (n as f64 + 1.0)) / (2.0 * PI)
    }
}

pub fn kernel(kind: KernelKind, n: usize) -> Kernel {
    let poly = match kind {
        KernelKind::Dirichlet => TrigPoly::from_fn(n, |_| C64::new(1.0, 0.0)),
        KernelKind::Fejer => TrigPoly::from_fn(n, |k| C64::new(fejer_coeff(n, k), 0.0)),
        KernelKind::ValleePoussin => TrigPoly::from_fn(2 * n + 1, |k| {
            C64::new(2.0 * fejer_coeff(2 * n + 1, k) - fejer_coeff(n, k), 0.0)
        }),
    };
    Kernel { kind, n, poly }
}

/// `∫_{δ ≤ |t| ≤ π} |k(t)| dt` for an even kernel, integrating between
/// bracketed zeros so that every panel sees a smooth integrand.
fn abs_integral(k: &dyn Fn(f64) -> f64, degree: usize, delta: f64) -> f64 {
    let n = 64 * (degree + 1);
    let h = (PI - delta) / n as f64;
    let mut cuts = vec![delta];
    let mut prev = k(delta);
    for j in 1..=n {
        let t = if j == n { PI } else { delta + h * j as f64 };
        let v = k(t);
        if prev * v < 0.0 {
            let (mut a, mut b, mut fa) = (t - h, t, prev);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                let fm = k(m);
                if (fm < 0.0) == (fa < 0.0) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            cuts.push(0.5 * (a + b));
        }
        prev = v;
    }
    cuts.push(PI);
    let f = |t: f64| C64::new(k(t), 0.0);
    let total: f64 = cuts
        .windows(2)
        .map(|w| {
            let panels = 1 + ((w[1] - w[0]) / h).ceil() as usize / 8;
            gl16().composite(&f, w[0], w[1], panels).re.abs()
        })
        .sum();
    2.0 * total
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummabilityRow {
    pub n: usize,
    pub integral: f64,
    pub norm_l1: f64,
    /// `norm_l1 / ln n`
    pub log_ratio: f64,
    pub tails: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummabilityReport {
    pub kind: KernelKind,
    pub deltas: Vec<f64>,
    pub rows: Vec<SummabilityRow>,
    pub integral_one: bool,
    /// `max_n ‖k_n‖₁`
    pub l1_bound: f64,
    /// No growth of `‖k_n‖₁` over the second half of the sweep.
    pub l1_bounded: bool,
    /// Every tail shrinks by at least half from the first to the last row.
    pub tails_vanish: bool,
}

/// Sweeps the three conditions of a summability kernel over `1 ≤ n ≤ n_max`.
/// The Dirichlet kernel is divided by `2π` here so that its integral is 1.
pub fn validate_summability(kind: KernelKind, n_max: usize, deltas: &[f64]) -> Result<SummabilityReport> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be positive".into()));
    }
    if let Some(d) = deltas.iter().find(|d| !(**d > 0.0 && **d <= PI)) {
        return Err(Error::InvalidParameter(format!("δ must lie in (0, π], got {d}")));
    }
    let norm = if kind == KernelKind::Dirichlet { 1.0 / (2.0 * PI) } else { 1.0 };
    let rows: Vec<SummabilityRow> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let k = kernel(kind, n);
            let f = |t: f64| norm * k.closed_form(t);
            let deg = k.poly.degree();
            let norm_l1 = abs_integral(&f, deg, 0.0);
            SummabilityRow {
                n,
                integral: norm * k.integral(),
                norm_l1,
                log_ratio: if n > 1 { norm_l1 / (n as f64).ln() } else { f64::NAN },
                tails: deltas.iter().map(|&d| abs_integral(&f, deg, d)).collect(),
            }
        })
        .collect();
    let integral_one = rows.iter().all(|r| (r.integral - 1.0).abs() < 1e-12);
    let l1_bound = rows.iter().map(|r| r.norm_l1).fold(0.0, f64::max);
    let half = &rows[rows.len() / 2];
    let last = rows.last().expect("nonempty");
    let l1_bounded = last.norm_l1 <= half.norm_l1 + 1e-9;
    let tails_vanish = (0..deltas.len()).all(|j| last.tails[j] <= 0.5 * rows[0].tails[j] + 1e-12);
    Ok(SummabilityReport {
        kind,
        deltas: deltas.to_vec(),
        rows,
        integral_one,
        l1_bound,
        l1_bounded,
        tails_vanish,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirichletNorm {
    pub n: usize,
    /// Sliding-window norm of the primitive of `D_n`.
    pub norm_t: f64,
    /// `4π/(2n+1) + 4Σ sin(2πk/(2n+1))/k`, or `2π` for `n = 0`.
    pub closed_form: f64,
    /// `∫|D_n|`
    pub norm_l1: f64,
}

/// Alexiewicz norm of the Dirichlet kernel `D_n`, both ways.
pub fn dirichlet_alexiewicz_norm(n: usize) -> Result<DirichletNorm> {
    let k = kernel(KernelKind::Dirichlet, n);
    let norm_t = k.poly.to_distribution().alexiewicz_norm()?;
    let closed_form = if n == 0 {
        2.0 * PI
    } else {
        let m = 2.0 * n as f64 + 1.0;
        4.0 * PI / m + 4.0 * (1..=n).map(|j| (2.0 * PI * j as f64 / m).sin() / j as f64).sum::<f64>()
    };
    let norm_l1 = abs_integral(&|t| k.closed_form(t), n, 0.0);
    Ok(DirichletNorm {
        n,
        norm_t,
        closed_form,
        norm_l1,
    })
}

/// `σ_n[f] = (1/2π) Σ (1 − |k|/(n+1)) f̂(k) e^{ikt}` from known coefficients.
pub fn cesaro_from(c: &FourierCoeffs, n: usize) -> Result<TrigPoly> {
    window_check(c, n)?;
    Ok(TrigPoly::from_fn(n, |k| {
        c.get(k).expect("inside window") * (1.0 - k.abs() as f64 / (n as f64 + 1.0)) / (2.0 * PI)
    }))
}

/// `(1/2π) Σ_{|k|≤n} f̂(k) e^{ikt}`, the convolution with `D_n/2π`.
pub fn partial_from(c: &FourierCoeffs, n: usize) -> Result<TrigPoly> {
    window_check(c, n)?;
    Ok(TrigPoly::from_fn(n, |k| c.get(k).expect("inside window") / (2.0 * PI)))
}

fn window_check(c: &FourierCoeffs, n: usize) -> Result<()> {
    if n > c.window {
        return Err(Error::InvalidParameter(format!(
            "index {n} exceeds the coefficient window {}",
            c.window
        )));
    }
    Ok(())
}

pub fn cesaro_mean(f: &DistributionAc, n: usize) -> Result<TrigPoly> {
    cesaro_from(&coeffs(f, n)?, n)
}

pub fn partial_sum(f: &DistributionAc, n: usize) -> Result<TrigPoly> {
    partial_from(&coeffs(f, n)?, n)
}

/// `F_m` from the divergence example: `−sin((m+½)t)` on `[−mπ/(m+½), 0]`, zero elsewhere.
pub fn divergence_primitive(m: usize) -> Primitive {
    let mu = m as f64 + 0.5;
    let a = m as f64 * PI / mu;
    Primitive::from_real_fn(move |t| if (-a..=0.0).contains(&t) { -(mu * t).sin() } else { 0.0 })
        .expect("finite")
        .with_features(vec![Feature::Kink(-a), Feature::Kink(0.0), Feature::Kink(-PI)])
}

/// `F̂_m(k) = ∫ F_m(t) e^{−ikt} dt`, exact.
pub fn divergence_coeff(m: usize, k: i64) -> C64 {
    let mu = m as f64 + 0.5;
    let a = m as f64 * PI / mu;
    let e = |nu: f64| (C64::new(1.0, 0.0) - C64::from_polar(1.0, -nu * a)) / C64::new(0.0, nu);
    C64::new(0.0, 0.5) * (e(mu - k as f64) - e(-mu - k as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceReport {
    pub n: usize,
    /// `max − min` of `D_{2n} ∗ F_{2n}`
    pub osc: f64,
    pub log_n: f64,
    /// `osc / ln n`
    pub ratio: f64,
    /// `‖F'_{2n}‖`, expected 2
    pub derivative_norm: f64,
    /// `D_{2n} ∗ F_{2n}(0)` and its integral form
    pub value_at_zero: f64,
    pub value_at_zero_integral: f64,
    /// `D_{2n} ∗ F_{2n}(π)` and `∫_0^{2nπ} sin(2t) sec(t/(4n+1)) dt`
    pub value_at_pi: f64,
    pub sec_integral: f64,
}

/// Oscillation of `D_{2n} ∗ F_{2n} = Σ_{|k|≤2n} F̂_{2n}(k) e^{ikx}`.
pub fn divergence_construction(n: usize) -> Result<DivergenceReport> {
    if n < 2 {
        return Err(Error::InvalidParameter("divergence construction needs n ≥ 2".into()));
    }
    let m = 2 * n;
    let conv = TrigPoly::from_fn(m, |k| divergence_coeff(m, k));
    let value = |x: f64| conv.eval(x).re;
    let grid = 64 * (m + 1);
    let h = 2.0 * PI / grid as f64;
    let samples: Vec<(f64, f64)> = (0..grid).map(|j| {
        let x = -PI + h * j as f64;
        (x, value(x))
    }).collect();
    let polish = |x0: f64, sign: f64| -> f64 {
        let (mut a, mut b) = (x0 - h, x0 + h);
        for _ in 0..80 {
            let m1 = a + (b - a) / 3.0;
            let m2 = b - (b - a) / 3.0;
            if sign * value(m1) < sign * value(m2) {
                a = m1;
            } else {
                b = m2;
            }
        }
        sign * (sign * value(0.5 * (a + b))).max(sign * value(x0))
    };
    let (xmax, _) = samples.iter().copied().fold((0.0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
    let (xmin, _) = samples.iter().copied().fold((0.0, f64::MAX), |a, b| if b.1 < a.1 { b } else { a });
    let osc = polish(xmax, 1.0) - polish(xmin, -1.0);
    let derivative_norm = DistributionAc::new(divergence_primitive(m)).alexiewicz_norm()?;
    let mf = m as f64;
    let q = 2.0 * mf + 1.0;
    let zero_integrand = |t: f64| {
        let s = t.sin();
        C64::new(if t == 0.0 { 0.0 } else { s * s / (t / q).sin() }, 0.0)
    };
    let sec_integrand = |t: f64| C64::new((2.0 * t).sin() / (t / q).cos(), 0.0);
    let top = mf * PI;
    let panels = 16 * m;
    let value_at_zero_integral = 2.0 / q * gl16().composite(&zero_integrand, 0.0, top, panels).re;
    let sec_integral = gl16().composite(&sec_integrand, 0.0, top, panels).re;
    let log_n = (n as f64).ln();
    Ok(DivergenceReport {
        n,
        osc,
        log_n,
        ratio: osc / log_n,
        derivative_norm,
        value_at_zero: value(0.0),
        value_at_zero_integral,
        value_at_pi: value(PI),
        sec_integral,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_match_coefficients() {
        for kind in [KernelKind::Fejer, KernelKind::Dirichlet, KernelKind::ValleePoussin] {
            for n in [0usize, 1, 5, 40] {
                let k = kernel(kind, n);
                for &t in &[0.0, 3e-5, -7e-5, 1e-3, 0.5, -2.0, 3.1] {
                    let scale = 1.0 + k.eval(0.0).abs();
                    assert!((k.closed_form(t) - k.eval(t)).abs() < 1e-11 * scale, "{kind} {n} {t}");
                }
                assert!((k.integral() - if kind == KernelKind::Dirichlet { 2.0 * PI } else { 1.0 }).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn dirichlet_small_cases() {
        let d0 = dirichlet_alexiewicz_norm(0).unwrap();
        assert!((d0.norm_t - 2.0 * PI).abs() < 1e-9 && d0.closed_form == 2.0 * PI);
        let d1 = dirichlet_alexiewicz_norm(1).unwrap();
        let expect = 4.0 * PI / 3.0 + 2.0 * 3f64.sqrt();
        assert!((d1.closed_form - expect).abs() < 1e-13);
        assert!((d1.norm_t - expect).abs() < 1e-6 * expect);
    }

    #[test]
    fn fejer_is_a_summability_kernel() {
        let r = validate_summability(KernelKind::Fejer, 16, &[0.5, 1.0]).unwrap();
        assert!(r.integral_one && r.l1_bounded && r.tails_vanish);
        assert!(r.rows.iter().all(|row| (row.norm_l1 - 1.0).abs() < 1e-12));
        let d = validate_summability(KernelKind::Dirichlet, 16, &[1.0]).unwrap();
        assert!(d.integral_one && !d.l1_bounded);
    }

    #[test]
    fn divergence_coefficients_match_quadrature() {
        let m = 8;
        let p = divergence_primitive(m);
        let a = m as f64 * PI / (m as f64 + 0.5);
        for k in [-9i64, -1, 0, 3, 8] {
            let fw = |t: f64| p.eval(t) * C64::from_polar(1.0, -(k as f64) * t);
            let direct = gl16().composite(&fw, -a, 0.0, 64);
            assert!((divergence_coeff(m, k) - direct).norm() < 1e-12, "{k}");
        }
    }
}
