//! Trigonometric polynomials `Σ_{|k|≤n} c_k e^{ikt}`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::bv::VariationReport;
use crate::primitive::{DistributionAc, Primitive, DEFAULT_GRID};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrigPoly {
    degree: usize,
    /// `coeffs[k + degree] = c_k`
    coeffs: Vec<C64>,
}

/// `e^{ikt}` for `k = 0..=n`, by repeated multiplication from an exact base.
fn powers(t: f64, n: usize) -> Vec<C64> {
    let z = C64::from_polar(1.0, t);
    let mut out = Vec::with_capacity(n + 1);
    let mut p = C64::new(1.0, 0.0);
    for k in 0..=n {
        // refresh from the exact value now and then to cap drift
        if k % 32 == 0 {
            p = C64::from_polar(1.0, k as f64 * t);
        }
        out.push(p);
        p *= z;
    }
    out
}

impl TrigPoly {
    pub fn from_fn(degree: usize, c: impl Fn(i64) -> C64) -> TrigPoly {
        let d = degree as i64;
        TrigPoly {
            degree,
            coeffs: (-d..=d).map(c).collect(),
        }
    }

    pub fn zero() -> TrigPoly {
        TrigPoly::from_fn(0, |_| C64::new(0.0, 0.0))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `c_k`, zero outside the window.
    pub fn coeff(&self, k: i64) -> C64 {
        let d = self.degree as i64;
        if k.abs() > d {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + d) as usize]
        }
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        let d = self.degree as i64;
        self.coeffs.iter().enumerate().map(move |(i, c)| (i as i64 - d, *c))
    }

    /// Conjugate symmetric coefficients, so the values are real.
    pub fn is_real(&self) -> bool {
        let d = self.degree as i64;
        (0..=d).all(|k| {
            let (a, b) = (self.coeff(k), self.coeff(-k).conj());
            (a - b).norm() <= 1e-14 * (1.0 + a.norm())
        })
    }

    fn sum_with(&self, t: f64, weight: impl Fn(i64, C64) -> C64) -> C64 {
        let p = powers(t, self.degree);
        let d = self.degree as i64;
        let mut s = weight(0, self.coeff(0));
        for k in 1..=d {
            let e = p[k as usize];
            s += weight(k, self.coeff(k)) * e + weight(-k, self.coeff(-k)) * e.conj();
        }
        s
    }

    pub fn eval(&self, t: f64) -> C64 {
        self.sum_with(t, |_, c| c)
    }

    pub fn derivative(&self, t: f64) -> C64 {
        self.sum_with(t, |k, c| c * C64::new(0.0, k as f64))
    }

    /// `∫_{-π}^x p`.
    pub fn integral_from_start(&self, x: f64) -> C64 {
        let d = self.degree as i64;
        let p = powers(x, self.degree);
        let mut s = self.coeff(0) * (x + PI);
        for k in 1..=d {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let e = p[k as usize];
            let ik = C64::new(0.0, k as f64);
            s += self.coeff(k) * (e - sign) / ik - self.coeff(-k) * (e.conj() - sign) / ik;
        }
        s
    }

    /// The polynomial as a distribution, through its closed-form primitive.
    pub fn to_distribution(&self) -> DistributionAc {
        let me = self.clone();
        let grid = DEFAULT_GRID.max(64 * self.degree.next_power_of_two());
        let p = if self.is_real() {
            Primitive::from_real_fn(move |x| me.integral_from_start(x).re)
        } else {
            Primitive::from_fn(move |x| me.integral_from_start(x))
        }
        .expect("trigonometric primitives are finite");
        p.with_grid_hint(grid).into()
    }

    pub fn add(&self, other: &TrigPoly) -> TrigPoly {
        let d = self.degree.max(other.degree);
        TrigPoly::from_fn(d, |k| self.coeff(k) + other.coeff(k))
    }

    pub fn scale(&self, c: C64) -> TrigPoly {
        TrigPoly::from_fn(self.degree, |k| self.coeff(k) * c)
    }

    /// Variation and sup norm of the real and imaginary parts, combined as
    /// `√(V_r² + V_i²)`.
    pub fn bv_norm(&self) -> VariationReport {
        let (vr, sr) = real_variation(self.degree, &|t| self.eval(t).re, &|t| self.derivative(t).re);
        let (vi, si) = if self.is_real() {
            (0.0, 0.0)
        } else {
            real_variation(self.degree, &|t| self.eval(t).im, &|t| self.derivative(t).im)
        };
        let sup = if self.is_real() { sr } else { self.complex_sup().max(sr).max(si) };
        let variation = vr.hypot(vi);
        VariationReport {
            variation,
            sup_norm: sup,
            bv_norm: variation + sup,
        }
    }

    fn complex_sup(&self) -> f64 {
        let n = 64 * (self.degree + 1);
        let h = 2.0 * PI / n as f64;
        let (mut best, mut at) = (0.0, 0.0);
        for j in 0..n {
            let t = -PI + h * j as f64;
            let v = self.eval(t).norm();
            if v > best {
                best = v;
                at = t;
            }
        }
        let (mut a, mut b) = (at - h, at + h);
        for _ in 0..60 {
            let m1 = a + (b - a) / 3.0;
            let m2 = b - (b - a) / 3.0;
            if self.eval(m1).norm() < self.eval(m2).norm() {
                a = m1;
            } else {
                b = m2;
            }
        }
        best.max(self.eval(0.5 * (a + b)).norm())
    }
}

/// Exact variation and sup of a smooth periodic real function of the given
/// degree: zeros of the derivative are bracketed on a fine grid and bisected.
fn real_variation(degree: usize, f: &dyn Fn(f64) -> f64, df: &dyn Fn(f64) -> f64) -> (f64, f64) {
    let n = 64 * (degree + 1);
    let h = 2.0 * PI / n as f64;
    // cyclic scan so that a zero at the ±π seam is bracketed too
    let d: Vec<f64> = (0..n).map(|j| df(-PI + h * j as f64)).collect();
    let mut crit = Vec::new();
    for j in 0..n {
        let (a, b) = (d[j], d[(j + 1) % n]);
        let l0 = -PI + h * j as f64;
        if a == 0.0 {
            crit.push(l0);
        } else if a * b < 0.0 {
            let (mut l, mut r) = (l0, l0 + h);
            let mut fl = a;
            for _ in 0..60 {
                let m = 0.5 * (l + r);
                let fm = df(m);
                if fm == 0.0 {
                    l = m;
                    r = m;
                    break;
                }
                if (fm < 0.0) == (fl < 0.0) {
                    l = m;
                    fl = fm;
                } else {
                    r = m;
                }
            }
            crit.push(0.5 * (l + r));
        }
    }
    let mut vals: Vec<f64> = crit.iter().map(|&t| f(t)).collect();
    if vals.is_empty() {
        vals.push(f(0.0));
    }
    let sup = vals.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let mut var = 0.0;
    for j in 0..vals.len() {
        let next = vals[(j + 1) % vals.len()];
        var += (next - vals[j]).abs();
    }
    (var, sup)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_and_primitive() {
        // 1 + 2cos t + sin 3t
        let p = TrigPoly::from_fn(3, |k| match k {
            0 => C64::new(1.0, 0.0),
            1 | -1 => C64::new(1.0, 0.0),
            3 => C64::new(0.0, -0.5),
            -3 => C64::new(0.0, 0.5),
            _ => C64::new(0.0, 0.0),
        });
        assert!(p.is_real());
        for &t in &[-3.0, -1.0, 0.2, 2.5] {
            let expect = 1.0 + 2.0 * f64::cos(t) + f64::sin(3.0 * t);
            assert!((p.eval(t).re - expect).abs() < 1e-14);
            let prim = t + PI + 2.0 * t.sin() - ((3.0 * t).cos() - (3.0 * PI).cos()) / 3.0;
            assert!((p.integral_from_start(t).re - prim).abs() < 1e-13);
        }
    }

    #[test]
    fn variation_of_sine_and_cosine_sum() {
        let s = TrigPoly::from_fn(1, |k| C64::new(0.0, -0.5 * k as f64));
        let r = s.bv_norm();
        assert!((r.variation - 4.0).abs() < 1e-12);
        assert!((r.sup_norm - 1.0).abs() < 1e-12);
        // complex e^{it}: V = √(4² + 4²), sup 1
        let e = TrigPoly::from_fn(1, |k| C64::new((k == 1) as i32 as f64, 0.0));
        let r = e.bv_norm();
        assert!((r.variation - 32f64.sqrt()).abs() < 1e-10);
        assert!((r.sup_norm - 1.0).abs() < 1e-12);
    }
}
