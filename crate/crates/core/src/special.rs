//! Scalar special functions used by the catalog.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;

use crate::quad::gl16;

/// Fractional part of `k·y`, exact for any finite `y`, mapped to [-1/2, 1/2).
pub fn frac_mul(k: u64, y: f64) -> f64 {
    if y == 0.0 || k == 0 || !y.is_finite() {
        return 0.0;
    }
    let bits = y.abs().to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let (mant, e) = if exp == 0 {
        (bits & ((1 << 52) - 1), -1074)
    } else {
        ((bits & ((1 << 52) - 1)) | (1 << 52), exp - 1075)
    };
    if e >= 0 {
        return 0.0;
    }
    // |k·y| = n·2^e with n < 2^117
    let n = k as u128 * mant as u128;
    let scale = 2f64.powi(e as i32);
    let mut f = if -e >= 128 {
        n as f64 * scale
    } else {
        (n & ((1u128 << -e) - 1)) as f64 * scale
    };
    if y < 0.0 {
        f = 1.0 - f;
    }
    if f >= 0.5 {
        f - 1.0
    } else {
        f
    }
}

/// `(cos 2πky, sin 2πky)` with exact reduction of `k·y`.
pub fn cos_sin_turns(k: u64, y: f64) -> (f64, f64) {
    let t = 2.0 * PI * frac_mul(k, y);
    (t.cos(), t.sin())
}

/// Position of `x ∈ [-π, π]` as a fraction of the period, exact at -π, 0, π.
pub fn turn_of(x: f64) -> f64 {
    (x + PI) / (2.0 * PI)
}

/// The Cantor ternary function on [0, 1].
pub fn cantor(y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 1.0;
    }
    let mut y = y;
    let mut v = 0.0;
    let mut scale = 0.5;
    for _ in 0..40 {
        y *= 3.0;
        if y >= 2.0 {
            v += scale;
            y -= 2.0;
        } else if y >= 1.0 {
            return v + scale;
        }
        scale *= 0.5;
    }
    v
}

/// `∫_X^∞ u^-ν e^{iu} du` by its asymptotic series; accurate for X ≳ 30.
pub fn oscillatory_tail(nu: f64, x: f64) -> C64 {
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    let mut best = f64::INFINITY;
    for m in 0..200 {
        let next = term * C64::new(0.0, -1.0) * ((nu + m as f64) / x);
        if next.norm() >= best || next.norm() < 1e-18 {
            if next.norm() < 1e-18 {
                sum += next;
            }
            break;
        }
        best = next.norm();
        term = next;
        sum += term;
    }
    C64::new(0.0, 1.0) * C64::from_polar(x.powf(-nu), x) * sum
}

const G_SPLIT: f64 = 0.4;
const G_STEP: f64 = 1.0 / 512.0;

fn t_cos(t: f64) -> C64 {
    C64::new(t * t.powi(-4).cos(), 0.0)
}

/// `G(x) = ∫_0^x t·cos(t^-4) dt` for 0 ≤ x ≤ π.
pub fn g36(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x <= G_SPLIT {
        return 0.25 * oscillatory_tail(1.5, x.powi(-4)).re;
    }
    let table = g36_table();
    let pos = ((x - G_SPLIT) / G_STEP).floor() as usize;
    let pos = pos.min(table.len() - 1);
    let start = G_SPLIT + pos as f64 * G_STEP;
    table[pos] + gl16().apply(&t_cos, start, x).re
}

fn g36_table() -> &'static [f64] {
    static T: OnceLock<Vec<f64>> = OnceLock::new();
    T.get_or_init(|| {
        let n = ((PI - G_SPLIT) / G_STEP).ceil() as usize + 1;
        let mut v = Vec::with_capacity(n);
        let mut acc = 0.25 * oscillatory_tail(1.5, G_SPLIT.powi(-4)).re;
        v.push(acc);
        for k in 0..n - 1 {
            let a = G_SPLIT + k as f64 * G_STEP;
            acc += gl16().composite(&t_cos, a, a + G_STEP, 2).re;
            v.push(acc);
        }
        v
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{adaptive, Tolerance};

    #[test]
    fn fractions_agree_with_direct_evaluation() {
        for &y in &[0.1, 0.37, 0.5, 0.999, 0.25] {
            for k in [1u64, 7, 49, 343, 2401] {
                let direct = (k as f64 * y).fract();
                let direct = if direct >= 0.5 { direct - 1.0 } else { direct };
                assert!((frac_mul(k, y) - direct).abs() < 1e-12, "k={k} y={y}");
            }
        }
        assert!((frac_mul(3, -0.25) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn special_points_are_exact() {
        let mut k = 1u64;
        for _ in 0..21 {
            assert_eq!(frac_mul(k, turn_of(0.0)), -0.5);
            assert_eq!(frac_mul(k, turn_of(PI)), 0.0);
            assert_eq!(frac_mul(k, turn_of(-PI)), 0.0);
            k *= 7;
        }
    }

    #[test]
    fn cantor_values() {
        assert_eq!(cantor(0.5), 0.5);
        assert!((cantor(0.25) - 1.0 / 3.0).abs() < 1e-12);
        assert!((cantor(1.0 / 9.0 + 1e-12) - 0.25).abs() < 1e-6);
        assert_eq!(cantor(0.0), 0.0);
        assert_eq!(cantor(1.0), 1.0);
    }

    #[test]
    fn tail_matches_quadrature() {
        // ∫_40^∞ u^-1.5 cos u du: integrate to 40+2000π and add the series
        // remainder at the far end.
        let far = 40.0 + 2000.0 * PI;
        let body = adaptive(
            &|u: f64| C64::new(u.powf(-1.5) * u.cos(), 0.0),
            40.0,
            far,
            4000,
            Tolerance::new(1e-14, 1e-13),
        );
        let expect = body.value.re + oscillatory_tail(1.5, far).re;
        assert!((oscillatory_tail(1.5, 40.0).re - expect).abs() < 1e-12);
    }

    #[test]
    fn g36_is_continuous_at_the_split() {
        let a = g36(G_SPLIT - 1e-9);
        let b = g36(G_SPLIT + 1e-9);
        assert!((a - b).abs() < 1e-9);
    }
}
