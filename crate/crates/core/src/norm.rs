//! Grid evaluation of the Alexiewicz norm and its sup-norm equivalent.
//!
//! The oscillation `max_{α ≤ β ≤ α+2π} |F(β) − F(α)|` is taken over a uniform
//! grid on [-π, 3π] with a monotone-deque sliding window, the best pair is
//! polished by a local search, and the grid is doubled until two successive
//! values agree.

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::primitive::Primitive;

/// A norm value with its refinement history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    /// Change between the last two resolutions.
    pub error: f64,
    /// Intervals per period at the final resolution.
    pub resolution: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormOptions {
    pub grid: usize,
    pub max_grid: usize,
    pub rel_tol: f64,
}

impl NormOptions {
    pub fn with_grid(grid: usize) -> Self {
        NormOptions {
            grid: grid.max(16),
            max_grid: (1 << 18).max(grid),
            rel_tol: 1e-6,
        }
    }
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions::with_grid(crate::primitive::DEFAULT_GRID)
    }
}

struct Samples {
    h: f64,
    values: Vec<C64>,
    /// sup of the samples, for round-off floors
    scale: f64,
}

fn sample(p: &Primitive, n: usize) -> Samples {
    let h = 2.0 * PI / n as f64;
    let mut values: Vec<C64> = (0..=n)
        .into_par_iter()
        .map(|i| p.eval(if i == n { PI } else { -PI + h * i as f64 }))
        .collect();
    let d = p.drift();
    for i in 1..=n {
        let v = values[i] + d;
        values.push(v);
    }
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Samples { h, values, scale }
}

/// Largest `|v[j] − v[i]|` over `i ≤ n`, `i ≤ j ≤ i + n` for real data.
fn window(values: &[f64], n: usize) -> (f64, usize, usize) {
    fn push(q: &mut VecDeque<usize>, values: &[f64], j: usize, keep_max: bool) {
        while let Some(&b) = q.back() {
            let dominated = if keep_max { values[j] >= values[b] } else { values[j] <= values[b] };
            if !dominated {
                break;
            }
            q.pop_back();
        }
        q.push_back(j);
    }
    let mut maxq: VecDeque<usize> = VecDeque::with_capacity(n + 1);
    let mut minq: VecDeque<usize> = VecDeque::with_capacity(n + 1);
    let mut best = (0.0, 0, 0);
    for j in 0..=n {
        push(&mut maxq, values, j, true);
        push(&mut minq, values, j, false);
    }
    for i in 0..=n {
        if i > 0 {
            push(&mut maxq, values, i + n, true);
            push(&mut minq, values, i + n, false);
        }
        while *maxq.front().unwrap() < i {
            maxq.pop_front();
        }
        while *minq.front().unwrap() < i {
            minq.pop_front();
        }
        let hi = *maxq.front().unwrap();
        let lo = *minq.front().unwrap();
        let up = values[hi] - values[i];
        let down = values[i] - values[lo];
        if up > best.0 {
            best = (up, i, hi);
        }
        if down > best.0 {
            best = (down, i, lo);
        }
    }
    best
}

fn projected(values: &[C64], theta: f64) -> Vec<f64> {
    let (s, c) = theta.sin_cos();
    values.iter().map(|v| v.re * c + v.im * s).collect()
}

fn is_effectively_real(p: &Primitive, s: &Samples) -> bool {
    p.is_real() || s.values.iter().all(|v| v.im.abs() <= 1e-14 * s.scale.max(f64::MIN_POSITIVE))
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Local improvement of a grid pair `(α, β)` for `|F(β) − F(α)|`.
fn polish(p: &Primitive, alpha: f64, beta: f64, h: f64) -> f64 {
    let mut a = alpha;
    let mut b = beta;
    let mut best = (p.ext(b) - p.ext(a)).norm();
    if (b - a).abs() >= 2.0 * PI - 0.5 * h {
        return best;
    }
    for _ in 0..3 {
        let fb = p.ext(b);
        let lo = (b - 2.0 * PI).max(a - h);
        let (na, va) = golden_max(&|x| (fb - p.ext(x)).norm(), lo, a + h, 48);
        if va > best {
            best = va;
            a = na;
        }
        let fa = p.ext(a);
        let hi = (a + 2.0 * PI).min(b + h);
        let (nb, vb) = golden_max(&|x| (p.ext(x) - fa).norm(), b - h, hi, 48);
        if vb > best {
            best = vb;
            b = nb;
        }
    }
    best
}

fn alexiewicz_at(p: &Primitive, n: usize) -> (f64, f64) {
    let s = sample(p, n);
    if is_effectively_real(p, &s) {
        let re: Vec<f64> = s.values.iter().map(|v| v.re).collect();
        let (v, i, j) = window(&re, n);
        let (i, j) = (i.min(j), i.max(j));
        let polished = polish(p, -PI + s.h * i as f64, -PI + s.h * j as f64, s.h);
        return (v.max(polished), s.scale);
    }
    // |z| = max over directions θ of the projection Re(e^{-iθ} z); the
    // direction is located on a decimated grid, the pair on the full one
    const COARSE: usize = 48;
    const SEARCH: usize = 4096;
    let stride = (n / SEARCH).max(1);
    let m = n / stride;
    let thin: Vec<C64> = (0..=2 * m).map(|k| s.values[k * stride]).collect();
    let search_dir = |theta: f64| window(&projected(&thin, theta), m).0;
    let coarse: Vec<(f64, f64)> = (0..COARSE)
        .into_par_iter()
        .map(|k| {
            let t = PI * k as f64 / COARSE as f64;
            (t, search_dir(t))
        })
        .collect();
    let (t0, _) = coarse.iter().copied().fold((0.0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
    let step = PI / COARSE as f64;
    // the projection error is quadratic in the angle; 24 steps leave ~1e-11
    let (theta, _) = golden_max(&search_dir, t0 - step, t0 + step, 24);
    let (_, i, j) = window(&projected(&s.values, theta), n);
    let (i, j) = (i.min(j), i.max(j));
    let grid_val = (s.values[j] - s.values[i]).norm();
    let polished = polish(p, -PI + s.h * i as f64, -PI + s.h * j as f64, s.h);
    (grid_val.max(polished), s.scale)
}

fn sup_at(p: &Primitive, n: usize) -> (f64, f64) {
    let s = sample(p, n);
    let (i, v) = s.values[..=n]
        .iter()
        .enumerate()
        .map(|(i, v)| (i, v.norm()))
        .fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    let x = -PI + s.h * i as f64;
    let lo = (x - s.h).max(-PI);
    let hi = (x + s.h).min(PI);
    let (_, pv) = golden_max(&|t| p.eval(t).norm(), lo, hi, 48);
    (v.max(pv), s.scale)
}

/// Changes below this are cancellation noise, as when a difference of
/// unit-size primitives vanishes identically.
const NOISE_FLOOR: f64 = 1e-14;

fn refine(p: &Primitive, opts: NormOptions, what: &'static str, at: fn(&Primitive, usize) -> (f64, f64)) -> Result<NormEstimate> {
    let mut n = opts.grid.max(16);
    let (mut prev, _) = at(p, n);
    loop {
        let next_n = 2 * n;
        let (cur, scale) = at(p, next_n);
        let value = prev.max(cur);
        let diff = (cur - prev).abs();
        if diff <= opts.rel_tol * value + 64.0 * f64::EPSILON * scale + NOISE_FLOOR {
            return Ok(NormEstimate {
                value,
                error: diff,
                resolution: next_n,
            });
        }
        if next_n >= opts.max_grid {
            return Err(Error::NotConverged {
                what,
                best: value,
                error: diff,
            });
        }
        prev = value;
        n = next_n;
    }
}

pub fn alexiewicz(p: &Primitive, opts: NormOptions) -> Result<NormEstimate> {
    refine(p, opts, "Alexiewicz norm", alexiewicz_at)
}

pub fn sup_abs(p: &Primitive, opts: NormOptions) -> Result<NormEstimate> {
    refine(p, opts, "equivalent norm", sup_at)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_finds_largest_rise_and_fall() {
        // n = 2: windows of three samples
        let v = [0.0, 3.0, 1.0, -2.0, 5.0];
        let (best, i, j) = window(&v, 2);
        assert_eq!(best, 5.0);
        assert_eq!((i, j), (1, 3));
    }

    #[test]
    fn line_norm_is_two_pi() {
        let p = Primitive::from_real_fn(|x| x + PI).unwrap();
        let e = alexiewicz(&p, NormOptions::with_grid(64)).unwrap();
        assert!((e.value - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn complex_exponential_norm() {
        let j = 3.0;
        let p = Primitive::from_fn(move |x| {
            (C64::new(0.0, j * x).exp() - C64::new(0.0, -j * PI).exp()) / C64::new(0.0, j)
        })
        .unwrap();
        let e = alexiewicz(&p, NormOptions::with_grid(1024)).unwrap();
        assert!((e.value - 2.0 / j).abs() < 1e-9, "{}", e.value);
    }
}
