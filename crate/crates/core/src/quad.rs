//! Quadrature building blocks: Gauss-Legendre, adaptive Gauss-Kronrod and an
//! accelerated rule for endpoint oscillations of the form `sin(c·τ^-p)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn gauss_legendre(n: usize) -> Rule {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Rule { nodes, weights }
    }

    pub fn apply<F: Fn(f64) -> C64 + ?Sized>(&self, f: &F, a: f64, b: f64) -> C64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut s = C64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += f(c + h * x) * *w;
        }
        s * h
    }

    /// Composite rule on `panels` equal panels.
    pub fn composite<F: Fn(f64) -> C64 + ?Sized>(&self, f: &F, a: f64, b: f64, panels: usize) -> C64 {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|k| {
                let l = a + h * k as f64;
                let r = if k + 1 == panels { b } else { l + h };
                self.apply(f, l, r)
            })
            .sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

pub fn gl16() -> &'static Rule {
    static R: OnceLock<Rule> = OnceLock::new();
    R.get_or_init(|| Rule::gauss_legendre(16))
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Panel {
    a: f64,
    b: f64,
    value: C64,
    error: f64,
}

fn gk15<F: Fn(f64) -> C64 + ?Sized>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut abs = fc.norm() * WGK[7];
    for j in 0..7 {
        let d = h * XGK[j];
        let s = f(c - d) + f(c + d);
        k += s * WGK[j];
        abs += (f(c - d).norm() + f(c + d).norm()) * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    let value = k * h;
    let raw = ((k - g) * h).norm();
    let floor = 50.0 * f64::EPSILON * abs * h.abs();
    Panel {
        a,
        b,
        value,
        error: raw.max(floor),
    }
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// Requested accuracy: stop once the error estimate is below
/// `max(abs, rel·|I|)`. `density` is the number of starting panels per unit
/// length and `max_panels` caps the bisections on top of them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
    pub density: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            max_panels: 4000,
            density: 1.0,
        }
    }

    pub fn with_density(self, density: f64) -> Self {
        Tolerance { density, ..self }
    }

    pub fn panels(&self, a: f64, b: f64) -> usize {
        ((b - a).abs() * self.density).ceil().clamp(1.0, 1e7) as usize
    }

    pub fn split(self, parts: usize) -> Self {
        Tolerance {
            abs: self.abs / parts.max(1) as f64,
            ..self
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-11, 1e-10)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: C64,
    pub error: f64,
    pub converged: bool,
}

impl Estimate {
    pub fn exact(value: C64) -> Self {
        Estimate {
            value,
            error: 0.0,
            converged: true,
        }
    }

    pub fn zero() -> Self {
        Self::exact(C64::new(0.0, 0.0))
    }

    pub fn scale(self, c: C64) -> Self {
        Estimate {
            value: self.value * c,
            error: self.error * c.norm(),
            converged: self.converged,
        }
    }

    /// Turns a non-converged estimate into an error.
    pub fn certified(self, a: f64, b: f64) -> Result<C64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::Quadrature {
                a,
                b,
                best: self.value,
                error: self.error,
            })
        }
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, o: Estimate) -> Estimate {
        Estimate {
            value: self.value + o.value,
            error: self.error + o.error,
            converged: self.converged && o.converged,
        }
    }
}

impl std::ops::Sub for Estimate {
    type Output = Estimate;
    fn sub(self, o: Estimate) -> Estimate {
        self + o.scale(C64::new(-1.0, 0.0))
    }
}

impl std::iter::Sum for Estimate {
    fn sum<I: Iterator<Item = Estimate>>(iter: I) -> Estimate {
        iter.fold(Estimate::zero(), |a, b| a + b)
    }
}

/// Globally adaptive Gauss-Kronrod 7/15 quadrature starting from `panels`
/// equal panels.
pub fn adaptive<F: Fn(f64) -> C64 + ?Sized>(f: &F, a: f64, b: f64, panels: usize, tol: Tolerance) -> Estimate {
    if a == b {
        return Estimate::zero();
    }
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut heap = BinaryHeap::with_capacity(2 * panels + 16);
    let mut settled = Vec::new();
    for k in 0..panels {
        let l = a + h * k as f64;
        let r = if k + 1 == panels { b } else { l + h };
        heap.push(gk15(f, l, r));
    }
    let total = |heap: &BinaryHeap<Panel>, settled: &[Panel]| -> (C64, f64) {
        let mut v = C64::new(0.0, 0.0);
        let mut e = 0.0;
        for p in heap.iter().chain(settled.iter()) {
            v += p.value;
            e += p.error;
        }
        (v, e)
    };
    let (mut value, mut error) = total(&heap, &settled);
    let mut count = panels;
    loop {
        let target = tol.abs.max(tol.rel * value.norm());
        if error <= target || count >= panels + tol.max_panels {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let m = 0.5 * (worst.a + worst.b);
        let width = (worst.b - worst.a).abs();
        if width <= 8.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()).max(1e-300) || m == worst.a || m == worst.b {
            settled.push(worst);
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let l = gk15(f, worst.a, m);
        let r = gk15(f, m, worst.b);
        value += l.value + r.value - worst.value;
        error += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
        count += 1;
        if count % 64 == 0 {
            (value, error) = total(&heap, &settled);
        }
    }
    (value, error) = total(&heap, &settled);
    let target = tol.abs.max(tol.rel * value.norm());
    Estimate {
        value,
        error,
        converged: error <= target,
    }
}

/// Phase `scale·τ^-exponent` of an oscillation accumulating at τ = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillation {
    pub exponent: f64,
    pub scale: f64,
}

/// `∫_0^len h(τ) dτ` for `h` oscillating like `sin(scale·τ^-p)` as τ → 0.
///
/// After `u = scale·τ^-p` the oscillation has period 2π, so the integral
/// becomes an alternating series of half-period blocks, summed with
/// repeated averaging of the partial sums.
pub fn oscillatory_start<H: Fn(f64) -> C64 + ?Sized>(h: &H, len: f64, osc: Oscillation, tol: f64) -> Estimate {
    let p = osc.exponent;
    let c = osc.scale;
    let u0 = c * len.powf(-p);
    let tau = |u: f64| (u / c).powf(-1.0 / p);
    let k = |u: f64| {
        let t = tau(u);
        h(t) * (t / (p * u))
    };
    let rule = gl16();
    let mut partial: Vec<C64> = vec![C64::new(0.0, 0.0)];
    let extend = |partial: &mut Vec<C64>, upto: usize| {
        while partial.len() <= upto {
            let j = partial.len() - 1;
            let l = u0 + PI * j as f64;
            let blk = rule.apply(&k, l, l + PI);
            let last = *partial.last().unwrap();
            partial.push(last + blk);
        }
    };
    let averaged = |partial: &[C64], j: usize| -> C64 {
        let m = j.min(12);
        let mut acc = C64::new(0.0, 0.0);
        let mut binom = 1.0;
        for i in 0..=m {
            acc += partial[j - m + i] * binom;
            binom = binom * (m - i) as f64 / (i + 1) as f64;
        }
        acc / 2f64.powi(m as i32)
    };
    let mut j = 16usize;
    extend(&mut partial, j);
    let mut prev = averaged(&partial, j);
    let max_blocks = 1 << 15;
    loop {
        let next_j = 2 * j;
        extend(&mut partial, next_j);
        let cur = averaged(&partial, next_j);
        let diff = (cur - prev).norm();
        if diff <= tol || next_j >= max_blocks {
            return Estimate {
                value: cur,
                error: diff,
                converged: diff <= tol,
            };
        }
        prev = cur;
        j = next_j;
    }
}

/// `∫_a^b w` for a smooth weight.
pub fn smooth(w: &dyn Fn(f64) -> C64, a: f64, b: f64, tol: Tolerance) -> Estimate {
    adaptive(w, a, b, tol.panels(a, b), tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let r = Rule::gauss_legendre(16);
        let s: f64 = r.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let v = r.apply(&|x: f64| C64::new(x.powi(30), 0.0), 0.0, 1.0);
        assert!((v.re - 1.0 / 31.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let e = adaptive(&|x: f64| C64::new(x.sqrt().recip(), 0.0), 0.0, 1.0, 1, Tolerance::new(1e-10, 1e-10));
        assert!(e.converged);
        assert!((e.value.re - 2.0).abs() < 1e-9);
    }

    #[test]
    fn oscillatory_start_matches_closed_form() {
        // u = τ^-2 turns ∫_0^1 τ sin(τ^-2) dτ into ½∫_1^∞ sin(u)/u² du
        let e = oscillatory_start(
            &|t: f64| C64::new(t * (t.powi(-2)).sin(), 0.0),
            1.0,
            Oscillation { exponent: 2.0, scale: 1.0 },
            1e-12,
        );
        // ½∫_1^∞ sin u/u² du = ½(sin 1 − Ci(1)), Ci(1) = 0.337403922900968
        let expect = 0.5 * (1f64.sin() - 0.337_403_922_900_968_1);
        assert!(e.converged);
        assert!((e.value.re - expect).abs() < 1e-11, "{} vs {}", e.value.re, expect);
    }
}
