//! Convolution `f∗g(x) = ∫ f(x−y) g(y) dy` of a distribution with a BV or an
//! integrable function.
//!
//! For BV `g` an integration by parts over `(c, c+2π]` gives
//! `f∗g(x) = F(π)·g(c+) + ∫_{(c, c+2π]} F(x−y) dg(y)`, anchored here at the
//! first breakpoint `c = x_0`. For integrable `g` the convolution is the limit of
//! convolutions with dyadic cell averages.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::bv::{BvFunction, STIELTJES_TOL};
use crate::catalog::{build, CatalogName};
use crate::error::{finite, Error, Result};
use crate::fourier::{coeff, coefficient_tolerance, lenient};
use crate::primitive::{reduce, DistributionAc, Primitive};
use crate::quad::{self, gl16, Tolerance};
use crate::trig::TrigPoly;

const TWO_PI: f64 = 2.0 * PI;

/// A continuous periodic function sampled at `x_j = −π + 2πj/N`, linear in between.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicFunction {
    values: Vec<C64>,
}

impl PeriodicFunction {
    pub fn from_samples(values: Vec<C64>) -> Result<PeriodicFunction> {
        if values.len() < 2 {
            return Err(Error::InvalidParameter("need at least two samples".into()));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidParameter("samples must be finite".into()));
        }
        Ok(PeriodicFunction { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn step(&self) -> f64 {
        TWO_PI / self.values.len() as f64
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, C64)> + '_ {
        let h = self.step();
        self.values.iter().enumerate().map(move |(j, v)| (-PI + h * j as f64, *v))
    }

    pub fn eval(&self, x: f64) -> C64 {
        let n = self.values.len();
        let s = (reduce(x) + PI) / self.step();
        let j = (s.floor() as usize).min(n - 1);
        let w = s - j as f64;
        self.values[j] * (1.0 - w) + self.values[(j + 1) % n] * w
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// The running integral of the interpolant, as a primitive.
    pub fn to_distribution(&self) -> DistributionAc {
        let n = self.values.len();
        let h = self.step();
        let mut cum = Vec::with_capacity(n + 1);
        cum.push(C64::new(0.0, 0.0));
        for j in 0..n {
            let next = self.values[(j + 1) % n];
            cum.push(cum[j] + (self.values[j] + next) * (0.5 * h));
        }
        let vals = self.values.clone();
        let real = vals.iter().all(|v| v.im == 0.0);
        let eval = move |x: f64| {
            let s = ((x + PI) / h).clamp(0.0, n as f64);
            let j = (s.floor() as usize).min(n - 1);
            let u = x + PI - h * j as f64;
            let (a, b) = (vals[j], vals[(j + 1) % n]);
            cum[j] + a * u + (b - a) * (u * u / (2.0 * h))
        };
        let p = if real {
            Primitive::from_real_fn(move |x| eval(x).re)
        } else {
            Primitive::from_fn(eval)
        };
        p.expect("finite samples").with_grid_hint(n).into()
    }
}

/// `f∗g` for a distribution `f` and a BV function `g`.
#[derive(Debug, Clone)]
pub struct BvConvolution {
    f: Primitive,
    g: BvFunction,
    /// `F(π)·g(x_0+)`
    base: C64,
    /// `(y_i, jump)` with `y_0 = x_0 + 2π`
    jumps: Vec<(f64, f64)>,
    /// pieces whose derivative is not identically zero
    sloped: Vec<usize>,
}

impl BvConvolution {
    pub fn new(f: &DistributionAc, g: &BvFunction) -> BvConvolution {
        let f = f.primitive().clone();
        let bps = g.breakpoints();
        let base = f.drift() * g.right(0);
        let jumps = (0..bps.len())
            .filter(|&i| g.jump(i) != 0.0)
            .map(|i| (if i == 0 { bps[0] + TWO_PI } else { bps[i] }, g.jump(i)))
            .collect();
        let sloped = (0..bps.len()).filter(|&i| g.pieces()[i][1..].iter().any(|&c| c != 0.0)).collect();
        BvConvolution {
            f,
            g: g.clone(),
            base,
            jumps,
            sloped,
        }
    }

    /// `Σ_i ∫ F(x−y) g'(y) dy` over the pieces.
    pub fn smooth_part(&self, x: f64) -> Result<C64> {
        let mut total = C64::new(0.0, 0.0);
        for &i in &self.sloped {
            let xi = self.g.breakpoints()[i];
            let len = self.g.piece_len(i);
            let w = |t: f64| C64::new(self.g.piece_deriv(i, x - t - xi), 0.0);
            let (lo, hi) = (x - xi - len, x - xi);
            total += self.f.weighted(&w, lo, hi, STIELTJES_TOL).certified(lo, hi)?;
        }
        Ok(total)
    }

    pub fn eval(&self, x: f64) -> Result<C64> {
        finite(x)?;
        let jumps: C64 = self.jumps.iter().map(|&(y, j)| self.f.ext(x - y) * j).sum();
        Ok(self.base + jumps + self.smooth_part(x)?)
    }

    /// Values on `n` equally spaced points.
    pub fn sample(&self, n: usize) -> Result<PeriodicFunction> {
        let h = TWO_PI / n as f64;
        let values = (0..n)
            .into_par_iter()
            .map(|j| self.eval(-PI + h * j as f64))
            .collect::<Result<Vec<_>>>()?;
        PeriodicFunction::from_samples(values)
    }

    /// `∫_a^b f∗g(x)·w(x) dx`, integrating each jump term through `F` and
    /// the smooth part by adaptive quadrature in `x`.
    pub fn integrate_weighted(&self, w: &(dyn Fn(f64) -> C64 + Sync), a: f64, b: f64, tol: Tolerance) -> Result<C64> {
        finite(a)?;
        finite(b)?;
        let parts = self.jumps.len() + 2;
        let t = tol.split(parts);
        let mut total = self.base * quad::smooth(w, a, b, t).certified(a, b)?;
        for &(y, j) in &self.jumps {
            let moved = |s: f64| w(s + y);
            total += self.f.weighted(&moved, a - y, b - y, t).certified(a - y, b - y)? * j;
        }
        if !self.sloped.is_empty() {
            let s = |x: f64| self.smooth_part(x).unwrap_or(C64::new(f64::NAN, f64::NAN)) * w(x);
            let est = quad::adaptive(&s, a, b, t.panels(a, b), t);
            if !(est.value.re.is_finite() && est.value.im.is_finite()) {
                // surface the failing inner quadrature
                self.smooth_part(0.5 * (a + b))?;
                return Err(Error::Quadrature {
                    a,
                    b,
                    best: est.value,
                    error: est.error,
                });
            }
            total += est.certified(a, b)?;
        }
        Ok(total)
    }

    /// `∫_a^b f∗g`.
    pub fn integrate(&self, a: f64, b: f64) -> Result<C64> {
        let one = |_: f64| C64::new(1.0, 0.0);
        self.integrate_weighted(&one, a, b, Tolerance::new(1e-11, 1e-10).with_density(4.0))
    }

    /// `(f∗g)^(n)` for each `n`, by quadrature of the output. The smooth part
    /// is sampled once on a composite Gauss grid shared by all frequencies and
    /// compared against a grid of half the size for an error estimate.
    pub fn coefficients(&self, ns: &[i64]) -> Result<Vec<(C64, f64)>> {
        let top = ns.iter().map(|n| n.unsigned_abs()).max().unwrap_or(0) as usize;
        let panels = 32.max(4 * top).next_power_of_two();
        let (fine, coarse) = if self.sloped.is_empty() {
            (Vec::new(), Vec::new())
        } else {
            (self.smooth_nodes(panels)?, self.smooth_nodes(panels / 2)?)
        };
        ns.par_iter()
            .map(|&n| {
                let nf = n as f64;
                let e = move |x: f64| C64::from_polar(1.0, -nf * x);
                let mut c = if n == 0 { self.base * TWO_PI } else { C64::new(0.0, 0.0) };
                let tol = coefficient_tolerance(n);
                for &(y, j) in &self.jumps {
                    let moved = |s: f64| e(s + y);
                    c += self.f.weighted(&moved, -PI - y, PI - y, tol).certified(-PI - y, PI - y)? * j;
                }
                let mut err = 0.0;
                if !fine.is_empty() {
                    let sf = weighted_nodes(&fine, &e);
                    let sc = weighted_nodes(&coarse, &e);
                    c += sf;
                    err = (sf - sc).norm();
                }
                Ok((c, err))
            })
            .collect()
    }

    /// The smooth part at the nodes of composite GL16 on `panels` panels of [-π, π].
    fn smooth_nodes(&self, panels: usize) -> Result<Vec<(f64, C64)>> {
        let rule = gl16();
        let h = TWO_PI / panels as f64;
        let pts: Vec<(f64, f64)> = (0..panels)
            .flat_map(|k| {
                let c = -PI + h * (k as f64 + 0.5);
                rule.nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(move |(x, w)| (c + 0.5 * h * x, 0.5 * h * w))
            })
            .collect();
        pts.par_iter().map(|&(x, w)| Ok((x, self.smooth_part(x)? * w))).collect()
    }
}

fn weighted_nodes(nodes: &[(f64, C64)], e: &dyn Fn(f64) -> C64) -> C64 {
    nodes.iter().map(|&(x, v)| v * e(x)).sum()
}

/// Pointwise samples of `f∗g` on `n` points.
pub fn convolve_bv(f: &DistributionAc, g: &BvFunction, n: usize) -> Result<PeriodicFunction> {
    BvConvolution::new(f, g).sample(n)
}

/// `f∗p = Σ p_k f̂(k) e^{ikx}` for a trigonometric polynomial `p = Σ p_k e^{ikx}`.
pub fn convolve_trig(f: &DistributionAc, p: &TrigPoly) -> Result<TrigPoly> {
    let d = p.degree() as i64;
    let c = (-d..=d).into_par_iter().map(|k| coeff(f, k)).collect::<Result<Vec<_>>>()?;
    Ok(TrigPoly::from_fn(p.degree(), |k| p.coeff(k) * c[(k + d) as usize]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremRow {
    pub n: i64,
    /// `(f∗g)^(n)` by quadrature of the convolution
    pub lhs: C64,
    /// `f̂(n)·ĝ(n)`
    pub rhs: C64,
    pub gap: f64,
    /// quadrature error estimate of `lhs`
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub rows: Vec<TheoremRow>,
    pub max_gap: f64,
}

/// Compares `(f∗g)^(n)` with `f̂(n)ĝ(n)` for `|n| ≤ window`.
pub fn convolution_theorem_check(f: &DistributionAc, g: &BvFunction, window: usize) -> Result<TheoremReport> {
    let w = window as i64;
    let ns: Vec<i64> = (-w..=w).collect();
    let lhs = BvConvolution::new(f, g).coefficients(&ns)?;
    let rows = ns
        .par_iter()
        .zip(lhs)
        .map(|(&n, (l, error))| {
            let r = coeff(f, n)? * g.fourier_coeff(n);
            Ok(TheoremRow {
                n,
                lhs: l,
                rhs: r,
                gap: (l - r).norm(),
                error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_gap = rows.iter().map(|r| r.gap).fold(0.0, f64::max);
    Ok(TheoremReport { rows, max_gap })
}

/// `∫_a^b g(y)·(F(b−y) − F(a−y)) dy`, the other order of integration for
/// `∫_a^b f∗g`.
pub fn fubini_inner_first(f: &DistributionAc, g: &BvFunction, a: f64, b: f64) -> Result<C64> {
    let p = f.primitive();
    let mut total = C64::new(0.0, 0.0);
    for i in 0..g.piece_count() {
        if g.pieces()[i].iter().all(|&c| c == 0.0) {
            continue;
        }
        let xi = g.breakpoints()[i];
        let len = g.piece_len(i);
        for (end, sign) in [(b, 1.0), (a, -1.0)] {
            let w = |t: f64| C64::new(g.piece_value(i, end - t - xi), 0.0);
            let (lo, hi) = (end - xi - len, end - xi);
            total += p.weighted(&w, lo, hi, STIELTJES_TOL).certified(lo, hi)? * sign;
        }
    }
    Ok(total)
}

/// An integrable function given pointwise, with the points where it may be
/// discontinuous or unbounded.
#[derive(Clone)]
pub struct L1Function {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    breaks: Vec<f64>,
}

impl std::fmt::Debug for L1Function {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("L1Function").field("breaks", &self.breaks).finish_non_exhaustive()
    }
}

const CELL_TOL: Tolerance = Tolerance::new(1e-14, 1e-11);

impl L1Function {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static, breaks: &[f64]) -> L1Function {
        let mut breaks: Vec<f64> = breaks.iter().map(|&b| reduce(b)).collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        L1Function {
            eval: Arc::new(f),
            breaks,
        }
    }

    pub fn from_bv(g: &BvFunction) -> L1Function {
        let h = g.clone();
        L1Function::new(move |t| h.eval(t), g.breakpoints())
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(reduce(t))
    }

    /// `∫_a^b φ(g)` for `-π ≤ a < b ≤ π`. Each piece between breaks is split
    /// in half and each half mapped by `t = end ± s²`, which removes inverse
    /// square-root endpoint singularities.
    fn integral_of(&self, phi: &(dyn Fn(f64) -> f64 + Sync), a: f64, b: f64) -> Result<f64> {
        let mut cuts = vec![a];
        cuts.extend(self.breaks.iter().copied().filter(|&x| x > a && x < b));
        cuts.push(b);
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let (p, q) = (w[0], w[1]);
            let m = 0.5 * (p + q);
            for (end, half) in [(p, m - p), (q, m - q)] {
                let k = |v: f64| {
                    let t = end + half * v * v;
                    C64::new(phi((self.eval)(t)) * 2.0 * half.abs() * v, 0.0)
                };
                let est = quad::adaptive(&k, 0.0, 1.0, 2, CELL_TOL);
                if !est.value.re.is_finite() {
                    return Err(Error::InvalidParameter(format!("integrand is not finite on [{p}, {q}]")));
                }
                total += est.certified(p, q)?.re;
            }
        }
        Ok(total)
    }

    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        self.integral_of(&|v| v, a, b)
    }

    pub fn l1_norm(&self) -> Result<f64> {
        self.integral_of(&f64::abs, -PI, PI)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelRow {
    pub cells: usize,
    /// `‖f∗g_k − f∗g_{k+1}‖` with `g_{k+1}` on `cells` cells
    pub difference: f64,
}

#[derive(Debug, Clone)]
pub struct L1Convolution {
    pub distribution: DistributionAc,
    pub levels: Vec<LevelRow>,
    pub g_l1: f64,
    pub f_norm: f64,
    pub norm: f64,
    /// `‖f∗g‖ ≤ ‖f‖·‖g‖₁ + tol`
    pub bound_holds: bool,
}

/// Finest dyadic level tried.
pub const MAX_CELLS: usize = 1 << 16;
const MIN_CELLS: usize = 1 << 6;
/// Smallest output grid of [`convolve_l1`].
const WORKING_GRID: usize = 1 << 12;

/// Running integral of `f∗g_k` at the grid points, `g_k` the average of `g`
/// over `n` cells: `R_i = Σ_j c_j (Q(i−j) − Q(−j))` with `Q(m)` the integral of
/// `F` over `[(m−1)h, mh]`.
fn stepped_primitive(f: &Primitive, masses: &[f64]) -> Result<Vec<C64>> {
    let n = masses.len();
    let h = TWO_PI / n as f64;
    let one = |_: f64| C64::new(1.0, 0.0);
    let tol = Tolerance::new(1e-14, 1e-11);
    let q = (0..n)
        .into_par_iter()
        .map(|m| {
            let (lo, hi) = ((m as f64 - 1.0) * h, m as f64 * h);
            f.weighted(&one, lo, hi, tol).certified(lo, hi)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut a: Vec<C64> = masses.iter().map(|&m| C64::new(m / h, 0.0)).collect();
    let mut b = q;
    fwd.process(&mut a);
    fwd.process(&mut b);
    let mut conv: Vec<C64> = a.iter().zip(&b).map(|(x, y)| x * y / n as f64).collect();
    inv.process(&mut conv);
    // Q(m) for m < 0 is Q(m + n) − F(π)·h
    let drift = f.drift();
    let mut above = vec![0.0; n + 1];
    for j in (0..n).rev() {
        above[j] = above[j + 1] + masses[j];
    }
    let raw = |i: usize| conv[i] - drift * above[i + 1];
    let r0 = raw(0);
    let mut out: Vec<C64> = (0..n).map(|i| raw(i) - r0).collect();
    out.push(drift * above[0]);
    Ok(out)
}

fn grid_primitive(values: Vec<C64>) -> Primitive {
    let n = values.len() - 1;
    let h = TWO_PI / n as f64;
    let real = values.iter().all(|v| v.im == 0.0);
    let eval = move |x: f64| {
        let s = ((x + PI) / h).clamp(0.0, n as f64);
        let j = (s.floor() as usize).min(n - 1);
        let w = s - j as f64;
        values[j] * (1.0 - w) + values[j + 1] * w
    };
    if real {
        Primitive::from_real_fn(move |x| eval(x).re)
    } else {
        Primitive::from_fn(eval)
    }
    .expect("finite samples")
    .with_grid_hint(n)
}

/// `f∗g` for integrable `g`, as the limit of `f∗g_k` with `g_k` the averages
/// of `g` over `2^k` cells. Stops once two successive levels are within `tol`
/// in the Alexiewicz norm.
pub fn convolve_l1(f: &DistributionAc, g: &L1Function, tol: f64) -> Result<L1Convolution> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let masses = |n: usize| -> Result<Vec<f64>> {
        let h = TWO_PI / n as f64;
        (0..n)
            .into_par_iter()
            .map(|j| g.integral(-PI + h * j as f64, -PI + h * (j + 1) as f64))
            .collect()
    };
    let mut cells = MIN_CELLS;
    let mut prev = stepped_primitive(f.primitive(), &masses(cells)?)?;
    let mut levels = Vec::new();
    loop {
        let fine = masses(2 * cells)?;
        let next = stepped_primitive(f.primitive(), &fine)?;
        let diff: Vec<C64> = prev.iter().enumerate().map(|(i, v)| next[2 * i] - v).collect();
        let difference = lenient(DistributionAc::new(grid_primitive(diff)).alexiewicz_norm())?;
        cells *= 2;
        levels.push(LevelRow { cells, difference });
        if difference < tol {
            // the step function is constant on each cell, so splitting cells
            // evaluates the same convolution on a finer output grid
            let split = (WORKING_GRID / cells).max(1);
            let values = if split == 1 {
                next
            } else {
                let spread: Vec<f64> = fine.iter().flat_map(|&m| std::iter::repeat(m / split as f64).take(split)).collect();
                stepped_primitive(f.primitive(), &spread)?
            };
            let distribution = DistributionAc::new(grid_primitive(values));
            let g_l1 = g.l1_norm()?;
            let f_norm = lenient(f.alexiewicz_norm())?;
            let norm = lenient(distribution.alexiewicz_norm())?;
            return Ok(L1Convolution {
                distribution,
                levels,
                g_l1,
                f_norm,
                norm,
                bound_holds: norm <= f_norm * g_l1 + tol,
            });
        }
        if cells >= MAX_CELLS {
            return Err(Error::NotCauchy {
                diffs: levels.iter().map(|l| l.difference).collect(),
            });
        }
        prev = next;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DemoRow {
    pub n: usize,
    /// `‖f − f_n‖`
    pub dist_norm: f64,
    /// `(nπ)^{-1/2}`
    pub dist_bound: f64,
    /// `|∫_0^π g∗f_n| = ∫_{(nπ)^{-1/4}}^π sin²(t^{-4}) t^{-2} dt`, a lower bound for `‖g∗f_n‖`
    pub norm_lower: f64,
    /// `¼∫_{π^{-4}}^{nπ} x^{-3/4} sin²x dx`
    pub lower_bound: f64,
    /// `lower_bound / (½π^{1/4} n^{1/4})`
    pub ratio: f64,
}

fn integral_real(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> Result<f64> {
    let g = |x: f64| C64::new(f(x), 0.0);
    Ok(quad::adaptive(&g, a, b, panels, Tolerance::new(1e-12, 1e-11)).certified(a, b)?.re)
}

/// Rows showing that no bound `‖f∗g‖ ≤ k‖f‖‖g‖` holds on pairs of distributions:
/// `f_n → f` in norm while `‖g∗f_n‖` grows like `n^{1/4}`.
pub fn bilinear_unboundedness_demo(ns: &[usize]) -> Result<Vec<DemoRow>> {
    let big_f = build(CatalogName::Example36).distribution.into_primitive();
    ns.par_iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::InvalidParameter("n must be positive".into()));
            }
            let npi = n as f64 * PI;
            let cut = npi.powf(-0.25);
            let tail = {
                let p = big_f.clone();
                Primitive::from_real_fn(move |x| p.eval(x.min(cut)).re)?
            };
            let dist_norm = lenient(DistributionAc::new(tail).alexiewicz_norm())?;
            let lower_bound = 0.25
                * integral_real(|x| x.powf(-0.75) * x.sin().powi(2), PI.powi(-4), npi, 4 * n + 8)?;
            let phase_rate = 4.0 * npi.powf(1.25);
            let norm_lower = integral_real(
                |t| (t.powi(-4)).sin().powi(2) / (t * t),
                cut,
                PI,
                (phase_rate * (PI - cut) / 4.0).ceil() as usize + 8,
            )?;
            let c = 0.5 * PI.powf(0.25);
            Ok(DemoRow {
                n,
                dist_norm,
                dist_bound: npi.powf(-0.5),
                norm_lower,
                lower_bound,
                ratio: lower_bound / (c * (n as f64).powf(0.25)),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog;

    fn dist(name: &str) -> DistributionAc {
        catalog(name).unwrap().distribution
    }

    #[test]
    fn square_wave_gives_a_difference_of_primitives() {
        let g = BvFunction::indicator(0.0, PI).unwrap();
        for name in ["xsin", "osc:0.5", "cantor"] {
            let f = dist(name);
            let c = BvConvolution::new(&f, &g);
            for &x in &[-2.9, -0.4, 0.0, 0.8, 2.2] {
                let p = f.primitive();
                let expect = p.ext(x) - p.ext(x - PI);
                assert!((c.eval(x).unwrap() - expect).norm() < 1e-12, "{name} at {x}");
            }
        }
    }

    #[test]
    fn constant_and_cosine_multipliers() {
        let f = dist("exp:1");
        let avg = BvConvolution::new(&dist("weierstrass"), &BvFunction::constant(1.0 / (2.0 * PI)));
        let w = dist("weierstrass").primitive().drift() / (2.0 * PI);
        assert!((avg.eval(0.3).unwrap() - w).norm() < 1e-15);
        // ∫ e^{i(x−y)} cos y dy = π e^{ix}
        let c = BvConvolution::new(&f, &BvFunction::cos_mode(1));
        for &x in &[-1.0, 0.5, 3.0] {
            let v = c.eval(x).unwrap();
            assert!((v - C64::from_polar(PI, x)).norm() < 1e-8, "{x}: {v}");
        }
    }

    #[test]
    fn theorem_on_a_jump_multiplier() {
        let r = convolution_theorem_check(&dist("exp:1"), &BvFunction::indicator(0.0, PI).unwrap(), 4).unwrap();
        assert!(r.max_gap < 1e-9, "{}", r.max_gap);
    }

    #[test]
    fn fubini_orders_agree() {
        let f = dist("exp:2");
        let g = BvFunction::indicator(-1.0, 2.0).unwrap();
        let lhs = BvConvolution::new(&f, &g).integrate(-1.0, 1.0).unwrap();
        let rhs = fubini_inner_first(&f, &g, -1.0, 1.0).unwrap();
        assert!((lhs - rhs).norm() < 1e-10, "{lhs} {rhs}");
    }

    #[test]
    fn cell_integrals_handle_root_singularities() {
        let g = L1Function::new(|t| t.abs().powf(-0.5), &[0.0]);
        // ∫_{-π}^{π} |t|^{-1/2} = 4√π
        assert!((g.l1_norm().unwrap() - 4.0 * PI.sqrt()).abs() < 1e-10);
        assert!((g.integral(0.0, 1.0).unwrap() - 2.0).abs() < 1e-11);
    }

    #[test]
    fn stepped_primitive_matches_direct_sum() {
        let f = dist("osc:0.5");
        let n = 16;
        let masses: Vec<f64> = (0..n).map(|j| ((j * 7 % 5) as f64 - 2.0) * 0.1).collect();
        let r = stepped_primitive(f.primitive(), &masses).unwrap();
        let h = TWO_PI / n as f64;
        let p = f.primitive();
        let one = |_: f64| C64::new(1.0, 0.0);
        let phi = |lo: f64, hi: f64| p.weighted(&one, lo, hi, Tolerance::new(1e-14, 1e-12)).value;
        for i in [0, 3, 9, 16] {
            let x = -PI + h * i as f64;
            let mut s = C64::new(0.0, 0.0);
            for (j, m) in masses.iter().enumerate() {
                let (a, b) = (-PI + h * j as f64, -PI + h * (j + 1) as f64);
                // ∫_{-π}^{x} F(s − a) − F(s − b) ds
                s += (phi(-PI - a, x - a) - phi(-PI - b, x - b)) * (m / h);
            }
            assert!((r[i] - s).norm() < 1e-10, "{i}: {} vs {s}", r[i]);
        }
    }

    #[test]
    fn step_multiplier_is_stationary() {
        let f = dist("exp:1");
        let g = BvFunction::indicator(-PI / 2.0, PI / 4.0).unwrap();
        let out = convolve_l1(&f, &L1Function::from_bv(&g), 1e-9).unwrap();
        assert_eq!(out.levels.len(), 1);
        let sampled = convolve_bv(&f, &g, 1024).unwrap().to_distribution();
        let gap = out.distribution.sub(&sampled).alexiewicz_norm().unwrap();
        assert!(gap < 1e-4, "{gap}");
    }

    #[test]
    fn root_singularity_converges_within_the_bound() {
        let f = dist("exp:1");
        let g = L1Function::new(|t| t.abs().powf(-0.5), &[0.0]);
        let out = convolve_l1(&f, &g, 1e-6).unwrap();
        assert!(out.bound_holds);
        // exp:1 ∗ g = ĝ(1)·e^{ix}, ĝ(1) = 2∫_0^π t^{-1/2} cos t dt
        let ghat = 2.0 * integral_real(|u| 2.0 * (u * u).cos(), 0.0, PI.sqrt(), 64).unwrap();
        assert!((out.norm - 2.0 * ghat.abs()).abs() < 1e-4, "{} vs {}", out.norm, 2.0 * ghat);
    }

    #[test]
    fn demo_rows_grow() {
        let rows = bilinear_unboundedness_demo(&[4, 16, 64]).unwrap();
        for r in &rows {
            assert!(r.dist_norm <= r.dist_bound, "{r:?}");
            assert!((r.norm_lower - r.lower_bound).abs() < 1e-8 * r.lower_bound, "{r:?}");
            assert!(r.ratio > 0.5 && r.ratio < 2.0, "{r:?}");
        }
        assert!(rows.windows(2).all(|w| w[1].lower_bound > w[0].lower_bound));
    }
}
