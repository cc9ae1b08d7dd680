//! Periodic piecewise-cubic functions of bounded variation.
//!
//! Piece `i` lives on `[x_i, x_{i+1})` (the last one wraps to `x_0 + 2π`) and
//! is stored as a cubic in the local coordinate `u = t − x_i`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{finite, Error, Result};
use crate::primitive::{reduce, DistributionAc, Primitive};
use crate::quad::{gl16, Tolerance};
use crate::special::cos_sin_turns;

const TWO_PI: f64 = 2.0 * PI;

/// Accuracy of each weighted integral in the Stieltjes sums.
pub const STIELTJES_TOL: Tolerance = Tolerance::new(1e-13, 1e-11);

/// Largest interpolation error accepted for the trigonometric modes.
pub const MODE_ERROR: f64 = 1e-9;

type Cubic = [f64; 4];

fn horner(c: &Cubic, u: f64) -> f64 {
    ((c[3] * u + c[2]) * u + c[1]) * u + c[0]
}

fn deriv(c: &Cubic, u: f64) -> f64 {
    (3.0 * c[3] * u + 2.0 * c[2]) * u + c[1]
}

/// Coefficients of `u ↦ p(u + d)`.
fn taylor_shift(c: &Cubic, d: f64) -> Cubic {
    [horner(c, d), deriv(c, d), c[2] + 3.0 * c[3] * d, c[3]]
}

/// Zeros of `p'` strictly inside `(0, len)`, sorted.
fn critical_points(c: &Cubic, len: f64) -> Vec<f64> {
    let (a, b, q) = (3.0 * c[3], 2.0 * c[2], c[1]);
    let mut roots = Vec::with_capacity(2);
    let scale = a.abs().max(b.abs()).max(q.abs());
    if scale == 0.0 {
        return roots;
    }
    if a.abs() <= 1e-14 * scale {
        if b != 0.0 {
            roots.push(-q / b);
        }
    } else {
        let disc = b * b - 4.0 * a * q;
        if disc >= 0.0 {
            let s = disc.sqrt();
            let t = -0.5 * (b + b.signum() * s + if b == 0.0 { s } else { 0.0 });
            if t != 0.0 {
                roots.push(t / a);
                roots.push(q / t);
            } else {
                roots.push(0.0);
            }
        }
    }
    roots.retain(|&r| r > 0.0 && r < len);
    roots.sort_by(f64::total_cmp);
    roots.dedup();
    roots
}

/// Total variation, sup norm and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VariationReport {
    pub variation: f64,
    pub sup_norm: f64,
    pub bv_norm: f64,
}

/// Quantities in the Hölder chain `|∫fg| ≤ |∫f|·inf|g| + ‖f‖·Vg ≤ ‖f‖·‖g‖_BV`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderReport {
    pub lhs: f64,
    pub mid: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl HolderReport {
    /// `min(mid − lhs, rhs − mid)`.
    pub fn slack(&self) -> f64 {
        (self.mid - self.lhs).min(self.rhs - self.mid)
    }
}

/// A real periodic piecewise-cubic function with finitely many jumps.
#[derive(Debug, Clone, PartialEq)]
pub struct BvFunction {
    breakpoints: Vec<f64>,
    pieces: Vec<Cubic>,
    lambda: f64,
}

impl BvFunction {
    /// `breakpoints` must be strictly increasing in [-π, π).
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Cubic>, lambda: f64) -> Result<BvFunction> {
        if breakpoints.is_empty() {
            return Err(Error::InvalidBv("at least one breakpoint is required".into()));
        }
        if breakpoints.len() != pieces.len() {
            return Err(Error::InvalidBv(format!(
                "{} breakpoints but {} pieces",
                breakpoints.len(),
                pieces.len()
            )));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidBv(format!("lambda must lie in [0, 1], got {lambda}")));
        }
        for (i, &x) in breakpoints.iter().enumerate() {
            if !x.is_finite() || !(-PI..PI).contains(&x) {
                return Err(Error::InvalidBv(format!("breakpoint {x} is outside [-π, π)")));
            }
            if i > 0 && x <= breakpoints[i - 1] {
                return Err(Error::InvalidBv("breakpoints must be strictly increasing".into()));
            }
        }
        if pieces.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidBv("piece coefficients must be finite".into()));
        }
        Ok(BvFunction {
            breakpoints,
            pieces,
            lambda,
        })
    }

    pub fn constant(c: f64) -> BvFunction {
        BvFunction::new(vec![-PI], vec![[c, 0.0, 0.0, 0.0]], 0.5).expect("valid constant")
    }

    /// Periodic indicator of `(a, b)` for `-π ≤ a < b ≤ π`.
    pub fn indicator(a: f64, b: f64) -> Result<BvFunction> {
        if !(a.is_finite() && b.is_finite() && -PI <= a && a < b && b <= PI) {
            return Err(Error::InvalidBv(format!("indicator needs -π ≤ a < b ≤ π, got ({a}, {b})")));
        }
        if a == -PI && b == PI {
            return Ok(BvFunction::constant(1.0));
        }
        let b = reduce(b);
        let one = [1.0, 0.0, 0.0, 0.0];
        let zero = [0.0; 4];
        if a < b {
            BvFunction::new(vec![a, b], vec![one, zero], 0.5)
        } else {
            BvFunction::new(vec![b, a], vec![zero, one], 0.5)
        }
    }

    /// Piecewise constant with `values[i]` on `[breakpoints[i], breakpoints[i+1])`.
    pub fn step(breakpoints: Vec<f64>, values: &[f64]) -> Result<BvFunction> {
        let pieces = values.iter().map(|&v| [v, 0.0, 0.0, 0.0]).collect();
        BvFunction::new(breakpoints, pieces, 0.5)
    }

    /// Cubic Hermite interpolant of a smooth periodic `f` on `n` equal pieces.
    pub fn hermite(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, n: usize) -> Result<BvFunction> {
        let n = n.max(1);
        let h = TWO_PI / n as f64;
        let nodes: Vec<f64> = (0..=n).map(|j| if j == n { PI } else { -PI + h * j as f64 }).collect();
        let vals: Vec<(f64, f64)> = nodes.iter().map(|&t| (f(t), df(t))).collect();
        Self::from_hermite_data(nodes, vals)
    }

    fn from_hermite_data(nodes: Vec<f64>, vals: Vec<(f64, f64)>) -> Result<BvFunction> {
        let n = nodes.len() - 1;
        let mut pieces = Vec::with_capacity(n);
        for j in 0..n {
            let h = nodes[j + 1] - nodes[j];
            let (y0, d0) = vals[j];
            let (y1, d1) = vals[j + 1];
            let s = (y1 - y0) / h;
            pieces.push([y0, d0, (3.0 * s - 2.0 * d0 - d1) / h, (d0 + d1 - 2.0 * s) / (h * h)]);
        }
        BvFunction::new(nodes[..n].to_vec(), pieces, 0.5)
    }

    /// Pieces needed so that the Hermite interpolant of `sin(kt)` is within
    /// [`MODE_ERROR`]: the error is at most `h⁴k⁴/384`.
    fn mode_pieces(k: u64) -> usize {
        let hk = (384.0 * MODE_ERROR).powf(0.25);
        ((TWO_PI * k as f64 / hk).ceil() as usize).max(4)
    }

    fn mode(k: u64, cosine: bool) -> BvFunction {
        if k == 0 {
            return BvFunction::constant(if cosine { 1.0 } else { 0.0 });
        }
        let n = Self::mode_pieces(k);
        // sample at the exact period fractions j/n so the ends match
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let kf = k as f64;
        let nodes: Vec<f64> = (0..=n).map(|j| if j == n { PI } else { -PI + TWO_PI * j as f64 / n as f64 }).collect();
        let vals = (0..=n)
            .map(|j| {
                let (c, s) = cos_sin_turns(k, j as f64 / n as f64);
                let (c, s) = (sign * c, sign * s);
                if cosine {
                    (c, -kf * s)
                } else {
                    (s, kf * c)
                }
            })
            .collect();
        Self::from_hermite_data(nodes, vals).expect("valid mode")
    }

    /// Piecewise-cubic `sin(kt)` with error below [`MODE_ERROR`].
    pub fn sin_mode(k: u64) -> BvFunction {
        Self::mode(k, false)
    }

    /// Piecewise-cubic `cos(kt)` with error below [`MODE_ERROR`].
    pub fn cos_mode(k: u64) -> BvFunction {
        Self::mode(k, true)
    }

    pub fn with_lambda(mut self, lambda: f64) -> Result<BvFunction> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidBv(format!("lambda must lie in [0, 1], got {lambda}")));
        }
        self.lambda = lambda;
        Ok(self)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[[f64; 4]] {
        &self.pieces
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub(crate) fn piece_len(&self, i: usize) -> f64 {
        let m = self.breakpoints.len();
        if i + 1 < m {
            self.breakpoints[i + 1] - self.breakpoints[i]
        } else {
            self.breakpoints[0] + TWO_PI - self.breakpoints[i]
        }
    }

    /// `g(x_i+)`
    pub fn right(&self, i: usize) -> f64 {
        self.pieces[i][0]
    }

    /// `g(x_i−)`
    pub fn left(&self, i: usize) -> f64 {
        let j = if i == 0 { self.pieces.len() - 1 } else { i - 1 };
        horner(&self.pieces[j], self.piece_len(j))
    }

    pub fn jump(&self, i: usize) -> f64 {
        self.right(i) - self.left(i)
    }

    /// Piece index and local coordinate of `t`, taken from the right at breakpoints.
    pub(crate) fn locate(&self, t: f64) -> (usize, f64) {
        let t = reduce(t);
        let k = self.breakpoints.partition_point(|&x| x <= t);
        if k == 0 {
            let last = self.breakpoints.len() - 1;
            (last, t + TWO_PI - self.breakpoints[last])
        } else {
            (k - 1, t - self.breakpoints[k - 1])
        }
    }

    /// Pointwise value, `(1−λ)g(x−) + λg(x+)` at breakpoints.
    pub fn eval(&self, t: f64) -> f64 {
        let (i, u) = self.locate(t);
        if u == 0.0 {
            (1.0 - self.lambda) * self.left(i) + self.lambda * self.right(i)
        } else {
            horner(&self.pieces[i], u)
        }
    }

    /// `g(t+)`
    pub fn eval_right(&self, t: f64) -> f64 {
        let (i, u) = self.locate(t);
        horner(&self.pieces[i], u)
    }

    /// `g'(t)` away from breakpoints (right derivative at them).
    pub fn derivative(&self, t: f64) -> f64 {
        let (i, u) = self.locate(t);
        deriv(&self.pieces[i], u)
    }

    pub(crate) fn piece_deriv(&self, i: usize, u: f64) -> f64 {
        deriv(&self.pieces[i], u)
    }

    pub(crate) fn piece_value(&self, i: usize, u: f64) -> f64 {
        horner(&self.pieces[i], u)
    }

    /// Values of piece `i` at its ends and interior critical points.
    fn extremal_values(&self, i: usize) -> Vec<f64> {
        let c = &self.pieces[i];
        let len = self.piece_len(i);
        let mut us = vec![0.0];
        us.extend(critical_points(c, len));
        us.push(len);
        us.iter().map(|&u| horner(c, u)).collect()
    }

    pub fn variation(&self) -> VariationReport {
        let mut var = 0.0;
        let mut sup = 0.0f64;
        for i in 0..self.pieces.len() {
            let v = self.extremal_values(i);
            var += v.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>();
            sup = v.iter().fold(sup, |s, x| s.max(x.abs()));
            var += self.jump(i).abs();
        }
        VariationReport {
            variation: var,
            sup_norm: sup,
            bv_norm: var + sup,
        }
    }

    /// `inf |g(t)|` over pointwise values.
    pub fn inf_abs(&self) -> f64 {
        let mut inf = f64::INFINITY;
        for i in 0..self.pieces.len() {
            let v = self.extremal_values(i);
            for w in v.windows(2) {
                if w[0].signum() != w[1].signum() || w[0] == 0.0 || w[1] == 0.0 {
                    return 0.0;
                }
                inf = inf.min(w[0].abs()).min(w[1].abs());
            }
            let at = (1.0 - self.lambda) * self.left(i) + self.lambda * self.right(i);
            inf = inf.min(at.abs());
        }
        inf
    }

    /// `ĝ(n) = ∫ g(t) e^{-int} dt`.
    pub fn fourier_coeff(&self, n: i64) -> C64 {
        let rule = gl16();
        let nf = n as f64;
        let mut total = C64::new(0.0, 0.0);
        for (i, c) in self.pieces.iter().enumerate() {
            let x = self.breakpoints[i];
            let len = self.piece_len(i);
            let panels = 1 + (nf.abs() * len / 2.0).ceil() as usize;
            let start = C64::from_polar(1.0, -nf * x);
            let f = |u: f64| C64::from_polar(horner(c, u), -nf * u);
            total += start * rule.composite(&f, 0.0, len, panels);
        }
        total
    }

    /// `t ↦ g(nt)` for `n ≥ 1`.
    pub fn dilate(&self, n: u32) -> Result<BvFunction> {
        if n == 0 {
            return Err(Error::InvalidParameter("dilation factor must be positive".into()));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let nf = n as f64;
        let mut parts: Vec<(f64, Cubic)> = Vec::with_capacity(self.pieces.len() * n as usize);
        for j in 0..n {
            for (i, c) in self.pieces.iter().enumerate() {
                let start = reduce((self.breakpoints[i] + TWO_PI * j as f64) / nf);
                let mut q = *c;
                let mut s = 1.0;
                for coef in q.iter_mut() {
                    *coef *= s;
                    s *= nf;
                }
                parts.push((start, q));
            }
        }
        parts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (bps, pieces) = parts.into_iter().unzip();
        BvFunction::new(bps, pieces, self.lambda)
    }

    /// `a·self + b·other` on the merged breakpoint set.
    pub fn lin(&self, a: f64, other: &BvFunction, b: f64) -> BvFunction {
        let mut bps: Vec<f64> = self.breakpoints.iter().chain(other.breakpoints.iter()).copied().collect();
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        let pieces = self
            .resample(&bps)
            .iter()
            .zip(other.resample(&bps))
            .map(|(p, q)| std::array::from_fn(|k| a * p[k] + b * q[k]))
            .collect();
        BvFunction::new(bps, pieces, self.lambda).expect("merged breakpoints are valid")
    }

    pub fn add(&self, other: &BvFunction) -> BvFunction {
        self.lin(1.0, other, 1.0)
    }

    pub fn scale(&self, c: f64) -> BvFunction {
        let mut out = self.clone();
        for p in out.pieces.iter_mut() {
            for x in p.iter_mut() {
                *x *= c;
            }
        }
        out
    }

    /// Copy with an extra breakpoint at `t`, which changes nothing about the function.
    pub fn refine_at(&self, t: f64) -> BvFunction {
        let mut bps = self.breakpoints.clone();
        bps.push(reduce(t));
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        let pieces = self.resample(&bps);
        BvFunction::new(bps, pieces, self.lambda).expect("refined breakpoints are valid")
    }

    /// Pieces of `self` re-expressed on a finer breakpoint set.
    fn resample(&self, bps: &[f64]) -> Vec<Cubic> {
        bps.iter()
            .map(|&z| {
                let (i, u) = self.locate(z);
                taylor_shift(&self.pieces[i], u)
            })
            .collect()
    }

    /// Each copy `x_i + 2πm` of a breakpoint and each piece restricted to
    /// `[a, b]`, as `(piece, copy start, lo, hi)`.
    fn segments(&self, a: f64, b: f64) -> Vec<(usize, f64, f64, f64)> {
        let x0 = self.breakpoints[0];
        let m0 = ((a - x0) / TWO_PI).floor() as i64 - 1;
        let m1 = ((b - x0) / TWO_PI).floor() as i64 + 1;
        let mut out = Vec::new();
        for m in m0..=m1 {
            for i in 0..self.pieces.len() {
                let start = self.breakpoints[i] + TWO_PI * m as f64;
                let end = start + self.piece_len(i);
                let lo = a.max(start);
                let hi = b.min(end);
                if lo < hi || (start > a && start <= b) {
                    out.push((i, start, lo, hi));
                }
            }
        }
        out
    }
}

/// `∫_{(a,b]} F dg`: the smooth part `∫F·g'` plus the jumps `F(x)·(g(x+)−g(x−))`
/// for breakpoints `a < x ≤ b`.
pub fn stieltjes(f: &Primitive, g: &BvFunction, a: f64, b: f64) -> Result<C64> {
    finite(a)?;
    finite(b)?;
    if a == b {
        return Ok(C64::new(0.0, 0.0));
    }
    if a > b {
        return Ok(-stieltjes(f, g, b, a)?);
    }
    let mut total = C64::new(0.0, 0.0);
    for (i, start, lo, hi) in g.segments(a, b) {
        if start > a && start <= b {
            let j = g.jump(i);
            if j != 0.0 {
                total += f.ext(start) * j;
            }
        }
        if lo < hi && g.pieces[i][1..].iter().any(|&c| c != 0.0) {
            let w = |t: f64| C64::new(g.piece_deriv(i, t - start), 0.0);
            total += f.weighted(&w, lo, hi, STIELTJES_TOL).certified(lo, hi)?;
        }
    }
    Ok(total)
}

/// Primitive `H(x) = F(x)·g(x+) − ∫_{(−π,x]} F dg` of the product `fg`.
struct Product {
    f: Primitive,
    g: BvFunction,
    /// `∫_{(−π, x_i]} F dg` for each breakpoint above -π
    cumulative: Vec<C64>,
    /// value at π, jump at `x_0 + 2π` included
    full: C64,
}

impl Product {
    fn new(f: Primitive, g: BvFunction) -> Result<Product> {
        let cumulative = g
            .breakpoints
            .iter()
            .map(|&x| if x == -PI { Ok(C64::new(0.0, 0.0)) } else { stieltjes(&f, &g, -PI, x) })
            .collect::<Result<Vec<_>>>()?;
        let full = stieltjes(&f, &g, -PI, PI)?;
        Ok(Product {
            f,
            g,
            cumulative,
            full,
        })
    }

    fn eval(&self, x: f64) -> Result<C64> {
        if x >= PI {
            return Ok(self.f.eval(PI) * self.g.eval_right(PI) - self.full);
        }
        let k = self.g.breakpoints.partition_point(|&b| b <= x);
        let s = if k == 0 {
            stieltjes(&self.f, &self.g, -PI, x)?
        } else {
            let xi = self.g.breakpoints[k - 1];
            let i = k - 1;
            let w = |t: f64| C64::new(self.g.piece_deriv(i, t - xi), 0.0);
            self.cumulative[i] + self.f.weighted(&w, xi, x, STIELTJES_TOL).certified(xi, x)?
        };
        Ok(self.f.eval(x) * self.g.eval_right(x) - s)
    }
}

/// The product `fg` as a distribution, through its primitive.
pub fn multiply_bv(f: &DistributionAc, g: &BvFunction) -> Result<DistributionAc> {
    let prod = Product::new(f.primitive().clone(), g.clone())?;
    // certify every point the constructor touches up front
    prod.eval(-PI)?;
    let real = f.primitive().is_real();
    let grid = f.primitive().grid_hint();
    let eval = move |x: f64| prod.eval(x).unwrap_or(C64::new(f64::NAN, f64::NAN));
    let p = if real {
        Primitive::from_real_fn(move |x| eval(x).re)?
    } else {
        Primitive::from_fn(eval)?
    };
    Ok(p.with_grid_hint(grid).into())
}

/// `∫_{-π}^{π} fg = F(π)·g(π+) − ∫_{(−π,π]} F dg`.
pub fn integrate_product(f: &DistributionAc, g: &BvFunction) -> Result<C64> {
    let p = f.primitive();
    Ok(p.eval(PI) * g.eval_right(PI) - stieltjes(p, g, -PI, PI)?)
}

/// Checks the Hölder chain for `f` and `g`. `tol` is relative to `rhs`.
pub fn holder_check(f: &DistributionAc, g: &BvFunction, tol: f64) -> Result<HolderReport> {
    let lhs = integrate_product(f, g)?.norm();
    let norm = f.alexiewicz_norm()?;
    let var = g.variation();
    let mid = f.primitive().drift().norm() * g.inf_abs() + norm * var.variation;
    let rhs = norm * var.bv_norm;
    let slack = tol * rhs.max(1.0);
    Ok(HolderReport {
        lhs,
        mid,
        rhs,
        holds: lhs <= mid + slack && mid <= rhs + slack,
    })
}

/// Named multipliers used by the cross-product checks.
pub fn test_set() -> Vec<(&'static str, BvFunction)> {
    vec![
        ("square", BvFunction::indicator(0.0, PI).expect("valid")),
        ("cos1", BvFunction::cos_mode(1)),
        ("sin1", BvFunction::sin_mode(1)),
        ("saw", saw()),
        ("bump", bump()),
    ]
}

/// `t/π` on [-π, π), jumping by -2 at π.
fn saw() -> BvFunction {
    BvFunction::new(vec![-PI], vec![[-1.0, 1.0 / PI, 0.0, 0.0]], 0.5).expect("valid")
}

/// `C¹` smoothstep bump: rises from 0 at -1 to 1 at 0, back to 0 at 1.
fn bump() -> BvFunction {
    BvFunction::new(
        vec![-1.0, 0.0, 1.0],
        vec![[0.0, 0.0, 3.0, -2.0], [1.0, 0.0, -3.0, 2.0], [0.0; 4]],
        0.5,
    )
    .expect("valid")
}

#[derive(Serialize, Deserialize)]
struct BvJson {
    breakpoints: Vec<f64>,
    pieces: Vec<Vec<f64>>,
    #[serde(default)]
    left: Option<Vec<f64>>,
    #[serde(default)]
    right: Option<Vec<f64>>,
    #[serde(default = "half")]
    lambda: f64,
}

fn half() -> f64 {
    0.5
}

impl Serialize for BvFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.pieces.len();
        BvJson {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|p| p.to_vec()).collect(),
            left: Some((0..n).map(|i| self.left(i)).collect()),
            right: Some((0..n).map(|i| self.right(i)).collect()),
            lambda: self.lambda,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BvFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = BvJson::deserialize(d)?;
        BvFunction::try_from_json(raw).map_err(serde::de::Error::custom)
    }
}

impl BvFunction {
    fn try_from_json(raw: BvJson) -> Result<BvFunction> {
        let pieces = raw
            .pieces
            .iter()
            .map(|p| {
                if p.is_empty() || p.len() > 4 {
                    return Err(Error::InvalidBv(format!("a piece needs 1 to 4 coefficients, got {}", p.len())));
                }
                let mut c = [0.0; 4];
                c[..p.len()].copy_from_slice(p);
                Ok(c)
            })
            .collect::<Result<Vec<_>>>()?;
        let g = BvFunction::new(raw.breakpoints, pieces, raw.lambda)?;
        let check = |name: &str, given: &Option<Vec<f64>>, derived: &dyn Fn(usize) -> f64| -> Result<()> {
            if let Some(v) = given {
                if v.len() != g.pieces.len() {
                    return Err(Error::InvalidBv(format!("`{name}` has {} entries, expected {}", v.len(), g.pieces.len())));
                }
                for (i, &x) in v.iter().enumerate() {
                    let d = derived(i);
                    if !x.is_finite() || (x - d).abs() > 1e-9 * (1.0 + d.abs()) {
                        return Err(Error::InvalidBv(format!(
                            "`{name}`[{i}] = {x} disagrees with the pieces ({d})"
                        )));
                    }
                }
            }
            Ok(())
        };
        check("left", &raw.left, &|i| g.left(i))?;
        check("right", &raw.right, &|i| g.right(i))?;
        Ok(g)
    }

    pub fn from_json(s: &str) -> Result<BvFunction> {
        let raw: BvJson = serde_json::from_str(s).map_err(|e| Error::InvalidBv(e.to_string()))?;
        BvFunction::try_from_json(raw)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("finite values serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog;

    #[test]
    fn square_wave_variation() {
        let g = BvFunction::indicator(0.0, PI).unwrap();
        let r = g.variation();
        assert_eq!((r.variation, r.sup_norm, r.bv_norm), (2.0, 1.0, 3.0));
        assert_eq!(g.eval(0.0), 0.5);
        assert_eq!(g.eval(1.0), 1.0);
        assert_eq!(g.eval(-1.0), 0.0);
        assert_eq!(g.inf_abs(), 0.0);
    }

    #[test]
    fn sine_variation_is_four() {
        let r = BvFunction::sin_mode(1).variation();
        assert!((r.variation - 4.0).abs() < 1e-8, "{}", r.variation);
        assert!((r.sup_norm - 1.0).abs() < 1e-8);
    }

    #[test]
    fn modes_are_accurate() {
        for k in [1u64, 3] {
            let s = BvFunction::sin_mode(k);
            let c = BvFunction::cos_mode(k);
            for j in 0..997 {
                let t = -PI + TWO_PI * (j as f64 + 0.37) / 997.0;
                assert!((s.eval(t) - (k as f64 * t).sin()).abs() < MODE_ERROR * 1.01);
                assert!((c.eval(t) - (k as f64 * t).cos()).abs() < MODE_ERROR * 1.01);
            }
            assert!(s.jump(0).abs() < 1e-15 && c.jump(0).abs() < 1e-15);
        }
    }

    #[test]
    fn stieltjes_jump_sum_by_hand() {
        let f = catalog("const1").unwrap();
        let g = BvFunction::indicator(0.0, PI).unwrap();
        let v = stieltjes(f.primitive(), &g, -PI, PI).unwrap();
        assert!((v.re + PI).abs() < 1e-12 && v.im == 0.0);
        assert_eq!(stieltjes(f.primitive(), &BvFunction::constant(3.0), -PI, PI).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn product_with_indicator() {
        let f = catalog("const1").unwrap().distribution;
        let g = BvFunction::indicator(0.0, PI).unwrap();
        let h = multiply_bv(&f, &g).unwrap();
        assert!((h.primitive().drift().re - PI).abs() < 1e-12);
        for &x in &[-2.0f64, -0.5, 0.0, 0.5, 2.0, 3.0] {
            let expect = x.max(0.0);
            assert!((h.primitive().eval(x).re - expect).abs() < 1e-12, "{x}");
        }
    }

    #[test]
    fn coefficients_of_square_wave() {
        let g = BvFunction::indicator(0.0, PI).unwrap();
        assert!((g.fourier_coeff(0).re - PI).abs() < 1e-13);
        for n in 1..8i64 {
            // ∫_0^π e^{-int} dt = (1 − (−1)^n)/(in)
            let expect = C64::new(1.0 - (-1f64).powi(n as i32), 0.0) / C64::new(0.0, n as f64);
            assert!((g.fourier_coeff(n) - expect).norm() < 1e-13);
        }
    }

    #[test]
    fn dilation_matches_pointwise() {
        let g = test_set().into_iter().find(|(n, _)| *n == "bump").unwrap().1;
        let d = g.dilate(5).unwrap();
        for j in 0..200 {
            let t = -PI + 0.0314159 * j as f64 + 0.001;
            assert!((d.eval(t) - g.eval(5.0 * t)).abs() < 1e-12);
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let g = test_set()[3].1.clone();
        let back = BvFunction::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
        assert!(BvFunction::from_json(r#"{"breakpoints":[0.0],"pieces":[[1.0]],"left":[2.0]}"#).is_err());
        assert!(BvFunction::from_json(r#"{"breakpoints":[4.0],"pieces":[[1.0]]}"#).is_err());
        assert!(BvFunction::from_json(r#"{"breakpoints":[],"pieces":[]}"#).is_err());
    }

    #[test]
    fn refinement_keeps_the_variation() {
        for (_, g) in test_set() {
            let r = g.refine_at(0.77);
            assert_eq!(r.piece_count(), g.piece_count() + 1);
            let (a, b) = (g.variation(), r.variation());
            assert!((a.variation - b.variation).abs() < 1e-12 && (a.sup_norm - b.sup_norm).abs() < 1e-12);
        }
    }
}
