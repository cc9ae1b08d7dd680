//! Continuous primitives on the circle and the distributions they define.
//!
//! A [`Primitive`] is a continuous `F` on [-π, π] with `F(-π) = 0`; its drift
//! `F(π)` fixes the extension `F(x + 2πn) = F(x) + n·F(π)`. A
//! [`DistributionAc`] is the derivative `F'`, carried entirely by `F`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{finite, Error, Result};
use crate::norm::{self, NormEstimate, NormOptions};
use crate::quad::{self, Estimate, Oscillation, Tolerance};

const TWO_PI: f64 = 2.0 * PI;

/// Default sampling resolution (intervals per period).
pub const DEFAULT_GRID: usize = 1 << 14;

/// Canonical image of `x` in [-π, π).
pub fn reduce(x: f64) -> f64 {
    let r = (x + PI).rem_euclid(TWO_PI) - PI;
    if r >= PI {
        r - TWO_PI
    } else {
        r
    }
}

/// An angle stored by its canonical representative in [-π, π).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Angle(f64);

impl Angle {
    pub fn new(x: f64) -> Result<Angle> {
        Ok(Angle(reduce(finite(x)?)))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Which side of a point an oscillation accumulates on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Where a primitive stops being smooth. Quadrature splits at these points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Feature {
    Kink(f64),
    /// `F(at ± τ) − F(at)` oscillates with phase `scale·τ^-exponent`.
    Oscillation { at: f64, side: Side, osc: Oscillation },
}

impl Feature {
    pub fn at(&self) -> f64 {
        match *self {
            Feature::Kink(x) => x,
            Feature::Oscillation { at, .. } => at,
        }
    }
}

/// Specialised rule for `∫_lo^hi F(t)·w(t) dt` with `-π ≤ lo ≤ hi ≤ π` and a
/// smooth weight `w`.
pub trait WeightedRule: Send + Sync {
    fn integrate(&self, w: &dyn Fn(f64) -> C64, lo: f64, hi: f64, tol: Tolerance) -> Estimate;
}

type Eval = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Leaf {
        eval: Eval,
        features: Arc<[Feature]>,
        rule: Option<Arc<dyn WeightedRule>>,
    },
    Sum(Arc<[(C64, Primitive)]>),
    /// `x ↦ F(x − s) − F(−π − s)`
    Shift { inner: Arc<Primitive>, s: f64, base: C64 },
}

/// Element of the space of continuous primitives.
#[derive(Clone)]
pub struct Primitive {
    repr: Repr,
    drift: C64,
    grid_hint: usize,
    real: bool,
}

impl fmt::Debug for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Primitive")
            .field("drift", &self.drift)
            .field("grid_hint", &self.grid_hint)
            .field("real", &self.real)
            .finish_non_exhaustive()
    }
}

impl Primitive {
    /// Wraps a complex map on [-π, π]. The value at -π is subtracted so the
    /// result vanishes there exactly.
    pub fn from_fn(f: impl Fn(f64) -> C64 + Send + Sync + 'static) -> Result<Primitive> {
        let offset = f(-PI);
        let end = f(PI);
        if !(offset.re.is_finite() && offset.im.is_finite() && end.re.is_finite() && end.im.is_finite()) {
            return Err(Error::InvalidParameter("primitive is not finite at ±π".into()));
        }
        let eval: Eval = if offset == C64::new(0.0, 0.0) {
            Arc::new(f)
        } else {
            Arc::new(move |x| f(x) - offset)
        };
        Ok(Primitive {
            repr: Repr::Leaf {
                eval,
                features: Arc::from(Vec::new()),
                rule: None,
            },
            drift: end - offset,
            grid_hint: DEFAULT_GRID,
            real: false,
        })
    }

    pub fn from_real_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Primitive> {
        let mut p = Primitive::from_fn(move |x| C64::new(f(x), 0.0))?;
        p.real = true;
        Ok(p)
    }

    pub fn zero() -> Primitive {
        let mut p = Primitive::from_fn(|_| C64::new(0.0, 0.0)).expect("zero is finite");
        p.real = true;
        p
    }

    pub fn with_features(mut self, features: Vec<Feature>) -> Primitive {
        if let Repr::Leaf { features: ref mut fs, .. } = self.repr {
            *fs = Arc::from(features);
        }
        self
    }

    pub fn with_rule(mut self, r: Arc<dyn WeightedRule>) -> Primitive {
        if let Repr::Leaf { ref mut rule, .. } = self.repr {
            *rule = Some(r);
        }
        self
    }

    pub fn with_grid_hint(mut self, grid: usize) -> Primitive {
        self.grid_hint = grid.max(16);
        self
    }

    pub fn drift(&self) -> C64 {
        self.drift
    }

    pub fn grid_hint(&self) -> usize {
        self.grid_hint
    }

    /// True when the primitive is known to be real valued.
    pub fn is_real(&self) -> bool {
        self.real
    }

    /// `F(x)` for `x` in [-π, π].
    pub fn eval(&self, x: f64) -> C64 {
        match &self.repr {
            Repr::Leaf { eval, .. } => eval(x),
            Repr::Sum(terms) => terms.iter().map(|(c, p)| *c * p.eval(x)).sum(),
            Repr::Shift { inner, s, base } => inner.ext(x - s) - base,
        }
    }

    /// Extension to the real line without the finiteness check.
    pub(crate) fn ext(&self, x: f64) -> C64 {
        if (-PI..=PI).contains(&x) {
            return self.eval(x);
        }
        let y = reduce(x);
        let n = ((x - y) / TWO_PI).round();
        self.eval(y) + self.drift * n
    }

    /// `F(x)` for any real `x`, by the extension rule.
    pub fn eval_extended(&self, x: f64) -> Result<C64> {
        Ok(self.ext(finite(x)?))
    }

    /// `Σ cᵢ Fᵢ`.
    pub fn combine(terms: Vec<(C64, Primitive)>) -> Primitive {
        let drift = terms.iter().map(|(c, p)| *c * p.drift).sum();
        let real = terms.iter().all(|(c, p)| p.real && c.im == 0.0);
        let grid_hint = terms.iter().map(|(_, p)| p.grid_hint).max().unwrap_or(DEFAULT_GRID);
        Primitive {
            repr: Repr::Sum(Arc::from(terms)),
            drift,
            grid_hint,
            real,
        }
    }

    /// Primitive of the translate `τ_s f`.
    pub fn shift(&self, s: f64) -> Primitive {
        if s == 0.0 {
            return self.clone();
        }
        let base = self.ext(-PI - s);
        Primitive {
            repr: Repr::Shift {
                inner: Arc::new(self.clone()),
                s,
                base,
            },
            drift: self.drift,
            grid_hint: self.grid_hint,
            real: self.real,
        }
    }

    /// `∫_lo^hi F(t)·w(t) dt` for the extended `F` and a smooth weight `w`.
    pub fn weighted(&self, w: &dyn Fn(f64) -> C64, lo: f64, hi: f64, tol: Tolerance) -> Estimate {
        if lo == hi {
            return Estimate::zero();
        }
        if lo > hi {
            return self.weighted(w, hi, lo, tol).scale(C64::new(-1.0, 0.0));
        }
        match &self.repr {
            Repr::Sum(terms) => {
                let k = terms.len().max(1);
                terms
                    .iter()
                    .map(|(c, p)| {
                        let t = tol.split(k);
                        let t = Tolerance {
                            abs: t.abs / c.norm().max(1e-300),
                            ..t
                        };
                        p.weighted(w, lo, hi, t).scale(*c)
                    })
                    .sum()
            }
            Repr::Shift { inner, s, base } => {
                let s = *s;
                let moved = |t: f64| w(t + s);
                let main = inner.weighted(&moved, lo - s, hi - s, tol.split(2));
                if *base == C64::new(0.0, 0.0) {
                    main
                } else {
                    main - quad::smooth(w, lo, hi, tol.split(2)).scale(*base)
                }
            }
            Repr::Leaf { .. } => self.leaf_periods(w, lo, hi, tol),
        }
    }

    fn leaf_periods(&self, w: &dyn Fn(f64) -> C64, lo: f64, hi: f64, tol: Tolerance) -> Estimate {
        let k0 = ((lo + PI) / TWO_PI).floor() as i64;
        let k1 = ((hi + PI) / TWO_PI).ceil() as i64;
        let count = (k1 - k0).max(1) as usize;
        let mut total = Estimate::zero();
        for k in k0..k1 {
            let shift = TWO_PI * k as f64;
            let l = lo.max(-PI + shift);
            let r = hi.min(PI + shift);
            if r <= l {
                continue;
            }
            let ll = (l - shift).clamp(-PI, PI);
            let rr = (r - shift).clamp(-PI, PI);
            let part = if k == 0 {
                self.leaf_local(w, ll, rr, tol.split(count))
            } else {
                let moved = |t: f64| w(t + shift);
                self.leaf_local(&moved, ll, rr, tol.split(2 * count))
            };
            total = total + part;
            if k != 0 && self.drift != C64::new(0.0, 0.0) {
                let c = self.drift * k as f64;
                total = total + quad::smooth(w, l, r, tol.split(2 * count)).scale(c);
            }
        }
        total
    }

    fn leaf_local(&self, w: &dyn Fn(f64) -> C64, lo: f64, hi: f64, tol: Tolerance) -> Estimate {
        let Repr::Leaf { eval, features, rule } = &self.repr else {
            unreachable!()
        };
        if let Some(rule) = rule {
            return rule.integrate(w, lo, hi, tol);
        }
        // a range just beside an oscillation point is measured from that point
        for f in features.iter() {
            if let Feature::Oscillation { at, side, .. } = *f {
                let half = tol.split(2);
                if side == Side::Right && lo > at && lo - at < OSC_ZONE {
                    return self.leaf_local(w, at, hi, half) - self.leaf_local(w, at, lo, half);
                }
                if side == Side::Left && hi < at && at - hi < OSC_ZONE {
                    return self.leaf_local(w, lo, at, half) - self.leaf_local(w, hi, at, half);
                }
            }
        }
        let mut cuts = vec![lo, hi];
        for f in features.iter() {
            for at in [f.at(), f.at() + TWO_PI] {
                if at > lo && at < hi {
                    cuts.push(at);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let pieces = cuts.len() - 1;
        let fw = |t: f64| eval(t) * w(t);
        let mut total = Estimate::zero();
        for win in cuts.windows(2) {
            let (a, b) = (win[0], win[1]);
            let t = tol.split(pieces);
            let left = osc_at(features, a, Side::Right);
            let right = osc_at(features, b, Side::Left);
            let n_osc = left.is_some() as usize + right.is_some() as usize;
            let len = if n_osc == 0 { 0.0 } else { OSC_ZONE.min((b - a) / n_osc as f64) };
            let mut a_in = a;
            let mut b_in = b;
            if let Some(osc) = left {
                total = total + osc_piece(eval, w, a, 1.0, len, osc, t.split(3));
                a_in = a + len;
            }
            if let Some(osc) = right {
                total = total + osc_piece(eval, w, b, -1.0, len, osc, t.split(3));
                b_in = b - len;
            }
            if b_in > a_in {
                total = total + quad::adaptive(&fw, a_in, b_in, t.panels(a_in, b_in), t.split(3));
            }
        }
        total
    }

    fn norm_opts(&self, opts: Option<NormOptions>) -> NormOptions {
        opts.unwrap_or_else(|| NormOptions::with_grid(self.grid_hint))
    }
}

/// Width next to an oscillation point handled by the oscillatory rule.
const OSC_ZONE: f64 = 0.25;

fn osc_at(features: &[Feature], x: f64, side: Side) -> Option<Oscillation> {
    features.iter().find_map(|f| match *f {
        Feature::Oscillation { at, side: s, osc } if s == side && (reduce(at) == reduce(x) || at == x) => Some(osc),
        _ => None,
    })
}

/// `∫` over `[s, s + dir·len]` (oriented left to right) of `F·w`, where `F`
/// oscillates into `s`.
fn osc_piece(eval: &Eval, w: &dyn Fn(f64) -> C64, s: f64, dir: f64, len: f64, osc: Oscillation, tol: Tolerance) -> Estimate {
    let fs = eval(s);
    let h = |tau: f64| {
        let t = s + dir * tau;
        (eval(t) - fs) * w(t)
    };
    let body = quad::oscillatory_start(&h, len, osc, tol.abs);
    let (a, b) = if dir > 0.0 { (s, s + len) } else { (s - len, s) };
    if fs == C64::new(0.0, 0.0) {
        body
    } else {
        body + quad::smooth(w, a, b, tol).scale(fs)
    }
}

/// A distribution in `A_c(T)`, represented by its primitive.
#[derive(Clone, Debug)]
pub struct DistributionAc {
    primitive: Primitive,
}

impl From<Primitive> for DistributionAc {
    fn from(p: Primitive) -> Self {
        DistributionAc { primitive: p }
    }
}

impl DistributionAc {
    pub fn new(primitive: Primitive) -> Self {
        DistributionAc { primitive }
    }

    pub fn zero() -> Self {
        Primitive::zero().into()
    }

    pub fn primitive(&self) -> &Primitive {
        &self.primitive
    }

    pub fn into_primitive(self) -> Primitive {
        self.primitive
    }

    /// `∫_a^b f = F(b) − F(a)`.
    pub fn integrate(&self, a: f64, b: f64) -> Result<C64> {
        Ok(self.primitive.eval_extended(b)? - self.primitive.eval_extended(a)?)
    }

    /// The translate `τ_s f`, `τ_s f(y) = f(y − s)`.
    pub fn translate(&self, s: f64) -> Result<DistributionAc> {
        finite(s)?;
        Ok(self.primitive.shift(s).into())
    }

    pub fn add(&self, other: &DistributionAc) -> DistributionAc {
        self.lin(C64::new(1.0, 0.0), other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &DistributionAc) -> DistributionAc {
        self.lin(C64::new(1.0, 0.0), other, C64::new(-1.0, 0.0))
    }

    pub fn scale(&self, c: C64) -> DistributionAc {
        Primitive::combine(vec![(c, self.primitive.clone())]).into()
    }

    /// `a·self + b·other`.
    pub fn lin(&self, a: C64, other: &DistributionAc, b: C64) -> DistributionAc {
        Primitive::combine(vec![(a, self.primitive.clone()), (b, other.primitive.clone())]).into()
    }

    /// Alexiewicz norm `max_{α ≤ β ≤ α+2π} |F(β) − F(α)|`.
    pub fn alexiewicz_norm(&self) -> Result<f64> {
        Ok(self.alexiewicz_norm_with(None)?.value)
    }

    pub fn alexiewicz_norm_with(&self, opts: Option<NormOptions>) -> Result<NormEstimate> {
        norm::alexiewicz(&self.primitive, self.primitive.norm_opts(opts))
    }

    /// The equivalent norm `sup |F(x)|` over [-π, π].
    pub fn alexiewicz_norm_equiv(&self) -> Result<f64> {
        Ok(self.alexiewicz_norm_equiv_with(None)?.value)
    }

    pub fn alexiewicz_norm_equiv_with(&self, opts: Option<NormOptions>) -> Result<NormEstimate> {
        norm::sup_abs(&self.primitive, self.primitive.norm_opts(opts))
    }

    /// `max` over a grid of `0 < t < δ` of `‖f − τ_t f‖`. Negative `t` give the
    /// same values since the norm is translation invariant.
    pub fn modulus_of_continuity(&self, delta: f64) -> Result<f64> {
        if !(delta > 0.0 && delta <= PI) {
            return Err(Error::InvalidParameter(format!("δ must lie in (0, π], got {delta}")));
        }
        const STEPS: usize = 16;
        let mut best = 0.0f64;
        for k in 1..STEPS {
            let t = delta * k as f64 / STEPS as f64;
            best = best.max(self.sub(&self.translate(t)?).alexiewicz_norm()?);
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> Primitive {
        Primitive::from_real_fn(|x| x + PI).unwrap()
    }

    #[test]
    fn reduce_is_half_open() {
        assert_eq!(reduce(-PI), -PI);
        assert_eq!(reduce(PI), -PI);
        assert!((reduce(3.0 * PI + 0.5) - (-PI + 0.5)).abs() < 1e-12);
        assert!(reduce(1e6) >= -PI && reduce(1e6) < PI);
    }

    #[test]
    fn extension_of_the_line() {
        let f = line();
        assert_eq!(f.drift().re, 2.0 * PI);
        assert!((f.eval_extended(3.0 * PI).unwrap().re - 4.0 * PI).abs() < 1e-12);
        assert_eq!(f.eval_extended(-PI).unwrap().re, 0.0);
        assert!(f.eval_extended(f64::NAN).is_err());
    }

    #[test]
    fn offset_is_removed() {
        let f = Primitive::from_real_fn(|x| x.cos()).unwrap();
        assert_eq!(f.eval(-PI).re, 0.0);
        assert!((f.drift().re).abs() < 1e-15);
    }

    #[test]
    fn translation_keeps_drift_and_vanishes_at_minus_pi() {
        let f = DistributionAc::from(line());
        let g = f.translate(1.3).unwrap();
        assert!(g.primitive().eval(-PI).norm() < 1e-15);
        assert!((g.primitive().drift() - f.primitive().drift()).norm() < 1e-12);
    }

    #[test]
    fn weighted_integral_of_line_against_one() {
        let f = line();
        let e = f.weighted(&|_| C64::new(1.0, 0.0), -PI, 3.0 * PI, Tolerance::default());
        // ∫_{-π}^{3π} (x + π) dx = 8π²
        assert!((e.value.re - 8.0 * PI * PI).abs() < 1e-9);
    }
}
