//! Closed-form test distributions, addressed by stable string names.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::primitive::{DistributionAc, Feature, Primitive, Side, WeightedRule};
use crate::quad::{self, gl16, Estimate, Oscillation, Tolerance};
use crate::special::{cantor, cos_sin_turns, g36, turn_of};

/// Name patterns accepted by [`CatalogName::from_str`].
pub const KNOWN: [&str; 8] = [
    "const1",
    "exp:j",
    "xsin",
    "osc:alpha",
    "weierstrass",
    "cantor",
    "example36",
    "heaviside-half-primitive",
];

pub const WEIERSTRASS_A: f64 = 0.5;
pub const WEIERSTRASS_B: u64 = 7;
pub const WEIERSTRASS_TERMS: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CatalogName {
    Const1,
    /// `e^{ijt}`
    Exp(i64),
    Xsin,
    /// `|t|^-α sgn t`
    Osc(f64),
    Weierstrass,
    Cantor,
    Example36,
    HeavisideHalfPrimitive,
}

impl fmt::Display for CatalogName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogName::Const1 => write!(f, "const1"),
            CatalogName::Exp(j) => write!(f, "exp:{j}"),
            CatalogName::Xsin => write!(f, "xsin"),
            CatalogName::Osc(a) => write!(f, "osc:{a}"),
            CatalogName::Weierstrass => write!(f, "weierstrass"),
            CatalogName::Cantor => write!(f, "cantor"),
            CatalogName::Example36 => write!(f, "example36"),
            CatalogName::HeavisideHalfPrimitive => write!(f, "heaviside-half-primitive"),
        }
    }
}

impl FromStr for CatalogName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, param) = match s.split_once(':') {
            Some((h, p)) => (h, Some(p)),
            None => (s, None),
        };
        let no_param = |name: CatalogName| match param {
            None => Ok(name),
            Some(_) => Err(Error::InvalidParameter(format!("`{head}` takes no parameter"))),
        };
        match head {
            "const1" => no_param(CatalogName::Const1),
            "xsin" => no_param(CatalogName::Xsin),
            "weierstrass" => no_param(CatalogName::Weierstrass),
            "cantor" => no_param(CatalogName::Cantor),
            "example36" => no_param(CatalogName::Example36),
            "heaviside-half-primitive" => no_param(CatalogName::HeavisideHalfPrimitive),
            "exp" => {
                let p = param.ok_or_else(|| Error::InvalidParameter("exp needs an integer, e.g. exp:4".into()))?;
                let j: i64 = p
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("exp parameter `{p}` is not an integer")))?;
                if j.unsigned_abs() > 1_000_000 {
                    return Err(Error::InvalidParameter(format!("exp frequency {j} exceeds 10^6")));
                }
                Ok(CatalogName::Exp(j))
            }
            "osc" => {
                let p = param.ok_or_else(|| Error::InvalidParameter("osc needs an exponent, e.g. osc:0.5".into()))?;
                let a: f64 = p
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("osc parameter `{p}` is not a number")))?;
                if !(0.0..1.0).contains(&a) {
                    return Err(Error::InvalidParameter(format!("osc exponent must lie in [0, 1), got {p}")));
                }
                Ok(CatalogName::Osc(a))
            }
            _ => Err(Error::UnknownEntry(s.to_string())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: CatalogName,
    pub distribution: DistributionAc,
    pub notes: &'static str,
    /// Whether the distribution is an integrable function.
    pub lebesgue: bool,
}

impl CatalogEntry {
    pub fn primitive(&self) -> &Primitive {
        self.distribution.primitive()
    }
}

/// Looks up and builds a catalog entry from its string name.
pub fn catalog(name: &str) -> Result<CatalogEntry> {
    Ok(build(name.parse()?))
}

/// Instances used for catalog-wide sweeps.
pub fn standard_names() -> Vec<CatalogName> {
    vec![
        CatalogName::Const1,
        CatalogName::Exp(1),
        CatalogName::Exp(4),
        CatalogName::Xsin,
        CatalogName::Osc(0.5),
        CatalogName::Weierstrass,
        CatalogName::Cantor,
        CatalogName::Example36,
        CatalogName::HeavisideHalfPrimitive,
    ]
}

pub fn standard() -> Vec<CatalogEntry> {
    standard_names().into_iter().map(build).collect()
}

fn real(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Primitive {
    Primitive::from_real_fn(f).expect("catalog primitives are finite")
}

fn ends() -> Feature {
    Feature::Kink(-PI)
}

pub fn build(name: CatalogName) -> CatalogEntry {
    let (p, notes, lebesgue) = match name {
        CatalogName::Const1 => (real(|x| x + PI), "F(x) = x + π, the constant function 1", true),
        CatalogName::Exp(0) => (real(|x| x + PI), "e^{i0t} = 1", true),
        CatalogName::Exp(j) => {
            let k = j.unsigned_abs();
            let sign = j.signum() as f64;
            // e^{ijx} = (−1)^j e^{2πij·y} with y the period fraction of x
            let parity = if k % 2 == 0 { 1.0 } else { -1.0 };
            let p = Primitive::from_fn(move |x| {
                let (c, s) = cos_sin_turns(k, turn_of(x));
                (C64::new(c, sign * s) - 1.0) * parity / C64::new(0.0, j as f64)
            })
            .expect("finite");
            (p, "F(x) = (e^{ijx} − e^{−ijπ})/(ij)", true)
        }
        CatalogName::Xsin => {
            let p = real(|x| if x <= 0.0 { 0.0 } else { x * (x * x).recip().sin() }).with_features(vec![
                Feature::Oscillation {
                    at: 0.0,
                    side: Side::Right,
                    osc: Oscillation { exponent: 2.0, scale: 1.0 },
                },
                ends(),
            ]);
            (p, "F(x) = x·sin(x^-2) on (0, π], 0 on [-π, 0]; f is not integrable", false)
        }
        CatalogName::Osc(a) => {
            let e = 1.0 - a;
            let top = PI.powf(e);
            let p = real(move |x| (x.abs().powf(e) - top) / e).with_features(vec![Feature::Kink(0.0), ends()]);
            (p, "f(t) = |t|^-α sgn t, F(x) = (|x|^{1−α} − π^{1−α})/(1−α)", true)
        }
        CatalogName::Weierstrass => {
            let p = real(weierstrass).with_rule(Arc::new(WeierstrassRule));
            (
                p,
                "F(x) = Σ_{k≤20} 0.5^k (cos(7^k x) − cos(7^k π)); the neglected tail is below 0.5^21 ≈ 5e-7 in sup norm",
                false,
            )
        }
        CatalogName::Cantor => {
            let p = real(|x| cantor((x + PI) / (2.0 * PI))).with_rule(Arc::new(CantorRule));
            (p, "Cantor function rescaled to [-π, π], drift 1; F' = 0 almost everywhere", false)
        }
        CatalogName::Example36 => {
            let p = real(|x| {
                if x <= 0.0 {
                    0.0
                } else {
                    0.25 * x * x * x.powi(-4).cos() - 0.5 * g36(x)
                }
            })
            .with_features(vec![
                Feature::Oscillation {
                    at: 0.0,
                    side: Side::Right,
                    osc: Oscillation { exponent: 4.0, scale: 1.0 },
                },
                ends(),
            ]);
            (
                p,
                "f(t) = t^-3 sin(t^-4) on (0, π); F(x) = x²/4·cos(x^-4) − ½∫_0^x t cos(t^-4) dt",
                false,
            )
        }
        CatalogName::HeavisideHalfPrimitive => (
            real(|x| x.max(0.0)).with_features(vec![Feature::Kink(0.0), ends()]),
            "f = indicator of (0, π), F(x) = max(x, 0)",
            true,
        ),
    };
    CatalogEntry {
        name,
        distribution: p.into(),
        notes,
        lebesgue,
    }
}

/// `cos(7^k x) = −cos(2π·7^k·y)` for the period fraction `y`, since `7^k` is odd.
fn weierstrass(x: f64) -> f64 {
    let y = turn_of(x);
    let mut s = 0.0;
    let mut a = 1.0;
    let mut b = 1u64;
    for _ in 0..WEIERSTRASS_TERMS {
        s += a * (1.0 - cos_sin_turns(b, y).0);
        a *= WEIERSTRASS_A;
        b *= WEIERSTRASS_B;
    }
    s
}

/// Terms with frequency up to `7^low` are integrated by composite Gauss
/// rules; the rest by four rounds of integration by parts. `low` grows from
/// `LOW` until the first omitted term fits the tolerance.
struct WeierstrassRule;

const LOW: usize = 4;
const LOW_MAX: usize = 6;

impl WeightedRule for WeierstrassRule {
    fn integrate(&self, w: &dyn Fn(f64) -> C64, lo: f64, hi: f64, tol: Tolerance) -> Estimate {
        let h = 2e-3;
        let derivs = |t: f64| -> [C64; 5] {
            let v: Vec<C64> = (-2..=2).map(|k| w(t + h * k as f64)).collect();
            [
                v[2],
                (v[3] - v[1]) / (2.0 * h),
                (v[3] - v[2] * 2.0 + v[1]) / (h * h),
                (v[4] - v[3] * 2.0 + v[1] * 2.0 - v[0]) / (2.0 * h * h * h),
                (v[4] - v[3] * 4.0 + v[2] * 6.0 - v[1] * 4.0 + v[0]) / (h * h * h * h),
            ]
        };
        let dl = derivs(lo);
        let dh = derivs(hi);
        let d4 = dh[4].norm() + dl[4].norm();
        // local frequency of the weight, from |w'|/|w| and √|w''/w|
        let scale = dl[0].norm().max(dh[0].norm()).max(w(0.5 * (lo + hi)).norm()).max(1e-300);
        let nu = [&dl, &dh]
            .iter()
            .map(|d| (d[1].norm() / scale).max((d[2].norm() / scale).sqrt()))
            .fold(1.0f64, f64::max);
        // first omitted boundary term, valid once ω dwarfs the weight's frequency
        let remainder = |low: usize| -> f64 {
            (low + 1..WEIERSTRASS_TERMS)
                .map(|k| WEIERSTRASS_A.powi(k as i32) * d4 * (WEIERSTRASS_B as f64).powi(-5 * k as i32))
                .sum()
        };
        let resolved = |low: usize| (WEIERSTRASS_B as f64).powi(low as i32 + 1) >= 16.0 * nu;
        let mut low = LOW;
        while low < LOW_MAX && (!resolved(low) || remainder(low) > 0.25 * tol.abs) {
            low += 1;
        }

        let mut sum_a = 0.0;
        let mut a = 1.0;
        for _ in 0..WEIERSTRASS_TERMS {
            sum_a += a;
            a *= WEIERSTRASS_A;
        }
        let body_fn = |t: f64| {
            let y = turn_of(t);
            let mut s = 0.0;
            let mut a = 1.0;
            let mut b = 1u64;
            for _ in 0..=low {
                s -= a * cos_sin_turns(b, y).0;
                a *= WEIERSTRASS_A;
                b *= WEIERSTRASS_B;
            }
            C64::new(s + sum_a, 0.0) * w(t)
        };
        let top = (WEIERSTRASS_B.pow(low as u32)) as f64;
        let panels = ((hi - lo) * (top / 2.0 + tol.density)).ceil().max(1.0) as usize;
        let body = gl16().composite(&body_fn, lo, hi, panels);
        // check against half the panels for an error estimate
        let coarse = gl16().composite(&body_fn, lo, hi, panels.div_ceil(2));
        let err = (body - coarse).norm() + remainder(low);

        let mut tail = C64::new(0.0, 0.0);
        let mut a = WEIERSTRASS_A.powi(low as i32 + 1);
        let mut b = WEIERSTRASS_B.pow(low as u32 + 1);
        for _ in low + 1..WEIERSTRASS_TERMS {
            let om = b as f64;
            let mut term = C64::new(0.0, 0.0);
            for sgn in [1.0, -1.0] {
                // ∫ e^{isωt} w = Σ_m (−1)^m [e^{isωt} w^(m)/(isω)^{m+1}]
                let iw = C64::new(0.0, sgn * om);
                for (t, d, side) in [(hi, &dh, 1.0), (lo, &dl, -1.0)] {
                    let (c, s) = cos_sin_turns(b, turn_of(t));
                    let e = -C64::new(c, sgn * s);
                    let mut pow = iw;
                    let mut acc = C64::new(0.0, 0.0);
                    for (m, dm) in d[..4].iter().enumerate() {
                        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                        acc += *dm * sign / pow;
                        pow *= iw;
                    }
                    term += e * acc * side;
                }
            }
            tail += term * (0.5 * a);
            a *= WEIERSTRASS_A;
            b *= WEIERSTRASS_B;
        }
        let target = tol.abs.max(tol.rel * (body + tail).norm());
        Estimate {
            value: body + tail,
            error: err,
            converged: err <= target.max(1e-13),
        }
    }
}

/// Exploits self-similarity: on the middle thirds the Cantor function is
/// constant, and on a deep Cantor interval `J` of level `d`
/// `∫_J c·v ≈ c(J⁻)∫_J v + 2^-d |J| (v(m)/2 + (v⁺ − v⁻)/16 + (v⁺ − 2v(m) + v⁻)/12)`,
/// which uses the exact moments `∫c₀ = 1/2`, `∫c₀(ξ−½) = 1/16`,
/// `∫c₀(ξ−½)² = 1/24` of the standard Cantor function.
struct CantorRule;

const CANTOR_LEAF: u32 = 10;
const CANTOR_EDGE: u32 = 34;

impl WeightedRule for CantorRule {
    fn integrate(&self, w: &dyn Fn(f64) -> C64, lo: f64, hi: f64, tol: Tolerance) -> Estimate {
        let v = |xi: f64| w(-PI + 2.0 * PI * xi);
        let xl = ((lo + PI) / (2.0 * PI)).clamp(0.0, 1.0);
        let xh = ((hi + PI) / (2.0 * PI)).clamp(0.0, 1.0);
        let inner = Tolerance {
            abs: tol.abs / (2.0 * PI * (1u64 << (CANTOR_LEAF + 2)) as f64),
            density: tol.density * 2.0 * PI,
            ..tol
        };
        let mut acc = Estimate::zero();
        cantor_rec(&v, 0.0, 1.0, 0.0, 0, xl, xh, inner, &mut acc);
        let total = acc.scale(C64::new(2.0 * PI, 0.0));
        // judged as a whole: single pieces may sit at round-off
        let target = tol.abs.max(tol.rel * total.value.norm());
        Estimate {
            converged: total.error <= target.max(1e-13),
            ..total
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cantor_rec(
    v: &dyn Fn(f64) -> C64,
    a: f64,
    len: f64,
    ca: f64,
    depth: u32,
    lo: f64,
    hi: f64,
    tol: Tolerance,
    acc: &mut Estimate,
) {
    let b = a + len;
    if b <= lo || a >= hi {
        return;
    }
    let inside = lo <= a && b <= hi;
    let rise = 0.5f64.powi(depth as i32);
    if inside && depth >= CANTOR_LEAF {
        let m = 0.5 * (a + b);
        let (vl, vm, vr) = (v(a), v(m), v(b));
        let plain = (vl + vm * 4.0 + vr) * (len / 6.0);
        let moment = vm * 0.5 + (vr - vl) / 16.0 + (vl - vm * 2.0 + vr) / 12.0;
        *acc = *acc + Estimate::exact(plain * ca + moment * (rise * len));
        return;
    }
    if depth >= CANTOR_EDGE {
        let (l, r) = (a.max(lo), b.min(hi));
        let cv = |x: f64| v(x) * cantor(x);
        *acc = *acc + Estimate::exact(gl16().apply(&cv, l, r));
        return;
    }
    let third = len / 3.0;
    cantor_rec(v, a, third, ca, depth + 1, lo, hi, tol, acc);
    let (ml, mr) = ((a + third).max(lo), (a + 2.0 * third).min(hi));
    if mr > ml {
        let level = ca + 0.5 * rise;
        *acc = *acc + quad::smooth(v, ml, mr, tol).scale(C64::new(level, 0.0));
    }
    cantor_rec(v, a + 2.0 * third, third, ca + 0.5 * rise, depth + 1, lo, hi, tol, acc);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for n in standard_names() {
            assert_eq!(n.to_string().parse::<CatalogName>().unwrap(), n);
        }
        assert!("nope".parse::<CatalogName>().is_err());
        assert!("osc:1".parse::<CatalogName>().is_err());
        assert!("exp:x".parse::<CatalogName>().is_err());
        assert!("const1:3".parse::<CatalogName>().is_err());
    }

    #[test]
    fn entries_vanish_at_minus_pi() {
        for e in standard() {
            assert_eq!(e.primitive().eval(-PI).norm(), 0.0, "{}", e.name);
        }
    }

    #[test]
    fn weierstrass_drift_is_zero_and_peak_is_at_zero() {
        let e = build(CatalogName::Weierstrass);
        let p = e.primitive();
        assert!(p.drift().norm() < 1e-9);
        let peak: f64 = (0..WEIERSTRASS_TERMS).map(|k| 2.0 * 0.5f64.powi(k as i32)).sum();
        assert!((p.eval(0.0).re - peak).abs() < 1e-12);
    }

    #[test]
    fn cantor_rule_matches_moment_identities() {
        // ∫_{-π}^{π} F = 2π·∫c = π, ∫ F(t)(t+π) dt = 4π²·∫ c(ξ)ξ dξ = 4π²·5/16
        let p = build(CatalogName::Cantor).distribution.into_primitive();
        let one = p.weighted(&|_| C64::new(1.0, 0.0), -PI, PI, Tolerance::default());
        assert!((one.value.re - PI).abs() < 1e-10, "{}", one.value.re);
        let lin = p.weighted(&|t| C64::new(t + PI, 0.0), -PI, PI, Tolerance::default());
        assert!((lin.value.re - 4.0 * PI * PI * 5.0 / 16.0).abs() < 1e-10);
    }

    #[test]
    fn weierstrass_rule_matches_series() {
        // ∫_{-π}^{π} F(t) e^{-int} dt = π·a^k for n = 7^k and 0 otherwise
        let p = build(CatalogName::Weierstrass).distribution.into_primitive();
        for (n, expect) in [(7.0, PI * 0.5), (343.0, PI * 0.125), (64.0, 0.0), (0.0, 2.0 * PI * 2.0 * (1.0 - 0.5f64.powi(21)))] {
            let w = move |t: f64| C64::from_polar(1.0, -n * t);
            let e = p.weighted(&w, -PI, PI, Tolerance::default());
            assert!((e.value - expect).norm() < 1e-9, "n={n}: {}", e.value);
        }
    }
}
