//! One function per command. Each returns its table and the invariant
//! violations it observed.

use std::f64::consts::PI;

use rayon::prelude::*;
use torus_cpi::analysis::{
    bv_coefficient_test, fejer_lemma_sweep, fubini_check, g_coeffs, parseval_from,
};
use torus_cpi::bv::{holder_check, integrate_product};
use torus_cpi::convolution::{bilinear_unboundedness_demo, convolution_theorem_check};
use torus_cpi::fourier::{coeffs, d_norm, growth_report, GROWTH_TOL};
use torus_cpi::kernels::{dirichlet_alexiewicz_norm, divergence_construction, validate_summability};
use torus_cpi::{
    convolve_bv, convolve_l1, kernel, DistributionAc, Error, FourierCoeffs, KernelKind, C64,
};

use crate::config::ExperimentConfig;
use crate::inputs::{distributions, known_norm, l1_function, multipliers, Input, Multiplier};
use crate::table::{num, ResultTable};
use crate::{Failure, Outcome, UsageError};

type Run = Result<Outcome, Failure>;

pub fn dispatch(command: &str, cfg: &ExperimentConfig) -> Run {
    match command {
        "coeffs" => coeffs_cmd(cfg),
        "norm" => norm_cmd(cfg),
        "convolve" => convolve_cmd(cfg),
        "kernel-sweep" => kernel_sweep(cfg),
        "dirichlet-bound" => dirichlet_bound(cfg),
        "divergence" => divergence(cfg),
        "parseval" => parseval(cfg),
        "fejer-lemma" => fejer_lemma(cfg),
        "bv-test" => bv_test(cfg),
        "fubini-check" => fubini(cfg),
        other => Err(UsageError(format!("unknown command `{other}`")).into()),
    }
}

fn outcome(table: ResultTable, violations: Vec<String>) -> Run {
    Ok(Outcome { table, violations })
}

fn inputs(cfg: &ExperimentConfig, default: &str) -> Result<Vec<Input>, Failure> {
    Ok(distributions(cfg.distribution.as_deref().unwrap_or(default), cfg.effective_grid()?)?)
}

fn mults(cfg: &ExperimentConfig, default: &str) -> Result<Vec<Multiplier>, Failure> {
    Ok(multipliers(cfg.multiplier.as_deref().unwrap_or(default))?)
}

fn pairs<'a>(fs: &'a [Input], gs: &'a [Multiplier]) -> Vec<(&'a Input, &'a Multiplier)> {
    fs.iter().flat_map(|f| gs.iter().map(move |g| (f, g))).collect()
}

fn ns_or(cfg: &ExperimentConfig, default: &[usize]) -> Vec<usize> {
    cfg.ns.clone().unwrap_or_else(|| default.to_vec())
}

/// Norm estimate, keeping the best refinement when the grid cap is reached.
fn estimate(r: torus_cpi::Result<torus_cpi::norm::NormEstimate>) -> torus_cpi::Result<(f64, f64, usize, bool)> {
    match r {
        Ok(e) => Ok((e.value, e.error, e.resolution, true)),
        Err(Error::NotConverged { best, error, .. }) => Ok((best, error, 0, false)),
        Err(e) => Err(e),
    }
}

fn lenient_norm(d: &DistributionAc) -> torus_cpi::Result<f64> {
    estimate(d.alexiewicz_norm_with(None)).map(|e| e.0)
}

fn norm_cmd(cfg: &ExperimentConfig) -> Run {
    let fs = inputs(cfg, "catalog")?;
    if cfg.multiplier.is_some() {
        return holder(cfg, &fs);
    }
    let tol = cfg.tol.unwrap_or(1e-6);
    let rows = fs
        .par_iter()
        .map(|f| {
            let t = estimate(f.dist.alexiewicz_norm_with(None))?;
            let e = estimate(f.dist.alexiewicz_norm_equiv_with(None))?;
            Ok((f, t, e))
        })
        .collect::<torus_cpi::Result<Vec<_>>>()?;
    let mut table = ResultTable::new(&[
        "f", "norm_t", "error", "resolution", "converged", "norm_equiv", "expected", "rel_err",
    ]);
    table.meta("tolerance", tol);
    let mut violations = Vec::new();
    for (f, (v, err, res, conv), (eq, _, _, _)) in rows {
        let expected = known_norm(&f.label);
        let rel = expected.map(|x| (v - x).abs() / x);
        if let Some(r) = rel.filter(|r| *r > tol) {
            violations.push(format!("{}: norm {v} is off the closed form by {r:e}", f.label));
        }
        // Windows that wrap past π pick up the drift, so 2‖f‖′ alone is not an upper bound.
        let top = 2.0 * eq + f.dist.primitive().drift().norm();
        let slack = 1e-6 * v.max(1e-300);
        if !(eq <= v + slack && v <= top + slack) {
            violations.push(format!("{}: norm {v} leaves the band [{eq}, {top}]", f.label));
        }
        table.push(vec![
            f.label.clone(),
            num(v),
            num(err),
            res.to_string(),
            conv.to_string(),
            num(eq),
            expected.map(num).unwrap_or_default(),
            rel.map(num).unwrap_or_default(),
        ]);
    }
    outcome(table, violations)
}

/// `|∫fg| ≤ |F(π)| inf|g| + ‖f‖ Vg ≤ ‖f‖ ‖g‖_BV` for every pair.
fn holder(cfg: &ExperimentConfig, fs: &[Input]) -> Run {
    let gs = mults(cfg, "testset")?;
    let tol = cfg.tol.unwrap_or(1e-8);
    let rows = pairs(fs, &gs)
        .into_par_iter()
        .map(|(f, g)| Ok((f, g, holder_check(&f.dist, &g.g, tol)?)))
        .collect::<torus_cpi::Result<Vec<_>>>()?;
    let mut table = ResultTable::new(&["f", "g", "lhs", "mid", "rhs", "slack", "holds"]);
    let mut violations = Vec::new();
    for (f, g, r) in rows {
        if !r.holds {
            violations.push(format!("{} × {}: Hölder chain fails ({} ≤ {} ≤ {})", f.label, g.label, r.lhs, r.mid, r.rhs));
        }
        table.push(vec![
            f.label.clone(),
            g.label.clone(),
            num(r.lhs),
            num(r.mid),
            num(r.rhs),
            num(r.slack()),
            r.holds.to_string(),
        ]);
    }
    outcome(table, violations)
}

fn coeffs_cmd(cfg: &ExperimentConfig) -> Run {
    let fs = inputs(cfg, "catalog")?;
    let window = cfg.window.unwrap_or(16);
    let mut violations = Vec::new();
    if cfg.growth == Some(true) {
        let mut table = ResultTable::new(&[
            "f", "n", "re", "im", "abs", "bound_e", "bound_f", "bound_h", "ratio",
        ]);
        table.meta("growth_tolerance", GROWTH_TOL);
        for f in &fs {
            let r = growth_report(&f.dist, window)?;
            table.meta(&format!("norm[{}]", f.label), num(r.norm));
            for row in &r.rows {
                if !row.holds(GROWTH_TOL) {
                    violations.push(format!(
                        "{}: |f̂({})| = {} exceeds a growth bound ({}, {})",
                        f.label, row.n, row.abs, row.bound_f, row.bound_h
                    ));
                }
                table.push(vec![
                    f.label.clone(),
                    row.n.to_string(),
                    num(row.re),
                    num(row.im),
                    num(row.abs),
                    num(row.bound_e),
                    num(row.bound_f),
                    num(row.bound_h),
                    num(row.ratio),
                ]);
            }
        }
        return outcome(table, violations);
    }
    let mut table = ResultTable::new(&["f", "n", "re", "im", "abs"]);
    for f in &fs {
        let c = coeffs(&f.dist, window)?;
        let d = d_norm(&c);
        table.meta(&format!("d_norm[{}]", f.label), format!("{} at n = {}", num(d.value), d.at));
        for (n, v) in c.iter() {
            table.push(vec![f.label.clone(), n.to_string(), num(v.re), num(v.im), num(v.norm())]);
        }
    }
    outcome(table, violations)
}

fn convolve_cmd(cfg: &ExperimentConfig) -> Run {
    if cfg.demo == Some(true) {
        return demo(cfg);
    }
    if cfg.l1 == Some(true) || cfg.multiplier.as_deref() == Some("rsqrt") {
        return l1(cfg);
    }
    if cfg.window.is_some() {
        return theorem(cfg);
    }
    let fs = inputs(cfg, "exp:1")?;
    let gs = mults(cfg, "square")?;
    let points = cfg.points.unwrap_or(256);
    let mut table = ResultTable::new(&["f", "g", "x", "re", "im"]);
    let mut violations = Vec::new();
    for (f, g) in pairs(&fs, &gs) {
        let h = convolve_bv(&f.dist, &g.g, points)?;
        let bound = lenient_norm(&f.dist)? * g.g.variation().bv_norm;
        let sup = h.sup_abs();
        table.meta(&format!("sup[{} * {}]", f.label, g.label), format!("{} ≤ {}", num(sup), num(bound)));
        if sup > bound * (1.0 + 1e-6) + 1e-12 {
            violations.push(format!("{} * {}: sup {sup} exceeds ‖f‖‖g‖_BV = {bound}", f.label, g.label));
        }
        for (x, v) in h.points() {
            table.push(vec![f.label.clone(), g.label.clone(), num(x), num(v.re), num(v.im)]);
        }
    }
    outcome(table, violations)
}

fn theorem(cfg: &ExperimentConfig) -> Run {
    let fs = inputs(cfg, "exp:1")?;
    let gs = mults(cfg, "square")?;
    let window = cfg.window.unwrap_or(16);
    let tol = cfg.tol.unwrap_or(1e-5);
    let reports = pairs(&fs, &gs)
        .into_par_iter()
        .map(|(f, g)| Ok((f, g, convolution_theorem_check(&f.dist, &g.g, window)?)))
        .collect::<torus_cpi::Result<Vec<_>>>()?;
    let mut table = ResultTable::new(&["f", "g", "n", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "gap", "error"]);
    table.meta("tolerance", tol);
    let mut violations = Vec::new();
    for (f, g, r) in reports {
        if r.max_gap > tol {
            violations.push(format!("{} * {}: transform gap {:e} exceeds {tol:e}", f.label, g.label, r.max_gap));
        }
        for row in r.rows {
            table.push(vec![
                f.label.clone(),
                g.label.clone(),
                row.n.to_string(),
                num(row.lhs.re),
                num(row.lhs.im),
                num(row.rhs.re),
                num(row.rhs.im),
                num(row.gap),
                num(row.error),
            ]);
        }
    }
    outcome(table, violations)
}

fn l1(cfg: &ExperimentConfig) -> Run {
    let fs = inputs(cfg, "exp:1")?;
    let [f] = fs.as_slice() else {
        return Err(UsageError("the L¹ convolution takes a single distribution".into()).into());
    };
    let (label, g) = l1_function(cfg.multiplier.as_deref().unwrap_or("rsqrt"))?;
    let r = convolve_l1(&f.dist, &g, cfg.tol.unwrap_or(1e-6))?;
    let mut table = ResultTable::new(&["cells", "difference"]);
    table.meta("f", &f.label);
    table.meta("g", &label);
    table.meta("g_l1", num(r.g_l1));
    table.meta("f_norm", num(r.f_norm));
    table.meta("norm", num(r.norm));
    table.meta("bound", num(r.f_norm * r.g_l1));
    let mut violations = Vec::new();
    if !r.bound_holds {
        violations.push(format!("‖f∗g‖ = {} exceeds ‖f‖‖g‖₁ = {}", r.norm, r.f_norm * r.g_l1));
    }
    for l in &r.levels {
        table.push(vec![l.cells.to_string(), num(l.difference)]);
    }
    outcome(table, violations)
}

fn demo(cfg: &ExperimentConfig) -> Run {
    let ns = ns_or(cfg, &[1, 4, 16, 64, 256]);
    let rows = bilinear_unboundedness_demo(&ns)?;
    let mut table = ResultTable::new(&["n", "dist_norm", "dist_bound", "norm_lower", "lower_bound", "ratio"]);
    let mut violations = Vec::new();
    for r in rows {
        if r.dist_norm > r.dist_bound * (1.0 + 1e-9) {
            violations.push(format!("n = {}: ‖f_n‖ = {} exceeds its bound {}", r.n, r.dist_norm, r.dist_bound));
        }
        table.push(vec![
            r.n.to_string(),
            num(r.dist_norm),
            num(r.dist_bound),
            num(r.norm_lower),
            num(r.lower_bound),
            num(r.ratio),
        ]);
    }
    outcome(table, violations)
}

/// `f ∗ k_n` from coefficients: `Σ c_k f̂(k) e^{ikx}`, with the Dirichlet
/// kernel divided by `2π`.
fn approximant(c: &FourierCoeffs, kind: KernelKind, n: usize) -> DistributionAc {
    let k = kernel(kind, n);
    let scale = if kind == KernelKind::Dirichlet { 1.0 / (2.0 * PI) } else { 1.0 };
    torus_cpi::TrigPoly::from_fn(k.poly.degree(), |j| {
        k.poly.coeff(j) * c.get(j).expect("inside window") * scale
    })
    .to_distribution()
}

fn kernel_sweep(cfg: &ExperimentConfig) -> Run {
    let kind = cfg.kernel.unwrap_or(KernelKind::Fejer);
    if cfg.distribution.is_none() {
        let deltas = cfg.deltas.clone().unwrap_or_else(|| vec![0.5, 1.0]);
        let r = validate_summability(kind, cfg.n_max.unwrap_or(64), &deltas)?;
        let mut header = vec!["n".to_string(), "integral".into(), "norm_l1".into(), "log_ratio".into()];
        header.extend(deltas.iter().map(|d| format!("tail_{d}")));
        let mut table = ResultTable::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
        table.meta("kernel", kind);
        table.meta("integral_one", r.integral_one);
        table.meta("l1_bound", num(r.l1_bound));
        table.meta("l1_bounded", r.l1_bounded);
        table.meta("tails_vanish", r.tails_vanish);
        let mut violations = Vec::new();
        if !r.integral_one {
            violations.push(format!("{kind}: kernel integrals differ from 1"));
        }
        for row in r.rows {
            let mut cells = vec![row.n.to_string(), num(row.integral), num(row.norm_l1), num(row.log_ratio)];
            cells.extend(row.tails.iter().map(|t| num(*t)));
            table.push(cells);
        }
        return outcome(table, violations);
    }
    let fs = inputs(cfg, "catalog")?;
    let ns = ns_or(cfg, &[4, 8, 16, 32, 64, 128]);
    let top = ns.iter().copied().max().expect("ns is nonempty");
    let window = if kind == KernelKind::ValleePoussin { 2 * top + 1 } else { top };
    let mut table = ResultTable::new(&["f", "n", "norm_t", "relative"]);
    table.meta("kernel", kind);
    for f in &fs {
        let c = coeffs(&f.dist, window)?;
        let fnorm = lenient_norm(&f.dist)?;
        let errs = ns
            .par_iter()
            .map(|&n| lenient_norm(&approximant(&c, kind, n).sub(&f.dist)))
            .collect::<torus_cpi::Result<Vec<_>>>()?;
        for (n, e) in ns.iter().zip(errs) {
            table.push(vec![f.label.clone(), n.to_string(), num(e), num(e / fnorm)]);
        }
    }
    outcome(table, Vec::new())
}

fn dirichlet_bound(cfg: &ExperimentConfig) -> Run {
    let n_max = cfg.n_max.unwrap_or(64);
    let tol = cfg.tol.unwrap_or(1e-6);
    let rows = (1..=n_max)
        .into_par_iter()
        .map(dirichlet_alexiewicz_norm)
        .collect::<torus_cpi::Result<Vec<_>>>()?;
    let bound = 4.0 * PI;
    let mut table = ResultTable::new(&["n", "norm_t", "closed_form", "gap", "norm_l1", "bound"]);
    table.meta("tolerance", tol);
    let mut violations = Vec::new();
    for r in rows {
        let gap = (r.norm_t - r.closed_form).abs();
        if r.norm_t > bound * (1.0 + 1e-9) {
            violations.push(format!("n = {}: ‖D_n‖ = {} exceeds 4π", r.n, r.norm_t));
        }
        if gap > tol {
            violations.push(format!("n = {}: norm {} is {gap:e} off the closed form", r.n, r.norm_t));
        }
        table.push(vec![
            r.n.to_string(),
            num(r.norm_t),
            num(r.closed_form),
            num(gap),
            num(r.norm_l1),
            num(bound),
        ]);
    }
    outcome(table, violations)
}

fn divergence(cfg: &ExperimentConfig) -> Run {
    let ns = ns_or(cfg, &[8, 32, 64, 128]);
    let tol = cfg.tol.unwrap_or(1e-6);
    let rows = ns
        .par_iter()
        .map(|&n| divergence_construction(n))
        .collect::<torus_cpi::Result<Vec<_>>>()?;
    let mut table = ResultTable::new(&[
        "n",
        "osc",
        "log_n",
        "ratio",
        "half_log_n",
        "derivative_norm",
        "value_at_zero",
        "value_at_zero_integral",
        "value_at_pi",
        "sec_integral",
    ]);
    let mut violations = Vec::new();
    for r in rows {
        if (r.derivative_norm - 2.0).abs() > tol {
            violations.push(format!("n = {}: ‖F'‖ = {} differs from 2", r.n, r.derivative_norm));
        }
        table.push(vec![
            r.n.to_string(),
            num(r.osc),
            num(r.log_n),
            num(r.ratio),
            num(0.5 * r.log_n),
            num(r.derivative_norm),
            num(r.value_at_zero),
            num(r.value_at_zero_integral),
            num(r.value_at_pi),
            num(r.sec_integral),
        ]);
    }
    outcome(table, violations)
}

fn parseval(cfg: &ExperimentConfig) -> Run {
    let fs = inputs(cfg, "const1")?;
    let gs = mults(cfg, "one")?;
    let ns = match (cfg.ns.clone(), cfg.n) {
        (Some(ns), _) => ns,
        (None, Some(n)) => vec![n],
        (None, None) => vec![128],
    };
    let top = ns.iter().copied().max().expect("ns is nonempty");
    let gcs: Vec<_> = gs.iter().map(|g| g_coeffs(&g.g, top)).collect();
    let mut sums = Vec::new();
    for f in &fs {
        // one coefficient window per distribution, shared by every multiplier
        let fc = coeffs(&f.dist, top)?;
        for (g, gc) in gs.iter().zip(&gcs) {
            let target = integrate_product(&f.dist, &g.g)?;
            let rows = ns
                .iter()
                .map(|&n| parseval_from(&fc, gc, target, n))
                .collect::<torus_cpi::Result<Vec<_>>>()?;
            sums.push((f, g, rows));
        }
    }
    let mut table = ResultTable::new(&[
        "f", "g", "n", "value_re", "value_im", "target_re", "target_im", "gap", "printed_re", "printed_im",
    ]);
    table.meta("value", "(1/2π) Σ (1 − |k|/(n+1)) f̂(k) ĝ(−k)");
    table.meta("printed", "Σ (1 − |k|/(n+1)) f̂(k) ĝ(k), without the 1/2π factor and the reflection; 4π² for f = g = 1");
    let mut violations = Vec::new();
    for (f, g, rows) in sums {
        for s in rows {
            if let Some(tol) = cfg.tol {
                if s.gap > tol * s.target.norm().max(1.0) {
                    violations.push(format!("{} × {} at n = {}: gap {:e}", f.label, g.label, s.n, s.gap));
                }
            }
            table.push(vec![
                f.label.clone(),
                g.label.clone(),
                s.n.to_string(),
                num(s.value.re),
                num(s.value.im),
                num(s.target.re),
                num(s.target.im),
                num(s.gap),
                num(s.printed.re),
                num(s.printed.im),
            ]);
        }
    }
    outcome(table, violations)
}

fn fejer_lemma(cfg: &ExperimentConfig) -> Run {
    let fs = inputs(cfg, "const1")?;
    let gs = mults(cfg, "square")?;
    let ns: Vec<u32> = ns_or(cfg, &[1, 2, 4, 8, 16, 32, 64])
        .into_iter()
        .map(|n| u32::try_from(n).map_err(|_| UsageError(format!("dilation {n} is too large"))))
        .collect::<Result<_, _>>()?;
    let reports = pairs(&fs, &gs)
        .into_par_iter()
        .map(|(f, g)| Ok((f, g, fejer_lemma_sweep(&f.dist, &g.g, &ns, f.lebesgue)?)))
        .collect::<torus_cpi::Result<Vec<_>>>()?;
    let mut table = ResultTable::new(&["f", "g", "n", "re", "im", "abs", "over_n", "limit_re", "limit_im"]);
    let mut violations = Vec::new();
    for (f, g, r) in reports {
        if let (Some(tol), Some(limit), Some(last)) = (cfg.tol, r.limit, r.rows.last()) {
            if (last.value - limit).norm() > tol {
                violations.push(format!("{} × {}: I_{} is {:e} from its limit", f.label, g.label, last.n, (last.value - limit).norm()));
            }
        }
        let (lre, lim) = match r.limit {
            Some(l) => (num(l.re), num(l.im)),
            None => (String::new(), String::new()),
        };
        for row in r.rows {
            table.push(vec![
                f.label.clone(),
                g.label.clone(),
                row.n.to_string(),
                num(row.value.re),
                num(row.value.im),
                num(row.value.norm()),
                num(row.over_n),
                lre.clone(),
                lim.clone(),
            ]);
        }
    }
    outcome(table, violations)
}

fn bv_test(cfg: &ExperimentConfig) -> Run {
    let n_max = cfg.n_max.unwrap_or(64);
    let mut table = ResultTable::new(&["g", "n", "bv_norm", "bound"]);
    let mut violations = Vec::new();
    if let Some(c) = &cfg.coefficients {
        let bound = cfg
            .bound
            .ok_or_else(|| UsageError("explicit coefficients need a bound".into()))?;
        let window = c.len() / 2;
        let a = FourierCoeffs::from_fn(window, |k| {
            let [re, im] = c[(k + window as i64) as usize];
            C64::new(re, im)
        });
        let r = bv_coefficient_test(&a, bound, n_max.min(window))?;
        table.meta("passes[custom]", r.passes);
        table.meta("max[custom]", num(r.max));
        for row in r.rows {
            table.push(vec!["custom".into(), row.n.to_string(), num(row.bv_norm), num(bound)]);
        }
        return outcome(table, violations);
    }
    let tol = cfg.tol.unwrap_or(0.05);
    for g in mults(cfg, "testset")? {
        let bound = g.g.variation().bv_norm + tol;
        let r = bv_coefficient_test(&g_coeffs(&g.g, n_max), bound, n_max)?;
        table.meta(&format!("passes[{}]", g.label), r.passes);
        table.meta(&format!("max[{}]", g.label), num(r.max));
        if !r.passes {
            violations.push(format!("{}: ‖σ_n‖_BV reaches {} above {bound}", g.label, r.max));
        }
        for row in r.rows {
            table.push(vec![g.label.clone(), row.n.to_string(), num(row.bv_norm), num(bound)]);
        }
    }
    outcome(table, violations)
}

fn fubini(cfg: &ExperimentConfig) -> Run {
    let fs = inputs(cfg, "xsin,exp:2,cantor")?;
    let gs = mults(cfg, "square,cos1,bump")?;
    let intervals = cfg
        .intervals
        .clone()
        .unwrap_or_else(|| vec![[0.0, 1.0], [-1.0, 1.0], [-3.0, 2.0]]);
    let tol = cfg.tol.unwrap_or(1e-6);
    let jobs: Vec<_> = pairs(&fs, &gs)
        .into_iter()
        .flat_map(|(f, g)| intervals.iter().map(move |iv| (f, g, *iv)))
        .collect();
    let reports = jobs
        .into_par_iter()
        .map(|(f, g, [a, b])| Ok((f, g, fubini_check(&f.dist, &g.g, a, b)?)))
        .collect::<torus_cpi::Result<Vec<_>>>()?;
    let mut table = ResultTable::new(&["f", "g", "a", "b", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "gap"]);
    table.meta("tolerance", tol);
    let mut violations = Vec::new();
    for (f, g, r) in reports {
        if r.gap > tol {
            violations.push(format!("{} × {} on [{}, {}]: gap {:e}", f.label, g.label, r.a, r.b, r.gap));
        }
        table.push(vec![
            f.label.clone(),
            g.label.clone(),
            num(r.a),
            num(r.b),
            num(r.lhs.re),
            num(r.lhs.im),
            num(r.rhs.re),
            num(r.rhs.im),
            num(r.gap),
        ]);
    }
    outcome(table, violations)
}
