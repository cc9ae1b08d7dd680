//! Acceptance suite. Runs one experiment per criterion, prints one PASS/FAIL
//! line each and exits nonzero if any criterion fails.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::time::Duration;

use torus_cpi_validation::{decayed, invoke, Run};

/// `I_n/n` at or below this counts as decayed; symmetric pairs give an exact zero.
const OVER_N_FLOOR: f64 = 1e-6;

/// Commands rerun by the determinism check must finish within this.
const RERUN_BUDGET: Duration = Duration::from_secs(10);

thread_local! {
    static HISTORY: RefCell<Vec<(Vec<String>, String, Duration)>> = const { RefCell::new(Vec::new()) };
}

/// Runs a command and remembers its CSV body for the determinism check.
fn run(args: &[&str]) -> Run {
    let r = invoke(args);
    let key = args.iter().map(|a| a.to_string()).collect();
    HISTORY.with(|h| h.borrow_mut().push((key, r.body.clone(), r.elapsed)));
    r
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn exact_exp_norms() -> Verdict {
    let r = run(&["norm", "--f", "exp:1..32"]);
    let worst = r.max("rel_err");
    let fast = r.elapsed < Duration::from_secs(5);
    verdict(
        r.rows.len() == 32 && worst < 1e-6 && fast && r.code == 0,
        format!("max rel err {worst:.2e}, {:.2}s", r.elapsed.as_secs_f64()),
    )
}

fn osc_norms() -> Verdict {
    let r = run(&["norm", "--f", "osc:0.25,osc:0.5,osc:0.75", "--tol", "1e-5"]);
    let mut worst: f64 = 0.0;
    for (i, a) in [0.25f64, 0.5, 0.75].iter().enumerate() {
        let expect = PI.powf(1.0 - a) / (1.0 - a);
        worst = worst.max((r.col(i, "norm_t") - expect).abs() / expect);
    }
    verdict(worst < 1e-5 && r.code == 0, format!("max rel err {worst:.2e}"))
}

fn coefficient_bounds(g: &Run) -> Verdict {
    let slack = |abs: f64| 1e-6 * (1.0 + abs);
    let bad = (0..g.rows.len())
        .filter(|&i| {
            let abs = g.col(i, "abs");
            abs > g.col(i, "bound_f") + slack(abs) || abs > g.col(i, "bound_h") + slack(abs)
        })
        .count();
    verdict(
        bad == 0 && g.code == 0 && g.rows.len() == 9 * 128,
        format!("{bad} violations over {} rows", g.rows.len()),
    )
}

fn riemann_lebesgue(g: &Run) -> Verdict {
    let mut failed = Vec::new();
    for f in g.labels("f") {
        for sign in ["", "-"] {
            let at = |n: &str| g.col(g.find(&[("f", &f), ("n", &format!("{sign}{n}"))]), "ratio");
            let (r4, r64) = (at("4"), at("64"));
            if !decayed(r64, r4, 0.2) {
                failed.push(format!("{f}[{sign}n] {r64:.3e} vs {r4:.3e}"));
            }
        }
    }
    verdict(failed.is_empty(), if failed.is_empty() { "all entries".into() } else { failed.join("; ") })
}

fn convolution_theorem() -> Verdict {
    let r = run(&["convolve", "--f", "exp:1,xsin,cantor", "--g", "square,cos1,bump", "--N", "16"]);
    let gap = r.max("gap");
    let fast = r.elapsed < Duration::from_secs(60);
    verdict(
        r.rows.len() == 9 * 33 && gap < 1e-5 && fast,
        format!("max gap {gap:.2e}, {:.1}s", r.elapsed.as_secs_f64()),
    )
}

fn holder_chain() -> Verdict {
    let r = run(&["norm", "--f", "catalog", "--g", "testset"]);
    let bad = r.rows.iter().filter(|row| row["holds"] != "true").count();
    let slack = (0..r.rows.len()).map(|i| r.col(i, "slack")).fold(f64::INFINITY, f64::min);
    verdict(
        bad == 0 && r.rows.len() == 45 && r.code == 0,
        format!("{bad} violations, min slack {slack:.3e}"),
    )
}

fn dirichlet_bound() -> Verdict {
    let r = run(&["dirichlet-bound", "--n-max", "64"]);
    let top = r.max("norm_t");
    let gap = r.max("gap");
    verdict(
        r.rows.len() == 64 && top <= 4.0 * PI && gap < 1e-6,
        format!("max norm {top:.6} ≤ 4π, max closed-form gap {gap:.2e}"),
    )
}

fn dirichlet_l1_growth() -> Verdict {
    let r = run(&["kernel-sweep", "--kernel", "dirichlet", "--n-max", "128"]);
    let at = |n: &str| r.col(r.find(&[("n", n)]), "log_ratio");
    let (a, b) = (at("64"), at("128"));
    let inside = |x: f64| (0.3..=0.5).contains(&x);
    verdict(inside(a) && inside(b), format!("‖D_n‖₁/ln n = {a:.4} (64), {b:.4} (128)"))
}

fn sweep_ratio(args: &[&str], lo: &str, hi: &str, factor: f64) -> Verdict {
    let r = run(args);
    if r.code != 0 {
        return verdict(false, format!("exit {}: {}", r.code, r.error.as_deref().unwrap_or("")));
    }
    let mut failed = Vec::new();
    for f in r.labels("f") {
        let at = |n: &str| r.col(r.find(&[("f", &f), ("n", n)]), "norm_t");
        let (a, b) = (at(lo), at(hi));
        if !decayed(b, a, factor) {
            failed.push(format!("{f} {:.3}", b / a));
        }
    }
    verdict(
        failed.is_empty(),
        if failed.is_empty() { "all entries".into() } else { format!("ratio too large: {}", failed.join(", ")) },
    )
}

fn divergence() -> Verdict {
    let r = run(&["divergence", "--ns", "32,64,128"]);
    let ok = (0..r.rows.len()).all(|i| {
        r.col(i, "osc") >= 0.5 * r.col(i, "log_n") && (r.col(i, "derivative_norm") - 2.0).abs() <= 1e-6
    });
    let fast = r.elapsed < Duration::from_secs(120);
    let oscs: Vec<String> = (0..r.rows.len()).map(|i| format!("{:.2}", r.col(i, "osc"))).collect();
    verdict(
        ok && fast && r.rows.len() == 3,
        format!("osc {} , {:.2}s", oscs.join(", "), r.elapsed.as_secs_f64()),
    )
}

const FUBINI: [&str; 12] = [
    "fubini-check",
    "--f",
    "xsin,exp:2,cantor",
    "--g",
    "square,cos1,bump",
    "--interval",
    "0:1",
    "--interval",
    "-1:1",
    "--interval",
    "-3:2",
    "--tol",
];

fn fubini_args() -> Vec<&'static str> {
    let mut a = FUBINI.to_vec();
    a.push("1e-6");
    a
}

fn fubini() -> Verdict {
    let r = run(&fubini_args());
    let gap = r.max("gap");
    verdict(r.rows.len() == 27 && gap < 1e-6, format!("max gap {gap:.2e}"))
}

fn parseval() -> Verdict {
    let r = run(&["parseval", "--f", "catalog", "--g", "testset,one", "--n", "128"]);
    let mut failed = Vec::new();
    for i in 0..r.rows.len() {
        if r.col(i, "gap") >= 1e-3 {
            failed.push(format!("{}×{} {:.1e}", r.rows[i]["f"], r.rows[i]["g"], r.col(i, "gap")));
        }
    }
    let one = r.find(&[("f", "const1"), ("g", "one")]);
    let exact = (r.col(one, "value_re") - 2.0 * PI).abs() < 1e-12 && (r.col(one, "target_re") - 2.0 * PI).abs() < 1e-12;
    verdict(
        failed.is_empty() && exact,
        format!(
            "1×1 → {} (printed form {}); {} pairs over 1e-3{}",
            r.rows[one]["value_re"],
            r.rows[one]["printed_re"],
            failed.len(),
            if failed.is_empty() { String::new() } else { format!(": {}", failed.join(", ")) }
        ),
    )
}

fn fejer_lemma() -> Verdict {
    let r = run(&["fejer-lemma", "--f", "catalog", "--g", "testset", "--ns", "2,64"]);
    let mut failed = Vec::new();
    for f in r.labels("f") {
        for g in r.labels("g") {
            let at = |n: &str| r.find(&[("f", &f), ("g", &g), ("n", n)]);
            let (i2, i64) = (at("2"), at("64"));
            let (a, b) = (r.col(i2, "over_n"), r.col(i64, "over_n"));
            if !(b < 0.05 * a || b <= OVER_N_FLOOR) {
                failed.push(format!("{f}×{g} decay {:.2}", b / a));
            }
            if !r.rows[i64]["limit_re"].is_empty() {
                let lim = (r.col(i64, "limit_re"), r.col(i64, "limit_im"));
                let d = (r.col(i64, "re") - lim.0).hypot(r.col(i64, "im") - lim.1);
                if d >= 1e-3 {
                    failed.push(format!("{f}×{g} limit off by {d:.2e}"));
                }
            }
        }
    }
    verdict(failed.is_empty(), if failed.is_empty() { "all pairs".into() } else { failed.join("; ") })
}

fn bv_characterization() -> Verdict {
    let r = run(&["bv-test", "--g", "testset", "--n-max", "64"]);
    let fails: Vec<_> = r.meta.iter().filter(|(k, v)| k.starts_with("passes[") && *v != "true").collect();
    let count = r.meta.keys().filter(|k| k.starts_with("passes[")).count();
    verdict(fails.is_empty() && count == 5 && r.code == 0, format!("{count} multipliers, {} over the bound", fails.len()))
}

fn determinism() -> Verdict {
    let earlier = HISTORY.with(|h| h.borrow().clone());
    let mut compared = 0;
    let mut differing = Vec::new();
    for (args, body, elapsed) in earlier.iter().filter(|(_, _, t)| *t < RERUN_BUDGET) {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        compared += 1;
        if invoke(&args).body != *body || body.is_empty() {
            differing.push(format!("{} ({:.1}s)", args.join(" "), elapsed.as_secs_f64()));
        }
    }
    let skipped = earlier.len() - compared;
    verdict(
        differing.is_empty() && compared >= 8,
        format!("{compared} commands rerun, {skipped} slower ones not rerun, differing: {differing:?}"),
    )
}

fn main() {
    // the grid override would change what every criterion measures
    std::env::remove_var("TORUS_CPI_GRID");
    let growth = run(&["coeffs", "--f", "catalog", "--N", "64", "--growth"]);
    let criteria: Vec<(&str, Box<dyn Fn() -> Verdict>)> = vec![
        ("exact norms of e_j, j ≤ 32", Box::new(exact_exp_norms)),
        ("norms of f_α", Box::new(osc_norms)),
        ("coefficient growth bounds", Box::new(|| coefficient_bounds(&growth))),
        ("Riemann-Lebesgue trend", Box::new(|| riemann_lebesgue(&growth))),
        ("convolution theorem", Box::new(convolution_theorem)),
        ("Hölder chain", Box::new(holder_chain)),
        ("Dirichlet kernel norm bound", Box::new(dirichlet_bound)),
        ("Dirichlet L¹ growth", Box::new(dirichlet_l1_growth)),
        (
            "Fejér means converge in norm",
            Box::new(|| sweep_ratio(&["kernel-sweep", "--kernel", "fejer", "--f", "catalog", "--ns", "4,128"], "4", "128", 0.1)),
        ),
        (
            "partial sums converge for integrable f",
            Box::new(|| {
                sweep_ratio(&["kernel-sweep", "--kernel", "dirichlet", "--f", "lebesgue", "--ns", "8,128"], "8", "128", 0.2)
            }),
        ),
        ("divergence construction", Box::new(divergence)),
        ("Fubini equality", Box::new(fubini)),
        ("Parseval sums", Box::new(parseval)),
        ("Fejér lemma", Box::new(fejer_lemma)),
        ("BV coefficient characterization", Box::new(bv_characterization)),
        ("determinism", Box::new(determinism)),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        if !v.pass {
            failures += 1;
        }
        println!("criterion {:>2} {}: {name}: {}", i + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
