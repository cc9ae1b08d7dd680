use std::process::{Command, Output};

use torus_cpi_cli::table::split_rendered;

fn torus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torus-cpi"))
        .args(args)
        .env_remove("TORUS_CPI_GRID")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn meta(o: &Output, key: &str) -> Option<String> {
    split_rendered(&stdout(o)).0.into_iter().find(|(k, _)| k == key).map(|(_, v)| v)
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(torus(&["--help"]).status.code(), Some(0));
    let v = torus(&["--version"]);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["plot"],
        vec![],
        vec!["norm", "--f", "nonsense"],
        vec!["norm", "--f", "exp:1", "--tol", "-1"],
        vec!["norm", "--bogus-flag"],
        vec!["bv-test", "--g", "cos:0"],
        vec!["kernel-sweep", "--kernel", "poisson"],
    ] {
        let o = torus(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
        assert!(o.stdout.is_empty(), "{args:?} wrote a table");
    }
}

#[test]
fn config_file_rejects_unknown_fields() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"command": "norm", "distributon": "exp:1"}"#).unwrap();
    let o = torus(&["--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("distributon"));
    assert_eq!(torus(&["--config", "/nonexistent/cfg.json"]).status.code(), Some(1));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, r#"{"command": "norm", "distribution": "exp:4", "tol": 1e-3}"#).unwrap();
    let o = torus(&["--config", path.to_str().unwrap(), "--f", "exp:2"]);
    assert_eq!(o.status.code(), Some(0));
    let (_, body) = split_rendered(&stdout(&o));
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let rows: Vec<_> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][0], "exp:2");
    let norm: f64 = rows[0][1].parse().unwrap();
    assert!((norm - 1.0).abs() < 1e-9);
    let cfg = meta(&o, "config").unwrap();
    assert!(cfg.contains("\"tol\":0.001"), "{cfg}");
}

#[test]
fn violations_exit_two() {
    let o = torus(&["parseval", "--f", "exp:1", "--g", "square", "--tol", "1e-9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("violation"));
    assert_eq!(meta(&o, "violations").as_deref(), Some("1"));
    assert!(!split_rendered(&stdout(&o)).1.is_empty(), "the table is still written");
}

#[test]
fn custom_multiplier_over_bound_is_reported_not_failed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(
        &path,
        r#"{"command": "bv-test", "coefficients": [[0,0],[1,0],[0,0]], "bound": 0.1, "n_max": 8}"#,
    )
    .unwrap();
    let o = torus(&["--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(meta(&o, "passes[custom]").as_deref(), Some("false"));
}

#[test]
fn output_file_matches_stdout_body() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let o = torus(&["dirichlet-bound", "--n-max", "8", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    let printed = stdout(&torus(&["dirichlet-bound", "--n-max", "8"]));
    assert_eq!(split_rendered(&written).1, split_rendered(&printed).1);
    let leftovers = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(leftovers, 1, "no temporary files remain");
}

#[test]
fn metadata_preamble() {
    let o = torus(&["dirichlet-bound", "--n-max", "4"]);
    let text = stdout(&o);
    assert!(text.starts_with('#'));
    for key in ["command", "version", "config", "started_unix", "wall_time_s", "violations"] {
        assert!(meta(&o, key).is_some(), "missing {key}");
    }
    assert_eq!(meta(&o, "command").as_deref(), Some("dirichlet-bound"));
    assert_eq!(meta(&o, "version").as_deref(), Some(env!("CARGO_PKG_VERSION")));
}

#[test]
fn grid_environment_variable() {
    let with = |g: &str| {
        Command::new(env!("CARGO_BIN_EXE_torus-cpi"))
            .args(["norm", "--f", "exp:3"])
            .env("TORUS_CPI_GRID", g)
            .output()
            .unwrap()
    };
    let ok = with("4096");
    assert_eq!(ok.status.code(), Some(0));
    assert!(meta(&ok, "config").is_some());
    assert_eq!(with("zero").status.code(), Some(1));
    assert_eq!(with("0").status.code(), Some(1));
}

#[test]
fn runs_are_deterministic() {
    let args = ["fejer-lemma", "--f", "exp:1", "--g", "square", "--ns", "1,2,8"];
    let a = stdout(&torus(&args));
    let b = stdout(&torus(&args));
    assert_eq!(split_rendered(&a).1, split_rendered(&b).1);
}

#[test]
fn every_command_runs() {
    let cases: [&[&str]; 10] = [
        &["coeffs", "--f", "exp:2", "--N", "3"],
        &["norm", "--f", "exp:1"],
        &["convolve", "--f", "exp:1", "--g", "square", "--points", "8"],
        &["kernel-sweep", "--kernel", "fejer", "--n-max", "4"],
        &["dirichlet-bound", "--n-max", "3"],
        &["divergence", "--ns", "8"],
        &["parseval", "--f", "const1", "--g", "one", "--n", "4"],
        &["fejer-lemma", "--f", "const1", "--g", "one", "--ns", "1,2"],
        &["bv-test", "--g", "cos1", "--n-max", "8"],
        &["fubini-check", "--f", "exp:1", "--g", "cos1", "--interval", "0:1"],
    ];
    for args in cases {
        let o = torus(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let (_, body) = split_rendered(&stdout(&o));
        assert!(body.lines().count() >= 2, "{args:?} produced no rows");
    }
}

#[test]
fn config_fuzz_seeds_roundtrip() {
    use torus_cpi_cli::ExperimentConfig;
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus/config_json");
    let mut valid = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        if let Ok(cfg) = ExperimentConfig::from_json(&text) {
            if cfg.validate().is_ok() {
                valid += 1;
            }
            let json = serde_json::to_string(&cfg).unwrap();
            assert_eq!(ExperimentConfig::from_json(&json).unwrap(), cfg);
        }
    }
    assert!(valid >= 4);
}
