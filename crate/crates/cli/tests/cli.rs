use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cond-hardy"));
    c.env_remove("CONDHARDY_THREADS");
    c
}

/// Writes `config` into a fresh directory and runs it; returns (exit code, directory).
fn run_with(
    config: &str,
    prep: impl FnOnce(&Path),
    env: &[(&str, &str)],
) -> (i32, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    prep(dir.path());
    let cfg = dir.path().join("config.json");
    std::fs::write(&cfg, config).unwrap();
    let mut cmd = bin();
    cmd.arg("run").arg(&cfg);
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().unwrap();
    (out.status.code().unwrap(), dir)
}

fn run(config: &str) -> (i32, tempfile::TempDir) {
    run_with(config, |_| {}, &[])
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("out/manifest.json")).unwrap()).unwrap()
}

fn table(path: PathBuf) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|s| s.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn disk_cos3_reproduces_the_harmonic_extension() {
    let (code, dir) = run(r#"{"task": "dirichlet", "data": [{"cos": [[3, 1.0]]}]}"#);
    assert_eq!(code, 0);
    let (header, rows) = table(dir.path().join("out/fields.csv"));
    assert_eq!(header, ["x", "y", "U", "V", "abs_f"]);
    let mut err: f64 = 0.0;
    for r in &rows {
        let z = num_complex::Complex64::new(r[0], r[1]);
        err = err
            .max((r[2] - z.powu(3).re).abs())
            .max((r[3] - z.powu(3).im).abs());
    }
    assert!(err <= 1e-8, "{err}");
    let m = manifest(dir.path());
    assert_eq!(m["status"], "ok");
    for key in ["cb_residual", "trace_fidelity"] {
        let v = m["residuals"][key].as_f64().unwrap();
        assert!(v <= 1e-8, "{key} = {v}");
    }
    let (header, rows) = table(dir.path().join("out/trace_0.csv"));
    assert_eq!(header, ["theta", "data", "U", "V"]);
    assert_eq!(rows.len(), 64);
}

#[test]
fn neumann_with_nonzero_total_flux_is_a_config_error() {
    let (code, dir) = run(
        r#"{"task": "neumann", "domain": {"kind": "annulus", "rho": 0.5}, "data": [1.0, 1.0]}"#,
    );
    assert_eq!(code, 4);
    let m = manifest(dir.path());
    assert_eq!(m["error"]["kind"], "MeanNotZero");
    assert_eq!(m["error"]["operation"], "neumann.solve");
}

#[test]
fn neumann_with_balanced_flux_matches_its_data() {
    // outward flux 1 on the unit circle and 2 on the circle of radius 1/2
    let (code, dir) = run(
        r#"{"task": "neumann", "domain": {"kind": "annulus", "rho": 0.5}, "nu": "xdamped:0.3",
            "data": [{"constant": 1.0, "cos": [[2, 0.5]]}, {"constant": -2.0, "sin": [[1, 0.25]]}]}"#,
    );
    assert_eq!(code, 0);
    let m = manifest(dir.path());
    assert!(
        m["residuals"]["flux_fidelity"].as_f64().unwrap() < 1e-6,
        "{}",
        m["residuals"]
    );
}

#[test]
fn logarithmic_data_has_no_conjugate() {
    let rho: f64 = 0.5;
    let (code, dir) = run(
        r#"{"task": "conjugate", "domain": {"kind": "annulus", "rho": 0.5}, "data": [0.0, 1.0]}"#,
    );
    assert_eq!(code, 2);
    let m = manifest(dir.path());
    assert_eq!(m["error"]["kind"], "CompatibilityViolated");
    let expect = 2.0 * PI / rho.ln();
    for key in ["quadrature", "seeds"] {
        let got = m["residuals"]["periods"][key][0].as_f64().unwrap();
        assert!(
            (got - expect).abs() < 1e-8 * expect.abs(),
            "{key}: {got} vs {expect}"
        );
    }
}

#[test]
fn compatible_annulus_data_has_a_conjugate() {
    let (code, dir) = run(
        r#"{"task": "conjugate", "domain": {"kind": "annulus", "rho": 0.5}, "data": [{"cos": [[1, 1.0]]}, {"cos": [[1, 0.5]]}]}"#,
    );
    assert_eq!(code, 0);
    assert_eq!(
        manifest(dir.path())["setup"]["conjugate"]["available"],
        true
    );
}

#[test]
fn unknown_keys_and_bad_values_exit_4() {
    for cfg in [
        r#"{"task": "dirichlet", "data": [0.0], "colour": "red"}"#,
        r#"{"task": "dirichlet", "data": [0.0], "resolution": {"nr": 3}}"#,
        r#"{"task": "dirichlet", "data": [0.0], "nu": "wobble:1"}"#,
        r#"{"task": "dirichlet", "data": [0.0, 1.0]}"#,
        r#"{"task": "dirichlet", "data": [0.0], "resolution": {"n_theta": 60}}"#,
        r#"{"task": "dirichlet", "data": [0.0], "nu": "const:1.5"}"#,
        r#"{"task": "dirichlet", "domain": {"kind": "annulus", "rho": 1.5}, "data": [0.0, 0.0]}"#,
        r#"{"task": "bep", "data": []}"#,
    ] {
        let (code, _) = run(cfg);
        assert_eq!(code, 4, "{cfg}");
    }
}

#[test]
fn missing_config_file_exits_4() {
    let out = bin()
        .args(["run", "/nonexistent/config.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn identical_configs_give_identical_csv_bytes() {
    let cfg = r#"{"task": "dirichlet", "domain": {"kind": "annulus", "rho": 0.4}, "nu": "bump:0.3,0.2,0.1,0.5",
                 "data": [{"cos": [[2, 1.0]], "sin": [[1, 0.3]]}, {"constant": 0.2}], "resolution": {"n_r": 24, "n_theta": 32}}"#;
    let (a, da) = run(cfg);
    let (b, db) = run_with(cfg, |_| {}, &[("CONDHARDY_THREADS", "3")]);
    assert_eq!((a, b), (0, 0));
    for f in ["fields.csv", "trace_0.csv", "trace_1.csv"] {
        let x = std::fs::read(da.path().join("out").join(f)).unwrap();
        let y = std::fs::read(db.path().join("out").join(f)).unwrap();
        assert!(x == y, "{f} differs");
    }
}

#[test]
fn csv_numbers_carry_17_significant_digits() {
    let (_, dir) = run(
        r#"{"task": "dirichlet", "data": [{"cos": [[1, 1.0]]}], "resolution": {"n_r": 8, "n_theta": 16}}"#,
    );
    let text = std::fs::read_to_string(dir.path().join("out/trace_0.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,data,U,V"));
    for line in lines {
        for cell in line.split(',') {
            let (mant, exp) = cell.split_once('e').unwrap();
            assert_eq!(mant.trim_start_matches('-').len(), 18, "{cell}");
            exp.parse::<i32>().unwrap();
        }
    }
}

#[test]
fn thread_override_is_respected() {
    let cfg = r#"{"task": "dirichlet", "data": [0.5], "threads": 2, "resolution": {"n_r": 8, "n_theta": 16}}"#;
    let (code, dir) = run_with(cfg, |_| {}, &[("CONDHARDY_THREADS", "3")]);
    assert_eq!(code, 0);
    assert_eq!(manifest(dir.path())["threads"], 3);
    let (code, dir) = run(cfg);
    assert_eq!(code, 0);
    assert_eq!(manifest(dir.path())["threads"], 2);
    let (code, _) = run_with(cfg, |_| {}, &[("CONDHARDY_THREADS", "many")]);
    assert_eq!(code, 4);
}

#[test]
fn bep_sweep_is_monotone_and_within_budget() {
    let (code, dir) = run(
        r#"{"task": "bep", "domain": {"kind": "annulus", "rho": 0.5}, "nu": "xdamped:0.2",
            "resolution": {"n_r": 32, "n_theta": 64},
            "bep": {"arcs": [[0, 2]], "basis_size": 2, "budgets": [0.25, 0.5, 1, 2, 4],
                    "target": {"powers": [[-1, 1, 0], [-4, 0.3, 0]]},
                    "phi_outer": {"cos": [[2, 1]]}, "phi_inner": {"sin": [[1, 0.2]]}}}"#,
    );
    assert_eq!(code, 0);
    let (header, rows) = table(dir.path().join("out/sweep.csv"));
    assert_eq!(&header[..3], ["budget", "objective", "constraint"]);
    for w in rows.windows(2) {
        assert!(w[1][1] <= w[0][1] * (1.0 + 1e-9), "{:?}", rows);
    }
    for r in &rows {
        assert!(r[2] <= r[0] * (1.0 + 1e-9));
    }
    let (h, inner) = table(dir.path().join("out/trace_1.csv"));
    assert_eq!(h.last().unwrap(), "in_arcs");
    assert_eq!(inner.len(), 64);
}

#[test]
fn unreachable_budget_exits_4() {
    let (code, dir) = run(
        r#"{"task": "bep", "domain": {"kind": "annulus", "rho": 0.5},
            "resolution": {"n_r": 24, "n_theta": 32},
            "bep": {"arcs": [[0, 2]], "basis_size": 1, "budgets": [1e-6],
                    "target": {"powers": [[-1, 1, 0]]},
                    "phi_outer": {"cos": [[5, 1]]}, "phi_inner": 0.0}}"#,
    );
    assert_eq!(code, 4);
    assert_eq!(manifest(dir.path())["error"]["kind"], "BudgetUnreachable");
}

#[test]
fn coarse_validation_reports_instead_of_crashing() {
    let (code, dir) =
        run(r#"{"task": "validate", "validate": {"coarsen": 8, "checks": [1, 3, 4, 10]}}"#);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("out/validate.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["total"], 4);
    for c in report["checks"].as_array().unwrap() {
        assert!(c["passed"].is_boolean());
        assert!(!c["metrics"].as_array().unwrap().is_empty() || c["error"].is_string());
    }
}

#[test]
fn sign_flip_in_alpha_fails_the_factorization_check() {
    let (code, dir) = run(r#"{"task": "validate", "validate": {"checks": [4]}}"#);
    assert_eq!(code, 0);
    let clean: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("out/validate.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(clean["checks"][0]["passed"], true, "{clean}");
    let (code, dir) =
        run(r#"{"task": "validate", "validate": {"checks": [4], "inject_alpha_sign_flip": true}}"#);
    assert_eq!(code, 0);
    let flipped: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("out/validate.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(flipped["checks"][0]["passed"], false);
    assert_eq!(flipped["all_passed"], false);
}

#[test]
fn bench_writes_timings() {
    let (code, dir) = run(
        r#"{"task": "bench", "bench": {"n_r": 16, "n_theta": 32, "repeats": 2}, "resolution": {"n_r": 8, "n_theta": 16}}"#,
    );
    assert_eq!(code, 0);
    let b: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/bench.json")).unwrap())
            .unwrap();
    assert!(b["transform_ms"].as_f64().unwrap() > 0.0);
    assert!(b["dirichlet_disk_ms"].as_f64().unwrap() > 0.0);
}

#[test]
fn csv_inputs_resolve_relative_to_the_config() {
    let prep = |d: &Path| {
        let mut w = csv::Writer::from_path(d.join("u.csv")).unwrap();
        w.write_record(["theta", "value"]).unwrap();
        for k in 0..32 {
            let t = 2.0 * PI * k as f64 / 32.0;
            w.write_record([t.to_string(), (2.0 * t).cos().to_string()])
                .unwrap();
        }
        w.flush().unwrap();
        let mut w = csv::Writer::from_path(d.join("nu.csv")).unwrap();
        w.write_record(["r", "theta", "value"]).unwrap();
        for i in 0..=32 {
            let r = i as f64 / 32.0;
            for k in 0..16 {
                let t = 2.0 * PI * k as f64 / 16.0;
                w.write_record([r.to_string(), t.to_string(), (0.2 * r * r).to_string()])
                    .unwrap();
            }
        }
        w.flush().unwrap();
    };
    let res = r#""resolution": {"n_r": 24, "n_theta": 32}"#;
    let (code, a) = run_with(
        &format!(
            r#"{{"task": "dirichlet", "nu": {{"table": "nu.csv"}}, "data": [{{"csv": "u.csv"}}], {res}}}"#
        ),
        prep,
        &[],
    );
    assert_eq!(code, 0);
    let (code, b) = run(&format!(
        r#"{{"task": "dirichlet", "nu": "radial:0,0.2", "data": [{{"cos": [[2, 1.0]]}}], {res}}}"#
    ));
    assert_eq!(code, 0);
    let (_, x) = table(a.path().join("out/fields.csv"));
    let (_, y) = table(b.path().join("out/fields.csv"));
    let err = x
        .iter()
        .zip(&y)
        .map(|(p, q)| (p[2] - q[2]).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-3, "{err}");
}

#[test]
fn other_domains_run() {
    let (code, dir) = run(
        r#"{"task": "dirichlet", "domain": {"kind": "exterior", "center": [0.1, 0.0], "radius": 0.5},
            "nu": "dipole:0.3,0.4", "data": [{"cos": [[1, 1.0]]}], "resolution": {"n_r": 24, "n_theta": 32}}"#,
    );
    assert_eq!(code, 0);
    assert!(
        manifest(dir.path())["residuals"]["trace_fidelity"]
            .as_f64()
            .unwrap()
            < 1e-8
    );
    let (code, dir) = run(
        r#"{"task": "dirichlet", "domain": {"kind": "multi", "holes": [{"center": [0.4, 0.1], "radius": 0.2}, {"center": [-0.4, -0.2], "radius": 0.15}]},
            "sigma": "const:2", "data": [{"cos": [[1, 1.0]]}, 1.0, 0.0], "resolution": {"n_r": 24, "n_theta": 32}}"#,
    );
    assert_eq!(code, 0);
    let m = manifest(dir.path());
    // off-centre holes converge algebraically in the resolution
    assert!(m["residuals"]["trace_fidelity"].as_f64().unwrap() < 1e-5);
    assert_eq!(m["outputs"].as_array().unwrap().len(), 4);
}
