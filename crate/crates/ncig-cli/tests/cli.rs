//! End-to-end tests of the `ncig` binary: exit codes, JSON outputs, and
//! report determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ncig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncig"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn diag_state(entries: &[f64]) -> String {
    let n = entries.len();
    let mut m = String::from("[");
    for r in 0..n {
        for c in 0..n {
            if r + c > 0 {
                m.push(',');
            }
            let v = if r == c { entries[r] } else { 0.0 };
            m.push_str(&format!("[{v:?},0.0]"));
        }
    }
    m.push(']');
    format!(r#"{{"algebra":{{"blocks":[{n}]}},"blocks":[{m}]}}"#)
}

fn diag_lp(entries: &[f64], p: f64) -> String {
    let n = entries.len();
    let mut m = String::from("[");
    for r in 0..n {
        for c in 0..n {
            if r + c > 0 {
                m.push(',');
            }
            let v = if r == c { entries[r] } else { 0.0 };
            m.push_str(&format!("[{v:?},0.0]"));
        }
    }
    m.push(']');
    format!(r#"{{"algebra":{{"blocks":[{n}]}},"p":{p:?},"blocks":[{m}]}}"#)
}

fn field(stdout: &str, key: &str) -> f64 {
    let tagged = format!("\"{key}\":");
    let start = stdout.find(&tagged).expect("field present") + tagged.len();
    let rest = &stdout[start..];
    let end = rest
        .find(|c| c == ',' || c == '}')
        .expect("field terminated");
    rest[..end].parse().expect("numeric field")
}

#[test]
fn divergence_of_equal_states_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "w.json", &diag_state(&[0.5, 0.5]));
    let out = ncig(&["divergence", &f, &f, "--alpha", "0"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(field(&text, "value").abs() < 1e-12);
}

#[test]
fn divergence_worked_qubit_value_with_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let phi = write(dir.path(), "phi.json", &diag_state(&[0.5, 0.5]));
    let psi = write(dir.path(), "psi.json", &diag_state(&[0.9, 0.1]));
    let out = ncig(&["divergence", &phi, &psi, "--alpha", "0", "--oracle"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!((field(&text, "value") - 0.4222912).abs() < 1e-6);
    assert!(text.contains("\"agreement\":true"));
}

#[test]
fn divergence_rejects_alpha_out_of_range_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "w.json", &diag_state(&[1.0]));
    let out = ncig(&["divergence", &f, &f, "--alpha", "1.5"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("alpha"), "stderr: {err}");
}

#[test]
fn divergence_rejects_malformed_file_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "w.json", "{not json");
    let out = ncig(&["divergence", &f, &f, "--alpha", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn embed_round_trips_through_inverse() {
    let dir = tempfile::tempdir().unwrap();
    let psi = write(dir.path(), "psi.json", &diag_state(&[0.9, 0.1]));
    let out = ncig(&["embed", &psi, "--alpha", "0.5"]);
    assert!(out.status.success());
    let x = write(dir.path(), "x.json", &String::from_utf8(out.stdout).unwrap());
    let back = ncig(&["embed", &x, "--alpha", "0.5", "--inverse"]);
    assert!(back.status.success());
    let text = String::from_utf8(back.stdout).unwrap();
    // diagonal entries recovered
    assert!(text.contains("8.9999999999999"));
    assert!(text.contains("9.99999999999999") || text.contains("1.0000000000000001e-1"));
}

#[test]
fn project_member_of_cone_stays_fixed() {
    let dir = tempfile::tempdir().unwrap();
    // ψ = ℓ_0^{-1}(0.36·g) for g = diag(1,2): embedding lies in the cone
    let psi = write(dir.path(), "psi.json", &diag_state(&[0.0324, 0.1296]));
    let set = write(
        dir.path(),
        "set.json",
        &format!(r#"{{"variant":"cone","generators":[{}]}}"#, diag_lp(&[1.0, 2.0], 2.0)),
    );
    let out = ncig(&["project", &psi, &set, "--alpha", "0"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(field(&text, "value").abs() < 1e-9);
    assert!(field(&text, "kkt_residual") <= 1e-8);
    assert!(text.contains("\"converged\":true"));
}

#[test]
fn project_matches_p2_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let psi = write(dir.path(), "psi.json", &diag_state(&[0.9, 0.1]));
    let set = write(
        dir.path(),
        "set.json",
        &format!(r#"{{"variant":"cone","generators":[{}]}}"#, diag_lp(&[1.0, 2.0], 2.0)),
    );
    let out = ncig(&["project", &psi, &set, "--alpha", "0", "--seed", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    // t* = <g, 2 diag(sqrt(0.9), sqrt(0.1))> / ||g||^2
    let y = [2.0 * 0.9_f64.sqrt(), 2.0 * 0.1_f64.sqrt()];
    let t_star = (y[0] + 2.0 * y[1]) / 5.0;
    let want = 0.5 * ((y[0] - t_star).powi(2) + (y[1] - 2.0 * t_star).powi(2));
    assert!((field(&text, "value") - want).abs() < 1e-8);
    assert!(field(&text, "three_point_worst") <= 1e-8);
}

#[test]
fn project_rejects_malformed_set_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let psi = write(dir.path(), "psi.json", &diag_state(&[0.9, 0.1]));
    let set = write(dir.path(), "set.json", r#"{"variant":"hexagon"}"#);
    let out = ncig(&["project", &psi, &set, "--alpha", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spectrum_of_commuting_pair() {
    let dir = tempfile::tempdir().unwrap();
    let phi = write(dir.path(), "phi.json", &diag_state(&[0.5, 0.5]));
    let psi = write(dir.path(), "psi.json", &diag_state(&[0.9, 0.1]));
    let out = ncig(&["spectrum", &phi, &psi, "--g", "g_p:alpha=0"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"restricted\":false"));
    assert!((field(&text, "value") - 0.4222912).abs() < 1e-6);
}

#[test]
fn spectrum_with_tabulated_integrand() {
    let dir = tempfile::tempdir().unwrap();
    let phi = write(dir.path(), "phi.json", &diag_state(&[0.5, 0.5]));
    let psi = write(dir.path(), "psi.json", &diag_state(&[0.9, 0.1]));
    // tabulated identity on [0, 10]: value = first moment = Tr φ = 1
    let table = write(dir.path(), "g.json", "[[0.0,0.0],[10.0,10.0]]");
    let out = ncig(&["spectrum", &phi, &psi, "--g-table", &table]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!((field(&text, "value") - 1.0).abs() < 1e-10);
}

fn small_config(extra: &str) -> String {
    format!(
        r#"{{"dims": [[2]], "alphas": [0.0, 0.5],
            "sample_counts": {{
                "lp_sphere_duality_modulus": 200,
                "divergence_sphere_layer": 100,
                "channels_monotonicity": 30,
                "channels_chain_monotonicity": 10,
                "algebra_functional_bound": 50,
                "divergence_joint_convexity": 20,
                "divergence_positivity_sharp": 30,
                "divergence_continuity_estimate": 30,
                "divergence_pythagorean": 30,
                "quasientropy_cross_oracle": 20,
                "divergence_laws": 20,
                "lp_legendre_derivative": 10
            }}{extra}}}"#
    )
}

#[test]
fn verify_small_config_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", &small_config(""));
    let out1 = ncig(&["verify", "--config", &cfg, "--seed", "42"]);
    assert_eq!(out1.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out1.stderr));
    let out2 = ncig(&["verify", "--config", &cfg, "--seed", "42"]);
    assert_eq!(out1.stdout, out2.stdout, "same config + seed must be byte-identical");
    let text = String::from_utf8(out1.stdout).unwrap();
    assert!(text.lines().count() >= 29, "one row per check at minimum");
    assert!(text.contains("\"check\":\"quasientropy_cross_oracle\""));
}

#[test]
fn verify_unreachable_tolerance_fails_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        &small_config(r#", "tolerances": {"algebra_polar_recompose": 1e-30}"#),
    );
    let out = ncig(&["verify", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_commutative_blocks_pass() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg_text = small_config("");
    cfg_text = cfg_text.replace(r#""dims": [[2]]"#, r#""dims": [[1,1]]"#);
    let cfg = write(dir.path(), "cfg.json", &cfg_text);
    let out = ncig(&["verify", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn verify_csv_format_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", &small_config(""));
    let report = dir.path().join("report.csv");
    let out = ncig(&[
        "verify",
        "--config",
        &cfg,
        "--format",
        "csv",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&report).unwrap();
    assert!(text.starts_with("check,p,alpha,residual,pass"));
}
