use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn lightcone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lightcone"))
        .args(args)
        .env_remove("LIGHTCONE_TRUNCATION")
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> (Value, i32) {
    let out = lightcone(args);
    let code = out.status.code().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (v, code)
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// The toolchain string differs between machines; everything else must match byte for byte.
fn normalized(stdout: &[u8]) -> String {
    let mut v: Value = serde_json::from_slice(stdout).unwrap();
    v["metadata"]["toolchain"] = Value::String("<toolchain>".into());
    let mut s = serde_json::to_string_pretty(&v).unwrap();
    s.push('\n');
    s
}

#[test]
fn hol_dim_m1() {
    let (v, code) = report(&["hol-dim", "--surface", "Mt", "--t", "1", "--d", "2", "--D", "8", "--expect-dim", "10"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["dimension"], 10);
    assert_eq!(v["results"]["label"], "so(2,3)");
    assert_eq!(v["metadata"]["passed"], true);
    let (_, code) = report(&["hol-dim", "--surface", "M1", "--expect-dim", "9"]);
    assert_eq!(code, 1);
}

#[test]
fn golden_hol_dim_m0() {
    let args = ["hol-dim", "--surface", "Mt", "--t", "0", "--d", "2", "--D", "8"];
    let first = lightcone(&args);
    let second = lightcone(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout, "reports differ between runs");
    let path = golden_path("hol_dim_m0.json");
    let got = normalized(&first.stdout);
    if std::env::var_os("LIGHTCONE_BLESS").is_some() {
        std::fs::write(&path, &got).unwrap();
    }
    let want = std::fs::read_to_string(&path).expect("golden file present");
    assert_eq!(got, want);
}

#[test]
fn report_round_trips() {
    let out = lightcone(&["classify", "--surface", "Mt", "--t", "-1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text);
    assert_eq!(v["results"]["label"], "sl(2,R)⊕su(2)");
}

#[test]
fn sigma_and_maps() {
    let (v, code) = report(&["sigma", "--t", "3/2"]);
    assert_eq!((v["results"]["sigma"].as_str(), code), (Some("3"), 0));
    let (v, code) = report(&["verify-map", "--map", "phi_oc", "--D", "8"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["composition"]["residual_terms"], 0);
    assert_eq!(v["results"]["target_identity"]["residual_terms"], 0);
}

#[test]
fn failed_tangency_exits_one() {
    let (v, code) = report(&["tangency", "--surface", "M1", "--field", "2*w*Dw + z1*Dz1", "--field", "z1*Dz1 + 2*z2*Dz2"]);
    assert_eq!(code, 1);
    assert_eq!(v["results"]["fields"][0]["tangent"], true);
    assert_eq!(v["results"]["fields"][1]["tangent"], false);
    assert_eq!(v["metadata"]["passed"], false);
}

#[test]
fn usage_errors_exit_two() {
    let out = lightcone(&["tangency", "--surface", "M1", "--field", "z1*Dz1 + I*w"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1, column 10"));
    assert_eq!(lightcone(&["hol-dim", "--d", "2", "--D", "5", "--t", "1"]).status.code(), Some(2));
    assert_eq!(lightcone(&["hol-dim", "--surface", "Mt"]).status.code(), Some(2));
    assert_eq!(lightcone(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(lightcone(&["verify-map", "--map", "phi_ob", "--p", "1", "--k", "2"]).status.code(), Some(2));
}

#[test]
fn truncation_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_lightcone"))
        .args(["hol-dim", "--surface", "M0"])
        .env("LIGHTCONE_TRUNCATION", "9")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["job"]["args"]["D"], 9);
    assert_eq!(v["results"]["truncation"], 9);
}

#[test]
fn germ_file_and_output_path() {
    let dir = std::env::temp_dir().join(format!("lightcone-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let germ = dir.join("m1.germ");
    std::fs::write(&germ, "# the homogeneous model\n(2*z1*conj(z1) + z1^2*conj(z2) + conj(z1)^2*z2) * inv(1 - 1/1*z2*conj(z2))\n").unwrap();
    let out = dir.join("report.json");
    let status = lightcone(&[
        "hol-dim",
        "--surface",
        "file",
        "--germ-file",
        germ.to_str().unwrap(),
        "--normal-form",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(status.status.code(), Some(0));
    assert!(status.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["results"]["dimension"], 10);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn timing_only_on_request() {
    let (v, _) = report(&["pi1", "--n", "3", "--p", "1", "--q", "1"]);
    assert!(v["metadata"].get("elapsed_ms").is_none());
    assert_eq!(v["results"]["table"][0]["pi1"], "Q8");
    let (v, _) = report(&["pi1", "--n", "3", "--p", "1", "--q", "1", "--timing"]);
    assert!(v["metadata"]["elapsed_ms"].is_number());
}

#[test]
fn bracket_and_levi() {
    let (v, code) = report(&[
        "bracket",
        "--field",
        "2*z1*Dw + (1 - z2)*Dz1",
        "--field",
        "z1^2*Dw - z1*z2*Dz1 + (1 - z2^2)*Dz2",
        "--expect",
        "2*z1*Dw + (1 - z2)*Dz1",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["matches_expected"], true);
    let (v, code) = report(&["levi", "--surface", "Mt", "--t", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["determinant"]["1"], "4/1");
}

#[test]
fn matrix_jobs() {
    for args in [&["tube-checks", "--samples", "5", "--seed", "3"][..], &["qt", "--samples", "10"], &["qr", "--kmax", "200"]] {
        let (v, code) = report(args);
        assert_eq!(code, 0, "{args:?}: {v}");
    }
    let (v, code) = report(&["grading", "--surface", "T"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["weights"]["0"], 2);
    assert_eq!(v["results"]["total"], 10);
}
