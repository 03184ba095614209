use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gxbtc::GxTheory;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn gxbtc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gxbtc")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_fixtures_exit_zero() {
    for f in ["toric_code.json", "semion.json", "double_semion.json", "z4.json", "toric_code_z2.json"] {
        let out = gxbtc(&["check", path_str(&fixture(f))]);
        assert_eq!(out.status.code(), Some(0), "{f}: {}", String::from_utf8_lossy(&out.stderr));
        let v = json_of(&out);
        assert_eq!(v["passed"], true);
        assert!(v["equations"].as_array().unwrap().iter().all(|e| e["worst_residual"].as_f64().unwrap() < 1e-9));
    }
}

#[test]
fn perturbed_theory_fails_check() {
    let mut th = GxTheory::load(fixture("semion.json")).unwrap();
    let v = th.r(1, 1, 0).unwrap() * gxbtc::C64::from_polar(1.0, 1e-3);
    th.set_r([1, 1, 0], v).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    th.save(&p).unwrap();
    let out = gxbtc(&["check", path_str(&p), "--eq", "hexagon"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["passed"], false);
}

#[test]
fn malformed_input_exits_65() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("junk.json");
    std::fs::write(&p, "{\"name\": 3}").unwrap();
    assert_eq!(gxbtc(&["check", path_str(&p)]).status.code(), Some(65));
    assert_eq!(gxbtc(&["check"]).status.code(), Some(64));
}

#[test]
fn cohomology_report() {
    let out = gxbtc(&["cohomology", "--group", "Z2", "--coeff", "u1", "--degree", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["structure"], "Z2");
    let out = gxbtc(&["cohomology", "--group", "Z2", "--coeff", "u1", "--degree", "4"]);
    assert_eq!(json_of(&out)["structure"], "0");
    let tc = fixture("toric_code_z2.json");
    let out = gxbtc(&["cohomology", "--group", "Z2", "--coeff", "charges", "--theory", path_str(&tc), "--degree", "2"]);
    assert_eq!(json_of(&out)["structure"], "Z2xZ2");
}

#[test]
fn torsor_output_reloads_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("tc_e.json");
    let tc = fixture("toric_code_z2.json");
    let t = fixture("t_z2_e.json");
    let out = gxbtc(&["torsor", path_str(&tc), "--t", path_str(&t), "-o", path_str(&out_path)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let th = GxTheory::load(&out_path).unwrap();
    assert!(th.validate().is_empty());
    assert_eq!(gxbtc(&["check", path_str(&out_path)]).status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    let tc = fixture("toric_code_z2.json");
    let (t1, t2) = (fixture("t_z2_e.json"), fixture("t_z2_m.json"));
    let args = ["compose", path_str(&tc), "--t1", path_str(&t1), "--t2", path_str(&t2)];
    let a = gxbtc(&args);
    let b = gxbtc(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert_eq!(v["t"]["entries"][0]["value"], "f");
}

#[test]
fn obstruction_of_toric_code_torsor_is_trivial() {
    let out = gxbtc(&["obstruction", path_str(&fixture("toric_code_z2.json")), "--t", path_str(&fixture("t_z2_m.json"))]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["trivial"], true);
}

#[test]
fn equiv_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let spt0 = dir.path().join("spt0.json");
    let spt1 = dir.path().join("spt1.json");
    for (k, p) in [("0", &spt0), ("1", &spt1)] {
        let out = gxbtc(&["build", "spt", "--group", "Z2", "--class", k, "-o", path_str(p)]);
        assert_eq!(out.status.code(), Some(0));
    }
    let same = gxbtc(&["equiv", path_str(&spt1), path_str(&spt1)]);
    assert_eq!(same.status.code(), Some(0));
    assert_eq!(json_of(&same)["equivalent"], true);
    assert_eq!(gxbtc(&["equiv", path_str(&spt0), path_str(&spt1)]).status.code(), Some(1));
    let tc = fixture("toric_code_z2.json");
    let out = gxbtc(&["equiv", path_str(&tc), path_str(&tc), "--budget", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn enumerate_extensions_table() {
    let out = gxbtc(&["enumerate-extensions", "--c0", path_str(&fixture("toric_code.json")), "--group", "Z2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    let rows = v["rows"].as_array().unwrap();
    // |H²(Z2, Z2×Z2)| · |H³(Z2, U(1))| torsors, none obstructed.
    assert_eq!(rows.len(), 8);
    assert_eq!(v["obstructed_t_classes"], 0);
    // The trivial fractionalization class never collapses with itself under
    // the two SPT stackings.
    let trivial: Vec<_> = rows.iter().filter(|r| r["t_class"] == serde_json::json!([0, 0])).collect();
    assert_ne!(trivial[0]["equivalence_class"], trivial[1]["equivalence_class"]);
}

#[test]
fn trivial_ext_build_matches_fixture() {
    let out = gxbtc(&["build", "trivial-ext", "--c0", path_str(&fixture("toric_code.json")), "--group", "Z2"]);
    assert_eq!(out.status.code(), Some(0));
    let built = GxTheory::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    let stored = GxTheory::load(fixture("toric_code_z2.json")).unwrap();
    assert_eq!(built.table_distance(&stored).unwrap().max(), 0.0);
}
