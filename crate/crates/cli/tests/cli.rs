use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn base() -> Value {
    json!({
        "alpha": [0.0],
        "grid": {"radius": [14.0], "nodes": [200]},
        "function": {"kind": "gaussian", "params": {"scale": 1.0}}
    })
}

struct Run {
    out: Output,
    report: PathBuf,
    _dir: TempDir,
}

impl Run {
    fn code(&self) -> i32 {
        self.out.status.code().unwrap()
    }

    fn records(&self) -> Vec<Value> {
        serde_json::from_str(&std::fs::read_to_string(&self.report).unwrap()).unwrap()
    }

    fn record(&self, id: &str) -> Value {
        self.records()
            .into_iter()
            .find(|r| r["check_id"] == id)
            .unwrap_or_else(|| panic!("no record {id}"))
    }

    fn stderr(&self) -> String {
        String::from_utf8_lossy(&self.out.stderr).into_owned()
    }
}

fn run(cmd: &str, cfg: &Value, extra: &[&str]) -> Run {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("config.json");
    std::fs::write(&cfg_path, cfg.to_string()).unwrap();
    let report = dir.path().join("report.json");
    let out = Command::new(env!("CARGO_BIN_EXE_polyaxial"))
        .arg(cmd)
        .arg("--config")
        .arg(&cfg_path)
        .arg("--out")
        .arg(&report)
        .args(extra)
        .output()
        .unwrap();
    Run { out, report, _dir: dir }
}

fn with(mut v: Value, key: &str, x: Value) -> Value {
    v[key] = x;
    v
}

#[test]
fn transform_reference_passes_and_writes_samples() {
    let r = run("transform", &base(), &[]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let p = r.record("transform.plancherel");
    assert!(p["pass"].as_bool().unwrap());
    assert!(p["lhs"].as_f64().unwrap() <= 1e-6);
    let samples = r.report.with_file_name("report.samples.json");
    let snap: Value = serde_json::from_str(&std::fs::read_to_string(samples).unwrap()).unwrap();
    assert_eq!(snap["domain"], "frequency");
    assert_eq!(snap["values"].as_array().unwrap().len(), 200);
}

#[test]
fn negative_alpha_is_a_config_error() {
    let r = run("transform", &with(base(), "alpha", json!([-0.6])), &[]);
    assert_eq!(r.code(), 2);
    assert!(r.stderr().contains("alpha[0] ≤ −1/2"), "{}", r.stderr());
}

#[test]
fn coarse_grid_fails_tolerance() {
    let r = run(
        "transform",
        &with(base(), "grid", json!({"radius": [14.0], "nodes": [8]})),
        &[],
    );
    assert_eq!(r.code(), 1, "{}", r.stderr());
    let p = r.record("transform.plancherel");
    assert!(!p["pass"].as_bool().unwrap());
    assert!(p["lhs"].as_f64().unwrap() > 1e-6);
}

#[test]
fn solve_helmholtz_and_polynomial() {
    let r = run("solve", &base(), &[]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    assert!(r.record("solve.roundtrip")["lhs"].as_f64().unwrap() <= 1e-12);
    let reg = r.record("solve.regularity.gain1");
    assert!(reg["lhs"].as_f64().unwrap() <= reg["rhs"].as_f64().unwrap() + 1e-8);

    let r = run("solve", &with(base(), "k", json!(0.0)), &[]);
    assert_eq!(r.code(), 2);

    let r = run("solve", &with(base(), "polynomial", json!([4.0, 0.0, 1.0])), &[]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    assert!(r.record("solve.regularity.gain2")["pass"].as_bool().unwrap());
}

#[test]
fn norm_report() {
    let r = run("norm", &with(base(), "s_list", json!([0.0, 0.5, 1.0])), &[]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let monotone: Vec<Value> = r
        .records()
        .into_iter()
        .filter(|x| x["check_id"].as_str().unwrap().starts_with("norm.monotone"))
        .collect();
    assert_eq!(monotone.len(), 2);
    assert!(monotone.iter().all(|x| x["lhs"].as_f64() <= x["rhs"].as_f64()));
    assert!(r.record("norm.l2_identity")["pass"].as_bool().unwrap());
    let d = r.record("norm.dirac.s-2_p1");
    assert_eq!(d["lhs"], 1.0);
    assert!(d["pass"].as_bool().unwrap());
}

#[test]
fn overflow_exits_3() {
    let r = run("norm", &with(base(), "s", json!(400.0)), &[]);
    assert_eq!(r.code(), 3, "{}", r.stderr());
}

#[test]
fn three_dimensions_only_for_transform_and_solve() {
    let cfg = json!({
        "alpha": [0.0, 0.5, 1.0],
        "grid": {"radius": [8.0, 8.0, 8.0], "nodes": [40, 40, 40]}
    });
    assert_eq!(run("transform", &cfg, &[]).code(), 0);
    assert_eq!(run("solve", &cfg, &[]).code(), 0);
    assert_eq!(run("norm", &cfg, &[]).code(), 2);
    assert_eq!(run("verify", &cfg, &["--suite", "bessel"]).code(), 2);
}

#[test]
fn csv_header() {
    let r = run("transform", &base(), &["--format", "csv"]);
    assert_eq!(r.code(), 0);
    let text = std::fs::read_to_string(&r.report).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "check_id,paper_ref,lhs,rhs,tolerance,pass"
    );
}

fn bytes(p: &Path) -> Vec<u8> {
    std::fs::read(p).unwrap()
}

#[test]
fn verify_is_deterministic() {
    let a = run("verify", &base(), &["--suite", "all"]);
    let b = run("verify", &base(), &["--suite", "all"]);
    assert_eq!(a.code(), 0, "{}", a.stderr());
    assert_eq!(bytes(&a.report), bytes(&b.report));
    let ids: Vec<String> = a
        .records()
        .iter()
        .map(|r| r["check_id"].as_str().unwrap().to_string())
        .collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    assert!(ids.iter().any(|i| i.starts_with("transform.oracle.")));
}

#[test]
fn translation_suite_at_alpha_one() {
    let r = run(
        "verify",
        &with(base(), "alpha", json!([1.0])),
        &["--suite", "translation"],
    );
    assert_eq!(r.code(), 0, "{}", r.stderr());
    for id in [
        "translation.kernel_mass",
        "translation.kernel_positivity",
        "translation.contraction.p1",
        "translation.product_formula",
    ] {
        assert!(r.record(id)["pass"].as_bool().unwrap(), "{id}");
    }
    assert!(r
        .records()
        .iter()
        .all(|x| x["check_id"].as_str().unwrap().starts_with("translation.")));
}

#[test]
fn sobolev_suite_poincare_record() {
    let cfg = with(with(base(), "eps_list", json!([0.5, 0.25, 0.125])), "t", json!(0.0));
    let r = run("verify", &cfg, &["--suite", "sobolev"]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let p = r.record("sobolev.poincare.s1_t0");
    assert!((p["lhs"].as_f64().unwrap() - 2.0).abs() <= 0.15);
}

#[test]
fn two_dimensional_suite() {
    // Pairs clear of the membership boundary: near it the tail decays too
    // slowly for a doubling test to see convergence.
    let cfg = json!({
        "alpha": [0.0, 0.5],
        "grid": {"radius": [14.0, 14.0], "nodes": [64, 64]},
        "dirac": {"pairs": [[-3.0, 1.0], [0.0, 1.0], [-2.0, 2.0], [0.0, 2.0]]}
    });
    let r = run("verify", &cfg, &["--suite", "all"]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    assert!(r.records().len() >= 25);
}

#[test]
fn regen_oracle_writes_a_table_that_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("oracle.json");
    let cfg = with(
        with(base(), "alpha", json!([0.5])),
        "oracle",
        json!(table.to_str().unwrap()),
    );
    let r = run("verify", &cfg, &["--suite", "transform", "--regen-oracle"]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&table).unwrap()).unwrap();
    assert_eq!(written["alpha"], json!([0.5]));
    let n = r
        .records()
        .iter()
        .filter(|x| x["check_id"].as_str().unwrap().starts_with("transform.oracle."))
        .count();
    assert_eq!(n, written["entries"].as_array().unwrap().len());

    let again = run("verify", &cfg, &["--suite", "transform"]);
    assert_eq!(again.code(), 0);
    assert_eq!(bytes(&r.report), bytes(&again.report));
}

#[test]
fn committed_oracle_matches_regeneration() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("oracle.json");
    let reference: Value = serde_json::from_str(include_str!("../configs/reference.json")).unwrap();
    let cfg = with(reference, "oracle", json!(table.to_str().unwrap()));
    let r = run("verify", &cfg, &["--suite", "bessel", "--regen-oracle"]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let fresh: Value = serde_json::from_str(&std::fs::read_to_string(&table).unwrap()).unwrap();
    let committed: Value = serde_json::from_str(include_str!("../data/oracle.json")).unwrap();
    assert_eq!(fresh, committed);
}
