use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_eginv"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> (i32, Value, Output) {
    let out = bin().args(args).output().unwrap();
    let code = out.status.code().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, v, out)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn check_three_by_three_passes() {
    let (code, v, _) = run(&["check", p(&fixture("triangular3.json"))]);
    assert_eq!(code, 0);
    assert_eq!(v["exit_status"], "ok");
    for k in 0..3 {
        assert!(v["conditions"]["residuals"][k].as_f64().unwrap() < 1e-12);
    }
}

#[test]
fn corrupted_entry_fails_check() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(fixture("triangular3.json")).unwrap()).unwrap();
    let x = doc["gamma"][1][0][0].as_f64().unwrap();
    doc["gamma"][1][0][0] = Value::from(x + 0.01);
    let path = dir.path().join("bad.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    let (code, v, _) = run(&["check", p(&path)]);
    assert_eq!(code, 4);
    assert_eq!(v["exit_status"], "condition-fail");
    let worst = v["conditions"]["residuals"].as_array().unwrap()[..3].iter().map(|r| r.as_f64().unwrap()).fold(0.0, f64::max);
    assert!(worst > 1e-3);
}

#[test]
fn trivial_fixture_all_pass_and_zero_solution() {
    let (code, v, _) = run(&["check", p(&fixture("trivial.json"))]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "all_pass");
    let (code, v, _) = run(&["solve", p(&fixture("trivial.json"))]);
    assert_eq!(code, 0);
    for row in v["g"].as_array().unwrap() {
        for z in row.as_array().unwrap() {
            assert_eq!(z[0].as_f64().unwrap(), 0.0);
            assert_eq!(z[1].as_f64().unwrap(), 0.0);
        }
    }
    let (code, v, _) = run(&["invert", p(&fixture("trivial.json")), p(&fixture("trivial.g.json"))]);
    assert_eq!(code, 0);
    assert_eq!(v["omega_r_residual"].as_f64().unwrap(), 0.0);
}

#[test]
fn solve_three_by_three_each_method() {
    for method in ["auto", "canonical", "general"] {
        let (code, v, _) = run(&["solve", "--method", method, p(&fixture("triangular3.json"))]);
        assert_eq!(code, 0, "{method}");
        let want = [[1.0, 2.0, 0.0], [0.0, 1.0, 2.0], [0.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((v["g"][i][j][0].as_f64().unwrap() - want[i][j]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn sequence_fixture_recovers_stored_g() {
    let (code, v, _) = run(&["solve", p(&fixture("sequence_s42_d4.json"))]);
    assert_eq!(code, 0);
    assert_eq!(v["seed"], 42);
    let stored: Value = serde_json::from_str(&std::fs::read_to_string(fixture("sequence_s42_d4.g.json")).unwrap()).unwrap();
    let (mut diff, mut norm) = (0.0f64, 0.0f64);
    for (a, b) in v["g"].as_array().unwrap().iter().zip(stored["value"].as_array().unwrap()) {
        assert_eq!(a["j"], b["j"]);
        let (ra, rb) = (a["coeff"].as_array().unwrap(), b["coeff"].as_array().unwrap());
        for (x, y) in ra.iter().flat_map(|r| r.as_array().unwrap()).zip(rb.iter().flat_map(|r| r.as_array().unwrap())) {
            for k in 0..2 {
                let (s, t) = (x[k].as_f64().unwrap(), y[k].as_f64().unwrap());
                diff += (s - t).powi(2);
                norm += t.powi(2);
            }
        }
    }
    assert!(diff.sqrt() < 1e-8 * norm.sqrt());
}

#[test]
fn invert_singular_diagonal_is_refused_with_oracle() {
    let (code, v, out) = run(&["invert", p(&fixture("singular2.json")), p(&fixture("singular2.g.json"))]);
    assert_eq!(code, 6);
    assert_eq!(v["exit_status"], "refused");
    assert!(v["message"].as_str().unwrap().contains("item (a) not satisfied"));
    assert_eq!(v["oracle"]["invertible"], true);
    assert!(v["oracle"]["residual"].as_f64().unwrap() < 1e-12);
    assert!(String::from_utf8_lossy(&out.stderr).contains("refused"));
}

#[test]
fn invert_three_by_three() {
    let (code, v, _) = run(&["invert", p(&fixture("triangular3.json")), p(&fixture("triangular3.g.json"))]);
    assert_eq!(code, 0);
    assert!(v["omega_r_residual"].as_f64().unwrap() < 1e-12);
    assert!(v["r_omega_residual"].as_f64().unwrap() < 1e-12);
    assert!(v["formula_residuals"].as_array().unwrap().iter().all(|r| r.as_f64().unwrap() < 1e-9));
}

#[test]
fn gen_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let (code, _, _) = run(&["gen", "--instance", "sequence", "--dims", "2x2", "--degree", "3", "--seed", "1", "--output", p(out)]);
        assert_eq!(code, 0);
    }
    for suffix in [".json", ".g.json"] {
        let x = std::fs::read(format!("{}{suffix}", a.display())).unwrap();
        let y = std::fs::read(format!("{}{suffix}", b.display())).unwrap();
        assert_eq!(x, y);
    }
    let data = format!("{}.json", a.display());
    let (code, _, _) = run(&["check", &data]);
    assert_eq!(code, 0);
    let (code, _, _) = run(&["invert", &data, &format!("{}.g.json", a.display())]);
    assert_eq!(code, 0);

    let m = dir.path().join("m");
    let (code, v, _) = run(&["gen", "--instance", "matrix", "--dims", "4", "--seed", "3", "--output", p(&m)]);
    assert_eq!(code, 0);
    assert_eq!(v["p"], 4);
    let (code, v, _) = run(&["solve", "--method", "general", &format!("{}.json", m.display())]);
    assert_eq!(code, 0, "{v}");
}

#[test]
fn report_written_to_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let (code, _, o) = run(&["solve", p(&fixture("triangular3.json")), "--output", p(&out)]);
    assert_eq!(code, 0);
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["format"], "eginv-report/1");
    assert_eq!(v["tool_version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn parse_errors_give_location_and_status() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.json");
    std::fs::write(&path, "{\"format\": \"eginv-dataset/1\", \"instance\": \"matrix\", \"p\": 2}").unwrap();
    let (code, v, _) = run(&["check", p(&path)]);
    assert_eq!(code, 3);
    assert_eq!(v["exit_status"], "parse-error");
    assert_eq!(v["location"], "$");
    assert!(v["message"].as_str().unwrap().contains("alpha"));

    std::fs::write(&path, "{ not json").unwrap();
    let (code, v, _) = run(&["solve", p(&path)]);
    assert_eq!(code, 3);
    assert!(v["location"].as_str().unwrap().contains("x.json:1:"));

    let (code, _, _) = run(&["check", p(&dir.path().join("missing.json"))]);
    assert_eq!(code, 3);
}

#[test]
fn usage_errors_are_parse_errors() {
    let (code, _, _) = run(&["solve", "--method", "fastest", "x.json"]);
    assert_eq!(code, 3);
    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, 3);
    let (code, _, out) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("selftest"));
}

#[test]
fn no_solution_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(fixture("triangular3.json")).unwrap()).unwrap();
    let x = doc["beta"][0][1][0].as_f64().unwrap();
    doc["beta"][0][1][0] = Value::from(x + 0.01);
    let path = dir.path().join("pert.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    let (code, v, _) = run(&["solve", "--method", "canonical", p(&path)]);
    assert_eq!(code, 5);
    assert_eq!(v["status"], "no_solution");
    assert!(v["diagnostics"]["canonical_mismatch"].as_f64().unwrap() > 1e-3);
    assert_eq!(v["g"], Value::Null);
}

#[test]
fn selftest_passes_and_detects_tampering() {
    let (code, v, _) = run(&["selftest"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["failed"].as_array().unwrap().len(), 0);

    let dir = tempfile::tempdir().unwrap();
    for entry in std::fs::read_dir(fixture("")).unwrap() {
        let e = entry.unwrap();
        std::fs::copy(e.path(), dir.path().join(e.file_name())).unwrap();
    }
    let target = dir.path().join("triangular3.json");
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    doc["alpha"][0][0][0] = Value::from(-0.3);
    std::fs::write(&target, doc.to_string()).unwrap();
    let (code, v, _) = run(&["selftest", "--fixtures", p(dir.path())]);
    assert_ne!(code, 0);
    let failed: Vec<&str> = v["failed"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert!(failed.contains(&"triangular3_conditions"), "{failed:?}");
}
