use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use weyl_cli::doc::{BaseDocument, CircuitDocument, MatrixDocument};
use weyl_core::verify::random_circuit;
use weyl_core::{haar_random_u2, tensor, BaseGate, Mat4};

fn weyl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weyl"))
        .args(args)
        .env_remove("WEYL_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_matrix(dir: &TempDir, name: &str, m: &Mat4) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string(&MatrixDocument::from_mat4(m)).unwrap()).unwrap();
    p
}

fn write_circuit(dir: &TempDir, name: &str, c: &weyl_core::Circuit) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string(&CircuitDocument::from_circuit(c)).unwrap()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn value_after(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn canon_cnot() {
    let dir = TempDir::new().unwrap();
    let f = write_matrix(&dir, "cnot.json", &Mat4::cnot());
    let o = weyl(&["canon", s(&f)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("coords: (0.785398163, 0, 0)·(1, 0, 0)·π/4"), "{text}");
    assert!(value_after(&text, "residual:") <= 1e-9);
}

#[test]
fn canon_identity() {
    let dir = TempDir::new().unwrap();
    let f = write_matrix(&dir, "id.json", &Mat4::identity());
    let o = weyl(&["canon", s(&f)]);
    assert!(stdout(&o).contains("class: (0, 0, 0)"), "{}", stdout(&o));
}

#[test]
fn canon_dressed_cnot_keeps_coordinates() {
    let dir = TempDir::new().unwrap();
    let pre = tensor(&haar_random_u2(1), &haar_random_u2(2));
    let post = tensor(&haar_random_u2(3), &haar_random_u2(4));
    let f = write_matrix(&dir, "dressed.json", &(post * Mat4::cnot() * pre));
    let o = weyl(&["canon", s(&f)]);
    let text = stdout(&o);
    assert!(text.contains("class: (π/4, 0, 0)"), "{text}");
    assert!(value_after(&text, "residual:") <= 1e-9);
}

#[test]
fn canon_json_output() {
    let dir = TempDir::new().unwrap();
    let f = write_matrix(&dir, "swap.json", &Mat4::swap());
    let o = weyl(&["canon", "--json", s(&f)]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for q in v["coords_quarter_pi"].as_array().unwrap() {
        assert!((q.as_f64().unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn canon_rejects_bad_input() {
    let dir = TempDir::new().unwrap();
    let f = write_matrix(&dir, "big.json", &Mat4::identity().scale(2.0.into()));
    assert_eq!(weyl(&["canon", s(&f)]).status.code(), Some(3));
    let g = dir.path().join("junk.json");
    std::fs::write(&g, "{not json").unwrap();
    assert_eq!(weyl(&["canon", s(&g)]).status.code(), Some(2));
    let h = dir.path().join("short.json");
    std::fs::write(&h, r#"{"shape":4,"entries":[[1,0]]}"#).unwrap();
    assert_eq!(weyl(&["canon", s(&h)]).status.code(), Some(2));
    assert_eq!(weyl(&["canon", "/nonexistent/file.json"]).status.code(), Some(2));
    assert_eq!(weyl(&["bogus"]).status.code(), Some(2));
}

#[test]
fn synth_b_gate_over_supercontrolled() {
    let o = weyl(&["synth", "--coords", "pi/4,pi/8,0", "--base", "supercontrolled:0.3927"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: CircuitDocument = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc.applications, 3);
    assert!(matches!(doc.base, BaseDocument::Supercontrolled { .. }));
}

#[test]
fn synth_swap_over_cnot_class_uses_three() {
    let o = weyl(&["synth", "--coords", "pi/4,pi/4,pi/4", "--base", "controlled:1.5708"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: CircuitDocument = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc.applications, 3);
    assert!(value_after(&stderr(&o), "residual:") <= 1e-8);
}

#[test]
fn synth_over_budget_names_constraint() {
    let o = weyl(&["synth", "--coords", "0.4,0.3,0.2", "--base", "controlled:0.5", "--n", "2"]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stderr(&o).contains("h1+h2 ≤ nγ"), "{}", stderr(&o));
}

#[test]
fn synth_with_explicit_budgets() {
    let cases: &[(&str, &str, &str, i32)] = &[
        ("pi/4,pi/4,0", "cnot", "2", 0),
        ("0.5,0.2,0.1", "controlled:pi/3", "5", 0),
        ("0.5,0.2,0.1", "controlled:pi/2", "3", 0),
        ("0.5,0.2,0", "supercontrolled:0.2", "2", 0),
        ("0.5,0.2,0.1", "supercontrolled:0.2", "2", 5),
        ("pi/4,pi/4,pi/4", "controlled:pi/4", "3", 5),
        ("0.1,0,0", "controlled:0.5", "1", 5),
    ];
    for (coords, base, n, code) in cases {
        let o = weyl(&["synth", "--coords", coords, "--base", base, "--n", n]);
        assert_eq!(o.status.code(), Some(*code), "{coords} {base} {n}: {}", stderr(&o));
        if *code == 0 {
            let doc: CircuitDocument = serde_json::from_str(&stdout(&o)).unwrap();
            assert_eq!(doc.applications.to_string(), *n);
        }
    }
}

#[test]
fn synth_output_verifies() {
    let dir = TempDir::new().unwrap();
    for (i, base) in ["cnot", "controlled:pi/3", "supercontrolled:pi/8", "mirrored:pi/2"].iter().enumerate() {
        let target = weyl_core::haar_random_u4(i as u64 + 40);
        let t = write_matrix(&dir, &format!("t{i}.json"), &target);
        let c = dir.path().join(format!("c{i}.json"));
        let o = weyl(&["synth", "--target", s(&t), "--base", base, "--out", s(&c)]);
        assert_eq!(o.status.code(), Some(0), "{base}: {}", stderr(&o));
        let printed = value_after(&stderr(&o), "residual:");
        let tol = format!("{:e}", printed.max(1e-15) * 10.0);
        let v = weyl(&["verify", "--circuit", s(&c), "--target", s(&t), "--tol", &tol]);
        assert_eq!(v.status.code(), Some(0), "{base}: {}", stdout(&v));
        assert!(stdout(&v).contains("PASS"));
    }
}

#[test]
fn synth_bad_base_is_parse_error() {
    assert_eq!(weyl(&["synth", "--coords", "0,0,0", "--base", "controlled:3"]).status.code(), Some(2));
    assert_eq!(weyl(&["synth", "--coords", "0,0", "--base", "cnot"]).status.code(), Some(2));
    assert_eq!(weyl(&["synth", "--base", "cnot"]).status.code(), Some(2));
}

#[test]
fn mirror_gate_mode() {
    let dir = TempDir::new().unwrap();
    let f = write_matrix(&dir, "cnot.json", &Mat4::cnot());
    let o = weyl(&["mirror", "--gate", s(&f)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("mirror: (π/4, π/4, 0)"), "{}", stdout(&o));
    let f = write_matrix(&dir, "swap.json", &Mat4::swap());
    let o = weyl(&["mirror", "--gate", s(&f)]);
    assert!(stdout(&o).contains("mirror: (0, 0, 0)"), "{}", stdout(&o));
    let f = write_matrix(&dir, "bad.json", &Mat4::identity().scale(0.5.into()));
    assert_eq!(weyl(&["mirror", "--gate", s(&f)]).status.code(), Some(3));
}

#[test]
fn mirror_circuit_mode() {
    let dir = TempDir::new().unwrap();
    let c = random_circuit(&BaseGate::Controlled { gamma: std::f64::consts::FRAC_PI_2 }, 3, 7);
    let f = write_circuit(&dir, "c.json", &c);
    let o = weyl(&["mirror", "--circuit", s(&f), "--index", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: CircuitDocument = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc.overrides[1], Some(BaseDocument::MirroredControlled { gamma: std::f64::consts::FRAC_PI_2 }));
    let rewritten = doc.to_circuit(None).unwrap();
    let before = weyl_core::canonical::coords_of(&c.evaluate().unwrap()).unwrap();
    let after = weyl_core::canonical::coords_of(&rewritten.evaluate().unwrap()).unwrap();
    assert!(after.distance(weyl_core::mirror_coords(before)) < 1e-9);
    assert!(stderr(&o).contains("before:") && stderr(&o).contains("after:"));

    assert_eq!(weyl(&["mirror", "--circuit", s(&f), "--index", "3"]).status.code(), Some(6));
    assert_eq!(weyl(&["mirror", "--circuit", s(&f)]).status.code(), Some(2));
}

#[test]
fn verify_pass_fail_and_self() {
    let dir = TempDir::new().unwrap();
    let c = random_circuit(&BaseGate::SuperControlled { alpha2: 0.3 }, 2, 5);
    let cf = write_circuit(&dir, "c.json", &c);
    let own = write_matrix(&dir, "own.json", &c.evaluate().unwrap());
    let o = weyl(&["verify", "--circuit", s(&cf), "--target", s(&own)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS"));

    let other = write_matrix(&dir, "other.json", &Mat4::swap());
    let o = weyl(&["verify", "--circuit", s(&cf), "--target", s(&other)]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("FAIL"));

    let dressed = tensor(&haar_random_u2(9), &haar_random_u2(10)) * c.evaluate().unwrap();
    let d = write_matrix(&dir, "dressed.json", &dressed);
    assert_eq!(weyl(&["verify", "--circuit", s(&cf), "--target", s(&d)]).status.code(), Some(4));
    let o = weyl(&["verify", "--circuit", s(&cf), "--target", s(&d), "--mode", "local", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["mode"], "local_equiv");
}

#[test]
fn tolerance_from_environment() {
    let dir = TempDir::new().unwrap();
    let c = weyl_core::Circuit::bare(BaseGate::Controlled { gamma: 0.5 }, 0);
    let cf = write_circuit(&dir, "c.json", &c);
    let t = write_matrix(&dir, "cnot.json", &Mat4::cnot());
    let run = |tol: &str| {
        Command::new(env!("CARGO_BIN_EXE_weyl"))
            .args(["verify", "--circuit", s(&cf), "--target", s(&t)])
            .env("WEYL_TOL", tol)
            .output()
            .unwrap()
    };
    assert_eq!(run("0.6").status.code(), Some(0));
    assert_eq!(run("0.4").status.code(), Some(4));
    assert_eq!(run("loose").status.code(), Some(2));
}

#[test]
fn reach_examples() {
    let o = weyl(&["reach", "--base", "controlled:pi/2", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("predicate: h3 = 0; h1+h2 ≤ π"), "{}", stdout(&o));

    let o = weyl(&["reach", "--base", "controlled:0.3", "--n", "4", "--point", "0,0,0"]);
    assert!(stdout(&o).contains("INSIDE"));

    let o = weyl(&["reach", "--base", "controlled:pi/4", "--n", "3", "--point", "pi/2,pi/2,pi/2"]);
    let text = stdout(&o);
    assert!(text.contains("OUTSIDE"), "{text}");
    assert!(text.contains("binding: h1+h2+|h3| ≤ nγ"), "{text}");

    assert_eq!(weyl(&["reach", "--base", "supercontrolled:0.2", "--n", "3"]).status.code(), Some(5));
}

#[test]
fn sweeps_write_reports() {
    let dir = TempDir::new().unwrap();
    for suite in ["necessity", "roundtrip", "crossmethod"] {
        let path = dir.path().join(format!("{suite}.json"));
        let start = std::time::Instant::now();
        let o = weyl(&["sweep", "--suite", suite, "--trials", "100", "--seed", "3", "--out", s(&path)]);
        assert!(start.elapsed().as_secs() < 60, "{suite} took {:?}", start.elapsed());
        assert_eq!(o.status.code(), Some(0), "{suite}: {}", stderr(&o));
        let report: weyl_core::VerifyReport = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert!(report.failures.is_empty());
        assert!(report.trials >= 100);
    }
}

#[test]
fn sweeps_are_reproducible() {
    let a = weyl(&["sweep", "--suite", "roundtrip", "--trials", "20", "--seed", "11"]);
    let b = weyl(&["sweep", "--suite", "roundtrip", "--trials", "20", "--seed", "11"]);
    assert_eq!(stdout(&a), stdout(&b));
    let c = weyl(&["sweep", "--suite", "roundtrip", "--trials", "20"]);
    let d = weyl(&["sweep", "--suite", "roundtrip", "--trials", "20", "--seed", "0"]);
    assert_eq!(stdout(&c), stdout(&d));
}
