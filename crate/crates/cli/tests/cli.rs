use std::f64::consts::FRAC_PI_4;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lossqfi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lossqfi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = lossqfi(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    lossqfi(args).status.code().expect("exit code")
}

/// Header plus rows split on commas (no quoted fields expected).
fn rows(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let body = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, body)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn sweep_phi_fock_and_coherent() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("fig1.csv");
    ok(&[
        "sweep-phi",
        "--families",
        "fock:n=2,coherent:alpha=1",
        "--phi",
        "0.05:1.52:30",
        "--out",
        path.to_str().unwrap(),
    ]);
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.ends_with('\n'));
    let (h, body) = rows(&text);
    assert_eq!(h, ["family", "phi", "nbar", "H", "ultimate_bound"]);
    assert_eq!(body.len(), 60);
    let fock: Vec<_> = body.iter().filter(|r| r[0] == "fock:n=2").collect();
    assert_eq!(fock.len(), 30);
    assert!(fock.iter().all(|r| r[3] == "8.00000000000"));
    assert_eq!(body[0][1], "0.0500000000000");
    assert_eq!(body[29][1], "1.52000000000");
}

#[test]
fn sweep_phi_qubit_matches_closed_form() {
    let (h, body) = rows(&ok(&["sweep-phi", "--families", "qubit:nbar=0.5", "--phi", "0.1:1.5:15"]));
    assert_eq!(body.len(), 15);
    for r in body {
        let phi = num(&r[col(&h, "phi")]);
        let want = 4.0 * 0.5 * (1.0 - 0.5 * phi.cos().powi(2));
        assert!((num(&r[col(&h, "H")]) - want).abs() < 1e-8);
    }
}

#[test]
fn sweep_energy_ordering_and_bound() {
    let (h, body) = rows(&ok(&[
        "sweep-energy",
        "--families",
        "qubit,qutrit_opt,superposition_k=3",
        "--phi",
        "pi/4",
        "--nbar",
        "0.05:1:20",
    ]));
    assert_eq!(body.len(), 60);
    let (hc, nc, bc) = (col(&h, "H"), col(&h, "nbar"), col(&h, "ultimate_bound"));
    for r in &body {
        assert!(num(&r[hc]) <= num(&r[bc]) * (1.0 + 1e-6));
        assert!((num(&r[bc]) - 4.0 * num(&r[nc])).abs() < 1e-10);
        assert!((num(&r[col(&h, "phi")]) - FRAC_PI_4).abs() < 1e-11);
    }
    for i in 0..20 {
        let (q1, q2, q3) = (num(&body[i][hc]), num(&body[20 + i][hc]), num(&body[40 + i][hc]));
        assert!(q3 >= q2 - 1e-6 && q2 >= q1 - 1e-6, "row {i}: {q1} {q2} {q3}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&["sweep-phi", "--families", "", "--phi", "0.1:1:5"]), 2);
    assert_eq!(code(&["sweep-phi", "--families", "nosuch:x=1", "--phi", "0.1:1:5"]), 2);
    assert_eq!(code(&["sweep-phi", "--families", "fock:n=1", "--phi", "0.5"]), 2);
    assert_eq!(code(&["sweep-phi", "--families", "qutrit_opt", "--phi", "0.1:1:5"]), 2);
    assert_eq!(code(&["qfi", "fock:n=1", "--phi", "1:2"]), 2);
    assert_eq!(code(&["qfi", "fock:n=1", "--phi", "0.5", "--tail-tol", "2"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["region", "--eta", "0:2:0"]), 2);
    assert_eq!(code(&["region"]), 2);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn domain_errors_exit_one() {
    assert_eq!(code(&["sweep-energy", "--families", "qubit", "--phi", "1.6"]), 1);
    assert_eq!(code(&["qfi", "fock:n=1", "--phi", "0.0005"]), 1);
    assert_eq!(code(&["simulate", "--n", "1", "--phi", "pi/4", "--runs", "10"]), 1);
    assert_eq!(code(&["sweep-energy", "--families", "qubit", "--phi", "0.5", "--nbar", "0.5:1.5:3"]), 1);
    let out = lossqfi(&["qfi", "fock:n=1", "--phi", "0.0005"]);
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn qfi_report_and_closed_form() {
    let (h, body) = rows(&ok(&["qfi", "fock:n=3", "--phi", "0.2:1.2:3", "--runs", "100"]));
    assert_eq!(body.len(), 3);
    for r in &body {
        assert_eq!(r[col(&h, "H")], "12.0000000000");
        assert!((num(&r[col(&h, "crlb_variance")]) - 1.0 / 1200.0).abs() < 1e-15);
        assert_eq!(r[col(&h, "method")], "numeric");
    }
    let (h, body) = rows(&ok(&["qfi", "--closed-form", "coherent:alpha=1", "--phi", "pi/6"]));
    assert!((num(&body[0][col(&h, "H")]) - 1.0).abs() < 1e-11);
    assert_eq!(body[0][col(&h, "method")], "closed_form");
}

#[test]
fn sld_dump_examples() {
    let (h, body) = rows(&ok(&["sld-dump", "fock:n=2", "--phi", "0.6"]));
    assert_eq!(body.len(), 3);
    assert_eq!(h.len(), 2 + 2 * 3);
    for (k, r) in body.iter().enumerate() {
        for m in 0..3 {
            let want = if m == k { 1.0 } else { 0.0 };
            assert!((num(&r[2 + 2 * m]).abs() - want).abs() < 1e-12);
            assert!(num(&r[3 + 2 * m]).abs() < 1e-12);
        }
    }
    let (h, body) = rows(&ok(&["sld-dump", "qubit:nbar=0.5", "--phi", "0.78"]));
    assert_eq!((h.len(), body.len()), (6, 2));
    let (_, body) = rows(&ok(&["sld-dump", "vacuum", "--phi", "0.5"]));
    assert_eq!(body.len(), 1);
    assert_eq!(num(&body[0][1]), 0.0);
}

#[test]
fn simulate_is_efficient_and_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a.csv");
    let b = tmp.path().join("b.csv");
    let args = |p: &Path| {
        vec![
            "simulate".to_string(),
            "--n".into(),
            "1".into(),
            "--phi".into(),
            "pi/4".into(),
            "--runs".into(),
            "10000".into(),
            "--reps".into(),
            "200".into(),
            "--seed".into(),
            "7".into(),
            "--out".into(),
            p.to_str().unwrap().into(),
        ]
    };
    for p in [&a, &b] {
        let v = args(p);
        ok(&v.iter().map(String::as_str).collect::<Vec<_>>());
    }
    let bytes = fs::read(&a).unwrap();
    assert_eq!(bytes, fs::read(&b).unwrap());
    let (h, body) = rows(&String::from_utf8(bytes).unwrap());
    let v = num(&body[0][col(&h, "normalized_variance")]);
    assert!((0.85..=1.15).contains(&v), "{v}");
}

#[test]
fn json_output_parses() {
    let text = ok(&["sweep-phi", "--families", "fock:n=1", "--phi", "0.1:0.2:2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["H"], serde_json::json!(4.0));
    assert_eq!(rows[1]["family"], "fock:n=1");
    assert!(text.contains("\"H\": 4.00000000000"));
}

#[test]
fn optimize_emits_named_parameters() {
    let (h, body) = rows(&ok(&["optimize", "--family", "qutrit_opt", "--nbar", "0.5", "--phi", "0.3:1.2:2"]));
    assert_eq!(body.len(), 2);
    assert_eq!(h.last().unwrap(), "beta");
    assert_eq!(code(&["optimize", "--family", "qubit", "--nbar", "0.5", "--phi", "0.3"]), 2);
}

#[test]
fn region_writes_all_files() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("fig3");
    ok(&["region", "--out", dir.to_str().unwrap()]);
    let mut names: Vec<String> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        ["coverage.csv", "curve_1.csv", "curve_2.csv", "curve_3.csv", "curve_4.csv", "curve_5.csv", "region.csv"]
    );
    let (h, body) = rows(&fs::read_to_string(dir.join("region.csv")).unwrap());
    assert_eq!(h, ["eta", "r", "nbar", "beta"]);
    assert!(body.iter().all(|r| num(&r[2]) <= 1.0));
    let (h, cov) = rows(&fs::read_to_string(dir.join("coverage.csv")).unwrap());
    assert_eq!(cov.len(), 5 * 19);
    let (c, e) = (col(&h, "covered"), col(&h, "exception"));
    assert!(cov.iter().all(|r| r[c] == "true" || r[e] == "true"));
}

#[test]
fn output_is_deterministic() {
    let args = [
        "sweep-phi",
        "--families",
        "superposition_k=2,gaussian_opt",
        "--nbar",
        "0.4",
        "--phi",
        "0.3:1.1:3",
        "--seed",
        "5",
    ];
    assert_eq!(ok(&args), ok(&args));
}
