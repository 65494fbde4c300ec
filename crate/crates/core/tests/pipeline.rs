use std::f64::consts::{PI, TAU};
use std::path::PathBuf;
use std::process::Command;

use zygmund_lab::estimates::{
    cell_average, counterexample_series, parse_cases, ExperimentCase, FieldSpec,
};
use zygmund_lab::pde::{log_potential, solve_dirichlet, DiscreteField, PolarGrid};
use zygmund_lab::surface::MetricProfile;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_zygmund-lab"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("zygmund-lab-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// Max gap between the Dirichlet solve and the free-space log potential.
fn green_gap(n: usize) -> f64 {
    let flat = MetricProfile::flat(1.0).unwrap();
    let grid = PolarGrid::new(&flat, n, 2 * n, 1.0).unwrap();
    let spike = FieldSpec::Spike {
        amplitude: 1.0,
        k: 4.0,
        center: [0.1, 0.05],
    }
    .resolve(0);
    let f = cell_average(&grid, &spike);
    let samples = grid.samples(&f, 1.0).unwrap();
    let points: Vec<[f64; 2]> = (0..grid.len()).map(|k| grid.position(k)).collect();
    let pot = log_potential(&samples, &points, true).unwrap();
    let exact = pot.values;
    let boundary: Vec<f64> = (0..grid.len())
        .filter(|&k| grid.is_boundary(k))
        .map(|k| exact[k])
        .collect();
    let (u, _) = solve_dirichlet(&grid, &DiscreteField::zeros(&grid), &f, &boundary).unwrap();
    u.values
        .iter()
        .zip(&exact)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

#[test]
fn dirichlet_solve_matches_log_potential() {
    let (coarse, fine) = (green_gap(32), green_gap(64));
    assert!(fine < 5e-3, "gap {fine}");
    assert!(coarse / fine > 3.0, "gap ratio {}", coarse / fine);
}

#[test]
fn counterexample_conventions_differ_by_two_pi() {
    let s = counterexample_series(&[16, 32, 64]).unwrap();
    assert!(s.slope_paper > 0.0 && s.slope_standard > 0.0);
    assert!((s.slope_paper / s.slope_standard - TAU).abs() < 1e-10);
    for r in &s.runs {
        assert!((r.u0_paper / r.u0_standard - TAU).abs() < 1e-10);
    }
}

#[test]
fn case_json_round_trip() {
    let case = ExperimentCase::new(
        "rt",
        "perturbed:0.1",
        16,
        FieldSpec::Constant { value: -1.0 },
    )
    .with_g(FieldSpec::Constant { value: 2.0 })
    .with_boundary(FieldSpec::Linear {
        c0: 0.0,
        cx: 1.0,
        cy: 0.0,
    });
    let text = serde_json::to_string(&vec![case.clone()]).unwrap();
    assert_eq!(parse_cases(&text).unwrap(), vec![case]);
    let unicode = r#"{"id": "u", "n_r": 8, "n_θ": 16, "f": {"kind": "constant", "value": 1.0}}"#;
    assert_eq!(parse_cases(unicode).unwrap()[0].n_theta, 16);
}

#[test]
fn geometry_example_exits_zero() {
    let out = bin()
        .args([
            "verify-geometry",
            "--metric",
            "sphere",
            "--A",
            "0.1592",
            "--p",
            "2",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let verdicts = v["check"]["verdicts"].as_array().unwrap();
    assert!(!verdicts.is_empty() && verdicts.iter().all(|x| x["pass"] == true));
}

#[test]
fn undersized_constant_fails_with_exit_two() {
    let out = bin()
        .args(["verify-geometry", "--metric", "flat", "--A", "0.05"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn counterexample_csv_and_svg() {
    let out = bin()
        .args([
            "counterexample",
            "--kmin",
            "16",
            "--kmax",
            "256",
            "--format",
            "csv",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = text.lines();
    assert!(rows.next().unwrap().starts_with("k,u0_paper"));
    let ks: Vec<u32> = rows
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(ks, vec![16, 32, 64, 128, 256]);
    let svg = bin()
        .args(["counterexample", "--format", "svg"])
        .output()
        .unwrap();
    assert_eq!(
        String::from_utf8(svg.stdout)
            .unwrap()
            .matches("<polyline")
            .count(),
        1
    );
}

#[test]
fn missing_file_names_the_path() {
    let path = scratch("does-not-exist.json");
    let out = bin()
        .args(["solve", "--cases"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains(path.to_str().unwrap()));
}

#[test]
fn malformed_json_reports_position() {
    let path = scratch("bad.json");
    std::fs::write(&path, "[{\"id\": \"a\",\n \"n_r\": }]").unwrap();
    let out = bin()
        .args(["solve", "--cases"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2") && err.contains("column"), "{err}");
}

#[test]
fn empty_report_exits_one() {
    let path = scratch("empty.json");
    std::fs::write(&path, "[]").unwrap();
    let out = bin()
        .args(["report", "--format", "csv", "--input"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("nothing to report"));
}

#[test]
fn unknown_format_and_bad_usage_exit_one() {
    assert_eq!(
        bin()
            .args(["convergence", "--format", "pdf"])
            .output()
            .unwrap()
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        bin()
            .args(["no-such-command"])
            .output()
            .unwrap()
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn report_round_trip_and_failing_verdict() {
    let path = scratch("verdicts.json");
    let verdicts = r#"[{"name":"a","lhs":1.0,"rhs":2.0,"ratio":0.5,"pass":true,"tol":0.0,"case":""},
                       {"name":"b","lhs":3.0,"rhs":2.0,"ratio":1.5,"pass":false,"tol":0.0,"case":""}]"#;
    std::fs::write(&path, verdicts).unwrap();
    let out = bin()
        .args(["report", "--format", "csv", "--input"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 3);
}

#[test]
fn solve_exports_values() {
    let path = scratch("cases.json");
    let case = ExperimentCase::new("q", "flat", 16, FieldSpec::Constant { value: -4.0 });
    std::fs::write(&path, serde_json::to_string(&vec![case]).unwrap()).unwrap();
    let out = bin()
        .args(["solve", "--cases"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let values = v[0]["values"].as_array().unwrap();
    assert!((values[0].as_f64().unwrap() - 1.0).abs() < 1e-8);
    let csv = bin()
        .args(["solve", "--format", "csv", "--cases"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(
        String::from_utf8(csv.stdout).unwrap().lines().count(),
        1 + values.len()
    );
}

#[test]
fn runs_are_byte_identical() {
    for args in [
        vec![
            "interior",
            "--count",
            "6",
            "--resolution",
            "16",
            "--seed",
            "3",
        ],
        vec![
            "global",
            "--count",
            "4",
            "--draws",
            "4",
            "--resolution",
            "16",
            "--format",
            "csv",
        ],
        vec!["counterexample", "--format", "svg"],
    ] {
        let a = bin().args(&args).output().unwrap();
        let b = bin()
            .args(&args)
            .arg("--threads")
            .arg("1")
            .output()
            .unwrap();
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let a = bin()
        .args([
            "interior",
            "--count",
            "4",
            "--resolution",
            "12",
            "--seed",
            "1",
        ])
        .output()
        .unwrap();
    let b = bin()
        .args([
            "interior",
            "--count",
            "4",
            "--resolution",
            "12",
            "--seed",
            "2",
        ])
        .output()
        .unwrap();
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn quadratic_solution_ratio() {
    let case = ExperimentCase::new("q", "flat", 32, FieldSpec::Constant { value: -4.0 });
    let est = zygmund_lab::estimates::global_estimate(&case, None).unwrap();
    assert!((est.ratio - 1.0 / (4.0 * PI)).abs() < 1e-6);
    assert!(est.maximum_principle.pass);
}
