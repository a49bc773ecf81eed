use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn sobolev(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sobolev"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, v: &Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(v).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn legendre_recurrence(count: usize) -> Vec<[f64; 2]> {
    (0..count)
        .map(|k| {
            let k = k as f64;
            [
                0.0,
                if k == 0.0 {
                    1.0
                } else {
                    k * k / (4.0 * k * k - 1.0)
                },
            ]
        })
        .collect()
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn missing_or_malformed_config_exits_2() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.json");
    let out = sobolev(&["basis", "--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let cfg = write_config(
        dir.path(),
        "bad.json",
        &json!({"preset": {"alpha": 1, "M": 1, "N": 1}, "colour": 3}),
    );
    assert_eq!(sobolev(&["basis", "--config", &cfg]).status.code(), Some(2));

    let cfg = write_config(
        dir.path(),
        "c.json",
        &json!({"space": {"measure": {"type": "legendre"}}}),
    );
    for bad in [
        vec!["expand", "--config", &cfg, "--function", "sin"],
        vec!["transform", "--config", &cfg, "--multiplier", "abel:2"],
        vec!["verify", "--config", &cfg, "--tol", "nonsense=1"],
        vec!["norm", "--config", &cfg, "--p", "0.5"],
    ] {
        let out = sobolev(&bad);
        assert_eq!(out.status.code(), Some(2), "{bad:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("configuration error"));
    }
    // gegenbauer alpha out of range
    assert_eq!(
        sobolev(&[
            "preset",
            "--alpha",
            "-0.7",
            "--out",
            dir.path().to_str().unwrap()
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn short_recurrence_table_exits_3() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &json!({"space": {"measure": {"type": "recurrence", "coefficients": legendre_recurrence(5)}}, "nmax": 16}),
    );
    let out = sobolev(&[
        "basis",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("numerical failure"));
}

#[test]
fn failing_condition_exits_1() {
    let dir = TempDir::new().unwrap();
    let coefficients = legendre_recurrence(200);
    let undeclared = write_config(
        dir.path(),
        "u.json",
        &json!({"space": {"measure": {"type": "recurrence", "coefficients": coefficients}}, "nmax": 32, "function": "exp", "multiplier": "fejer:8"}),
    );
    let out_dir = dir.path().join("u");
    let out = sobolev(&[
        "verify",
        "--config",
        &undeclared,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout
            .lines()
            .any(|l| l.starts_with("eq6") && l.ends_with("fails")),
        "{stdout}"
    );

    let declared = write_config(
        dir.path(),
        "d.json",
        &json!({"space": {"measure": {"type": "recurrence", "coefficients": coefficients, "absolutely_continuous": true}},
                "nmax": 32, "function": "exp", "multiplier": "fejer:8"}),
    );
    let out_dir = dir.path().join("d");
    let out = sobolev(&[
        "verify",
        "--config",
        &declared,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let reports: Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("reports.json")).unwrap()).unwrap();
    let eq6 = reports
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["condition"] == "eq6")
        .unwrap();
    assert_eq!(eq6["verdict"], "passes");
}

#[test]
fn legendre_basis_has_identity_connection() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &json!({"space": {"measure": {"type": "legendre"}}, "nmax": 8}),
    );
    let out = sobolev(&[
        "basis",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let rows = read_csv(&dir.path().join("connection.csv"));
    assert_eq!(rows.len(), 9 * 10 / 2);
    for r in &rows {
        let (n, j, c): (usize, usize, f64) = (
            r[0].parse().unwrap(),
            r[1].parse().unwrap(),
            r[2].parse().unwrap(),
        );
        let want = if n == j { 1.0 } else { 0.0 };
        assert!((c - want).abs() <= 1e-12, "{r:?}");
    }
    let band = read_csv(&dir.path().join("band.csv"));
    for r in &band {
        let (n, j, d): (f64, usize, f64) = (
            r[0].parse().unwrap(),
            r[1].parse().unwrap(),
            r[2].parse().unwrap(),
        );
        // π = 1 + x without mass points
        let want = if j == 0 {
            1.0
        } else {
            n / (4.0 * n * n - 1.0).sqrt()
        };
        assert!((d - want).abs() <= 1e-12, "{r:?}");
    }
    let summary: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("residual.json")).unwrap()).unwrap();
    assert!(summary["orthonormality_residual"].as_f64().unwrap() <= 1e-12);
    assert_eq!(summary["band_width"], 1);
}

#[test]
fn endpoint_preset_basis_reconstructs() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().to_str().unwrap();
    assert!(
        sobolev(&["preset", "--alpha", "1", "--M", "1", "--N", "1", "--out", p])
            .status
            .success()
    );
    let space: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("space.json")).unwrap()).unwrap();
    assert_eq!(space["measure"]["type"], "gegenbauer");
    assert_eq!(space["masses"][0]["a"], -1.0);
    assert_eq!(space["masses"][1]["M"], json!([1.0, 1.0]));

    let cfg = write_config(
        dir.path(),
        "c.json",
        &json!({"space_file": "space.json", "nmax": 40}),
    );
    let out = sobolev(&["basis", "--config", &cfg, "--out", p]);
    assert!(out.status.success());
    let summary: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("residual.json")).unwrap()).unwrap();
    assert_eq!(summary["band_width"], 5);
    assert!(summary["reconstruction_residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn preset_warns_outside_stated_range() {
    let dir = TempDir::new().unwrap();
    let out = sobolev(&[
        "preset",
        "--alpha",
        "0.25",
        "--M",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let space: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("space.json")).unwrap()).unwrap();
    assert_eq!(space["masses"][0]["M"], json!([1.0]));
}

#[test]
fn transform_with_ones_matches_expand() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &json!({"preset": {"alpha": 1, "M": 1, "N": 1}, "nmax": 32, "function": "exp"}),
    );
    let e = dir.path().join("e");
    let t = dir.path().join("t");
    assert!(
        sobolev(&["expand", "--config", &cfg, "--out", e.to_str().unwrap()])
            .status
            .success()
    );
    assert!(sobolev(&[
        "transform",
        "--config",
        &cfg,
        "--multiplier",
        "ones",
        "--out",
        t.to_str().unwrap()
    ])
    .status
    .success());
    assert_eq!(
        std::fs::read(e.join("partial_sums.csv")).unwrap(),
        std::fs::read(t.join("transform.csv")).unwrap()
    );
    let rows = read_csv(&e.join("partial_sums.csv"));
    assert_eq!(rows.len(), 21);
    for r in rows {
        let x: f64 = r[0].parse().unwrap();
        let s32: f64 = r.last().unwrap().parse().unwrap();
        assert!((s32 - x.exp()).abs() <= 1e-12);
    }
}

#[test]
fn norm_prints_sobolev_norm_of_constant() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &json!({"preset": {"alpha": 0, "M": 1, "N": 0}, "function": "one"}),
    );
    let out = sobolev(&["norm", "--config", &cfg]);
    assert!(out.status.success());
    let v: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!((v - 3f64.sqrt()).abs() <= 1e-14);

    let out = sobolev(&["norm", "--config", &cfg, "--p", "1", "--delta", "0.5"]);
    let v: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    // ∫_{-1/2}^{1/2} dx/2 = 1/2 plus the two endpoint masses, which belong to K_δ
    assert!((v - 2.5).abs() <= 1e-14);
}

#[test]
fn verify_writes_one_trace_file_per_report() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &json!({"preset": {"alpha": 1, "M": 1, "N": 1}, "nmax": 64, "function": "step:0.3", "multiplier": "log",
                "points": [-0.5, 0.3, 0.7]}),
    );
    let out = sobolev(&[
        "verify",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let reports: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("reports.json")).unwrap()).unwrap();
    let reports = reports.as_array().unwrap();
    for (i, r) in reports.iter().enumerate() {
        let name = format!("{i:02}_{}.csv", r["condition"].as_str().unwrap());
        assert!(dir.path().join(name).exists());
    }
    let thm1ii = reports.iter().find(|r| r["condition"] == "thm1ii").unwrap();
    assert_eq!(thm1ii["verdict"], "inconclusive");
    let thm1i = reports.iter().find(|r| r["condition"] == "thm1i").unwrap();
    assert!(thm1i["notes"].to_string().contains("skipped"));
    assert_ne!(out.status.code(), Some(2));
}
