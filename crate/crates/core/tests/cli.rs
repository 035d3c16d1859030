use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn resonance(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resonance"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn json_output_is_deterministic() {
    let args = [
        "resonance",
        "--method",
        "both",
        "--tol",
        "1e-3",
        "--format",
        "json",
        "--no-timestamp",
    ];
    let a = resonance(&args);
    let b = resonance(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["method"], "both");
    assert_eq!(v["diagnostics"]["agreement"]["agree"], true);
    assert!(v.get("generated_unix_s").is_none());
}

#[test]
fn timestamp_present_by_default() {
    let v = json(&resonance(&["yukawa-bracket", "--format", "json"]));
    assert!(v["generated_unix_s"].as_u64().unwrap() > 0);
}

#[test]
fn narrow_bracket_reports_deeper_truncation() {
    let wide = json(&resonance(&[
        "yukawa-bracket",
        "--tol",
        "0.012",
        "--format",
        "json",
        "--no-timestamp",
    ]));
    let narrow = json(&resonance(&[
        "yukawa-bracket",
        "--tol",
        "1e-4",
        "--format",
        "json",
        "--no-timestamp",
    ]));
    let w = |v: &Value| v["kappa_star"]["hi"].as_f64().unwrap() - v["kappa_star"]["lo"].as_f64().unwrap();
    assert!(w(&narrow) <= 1e-4 + 1e-12 && w(&narrow) < w(&wide));
    assert!(narrow["kappa_star"]["lo"].as_f64().unwrap() <= 1.679_807_773_396_453);
    assert!(narrow["kappa_star"]["hi"].as_f64().unwrap() >= 1.679_807_773_396_453);
    let depth = |v: &Value| {
        v["diagnostics"]["truncation"]["interior_partial_sums"][1]
            .as_u64()
            .unwrap()
    };
    assert!(depth(&narrow) >= depth(&wide));
}

#[test]
fn exit_codes() {
    assert_eq!(resonance(&["yukawa-bracket", "--tol", "0"]).status.code(), Some(2));
    assert_eq!(resonance(&["resonance", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        resonance(&["resonance", "--potential", "nonsense"]).status.code(),
        Some(2)
    );
    assert_eq!(resonance(&["resonance", "--potential", "hardy"]).status.code(), Some(3));
    assert_eq!(resonance(&["compare", "--c0", "-1"]).status.code(), Some(2));
    // within 1e-8 of the zero even the deepest truncation is indeterminate
    assert_eq!(
        resonance(&[
            "yukawa-bracket",
            "--lo",
            "1.67980777",
            "--hi",
            "1.6799",
            "--tol",
            "1e-6"
        ])
        .status
        .code(),
        Some(4)
    );
}

#[test]
fn tabulated_file_with_sensitivity_block() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# r  V(r)").unwrap();
    for i in 0..600 {
        let r = 10f64.powf(-5.0 + 7.5 * i as f64 / 599.0);
        writeln!(f, "{r:e} {:e}", (-r).exp() / r).unwrap();
    }
    let path = f.path().to_str().unwrap();
    let v = json(&resonance(&[
        "resonance",
        "--potential",
        path,
        "--tol",
        "1e-3",
        "--format",
        "json",
        "--no-timestamp",
    ]));
    assert_eq!(v["method"], "volterra");
    assert!(v["diagnostics"]["grid_sensitivity"].as_f64().is_some());
    let est = v["diagnostics"]["estimate"].as_f64().unwrap();
    assert!((est - 1.6798).abs() < 2e-3, "{est}");
}

#[test]
fn five_dimensions_is_an_eigenstate() {
    let v = json(&resonance(&[
        "resonance",
        "--dim",
        "5",
        "--method",
        "variational",
        "--tol",
        "1e-3",
        "--format",
        "json",
        "--no-timestamp",
    ]));
    assert_eq!(v["classification"], "eigenstate_L2");
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    let out = resonance(&[
        "plot-data",
        "--what",
        "wronskian",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "kappa,lo,mid,hi,sign,uncertified");
    let rows: Vec<(f64, String)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[4].to_string())
        })
        .collect();
    assert_eq!(rows.len(), 201);
    let changes: Vec<f64> = rows.windows(2).filter(|w| w[0].1 != w[1].1).map(|w| w[1].0).collect();
    assert_eq!(changes.len(), 1);
    assert!((changes[0] - 1.68).abs() < 0.011);
}

#[test]
fn compare_with_dominated_potential() {
    let v = json(&resonance(&[
        "compare",
        "--c0",
        "2",
        "--potential",
        "yukawa",
        "--scale",
        "1.5",
        "--format",
        "json",
        "--no-timestamp",
    ]));
    let lo = v["kappa_star"]["lo"].as_f64().unwrap();
    assert!(lo > 0.8 && lo < 0.84);
    assert!(v["kappa_star"]["hi"].is_null());
    assert_eq!(v["diagnostics"]["domination_spot_check"]["passed"], true);
    let refused = resonance(&["compare", "--c0", "1", "--potential", "yukawa", "--scale", "1.5"]);
    assert_eq!(refused.status.code(), Some(2));
}

#[test]
fn u_int_plot_is_certified_on_unit_interval() {
    let out = resonance(&[
        "plot-data",
        "--what",
        "u-int",
        "--kappa",
        "1.68",
        "--points",
        "21",
        "--format",
        "csv",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1) {
        assert!(line.ends_with(",0"), "{line}");
    }
    let beyond = resonance(&[
        "plot-data",
        "--what",
        "u-int",
        "--from",
        "1",
        "--to",
        "2",
        "--points",
        "3",
    ]);
    let text = String::from_utf8(beyond.stdout).unwrap();
    assert!(text.lines().last().unwrap().ends_with(",1"));
}
