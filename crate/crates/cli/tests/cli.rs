use std::process::{Command, Output};

fn kerrcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kerrcap")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn sweep_header_and_full_precision() {
    let o = kerrcap(&["mi-sweep", "--power-points", "4", "--power-stop", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# units: nats\n"));
    let (header, rows) = csv_rows(&text);
    assert_eq!(
        header,
        ["P_mW", "SNR", "I_opt", "I_beta2", "I_beta1", "I_beta1_asymptote", "shannon", "prior_bound", "status"]
    );
    assert_eq!(rows.len(), 4);
    // 17 significant digits: d.dddddddddddddddde±x
    let mantissa = rows[1][2].split('e').next().unwrap();
    assert_eq!(mantissa.trim_start_matches('-').len(), 18);
    let p = column(&header, &rows, "P_mW");
    assert_eq!(p[0], 1e-3);
    assert_eq!(p[3], 10.0);
    assert!(rows.iter().all(|r| r.last().unwrap() == "ok"));
}

#[test]
fn linear_channel_sweep_reaches_shannon() {
    let o = kerrcap(&["mi-sweep", "--gamma", "0", "--power-points", "5", "--inputs", "opt,beta2"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&o));
    assert!(!header.contains(&"I_beta1".to_string()));
    let shannon = column(&header, &rows, "shannon");
    let snr = column(&header, &rows, "SNR");
    for name in ["I_opt", "I_beta2"] {
        for ((i, s), r) in column(&header, &rows, name).iter().zip(&shannon).zip(&snr) {
            // log SNR, which is log(1+SNR) to the order the model keeps
            assert!((i - r.ln()).abs() < 1e-12 * r.ln(), "{name}: {i} vs {}", r.ln());
            assert!(s - i >= 0.0 && s - i <= 1.0 / r);
        }
    }
    let pi = header.iter().position(|h| h == "prior_bound").unwrap();
    assert!(rows.iter().all(|r| r[pi] == "inf"));
}

#[test]
fn bits_flag_scales_by_ln2() {
    let args = ["mi-sweep", "--power-points", "3", "--inputs", "beta2"];
    let (h, nats) = csv_rows(&stdout(&kerrcap(&args)));
    let mut with_bits = args.to_vec();
    with_bits.push("--bits");
    let text = stdout(&kerrcap(&with_bits));
    assert!(text.starts_with("# units: bits\n"));
    let (_, bits) = csv_rows(&text);
    for (n, b) in column(&h, &nats, "I_beta2").iter().zip(column(&h, &bits, "I_beta2")) {
        assert!((n / std::f64::consts::LN_2 - b).abs() < 1e-14 * b.abs());
    }
}

#[test]
fn json_output_is_column_arrays() {
    let o = kerrcap(&["mi-sweep", "--power-points", "3", "--inputs", "opt", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["meta"]["units"], "nats");
    assert_eq!(v["columns"][2], "I_opt");
    assert_eq!(v["I_opt"].as_array().unwrap().len(), 3);
    assert_eq!(v["P_mW"][2], 5000.0);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"gamma": 2e-3, "power_points": 3, "inputs": ["beta1"], "format": "json"}"#).unwrap();
    let out = dir.path().join("sweep.json");
    let o = kerrcap(&[
        "mi-sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--gamma",
        "5e-4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["meta"]["gamma_per_mW_km"], 5e-4);
    assert_eq!(v["P_mW"].as_array().unwrap().len(), 3);
    assert!(v.get("I_beta1").is_some() && v.get("I_opt").is_none());
}

#[test]
fn bad_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"gama": 1}"#).unwrap();
    assert_eq!(kerrcap(&["mi-sweep", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(kerrcap(&["mi-sweep", "--power-points", "1"]).status.code(), Some(2));
    assert_eq!(kerrcap(&["mi-sweep", "--inputs", "beta3"]).status.code(), Some(2));
    assert_eq!(kerrcap(&["mi-sweep", "--q-noise", "0"]).status.code(), Some(2));
}

#[test]
fn validate_reports_and_exit_codes() {
    let o = kerrcap(&["validate"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for suite in ["normalization/", "moments/", "entropy/"] {
        assert!(text.lines().any(|l| l.starts_with(suite)));
    }
    assert!(text.lines().all(|l| l.split(' ').nth(1) == Some("PASS")));
    let o = kerrcap(&["validate", "--suite", "moments"]);
    assert!(stdout(&o).lines().all(|l| l.starts_with("moments/")));
    assert_eq!(kerrcap(&["validate", "--suite", "everything"]).status.code(), Some(2));
}

#[test]
fn optimal_input_metadata() {
    let o = kerrcap(&["optimal-input", "--power-mw", "10", "--density-points", "5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["meta"]["mass_check"], true);
    assert_eq!(v["meta"]["power_check"], true);
    assert!((v["meta"]["alpha"].as_f64().unwrap() - 5.317_895_677_128_453e-2).abs() < 1e-12);
    assert_eq!(v["density_per_mW"].as_array().unwrap().len(), 5);
}

#[test]
fn pdf_grid_columns() {
    let o = kerrcap(&["pdf-grid", "--points", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header[4..7], ["p_leading", "p_nlo", "p_nlo_raw"]);
    assert_eq!(rows.len(), 9);
    // centre cell is the deterministic output
    assert_eq!(column(&header, &rows, "x0")[4], 0.0);
    assert_eq!(kerrcap(&["pdf-grid", "--x-re", "0"]).status.code(), Some(2));
}

#[test]
fn mc_check_linear_small_run() {
    let o = kerrcap(&["mc-check", "--case", "linear", "--n-traj", "10000", "--n-steps", "100", "--seed", "3"]);
    let text = stdout(&o);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("linear/chi2-p-leading PASS"));
    assert!(lines[2].starts_with("linear/outside-fraction PASS"));
    let again = kerrcap(&["mc-check", "--case", "linear", "--n-traj", "10000", "--n-steps", "100", "--seed", "3"]);
    assert_eq!(again.stdout, o.stdout);
    assert_eq!(kerrcap(&["mc-check", "--case", "nope"]).status.code(), Some(2));
    assert_eq!(kerrcap(&["mc-check", "--n-traj", "5"]).status.code(), Some(2));
}
