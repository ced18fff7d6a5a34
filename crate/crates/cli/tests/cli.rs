//! End-to-end checks of the command-line interface: output schemas, exit
//! codes, determinism and the documented cross-command consistency.

use std::process::{Command, Output};

const COMB: &str =
    r#"{"period":1.0,"amplitude":100.0,"deltas":[{"offset":0.0,"strength":1.0}],"smooth":[]}"#;
const ALTERNATING: &str = r#"{"period":2.0,"amplitude":50.0,"deltas":[{"offset":0.0,"strength":1.0},{"offset":1.0,"strength":-1.0}],"smooth":[]}"#;
const FREE: &str = r#"{"period":1.0,"amplitude":1.0,"deltas":[],"smooth":[]}"#;

fn slabwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slabwave"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn slabwave_env(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_slabwave"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    assert!(
        out.status.success(),
        "command failed: {}\n{}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).expect("utf8 output")
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn bands_of_the_strong_comb_hug_resonances() {
    let out = slabwave(&[
        "bands",
        "--spec",
        COMB,
        "--omega-min",
        "0.1",
        "--omega-max",
        "10",
        "--omega-steps",
        "2000",
    ]);
    let text = stdout_of(&out);
    assert!(text.starts_with("n,lo,hi,lo_class,hi_class,width\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 3);
    for (i, row) in rows.iter().enumerate() {
        let top = (i + 1) as f64 * std::f64::consts::PI;
        let lo: f64 = row[1].parse().unwrap();
        let hi: f64 = row[2].parse().unwrap();
        assert!((hi - top).abs() < 1e-6, "band {i} hi = {hi}");
        assert!(lo < top && lo > top * 0.9, "band {i} lo = {lo}");
        assert_eq!(row[3], "nondegenerate");
        assert_eq!(row[4], "nondegenerate");
    }
}

#[test]
fn free_spec_scans_to_one_band() {
    let out = slabwave(&[
        "bands",
        "--spec",
        FREE,
        "--omega-min",
        "0.1",
        "--omega-max",
        "10",
        "--omega-steps",
        "500",
    ]);
    let rows = csv_rows(&stdout_of(&out));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][3], "clipped");
}

#[test]
fn alternating_comb_reports_shared_degenerate_edge() {
    let out = slabwave(&[
        "bands",
        "--spec",
        ALTERNATING,
        "--omega-min",
        "2.6",
        "--omega-max",
        "3.7",
        "--omega-steps",
        "800",
    ]);
    let rows = csv_rows(&stdout_of(&out));
    assert_eq!(rows.len(), 2, "rows: {rows:?}");
    assert_eq!(rows[0][4], "degenerate");
    assert_eq!(rows[1][3], "degenerate");
    let hi0: f64 = rows[0][2].parse().unwrap();
    let lo1: f64 = rows[1][1].parse().unwrap();
    assert!((hi0 - lo1).abs() < 1e-9);
}

#[test]
fn scatter_rows_conserve_energy_and_decay_in_gaps() {
    let out = slabwave(&[
        "scatter",
        "--spec",
        COMB,
        "--omega-min",
        "3.0",
        "--omega-max",
        "4.5",
        "--omega-steps",
        "40",
        "--periods",
        "4",
        "--periods",
        "8",
    ]);
    let text = stdout_of(&out);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 80);
    let mut gap_t: std::collections::HashMap<String, Vec<(u32, f64)>> = Default::default();
    for row in &rows {
        assert!(row[7].is_empty(), "unexpected error flag: {row:?}");
        let energy_sum: f64 = row[5].parse().unwrap();
        assert!(
            (energy_sum - 1.0).abs() < 1e-9,
            "conservation defect in {row:?}"
        );
        if row[6] == "gap" {
            let n: u32 = row[1].parse().unwrap();
            let t: f64 = row[4].parse().unwrap();
            gap_t.entry(row[0].clone()).or_default().push((n, t));
        }
    }
    let mut checked = 0;
    for values in gap_t.values() {
        if values.len() == 2 {
            let (n_a, t_a) = values[0];
            let (n_b, t_b) = values[1];
            let (small, big) = if n_a < n_b { (t_a, t_b) } else { (t_b, t_a) };
            assert!(big < small, "no gap decay: {values:?}");
            checked += 1;
        }
    }
    assert!(checked > 10, "too few gap rows to check decay");
}

#[test]
fn scatter_output_is_deterministic_across_thread_counts() {
    let args = [
        "scatter",
        "--spec",
        COMB,
        "--omega-min",
        "0.5",
        "--omega-max",
        "9.5",
        "--omega-steps",
        "137",
        "--periods",
        "8",
    ];
    let one = stdout_of(&slabwave_env(&args, &[("SCATTER_THREADS", "1")]));
    let four = stdout_of(&slabwave_env(&args, &[("SCATTER_THREADS", "4")]));
    let again = stdout_of(&slabwave_env(&args, &[("SCATTER_THREADS", "4")]));
    assert_eq!(one, four, "thread count changed the bytes");
    assert_eq!(four, again, "repeat run changed the bytes");
}

#[test]
fn transparency_rows_match_near_unit_transmission() {
    let out = slabwave(&[
        "transparency",
        "--spec",
        COMB,
        "--omega-min",
        "2.5",
        "--omega-max",
        "3.5",
        "--omega-steps",
        "400",
        "--periods",
        "8",
    ]);
    let rows = csv_rows(&stdout_of(&out));
    assert_eq!(rows.len(), 7);
    for row in &rows {
        let residual: f64 = row[3].parse().unwrap();
        assert!(residual < 1e-9, "residual {residual}");
    }
    // cross-check: scatter at the first transparency point transmits fully
    let omega = &rows[0][2];
    let lo: f64 = omega.parse::<f64>().unwrap() - 1e-9;
    let hi: f64 = omega.parse::<f64>().unwrap() + 1e-9;
    let out = slabwave(&[
        "scatter",
        "--spec",
        COMB,
        "--omega-min",
        &lo.to_string(),
        "--omega-max",
        &hi.to_string(),
        "--omega-steps",
        "2",
        "--periods",
        "8",
    ]);
    for row in csv_rows(&stdout_of(&out)) {
        let abs_t: f64 = row[4].parse().unwrap();
        assert!(
            abs_t > 1.0 - 1e-6,
            "|t| = {abs_t} at the transparency point"
        );
    }
}

#[test]
fn semi_infinite_free_medium_reflects_nothing() {
    let out = slabwave(&[
        "semi",
        "--spec",
        FREE,
        "--omega-min",
        "1.0",
        "--omega-max",
        "2.0",
        "--omega-steps",
        "5",
    ]);
    for row in csv_rows(&stdout_of(&out)) {
        let abs_r: f64 = row[3].parse().unwrap();
        assert!(abs_r < 1e-9);
        assert!(row[6].is_empty());
    }
}

#[test]
fn json_format_emits_full_precision_objects() {
    let out = slabwave(&[
        "dispersion",
        "--spec",
        COMB,
        "--omega-min",
        "3.0",
        "--omega-max",
        "3.2",
        "--omega-steps",
        "4",
        "--format",
        "json",
    ]);
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&out)).expect("valid json");
    let rows = parsed.as_array().expect("array of rows");
    assert_eq!(rows.len(), 4);
    for row in rows {
        assert!(row.get("omega").and_then(|v| v.as_f64()).is_some());
        assert!(row.get("regime").and_then(|v| v.as_str()).is_some());
    }
}

#[test]
fn free_pulse_transmits_everything() {
    let dir = tempfile::tempdir().unwrap();
    let summary_path = dir.path().join("summary.json");
    let out = slabwave(&[
        "pulse",
        "--amplitude",
        "0",
        "--omega0",
        "3.0",
        "--pulse-width",
        "20",
        "--periods",
        "1",
        "--resolution",
        "32",
        "--out",
        dir.path().join("series.csv").to_str().unwrap(),
        "--summary-out",
        summary_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&summary_path).unwrap()).unwrap();
    let transmitted = summary["transmitted_fraction"].as_f64().unwrap();
    assert!(
        (transmitted - 1.0).abs() < 1e-3,
        "transmitted {transmitted}"
    );
    let drift = summary["energy_drift"].as_f64().unwrap();
    assert!(drift < 1e-3);
    let series = std::fs::read_to_string(dir.path().join("series.csv")).unwrap();
    assert!(series.starts_with("t,e_total,e_left,e_slab,e_right\n"));
}

#[test]
fn pulse_snapshots_carry_header_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = slabwave(&[
        "pulse",
        "--amplitude",
        "0",
        "--omega0",
        "3.0",
        "--pulse-width",
        "10",
        "--periods",
        "1",
        "--resolution",
        "16",
        "--t-end",
        "15",
        "--snapshot-every",
        "100",
        "--snapshot-dir",
        dir.path().join("snaps").to_str().unwrap(),
        "--out",
        dir.path().join("series.csv").to_str().unwrap(),
        "--summary-out",
        dir.path().join("summary.json").to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let snaps: Vec<_> = std::fs::read_dir(dir.path().join("snaps"))
        .unwrap()
        .collect();
    assert!(!snaps.is_empty(), "no snapshots written");
    let first = std::fs::read(dir.path().join("snaps").join("field_000000.bin")).unwrap();
    let len = u64::from_le_bytes(first[0..8].try_into().unwrap()) as usize;
    assert_eq!(first.len(), 24 + 16 * len);
}

#[test]
fn verify_subset_passes_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let report_path = dir.path().join("report.json");
    let out = slabwave(&[
        "verify",
        "--only",
        "2,6",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 2);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["all_pass"], serde_json::json!(true));
    let criteria = report["criteria"].as_array().unwrap();
    assert!(criteria.iter().all(|c| c["seconds"].as_f64().is_some()));
}

#[test]
fn verify_tightened_tolerance_fails_with_exit_code_3() {
    let out = slabwave(&[
        "verify",
        "--only",
        "2",
        "--set",
        "transfer.chebyshev_tol=1e-14",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[FAIL]"), "{text}");
}

#[test]
fn usage_errors_exit_with_code_1() {
    let bad_spec = slabwave(&[
        "bands",
        "--spec",
        "{not json}",
        "--omega-min",
        "1",
        "--omega-max",
        "2",
    ]);
    assert_eq!(bad_spec.status.code(), Some(1));

    let bad_range = slabwave(&[
        "dispersion",
        "--spec",
        FREE,
        "--omega-min",
        "2",
        "--omega-max",
        "1",
    ]);
    assert_eq!(bad_range.status.code(), Some(1));

    let unknown_key = slabwave(&["verify", "--only", "4", "--set", "nonsense.key=1"]);
    assert_eq!(unknown_key.status.code(), Some(1));

    let unknown_flag = slabwave(&["bands", "--nope"]);
    assert_eq!(unknown_flag.status.code(), Some(1));
}

#[test]
fn coarse_band_scan_warns_with_exit_code_4() {
    // A 100-point grid over (0.1, 10) has cells wider than half the first
    // band of the strong comb; the scanner still finds the bands through the
    // resonance clusters but must flag the resolution.
    let out = slabwave(&[
        "bands",
        "--spec",
        COMB,
        "--omega-min",
        "0.1",
        "--omega-max",
        "10",
        "--omega-steps",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("refine the grid"), "stderr: {stderr}");
    // the table itself is still written
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("n,lo,hi,"), "{text}");
    assert!(text.lines().count() >= 2);
}

#[test]
fn help_and_version_exit_cleanly() {
    assert!(slabwave(&["--help"]).status.success());
    assert!(slabwave(&["--version"]).status.success());
}
