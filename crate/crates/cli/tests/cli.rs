use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn lumispec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lumispec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn samples() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/samples")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn report_value(report: &str, prefix: &str) -> f64 {
    let line = report
        .lines()
        .find(|l| l.starts_with(prefix))
        .unwrap_or_else(|| panic!("no {prefix} in {report}"));
    line[prefix.len()..]
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

fn calib() -> PathBuf {
    samples().join("tcd1103.calib")
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(lumispec(&["--help"]).status.code(), Some(0));
    assert_eq!(lumispec(&["--version"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(lumispec(&[]).status.code(), Some(1));
    assert_eq!(lumispec(&["analyze"]).status.code(), Some(1));
    assert_eq!(
        lumispec(&["analyze", "--input", "x", "--cct-method", "robertson"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        lumispec(&["analyze", "--input", "/nonexistent/file.csv"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn analyze_bundled_d65_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report");
    let trace = dir.path().join("trace.json");
    let o = lumispec(&[
        "analyze",
        "--input",
        s(&samples().join("d65_6504k.csv")),
        "--out",
        s(&out),
        "--trace",
        s(&trace),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let report = stdout(&o);
    assert!(report_value(&report, "Ra: ") >= 99.5);
    let cct = report_value(&report, "CCT (exponential):");
    assert!((cct - 6504.0).abs() / 6504.0 < 0.005);
    for f in [
        "report.txt",
        "samples.csv",
        "spd.csv",
        "spd.svg",
        "chromaticity.csv",
    ] {
        assert!(out.join(f).is_file(), "{f}");
    }
    assert_eq!(fs::read_to_string(out.join("report.txt")).unwrap(), report);
    let trace =
        lumispec::pipeline::PipelineTrace::from_text(&fs::read_to_string(trace).unwrap()).unwrap();
    assert_eq!(trace.steps.first().unwrap().index, 3);
}

#[test]
fn nominal_override_gives_perfect_self_reference() {
    let o = lumispec(&[
        "analyze",
        "--input",
        s(&samples().join("d65_6504k.csv")),
        "--nominal-cct",
        "6504",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report_value(&stdout(&o), "Ra: "), 100.0);
}

#[test]
fn simulate_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let planck = dir.path().join("p3000.csv");
    assert!(
        lumispec(&["reference", "--cct", "3000", "--out", s(&planck)])
            .status
            .success()
    );
    let a = dir.path().join("a.frame");
    let b = dir.path().join("b.frame");
    for f in [&a, &b] {
        let o = lumispec(&[
            "simulate",
            "--input",
            s(&planck),
            "--noise",
            "0",
            "--seed",
            "1",
            "--out",
            s(f),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let poly = lumispec(&[
        "analyze",
        "--kind",
        "frame",
        "--input",
        s(&a),
        "--calib",
        s(&calib()),
        "--cct-method",
        "poly",
    ]);
    assert_eq!(poly.status.code(), Some(0));
    let cct = report_value(&stdout(&poly), "Reference:          planckian at");
    assert!((cct - 3000.0).abs() / 3000.0 < 0.01, "{cct}");

    let direct = report_value(
        &stdout(&lumispec(&["analyze", "--input", s(&planck)])),
        "CCT (exponential):",
    );
    let framed = lumispec(&[
        "analyze",
        "--kind",
        "frame",
        "--input",
        s(&a),
        "--calib",
        s(&calib()),
    ]);
    let exp = report_value(&stdout(&framed), "CCT (exponential):");
    assert!((exp - direct).abs() / direct < 0.01, "{exp} vs {direct}");
}

#[test]
fn frame_analysis_requires_calibration() {
    let dir = tempfile::tempdir().unwrap();
    let frame = dir.path().join("f.frame");
    let d65 = samples().join("d65_6504k.csv");
    assert!(
        lumispec(&["simulate", "--input", s(&d65), "--out", s(&frame)])
            .status
            .success()
    );
    assert_eq!(
        lumispec(&["analyze", "--kind", "frame", "--input", s(&frame)])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn simulate_saturation_and_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let d65 = samples().join("d65_6504k.csv");
    let out = dir.path().join("f.frame");
    assert_eq!(
        lumispec(&[
            "simulate",
            "--input",
            s(&d65),
            "--exposure",
            "1e6",
            "--out",
            s(&out)
        ])
        .status
        .code(),
        Some(5)
    );
    let zero = dir.path().join("zero.csv");
    fs::write(&zero, "wavelength_nm,power\n380,0\n780,0\n").unwrap();
    assert_eq!(
        lumispec(&["simulate", "--input", s(&zero), "--out", s(&out)])
            .status
            .code(),
        Some(2)
    );
    let blue = dir.path().join("uv.csv");
    fs::write(&blue, "wavelength_nm,power\n380,1\n385,0\n780,0\n").unwrap();
    assert_eq!(
        lumispec(&["simulate", "--input", s(&blue), "--out", s(&out)])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn capture_flat_frame_gives_flat_spd() {
    let dir = tempfile::tempdir().unwrap();
    let flat = dir.path().join("flat.csv");
    fs::write(&flat, "wavelength_nm,power\n380,1\n780,1\n").unwrap();
    let frame = dir.path().join("flat.frame");
    assert!(
        lumispec(&["simulate", "--input", s(&flat), "--out", s(&frame)])
            .status
            .success()
    );
    let spd_path = dir.path().join("back.csv");
    let o = lumispec(&[
        "capture",
        "--input",
        s(&frame),
        "--calib",
        s(&calib()),
        "--out",
        s(&spd_path),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(spd_path).unwrap();
    let band: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split_once(',').unwrap())
        .map(|(w, v)| (w.parse::<f64>().unwrap(), v.parse::<f64>().unwrap()))
        .filter(|(w, _)| (395.0..=720.0).contains(w))
        .map(|(_, v)| v)
        .collect();
    let max = band.iter().copied().fold(f64::MIN, f64::max);
    let min = band.iter().copied().fold(f64::MAX, f64::min);
    assert!((max - min) / max < 2e-3, "{min}..{max}");
}

#[test]
fn capture_rejects_short_dark_block() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("lumispec-frame v1 bitdepth=12 dark=13 effective=1500\n");
    text.push_str(&"3800\n".repeat(12));
    text.push_str(&"3000\n".repeat(1500));
    let frame = dir.path().join("short.frame");
    fs::write(&frame, text).unwrap();
    let out = dir.path().join("out.csv");
    let o = lumispec(&[
        "capture",
        "--input",
        s(&frame),
        "--calib",
        s(&calib()),
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "));
}

#[test]
fn capture_all_dark_frame_warns_and_writes_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("lumispec-frame v1 bitdepth=12 dark=13 effective=1500\n");
    text.push_str(&"3800\n".repeat(1513));
    let frame = dir.path().join("dark.frame");
    fs::write(&frame, text).unwrap();
    let out = dir.path().join("out.csv");
    let o = lumispec(&[
        "capture",
        "--input",
        s(&frame),
        "--calib",
        s(&calib()),
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let text = fs::read_to_string(out).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",0")));
    assert_eq!(
        lumispec(&[
            "analyze",
            "--kind",
            "frame",
            "--input",
            s(&frame),
            "--calib",
            s(&calib())
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn design_reference_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let o = lumispec(&["design", "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!((report_value(&text, "D2:") - 37.9).abs() < 0.15);
    let a = report_value(&text, "aperture (d=2.5 nm):");
    assert!((a - 0.18).abs() < 0.01);
    let sweep = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(sweep.starts_with("wavelength_nm,s_parallel_mm"));
    assert_eq!(sweep.lines().count(), 70);

    let wide = stdout(&lumispec(&["design", "--delta", "5.0"]));
    let a5 = report_value(&wide, "aperture (d=5 nm):");
    assert!((a5 / a - 2.0).abs() < 1e-3);

    let p = stdout(&lumispec(&["design", "--arrangement", "parallel"]));
    assert!((report_value(&p, "D1:") - 33.7).abs() < 0.05);
}

#[test]
fn design_without_first_order_exits_four() {
    let o = lumispec(&["design", "--lines-per-mm", "2000", "--lambda-high", "720"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no first-order maximum"));
}

#[test]
fn reference_out_of_range_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    assert_eq!(
        lumispec(&["reference", "--cct", "30000", "--out", s(&out)])
            .status
            .code(),
        Some(3)
    );
}
