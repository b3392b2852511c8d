mod common;

use std::fs;
use std::process::{Command, Output};

use common::fixture;

fn zonal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zonal-density"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// Copies the synthetic config into `dir` with absolute input paths.
fn config_in(dir: &std::path::Path, extra: &str) -> String {
    let body = format!(
        "regions = {:?}\nboundaries = {:?}\nsettlement = {:?}\ncell_size = 500.0\noutput_dir = {:?}\n{extra}\n[[correlation]]\n[[ttest]]\n[[normality]]\nmodel = \"new\"\n",
        fixture("synthetic/regions.csv"),
        fixture("synthetic/boundaries.geojson"),
        fixture("synthetic/settlement.asc"),
        dir.join("out"),
    );
    let path = dir.join("config.toml");
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn run_succeeds_and_writes_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = zonal(&["run", "--config", &config_in(tmp.path(), "")]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("Shapiro-Wilk"));
    for f in [
        "normality.csv",
        "correlations.csv",
        "ttests.csv",
        "densities.csv",
        "summary.txt",
    ] {
        assert!(tmp.path().join("out").join(f).is_file(), "{f}");
    }
}

#[test]
fn verbose_logs_pixel_sizes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = zonal(&[
        "--verbose",
        "correlate",
        "--config",
        &config_in(tmp.path(), ""),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("region R01: m = "), "{stderr}");
    assert!(stderr.contains("fence"), "{stderr}");
}

#[test]
fn missing_config_file_is_io_error() {
    let out = zonal(&["run", "--config", "/definitely/not/here.toml"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn invalid_alpha_is_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = zonal(&["run", "--config", &config_in(tmp.path(), "alpha = 1.5")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
}

#[test]
fn malformed_config_is_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.toml");
    fs::write(&path, "regions = [unclosed").unwrap();
    let out = zonal(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_is_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("blocker");
    fs::write(&blocker, "").unwrap();
    let config = config_in(tmp.path(), "");
    let body = fs::read_to_string(&config).unwrap().replace(
        &format!("{:?}", tmp.path().join("out")),
        &format!("{:?}", blocker.join("out")),
    );
    fs::write(&config, body).unwrap();
    let out = zonal(&["run", "--config", &config]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn bad_arguments_exit_with_two() {
    assert_eq!(zonal(&["run"]).status.code(), Some(2));
    assert_eq!(zonal(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn rasterize_reports_pixel_counts() {
    let out = zonal(&[
        "rasterize",
        "--boundaries",
        fixture("synthetic/boundaries.geojson").to_str().unwrap(),
        "--cell-size",
        "500",
        "--settlement",
        fixture("synthetic/settlement.asc").to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("region_id,boundary_area_km2,admin_pixels,settlement_pixels,disjoint")
    );
    // 10 km by 8 km at 500 m cells
    assert!(lines.next().unwrap().starts_with("R01,80.0,320,"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn density_then_report_stages() {
    let tmp = tempfile::tempdir().unwrap();
    let config = config_in(tmp.path(), "");
    let out = zonal(&["density", "--config", &config]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let densities = tmp.path().join("out/densities.csv");
    assert!(densities.is_file());
    assert!(!tmp.path().join("out/correlations.csv").exists());

    let out = zonal(&[
        "report",
        "--config",
        &config,
        "--densities",
        densities.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(tmp.path().join("out/correlations.csv").is_file());
    assert!(tmp
        .path()
        .join("out/01-all-regencies-municipalities-rank.svg")
        .is_file());
}
