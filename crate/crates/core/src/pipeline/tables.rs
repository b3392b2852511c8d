use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::report::{ComparisonReport, CorrelationRow, DensitySource};
use crate::error::{Error, Result};

pub const NORMALITY_FILE: &str = "normality.csv";
pub const CORRELATIONS_FILE: &str = "correlations.csv";
pub const TTESTS_FILE: &str = "ttests.csv";
pub const DENSITIES_FILE: &str = "densities.csv";
pub const SUMMARY_FILE: &str = "summary.txt";

const NORMALITY_HEADER: [&str; 8] = [
    "subset",
    "province",
    "data",
    "model",
    "n",
    "w",
    "p_value",
    "normality",
];
const CORRELATIONS_HEADER: [&str; 16] = [
    "subset",
    "province",
    "data",
    "n",
    "rho_old",
    "rho_new",
    "rho_old_new",
    "p_old",
    "p_new",
    "p_old_new",
    "hotelling_t",
    "df",
    "p_value",
    "verdict",
    "strength_old",
    "strength_new",
];
const TTESTS_HEADER: [&str; 10] = [
    "subset", "province", "data", "n", "mean_old", "mean_new", "t", "df", "p_value", "verdict",
];
/// Leading columns match the region table so the file loads as one.
const DENSITIES_HEADER: [&str; 16] = [
    "region_id",
    "name",
    "level",
    "province",
    "population",
    "admin_area_km2",
    "case_rate_per_100k",
    "density_old_per_km2",
    "density_new_per_km2",
    "settlement_area_km2",
    "uninhabited_fraction",
    "admin_pixels",
    "settlement_pixels",
    "meters_per_pixel_side",
    "density_per_pixel",
    "pixel_side_outlier",
];

// Shortest representation that parses back to the same f64.
fn num(v: f64) -> String {
    format!("{v}")
}

fn verdict(row: &CorrelationRow) -> String {
    row.hotelling
        .map(|h| h.verdict.label())
        .unwrap_or("Undefined")
        .to_string()
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn write_csv<const N: usize>(path: &Path, header: [&str; N], rows: Vec<[String; N]>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::parse(path.display().to_string(), format!("{other:?}")),
    }
}

/// Writes the four CSV tables and the text summary. Returns the paths written.
pub fn emit_tables(report: &ComparisonReport, outdir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(outdir).map_err(|e| Error::io(outdir, e))?;
    let path = |name: &str| outdir.join(name);

    let normality = report
        .normality
        .iter()
        .map(|r| {
            [
                r.label.clone(),
                r.province.clone(),
                r.data.clone(),
                r.model.label().to_string(),
                r.n.to_string(),
                num(r.w),
                num(r.p_value),
                r.normality_label().to_string(),
            ]
        })
        .collect();
    write_csv(&path(NORMALITY_FILE), NORMALITY_HEADER, normality)?;

    let correlations = report
        .correlations
        .iter()
        .map(|r| {
            [
                r.label.clone(),
                r.province.clone(),
                r.data.clone(),
                r.n.to_string(),
                num(r.rho_old.rho),
                num(r.rho_new.rho),
                num(r.rho_old_new.rho),
                num(r.rho_old.p_value),
                num(r.rho_new.p_value),
                num(r.rho_old_new.p_value),
                opt(r.hotelling.map(|h| h.statistic)),
                opt(r.hotelling.map(|h| h.df)),
                opt(r.hotelling.map(|h| h.p_value)),
                verdict(r),
                r.strength_old.label().to_string(),
                r.strength_new.label().to_string(),
            ]
        })
        .collect();
    write_csv(&path(CORRELATIONS_FILE), CORRELATIONS_HEADER, correlations)?;

    let ttests = report
        .ttests
        .iter()
        .map(|r| {
            [
                r.label.clone(),
                r.province.clone(),
                r.data.clone(),
                r.n.to_string(),
                num(r.mean_old),
                num(r.mean_new),
                num(r.result.statistic),
                num(r.result.df),
                num(r.result.p_value),
                r.result.verdict.label().to_string(),
            ]
        })
        .collect();
    write_csv(&path(TTESTS_FILE), TTESTS_HEADER, ttests)?;

    write_densities(report, &path(DENSITIES_FILE))?;

    let summary_path = path(SUMMARY_FILE);
    std::fs::write(&summary_path, summary_text(report)).map_err(|e| Error::io(&summary_path, e))?;

    Ok([
        NORMALITY_FILE,
        CORRELATIONS_FILE,
        TTESTS_FILE,
        DENSITIES_FILE,
        SUMMARY_FILE,
    ]
    .iter()
    .map(|f| path(f))
    .collect())
}

/// Writes the per-region table. It loads back as a region table with
/// precomputed densities.
pub fn write_densities(report: &ComparisonReport, path: &Path) -> Result<()> {
    let densities = report
        .regions
        .iter()
        .map(|row| {
            let r = &row.region;
            let rec = row.record.as_ref();
            [
                r.region_id.clone(),
                r.name.clone(),
                r.level.to_string(),
                r.province.clone(),
                num(r.population),
                num(r.admin_area_km2),
                num(r.case_rate_per_100k),
                num(row.density_old),
                opt(row.density_new),
                opt(row.settlement_area_km2()),
                opt(row.uninhabited_fraction()),
                opt(rec.map(|x| x.admin_pixels)),
                opt(rec.map(|x| x.settlement_pixels)),
                opt(rec.map(|x| x.meters_per_pixel_side)),
                opt(rec.map(|x| x.density_per_pixel)),
                opt(rec.map(|x| x.outlier)),
            ]
        })
        .collect();
    write_csv(path, DENSITIES_HEADER, densities)
}

/// Left-aligned text table; every column padded to its widest cell.
fn aligned(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ");
        s.truncate(s.trim_end().len());
        s.push('\n');
        s
    };
    let mut out = line(header.to_vec());
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    out.push_str(&line(rule.iter().map(String::as_str).collect()));
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

/// Human-readable rendering of the whole report.
pub fn summary_text(report: &ComparisonReport) -> String {
    let mut out = String::new();
    let source = match report.source {
        DensitySource::Raster => "boundary and settlement rasters",
        DensitySource::Precomputed => "precomputed densities",
    };
    let _ = writeln!(out, "Population density comparison");
    let _ = writeln!(out, "densities from {source}; alpha = {}", report.alpha);
    let _ = writeln!(out, "regions: {}", report.regions.len());
    if let Some(c) = &report.calibration {
        let _ = writeln!(
            out,
            "pixel side: fence [{:.4}, {:.4}] m, mean of inliers {:.4} m, outliers: {}",
            c.fence.lower,
            c.fence.upper,
            c.mean_pixel_side,
            if c.outliers.is_empty() {
                "none".to_string()
            } else {
                c.outliers.join(", ")
            }
        );
    }

    let _ = writeln!(out, "\nShapiro-Wilk normality");
    let rows: Vec<Vec<String>> = report
        .normality
        .iter()
        .map(|r| {
            vec![
                r.province.clone(),
                format!("{} / {}", r.model.label(), r.data),
                r.n.to_string(),
                format!("{:.4}", r.w),
                format!("{:.4}", r.p_value),
                r.normality_label().into(),
            ]
        })
        .collect();
    out.push_str(&aligned(
        &["Province", "Model/Data", "n", "W", "p-value", "Normality"],
        &rows,
    ));

    let _ = writeln!(
        out,
        "\nSpearman correlation with case rate, Hotelling's t (one-tailed)"
    );
    let rows: Vec<Vec<String>> = report
        .correlations
        .iter()
        .map(|r| {
            vec![
                r.province.clone(),
                r.data.clone(),
                r.n.to_string(),
                format!("{:.3}", r.rho_old.rho),
                format!("{:.3}", r.rho_new.rho),
                format!("{:.3}", r.rho_old_new.rho),
                r.hotelling
                    .map(|h| format!("{:.3}", h.statistic))
                    .unwrap_or_else(|| "-".into()),
                r.hotelling
                    .map(|h| format!("{:.4}", h.p_value))
                    .unwrap_or_else(|| "-".into()),
                verdict(r),
                format!("{} -> {}", r.strength_old, r.strength_new),
            ]
        })
        .collect();
    out.push_str(&aligned(
        &[
            "Province",
            "Data",
            "n",
            "rho old",
            "rho new",
            "rho old-new",
            "t",
            "p-value",
            "Verdict",
            "Strength",
        ],
        &rows,
    ));

    let _ = writeln!(out, "\nPaired t-test, old vs new model (two-tailed)");
    let rows: Vec<Vec<String>> = report
        .ttests
        .iter()
        .map(|r| {
            vec![
                r.province.clone(),
                r.data.clone(),
                r.n.to_string(),
                format!("{:.3}", r.result.statistic),
                format!("{:.3e}", r.result.p_value),
                r.result.verdict.label().into(),
            ]
        })
        .collect();
    out.push_str(&aligned(
        &["Province", "Data", "n", "t", "p-value", "Verdict"],
        &rows,
    ));

    if !report.warnings.is_empty() {
        let _ = writeln!(out, "\nWarnings");
        for w in &report.warnings {
            let _ = writeln!(out, "- {w}");
        }
    }
    out
}
