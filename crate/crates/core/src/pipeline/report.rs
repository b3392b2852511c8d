use log::warn;
use serde::Serialize;

use super::config::{Model, RunConfig, Subset};
use crate::density::{DensityRecord, Region, TukeyFence};
use crate::error::Error;
use crate::stats::{
    hotelling_t, interpret, paired_t_test, shapiro_wilk, spearman, CorrelationTriple, Spearman,
    Strength, Tails, TestResult,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DensitySource {
    /// Derived from boundary and settlement rasters.
    Raster,
    /// Taken from the region table.
    Precomputed,
}

/// A region with both model densities resolved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionRow {
    pub region: Region,
    /// Persons per km² of administrative area.
    pub density_old: f64,
    /// Persons per km² of settlement area; `None` excludes the region.
    pub density_new: Option<f64>,
    /// Pixel-level detail, present for raster runs.
    pub record: Option<DensityRecord>,
}

impl RegionRow {
    pub fn density(&self, model: Model) -> Option<f64> {
        match model {
            Model::Old => Some(self.density_old),
            Model::New => self.density_new,
        }
    }

    pub fn settlement_area_km2(&self) -> Option<f64> {
        match &self.record {
            Some(r) => Some(r.settlement_area_km2),
            None => self.density_new.map(|d| self.region.population / d),
        }
    }

    pub fn uninhabited_fraction(&self) -> Option<f64> {
        match &self.record {
            Some(r) => Some(r.uninhabited_fraction),
            None => self
                .settlement_area_km2()
                .map(|a| 1.0 - a / self.region.admin_area_km2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalityRow {
    pub label: String,
    pub province: String,
    pub data: String,
    pub model: Model,
    pub n: usize,
    pub w: f64,
    pub p_value: f64,
    pub normal: bool,
}

impl NormalityRow {
    pub fn normality_label(&self) -> &'static str {
        if self.normal {
            "Normal"
        } else {
            "Not Normal"
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationRow {
    pub label: String,
    pub province: String,
    pub data: String,
    pub n: usize,
    /// Region ids in the subset, sorted.
    pub members: Vec<String>,
    /// Old-model density vs case rate.
    pub rho_old: Spearman,
    /// New-model density vs case rate.
    pub rho_new: Spearman,
    /// Old-model vs new-model density.
    pub rho_old_new: Spearman,
    /// `None` when the three correlations form a singular matrix.
    pub hotelling: Option<TestResult>,
    pub strength_old: Strength,
    pub strength_new: Strength,
}

impl CorrelationRow {
    pub fn triple(&self) -> CorrelationTriple {
        CorrelationTriple {
            n: self.n,
            r_jk: self.rho_old.rho,
            r_jh: self.rho_new.rho,
            r_kh: self.rho_old_new.rho,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TTestRow {
    pub label: String,
    pub province: String,
    pub data: String,
    pub n: usize,
    pub mean_old: f64,
    pub mean_new: f64,
    pub result: TestResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationSummary {
    pub fence: TukeyFence,
    pub mean_pixel_side: f64,
    pub outliers: Vec<String>,
}

/// Everything a run produces. Immutable once assembled.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub source: DensitySource,
    pub alpha: f64,
    /// Sorted by region id.
    pub regions: Vec<RegionRow>,
    pub calibration: Option<CalibrationSummary>,
    pub normality: Vec<NormalityRow>,
    pub correlations: Vec<CorrelationRow>,
    pub ttests: Vec<TTestRow>,
    pub warnings: Vec<String>,
}

impl ComparisonReport {
    /// Regions of a subset that have a defined new-model density.
    pub fn members<'a>(&'a self, subset: &'a Subset) -> impl Iterator<Item = &'a RegionRow> + 'a {
        self.regions.iter().filter(move |r| {
            r.density_new.is_some() && subset.matches(&r.region.province, r.region.level)
        })
    }
}

/// Runs the statistical battery over resolved densities.
pub fn analyze(
    mut regions: Vec<RegionRow>,
    config: &RunConfig,
    source: DensitySource,
    calibration: Option<CalibrationSummary>,
    mut warnings: Vec<String>,
) -> ComparisonReport {
    regions.sort_by(|a, b| a.region.region_id.cmp(&b.region.region_id));
    let mut report = ComparisonReport {
        source,
        alpha: config.alpha,
        regions,
        calibration,
        normality: Vec::new(),
        correlations: Vec::new(),
        ttests: Vec::new(),
        warnings: Vec::new(),
    };
    fn note(warnings: &mut Vec<String>, msg: String) {
        warn!("{msg}");
        warnings.push(msg);
    }
    let skip = |warnings: &mut Vec<String>, label: &str, why: String| {
        note(warnings, format!("subset `{label}` skipped: {why}"));
    };

    let mut normality = Vec::new();
    for ns in &config.normality {
        let values: Vec<f64> = report
            .members(&ns.subset)
            .filter_map(|r| r.density(ns.model))
            .collect();
        if values.is_empty() {
            skip(&mut warnings, &ns.subset.label, "no regions match".into());
            continue;
        }
        match shapiro_wilk(&values) {
            Ok(sw) => normality.push(NormalityRow {
                label: ns.subset.label.clone(),
                province: ns.subset.province_label(),
                data: ns.subset.level_label(),
                model: ns.model,
                n: values.len(),
                w: sw.w,
                p_value: sw.p_value,
                normal: sw.is_normal(config.alpha),
            }),
            Err(e) => skip(&mut warnings, &ns.subset.label, e.to_string()),
        }
    }

    let mut correlations = Vec::new();
    for subset in &config.correlation {
        let rows: Vec<&RegionRow> = report.members(subset).collect();
        if rows.is_empty() {
            skip(&mut warnings, &subset.label, "no regions match".into());
            continue;
        }
        match correlate(subset, &rows, config.alpha) {
            Ok((row, hotelling_error)) => {
                if let Some(e) = hotelling_error {
                    note(
                        &mut warnings,
                        format!("subset `{}`: Hotelling's t undefined: {e}", subset.label),
                    );
                }
                correlations.push(row);
            }
            Err(e) => skip(&mut warnings, &subset.label, e.to_string()),
        }
    }

    let mut ttests = Vec::new();
    for subset in &config.ttest {
        let rows: Vec<&RegionRow> = report.members(subset).collect();
        if rows.is_empty() {
            skip(&mut warnings, &subset.label, "no regions match".into());
            continue;
        }
        let old: Vec<f64> = rows.iter().map(|r| r.density_old).collect();
        let new: Vec<f64> = rows.iter().filter_map(|r| r.density_new).collect();
        match paired_t_test(&old, &new, config.alpha) {
            Ok(result) => ttests.push(TTestRow {
                label: subset.label.clone(),
                province: subset.province_label(),
                data: subset.level_label(),
                n: rows.len(),
                mean_old: old.iter().sum::<f64>() / old.len() as f64,
                mean_new: new.iter().sum::<f64>() / new.len() as f64,
                result,
            }),
            Err(e) => skip(&mut warnings, &subset.label, e.to_string()),
        }
    }

    report.normality = normality;
    report.correlations = correlations;
    report.ttests = ttests;
    report.warnings = warnings;
    report
}

fn correlate(
    subset: &Subset,
    rows: &[&RegionRow],
    alpha: f64,
) -> Result<(CorrelationRow, Option<Error>), Error> {
    let case_rate: Vec<f64> = rows.iter().map(|r| r.region.case_rate_per_100k).collect();
    let old: Vec<f64> = rows.iter().map(|r| r.density_old).collect();
    let new: Vec<f64> = rows.iter().filter_map(|r| r.density_new).collect();
    let rho_old = spearman(&old, &case_rate)?;
    let rho_new = spearman(&new, &case_rate)?;
    let rho_old_new = spearman(&old, &new)?;
    let triple = CorrelationTriple::new(rows.len(), rho_old.rho, rho_new.rho, rho_old_new.rho)?;
    let (hotelling, hotelling_error) = match hotelling_t(&triple, alpha, Tails::One) {
        Ok(t) => (Some(t), None),
        Err(e) => (None, Some(e)),
    };
    let row = CorrelationRow {
        label: subset.label.clone(),
        province: subset.province_label(),
        data: subset.level_label(),
        n: rows.len(),
        members: rows.iter().map(|r| r.region.region_id.clone()).collect(),
        strength_old: interpret(rho_old.rho),
        strength_new: interpret(rho_new.rho),
        rho_old,
        rho_new,
        rho_old_new,
        hotelling,
    };
    Ok((row, hotelling_error))
}
