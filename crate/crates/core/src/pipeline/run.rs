use std::collections::{BTreeMap, BTreeSet};

use log::{debug, info, warn};
use serde::Serialize;

use super::config::RunConfig;
use super::plots::emit_plots;
use super::report::{analyze, CalibrationSummary, ComparisonReport, DensitySource, RegionRow};
use super::tables::emit_tables;
use crate::density::{calibrate, load_regions, PixelCounts, Region};
use crate::error::{Error, Result};
use crate::geometry::{count_pixels, load_boundaries, rasterize_with_limit, BoundaryGeometry};
use crate::raster::{binarize, load_ascii_grid, overlay_count};

/// Pixel counts of one region's boundary and of the settlement inside it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionPixels {
    pub region_id: String,
    /// Shoelace area of the boundary in km².
    pub boundary_area_km2: f64,
    pub admin_pixels: u64,
    pub settlement_pixels: u64,
    /// The settlement raster does not reach this boundary at all.
    pub disjoint: bool,
}

/// Rasterizes every boundary and counts settlement cells inside it.
pub fn count_region_pixels(
    boundaries: &[BoundaryGeometry],
    settlement: Option<&crate::geometry::BitMask>,
    cell_size: f64,
    max_cells: u64,
) -> Result<Vec<RegionPixels>> {
    let mut out = Vec::with_capacity(boundaries.len());
    for geom in boundaries {
        let mask = rasterize_with_limit(geom, cell_size, max_cells)?;
        let admin_pixels = count_pixels(&mask);
        let (settlement_pixels, disjoint) = match settlement {
            Some(s) => {
                let o = overlay_count(s, &mask)?;
                (o.count, o.disjoint)
            }
            None => (0, false),
        };
        debug!(
            "region {}: {admin_pixels} boundary pixels, {settlement_pixels} settlement pixels",
            geom.region_id
        );
        out.push(RegionPixels {
            region_id: geom.region_id.clone(),
            boundary_area_km2: geom.area() / 1e6,
            admin_pixels,
            settlement_pixels,
            disjoint,
        });
    }
    Ok(out)
}

/// Computes the full report without writing anything.
pub fn build_report(config: &RunConfig) -> Result<ComparisonReport> {
    let regions = load_regions(&config.regions)?;
    check_provinces(config, &regions)?;
    let mut warnings = config.warnings.clone();
    if config.uses_rasters() {
        raster_report(config, regions, warnings)
    } else {
        let rows = precomputed_rows(regions, &mut warnings)?;
        Ok(analyze(
            rows,
            config,
            DensitySource::Precomputed,
            None,
            warnings,
        ))
    }
}

/// Computes the report and writes tables and plots to the output directory.
pub fn run(config: &RunConfig) -> Result<ComparisonReport> {
    let report = build_report(config)?;
    emit_tables(&report, &config.output_dir)?;
    emit_plots(&report, &config.output_dir)?;
    info!("wrote report to {}", config.output_dir.display());
    Ok(report)
}

fn check_provinces(config: &RunConfig, regions: &[Region]) -> Result<()> {
    let Some(allowed) = &config.provinces else {
        return Ok(());
    };
    let unknown: BTreeSet<&str> = regions
        .iter()
        .map(|r| r.province.as_str())
        .filter(|p| !allowed.iter().any(|a| a == p))
        .collect();
    if unknown.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "provinces not in the configured list: {}",
            unknown.into_iter().collect::<Vec<_>>().join(", ")
        )))
    }
}

fn precomputed_rows(regions: Vec<Region>, warnings: &mut Vec<String>) -> Result<Vec<RegionRow>> {
    if regions.iter().all(|r| r.density_new_per_km2.is_none()) {
        return Err(Error::Validation(
            "no raster inputs configured and the region table has no density_new_per_km2 values"
                .into(),
        ));
    }
    Ok(regions
        .into_iter()
        .map(|region| {
            if region.density_new_per_km2.is_none() {
                let msg = format!(
                    "region {}: no settlement density, excluded from the analysis",
                    region.region_id
                );
                warn!("{msg}");
                warnings.push(msg);
            }
            RegionRow {
                density_old: region
                    .density_old_per_km2
                    .unwrap_or_else(|| region.admin_density()),
                density_new: region.density_new_per_km2,
                record: None,
                region,
            }
        })
        .collect())
}

fn raster_report(
    config: &RunConfig,
    regions: Vec<Region>,
    mut warnings: Vec<String>,
) -> Result<ComparisonReport> {
    let (Some(boundary_path), Some(settlement_path)) = (&config.boundaries, &config.settlement)
    else {
        unreachable!("raster mode requires both inputs");
    };
    let boundaries = load_boundaries(boundary_path, &config.id_property)?;
    let grid = load_ascii_grid(settlement_path)?;
    let settlement = binarize(&grid, config.threshold);

    let mut by_id: BTreeMap<&str, &BoundaryGeometry> = BTreeMap::new();
    for b in &boundaries {
        if by_id.insert(b.region_id.as_str(), b).is_some() {
            return Err(Error::Validation(format!(
                "duplicate boundary for region {}",
                b.region_id
            )));
        }
    }
    let missing: Vec<String> = regions
        .iter()
        .filter(|r| !by_id.contains_key(r.region_id.as_str()))
        .map(|r| r.region_id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingGeometry(missing));
    }
    let known: BTreeSet<&str> = regions.iter().map(|r| r.region_id.as_str()).collect();
    for id in by_id.keys().filter(|id| !known.contains(*id)) {
        let msg = format!("boundary {id} has no region table row, excluded");
        warn!("{msg}");
        warnings.push(msg);
    }

    let geoms: Vec<BoundaryGeometry> = regions
        .iter()
        .map(|r| by_id[r.region_id.as_str()].clone())
        .collect();
    let pixels = count_region_pixels(
        &geoms,
        Some(&settlement),
        config.cell_size,
        config.max_cells,
    )?;
    for p in pixels.iter().filter(|p| p.disjoint) {
        let msg = format!(
            "region {}: settlement raster does not cover the boundary",
            p.region_id
        );
        warn!("{msg}");
        warnings.push(msg);
    }

    let inputs: Vec<(&Region, PixelCounts)> = regions
        .iter()
        .zip(&pixels)
        .map(|(r, p)| {
            (
                r,
                PixelCounts {
                    admin: p.admin_pixels,
                    settlement: p.settlement_pixels,
                },
            )
        })
        .collect();
    let calibration = calibrate(&inputs)?;
    info!(
        "pixel side fence [{:.4}, {:.4}], mean {:.4} m",
        calibration.fence.lower, calibration.fence.upper, calibration.mean_pixel_side
    );
    for r in &calibration.records {
        info!(
            "region {}: m = {:.4}{}",
            r.region_id,
            r.meters_per_pixel_side,
            if r.outlier { " (outlier)" } else { "" }
        );
    }
    warnings.extend(calibration.warnings.iter().cloned());

    let summary = CalibrationSummary {
        fence: calibration.fence,
        mean_pixel_side: calibration.mean_pixel_side,
        outliers: calibration
            .records
            .iter()
            .filter(|r| r.outlier)
            .map(|r| r.region_id.clone())
            .collect(),
    };
    let rows = regions
        .into_iter()
        .zip(calibration.records)
        .map(|(region, record)| RegionRow {
            density_old: record.density_admin,
            density_new: record.density_settlement,
            record: Some(record),
            region,
        })
        .collect();
    Ok(analyze(
        rows,
        config,
        DensitySource::Raster,
        Some(summary),
        warnings,
    ))
}
