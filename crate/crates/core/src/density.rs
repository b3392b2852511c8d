//! Old-model and new-model population densities.
//!
//! The old model is `population / admin_area`. The new model needs the
//! ground size of one pixel: each region yields an estimate
//! `m = sqrt(A * 1000² / x)` from its administrative area `A` (km²) and
//! boundary pixel count `x`. Estimates outside Tukey's fences are dropped,
//! the rest averaged into `m̄`, and every region's settlement area becomes
//! `x̂ * m̄² / 1000²`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest accepted max/min ratio of the retained pixel-size estimates
/// before a warning is logged.
pub const MAX_PIXEL_SIZE_SPREAD: f64 = 1.10;

const M2_PER_KM2: f64 = 1_000.0 * 1_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Regency,
    Municipality,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Regency => "regency",
            Level::Municipality => "municipality",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "regency" | "kabupaten" => Ok(Level::Regency),
            "municipality" | "kota" | "city" => Ok(Level::Municipality),
            other => Err(Error::Validation(format!(
                "unknown level `{other}`; expected regency or municipality"
            ))),
        }
    }
}

impl<'de> Deserialize<'de> for Level {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One regency or municipality row of the census table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub region_id: String,
    pub name: String,
    pub level: Level,
    pub province: String,
    pub population: f64,
    pub admin_area_km2: f64,
    /// New cases per 100 000 population.
    pub case_rate_per_100k: f64,
    /// Precomputed old-model density, used when no rasters are supplied.
    #[serde(default)]
    pub density_old_per_km2: Option<f64>,
    /// Precomputed new-model density, used when no rasters are supplied.
    #[serde(default)]
    pub density_new_per_km2: Option<f64>,
}

impl Region {
    pub fn validate(&self) -> Result<()> {
        let fail = |what: &str| {
            Err(Error::Validation(format!(
                "region {}: {what}",
                self.region_id
            )))
        };
        if self.region_id.trim().is_empty() {
            return Err(Error::Validation("region with empty region_id".into()));
        }
        if self.province.trim().is_empty() {
            return fail("province is empty");
        }
        if !(self.population > 0.0 && self.population.is_finite()) {
            return fail("population must be positive");
        }
        if !(self.admin_area_km2 > 0.0 && self.admin_area_km2.is_finite()) {
            return fail("administrative area must be positive");
        }
        if !(self.case_rate_per_100k >= 0.0 && self.case_rate_per_100k.is_finite()) {
            return fail("case rate must be non-negative");
        }
        for (name, v) in [
            ("density_old_per_km2", self.density_old_per_km2),
            ("density_new_per_km2", self.density_new_per_km2),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return fail(&format!("{name} must be positive"));
                }
            }
        }
        Ok(())
    }

    /// Population per km² of administrative area.
    pub fn admin_density(&self) -> f64 {
        self.population / self.admin_area_km2
    }
}

/// Reads and validates the region table. Columns beyond the known ones are
/// ignored, so a `densities.csv` written by this crate loads as well.
pub fn load_regions(path: impl AsRef<Path>) -> Result<Vec<Region>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_regions(file).map_err(|e| match e {
        Error::Parse { context, message } => Error::Parse {
            context: format!("{}: {context}", path.display()),
            message,
        },
        other => other,
    })
}

pub fn parse_regions(reader: impl std::io::Read) -> Result<Vec<Region>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut regions = Vec::new();
    for (i, row) in rdr.deserialize::<Region>().enumerate() {
        let region = row.map_err(|e| {
            let line = e
                .position()
                .map(|p| p.line().to_string())
                .unwrap_or_else(|| "?".into());
            Error::parse(
                format!("region table line {line} (row {})", i + 1),
                e.to_string(),
            )
        })?;
        region.validate()?;
        regions.push(region);
    }
    let mut seen = std::collections::HashSet::new();
    for r in &regions {
        if !seen.insert(r.region_id.as_str()) {
            return Err(Error::Validation(format!(
                "duplicate region_id {}",
                r.region_id
            )));
        }
    }
    Ok(regions)
}

/// `m = sqrt(A * 1000² / x)`, meters per pixel side.
pub fn meters_per_pixel_side(admin_area_km2: f64, pixels: u64) -> Result<f64> {
    if pixels == 0 {
        return Err(Error::DegenerateRegion("boundary mask is empty".into()));
    }
    if admin_area_km2.is_nan() || admin_area_km2 <= 0.0 {
        return Err(Error::Argument(format!(
            "administrative area must be positive, got {admin_area_km2}"
        )));
    }
    Ok((admin_area_km2 * M2_PER_KM2 / pixels as f64).sqrt())
}

/// Quantile of a sorted sample by linear interpolation at position `(n-1)q`.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = (sorted.len() - 1) as f64 * q;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TukeyFence {
    pub q1: f64,
    pub q3: f64,
    pub lower: f64,
    pub upper: f64,
}

impl TukeyFence {
    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

/// Fences at `Q1 - 1.5 IQR` and `Q3 + 1.5 IQR`.
pub fn tukey_fence(values: &[f64]) -> Result<TukeyFence> {
    if values.len() < 4 {
        return Err(Error::InsufficientSample {
            required: 4,
            actual: values.len(),
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Validation(
            "fence sample has non-finite values".into(),
        ));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&sorted, 0.25);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    Ok(TukeyFence {
        q1,
        q3,
        lower: q1 - 1.5 * iqr,
        upper: q3 + 1.5 * iqr,
    })
}

/// Mean of the values inside the fence (bounds inclusive).
pub fn mean_excluding_outliers(values: &[f64], fence: &TukeyFence) -> Result<f64> {
    let kept: Vec<f64> = values
        .iter()
        .copied()
        .filter(|&v| fence.contains(v))
        .collect();
    if kept.is_empty() {
        // unreachable for fences built from the same sample
        return Err(Error::Validation(
            "every value lies outside the Tukey fence".into(),
        ));
    }
    Ok(kept.iter().sum::<f64>() / kept.len() as f64)
}

/// `Â = x̂ * m̄² / 1000²`, km².
pub fn settlement_area(settlement_pixels: u64, mean_pixel_side: f64) -> f64 {
    settlement_pixels as f64 * mean_pixel_side * mean_pixel_side / M2_PER_KM2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PixelCounts {
    /// Pixels inside the administrative boundary.
    pub admin: u64,
    /// Settlement pixels inside the boundary.
    pub settlement: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityRecord {
    pub region_id: String,
    pub admin_pixels: u64,
    pub settlement_pixels: u64,
    pub meters_per_pixel_side: f64,
    /// Population per pixel, `p / x`.
    pub density_per_pixel: f64,
    /// Population per km² of administrative area, `p / A`.
    pub density_admin: f64,
    pub settlement_area_km2: f64,
    /// Population per km² of settlement; `None` when no settlement pixels.
    pub density_settlement: Option<f64>,
    pub uninhabited_fraction: f64,
    /// This region's `m` fell outside the fence and did not enter `m̄`.
    pub outlier: bool,
}

pub fn densities(
    region: &Region,
    pixels: PixelCounts,
    mean_pixel_side: f64,
) -> Result<DensityRecord> {
    if pixels.settlement > pixels.admin {
        return Err(Error::Validation(format!(
            "region {}: {} settlement pixels exceed {} boundary pixels",
            region.region_id, pixels.settlement, pixels.admin
        )));
    }
    let m = meters_per_pixel_side(region.admin_area_km2, pixels.admin).map_err(|e| match e {
        Error::DegenerateRegion(msg) => {
            Error::DegenerateRegion(format!("{}: {msg}", region.region_id))
        }
        other => other,
    })?;
    let area = settlement_area(pixels.settlement, mean_pixel_side);
    Ok(DensityRecord {
        region_id: region.region_id.clone(),
        admin_pixels: pixels.admin,
        settlement_pixels: pixels.settlement,
        meters_per_pixel_side: m,
        density_per_pixel: region.population / pixels.admin as f64,
        density_admin: region.admin_density(),
        settlement_area_km2: area,
        density_settlement: (area > 0.0).then(|| region.population / area),
        uninhabited_fraction: 1.0 - area / region.admin_area_km2,
        outlier: false,
    })
}

/// Result of the pixel-size calibration over one analysis run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub fence: TukeyFence,
    pub mean_pixel_side: f64,
    pub records: Vec<DensityRecord>,
    pub warnings: Vec<String>,
}

/// Computes `m` per region, fences them, averages the inliers into `m̄` and
/// derives every region's densities from it. Outlier regions still receive a
/// settlement area through the shared `m̄`.
pub fn calibrate(inputs: &[(&Region, PixelCounts)]) -> Result<Calibration> {
    let ms = inputs
        .iter()
        .map(|(region, px)| {
            meters_per_pixel_side(region.admin_area_km2, px.admin).map_err(|e| match e {
                Error::DegenerateRegion(msg) => {
                    Error::DegenerateRegion(format!("{}: {msg}", region.region_id))
                }
                other => other,
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let fence = tukey_fence(&ms)?;
    let mean_pixel_side = mean_excluding_outliers(&ms, &fence)?;

    let mut warnings = Vec::new();
    let mut records = Vec::with_capacity(inputs.len());
    for ((region, px), &m) in inputs.iter().zip(&ms) {
        let mut record = densities(region, *px, mean_pixel_side)?;
        record.outlier = !fence.contains(m);
        if record.outlier {
            warnings.push(format!(
                "region {}: meters per pixel side {m:.4} outside fence [{:.4}, {:.4}], excluded from the mean",
                region.region_id, fence.lower, fence.upper
            ));
        }
        if record.density_settlement.is_none() {
            warnings.push(format!(
                "region {}: no settlement pixels, settlement density undefined",
                region.region_id
            ));
        }
        records.push(record);
    }

    let kept: Vec<f64> = ms.iter().copied().filter(|&m| fence.contains(m)).collect();
    let (lo, hi) = kept
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &m| {
            (lo.min(m), hi.max(m))
        });
    if hi / lo > MAX_PIXEL_SIZE_SPREAD {
        warnings.push(format!(
            "retained meters-per-pixel-side estimates spread {:.3}x (min {lo:.4}, max {hi:.4}), above {MAX_PIXEL_SIZE_SPREAD}",
            hi / lo
        ));
    }
    for w in &warnings {
        warn!("{w}");
    }
    Ok(Calibration {
        fence,
        mean_pixel_side,
        records,
        warnings,
    })
}
