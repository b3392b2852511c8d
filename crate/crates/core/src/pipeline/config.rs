use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use log::warn;
use serde::Deserialize;

use crate::density::Level;
use crate::error::{Error, Result};
use crate::geometry::{DEFAULT_CELL_SIZE, DEFAULT_MAX_CELLS};
use crate::raster::DEFAULT_THRESHOLD;
use crate::stats::DEFAULT_ALPHA;

/// Which density feeds a test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Population over administrative area.
    Old,
    /// Population over settlement area.
    New,
}

impl Model {
    pub fn label(self) -> &'static str {
        match self {
            Model::Old => "Old Model",
            Model::New => "New Model",
        }
    }
}

/// A selection of regions by province and level. Empty lists select all.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subset {
    pub label: String,
    pub provinces: Vec<String>,
    pub levels: Vec<Level>,
}

impl Subset {
    pub fn new(provinces: Vec<String>, levels: Vec<Level>) -> Self {
        let mut s = Subset {
            label: String::new(),
            provinces,
            levels,
        };
        s.label = format!("{} / {}", s.province_label(), s.level_label());
        s
    }

    pub fn matches(&self, province: &str, level: Level) -> bool {
        (self.provinces.is_empty() || self.provinces.iter().any(|p| p == province))
            && (self.levels.is_empty() || self.levels.contains(&level))
    }

    /// e.g. `Central+East Java` style joins of the province filter.
    pub fn province_label(&self) -> String {
        if self.provinces.is_empty() {
            "All".into()
        } else {
            self.provinces.join("+")
        }
    }

    pub fn level_label(&self) -> String {
        let mut levels = self.levels.clone();
        if levels.is_empty() {
            levels = vec![Level::Regency, Level::Municipality];
        }
        levels.sort();
        levels.dedup();
        levels
            .iter()
            .map(|l| match l {
                Level::Regency => "Regencies",
                Level::Municipality => "Municipalities",
            })
            .collect::<Vec<_>>()
            .join("+")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalitySubset {
    pub subset: Subset,
    pub model: Model,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub regions: PathBuf,
    /// Boundaries and settlement raster; when absent, densities come from
    /// the region table's precomputed columns.
    pub boundaries: Option<PathBuf>,
    pub settlement: Option<PathBuf>,
    pub id_property: String,
    pub cell_size: f64,
    pub threshold: f64,
    pub alpha: f64,
    pub max_cells: u64,
    pub output_dir: PathBuf,
    /// Allowed province names, if restricted.
    pub provinces: Option<Vec<String>>,
    pub normality: Vec<NormalitySubset>,
    pub correlation: Vec<Subset>,
    pub ttest: Vec<Subset>,
    /// Unknown keys seen while parsing.
    pub warnings: Vec<String>,
}

impl RunConfig {
    pub fn uses_rasters(&self) -> bool {
        self.boundaries.is_some() && self.settlement.is_some()
    }

    pub fn subset_count(&self) -> usize {
        self.normality.len() + self.correlation.len() + self.ttest.len()
    }

    /// Checks ranges and that every referenced input exists.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if !(self.cell_size > 0.0 && self.cell_size.is_finite()) {
            return Err(Error::Config(format!(
                "cell_size must be positive, got {}",
                self.cell_size
            )));
        }
        if !self.threshold.is_finite() {
            return Err(Error::Config("threshold must be finite".into()));
        }
        if self.boundaries.is_some() != self.settlement.is_some() {
            return Err(Error::Config(
                "boundaries and settlement must be given together".into(),
            ));
        }
        if self.subset_count() == 0 {
            return Err(Error::Config(
                "no analysis subsets configured ([[normality]], [[correlation]] or [[ttest]])"
                    .into(),
            ));
        }
        let inputs = [
            ("regions", Some(&self.regions)),
            ("boundaries", self.boundaries.as_ref()),
            ("settlement", self.settlement.as_ref()),
        ];
        for (key, path) in inputs {
            if let Some(path) = path {
                if !path.is_file() {
                    return Err(Error::Config(format!(
                        "`{key}` file {} does not exist",
                        path.display()
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Deserialize)]
struct RawConfig {
    regions: PathBuf,
    boundaries: Option<PathBuf>,
    settlement: Option<PathBuf>,
    id_property: Option<String>,
    cell_size: Option<f64>,
    threshold: Option<f64>,
    alpha: Option<f64>,
    max_cells: Option<u64>,
    output_dir: Option<PathBuf>,
    provinces: Option<Vec<String>>,
    #[serde(default)]
    normality: Vec<RawSubset>,
    #[serde(default)]
    correlation: Vec<RawSubset>,
    #[serde(default)]
    ttest: Vec<RawSubset>,
    #[serde(flatten)]
    unknown: BTreeMap<String, toml::Value>,
}

#[derive(Deserialize)]
struct RawSubset {
    label: Option<String>,
    #[serde(default)]
    provinces: Vec<String>,
    #[serde(default)]
    levels: Vec<Level>,
    model: Option<Model>,
    #[serde(flatten)]
    unknown: BTreeMap<String, toml::Value>,
}

pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let config = parse_config(&text, base)?;
    config.validate()?;
    Ok(config)
}

/// Parses without touching the filesystem; relative paths resolve against
/// `base_dir`. Call [`RunConfig::validate`] before use.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<RunConfig> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
    let resolve = |p: PathBuf| if p.is_absolute() { p } else { base_dir.join(p) };

    let mut warnings: Vec<String> = raw
        .unknown
        .keys()
        .map(|k| format!("unknown config key `{k}` ignored"))
        .collect();

    let mut subsets = |list: Vec<RawSubset>, section: &str, needs_model: bool| {
        let mut out = Vec::new();
        for (i, s) in list.into_iter().enumerate() {
            for k in s.unknown.keys() {
                warnings.push(format!(
                    "unknown key `{k}` in [[{section}]] #{} ignored",
                    i + 1
                ));
            }
            if !needs_model && s.model.is_some() {
                warnings.push(format!("`model` has no effect in [[{section}]] #{}", i + 1));
            }
            let mut subset = Subset::new(s.provinces, s.levels);
            if let Some(label) = s.label {
                subset.label = label;
            }
            out.push((subset, s.model));
        }
        out
    };

    let normality = subsets(raw.normality, "normality", true)
        .into_iter()
        .enumerate()
        .map(|(i, (subset, model))| {
            model
                .map(|model| NormalitySubset { subset, model })
                .ok_or_else(|| {
                    Error::Config(format!("[[normality]] #{} is missing `model`", i + 1))
                })
        })
        .collect::<Result<Vec<_>>>()?;
    let correlation = subsets(raw.correlation, "correlation", false)
        .into_iter()
        .map(|(s, _)| s)
        .collect();
    let ttest = subsets(raw.ttest, "ttest", false)
        .into_iter()
        .map(|(s, _)| s)
        .collect();

    for w in &warnings {
        warn!("{w}");
    }

    Ok(RunConfig {
        regions: resolve(raw.regions),
        boundaries: raw.boundaries.map(resolve),
        settlement: raw.settlement.map(resolve),
        id_property: raw.id_property.unwrap_or_else(|| "region_id".into()),
        cell_size: raw.cell_size.unwrap_or(DEFAULT_CELL_SIZE),
        threshold: raw.threshold.unwrap_or(DEFAULT_THRESHOLD),
        alpha: raw.alpha.unwrap_or(DEFAULT_ALPHA),
        max_cells: raw.max_cells.unwrap_or(DEFAULT_MAX_CELLS),
        output_dir: resolve(raw.output_dir.unwrap_or_else(|| PathBuf::from("out"))),
        provinces: raw.provinces,
        normality,
        correlation,
        ttest,
        warnings,
    })
}
