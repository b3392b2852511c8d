//! Config-driven runs: ingestion, per-region densities, the statistical
//! battery over configured subsets, CSV and text tables, and SVG plots.

mod config;
mod plots;
mod report;
mod run;
mod tables;

pub use config::{load_config, parse_config, Model, NormalitySubset, RunConfig, Subset};
pub use plots::{data_plot, emit_plots, rank_plot};
pub use report::{
    analyze, CalibrationSummary, ComparisonReport, CorrelationRow, DensitySource, NormalityRow,
    RegionRow, TTestRow,
};
pub use run::{build_report, count_region_pixels, run, RegionPixels};
pub use tables::{
    emit_tables, summary_text, write_densities, CORRELATIONS_FILE, DENSITIES_FILE, NORMALITY_FILE,
    SUMMARY_FILE, TTESTS_FILE,
};
