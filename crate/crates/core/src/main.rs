use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;

use zonal_density::geometry::{load_boundaries, DEFAULT_CELL_SIZE, DEFAULT_MAX_CELLS};
use zonal_density::pipeline::{
    build_report, count_region_pixels, emit_plots, emit_tables, load_config, run, summary_text,
    write_densities, RunConfig, DENSITIES_FILE,
};
use zonal_density::raster::{binarize, load_ascii_grid, DEFAULT_THRESHOLD};
use zonal_density::{Error, Result};

/// Administrative vs settlement population density and its rank
/// correlation with a disease case rate.
#[derive(Parser)]
#[command(name = "zonal-density", version)]
struct Cli {
    /// Log per-region pixel sizes, fences and exclusions.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: densities, statistics, tables and plots.
    Run(ConfigArg),
    /// Pixel counts per boundary, optionally with settlement pixels.
    Rasterize {
        #[arg(long)]
        boundaries: PathBuf,
        #[arg(long, default_value = "region_id")]
        id_property: String,
        #[arg(long, default_value_t = DEFAULT_CELL_SIZE)]
        cell_size: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_CELLS)]
        max_cells: u64,
        #[arg(long)]
        settlement: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-region densities only, written to densities.csv.
    Density(ConfigArg),
    /// Statistical battery, printed as a text summary.
    Correlate(ConfigArg),
    /// Tables and plots, optionally from a previously written densities.csv.
    Report {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        densities: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.verbose {
            log::LevelFilter::Info
        } else {
            log::LevelFilter::Warn
        })
        .parse_default_env()
        .format_timestamp(None)
        .init();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run(c) => {
            let config = load_config(&c.config)?;
            let report = run(&config)?;
            print!("{}", summary_text(&report));
        }
        Command::Rasterize {
            boundaries,
            id_property,
            cell_size,
            max_cells,
            settlement,
            threshold,
            out,
        } => {
            let geoms = load_boundaries(&boundaries, &id_property)?;
            let mask = match &settlement {
                Some(path) => Some(binarize(&load_ascii_grid(path)?, threshold)),
                None => None,
            };
            let counts = count_region_pixels(&geoms, mask.as_ref(), cell_size, max_cells)?;
            let sink: Box<dyn Write> = match &out {
                Some(path) => Box::new(std::fs::File::create(path).map_err(|e| Error::Io {
                    path: path.clone(),
                    source: e,
                })?),
                None => Box::new(std::io::stdout()),
            };
            let mut w = csv::Writer::from_writer(sink);
            let target = out.unwrap_or_else(|| PathBuf::from("<stdout>"));
            let io = |e: csv::Error| Error::Io {
                path: target.clone(),
                source: e.into(),
            };
            for c in &counts {
                w.serialize(c).map_err(io)?;
            }
            w.flush().map_err(|e| Error::Io {
                path: target.clone(),
                source: e,
            })?;
        }
        Command::Density(c) => {
            let config = load_config(&c.config)?;
            let report = build_report(&config)?;
            std::fs::create_dir_all(&config.output_dir).map_err(|e| Error::Io {
                path: config.output_dir.clone(),
                source: e,
            })?;
            write_densities(&report, &config.output_dir.join(DENSITIES_FILE))?;
        }
        Command::Correlate(c) => {
            let config = load_config(&c.config)?;
            print!("{}", summary_text(&build_report(&config)?));
        }
        Command::Report { config, densities } => {
            let mut config: RunConfig = load_config(&config.config)?;
            if let Some(path) = densities {
                config.regions = path;
                config.boundaries = None;
                config.settlement = None;
                config.validate()?;
            }
            let report = build_report(&config)?;
            emit_tables(&report, &config.output_dir)?;
            emit_plots(&report, &config.output_dir)?;
        }
    }
    Ok(())
}
