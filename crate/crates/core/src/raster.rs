//! Settlement raster ingestion and zonal pixel counting.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{BitMask, GridSpec};

/// Default cut applied to a [0, 1] settlement probability raster.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Relative tolerance on matching cell sizes in [`overlay_count`].
pub const CELL_SIZE_TOLERANCE: f64 = 1e-6;

/// Single-band grid of real values, stored bottom row first.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterGrid {
    pub spec: GridSpec,
    values: Vec<f64>,
    pub nodata: Option<f64>,
}

impl RasterGrid {
    /// `values` are row-major with row 0 at the bottom.
    pub fn new(spec: GridSpec, values: Vec<f64>, nodata: Option<f64>) -> Result<Self> {
        if values.len() != spec.cell_count() {
            return Err(Error::Validation(format!(
                "raster has {} values, grid needs {}",
                values.len(),
                spec.cell_count()
            )));
        }
        Ok(RasterGrid {
            spec,
            values,
            nodata,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.values[row * self.spec.n_cols + col]
    }

    pub fn is_nodata(&self, value: f64) -> bool {
        value.is_nan() || self.nodata == Some(value)
    }
}

pub fn load_ascii_grid(path: impl AsRef<Path>) -> Result<RasterGrid> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_ascii_grid(&text).map_err(|e| match e {
        Error::Parse { context, message } => Error::Parse {
            context: format!("{}: {context}", path.display()),
            message,
        },
        other => other,
    })
}

/// Parses an ESRI ASCII Grid. Header keys are case-insensitive; `xllcenter`
/// and `yllcenter` are converted to corner coordinates.
pub fn parse_ascii_grid(text: &str) -> Result<RasterGrid> {
    let mut tokens = text.split_whitespace().peekable();
    let mut ncols = None;
    let mut nrows = None;
    let mut xll = None;
    let mut yll = None;
    let mut x_center = false;
    let mut y_center = false;
    let mut cellsize = None;
    let mut nodata = None;

    while let Some(&tok) = tokens.peek() {
        let key = tok.to_ascii_lowercase();
        let slot: &mut Option<f64> = match key.as_str() {
            "ncols" => &mut ncols,
            "nrows" => &mut nrows,
            "xllcorner" => &mut xll,
            "yllcorner" => &mut yll,
            "xllcenter" => {
                x_center = true;
                &mut xll
            }
            "yllcenter" => {
                y_center = true;
                &mut yll
            }
            "cellsize" => &mut cellsize,
            "nodata_value" => &mut nodata,
            _ => break,
        };
        tokens.next();
        let raw = tokens
            .next()
            .ok_or_else(|| Error::parse("ASCII grid header", format!("`{key}` has no value")))?;
        let value: f64 = raw.parse().map_err(|_| {
            Error::parse(
                "ASCII grid header",
                format!("`{key}` value `{raw}` is not a number"),
            )
        })?;
        *slot = Some(value);
    }

    let require = |v: Option<f64>, key: &str| {
        v.ok_or_else(|| Error::parse("ASCII grid header", format!("missing `{key}`")))
    };
    let ncols = require(ncols, "ncols")?;
    let nrows = require(nrows, "nrows")?;
    let mut xll = require(xll, "xllcorner")?;
    let mut yll = require(yll, "yllcorner")?;
    let cellsize = require(cellsize, "cellsize")?;
    for (v, key) in [(ncols, "ncols"), (nrows, "nrows")] {
        if v < 1.0 || v.fract() != 0.0 {
            return Err(Error::parse(
                "ASCII grid header",
                format!("`{key}` must be a positive integer, got {v}"),
            ));
        }
    }
    if x_center {
        xll -= cellsize / 2.0;
    }
    if y_center {
        yll -= cellsize / 2.0;
    }
    let spec = GridSpec::new(xll, yll, cellsize, ncols as usize, nrows as usize)
        .map_err(|e| Error::parse("ASCII grid header", e.to_string()))?;

    let mut top_down = Vec::with_capacity(spec.cell_count());
    for (i, tok) in tokens.enumerate() {
        let v: f64 = tok.parse().map_err(|_| {
            Error::parse(
                "ASCII grid body",
                format!("value #{i} `{tok}` is not a number"),
            )
        })?;
        top_down.push(v);
    }
    if top_down.len() != spec.cell_count() {
        return Err(Error::parse(
            "ASCII grid body",
            format!(
                "expected {} values, found {}",
                spec.cell_count(),
                top_down.len()
            ),
        ));
    }

    // file rows run north to south; storage runs south to north
    let values = top_down
        .chunks_exact(spec.n_cols)
        .rev()
        .flatten()
        .copied()
        .collect();
    RasterGrid::new(spec, values, nodata)
}

/// Serializes with shortest round-trip float formatting.
pub fn format_ascii_grid(grid: &RasterGrid) -> String {
    let s = grid.spec;
    let mut out = String::new();
    let _ = writeln!(out, "ncols {}", s.n_cols);
    let _ = writeln!(out, "nrows {}", s.n_rows);
    let _ = writeln!(out, "xllcorner {:?}", s.origin_x);
    let _ = writeln!(out, "yllcorner {:?}", s.origin_y);
    let _ = writeln!(out, "cellsize {:?}", s.cell_size);
    if let Some(nd) = grid.nodata {
        let _ = writeln!(out, "NODATA_value {nd:?}");
    }
    for row in grid.values.chunks_exact(s.n_cols).rev() {
        let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Sets a bit iff the value is at least `threshold` and not nodata.
pub fn binarize(grid: &RasterGrid, threshold: f64) -> BitMask {
    let mut mask = BitMask::empty(grid.spec);
    let cols = grid.spec.n_cols;
    for (i, &v) in grid.values.iter().enumerate() {
        if !grid.is_nodata(v) && v >= threshold {
            mask.set(i % cols, i / cols, true);
        }
    }
    mask
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OverlayCount {
    pub count: u64,
    /// The two grids' extents do not intersect.
    pub disjoint: bool,
}

/// Counts cells set in both masks. When the grids differ in origin or
/// extent, each boundary cell is matched to the settlement cell containing its
/// center, which for equal cell sizes is the nearest settlement cell center.
pub fn overlay_count(settlement: &BitMask, boundary: &BitMask) -> Result<OverlayCount> {
    let s = settlement.spec();
    let b = boundary.spec();
    if (s.cell_size - b.cell_size).abs() > CELL_SIZE_TOLERANCE * s.cell_size.max(b.cell_size) {
        return Err(Error::Alignment {
            left: s.cell_size,
            right: b.cell_size,
        });
    }

    let (sx0, sy0, sx1, sy1) = s.extent();
    let (bx0, by0, bx1, by1) = b.extent();
    if sx1 <= bx0 || bx1 <= sx0 || sy1 <= by0 || by1 <= sy0 {
        return Ok(OverlayCount {
            count: 0,
            disjoint: true,
        });
    }

    if s == b {
        let count = settlement
            .words()
            .iter()
            .zip(boundary.words())
            .map(|(x, y)| (x & y).count_ones() as u64)
            .sum();
        return Ok(OverlayCount {
            count,
            disjoint: false,
        });
    }

    let count = boundary
        .iter_set()
        .filter(|&(col, row)| {
            s.locate(b.cell_center(col, row))
                .is_some_and(|(c, r)| settlement.get(c, r))
        })
        .count() as u64;
    Ok(OverlayCount {
        count,
        disjoint: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::count_pixels;

    fn grid(values: Vec<f64>, cols: usize, rows: usize, nodata: Option<f64>) -> RasterGrid {
        RasterGrid::new(
            GridSpec::new(0.0, 0.0, 1.0, cols, rows).unwrap(),
            values,
            nodata,
        )
        .unwrap()
    }

    #[test]
    fn parses_minimal_grid() {
        let g =
            parse_ascii_grid("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 1\n1 1\n")
                .unwrap();
        assert_eq!(g.values(), &[1.0; 4]);
        assert_eq!(g.nodata, None);
    }

    #[test]
    fn stores_rows_bottom_up() {
        let g = parse_ascii_grid(
            "NCOLS 2\nNROWS 2\nXLLCORNER 10\nYLLCORNER 20\nCELLSIZE 5\nNODATA_VALUE -9999\n1 2\n3 -9999\n",
        )
        .unwrap();
        assert_eq!(g.get(0, 1), 1.0);
        assert_eq!(g.get(1, 1), 2.0);
        assert_eq!(g.get(0, 0), 3.0);
        assert!(g.is_nodata(g.get(1, 0)));
        assert_eq!((g.spec.origin_x, g.spec.origin_y), (10.0, 20.0));
    }

    #[test]
    fn extent_from_header() {
        let mut text = String::from("ncols 100\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 10\n");
        text.push_str(&"0 ".repeat(100));
        let g = parse_ascii_grid(&text).unwrap();
        assert_eq!(g.spec.width(), 1000.0);
    }

    #[test]
    fn center_header_converts_to_corner() {
        let g = parse_ascii_grid("ncols 1\nnrows 1\nxllcenter 5\nyllcenter 5\ncellsize 10\n1e0\n")
            .unwrap();
        assert_eq!((g.spec.origin_x, g.spec.origin_y), (0.0, 0.0));
    }

    #[test]
    fn scientific_notation_values() {
        let g = parse_ascii_grid(
            "ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n2.5E-1 1e+0\n",
        )
        .unwrap();
        assert_eq!(g.values(), &[0.25, 1.0]);
    }

    #[test]
    fn missing_header_key_is_named() {
        let err = parse_ascii_grid("ncols 1\nnrows 1\nxllcorner 0\ncellsize 1\n1\n").unwrap_err();
        assert!(err.to_string().contains("yllcorner"), "{err}");
    }

    #[test]
    fn value_count_mismatch() {
        let err =
            parse_ascii_grid("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 1 1\n")
                .unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("expected 4") && msg.contains("found 3"),
            "{msg}"
        );
    }

    #[test]
    fn binarize_threshold() {
        let g = grid(vec![0.0, 0.4, 0.6, 1.0], 2, 2, None);
        assert_eq!(count_pixels(&binarize(&g, 0.5)), 2);
        assert_eq!(count_pixels(&binarize(&g, -1.0)), 4);
        assert_eq!(count_pixels(&binarize(&g, 2.0)), 0);
    }

    #[test]
    fn binarize_skips_nodata() {
        let g = grid(vec![-9999.0, 0.4, 0.6, 1.0], 2, 2, Some(-9999.0));
        assert_eq!(count_pixels(&binarize(&g, -1e9)), 3);
    }

    #[test]
    fn overlay_identical_grids() {
        let spec = GridSpec::new(0.0, 0.0, 1.0, 10, 10).unwrap();
        let boundary = BitMask::full(spec);
        let mut settlement = BitMask::empty(spec);
        for row in 0..5 {
            for col in 0..10 {
                settlement.set(col, row, true);
            }
        }
        assert_eq!(overlay_count(&settlement, &boundary).unwrap().count, 50);
        assert_eq!(
            overlay_count(&BitMask::empty(spec), &boundary)
                .unwrap()
                .count,
            0
        );
    }

    #[test]
    fn overlay_offset_grids_match_by_cell_center() {
        let s_spec = GridSpec::new(0.0, 0.0, 10.0, 10, 10).unwrap();
        let mut settlement = BitMask::empty(s_spec);
        settlement.set(3, 4, true);
        settlement.set(9, 9, true);
        let b_spec = GridSpec::new(30.0, 40.0, 10.0, 2, 2).unwrap();
        let boundary = BitMask::full(b_spec);
        let r = overlay_count(&settlement, &boundary).unwrap();
        assert_eq!(
            r,
            OverlayCount {
                count: 1,
                disjoint: false
            }
        );
    }

    #[test]
    fn overlay_disjoint_sets_flag() {
        let s = BitMask::full(GridSpec::new(0.0, 0.0, 1.0, 4, 4).unwrap());
        let b = BitMask::full(GridSpec::new(100.0, 100.0, 1.0, 4, 4).unwrap());
        assert_eq!(
            overlay_count(&s, &b).unwrap(),
            OverlayCount {
                count: 0,
                disjoint: true
            }
        );
    }

    #[test]
    fn overlay_rejects_mismatched_cell_size() {
        let s = BitMask::full(GridSpec::new(0.0, 0.0, 1.0, 4, 4).unwrap());
        let b = BitMask::full(GridSpec::new(0.0, 0.0, 2.0, 4, 4).unwrap());
        assert!(matches!(
            overlay_count(&s, &b),
            Err(Error::Alignment { .. })
        ));
    }
}
