//! Administrative boundaries and their rasterization into bit masks.
//!
//! Boundaries come from a GeoJSON FeatureCollection whose coordinates are
//! already projected to meters. A cell belongs to a region iff its center lies
//! inside the polygon set under the even-odd rule. Centers falling exactly on
//! an edge follow the half-open scanline convention: bottom and left edges are
//! inside, top and right edges are outside.

use std::fs;
use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};

/// Default rasterization cell size in meters.
pub const DEFAULT_CELL_SIZE: f64 = 100.0;

/// Default cap on the number of cells a single mask may hold.
pub const DEFAULT_MAX_CELLS: u64 = 500_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

/// A closed vertex ring; the first vertex is repeated as the last.
#[derive(Debug, Clone, PartialEq)]
pub struct Ring(Vec<Point>);

impl Ring {
    /// Builds a ring, closing it if needed and checking the ring invariants.
    pub fn new(mut points: Vec<Point>) -> std::result::Result<Self, String> {
        if points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err("ring has non-finite coordinates".into());
        }
        if points.first() != points.last() {
            if let Some(&first) = points.first() {
                points.push(first);
            }
        }
        let mut distinct: Vec<Point> = Vec::with_capacity(points.len());
        for p in &points[..points.len().saturating_sub(1)] {
            if !distinct.contains(p) {
                distinct.push(*p);
            }
        }
        if distinct.len() < 3 {
            return Err(format!(
                "ring has {} distinct vertices, need at least 3",
                distinct.len()
            ));
        }
        let ring = Ring(points);
        if ring.signed_area() == 0.0 {
            return Err("ring has zero area".into());
        }
        Ok(ring)
    }

    pub fn points(&self) -> &[Point] {
        &self.0
    }

    /// Consecutive vertex pairs, including the closing edge.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.0.windows(2).map(|w| (w[0], w[1]))
    }

    /// Shoelace area; positive for counter-clockwise rings.
    pub fn signed_area(&self) -> f64 {
        0.5 * self
            .edges()
            .map(|(a, b)| a.x * b.y - b.x * a.y)
            .sum::<f64>()
    }

    pub fn perimeter(&self) -> f64 {
        self.edges()
            .map(|(a, b)| (b.x - a.x).hypot(b.y - a.y))
            .sum()
    }

    fn translated(&self, dx: f64, dy: f64) -> Ring {
        Ring(
            self.0
                .iter()
                .map(|p| Point::new(p.x + dx, p.y + dy))
                .collect(),
        )
    }
}

/// Polygon set of one region in projected meters.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryGeometry {
    pub region_id: String,
    pub outer_rings: Vec<Ring>,
    pub holes: Vec<Ring>,
}

impl BoundaryGeometry {
    pub fn new(region_id: impl Into<String>, outer_rings: Vec<Ring>, holes: Vec<Ring>) -> Self {
        BoundaryGeometry {
            region_id: region_id.into(),
            outer_rings,
            holes,
        }
    }

    pub fn rings(&self) -> impl Iterator<Item = &Ring> {
        self.outer_rings.iter().chain(self.holes.iter())
    }

    /// `(min_x, min_y, max_x, max_y)` over every vertex.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        let mut bbox = (
            f64::INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::NEG_INFINITY,
        );
        for p in self.rings().flat_map(|r| r.points()) {
            bbox.0 = bbox.0.min(p.x);
            bbox.1 = bbox.1.min(p.y);
            bbox.2 = bbox.2.max(p.x);
            bbox.3 = bbox.3.max(p.y);
        }
        bbox
    }

    /// Outer area minus hole area, from the vertex lists.
    pub fn area(&self) -> f64 {
        let outer: f64 = self.outer_rings.iter().map(|r| r.signed_area().abs()).sum();
        let holes: f64 = self.holes.iter().map(|r| r.signed_area().abs()).sum();
        outer - holes
    }

    pub fn translated(&self, dx: f64, dy: f64) -> BoundaryGeometry {
        BoundaryGeometry {
            region_id: self.region_id.clone(),
            outer_rings: self
                .outer_rings
                .iter()
                .map(|r| r.translated(dx, dy))
                .collect(),
            holes: self.holes.iter().map(|r| r.translated(dx, dy)).collect(),
        }
    }
}

/// Georeferenced cell layout. Row 0 is the bottom row; `origin` is the
/// lower-left corner of cell (0, 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub origin_x: f64,
    pub origin_y: f64,
    pub cell_size: f64,
    pub n_cols: usize,
    pub n_rows: usize,
}

impl GridSpec {
    pub fn new(
        origin_x: f64,
        origin_y: f64,
        cell_size: f64,
        n_cols: usize,
        n_rows: usize,
    ) -> Result<Self> {
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(Error::Argument(format!(
                "cell size must be positive, got {cell_size}"
            )));
        }
        if n_cols == 0 || n_rows == 0 {
            return Err(Error::Argument(format!(
                "grid needs at least one row and column, got {n_cols}x{n_rows}"
            )));
        }
        if !origin_x.is_finite() || !origin_y.is_finite() {
            return Err(Error::Argument("grid origin must be finite".into()));
        }
        Ok(GridSpec {
            origin_x,
            origin_y,
            cell_size,
            n_cols,
            n_rows,
        })
    }

    pub fn cell_count(&self) -> usize {
        self.n_cols * self.n_rows
    }

    pub fn width(&self) -> f64 {
        self.n_cols as f64 * self.cell_size
    }

    pub fn height(&self) -> f64 {
        self.n_rows as f64 * self.cell_size
    }

    /// `(min_x, min_y, max_x, max_y)` of the covered extent.
    pub fn extent(&self) -> (f64, f64, f64, f64) {
        (
            self.origin_x,
            self.origin_y,
            self.origin_x + self.width(),
            self.origin_y + self.height(),
        )
    }

    pub fn cell_center(&self, col: usize, row: usize) -> Point {
        Point::new(
            self.origin_x + (col as f64 + 0.5) * self.cell_size,
            self.origin_y + (row as f64 + 0.5) * self.cell_size,
        )
    }

    /// The cell whose footprint contains `p`, if any.
    pub fn locate(&self, p: Point) -> Option<(usize, usize)> {
        let col = ((p.x - self.origin_x) / self.cell_size).floor();
        let row = ((p.y - self.origin_y) / self.cell_size).floor();
        if col < 0.0 || row < 0.0 || col >= self.n_cols as f64 || row >= self.n_rows as f64 {
            return None;
        }
        Some((col as usize, row as usize))
    }

    /// Grid snapped to multiples of `cell_size` that covers the box.
    pub fn covering(
        bbox: (f64, f64, f64, f64),
        cell_size: f64,
        max_cells: u64,
    ) -> Result<GridSpec> {
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(Error::Argument(format!(
                "cell size must be positive, got {cell_size}"
            )));
        }
        let (min_x, min_y, max_x, max_y) = bbox;
        let origin_x = (min_x / cell_size).floor() * cell_size;
        let origin_y = (min_y / cell_size).floor() * cell_size;
        let cols = ((max_x - origin_x) / cell_size).ceil().max(1.0);
        let rows = ((max_y - origin_y) / cell_size).ceil().max(1.0);
        let cells = cols * rows;
        if !cells.is_finite() || cells > max_cells as f64 {
            return Err(Error::ResourceLimit {
                cells: if cells.is_finite() {
                    cells as u128
                } else {
                    u128::MAX
                },
                limit: max_cells,
            });
        }
        GridSpec::new(origin_x, origin_y, cell_size, cols as usize, rows as usize)
    }
}

/// Row-major occupancy bits over a [`GridSpec`], bottom row first.
#[derive(Debug, Clone, PartialEq)]
pub struct BitMask {
    spec: GridSpec,
    words: Vec<u64>,
}

impl BitMask {
    pub fn empty(spec: GridSpec) -> Self {
        BitMask {
            spec,
            words: vec![0; spec.cell_count().div_ceil(64)],
        }
    }

    pub fn full(spec: GridSpec) -> Self {
        let mut mask = BitMask::empty(spec);
        for i in 0..spec.cell_count() {
            mask.set_index(i, true);
        }
        mask
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn len(&self) -> usize {
        self.spec.cell_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, col: usize, row: usize) -> bool {
        self.get_index(row * self.spec.n_cols + col)
    }

    pub fn set(&mut self, col: usize, row: usize, value: bool) {
        assert!(
            col < self.spec.n_cols && row < self.spec.n_rows,
            "cell out of range"
        );
        self.set_index(row * self.spec.n_cols + col, value);
    }

    fn get_index(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn set_index(&mut self, i: usize, value: bool) {
        let bit = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= bit;
        } else {
            self.words[i / 64] &= !bit;
        }
    }

    /// `(col, row)` of every set cell, bottom row first.
    pub fn iter_set(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let cols = self.spec.n_cols;
        self.words.iter().enumerate().flat_map(move |(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let tz = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let i = w * 64 + tz;
                Some((i % cols, i / cols))
            })
        })
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

/// Number of set cells.
pub fn count_pixels(mask: &BitMask) -> u64 {
    mask.words.iter().map(|w| w.count_ones() as u64).sum()
}

/// Rasterizes on a grid derived from the geometry's bounding box.
pub fn rasterize(geom: &BoundaryGeometry, cell_size: f64) -> Result<BitMask> {
    rasterize_with_limit(geom, cell_size, DEFAULT_MAX_CELLS)
}

pub fn rasterize_with_limit(
    geom: &BoundaryGeometry,
    cell_size: f64,
    max_cells: u64,
) -> Result<BitMask> {
    if !(cell_size > 0.0 && cell_size.is_finite()) {
        return Err(Error::Argument(format!(
            "cell size must be positive, got {cell_size}"
        )));
    }
    let spec = GridSpec::covering(geom.bounding_box(), cell_size, max_cells)?;
    Ok(rasterize_on(geom, spec))
}

/// Rasterizes onto an explicit grid by scanline crossings at cell-center rows.
pub fn rasterize_on(geom: &BoundaryGeometry, spec: GridSpec) -> BitMask {
    let mut mask = BitMask::empty(spec);
    let edges: Vec<(Point, Point)> = geom
        .rings()
        .flat_map(|r| r.edges())
        .filter(|(a, b)| a.y != b.y)
        .collect();
    let mut crossings = Vec::new();

    for row in 0..spec.n_rows {
        let y = spec.origin_y + (row as f64 + 0.5) * spec.cell_size;
        crossings.clear();
        for &(a, b) in &edges {
            let (lo, hi) = if a.y < b.y { (a, b) } else { (b, a) };
            // half-open in y: the lower endpoint belongs to the edge
            if lo.y <= y && y < hi.y {
                let t = (y - lo.y) / (hi.y - lo.y);
                crossings.push(lo.x + t * (hi.x - lo.x));
            }
        }
        crossings.sort_by(f64::total_cmp);

        for span in crossings.chunks_exact(2) {
            let (x0, x1) = (span[0], span[1]);
            // first center with x >= x0, last center with x < x1
            let first = ((x0 - spec.origin_x) / spec.cell_size - 0.5)
                .ceil()
                .max(0.0);
            let mut col = first as usize;
            while col < spec.n_cols {
                let cx = spec.origin_x + (col as f64 + 0.5) * spec.cell_size;
                if cx >= x1 {
                    break;
                }
                if cx >= x0 {
                    mask.set(col, row, true);
                }
                col += 1;
            }
        }
    }
    mask
}

/// Reads a GeoJSON FeatureCollection of Polygon / MultiPolygon features.
pub fn load_boundaries(path: impl AsRef<Path>, id_property: &str) -> Result<Vec<BoundaryGeometry>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_boundaries(&text, id_property).map_err(|e| match e {
        Error::Parse { context, message } => Error::Parse {
            context: format!("{}: {context}", path.display()),
            message,
        },
        other => other,
    })
}

pub fn parse_boundaries(text: &str, id_property: &str) -> Result<Vec<BoundaryGeometry>> {
    let root: Value = serde_json::from_str(text).map_err(|e| {
        Error::parse(
            format!("GeoJSON line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    if root.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(Error::parse("GeoJSON root", "expected a FeatureCollection"));
    }
    let features = root
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::parse("GeoJSON root", "missing `features` array"))?;

    features
        .iter()
        .enumerate()
        .map(|(index, feature)| parse_feature(index, feature, id_property))
        .collect()
}

fn parse_feature(index: usize, feature: &Value, id_property: &str) -> Result<BoundaryGeometry> {
    let ctx = || format!("feature {index}");
    let region_id = match feature.get("properties").and_then(|p| p.get(id_property)) {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) => n.to_string(),
        _ => {
            return Err(Error::Validation(format!(
                "feature {index} has no `{id_property}` property"
            )))
        }
    };
    let geometry = feature
        .get("geometry")
        .ok_or_else(|| Error::parse(ctx(), "missing geometry"))?;
    let coords = geometry
        .get("coordinates")
        .ok_or_else(|| Error::parse(ctx(), "geometry has no coordinates"))?;
    let polygons: Vec<&Value> = match geometry.get("type").and_then(Value::as_str) {
        Some("Polygon") => vec![coords],
        Some("MultiPolygon") => coords
            .as_array()
            .ok_or_else(|| Error::parse(ctx(), "MultiPolygon coordinates must be an array"))?
            .iter()
            .collect(),
        Some(other) => {
            return Err(Error::parse(
                ctx(),
                format!("unsupported geometry type {other}"),
            ))
        }
        None => return Err(Error::parse(ctx(), "geometry has no type")),
    };

    let mut outer_rings = Vec::new();
    let mut holes = Vec::new();
    for polygon in polygons {
        let rings = polygon
            .as_array()
            .ok_or_else(|| Error::parse(ctx(), "polygon must be an array of rings"))?;
        for (k, ring) in rings.iter().enumerate() {
            let points = parse_ring(ring).ok_or_else(|| {
                Error::parse(ctx(), "ring must be an array of [x, y] number pairs")
            })?;
            let ring = Ring::new(points)
                .map_err(|msg| Error::Validation(format!("region {region_id}: {msg}")))?;
            if k == 0 {
                outer_rings.push(ring);
            } else {
                holes.push(ring);
            }
        }
    }
    if outer_rings.is_empty() {
        return Err(Error::Validation(format!(
            "region {region_id}: geometry has no rings"
        )));
    }
    Ok(BoundaryGeometry {
        region_id,
        outer_rings,
        holes,
    })
}

fn parse_ring(ring: &Value) -> Option<Vec<Point>> {
    ring.as_array()?
        .iter()
        .map(|pos| {
            let pos = pos.as_array()?;
            Some(Point::new(pos.first()?.as_f64()?, pos.get(1)?.as_f64()?))
        })
        .collect()
}
