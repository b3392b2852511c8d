//! Fixture paths and independent reference computations shared by the
//! integration tests. Nothing here calls into the crate's own kernels.

#![allow(dead_code)]

use std::path::{Path, PathBuf};

use zonal_density::pipeline::{load_config, RunConfig};

pub fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

/// The synthetic fixture config with output redirected into `out`.
pub fn synthetic_config(out: &Path) -> RunConfig {
    let mut c = load_config(fixture("synthetic/config.toml")).expect("synthetic config loads");
    c.output_dir = out.to_path_buf();
    c
}

/// Shoelace area of a closed or open vertex list.
pub fn shoelace(ring: &[(f64, f64)]) -> f64 {
    let n = ring.len();
    let mut twice = 0.0;
    for i in 0..n {
        let (x1, y1) = ring[i];
        let (x2, y2) = ring[(i + 1) % n];
        twice += x1 * y2 - x2 * y1;
    }
    twice.abs() / 2.0
}

/// Even-odd ray cast toward +x.
pub fn point_in_ring(ring: &[(f64, f64)], x: f64, y: f64) -> bool {
    let n = ring.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = ring[i];
        let (xj, yj) = ring[j];
        if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// Inside any outer ring and outside every hole.
pub fn point_in_polygon(
    outer: &[Vec<(f64, f64)>],
    holes: &[Vec<(f64, f64)>],
    x: f64,
    y: f64,
) -> bool {
    let crossings = outer
        .iter()
        .chain(holes)
        .filter(|r| point_in_ring(r, x, y))
        .count();
    crossings % 2 == 1
}

/// Quantile by linear interpolation at position `(n - 1) q` of sorted data.
pub fn reference_quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = (v.len() - 1) as f64 * q;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

/// Average ranks by counting, O(n²).
pub fn reference_ranks(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|&v| {
            let less = values.iter().filter(|&&w| w < v).count() as f64;
            let equal = values.iter().filter(|&&w| w == v).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

/// Pearson correlation computed directly from the definition.
pub fn reference_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}

pub fn reference_spearman(x: &[f64], y: &[f64]) -> f64 {
    reference_pearson(&reference_ranks(x), &reference_ranks(y))
}

/// Upper tail of Student's t through statrs' regularized incomplete beta.
pub fn reference_t_sf(t: f64, df: f64) -> f64 {
    let half = 0.5 * statrs::function::beta::beta_reg(df / 2.0, 0.5, df / (df + t * t));
    if t >= 0.0 {
        half
    } else {
        1.0 - half
    }
}

/// Hotelling's t for dependent overlapping correlations as cocor computes
/// it, and its upper-tail p on `n - 3` degrees of freedom.
pub fn reference_hotelling(n: usize, r_jk: f64, r_jh: f64, r_kh: f64) -> (f64, f64) {
    let det = 1.0 - r_jk * r_jk - r_jh * r_jh - r_kh * r_kh + 2.0 * r_jk * r_jh * r_kh;
    let df = n as f64 - 3.0;
    let t = (r_jh - r_jk) * (df * (1.0 + r_kh) / (2.0 * det)).sqrt();
    (t, reference_t_sf(t, df))
}

/// Reads a CSV into a header and string rows.
pub fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::Reader::from_path(path).expect("csv opens");
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

pub fn column(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("column {name} missing"))
}
