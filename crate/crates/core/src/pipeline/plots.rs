//! Standalone SVG 1.1 scatter plots of new-model density against case rate.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::report::{ComparisonReport, CorrelationRow, RegionRow};
use crate::density::Level;
use crate::error::{Error, Result};
use crate::stats::rank;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;
const MARKER: f64 = 4.0;

/// One marker in plot coordinates plus what it stands for.
struct Marker<'a> {
    x: f64,
    y: f64,
    level: Level,
    name: &'a str,
}

struct Axis {
    min: f64,
    max: f64,
    label: String,
    ticks: Vec<f64>,
}

impl Axis {
    fn data(label: &str, values: &[f64]) -> Axis {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = if hi > lo {
            (lo, hi)
        } else {
            (lo - 1.0, hi + 1.0)
        };
        let step = nice_step((hi - lo) / 5.0);
        let min = (lo / step).floor() * step;
        let max = (hi / step).ceil() * step;
        let count = ((max - min) / step).round() as usize;
        Axis {
            min,
            max,
            label: label.into(),
            ticks: (0..=count).map(|i| min + i as f64 * step).collect(),
        }
    }

    /// Exactly `[1, n]`.
    fn rank(label: &str, n: usize) -> Axis {
        let n = n as f64;
        let step = nice_step((n - 1.0) / 5.0).max(1.0);
        let mut ticks = vec![1.0];
        let mut t = step;
        while t < n {
            if t > 1.0 {
                ticks.push(t);
            }
            t += step;
        }
        ticks.push(n);
        Axis {
            min: 1.0,
            max: n,
            label: label.into(),
            ticks,
        }
    }

    fn scale(&self, v: f64, from: f64, to: f64) -> f64 {
        from + (v - self.min) / (self.max - self.min) * (to - from)
    }
}

fn nice_step(raw: f64) -> f64 {
    if !(raw > 0.0 && raw.is_finite()) {
        return 1.0;
    }
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let nice = if f <= 1.0 {
        1.0
    } else if f <= 2.0 {
        2.0
    } else if f <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn tick_label(v: f64) -> String {
    if v.abs() >= 1e5 || (v != 0.0 && v.abs() < 1e-3) {
        format!("{v:.1e}")
    } else if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').to_string()
    }
}

pub(crate) fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn render(title: &str, xaxis: &Axis, yaxis: &Axis, markers: &[Marker]) -> String {
    let (x0, x1) = (LEFT, WIDTH - RIGHT);
    let (y0, y1) = (HEIGHT - BOTTOM, TOP);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#
    );
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, "<title>{}</title>", escape(title));
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        TOP / 2.0 + 5.0,
        escape(title)
    );

    // axes and ticks
    let _ = writeln!(
        s,
        r#"<g class="axes" stroke="black" stroke-width="1" fill="none">"#
    );
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/>"#);
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/>"#);
    for &t in &xaxis.ticks {
        let x = xaxis.scale(t, x0, x1);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{}"/>"#,
            y0 + 5.0
        );
    }
    for &t in &yaxis.ticks {
        let y = yaxis.scale(t, y0, y1);
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{y:.2}" x2="{x0}" y2="{y:.2}"/>"#,
            x0 - 5.0
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<g class="tick-labels" font-family="sans-serif" font-size="10">"#
    );
    for &t in &xaxis.ticks {
        let x = xaxis.scale(t, x0, x1);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#,
            y0 + 18.0,
            tick_label(t)
        );
    }
    for &t in &yaxis.ticks {
        let y = yaxis.scale(t, y0, y1);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 8.0,
            y + 3.5,
            tick_label(t)
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<text class="axis-label" x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0,
        escape(&xaxis.label)
    );
    let (lx, ly) = (20.0, (y0 + y1) / 2.0);
    let _ = writeln!(
        s,
        r#"<text class="axis-label" x="{lx}" y="{ly}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 {lx} {ly})">{}</text>"#,
        escape(&yaxis.label)
    );

    let _ = writeln!(s, r#"<g class="points">"#);
    for m in markers {
        let x = xaxis.scale(m.x, x0, x1);
        let y = yaxis.scale(m.y, y0, y1);
        let _ = writeln!(
            s,
            "{}",
            marker_element(m.level, x, y, Some(m.name), "point")
        );
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(
        s,
        r#"<g class="legend" font-family="sans-serif" font-size="11">"#
    );
    for (i, level) in [Level::Regency, Level::Municipality]
        .into_iter()
        .enumerate()
    {
        let y = TOP + 10.0 + i as f64 * 20.0;
        let x = WIDTH - RIGHT + 20.0;
        let _ = writeln!(s, "{}", marker_element(level, x, y, None, "legend-marker"));
        let label = match level {
            Level::Regency => "Regency",
            Level::Municipality => "Municipality",
        };
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{label}</text>"#,
            x + 12.0,
            y + 4.0
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

fn marker_element(level: Level, x: f64, y: f64, name: Option<&str>, class: &str) -> String {
    let title = name
        .map(|n| format!("<title>{}</title>", escape(n)))
        .unwrap_or_default();
    match level {
        Level::Regency => format!(
            r##"<circle class="{class} regency" cx="{x:.2}" cy="{y:.2}" r="{MARKER}" fill="#1f77b4">{title}</circle>"##
        ),
        Level::Municipality => format!(
            r##"<rect class="{class} municipality" x="{:.2}" y="{:.2}" width="{}" height="{}" fill="#d62728">{title}</rect>"##,
            x - MARKER,
            y - MARKER,
            2.0 * MARKER,
            2.0 * MARKER
        ),
    }
}

/// SVG of density against case rate for one subset.
pub fn data_plot(row: &CorrelationRow, members: &[&RegionRow]) -> String {
    let xs: Vec<f64> = members.iter().filter_map(|r| r.density_new).collect();
    let ys: Vec<f64> = members
        .iter()
        .map(|r| r.region.case_rate_per_100k)
        .collect();
    let markers: Vec<Marker> = members
        .iter()
        .zip(xs.iter().zip(&ys))
        .map(|(r, (&x, &y))| Marker {
            x,
            y,
            level: r.region.level,
            name: &r.region.name,
        })
        .collect();
    render(
        &format!("Data plot, new model: {} (n = {})", row.label, row.n),
        &Axis::data("Settlement density (persons per km²)", &xs),
        &Axis::data("Case rate per 100 000", &ys),
        &markers,
    )
}

/// SVG of density rank against case-rate rank for one subset.
pub fn rank_plot(row: &CorrelationRow, members: &[&RegionRow]) -> Result<String> {
    let xs: Vec<f64> = members.iter().filter_map(|r| r.density_new).collect();
    let ys: Vec<f64> = members
        .iter()
        .map(|r| r.region.case_rate_per_100k)
        .collect();
    let rx = rank(&xs)?;
    let ry = rank(&ys)?;
    let markers: Vec<Marker> = members
        .iter()
        .zip(rx.ranks().iter().zip(ry.ranks()))
        .map(|(r, (&x, &y))| Marker {
            x,
            y,
            level: r.region.level,
            name: &r.region.name,
        })
        .collect();
    let n = members.len();
    Ok(render(
        &format!("Rank plot, new model: {} (n = {n})", row.label),
        &Axis::rank("Settlement density rank", n),
        &Axis::rank("Case rate rank", n),
        &markers,
    ))
}

fn file_stem(index: usize, label: &str) -> String {
    let mut slug = String::new();
    for c in label.chars() {
        if c.is_ascii_alphanumeric() {
            slug.push(c.to_ascii_lowercase());
        } else if !slug.ends_with('-') {
            slug.push('-');
        }
    }
    format!("{:02}-{}", index + 1, slug.trim_matches('-'))
}

/// Writes a data plot and a rank plot per correlation subset.
pub fn emit_plots(report: &ComparisonReport, outdir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(outdir).map_err(|e| Error::io(outdir, e))?;
    let mut written = Vec::new();
    for (i, row) in report.correlations.iter().enumerate() {
        let members: Vec<&RegionRow> = report
            .regions
            .iter()
            .filter(|r| row.members.binary_search(&r.region.region_id).is_ok())
            .collect();
        let stem = file_stem(i, &row.label);
        for (suffix, svg) in [
            ("data", data_plot(row, &members)),
            ("rank", rank_plot(row, &members)?),
        ] {
            let path = outdir.join(format!("{stem}-{suffix}.svg"));
            std::fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
    }
    Ok(written)
}
