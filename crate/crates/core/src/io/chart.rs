//! Standalone SVG charts: line charts for sweeps, grouped bars for first- and
//! total-order indices, and a heatmap for second-order indices.
//!
//! Output depends only on the input data; all numbers are printed with fixed
//! precision so identical input gives byte-identical files.

use std::fmt::Write;

use crate::econ::SweepTable;
use crate::error::{Error, Result};
use crate::sensitivity::SobolIndices;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartKind {
    Line,
    GroupedBar,
    MatrixHeatmap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineSeries {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Marker {
    pub x: f64,
    pub y: f64,
    pub label: String,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn header(out: &mut String, title: &str) {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(out, r#"<text x="{:.1}" y="28" text-anchor="middle" font-size="15">{}</text>"#, WIDTH / 2.0, escape(title)).unwrap();
}

/// Tick label with up to four significant decimals and no trailing zeros.
fn tick_label(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e6 || v.abs() < 1e-3) {
        return format!("{v:.2e}");
    }
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

/// Round step sizes (1, 2, 5 × 10^k) covering `[lo, hi]` in about five ticks.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| span / s <= 6.0).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo == hi {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        return (lo - pad, hi + pad);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

fn validate_finite(values: impl IntoIterator<Item = f64>, what: &str) -> Result<()> {
    if values.into_iter().any(|v| !v.is_finite()) {
        return Err(Error::validation(what, "chart data must be finite"));
    }
    Ok(())
}

/// Line chart of one or more series with optional point markers.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[LineSeries], markers: &[Marker]) -> Result<String> {
    if series.is_empty() {
        return Err(Error::validation("series", "nothing to plot"));
    }
    for s in series {
        if s.points.len() < 2 {
            return Err(Error::validation("series", format!("`{}` needs at least 2 points for a line", s.name)));
        }
        validate_finite(s.points.iter().flat_map(|&(x, y)| [x, y]), "series")?;
    }
    let all = || series.iter().flat_map(|s| s.points.iter());
    let (x0, x1) = padded_range(all().map(|p| p.0));
    let (y0, y1) = padded_range(all().map(|p| p.1).chain(markers.iter().map(|m| m.y)));
    let pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| MARGIN_TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, &ticks(x0, x1), &ticks(y0, y1), &sx, &sy, x_label, y_label);
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#, pts.join(" ")).unwrap();
        let ly = MARGIN_TOP + 10.0 + 20.0 * k as f64;
        let lx = WIDTH - MARGIN_RIGHT + 15.0;
        writeln!(out, r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#, lx + 20.0).unwrap();
        writeln!(out, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, lx + 26.0, ly + 4.0, escape(&s.name)).unwrap();
    }
    for m in markers {
        if !(m.x.is_finite() && m.y.is_finite()) {
            return Err(Error::validation("markers", "marker coordinates must be finite"));
        }
        writeln!(out, r#"<circle class="marker" cx="{:.2}" cy="{:.2}" r="5" fill="none" stroke="black" stroke-width="1.5"/>"#, sx(m.x), sy(m.y)).unwrap();
        writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#, sx(m.x) + 8.0, sy(m.y) - 8.0, escape(&m.label)).unwrap();
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn axes(out: &mut String, xt: &[f64], yt: &[f64], sx: &dyn Fn(f64) -> f64, sy: &dyn Fn(f64) -> f64, x_label: &str, y_label: &str) {
    let bottom = HEIGHT - MARGIN_BOTTOM;
    let right = WIDTH - MARGIN_RIGHT;
    writeln!(out, r##"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{:.1}" height="{:.1}" fill="none" stroke="#333"/>"##, right - MARGIN_LEFT, bottom - MARGIN_TOP).unwrap();
    for &t in xt {
        let x = sx(t);
        writeln!(out, r##"<line x1="{x:.2}" y1="{bottom:.1}" x2="{x:.2}" y2="{:.1}" stroke="#333"/>"##, bottom + 5.0).unwrap();
        writeln!(out, r#"<text x="{x:.2}" y="{:.1}" text-anchor="middle">{}</text>"#, bottom + 19.0, tick_label(t)).unwrap();
    }
    for &t in yt {
        let y = sy(t);
        writeln!(out, r##"<line x1="{MARGIN_LEFT}" y1="{y:.2}" x2="{right:.1}" y2="{y:.2}" stroke="#ddd"/>"##).unwrap();
        writeln!(out, r#"<text x="{:.1}" y="{:.2}" text-anchor="end">{}</text>"#, MARGIN_LEFT - 6.0, y + 4.0, tick_label(t)).unwrap();
    }
    writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, (MARGIN_LEFT + right) / 2.0, HEIGHT - 15.0, escape(x_label)).unwrap();
    let cy = (MARGIN_TOP + bottom) / 2.0;
    writeln!(out, r#"<text x="18" y="{cy:.1}" text-anchor="middle" transform="rotate(-90 18 {cy:.1})">{}</text>"#, escape(y_label)).unwrap();
}

/// Bars grouped by category, one bar per group within each category.
pub fn grouped_bar_chart(title: &str, categories: &[String], groups: &[(String, Vec<f64>)]) -> Result<String> {
    if categories.is_empty() || groups.is_empty() {
        return Err(Error::validation("indices", "nothing to plot"));
    }
    for (name, values) in groups {
        if values.len() != categories.len() {
            return Err(Error::validation("indices", format!("group `{name}` has {} values for {} categories", values.len(), categories.len())));
        }
        validate_finite(values.iter().copied(), "indices")?;
    }
    let (mut y0, mut y1) = (0.0f64, 1.0f64);
    for (_, values) in groups {
        for &v in values {
            y0 = y0.min(v);
            y1 = y1.max(v);
        }
    }
    let pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sy = |y: f64| MARGIN_TOP + ph - (y - y0) / (y1 - y0) * ph;
    let slot = pw / categories.len() as f64;
    let bar = slot * 0.8 / groups.len() as f64;

    let mut out = String::new();
    header(&mut out, title);
    let bottom = HEIGHT - MARGIN_BOTTOM;
    let right = WIDTH - MARGIN_RIGHT;
    writeln!(out, r##"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw:.1}" height="{ph:.1}" fill="none" stroke="#333"/>"##).unwrap();
    for t in ticks(y0, y1) {
        let y = sy(t);
        writeln!(out, r##"<line x1="{MARGIN_LEFT}" y1="{y:.2}" x2="{right:.1}" y2="{y:.2}" stroke="#ddd"/>"##).unwrap();
        writeln!(out, r#"<text x="{:.1}" y="{:.2}" text-anchor="end">{}</text>"#, MARGIN_LEFT - 6.0, y + 4.0, tick_label(t)).unwrap();
    }
    let zero = sy(0.0);
    for (c, cat) in categories.iter().enumerate() {
        let x_slot = MARGIN_LEFT + slot * c as f64 + slot * 0.1;
        for (g, (_, values)) in groups.iter().enumerate() {
            let v = values[c];
            let (top, h) = if v >= 0.0 { (sy(v), zero - sy(v)) } else { (zero, sy(v) - zero) };
            writeln!(
                out,
                r#"<rect class="bar" x="{:.2}" y="{top:.2}" width="{bar:.2}" height="{h:.2}" fill="{}"><title>{} {}: {:.4}</title></rect>"#,
                x_slot + bar * g as f64,
                PALETTE[g % PALETTE.len()],
                escape(cat),
                escape(&groups[g].0),
                v
            )
            .unwrap();
        }
        writeln!(out, r#"<text x="{:.2}" y="{:.1}" text-anchor="middle">{}</text>"#, MARGIN_LEFT + slot * (c as f64 + 0.5), bottom + 19.0, escape(cat)).unwrap();
    }
    writeln!(out, r##"<line x1="{MARGIN_LEFT}" y1="{zero:.2}" x2="{right:.1}" y2="{zero:.2}" stroke="#333"/>"##).unwrap();
    for (g, (name, _)) in groups.iter().enumerate() {
        let ly = MARGIN_TOP + 10.0 + 20.0 * g as f64;
        let lx = right + 15.0;
        writeln!(out, r#"<rect x="{lx:.1}" y="{:.1}" width="14" height="10" fill="{}"/>"#, ly - 6.0, PALETTE[g % PALETTE.len()]).unwrap();
        writeln!(out, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, lx + 20.0, ly + 4.0, escape(name)).unwrap();
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Square heatmap of a symmetric matrix; the diagonal is left blank.
pub fn heatmap(title: &str, labels: &[String], matrix: &[Vec<f64>]) -> Result<String> {
    let n = labels.len();
    if n < 2 {
        return Err(Error::validation("matrix", "a heatmap needs at least two variables"));
    }
    if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
        return Err(Error::validation("matrix", "matrix must be square with one row per label"));
    }
    validate_finite(matrix.iter().flatten().copied(), "matrix")?;
    let peak = matrix
        .iter()
        .enumerate()
        .flat_map(|(i, r)| r.iter().enumerate().filter(move |(j, _)| *j != i).map(|(_, v)| v.abs()))
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let size = (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM).min(WIDTH - MARGIN_LEFT - MARGIN_RIGHT);
    let cell = size / n as f64;

    let mut out = String::new();
    header(&mut out, title);
    for i in 0..n {
        for j in 0..n {
            let x = MARGIN_LEFT + cell * j as f64;
            let y = MARGIN_TOP + cell * i as f64;
            if i == j {
                writeln!(out, r##"<rect x="{x:.2}" y="{y:.2}" width="{cell:.2}" height="{cell:.2}" fill="#eeeeee" stroke="white"/>"##).unwrap();
                continue;
            }
            let v = matrix[i][j];
            let t = (v.abs() / peak).min(1.0);
            // White to saturated blue for positive values, to red for negative.
            let fade = (255.0 * (1.0 - t)).round() as u8;
            let fill = if v >= 0.0 { format!("#{fade:02x}{fade:02x}ff") } else { format!("#ff{fade:02x}{fade:02x}") };
            writeln!(
                out,
                r#"<rect class="cell" x="{x:.2}" y="{y:.2}" width="{cell:.2}" height="{cell:.2}" fill="{fill}" stroke="white"><title>{} x {}: {v:.4}</title></rect>"#,
                escape(&labels[i]),
                escape(&labels[j])
            )
            .unwrap();
            let ink = if t > 0.6 { "white" } else { "black" };
            let mut shown = format!("{v:.3}");
            if shown == "-0.000" {
                shown.remove(0);
            }
            writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" fill="{ink}" font-size="10">{shown}</text>"#, x + cell / 2.0, y + cell / 2.0 + 4.0).unwrap();
        }
        writeln!(out, r#"<text x="{:.1}" y="{:.2}" text-anchor="end">{}</text>"#, MARGIN_LEFT - 6.0, MARGIN_TOP + cell * (i as f64 + 0.5) + 4.0, escape(&labels[i])).unwrap();
        writeln!(out, r#"<text x="{:.2}" y="{:.1}" text-anchor="middle">{}</text>"#, MARGIN_LEFT + cell * (i as f64 + 0.5), MARGIN_TOP + size + 18.0, escape(&labels[i])).unwrap();
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Earnings-versus-variable chart of a sweep with its crossings marked.
pub fn sweep_chart(title: &str, table: &SweepTable) -> Result<String> {
    let series: Vec<LineSeries> = table
        .series
        .iter()
        .map(|s| LineSeries {
            name: s.name.clone(),
            points: s.points.iter().map(|p| (p.value, p.earnings)).collect(),
        })
        .collect();
    let markers: Vec<Marker> = table
        .crossings
        .iter()
        .map(|c| Marker {
            x: c.value,
            y: c.earnings,
            label: format!("{} = {}", table.variable.label(), tick_label(c.value)),
        })
        .collect();
    line_chart(title, table.variable.label(), "expected earnings", &series, &markers)
}

/// Grouped bars of first- and total-order indices.
pub fn sobol_bar_chart(title: &str, indices: &SobolIndices) -> Result<String> {
    grouped_bar_chart(
        title,
        &indices.variables,
        &[
            ("first order".to_string(), indices.first_order.clone()),
            ("total order".to_string(), indices.total_order.clone()),
        ],
    )
}

/// Single-series bars of one index kind.
pub fn sobol_index_chart(title: &str, indices: &SobolIndices, total: bool) -> Result<String> {
    let (name, values) = if total {
        ("total order", &indices.total_order)
    } else {
        ("first order", &indices.first_order)
    };
    grouped_bar_chart(title, &indices.variables, &[(name.to_string(), values.clone())])
}

pub fn sobol_heatmap(title: &str, indices: &SobolIndices) -> Result<String> {
    let m = indices
        .second_order
        .as_ref()
        .ok_or_else(|| Error::validation("second_order", "indices were computed without second order"))?;
    heatmap(title, &indices.variables, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(name: &str, pts: &[(f64, f64)]) -> LineSeries {
        LineSeries {
            name: name.into(),
            points: pts.to_vec(),
        }
    }

    #[test]
    fn line_chart_has_series_and_markers() {
        let s = [series("a", &[(0.0, 0.0), (1.0, 1.0)]), series("b", &[(0.0, 1.0), (1.0, 0.0)])];
        let m = [Marker {
            x: 0.5,
            y: 0.5,
            label: "cross".into(),
        }];
        let svg = line_chart("t", "x", "y", &s, &m).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("class=\"marker\"").count(), 1);
        assert_eq!(svg, line_chart("t", "x", "y", &s, &m).unwrap());
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }

    #[test]
    fn line_needs_two_points() {
        let err = line_chart("t", "x", "y", &[series("a", &[(0.0, 1.0)])], &[]).unwrap_err();
        assert_eq!(err.field(), Some("series"));
        assert!(line_chart("t", "x", "y", &[], &[]).is_err());
    }

    #[test]
    fn bars_and_heatmap() {
        let cats: Vec<String> = ["G", "L", "C"].iter().map(|s| s.to_string()).collect();
        let svg = grouped_bar_chart("s", &cats, &[("first".into(), vec![0.2, 0.3, 0.1])]).unwrap();
        assert_eq!(svg.matches("class=\"bar\"").count(), 3);
        assert!(grouped_bar_chart("s", &cats, &[("first".into(), vec![0.2])]).is_err());

        let m = vec![vec![0.0, 0.1, -0.2], vec![0.1, 0.0, 0.3], vec![-0.2, 0.3, 0.0]];
        let svg = heatmap("h", &cats, &m).unwrap();
        assert_eq!(svg.matches("class=\"cell\"").count(), 6);
        assert!(svg.contains("#0000ff"));
        assert!(heatmap("h", &cats[..1], &m[..1]).is_err());
    }

    #[test]
    fn tick_steps_are_round() {
        assert_eq!(ticks(0.0, 1.0), vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]);
        assert_eq!(tick_label(0.6000000000000001), "0.6");
        assert_eq!(ticks(50.0, 200_000.0).len(), 4);
    }
}
