//! Hand-written SVG 1.1 line plots.

use std::fmt::Write as _;

const PANEL_W: f64 = 240.0;
const PANEL_H: f64 = 160.0;
const MARGIN: f64 = 28.0;

pub struct Panel {
    pub title: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-300 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn polyline(out: &mut String, xs: &[f64], ys: &[f64], frame: (f64, f64, f64, f64), xr: (f64, f64), yr: (f64, f64)) {
    let (left, top, w, h) = frame;
    let pts: Vec<String> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .map(|(x, y)| {
            let px = left + (x - xr.0) / (xr.1 - xr.0) * w;
            let py = top + h - (y - yr.0) / (yr.1 - yr.0) * h;
            format!("{px:.2},{py:.2}")
        })
        .collect();
    let _ = writeln!(out, r#"<polyline fill="none" stroke="steelblue" stroke-width="1" points="{}"/>"#, pts.join(" "));
}

/// Rows of panels sharing one y-range per row.
pub fn small_multiples(title: &str, rows: &[Vec<Panel>]) -> String {
    let cols = rows.iter().map(|r| r.len()).max().unwrap_or(1).max(1);
    let width = cols as f64 * (PANEL_W + MARGIN) + MARGIN;
    let height = rows.len() as f64 * (PANEL_H + 2.0 * MARGIN) + 2.0 * MARGIN;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{height:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<text x="{MARGIN}" y="18" font-size="13">{}</text>"#, escape(title));
    for (r, row) in rows.iter().enumerate() {
        let yr = range(row.iter().flat_map(|p| p.ys.iter().copied()));
        for (c, panel) in row.iter().enumerate() {
            let left = MARGIN + c as f64 * (PANEL_W + MARGIN);
            let top = 2.0 * MARGIN + r as f64 * (PANEL_H + 2.0 * MARGIN);
            let xr = range(panel.xs.iter().copied());
            let _ = writeln!(
                out,
                r#"<rect x="{left:.2}" y="{top:.2}" width="{PANEL_W}" height="{PANEL_H}" fill="none" stroke="black" stroke-width="0.5"/>"#
            );
            let _ = writeln!(out, r#"<text x="{left:.2}" y="{:.2}">{}</text>"#, top - 4.0, escape(&panel.title));
            let _ = writeln!(
                out,
                r#"<text x="{left:.2}" y="{:.2}">{:.3}</text><text x="{:.2}" y="{:.2}" text-anchor="end">{:.3}</text>"#,
                top + PANEL_H + 12.0,
                xr.0,
                left + PANEL_W,
                top + PANEL_H + 12.0,
                xr.1
            );
            polyline(&mut out, &panel.xs, &panel.ys, (left, top, PANEL_W, PANEL_H), xr, yr);
        }
    }
    out.push_str("</svg>\n");
    out
}

/// A single panel of `y` against `x`, optionally on log axes.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, xs: &[f64], ys: &[f64], log_axes: bool) -> String {
    let tr = |v: &f64| if log_axes { v.abs().max(1e-300).log10() } else { *v };
    let (xs, ys): (Vec<f64>, Vec<f64>) = (xs.iter().map(tr).collect(), ys.iter().map(tr).collect());
    let suffix = if log_axes { " (log10)" } else { "" };
    let panel = Panel { title: format!("{y_label}{suffix} vs {x_label}{suffix}"), xs, ys };
    small_multiples(title, &[vec![panel]])
}
