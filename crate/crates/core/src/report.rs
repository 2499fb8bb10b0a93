//! Table and chart writers. Output depends only on the input values, so
//! repeated runs produce identical bytes.

use std::fmt::Write as _;

use serde::Serialize;

use crate::analysis::SurfacePoint;

/// Serialize rows with a header derived from the field names.
pub fn to_csv<T: Serialize>(rows: &[T]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
}

/// Grid CSV with columns named after the factors.
pub fn surface_csv(fx: &str, fy: Option<&str>, points: &[SurfacePoint]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![fx];
    header.extend(fy);
    header.extend(["mean", "std"]);
    w.write_record(&header).expect("in-memory csv write");
    for p in points {
        let mut rec = vec![p.x_i.to_string()];
        if fy.is_some() {
            rec.push(p.x_j.to_string());
        }
        rec.push(p.mean.to_string());
        rec.push(p.std.to_string());
        w.write_record(&rec).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn header(width: u32, height: u32) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\" font-size=\"12\">\n<!-- doelab {} -->\n",
        env!("CARGO_PKG_VERSION")
    )
}

pub struct BarSeries<'a> {
    pub name: &'a str,
    pub values: Vec<f64>,
    /// Symmetric error half-widths, drawn as whiskers.
    pub errors: Option<Vec<f64>>,
}

const PALETTE: [&str; 4] = ["#3b6ea8", "#d9822b", "#5a9e5a", "#9b59b6"];

/// Grouped vertical bars, one group per label.
pub fn bar_chart_svg(title: &str, labels: &[String], series: &[BarSeries<'_>]) -> String {
    let (left, right, top, bottom): (f64, f64, f64, f64) = (60.0, 20.0, 40.0, 90.0);
    let group_w = 24.0 * series.len().max(1) as f64 + 24.0;
    let plot_w = group_w * labels.len().max(1) as f64;
    let plot_h: f64 = 260.0;
    let width = (left + plot_w + right).ceil() as u32;
    let height = (top + plot_h + bottom).ceil() as u32;

    let values = series.iter().flat_map(|s| {
        s.values.iter().enumerate().map(move |(i, v)| v + s.errors.as_ref().map_or(0.0, |e| e[i].max(0.0)))
    });
    let vmax = values.clone().fold(0.0f64, f64::max).max(1e-12);
    let vmin = series
        .iter()
        .flat_map(|s| s.values.iter().enumerate().map(move |(i, v)| v - s.errors.as_ref().map_or(0.0, |e| e[i].max(0.0))))
        .fold(0.0f64, f64::min);
    let span = vmax - vmin;
    let y = |v: f64| top + plot_h * (vmax - v) / span;

    let mut out = header(width, height);
    let _ = writeln!(out, "<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>", width / 2, esc(title));
    let _ = writeln!(
        out,
        "<line x1=\"{left}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#333\"/>",
        y(0.0),
        left + plot_w,
        y(0.0)
    );
    for t in 0..=4 {
        let v = vmin + span * t as f64 / 4.0;
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{v:.2}</text>",
            left - 6.0,
            y(v) + 4.0
        );
    }
    for (g, label) in labels.iter().enumerate() {
        let gx = left + g as f64 * group_w + 12.0;
        for (s, ser) in series.iter().enumerate() {
            let v = ser.values.get(g).copied().unwrap_or(0.0);
            let x = gx + s as f64 * 24.0;
            let (y0, y1) = (y(v.max(0.0)), y(v.min(0.0)));
            let _ = writeln!(
                out,
                "<rect x=\"{x:.2}\" y=\"{y0:.2}\" width=\"20\" height=\"{:.2}\" fill=\"{}\"/>",
                (y1 - y0).max(0.0),
                PALETTE[s % PALETTE.len()]
            );
            if let Some(e) = ser.errors.as_ref().and_then(|e| e.get(g)).filter(|e| e.is_finite()) {
                let cx = x + 10.0;
                let _ = writeln!(
                    out,
                    "<line x1=\"{cx:.2}\" y1=\"{:.2}\" x2=\"{cx:.2}\" y2=\"{:.2}\" stroke=\"#000\"/>",
                    y(v + e),
                    y(v - e)
                );
            }
        }
        let lx = gx + 12.0 * series.len() as f64;
        let ly = top + plot_h + 14.0;
        let _ = writeln!(
            out,
            "<text x=\"{lx:.2}\" y=\"{ly:.2}\" text-anchor=\"end\" transform=\"rotate(-35 {lx:.2} {ly:.2})\">{}</text>",
            esc(label)
        );
    }
    for (s, ser) in series.iter().enumerate() {
        let lx = left + 10.0 + s as f64 * 90.0;
        let ly = height as f64 - 12.0;
        let _ = writeln!(
            out,
            "<rect x=\"{lx:.2}\" y=\"{:.2}\" width=\"10\" height=\"10\" fill=\"{}\"/><text x=\"{:.2}\" y=\"{ly:.2}\">{}</text>",
            ly - 9.0,
            PALETTE[s % PALETTE.len()],
            lx + 14.0,
            esc(ser.name)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn ramp(t: f64) -> String {
    // Blue to yellow through teal.
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let stops = [(0.0, [49.0, 54.0, 149.0]), (0.5, [33.0, 145.0, 140.0]), (1.0, [253.0, 231.0, 37.0])];
    let (a, b) = if t <= 0.5 { (stops[0], stops[1]) } else { (stops[1], stops[2]) };
    let f = (t - a.0) / (b.0 - a.0);
    let c: Vec<u8> = (0..3).map(|i| (a.1[i] + f * (b.1[i] - a.1[i])).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// Heat map of a `resolution x resolution` grid from [`crate::analysis::surface_grid`].
pub fn heatmap_svg(title: &str, fx: &str, fy: &str, points: &[SurfacePoint], resolution: usize) -> String {
    let cell = (360.0 / resolution.max(1) as f64).max(2.0);
    let (left, top) = (70.0, 40.0);
    let side = cell * resolution as f64;
    let width = (left + side + 90.0).ceil() as u32;
    let height = (top + side + 60.0).ceil() as u32;
    let lo = points.iter().map(|p| p.mean).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.mean).fold(f64::NEG_INFINITY, f64::max);
    let range = if hi > lo { hi - lo } else { 1.0 };

    let mut out = header(width, height);
    let _ = writeln!(out, "<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>", width / 2, esc(title));
    for (idx, p) in points.iter().enumerate() {
        let (a, b) = (idx / resolution, idx % resolution);
        let x = left + a as f64 * cell;
        let y = top + side - (b + 1) as f64 * cell;
        let _ = writeln!(
            out,
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{cell:.2}\" height=\"{cell:.2}\" fill=\"{}\"/>",
            ramp((p.mean - lo) / range)
        );
    }
    if let (Some(first), Some(last)) = (points.first(), points.last()) {
        let _ = writeln!(
            out,
            "<text x=\"{left}\" y=\"{:.2}\">{:.3}</text><text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{:.3}</text>",
            top + side + 16.0,
            first.x_i,
            left + side,
            top + side + 16.0,
            last.x_i
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{:.3}</text><text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{:.3}</text>",
            left - 6.0,
            top + side,
            first.x_j,
            left - 6.0,
            top + 10.0,
            last.x_j
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
        left + side / 2.0,
        top + side + 36.0,
        esc(fx)
    );
    let _ = writeln!(
        out,
        "<text x=\"20\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.2})\">{}</text>",
        top + side / 2.0,
        top + side / 2.0,
        esc(fy)
    );
    let bar_x = left + side + 20.0;
    for s in 0..20 {
        let t = s as f64 / 19.0;
        let _ = writeln!(
            out,
            "<rect x=\"{bar_x:.2}\" y=\"{:.2}\" width=\"14\" height=\"{:.2}\" fill=\"{}\"/>",
            top + side * (1.0 - (s + 1) as f64 / 20.0),
            side / 20.0,
            ramp(t)
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\">{hi:.3}</text><text x=\"{:.2}\" y=\"{:.2}\">{lo:.3}</text>",
        bar_x + 18.0,
        top + 10.0,
        bar_x + 18.0,
        top + side
    );
    out.push_str("</svg>\n");
    out
}
