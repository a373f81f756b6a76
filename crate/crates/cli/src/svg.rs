//! Minimal SVG writers: line plots (optionally log-scaled) and heatmaps.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
    /// Scatter markers instead of a polyline.
    pub markers: bool,
}

#[derive(Clone, Copy, Default)]
pub struct Axes<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub log_x: bool,
    pub log_y: bool,
}

fn scale(v: f64, log: bool) -> Option<f64> {
    if log {
        (v > 0.0 && v.is_finite()).then(|| v.log10())
    } else {
        v.is_finite().then_some(v)
    }
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in vals {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(v: f64, log: bool) -> String {
    if log {
        format!("1e{}", v.round() as i64)
    } else if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.1e}")
    } else {
        format!("{v:.2}")
    }
}

pub fn line_plot(axes: Axes, series: &[Series]) -> String {
    let pts: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| s.points.iter().filter_map(|&(x, y)| Some((scale(x, axes.log_x)?, scale(y, axes.log_y)?))).collect())
        .collect();
    let (x0, x1) = range(pts.iter().flatten().map(|p| p.0));
    let (y0, y1) = range(pts.iter().flatten().map(|p| p.1));
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let py = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

    let mut out = String::new();
    header(&mut out, axes.title);
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, px(xv), H - MARGIN + 16.0, tick_label(xv, axes.log_x));
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, MARGIN - 4.0, py(yv) + 4.0, tick_label(yv, axes.log_y));
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 16.0, escape(axes.x_label));
    let _ = writeln!(
        out,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
        H / 2.0,
        escape(axes.y_label)
    );
    for (i, (s, p)) in series.iter().zip(&pts).enumerate() {
        let c = COLORS[i % COLORS.len()];
        if s.markers {
            for &(x, y) in p {
                let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="1.5" fill="{c}"/>"#, px(x), py(y));
            }
        } else {
            let path: Vec<String> = p.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
            let _ = writeln!(out, r#"<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
        }
        let ly = MARGIN + 14.0 + 16.0 * i as f64;
        let _ = writeln!(out, r#"<rect x="{:.1}" y="{:.1}" width="10" height="10" fill="{c}"/>"#, W - MARGIN - 120.0, ly - 9.0);
        let _ = writeln!(out, r#"<text x="{:.1}" y="{ly:.1}">{}</text>"#, W - MARGIN - 105.0, escape(s.label));
    }
    out.push_str("</svg>\n");
    out
}

/// Row-major `values[iy * xs.len() + ix]`, colored on a grey-to-blue ramp.
pub fn heatmap(axes: Axes, xs: &[f64], ys: &[f64], values: &[f64]) -> String {
    assert_eq!(values.len(), xs.len() * ys.len());
    let scaled: Vec<Option<f64>> = values.iter().map(|&v| scale(v, axes.log_y)).collect();
    let (lo, hi) = range(scaled.iter().flatten().copied());
    let (cw, ch) = ((W - 2.0 * MARGIN) / xs.len().max(1) as f64, (H - 2.0 * MARGIN) / ys.len().max(1) as f64);
    let mut out = String::new();
    header(&mut out, axes.title);
    for (iy, _) in ys.iter().enumerate() {
        for (ix, _) in xs.iter().enumerate() {
            let t = scaled[iy * xs.len() + ix].map_or(0.0, |v| (v - lo) / (hi - lo));
            let shade = |a: f64, b: f64| (a + t * (b - a)).round() as u8;
            let _ = writeln!(
                out,
                r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#{:02x}{:02x}{:02x}"/>"##,
                MARGIN + ix as f64 * cw,
                H - MARGIN - (iy + 1) as f64 * ch,
                cw + 0.05,
                ch + 0.05,
                shade(245.0, 8.0),
                shade(245.0, 48.0),
                shade(245.0, 107.0)
            );
        }
    }
    let corner = |v: &[f64], first: bool| if first { v.first() } else { v.last() }.copied().unwrap_or(0.0);
    let _ = writeln!(out, r#"<text x="{MARGIN}" y="{}">{:.2}</text>"#, H - MARGIN + 16.0, corner(xs, true));
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{:.2}</text>"#, W - MARGIN, H - MARGIN + 16.0, corner(xs, false));
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{:.2}</text>"#, MARGIN - 4.0, H - MARGIN, corner(ys, true));
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{:.2}</text>"#, MARGIN - 4.0, MARGIN + 10.0, corner(ys, false));
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 16.0, escape(axes.x_label));
    let _ = writeln!(
        out,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
        H / 2.0,
        escape(axes.y_label)
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_plot_skips_nonpositive_on_log_axes() {
        let s = Series { label: "a", points: vec![(1.0, 1.0), (2.0, 0.0), (3.0, 1e-3)], markers: false };
        let svg = line_plot(Axes { log_y: true, ..Default::default() }, &[s]);
        let poly = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        assert_eq!(poly.matches(',').count(), 2);
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn heatmap_has_one_cell_per_value() {
        let svg = heatmap(Axes::default(), &[0.0, 1.0, 2.0], &[0.0, 1.0], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(svg.matches("<rect x=").count(), 6);
    }
}
