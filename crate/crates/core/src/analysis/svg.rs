//! Minimal SVG scatter plot of a 2-D embedding.

use std::collections::BTreeMap;
use std::fmt::Write;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

pub fn scatter_svg(coords: &[[f64; 2]], labels: &[String]) -> String {
    let (size, margin) = (600.0, 40.0);
    let (mut min, mut max) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for c in coords {
        for a in 0..2 {
            min[a] = min[a].min(c[a]);
            max[a] = max[a].max(c[a]);
        }
    }
    let span = (0..2).map(|a| (max[a] - min[a]).max(1e-12)).fold(0.0, f64::max);
    let project = |v: f64, a: usize| margin + (v - min[a]) / span * (size - 2.0 * margin);

    let mut colors = BTreeMap::new();
    for l in labels {
        let next = colors.len();
        colors.entry(l.as_str()).or_insert(PALETTE[next % PALETTE.len()]);
    }
    let height = size + 20.0 * colors.len() as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{height}" viewBox="0 0 {size} {height}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (c, l) in coords.iter().zip(labels) {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"><title>{}</title></circle>"#,
            project(c[0], 0),
            size - project(c[1], 1),
            colors[l.as_str()],
            escape(l)
        );
    }
    for (row, (label, color)) in colors.iter().enumerate() {
        let y = size + 14.0 + 20.0 * row as f64;
        let _ = writeln!(out, r#"<circle cx="{margin}" cy="{}" r="5" fill="{color}"/>"#, y - 4.0);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{y}" font-family="sans-serif" font-size="12">{}</text>"#,
            margin + 12.0,
            escape(label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
