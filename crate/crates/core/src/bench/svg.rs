//! Hand-written SVG scatter plot of rg chromaticities.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::bench::run::ChromaSeries;
use crate::error::{Error, Result};

const SIZE: f64 = 480.0;
const MARGIN: f64 = 48.0;
const PALETTE: [&str; 8] = ["#000000", "#888888", "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Maps chromaticity (r, g) in [0,1]² to canvas coordinates.
fn project(r: f64, g: f64) -> (f64, f64) {
    let span = SIZE - 2.0 * MARGIN;
    (MARGIN + r.clamp(0.0, 1.0) * span, SIZE - MARGIN - g.clamp(0.0, 1.0) * span)
}

pub fn chromaticity_svg(series: &[ChromaSeries], title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        SIZE / 2.0,
        escape(title)
    );

    // gamut triangle r + g <= 1, axes and gray point
    let (x0, y0) = project(0.0, 0.0);
    let (x1, _) = project(1.0, 0.0);
    let (_, y2) = project(0.0, 1.0);
    let _ = writeln!(
        s,
        r##"<path d="M {x0:.1} {y0:.1} L {x1:.1} {y0:.1} L {x0:.1} {y2:.1} Z" fill="none" stroke="#444" stroke-width="1"/>"##
    );
    for tick in 0..=4 {
        let v = tick as f64 / 4.0;
        let (tx, _) = project(v, 0.0);
        let (_, ty) = project(0.0, v);
        let _ = writeln!(s, r#"<text x="{tx:.1}" y="{:.1}" font-family="sans-serif" font-size="10" text-anchor="middle">{v:.2}</text>"#, y0 + 14.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="10" text-anchor="end">{v:.2}</text>"#, x0 - 4.0, ty + 3.0);
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">r</text>"#, SIZE / 2.0, SIZE - 8.0);
    let _ = writeln!(s, r#"<text x="12" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">g</text>"#, SIZE / 2.0);
    let (gx, gy) = project(1.0 / 3.0, 1.0 / 3.0);
    let _ = writeln!(s, r##"<path d="M {:.1} {gy:.1} H {:.1} M {gx:.1} {:.1} V {:.1}" stroke="#999" stroke-dasharray="2,2"/>"##, gx - 6.0, gx + 6.0, gy - 6.0, gy + 6.0);

    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(s, r#"<g fill="{color}" data-series="{}">"#, escape(&ser.label));
        for (key, c) in &ser.points {
            let (px, py) = project(c.r, c.g);
            let _ = writeln!(s, r#"<circle cx="{px:.2}" cy="{py:.2}" r="3.5"><title>{} {}: ({:.4}, {:.4})</title></circle>"#, escape(&ser.label), escape(key), c.r, c.g);
        }
        let _ = writeln!(s, "</g>");
        // legend in the empty upper-right half of the plot
        let ly = MARGIN + 8.0 + 18.0 * i as f64;
        let lx = SIZE - MARGIN - 110.0;
        let _ = writeln!(s, r#"<circle cx="{lx:.1}" cy="{ly:.1}" r="4" fill="{color}"/>"#);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12">{}</text>"#, lx + 10.0, ly + 4.0, escape(&ser.label));
    }
    s.push_str("</svg>\n");
    s
}

pub fn emit_chromaticity_svg(series: &[ChromaSeries], title: &str, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, chromaticity_svg(series, title)).map_err(|e| Error::io(path, e))
}
