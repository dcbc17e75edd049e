//! Deterministic SVG rendering of a point set and an optional structure.

use std::fmt::Write;

use noncross_core::geometry::{crossing_pairs, Edge, PointSet, Structure};

const WIDTH: f64 = 800.0;
const MAX_HEIGHT: f64 = 800.0;
const MARGIN: f64 = 40.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// `y_scale` stretches y before fitting; it only affects the picture.
/// Edges that take part in a crossing are drawn in red.
pub fn render(ps: &PointSet, structure: Option<&Structure>, y_scale: f64) -> String {
    let pts: Vec<(f64, f64)> = ps.points().iter().map(|p| (p.x.to_f64(), p.y.to_f64() * y_scale)).collect();
    let fold = |f: fn(f64, f64) -> f64, init: f64, sel: fn(&(f64, f64)) -> f64| pts.iter().map(sel).fold(init, f);
    let (min_x, max_x) = (fold(f64::min, f64::INFINITY, |p| p.0), fold(f64::max, f64::NEG_INFINITY, |p| p.0));
    let (min_y, max_y) = (fold(f64::min, f64::INFINITY, |p| p.1), fold(f64::max, f64::NEG_INFINITY, |p| p.1));
    let dx = (max_x - min_x).max(1e-300);
    let dy = max_y - min_y;
    let mut scale = (WIDTH - 2.0 * MARGIN) / dx;
    if dy * scale > MAX_HEIGHT - 2.0 * MARGIN {
        scale = (MAX_HEIGHT - 2.0 * MARGIN) / dy;
    }
    let height = (dy * scale + 2.0 * MARGIN).max(2.0 * MARGIN);
    let map = |(x, y): (f64, f64)| (MARGIN + (x - min_x) * scale, height - MARGIN - (y - min_y) * scale);

    let mut crossing: Vec<Edge> = Vec::new();
    if let Some(s) = structure {
        for (e, f) in crossing_pairs(s, ps) {
            crossing.push(e);
            crossing.push(f);
        }
    }
    let is_crossing = |&(a, b): &Edge| crossing.iter().any(|&(c, d)| (a, b) == (c, d) || (a, b) == (d, c));

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.0} {height:.0}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if let Some(s) = structure {
        for e in s.edges() {
            let (x1, y1) = map(pts[e.0]);
            let (x2, y2) = map(pts[e.1]);
            let (stroke, width, class) =
                if is_crossing(&e) { ("#d62728", 2.5, "edge crossing") } else { ("#1f3b73", 1.5, "edge") };
            let _ = writeln!(
                out,
                r#"<line class="{class}" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="{stroke}" stroke-width="{width}"/>"#
            );
        }
    }
    for (p, &xy) in ps.points().iter().zip(&pts) {
        let (x, y) = map(xy);
        let _ = writeln!(out, r#"<circle cx="{x:.3}" cy="{y:.3}" r="4" fill="black"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="12">{}</text>"#,
            x + 6.0,
            y - 6.0,
            escape(&p.label)
        );
    }
    out.push_str("</svg>\n");
    out
}
