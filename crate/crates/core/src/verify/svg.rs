use std::fmt::Write;

use crate::error::Result;
use crate::families::CheeseSpec;

/// SVG 1.1 drawing of the outer disc and the discs realized to `depth`.
/// Coordinates are printed with fixed precision so output is deterministic.
pub fn render_svg(cheese: &CheeseSpec, depth: u64, width_px: u32) -> Result<String> {
    let fam = &cheese.family;
    let outer = fam.outer();
    let cx = outer.center().real().to_f64();
    let cy = outer.center().imag().to_f64();
    let big_r = outer.radius().to_f64();
    let half = big_r * 1.05;
    let w = f64::from(width_px.max(1));
    let scale = w / (2.0 * half);
    let px = |x: f64| (x - (cx - half)) * scale;
    let py = |y: f64| ((cy + half) - y) * scale;

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        width_px
    );
    if !cheese.label.is_empty() {
        let label = cheese
            .label
            .replace('&', "&amp;")
            .replace('<', "&lt;")
            .replace('>', "&gt;");
        let _ = writeln!(out, "  <title>{label}</title>");
    }
    let _ = writeln!(out, r##"  <rect x="0" y="0" width="{0}" height="{0}" fill="#ffffff"/>"##, width_px);
    let _ = writeln!(
        out,
        r##"  <circle cx="{:.6}" cy="{:.6}" r="{:.6}" fill="#f3d27a" stroke="#333333" stroke-width="1"/>"##,
        px(cx),
        py(cy),
        big_r * scale
    );
    let _ = writeln!(out, r#"  <g id="holes">"#);
    for d in fam.realize(depth)? {
        let _ = writeln!(
            out,
            r##"    <circle cx="{:.6}" cy="{:.6}" r="{:.6}" fill="#ffffff" stroke="#7a5c00" stroke-width="0.5"/>"##,
            px(d.center().real().to_f64()),
            py(d.center().imag().to_f64()),
            d.radius().to_f64() * scale
        );
    }
    let _ = writeln!(out, "  </g>");
    let _ = writeln!(out, "</svg>");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{road_runner, sqrt_family, DiscFamily};
    use crate::precision::Precision;

    fn circles(svg: &str) -> Vec<(f64, f64, f64)> {
        svg.lines()
            .filter(|l| l.trim_start().starts_with("<circle"))
            .map(|l| {
                let get = |key: &str| -> f64 {
                    let start = l.find(&format!(" {key}=\"")).unwrap() + key.len() + 3;
                    let end = start + l[start..].find('"').unwrap();
                    l[start..end].parse().unwrap()
                };
                (get("cx"), get("cy"), get("r"))
            })
            .collect()
    }

    #[test]
    fn empty_family_draws_unit_circle_only() {
        let p = Precision::default();
        let svg = render_svg(&CheeseSpec::new(DiscFamily::empty(p), "empty"), 5, 400).unwrap();
        assert_eq!(circles(&svg).len(), 1);
        assert!(svg.contains(r#"version="1.1""#));
    }

    #[test]
    fn road_runner_holes_on_positive_axis() {
        let p = Precision::default();
        let cheese = CheeseSpec::new(road_runner(2, p).unwrap(), "rr");
        let svg = render_svg(&cheese, 10, 800).unwrap();
        let c = circles(&svg);
        assert_eq!(c.len(), 11);
        let (ox, oy, _) = c[0];
        for w in c[1..].windows(2) {
            assert!(w[1].2 <= w[0].2);
        }
        for &(x, y, _) in &c[1..] {
            assert!(x > ox);
            assert!((y - oy).abs() < 1e-9);
        }
        assert_eq!(svg, render_svg(&cheese, 10, 800).unwrap());
    }

    #[test]
    fn sqrt_image_is_point_symmetric() {
        let p = Precision::default();
        let rr = road_runner(2, p).unwrap();
        let cheese = CheeseSpec::new(sqrt_family(&rr).unwrap(), "root");
        let c = circles(&render_svg(&cheese, 6, 600).unwrap());
        let (ox, oy, _) = c[0];
        for &(x, y, r) in &c[1..] {
            let mirrored = (2.0 * ox - x, 2.0 * oy - y);
            assert!(c[1..]
                .iter()
                .any(|&(x2, y2, r2)| (x2 - mirrored.0).abs() < 1e-5 && (y2 - mirrored.1).abs() < 1e-5 && (r2 - r).abs() < 1e-9));
        }
    }
}
