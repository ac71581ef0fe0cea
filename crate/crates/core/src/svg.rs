//! SVG pictures of planar Yao-Yao partitions.

use std::fmt::Write;

use crate::error::{check_dim, Result, SantaloError};
use crate::geometry::YaoYaoTree;
use crate::measures::WeightedPointCloud;

const CANVAS: f64 = 800.0;
const FILLS: [&str; 4] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"];
const ARC_STEPS: usize = 16;

/// Four shaded sectors, the atoms as dots and the center as a cross.
pub fn render_svg(tree: &YaoYaoTree, cloud: &WeightedPointCloud) -> Result<String> {
    if tree.dim() != 2 {
        return Err(SantaloError::UnsupportedDimension(tree.dim()));
    }
    check_dim(2, cloud.dim())?;
    let c = tree.center();
    let (mut lo, mut hi) = ([c[0], c[1]], [c[0], c[1]]);
    for p in cloud.points() {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let margin = 0.05 * span;
    let side = span + 2.0 * margin;
    let mid = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
    let scale = CANVAS / side;
    let to_px = |x: f64, y: f64| {
        (
            (x - mid[0]) * scale + CANVAS / 2.0,
            CANVAS / 2.0 - (y - mid[1]) * scale,
        )
    };
    let reach = 2.0 * side * std::f64::consts::SQRT_2;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="800" viewBox="0 0 800 800">"#
    );
    let _ = writeln!(out, r#"<rect width="800" height="800" fill="white"/>"#);
    for (i, cone) in tree.leaf_cones()?.iter().enumerate() {
        let g = cone.generators();
        let (a1, a2) = (g[(1, 0)].atan2(g[(0, 0)]), g[(1, 1)].atan2(g[(0, 1)]));
        // sweep counter-clockwise from the first generator to the second
        let (start, mut sweep) = if cone.det() > 0.0 { (a1, a2 - a1) } else { (a2, a1 - a2) };
        if sweep < 0.0 {
            sweep += 2.0 * std::f64::consts::PI;
        }
        let (cx, cy) = to_px(c[0], c[1]);
        let mut pts = format!("{cx:.3},{cy:.3}");
        for k in 0..=ARC_STEPS {
            let a = start + sweep * k as f64 / ARC_STEPS as f64;
            let (x, y) = to_px(c[0] + reach * a.cos(), c[1] + reach * a.sin());
            let _ = write!(pts, " {x:.3},{y:.3}");
        }
        let _ = writeln!(
            out,
            r#"<polygon points="{pts}" fill="{}" fill-opacity="0.25" stroke="none"/>"#,
            FILLS[i % FILLS.len()]
        );
    }
    for p in cloud.points() {
        let (x, y) = to_px(p[0], p[1]);
        let _ = writeln!(out, r#"<circle cx="{x:.3}" cy="{y:.3}" r="1.5" fill="black"/>"#);
    }
    let (cx, cy) = to_px(c[0], c[1]);
    let _ = writeln!(
        out,
        r#"<path d="M {:.3} {cy:.3} H {:.3} M {cx:.3} {:.3} V {:.3}" stroke="black" stroke-width="2"/>"#,
        cx - 8.0,
        cx + 8.0,
        cy - 8.0,
        cy + 8.0
    );
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point;
    use crate::sampling;

    #[test]
    fn quadrants_meet_at_origin() {
        let cloud = WeightedPointCloud::new(2, vec![1.0, 1.0, -1.0, 1.0, 1.0, -1.0, -1.0, -1.0], vec![1.0; 4]).unwrap();
        let t = YaoYaoTree::orthants(point(&[0.0, 0.0])).unwrap();
        let s = render_svg(&t, &cloud).unwrap();
        assert_eq!(s.matches("<polygon").count(), 4);
        assert_eq!(s.matches("<circle").count(), 4);
        assert_eq!(s.matches("<polygon points=\"400.000,400.000").count(), 4);
        assert_eq!(s, render_svg(&t, &cloud).unwrap());
    }

    #[test]
    fn three_dimensions_unsupported() {
        let cloud = sampling::uniform_ball_cloud(3, 10, 1);
        let t = YaoYaoTree::orthants(point(&[0.0, 0.0, 0.0])).unwrap();
        assert!(matches!(render_svg(&t, &cloud), Err(SantaloError::UnsupportedDimension(3))));
    }
}
