//! Convex hulls and facet enumeration for small vertex sets.

use itertools::Itertools;
use nalgebra::DMatrix;

use crate::measures::dot;

/// Outward halfspace `normal . x <= offset` with a unit normal.
#[derive(Clone, Debug, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.offset - dot(&self.normal, x)
    }
}

fn cross(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Indices of the hull vertices of planar points in counter-clockwise
/// order, collinear points dropped (Andrew's monotone chain).
pub fn hull_2d(points: &[Vec<f64>]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| {
        points[i][0]
            .total_cmp(&points[j][0])
            .then(points[i][1].total_cmp(&points[j][1]))
    });
    idx.dedup_by(|a, b| points[*a] == points[*b]);
    if idx.len() < 3 {
        return idx;
    }
    let scale = points
        .iter()
        .flat_map(|p| p.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1e-300);
    let eps = 1e-14 * scale * scale;
    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(idx.iter())
        } else {
            Box::new(idx.iter().rev())
        };
        for &i in iter {
            while hull.len() >= start + 2
                && cross(&points[hull[hull.len() - 2]], &points[hull[hull.len() - 1]], &points[i]) <= eps
            {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    hull
}

/// Facets of the convex hull of `points` (dimension >= 2) by brute force
/// over all affinely independent `n`-subsets. Requires a full-dimensional
/// point set.
pub fn facets(points: &[Vec<f64>]) -> Vec<Halfspace> {
    let n = points[0].len();
    if n == 2 {
        let h = hull_2d(points);
        return (0..h.len())
            .map(|k| {
                let (a, b) = (&points[h[k]], &points[h[(k + 1) % h.len()]]);
                let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                let len = dx.hypot(dy);
                let normal = vec![dy / len, -dx / len];
                let offset = dot(&normal, a);
                Halfspace { normal, offset }
            })
            .collect();
    }
    let scale = points
        .iter()
        .flat_map(|p| p.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1e-300);
    let tol = 1e-10 * scale;
    let mut out: Vec<Halfspace> = Vec::new();
    for subset in (0..points.len()).combinations(n) {
        let base = &points[subset[0]];
        let mut m = DMatrix::<f64>::zeros(n, n);
        for (r, &i) in subset[1..].iter().enumerate() {
            for c in 0..n {
                m[(r, c)] = points[i][c] - base[c];
            }
        }
        let svd = m.svd(false, true);
        let Some(vt) = svd.v_t else { continue };
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        if svd.singular_values[order[n - 2]] <= 1e-9 * scale {
            continue;
        }
        let mut normal: Vec<f64> = vt.row(order[n - 1]).iter().copied().collect();
        let norm = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
        normal.iter_mut().for_each(|v| *v /= norm);
        let mut offset = dot(&normal, base);
        let (mut above, mut below) = (false, false);
        for p in points {
            let s = dot(&normal, p) - offset;
            above |= s > tol;
            below |= s < -tol;
        }
        if above && below {
            continue;
        }
        if above {
            normal.iter_mut().for_each(|v| *v = -*v);
            offset = -offset;
        }
        let dup = out.iter().any(|h| {
            (h.offset - offset).abs() <= tol && h.normal.iter().zip(&normal).all(|(a, b)| (a - b).abs() <= 1e-9)
        });
        if !dup {
            out.push(Halfspace { normal, offset });
        }
    }
    out
}

/// Affine rank of a point set.
pub fn affine_rank(points: &[Vec<f64>]) -> usize {
    let Some(base) = points.first() else { return 0 };
    let n = base.len();
    if points.len() < 2 {
        return 0;
    }
    let m = DMatrix::from_fn(points.len() - 1, n, |r, c| points[r + 1][c] - base[c]);
    let scale = m.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
    m.rank(1e-9 * scale)
}
