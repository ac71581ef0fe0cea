//! Discrete measures: mass queries against half-spaces and cones,
//! bisecting hyperplanes, projections along a direction, barycenters.
//!
//! Atoms lying on a cutting hyperplane (within [`BOUNDARY_TOL`]) contribute
//! half their weight to each side. This stands in for the requirement that
//! the measure give no mass to hyperplanes, which a finite cloud cannot meet.

use nalgebra::DVector;
use rand::Rng;

use crate::error::{check_dim, Result, SantaloError};
use crate::field::GridDensity;
use crate::geometry::{check_ambient, AffineFrame, Point, SimplicialCone};
use crate::sampling;

/// Atoms closer than this to a hyperplane count as lying on it.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// Finitely many weighted atoms in `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPointCloud {
    dim: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
    total_mass: f64,
}

impl WeightedPointCloud {
    /// `coords` holds the atoms back to back (`dim` values each).
    pub fn new(dim: usize, coords: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        check_ambient(dim)?;
        if weights.is_empty() {
            return Err(SantaloError::EmptySupport);
        }
        if coords.len() != dim * weights.len() {
            return Err(SantaloError::invalid("coordinate count != dim * atom count"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(SantaloError::invalid("atom coordinates must be finite"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(SantaloError::invalid("atom weights must be positive"));
        }
        Ok(Self::new_unchecked(dim, coords, weights))
    }

    pub(crate) fn new_unchecked(dim: usize, coords: Vec<f64>, weights: Vec<f64>) -> Self {
        let total_mass = weights.iter().sum();
        Self {
            dim,
            coords,
            weights,
            total_mass,
        }
    }

    pub fn from_points(points: &[Point], weights: Vec<f64>) -> Result<Self> {
        let dim = points.first().map_or(0, |p| p.len());
        let mut coords = Vec::with_capacity(dim * points.len());
        for p in points {
            check_dim(dim, p.len())?;
            coords.extend(p.iter());
        }
        Self::new(dim, coords, weights)
    }

    /// Equal weights `1/N`.
    pub fn uniform(points: Vec<Point>) -> Result<Self> {
        let w = 1.0 / points.len().max(1) as f64;
        let n = points.len();
        Self::from_points(&points, vec![w; n])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    pub fn translated(&self, by: &[f64]) -> Self {
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, c)| c + by[i % self.dim])
            .collect();
        Self::new_unchecked(self.dim, coords, self.weights.clone())
    }

    /// Largest distance from the barycenter to an atom.
    pub fn bounding_radius(&self) -> f64 {
        let b = self.barycenter();
        self.points()
            .map(|p| p.iter().zip(b.iter()).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Moves every coordinate by a seeded uniform perturbation of magnitude
    /// `1e-9` times the bounding radius, breaking exact ties.
    pub fn jittered(&self, seed: u64) -> Self {
        let scale = 1e-9 * self.bounding_radius().max(f64::MIN_POSITIVE);
        let mut rng = sampling::rng(seed);
        let coords = self
            .coords
            .iter()
            .map(|c| c + scale * rng.gen_range(-1.0..=1.0))
            .collect();
        Self::new_unchecked(self.dim, coords, self.weights.clone())
    }

    /// Mass-weighted mean of the atoms.
    pub fn barycenter(&self) -> Point {
        let mut b = DVector::zeros(self.dim);
        for (p, w) in self.points().zip(&self.weights) {
            for k in 0..self.dim {
                b[k] += w * p[k];
            }
        }
        b / self.total_mass
    }

    /// Mass strictly on one side of `{ normal . x = offset }`, plus half the
    /// mass on it.
    pub fn halfspace_mass(&self, normal: &[f64], offset: f64, side: Side) -> Result<f64> {
        check_dim(self.dim, normal.len())?;
        if normal.iter().all(|&c| c == 0.0) {
            return Err(SantaloError::ZeroNormal);
        }
        let tol = BOUNDARY_TOL * offset.abs().max(1.0);
        let mut mass = 0.0;
        for (p, w) in self.points().zip(&self.weights) {
            let d = dot(normal, p) - offset;
            if d.abs() <= tol {
                mass += 0.5 * w;
            } else if (d > 0.0) == (side == Side::Plus) {
                mass += w;
            }
        }
        Ok(mass)
    }

    /// Offset of a hyperplane with the given normal splitting the mass in
    /// half: the weighted median of `normal . x`, taking the midpoint of the
    /// median interval when it is not unique.
    pub fn bisecting_offset(&self, normal: &[f64]) -> Result<f64> {
        check_dim(self.dim, normal.len())?;
        if normal.iter().all(|&c| c == 0.0) {
            return Err(SantaloError::ZeroNormal);
        }
        let mut items: Vec<(f64, f64)> = self
            .points()
            .zip(&self.weights)
            .map(|(p, &w)| (dot(normal, p), w))
            .collect();
        Ok(weighted_median(&mut items))
    }

    /// Maps the atoms on one side of the hyperplane `frame` onto it along
    /// `v`, in frame coordinates. The plus side is the one `v` points into.
    pub fn project_along(&self, v: &[f64], frame: &AffineFrame, side: Side) -> Result<Self> {
        check_dim(self.dim, v.len())?;
        check_dim(self.dim, frame.ambient_dim())?;
        if self.dim < 2 {
            return Err(SantaloError::UnsupportedDimension(self.dim));
        }
        let u = frame.unit_normal()?;
        let vu = dot(v, u.as_slice());
        let vn = dot(v, v).sqrt();
        if vu.abs() <= 1e-9 * vn {
            return Err(SantaloError::DirectionInHyperplane);
        }
        let origin = frame.origin().as_slice();
        let tol = BOUNDARY_TOL * dot(origin, u.as_slice()).abs().max(1.0);
        let low = self.dim - 1;
        let mut coords = Vec::new();
        let mut weights = Vec::new();
        let mut shifted = vec![0.0; self.dim];
        for (p, &w) in self.points().zip(&self.weights) {
            let h: f64 = (0..self.dim).map(|k| (p[k] - origin[k]) * u[k]).sum();
            let tau = h / vu;
            let weight = if h.abs() <= tol {
                0.5 * w
            } else if (tau > 0.0) == (side == Side::Plus) {
                w
            } else {
                continue;
            };
            for k in 0..self.dim {
                shifted[k] = p[k] - tau * v[k] - origin[k];
            }
            for a in frame.axes().iter().take(low) {
                coords.push(dot(a.as_slice(), &shifted));
            }
            weights.push(weight);
        }
        if weights.is_empty() {
            return Err(SantaloError::EmptySupport);
        }
        Ok(Self::new_unchecked(low, coords, weights))
    }

    /// Total weight of atoms inside the cone (coefficient tolerance `tol`).
    pub fn cone_mass(&self, cone: &SimplicialCone, tol: f64) -> f64 {
        if cone.dim() != self.dim {
            return 0.0;
        }
        self.points()
            .zip(&self.weights)
            .filter(|(p, _)| cone.contains_slice(p, tol))
            .map(|(_, w)| w)
            .sum()
    }
}

/// One atom per positive cell, at the cell center, with weight
/// `value * cell volume`.
pub fn cloud_from_grid(density: &GridDensity) -> Result<WeightedPointCloud> {
    let vol = density.cell_volume();
    let dim = density.dim();
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    let mut x = vec![0.0; dim];
    for (i, &v) in density.values().iter().enumerate() {
        if v > 0.0 {
            density.cell_center_into(i, &mut x);
            coords.extend_from_slice(&x);
            weights.push(v * vol);
        }
    }
    if weights.is_empty() {
        return Err(SantaloError::EmptySupport);
    }
    WeightedPointCloud::new(dim, coords, weights)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Weighted median of `(value, weight)` pairs; midpoint of the median
/// interval when the cumulative weight hits exactly half. Sorts in place.
pub(crate) fn weighted_median(items: &mut [(f64, f64)]) -> f64 {
    items.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = items.iter().map(|p| p.1).sum();
    let half = 0.5 * total;
    let eps = 1e-12 * total;
    let mut cum = 0.0;
    let mut i = 0;
    while i < items.len() {
        let v = items[i].0;
        let mut j = i;
        while j < items.len() && items[j].0 == v {
            cum += items[j].1;
            j += 1;
        }
        if cum >= half - eps {
            if (cum - half).abs() <= eps && j < items.len() {
                return 0.5 * (v + items[j].0);
            }
            return v;
        }
        i = j;
    }
    items.last().map_or(0.0, |p| p.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{BoxBounds, ScalarField};
    use crate::geometry::{point, YaoYaoTree};
    use approx::assert_abs_diff_eq;

    pub(crate) fn step_cloud() -> WeightedPointCloud {
        let b = BoxBounds::new(vec![-2.0], vec![1.0]).unwrap();
        let f = ScalarField::from_fn(b, vec![3000], |x| if x[0] < 0.0 { 1.0 } else { 4.0 }).unwrap();
        cloud_from_grid(&f).unwrap()
    }

    fn cloud(dim: usize, pts: &[f64]) -> WeightedPointCloud {
        let n = pts.len() / dim;
        WeightedPointCloud::new(dim, pts.to_vec(), vec![1.0; n]).unwrap()
    }

    #[test]
    fn uniform_grid_cloud() {
        let b = BoxBounds::new(vec![0.0], vec![1.0]).unwrap();
        let f = ScalarField::new(b, vec![100], vec![1.0; 100]).unwrap();
        let c = cloud_from_grid(&f).unwrap();
        assert_eq!(c.len(), 100);
        assert_abs_diff_eq!(c.total_mass(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn step_density_masses() {
        let c = step_cloud();
        assert_abs_diff_eq!(c.total_mass(), 6.0, epsilon = 1e-3);
        assert_abs_diff_eq!(c.halfspace_mass(&[1.0], 0.0, Side::Minus).unwrap(), 2.0, epsilon = 1e-3);
        assert_abs_diff_eq!(c.halfspace_mass(&[1.0], 0.0, Side::Plus).unwrap(), 4.0, epsilon = 1e-3);
        // cumulative mass 3 reached at 4t = 1
        assert_abs_diff_eq!(c.bisecting_offset(&[1.0]).unwrap(), 0.25, epsilon = 1e-3);
        assert_abs_diff_eq!(c.barycenter()[0], 0.0, epsilon = 1e-3);
    }

    #[test]
    fn zero_grid_has_empty_support() {
        let b = BoxBounds::new(vec![0.0], vec![1.0]).unwrap();
        let f = ScalarField::new(b, vec![4], vec![0.0; 4]).unwrap();
        assert!(matches!(cloud_from_grid(&f), Err(SantaloError::EmptySupport)));
    }

    #[test]
    fn half_counting() {
        let c = cloud(2, &[1.0, 0.0, -1.0, 0.0]);
        assert_eq!(c.halfspace_mass(&[1.0, 0.0], 0.0, Side::Plus).unwrap(), 1.0);
        let c = WeightedPointCloud::new(1, vec![0.0], vec![3.0]).unwrap();
        assert_eq!(c.halfspace_mass(&[1.0], 0.0, Side::Plus).unwrap(), 1.5);
        assert_eq!(c.halfspace_mass(&[1.0], 0.0, Side::Minus).unwrap(), 1.5);
        assert!(matches!(
            c.halfspace_mass(&[0.0], 0.0, Side::Plus),
            Err(SantaloError::ZeroNormal)
        ));
    }

    #[test]
    fn median_interval_midpoint() {
        let c = cloud(1, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(c.bisecting_offset(&[1.0]).unwrap(), 2.5);
        let c = cloud(1, &[-3.0, -0.5, 0.5, 3.0]);
        assert_eq!(c.bisecting_offset(&[1.0]).unwrap(), 0.0);
    }

    #[test]
    fn orthogonal_projection() {
        let c = cloud(2, &[0.5, 2.0, -1.0, 3.0, 4.0, -1.0]);
        let f = AffineFrame::standard(2).hyperplane(0.0).unwrap();
        let p = c.project_along(&[0.0, 1.0], &f, Side::Plus).unwrap();
        assert_eq!(p.coords(), &[0.5, -1.0]);
    }

    #[test]
    fn oblique_projection() {
        // x - x_2 * v with v = (1,1)
        let c = cloud(2, &[0.0, 1.0, 2.0, 1.0]);
        let f = AffineFrame::standard(2).hyperplane(0.0).unwrap();
        let p = c.project_along(&[1.0, 1.0], &f, Side::Plus).unwrap();
        assert_eq!(p.coords(), &[-1.0, 1.0]);
        assert!(matches!(
            c.project_along(&[1.0, 1.0], &f, Side::Minus),
            Err(SantaloError::DirectionInHyperplane | SantaloError::EmptySupport)
        ));
        assert!(matches!(
            c.project_along(&[1.0, 0.0], &f, Side::Plus),
            Err(SantaloError::DirectionInHyperplane)
        ));
    }

    #[test]
    fn symmetric_quadrant_masses() {
        let c = cloud(2, &[1.0, 1.0, -1.0, 1.0, 1.0, -1.0, -1.0, -1.0]);
        let t = YaoYaoTree::orthants(Point::zeros(2)).unwrap();
        for cone in t.leaf_cones().unwrap() {
            assert_eq!(c.cone_mass(&cone, 0.0), 1.0);
        }
        let first = &t.leaf_cones().unwrap()[3];
        let lone = cloud(2, &[-1.0, -1.0]);
        assert_eq!(lone.cone_mass(first, 0.0), 0.0);
    }

    #[test]
    fn disc_quadrant_concentration() {
        let c = sampling::uniform_ball_cloud(2, 4096, 17);
        let t = YaoYaoTree::orthants(Point::zeros(2)).unwrap();
        let q = &t.leaf_cones().unwrap()[3];
        let atoms = c.cone_mass(q, 0.0) * 4096.0;
        assert!((atoms - 1024.0).abs() <= 64.0, "{atoms}");
    }

    #[test]
    fn barycenter_weighted() {
        let c = WeightedPointCloud::new(2, vec![0.0, 0.0, 3.0, 0.0], vec![1.0, 2.0]).unwrap();
        assert_eq!(c.barycenter(), point(&[2.0, 0.0]));
        let single = WeightedPointCloud::new(2, vec![1.5, -2.0], vec![0.3]).unwrap();
        assert_eq!(single.barycenter(), point(&[1.5, -2.0]));
    }

    #[test]
    fn jitter_is_tiny_and_seeded() {
        let c = sampling::uniform_ball_cloud(3, 100, 1);
        let j = c.jittered(5);
        assert_eq!(j, c.jittered(5));
        let d = c.coords().iter().zip(j.coords()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(d > 0.0 && d < 1e-8);
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn arb_cloud() -> impl Strategy<Value = WeightedPointCloud> {
        (1usize..=3).prop_flat_map(|dim| {
            (1usize..40).prop_flat_map(move |n| {
                (
                    proptest::collection::vec(-10.0f64..10.0, dim * n),
                    proptest::collection::vec(0.01f64..5.0, n),
                )
                    .prop_map(move |(c, w)| WeightedPointCloud::new(dim, c, w).unwrap())
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sides_add_up(c in arb_cloud(), off in -5.0f64..5.0, seed in 0u64..1000) {
            let normal = sampling::unit_vector(&mut sampling::rng(seed), c.dim());
            let p = c.halfspace_mass(normal.as_slice(), off, Side::Plus).unwrap();
            let m = c.halfspace_mass(normal.as_slice(), off, Side::Minus).unwrap();
            prop_assert!((p + m - c.total_mass()).abs() <= 1e-12 * c.total_mass());
        }

        #[test]
        fn bisection_within_half_atom(c in arb_cloud(), seed in 0u64..1000) {
            let normal = sampling::unit_vector(&mut sampling::rng(seed), c.dim());
            let t = c.bisecting_offset(normal.as_slice()).unwrap();
            let m = c.halfspace_mass(normal.as_slice(), t, Side::Minus).unwrap();
            prop_assert!((m - 0.5 * c.total_mass()).abs() <= 0.5 * c.max_weight() + 1e-9);
        }

        #[test]
        fn barycenter_translates(c in arb_cloud(), a in proptest::collection::vec(-3.0f64..3.0, 3)) {
            let a = &a[..c.dim()];
            let moved = c.translated(a).barycenter();
            let expect = c.barycenter() + DVector::from_column_slice(a);
            prop_assert!((moved - expect).amax() < 1e-9);
        }

        #[test]
        fn projection_preserves_side_mass(c in arb_cloud(), seed in 0u64..1000) {
            prop_assume!(c.dim() >= 2);
            let mut rng = sampling::rng(seed);
            let frame = AffineFrame::standard(c.dim()).hyperplane(0.3).unwrap();
            let mut v = sampling::gaussian_vector(&mut rng, c.dim());
            v[c.dim() - 1] = 1.0;
            let mut e = vec![0.0; c.dim()];
            e[c.dim() - 1] = 1.0;
            for side in [Side::Plus, Side::Minus] {
                let mass = c.halfspace_mass(&e, 0.3, side).unwrap();
                match c.project_along(v.as_slice(), &frame, side) {
                    Ok(p) => prop_assert!((p.total_mass() - mass).abs() <= 1e-12 * c.total_mass()),
                    Err(SantaloError::EmptySupport) => prop_assert!(mass == 0.0),
                    Err(e) => prop_assert!(false, "{e}"),
                }
            }
        }
    }
}
