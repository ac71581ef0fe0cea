//! Points, affine frames, simplicial cones and their duals, Yao-Yao trees.

mod checks;
mod tree;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Result, SantaloError};

pub use checks::{dual_partition_check, partition_cover_check};
pub use tree::{LocalSplit, Node, YaoYaoTree};

/// A point (or vector) of `R^n`.
pub type Point = DVector<f64>;

/// Largest ambient dimension accepted by the verification routines.
pub const MAX_DIM: usize = 8;
/// Generator matrices with `|det|` at or below this are rejected.
pub const DET_EPS: f64 = 1e-12;
/// Default membership tolerance on cone coefficients.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Radius of the sampling ball used by partition checks.
pub const SAMPLE_RADIUS: f64 = 10.0;

const ORTHO_TOL: f64 = 1e-12;

pub fn point(coords: &[f64]) -> Point {
    DVector::from_column_slice(coords)
}

pub(crate) fn check_ambient(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(SantaloError::UnsupportedDimension(dim));
    }
    Ok(())
}

/// Origin plus orthonormal axes spanning an affine subspace of `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineFrame {
    origin: Point,
    axes: Vec<Point>,
}

impl AffineFrame {
    pub fn new(origin: Point, axes: Vec<Point>) -> Result<Self> {
        let n = origin.len();
        if axes.len() > n {
            return Err(SantaloError::invalid("frame has more axes than ambient dimension"));
        }
        for (i, a) in axes.iter().enumerate() {
            check_dim(n, a.len())?;
            if (a.norm() - 1.0).abs() > ORTHO_TOL {
                return Err(SantaloError::invalid(format!("frame axis {i} is not unit")));
            }
            for b in &axes[..i] {
                if a.dot(b).abs() > ORTHO_TOL {
                    return Err(SantaloError::invalid("frame axes are not orthogonal"));
                }
            }
        }
        Ok(Self { origin, axes })
    }

    /// Frame at the origin with the standard basis of `R^dim`.
    pub fn standard(dim: usize) -> Self {
        let axes = (0..dim).map(|i| Point::from_fn(dim, |j, _| f64::from(u8::from(i == j)))).collect();
        Self {
            origin: Point::zeros(dim),
            axes,
        }
    }

    pub fn origin(&self) -> &Point {
        &self.origin
    }

    pub fn axes(&self) -> &[Point] {
        &self.axes
    }

    /// Dimension of the spanned affine subspace.
    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.origin.len()
    }

    pub fn last_axis(&self) -> Option<&Point> {
        self.axes.last()
    }

    /// Ambient point with the given frame coordinates.
    pub fn to_ambient(&self, coords: &[f64]) -> Point {
        let mut p = self.origin.clone();
        for (a, &c) in self.axes.iter().zip(coords) {
            p.axpy(c, a, 1.0);
        }
        p
    }

    /// Ambient vector with the given frame components (no origin shift).
    pub fn vector_to_ambient(&self, coords: &[f64]) -> Point {
        let mut v = Point::zeros(self.ambient_dim());
        for (a, &c) in self.axes.iter().zip(coords) {
            v.axpy(c, a, 1.0);
        }
        v
    }

    /// Frame coordinates of the orthogonal projection of `x` onto the subspace.
    pub fn coords_of(&self, x: &Point) -> Vec<f64> {
        let d = x - &self.origin;
        self.axes.iter().map(|a| a.dot(&d)).collect()
    }

    /// The hyperplane `{ last coordinate = offset }` of this frame, framed by
    /// the remaining axes.
    pub fn hyperplane(&self, offset: f64) -> Result<Self> {
        let last = self
            .last_axis()
            .ok_or_else(|| SantaloError::invalid("a point has no hyperplane"))?;
        Ok(Self {
            origin: &self.origin + last * offset,
            axes: self.axes[..self.axes.len() - 1].to_vec(),
        })
    }

    /// Unit normal of a hyperplane frame (one axis short of the ambient
    /// dimension), completed from the standard basis.
    pub fn unit_normal(&self) -> Result<Point> {
        let n = self.ambient_dim();
        if self.dim() + 1 != n {
            return Err(SantaloError::invalid("frame is not a hyperplane"));
        }
        let mut best: Option<Point> = None;
        for i in 0..n {
            let mut e = Point::zeros(n);
            e[i] = 1.0;
            for a in &self.axes {
                let c = a.dot(&e);
                e.axpy(-c, a, 1.0);
            }
            if best.as_ref().is_none_or(|b| e.norm() > b.norm()) {
                best = Some(e);
            }
        }
        let e = best.expect("n >= 1");
        Ok(&e / e.norm())
    }

    /// Distance from `x` to the affine span of the frame.
    pub fn distance_to_span(&self, x: &Point) -> f64 {
        let d = x - &self.origin;
        self.residual(&d).norm()
    }

    /// Component of the vector `v` orthogonal to the span of the axes.
    pub fn residual(&self, v: &Point) -> Point {
        let mut r = v.clone();
        for a in &self.axes {
            let c = a.dot(&r);
            r.axpy(-c, a, 1.0);
        }
        r
    }

    pub fn translated(&self, by: &Point) -> Self {
        Self {
            origin: &self.origin + by,
            axes: self.axes.clone(),
        }
    }
}

/// `apex + pos(v_1, ..., v_n)` for a basis `v_1..v_n` (the matrix columns).
#[derive(Clone, Debug)]
pub struct SimplicialCone {
    apex: Point,
    generators: DMatrix<f64>,
    inverse: DMatrix<f64>,
    det: f64,
}

impl SimplicialCone {
    pub fn apex(&self) -> &Point {
        &self.apex
    }

    /// Generator matrix, one generator per column, as given (unnormalized).
    pub fn generators(&self) -> &DMatrix<f64> {
        &self.generators
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn dim(&self) -> usize {
        self.apex.len()
    }

    /// Coefficients `lambda` with `generators * lambda = x - apex`.
    pub fn coefficients(&self, x: &[f64]) -> DVector<f64> {
        let n = self.dim();
        DVector::from_fn(n, |i, _| {
            (0..n)
                .map(|j| self.inverse[(i, j)] * (x[j] - self.apex[j]))
                .sum()
        })
    }

    /// Membership with tolerance on the coefficients; no dimension check.
    pub fn contains_slice(&self, x: &[f64], tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            let l: f64 = (0..n)
                .map(|j| self.inverse[(i, j)] * (x[j] - self.apex[j]))
                .sum();
            l >= -tol
        })
    }

    /// True when every coefficient exceeds `tol` (strict interior).
    pub fn interior_contains_slice(&self, x: &[f64], tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            let l: f64 = (0..n)
                .map(|j| self.inverse[(i, j)] * (x[j] - self.apex[j]))
                .sum();
            l > tol
        })
    }

    pub fn contains(&self, x: &Point, tol: f64) -> Result<bool> {
        check_dim(self.dim(), x.len())?;
        Ok(self.contains_slice(x.as_slice(), tol))
    }

    /// The same cone with apex moved to the origin.
    pub fn at_origin(&self) -> Self {
        Self {
            apex: Point::zeros(self.dim()),
            ..self.clone()
        }
    }

    /// Generator matrix scaled by one positive scalar so that `|det| = 1`.
    pub fn unimodular_generators(&self) -> DMatrix<f64> {
        let n = self.dim() as f64;
        &self.generators / self.det.abs().powf(1.0 / n)
    }

    pub fn dual(&self) -> Result<Self> {
        dual_cone(self)
    }
}

pub fn cone_from_basis(apex: Point, generators: DMatrix<f64>) -> Result<SimplicialCone> {
    let n = apex.len();
    if generators.nrows() != n || generators.ncols() != n {
        return Err(SantaloError::DimensionMismatch {
            expected: n,
            got: generators.ncols().max(generators.nrows()),
        });
    }
    let lu = generators.clone().lu();
    let det = lu.determinant();
    if !(det.abs() > DET_EPS) {
        return Err(SantaloError::DegenerateBasis { det });
    }
    let inverse = lu.try_inverse().ok_or(SantaloError::DegenerateBasis { det })?;
    Ok(SimplicialCone {
        apex,
        generators,
        inverse,
        det,
    })
}

/// Cone from generator vectors given as separate columns.
pub fn cone_from_columns(apex: Point, columns: &[Point]) -> Result<SimplicialCone> {
    let n = apex.len();
    for c in columns {
        check_dim(n, c.len())?;
    }
    if columns.len() != n {
        return Err(SantaloError::DimensionMismatch {
            expected: n,
            got: columns.len(),
        });
    }
    cone_from_basis(apex, DMatrix::from_columns(columns))
}

pub fn cone_contains(cone: &SimplicialCone, x: &Point, tol: f64) -> Result<bool> {
    cone.contains(x, tol)
}

/// Dual cone `{ y : x.y >= 0 for all x in C }`, generated by the columns of
/// the inverse-transpose of the generator matrix.
pub fn dual_cone(cone: &SimplicialCone) -> Result<SimplicialCone> {
    if cone.apex.norm() > DET_EPS {
        return Err(SantaloError::NonZeroApex);
    }
    let s = cone.inverse.transpose();
    cone_from_basis(Point::zeros(cone.dim()), s)
}

/// `l(x) = normal . x + offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineForm {
    normal: Point,
    offset: f64,
}

impl AffineForm {
    pub fn new(normal: Point, offset: f64) -> Result<Self> {
        if normal.iter().all(|&c| c == 0.0) {
            return Err(SantaloError::ZeroNormal);
        }
        Ok(Self { normal, offset })
    }

    /// The form with the given normal vanishing at `at`.
    pub fn centered(normal: Point, at: &Point) -> Result<Self> {
        let offset = -normal.dot(at);
        Self::new(normal, offset)
    }

    pub fn normal(&self) -> &Point {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn eval(&self, x: &Point) -> f64 {
        self.normal.dot(x) + self.offset
    }
}
