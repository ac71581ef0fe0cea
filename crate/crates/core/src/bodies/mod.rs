//! Convex polytopes, polar bodies, volumes and Santalo points.

mod hull;

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

pub use hull::{affine_rank, facets, hull_2d, Halfspace};

use crate::certificate::Certificate;
use crate::error::{Result, SantaloError};
use crate::field::{BoxBounds, ScalarField};
use crate::geometry::MAX_DIM;
use crate::inequalities::{santalo_verify, unit_ball_volume, weight_integral, PolarKernel, RadialWeight};
use crate::measures::dot;
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::sampling;

/// Origin must clear every facet by this much to count as interior.
pub const INTERIOR_MARGIN: f64 = 1e-9;

/// The convex hull of finitely many points, kept as its vertex list with
/// the facet description computed alongside.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolytope {
    vertices: Vec<Vec<f64>>,
    halfspaces: Vec<Halfspace>,
}

impl ConvexPolytope {
    /// Hull of `points`; non-extreme points are dropped.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let n = points.first().map_or(0, Vec::len);
        if n == 0 || n > MAX_DIM {
            return Err(SantaloError::UnsupportedDimension(n));
        }
        if points.iter().any(|p| p.len() != n || p.iter().any(|v| !v.is_finite())) {
            return Err(SantaloError::invalid("vertices must be finite points of one dimension"));
        }
        if n == 1 {
            let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            if !(hi > lo) {
                return Err(SantaloError::DegenerateBody("segment has zero length".into()));
            }
            return Ok(Self {
                vertices: vec![vec![lo], vec![hi]],
                halfspaces: vec![
                    Halfspace { normal: vec![-1.0], offset: -lo },
                    Halfspace { normal: vec![1.0], offset: hi },
                ],
            });
        }
        if points.len() < n + 1 || affine_rank(&points) < n {
            return Err(SantaloError::DegenerateBody(format!(
                "needs {} affinely independent vertices in dimension {n}",
                n + 1
            )));
        }
        let halfspaces = facets(&points);
        let tol = 1e-10 * scale_of(&points);
        let vertices: Vec<Vec<f64>> = if n == 2 {
            hull_2d(&points).into_iter().map(|i| points[i].clone()).collect()
        } else {
            // a vertex lies on at least n facets
            let mut kept: Vec<Vec<f64>> = Vec::new();
            for p in points {
                let tight = halfspaces.iter().filter(|h| h.slack(&p).abs() <= tol).count();
                if tight >= n && !kept.iter().any(|q| q == &p) {
                    kept.push(p);
                }
            }
            kept
        };
        Ok(Self { vertices, halfspaces })
    }

    /// `[-h, h]^n`.
    pub fn cube(n: usize, half: f64) -> Result<Self> {
        let pts = (0..1usize << n)
            .map(|i| (0..n).map(|k| if (i >> k) & 1 == 1 { half } else { -half }).collect())
            .collect();
        Self::new(pts)
    }

    /// Regular `k`-gon inscribed in the circle of radius `r`, first vertex on
    /// the positive x-axis.
    pub fn regular_polygon(k: usize, r: f64) -> Result<Self> {
        let pts = (0..k)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / k as f64;
                vec![r * a.cos(), r * a.sin()]
            })
            .collect();
        Self::new(pts)
    }

    /// Hull of `count` seeded points with radius in `[0.5, 1.5]` around
    /// the origin.
    pub fn random(n: usize, count: usize, seed: u64) -> Result<Self> {
        let mut rng = sampling::rng(seed);
        let pts = (0..count)
            .map(|_| {
                let u = sampling::unit_vector(&mut rng, n);
                let r = rng.gen_range(0.5..1.5);
                u.iter().map(|v| v * r).collect()
            })
            .collect();
        Self::new(pts)
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.halfspaces.iter().all(|h| h.slack(x) >= -tol)
    }

    /// Average of the vertices (an interior point).
    pub fn vertex_centroid(&self) -> Vec<f64> {
        let n = self.dim();
        let k = self.vertices.len() as f64;
        (0..n).map(|c| self.vertices.iter().map(|v| v[c]).sum::<f64>() / k).collect()
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.dim();
        let lo = (0..n).map(|c| self.vertices.iter().map(|v| v[c]).fold(f64::INFINITY, f64::min)).collect();
        let hi = (0..n).map(|c| self.vertices.iter().map(|v| v[c]).fold(f64::NEG_INFINITY, f64::max)).collect();
        (lo, hi)
    }

    pub fn translated(&self, by: &[f64]) -> Self {
        Self {
            vertices: self
                .vertices
                .iter()
                .map(|v| v.iter().zip(by).map(|(a, b)| a + b).collect())
                .collect(),
            halfspaces: self
                .halfspaces
                .iter()
                .map(|h| Halfspace {
                    normal: h.normal.clone(),
                    offset: h.offset + dot(&h.normal, by),
                })
                .collect(),
        }
    }

    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        Self::new(self.vertices.iter().map(|v| v.iter().map(|x| x * alpha).collect()).collect())
    }

    /// Smallest facet clearance of `z` (positive inside).
    pub fn depth(&self, z: &[f64]) -> f64 {
        self.halfspaces.iter().map(|h| h.slack(z)).fold(f64::INFINITY, f64::min)
    }
}

fn scale_of(points: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .flat_map(|p| p.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1e-300)
}

/// `{ x : v . x <= 1 for every vertex v }`, with vertices `a / b` for the
/// facets `a . x <= b` of `P`.
pub fn polar_polytope(p: &ConvexPolytope) -> Result<ConvexPolytope> {
    if p.depth(&vec![0.0; p.dim()]) <= INTERIOR_MARGIN {
        return Err(SantaloError::OriginNotInterior);
    }
    ConvexPolytope::new(
        p.halfspaces()
            .iter()
            .map(|h| h.normal.iter().map(|a| a / h.offset).collect())
            .collect(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VolumeMethod {
    Exact2d,
    Exact3d,
    MonteCarlo,
}

pub fn polytope_volume(p: &ConvexPolytope, method: VolumeMethod, samples: usize, seed: u64) -> Result<f64> {
    match method {
        VolumeMethod::Exact2d => {
            if p.dim() != 2 {
                return Err(SantaloError::UnsupportedDimension(p.dim()));
            }
            Ok(shoelace(p.vertices()))
        }
        VolumeMethod::Exact3d => {
            if p.dim() != 3 {
                return Err(SantaloError::UnsupportedDimension(p.dim()));
            }
            Ok(fan_volume_3d(p))
        }
        VolumeMethod::MonteCarlo => Ok(monte_carlo_volume(p, samples, seed).0),
    }
}

/// Exact volume where available (dimension <= 3).
pub fn exact_volume(p: &ConvexPolytope) -> Result<f64> {
    match p.dim() {
        1 => Ok(p.vertices()[1][0] - p.vertices()[0][0]),
        2 => polytope_volume(p, VolumeMethod::Exact2d, 0, 0),
        3 => polytope_volume(p, VolumeMethod::Exact3d, 0, 0),
        n => Err(SantaloError::UnsupportedDimension(n)),
    }
}

fn shoelace(v: &[Vec<f64>]) -> f64 {
    let k = v.len();
    0.5 * (0..k)
        .map(|i| {
            let (a, b) = (&v[i], &v[(i + 1) % k]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        .abs()
}

fn fan_volume_3d(p: &ConvexPolytope) -> f64 {
    let c = p.vertex_centroid();
    let tol = 1e-10 * scale_of(p.vertices());
    let mut vol = 0.0;
    for h in p.halfspaces() {
        let face: Vec<&Vec<f64>> = p.vertices().iter().filter(|v| h.slack(v).abs() <= tol).collect();
        let fc: Vec<f64> = (0..3).map(|k| face.iter().map(|v| v[k]).sum::<f64>() / face.len() as f64).collect();
        // in-plane basis
        let a = &h.normal;
        let helper = if a[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let u = normalize(cross3(a, &helper));
        let w = cross3(a, &u);
        let mut ring: Vec<(f64, &Vec<f64>)> = face
            .iter()
            .map(|v| {
                let d: Vec<f64> = (0..3).map(|k| v[k] - fc[k]).collect();
                (dot(&d, &w).atan2(dot(&d, &u)), *v)
            })
            .collect();
        ring.sort_by(|x, y| x.0.total_cmp(&y.0));
        for i in 0..ring.len() {
            let (p1, p2) = (ring[i].1, ring[(i + 1) % ring.len()].1);
            vol += tetra_volume(&c, &fc, p1, p2);
        }
    }
    vol
}

fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = dot(&v, &v).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn tetra_volume(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> f64 {
    let u: Vec<f64> = (0..3).map(|k| b[k] - a[k]).collect();
    let v: Vec<f64> = (0..3).map(|k| c[k] - a[k]).collect();
    let w: Vec<f64> = (0..3).map(|k| d[k] - a[k]).collect();
    dot(&u, &cross3(&v, &w)).abs() / 6.0
}

/// Hit fraction of the bounding box; returns the estimate and its
/// standard error.
pub fn monte_carlo_volume(p: &ConvexPolytope, samples: usize, seed: u64) -> (f64, f64) {
    let (lo, hi) = p.bounding_box();
    let box_vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let mut rng = sampling::rng(seed);
    let mut x = vec![0.0; p.dim()];
    let mut hits = 0usize;
    let samples = samples.max(1);
    for _ in 0..samples {
        for k in 0..x.len() {
            x[k] = rng.gen_range(lo[k]..hi[k]);
        }
        if p.contains(&x, 0.0) {
            hits += 1;
        }
    }
    let frac = hits as f64 / samples as f64;
    (box_vol * frac, box_vol * (frac * (1.0 - frac) / samples as f64).sqrt())
}

/// Face structure of `(P - z)°` in 3D, which does not depend on `z`: the
/// polar facet dual to each vertex of `P`, as the cyclically ordered
/// indices of the facets of `P` through that vertex.
struct PolarFaces {
    rings: Vec<Vec<usize>>,
}

impl PolarFaces {
    fn new(p: &ConvexPolytope) -> Self {
        let tol = 1e-10 * scale_of(p.vertices());
        let hs = p.halfspaces();
        let rings = p
            .vertices()
            .iter()
            .map(|v| {
                let ring: Vec<usize> = (0..hs.len()).filter(|&i| hs[i].slack(v).abs() <= tol).collect();
                // normals sorted by angle around their mean; positive
                // rescaling (the polar vertices) keeps this order
                let mut d = [0.0; 3];
                for &i in &ring {
                    for k in 0..3 {
                        d[k] += hs[i].normal[k];
                    }
                }
                let d = normalize(d);
                let helper = if d[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
                let u = normalize(cross3(&d, &helper));
                let w = cross3(&d, &u);
                let mut keyed: Vec<(f64, usize)> = ring
                    .iter()
                    .map(|&i| (dot(&hs[i].normal, &w).atan2(dot(&hs[i].normal, &u)), i))
                    .collect();
                keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
                keyed.into_iter().map(|(_, i)| i).collect()
            })
            .collect();
        Self { rings }
    }

    /// Fan of tetrahedra from the origin over every polar facet.
    fn volume(&self, p: &ConvexPolytope, z: &[f64]) -> f64 {
        let mut verts = Vec::with_capacity(p.halfspaces().len());
        for h in p.halfspaces() {
            let b = h.slack(z);
            if !(b > INTERIOR_MARGIN) {
                return f64::INFINITY;
            }
            verts.push(h.normal.iter().map(|a| a / b).collect::<Vec<f64>>());
        }
        let origin = [0.0; 3];
        self.rings
            .iter()
            .map(|ring| {
                (1..ring.len().saturating_sub(1))
                    .map(|k| tetra_volume(&origin, &verts[ring[0]], &verts[ring[k]], &verts[ring[k + 1]]))
                    .sum::<f64>()
            })
            .sum()
    }
}

/// `vol((P - z)°)` from the facets of `P`; `+inf` unless `z` is interior.
pub fn polar_volume_at(p: &ConvexPolytope, z: &[f64]) -> f64 {
    match p.dim() {
        3 => PolarFaces::new(p).volume(p, z),
        n => {
            let mut verts = Vec::with_capacity(p.halfspaces().len());
            for h in p.halfspaces() {
                let b = h.slack(z);
                if !(b > INTERIOR_MARGIN) {
                    return f64::INFINITY;
                }
                verts.push(h.normal.iter().map(|a| a / b).collect::<Vec<f64>>());
            }
            match n {
                1 => verts.iter().map(|v| v[0].abs()).sum(),
                // facets are listed in hull order, and so are the polar vertices
                2 => shoelace(&verts),
                _ => ConvexPolytope::new(verts)
                    .and_then(|q| exact_volume(&q))
                    .unwrap_or(f64::INFINITY),
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct SantaloPointOptions {
    pub starts: usize,
    pub seed: u64,
    /// Restart values must agree within this relative spread.
    pub agreement_tol: f64,
}

impl Default for SantaloPointOptions {
    fn default() -> Self {
        Self {
            starts: 5,
            seed: 0,
            agreement_tol: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SantaloPointReport {
    pub point: Vec<f64>,
    /// `vol((P - point)°)`.
    pub polar_volume: f64,
    pub restart_points: Vec<Vec<f64>>,
    pub restart_values: Vec<f64>,
    /// `(max - min) / min` over restarts.
    pub spread: f64,
    pub agreed: bool,
}

/// Minimizes `z -> vol((P - z)°)` by Nelder-Mead from seeded random
/// interior points.
pub fn santalo_point_body(p: &ConvexPolytope, opts: &SantaloPointOptions) -> Result<SantaloPointReport> {
    let n = p.dim();
    if n > 3 {
        return Err(SantaloError::UnsupportedDimension(n));
    }
    if opts.starts == 0 {
        return Err(SantaloError::invalid("at least one start is required"));
    }
    let (lo, hi) = p.bounding_box();
    let width = lo.iter().zip(&hi).map(|(a, b)| b - a).fold(f64::INFINITY, f64::min);
    let mut rng = sampling::rng(opts.seed);
    let nm = NelderMeadOptions {
        initial_step: 0.1 * width,
        max_evals: 4000,
        x_tol: 1e-12 * width,
        f_tol: 0.0,
    };
    let faces = (n == 3).then(|| PolarFaces::new(p));
    let objective = |z: &[f64]| match &faces {
        Some(f) => f.volume(p, z),
        None => polar_volume_at(p, z),
    };
    let mut points = Vec::new();
    let mut values = Vec::new();
    for _ in 0..opts.starts {
        let w: Vec<f64> = p.vertices().iter().map(|_| Exp1.sample(&mut rng)).collect();
        let total: f64 = w.iter().sum();
        let x0: Vec<f64> = (0..n)
            .map(|k| p.vertices().iter().zip(&w).map(|(v, wi)| v[k] * wi).sum::<f64>() / total)
            .collect();
        let mut m = nelder_mead(&objective, &x0, &nm);
        // one restart from the optimum clears premature simplex collapse
        let again = nelder_mead(&objective, &m.x, &nm);
        if again.value <= m.value {
            m = again;
        }
        points.push(m.x);
        values.push(m.value);
    }
    let best = (0..values.len()).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    let lo_v = values[best];
    let hi_v = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo_v.is_finite() {
        return Err(SantaloError::DegenerateBody("no interior start point found".into()));
    }
    let spread = (hi_v - lo_v) / lo_v;
    Ok(SantaloPointReport {
        point: points[best].clone(),
        polar_volume: lo_v,
        restart_points: points,
        restart_values: values,
        spread,
        agreed: spread <= opts.agreement_tol,
    })
}

/// Volume product `vol(P) vol((P - z)°)` against `v_n^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BodyCertificate {
    pub vol_k: f64,
    pub vol_polar: f64,
    pub product: f64,
    pub bound: f64,
    pub passed: bool,
    pub santalo_point: Vec<f64>,
}

pub fn blaschke_santalo_check(p: &ConvexPolytope, z: &[f64]) -> Result<BodyCertificate> {
    crate::error::check_dim(p.dim(), z.len())?;
    let shifted = p.translated(&z.iter().map(|v| -v).collect::<Vec<_>>());
    let polar = polar_polytope(&shifted)?;
    let (vol_k, vol_polar) = if p.dim() <= 3 {
        (exact_volume(p)?, exact_volume(&polar)?)
    } else {
        (monte_carlo_volume(p, 1_000_000, 0).0, monte_carlo_volume(&polar, 1_000_000, 1).0)
    };
    let product = vol_k * vol_polar;
    let bound = unit_ball_volume(p.dim()).powi(2);
    Ok(BodyCertificate {
        vol_k,
        vol_polar,
        product,
        bound,
        passed: product <= bound * (1.0 + 1e-6),
        santalo_point: z.to_vec(),
    })
}

fn grid_cells(n: usize) -> usize {
    match n {
        1 => 2000,
        2 => 100,
        _ => 22,
    }
}

/// The indicator route to the classical inequality at center `c`:
/// (a) the maximal polar of `1_P` is at least 1 on `(P - c)°`;
/// (b) `(int 1_[0,1](|x|) dx)^2 = v_n^2`;
/// (c) when the functional inequality holds for `(1_P, g°)`, the volume
/// product at `c` is at most `v_n^2`.
pub fn indicator_reduction_check(p: &ConvexPolytope, c: &[f64], samples: usize, seed: u64) -> Result<Certificate> {
    let n = p.dim();
    crate::error::check_dim(n, c.len())?;
    if n > 3 {
        return Err(SantaloError::UnsupportedDimension(n));
    }
    let shifted = p.translated(&c.iter().map(|v| -v).collect::<Vec<_>>());
    let polar = polar_polytope(&shifted)?;
    let rho = RadialWeight::IndicatorUnit;

    let (lo, hi) = p.bounding_box();
    let body = p.clone();
    let f = ScalarField::from_fn(BoxBounds::new(lo, hi)?, vec![grid_cells(n); n], move |x| {
        f64::from(u8::from(body.contains(x, 0.0)))
    })?;
    let kernel = PolarKernel::new(&f, c, &rho, None)?;

    // (a)
    let (plo, phi) = polar.bounding_box();
    let mut rng = sampling::rng(seed);
    let (mut tested, mut below, mut min_g) = (0usize, 0usize, f64::INFINITY);
    let mut y = vec![0.0; n];
    let mut draws = 0usize;
    while tested < samples && draws < 100 * samples.max(1) {
        draws += 1;
        for k in 0..n {
            y[k] = rng.gen_range(plo[k]..phi[k]);
        }
        if !polar.contains(&y, 0.0) {
            continue;
        }
        tested += 1;
        let g = kernel.value(&y);
        min_g = min_g.min(g);
        if g < 1.0 - 1e-12 {
            below += 1;
        }
    }
    let a_ok = below == 0 && tested > 0;

    // (b)
    let w = weight_integral(&rho, n)?;
    let vn2 = unit_ball_volume(n).powi(2);
    let b_ok = (w * w - vn2).abs() <= 1e-6 * vn2;

    // (c)
    let out_lo: Vec<f64> = plo.iter().map(|v| 1.1 * v).collect();
    let out_hi: Vec<f64> = phi.iter().map(|v| 1.1 * v).collect();
    let mut g = ScalarField::new(BoxBounds::new(out_lo, out_hi)?, vec![grid_cells(n); n], vec![0.0; grid_cells(n).pow(n as u32)])?;
    let values: Vec<f64> = (0..g.len()).map(|i| kernel.value(&g.cell_center(i))).collect();
    g = ScalarField::new(g.bounds().clone(), g.shape().to_vec(), values)?;
    let functional = santalo_verify(&f, &g, &rho)?;
    let body = blaschke_santalo_check(p, c)?;
    let implication_ok = !functional.passed || body.passed;

    let cert = Certificate::inequality(body.product, vn2, 1e-6 * vn2)
        .with("polar_samples", tested as f64)
        .with("polar_samples_below_one", below as f64)
        .with("min_polar_value", min_g)
        .with("weight_integral_squared", w * w)
        .with("unit_ball_volume_squared", vn2)
        .with("functional_lhs", functional.lhs)
        .with("functional_rhs", functional.rhs)
        .with("functional_passed", f64::from(u8::from(functional.passed)))
        .with("vol_k", body.vol_k)
        .with("vol_polar", body.vol_polar)
        .with("polar_cap", kernel.cap())
        .gate(a_ok, "polar_at_least_one")
        .gate(b_ok, "weight_matches_ball")
        .gate(implication_ok, "implication_ok");
    Ok(cert.note("functions are compared at grid cell centers"))
}
