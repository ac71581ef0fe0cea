//! Yao-Yao equipartitions of discrete measures in dimensions 1, 2 and 3.
//!
//! The top-level hyperplane is always `{ x_n = t }` with `t` bisecting the
//! mass, and the sweep direction is `v(s) = e_n + sum_i s_i e_i`. Projecting
//! the two halves onto the hyperplane along `v(s)` gives two measures of one
//! dimension less; `s` is tuned until their canonical centers coincide, which
//! makes all `2^n` cones carry equal mass. Acceptance is decided a posteriori
//! by counting cone masses.

use crate::certificate::Certificate;
use crate::error::{Result, SantaloError};
use crate::geometry::{AffineFrame, LocalSplit, Point, YaoYaoTree, MEMBERSHIP_TOL};
use crate::measures::{weighted_median, WeightedPointCloud, BOUNDARY_TOL};
use crate::optim::{nelder_mead, NelderMeadOptions};

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    /// Accepted cone-mass imbalance, as a fraction of total mass.
    pub mass_tol: f64,
    /// Largest `|s|` explored by bracket and grid searches.
    pub bracket_limit: f64,
    /// Local grid refinement rounds of the 3D search.
    pub grid_refinements: usize,
    /// Place the top hyperplane through the origin (for even measures).
    pub even_mode: bool,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            mass_tol: 1e-3,
            bracket_limit: (1u64 << 20) as f64,
            grid_refinements: 8,
            even_mode: false,
            seed: 0,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.mass_tol > 0.0) || !(self.bracket_limit > 0.0) {
            return Err(SantaloError::invalid("mass_tol and bracket_limit must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquipartitionReport {
    pub tree: YaoYaoTree,
    /// Cone masses in leaf order.
    pub masses: Vec<f64>,
    /// `max |mass_i - total / 2^n|`.
    pub max_imbalance: f64,
    /// Norm of the center residual at the returned slope.
    pub residual_norm: f64,
    /// Number of residual evaluations.
    pub iterations: usize,
}

/// Midpoint-rule weighted median of a 1D cloud.
pub fn yy_center_1d(cloud: &WeightedPointCloud) -> Result<Point> {
    if cloud.dim() != 1 {
        return Err(SantaloError::DimensionMismatch {
            expected: 1,
            got: cloud.dim(),
        });
    }
    Ok(Point::from_element(1, median_1d(cloud)))
}

/// Difference of the canonical centers of the projected upper and lower
/// halves, in hyperplane coordinates, for slope parameters `s`.
pub fn center_residual(cloud: &WeightedPointCloud, s: &[f64], opts: &SolverOptions) -> Result<Vec<f64>> {
    let n = cloud.dim();
    if !(2..=3).contains(&n) {
        return Err(SantaloError::UnsupportedDimension(n));
    }
    if s.len() != n - 1 {
        return Err(SantaloError::DimensionMismatch {
            expected: n - 1,
            got: s.len(),
        });
    }
    let t = top_offset(cloud, opts)?;
    let halves = Halves::split(cloud, t)?;
    match n {
        2 => {
            let mut buf = Vec::new();
            Ok(vec![halves.plus.median(s[0], &mut buf) - halves.minus.median(s[0], &mut buf)])
        }
        _ => {
            let (p, m) = halves.centers_2d(s, opts.bracket_limit).map_err(|e| e.into_error())?;
            Ok(vec![p.center[0] - m.center[0], p.center[1] - m.center[1]])
        }
    }
}

/// Computes a Yao-Yao equipartition of `cloud` (dimension 1, 2 or 3).
pub fn yy_equipartition(cloud: &WeightedPointCloud, opts: &SolverOptions) -> Result<EquipartitionReport> {
    opts.validate()?;
    let n = cloud.dim();
    let (local, residual, evals, bracket_failed) = match n {
        1 => {
            let m = if opts.even_mode { 0.0 } else { median_1d(cloud) };
            (LocalSplit::line(m), 0.0, 0, false)
        }
        2 => {
            let t = top_offset(cloud, opts)?;
            match solve_2d(cloud, Some(t), opts.bracket_limit) {
                Ok(p) => (p.local(&p.center), p.residual.abs(), p.evals, false),
                Err(Fail::NoBracket(p)) => (p.local(&p.center), p.residual.abs(), p.evals, true),
                Err(Fail::Empty) => return Err(SantaloError::EmptySupport),
            }
        }
        3 => {
            let sol = solve_3d(cloud, opts)?;
            (sol.local, sol.residual, sol.evals, false)
        }
        _ => return Err(SantaloError::UnsupportedDimension(n)),
    };
    let tree = YaoYaoTree::from_local(&AffineFrame::standard(n), &local)?;
    let report = report_for(tree, cloud, residual, evals)?;
    if bracket_failed {
        return Err(SantaloError::NoBracket {
            limit: opts.bracket_limit,
            best: Box::new(report),
        });
    }
    // in 1D the median split is the answer; atom granularity shows in the report
    if n > 1 && report.max_imbalance > opts.mass_tol * cloud.total_mass() {
        return Err(SantaloError::NotConverged {
            best: Box::new(report),
        });
    }
    Ok(report)
}

/// Checks that every leaf cone carries `2^-n` of the mass within
/// `tol * total_mass`.
pub fn equipartition_verify(tree: &YaoYaoTree, cloud: &WeightedPointCloud, tol: f64) -> Result<Certificate> {
    crate::error::check_dim(tree.dim(), cloud.dim())?;
    let cones = tree.leaf_cones()?;
    let total = cloud.total_mass();
    let target = total / cones.len() as f64;
    // half-counting: an atom on shared facets is split evenly among its cones
    let mut masses = vec![0.0; cones.len()];
    let mut boundary = 0usize;
    let mut inside = Vec::with_capacity(cones.len());
    for (p, w) in cloud.points().zip(cloud.weights()) {
        inside.clear();
        inside.extend((0..cones.len()).filter(|&i| cones[i].contains_slice(p, MEMBERSHIP_TOL)));
        if inside.len() > 1 {
            boundary += 1;
        }
        for &i in &inside {
            masses[i] += w / inside.len() as f64;
        }
    }
    let imbalance = masses.iter().map(|m| (m - target).abs()).fold(0.0, f64::max);
    let mut cert = Certificate::inequality(imbalance, tol * total, 0.0)
        .with("target_mass", target)
        .with("boundary_atoms", boundary as f64);
    for (i, m) in masses.iter().enumerate() {
        cert.push(format!("mass_{i}"), *m);
    }
    if boundary > 0 {
        cert = cert.note("atoms on cone facets are split evenly among the adjacent cones");
    }
    Ok(cert)
}

fn report_for(tree: YaoYaoTree, cloud: &WeightedPointCloud, residual: f64, evals: usize) -> Result<EquipartitionReport> {
    let cert = equipartition_verify(&tree, cloud, f64::INFINITY)?;
    let masses = (0..tree.leaf_count())
        .map(|i| cert.get(&format!("mass_{i}")).unwrap_or(0.0))
        .collect();
    Ok(EquipartitionReport {
        tree,
        masses,
        max_imbalance: cert.lhs,
        residual_norm: residual,
        iterations: evals,
    })
}

fn median_1d(cloud: &WeightedPointCloud) -> f64 {
    let mut items: Vec<(f64, f64)> = cloud
        .coords()
        .iter()
        .copied()
        .zip(cloud.weights().iter().copied())
        .collect();
    weighted_median(&mut items)
}

fn top_offset(cloud: &WeightedPointCloud, opts: &SolverOptions) -> Result<f64> {
    if opts.even_mode {
        return Ok(0.0);
    }
    let mut e = vec![0.0; cloud.dim()];
    e[cloud.dim() - 1] = 1.0;
    cloud.bisecting_offset(&e)
}

fn spread(cloud: &WeightedPointCloud) -> f64 {
    cloud.coords().iter().map(|c| c.abs()).fold(0.0, f64::max).max(1e-300)
}

/// Atoms on one side of `{ x_n = t }`: hyperplane coordinates and heights.
struct Half {
    low: usize,
    base: Vec<f64>,
    height: Vec<f64>,
    weight: Vec<f64>,
}

impl Half {
    fn project_into(&self, s: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for (i, h) in self.height.iter().enumerate() {
            for k in 0..self.low {
                out.push(self.base[i * self.low + k] - s[k] * h);
            }
        }
    }

    fn projected(&self, s: &[f64]) -> WeightedPointCloud {
        let mut coords = Vec::with_capacity(self.base.len());
        self.project_into(s, &mut coords);
        WeightedPointCloud::new_unchecked(self.low, coords, self.weight.clone())
    }

    /// Median of the 1D projection (requires `low == 1`).
    fn median(&self, s: f64, buf: &mut Vec<(f64, f64)>) -> f64 {
        buf.clear();
        buf.extend(
            self.base
                .iter()
                .zip(&self.height)
                .zip(&self.weight)
                .map(|((b, h), w)| (b - s * h, *w)),
        );
        weighted_median(buf)
    }
}

struct Halves {
    plus: Half,
    minus: Half,
}

impl Halves {
    fn split(cloud: &WeightedPointCloud, t: f64) -> Result<Self> {
        let n = cloud.dim();
        let low = n - 1;
        let tol = BOUNDARY_TOL * t.abs().max(1.0);
        let empty = || Half {
            low,
            base: Vec::new(),
            height: Vec::new(),
            weight: Vec::new(),
        };
        let (mut plus, mut minus) = (empty(), empty());
        for (p, &w) in cloud.points().zip(cloud.weights()) {
            let h = p[n - 1] - t;
            let targets: &mut [(&mut Half, f64)] = if h.abs() <= tol {
                &mut [(&mut plus, 0.5 * w), (&mut minus, 0.5 * w)][..]
            } else if h > 0.0 {
                &mut [(&mut plus, w)][..]
            } else {
                &mut [(&mut minus, w)][..]
            };
            for (half, weight) in targets.iter_mut() {
                half.base.extend_from_slice(&p[..low]);
                half.height.push(if h.abs() <= tol { 0.0 } else { h });
                half.weight.push(*weight);
            }
        }
        if plus.weight.is_empty() || minus.weight.is_empty() {
            return Err(SantaloError::EmptySupport);
        }
        Ok(Self { plus, minus })
    }

    fn centers_2d(&self, s: &[f64], limit: f64) -> Result<(Plane, Plane), Fail> {
        let p = solve_2d(&self.plus.projected(s), None, limit)?;
        let m = solve_2d(&self.minus.projected(s), None, limit)?;
        Ok((p, m))
    }
}

/// Solution of the planar problem, in the plane's own coordinates.
#[derive(Clone, Debug)]
struct Plane {
    s: f64,
    /// `[(m_plus + m_minus) / 2, t]`.
    center: [f64; 2],
    residual: f64,
    evals: usize,
}

impl Plane {
    /// Split tree of this plane re-centered at `c` (the hyperplane and both
    /// line splits pass through `c`).
    fn local(&self, c: &[f64; 2]) -> LocalSplit {
        LocalSplit::split(c[1], vec![self.s, 1.0], LocalSplit::line(c[0]), LocalSplit::line(c[0]))
    }
}

enum Fail {
    NoBracket(Plane),
    Empty,
}

impl Fail {
    fn into_error(self) -> SantaloError {
        match self {
            Fail::Empty => SantaloError::EmptySupport,
            Fail::NoBracket(_) => SantaloError::invalid("planar sub-problem has no bracket"),
        }
    }
}

fn solve_2d(cloud: &WeightedPointCloud, t: Option<f64>, limit: f64) -> Result<Plane, Fail> {
    let t = match t {
        Some(t) => t,
        None => cloud.bisecting_offset(&[0.0, 1.0]).map_err(|_| Fail::Empty)?,
    };
    let halves = Halves::split(cloud, t).map_err(|_| Fail::Empty)?;
    let mut buf = Vec::with_capacity(cloud.len());
    let mut medians = |s: f64| (halves.plus.median(s, &mut buf), halves.minus.median(s, &mut buf));
    let scale = spread(cloud);
    let root = find_decreasing_root(|s| {
        let (p, m) = medians(s);
        p - m
    }, limit, 1e-13 * scale);
    let (s, evals, ok) = match root {
        Ok((s, evals)) => (s, evals, true),
        Err((s, evals)) => (s, evals, false),
    };
    let (p, m) = medians(s);
    let plane = Plane {
        s,
        center: [0.5 * (p + m), t],
        residual: p - m,
        evals: evals + 1,
    };
    if ok {
        Ok(plane)
    } else {
        Err(Fail::NoBracket(plane))
    }
}

/// Root of a continuous non-increasing function: symmetric bracket doubling
/// from `[-1, 1]`, then Illinois regula falsi. On failure returns the best
/// endpoint seen.
fn find_decreasing_root<F>(mut f: F, limit: f64, tol: f64) -> Result<(f64, usize), (f64, usize)>
where
    F: FnMut(f64) -> f64,
{
    let mut evals = 0usize;
    let mut half_width = 1.0;
    let (mut a, mut fa, mut b, mut fb);
    loop {
        fa = f(-half_width);
        fb = f(half_width);
        evals += 2;
        if fa.abs() <= tol {
            return Ok((-half_width, evals));
        }
        if fb.abs() <= tol {
            return Ok((half_width, evals));
        }
        if fa > 0.0 && fb < 0.0 {
            a = -half_width;
            b = half_width;
            break;
        }
        if 2.0 * half_width > limit {
            let best = if fa.abs() < fb.abs() { -half_width } else { half_width };
            return Err((best, evals));
        }
        half_width *= 2.0;
    }
    let (mut true_fa, mut true_fb) = (fa, fb);
    let mut last_side = 0i8;
    for _ in 0..300 {
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > a && c < b) {
            c = 0.5 * (a + b);
        }
        let fc = f(c);
        evals += 1;
        if fc.abs() <= tol {
            return Ok((c, evals));
        }
        if fc > 0.0 {
            a = c;
            fa = fc;
            true_fa = fc;
            if last_side == 1 {
                fb *= 0.5;
            }
            last_side = 1;
        } else {
            b = c;
            fb = fc;
            true_fb = fc;
            if last_side == -1 {
                fa *= 0.5;
            }
            last_side = -1;
        }
        if b - a <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1e-300) {
            break;
        }
    }
    Ok((if true_fa.abs() <= true_fb.abs() { a } else { b }, evals))
}

struct Space {
    local: LocalSplit,
    residual: f64,
    evals: usize,
}

/// Residual evaluations of the 3D problem with bookkeeping.
struct Residual3<'a> {
    halves: &'a Halves,
    limit: f64,
    evals: usize,
}

impl Residual3<'_> {
    fn eval(&mut self, s: &[f64]) -> Option<([f64; 2], Plane, Plane)> {
        self.evals += 1;
        let (p, m) = self.halves.centers_2d(s, self.limit).ok()?;
        Some(([p.center[0] - m.center[0], p.center[1] - m.center[1]], p, m))
    }

    fn objective(&mut self, s: &[f64]) -> f64 {
        self.eval(s)
            .map_or(f64::INFINITY, |(r, _, _)| r[0] * r[0] + r[1] * r[1])
    }
}

fn solve_3d(cloud: &WeightedPointCloud, opts: &SolverOptions) -> Result<Space> {
    let t = top_offset(cloud, opts)?;
    let halves = Halves::split(cloud, t)?;
    let scale = spread(cloud);
    let mut res = Residual3 {
        halves: &halves,
        limit: opts.bracket_limit,
        evals: 0,
    };

    // coarse grid, widened while the best cell sits on its boundary
    const G: i32 = 9;
    let mut half_width = 4.0f64.min(opts.bracket_limit);
    let (mut best, mut best_val);
    loop {
        best = [0.0, 0.0];
        best_val = f64::INFINITY;
        let mut on_edge = false;
        let step = 2.0 * half_width / f64::from(G - 1);
        for i in 0..G {
            for j in 0..G {
                let s = [-half_width + f64::from(i) * step, -half_width + f64::from(j) * step];
                let v = res.objective(&s);
                if v < best_val {
                    best_val = v;
                    best = s;
                    on_edge = i == 0 || j == 0 || i == G - 1 || j == G - 1;
                }
            }
        }
        if !on_edge || 4.0 * half_width > opts.bracket_limit {
            break;
        }
        half_width *= 4.0;
    }

    // local refinement
    let mut w = 2.0 * half_width / f64::from(G - 1);
    for _ in 0..opts.grid_refinements {
        let centre = best;
        for i in -2..=2 {
            for j in -2..=2 {
                if i == 0 && j == 0 {
                    continue;
                }
                let s = [centre[0] + f64::from(i) * w / 2.0, centre[1] + f64::from(j) * w / 2.0];
                let v = res.objective(&s);
                if v < best_val {
                    best_val = v;
                    best = s;
                }
            }
        }
        w /= 2.0;
    }

    let tol = 1e-12 * scale;
    let (mut s, mut val) = newton(&mut res, best, best_val, w, tol);
    if val.sqrt() > tol {
        let m = nelder_mead(
            |x| res.objective(x),
            &s,
            &NelderMeadOptions {
                initial_step: w.max(1e-6),
                max_evals: 1500,
                x_tol: 1e-13,
                f_tol: tol * tol,
            },
        );
        if m.value < val {
            s = [m.x[0], m.x[1]];
            val = m.value;
        }
        let polished = newton(&mut res, s, val, w, tol);
        s = polished.0;
    }

    let (r, p, m) = res
        .eval(&s)
        .ok_or_else(|| SantaloError::invalid("3D residual undefined at the final slope"))?;
    let c = [0.5 * (p.center[0] + m.center[0]), 0.5 * (p.center[1] + m.center[1])];
    let local = LocalSplit::split(t, vec![s[0], s[1], 1.0], m.local(&c), p.local(&c));
    Ok(Space {
        local,
        residual: (r[0] * r[0] + r[1] * r[1]).sqrt(),
        evals: res.evals,
    })
}

/// Damped Newton iteration on the 2-vector residual with a forward
/// difference Jacobian.
fn newton(res: &mut Residual3<'_>, mut s: [f64; 2], mut val: f64, width: f64, tol: f64) -> ([f64; 2], f64) {
    let Some((mut r, _, _)) = res.eval(&s) else {
        return (s, val);
    };
    for _ in 0..40 {
        if val.sqrt() <= tol {
            break;
        }
        let h = (val.sqrt().min(width) * 1e-2).max(1e-9) * (1.0 + s[0].abs().max(s[1].abs()));
        let mut jac = [[0.0; 2]; 2];
        let mut ok = true;
        for k in 0..2 {
            let mut sh = s;
            sh[k] += h;
            match res.eval(&sh) {
                Some((rh, _, _)) => {
                    jac[0][k] = (rh[0] - r[0]) / h;
                    jac[1][k] = (rh[1] - r[1]) / h;
                }
                None => ok = false,
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if !ok || det.abs() < 1e-300 || !det.is_finite() {
            break;
        }
        let step = [
            -(jac[1][1] * r[0] - jac[0][1] * r[1]) / det,
            -(-jac[1][0] * r[0] + jac[0][0] * r[1]) / det,
        ];
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..12 {
            let trial = [s[0] + lambda * step[0], s[1] + lambda * step[1]];
            if let Some((rt, _, _)) = res.eval(&trial) {
                let vt = rt[0] * rt[0] + rt[1] * rt[1];
                if vt < val {
                    s = trial;
                    r = rt;
                    val = vt;
                    improved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (s, val)
}
