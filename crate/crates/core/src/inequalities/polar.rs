//! Maximal polar functions and the functional Santalo inequality.

use rand::Rng;

use super::weight::{weight_integral, RadialWeight};
use crate::certificate::Certificate;
use crate::error::{check_dim, Result, SantaloError};
use crate::field::{BoxBounds, ScalarField};
use crate::measures::dot;
use crate::sampling;

/// Values below this fraction of `max f` are treated as zero.
pub const SUPPORT_FLOOR: f64 = 1e-12;

pub const POINTWISE_SLACK: f64 = 1e-9;
pub const INTEGRAL_SLACK: f64 = 1e-6;

const GRID_NOTE: &str = "functions are compared at grid cell centers";

/// The support of `f(c + .)` at cell centers, with the infimum evaluated
/// directly from it.
pub struct PolarKernel<'a> {
    rho: &'a RadialWeight,
    dim: usize,
    points: Vec<f64>,
    values: Vec<f64>,
    cap: f64,
}

impl<'a> PolarKernel<'a> {
    /// `cap` replaces an empty infimum; `None` uses `sup rho^2 / min f`
    /// over the support.
    pub fn new(f: &ScalarField, c: &[f64], rho: &'a RadialWeight, cap: Option<f64>) -> Result<Self> {
        check_dim(f.dim(), c.len())?;
        rho.validate()?;
        let floor = SUPPORT_FLOOR * f.max_value();
        let n = f.dim();
        let mut points = Vec::new();
        let mut values = Vec::new();
        let mut x = vec![0.0; n];
        for (i, &v) in f.values().iter().enumerate() {
            if v > floor && v > 0.0 {
                f.cell_center_into(i, &mut x);
                points.extend(x.iter().zip(c).map(|(a, b)| a - b));
                values.push(v);
            }
        }
        if values.is_empty() {
            return Err(SantaloError::EmptySupport);
        }
        let min_f = values.iter().copied().fold(f64::INFINITY, f64::min);
        let cap = cap.unwrap_or(rho.sup_squared() / min_f);
        if !(cap >= 0.0) {
            return Err(SantaloError::invalid("polar cap must be non-negative"));
        }
        Ok(Self {
            rho,
            dim: n,
            points,
            values,
            cap,
        })
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    /// `inf { rho(sqrt(x.y))^2 / f(c + x) : f(c + x) > 0, x.y >= 0 }`.
    pub fn value(&self, y: &[f64]) -> f64 {
        let mut best = f64::INFINITY;
        for (x, v) in self.points.chunks_exact(self.dim).zip(&self.values) {
            let s = dot(x, y);
            if s < 0.0 {
                continue;
            }
            let r = self.rho.coupling(s) / v;
            if r < best {
                best = r;
                if best == 0.0 {
                    break;
                }
            }
        }
        if best.is_finite() {
            best
        } else {
            self.cap
        }
    }
}

/// Pointwise-maximal `g` with `f(c + x) g(y) <= rho(sqrt(x.y))^2` whenever
/// `x.y >= 0`, sampled at the cell centers of `out`.
#[derive(Clone, Debug)]
pub struct PolarTransform {
    pub field: ScalarField,
    pub cap: f64,
}

pub fn polar_transform(
    f: &ScalarField,
    c: &[f64],
    rho: &RadialWeight,
    out_bounds: BoxBounds,
    out_shape: Vec<usize>,
    cap: Option<f64>,
) -> Result<PolarTransform> {
    check_dim(f.dim(), out_bounds.dim())?;
    let kernel = PolarKernel::new(f, c, rho, cap)?;
    let mut g = ScalarField::new(out_bounds, out_shape.clone(), vec![0.0; out_shape.iter().product()])?;
    let mut y = vec![0.0; f.dim()];
    let values: Vec<f64> = (0..g.len())
        .map(|i| {
            g.cell_center_into(i, &mut y);
            kernel.value(&y)
        })
        .collect();
    g = ScalarField::new(g.bounds().clone(), out_shape, values)?;
    Ok(PolarTransform {
        field: g,
        cap: kernel.cap(),
    })
}

pub fn polar_function(
    f: &ScalarField,
    c: &[f64],
    rho: &RadialWeight,
    out_bounds: BoxBounds,
    out_shape: Vec<usize>,
) -> Result<ScalarField> {
    Ok(polar_transform(f, c, rho, out_bounds, out_shape, None)?.field)
}

/// Samples cell-center pairs `(x, y)` from the supports of `f` and `g` with
/// `(x - c).y >= 0` and checks `f(x) g(y) <= rho(sqrt((x - c).y))^2`.
pub fn duality_check(
    f: &ScalarField,
    g: &ScalarField,
    c: &[f64],
    rho: &RadialWeight,
    sample_pairs: usize,
    seed: u64,
) -> Result<Certificate> {
    check_dim(f.dim(), g.dim())?;
    check_dim(f.dim(), c.len())?;
    let n = f.dim();
    let (sf, sg) = (f.support(), g.support());
    let mut cert;
    if sf.is_empty() || sg.is_empty() {
        cert = Certificate::inequality(0.0, 0.0, POINTWISE_SLACK).with("pairs", 0.0);
        return Ok(cert.note("one of the functions vanishes; the relation holds trivially"));
    }
    let mut rng = sampling::rng(seed);
    let (mut x, mut y, mut shifted) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut worst = f64::NEG_INFINITY;
    let mut worst_pair = (Vec::new(), Vec::new());
    let (mut accepted, mut violations) = (0usize, 0usize);
    let max_draws = sample_pairs.saturating_mul(100).max(1000);
    for _ in 0..max_draws {
        if accepted == sample_pairs {
            break;
        }
        let i = sf[rng.gen_range(0..sf.len())];
        let j = sg[rng.gen_range(0..sg.len())];
        f.cell_center_into(i, &mut x);
        g.cell_center_into(j, &mut y);
        for k in 0..n {
            shifted[k] = x[k] - c[k];
        }
        let s = dot(&shifted, &y);
        if s < 0.0 {
            continue;
        }
        accepted += 1;
        let excess = f.values()[i] * g.values()[j] - rho.coupling(s);
        if excess > POINTWISE_SLACK {
            violations += 1;
        }
        if excess > worst {
            worst = excess;
            worst_pair = (x.clone(), y.clone());
        }
    }
    cert = Certificate::inequality(worst.max(0.0), 0.0, POINTWISE_SLACK)
        .with("pairs", accepted as f64)
        .with("violations", violations as f64)
        .with("worst_excess", worst);
    for (k, v) in worst_pair.0.iter().enumerate() {
        cert.push(format!("worst_x_{k}"), *v);
    }
    for (k, v) in worst_pair.1.iter().enumerate() {
        cert.push(format!("worst_y_{k}"), *v);
    }
    Ok(cert.note(GRID_NOTE))
}

/// `int f * int g <= (int rho(|x|) dx)^2` with relative slack `1e-6`.
pub fn santalo_verify(f: &ScalarField, g: &ScalarField, rho: &RadialWeight) -> Result<Certificate> {
    check_dim(f.dim(), g.dim())?;
    let (int_f, int_g) = (f.integral(), g.integral());
    let rhs = weight_integral(rho, f.dim())?.powi(2);
    Ok(Certificate::inequality(int_f * int_g, rhs, INTEGRAL_SLACK * rhs)
        .with("integral_f", int_f)
        .with("integral_g", int_g)
        .note(GRID_NOTE))
}
