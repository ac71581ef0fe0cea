//! Radial weights and the normalizing integral `int_{R^n} rho(|x|) dx`.

use std::f64::consts::PI;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::certificate::Certificate;
use crate::error::{Result, SantaloError};
use crate::geometry::MAX_DIM;
use crate::optim::adaptive_simpson;
use crate::sampling;
use rand::Rng;

/// A non-negative function `rho` on `[0, inf)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialWeight {
    /// `1_[0,1]`.
    IndicatorUnit,
    /// `exp(-t^2 / 2)`.
    Gaussian,
    /// Piecewise linear through equally spaced samples on `[0, t_max]`, zero
    /// beyond.
    Table { t_max: f64, values: Vec<f64> },
}

/// Where the gaussian quadrature is truncated; `exp(-800)` underflows.
const GAUSSIAN_CUTOFF: f64 = 40.0;

impl RadialWeight {
    pub fn table(t_max: f64, values: Vec<f64>) -> Result<Self> {
        let w = Self::Table { t_max, values };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if let Self::Table { t_max, values } = self {
            if !(t_max.is_finite() && *t_max > 0.0) {
                return Err(SantaloError::invalid("table weight needs a finite t_max > 0"));
            }
            if values.len() < 2 || values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(SantaloError::invalid(
                    "table weight needs at least two finite non-negative samples",
                ));
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Self::IndicatorUnit => f64::from(u8::from((0.0..=1.0).contains(&t))),
            Self::Gaussian => (-0.5 * t * t).exp(),
            Self::Table { t_max, values } => {
                if !(0.0..=*t_max).contains(&t) {
                    return 0.0;
                }
                let h = t_max / (values.len() - 1) as f64;
                let u = t / h;
                let i = (u.floor() as usize).min(values.len() - 2);
                let frac = u - i as f64;
                values[i] * (1.0 - frac) + values[i + 1] * frac
            }
        }
    }

    /// `rho(sqrt(s))^2` for `s >= 0`, the right side of the duality relation.
    pub fn coupling(&self, s: f64) -> f64 {
        match self {
            Self::IndicatorUnit => f64::from(u8::from(s <= 1.0)),
            Self::Gaussian => (-s).exp(),
            Self::Table { .. } => {
                let r = self.eval(s.sqrt());
                r * r
            }
        }
    }

    /// `sup rho^2`.
    pub fn sup_squared(&self) -> f64 {
        match self {
            Self::IndicatorUnit | Self::Gaussian => 1.0,
            Self::Table { values, .. } => values.iter().fold(0.0f64, |a, v| a.max(*v)).powi(2),
        }
    }

    /// Upper end of the integration range (the support, or the gaussian
    /// cutoff).
    pub fn reach(&self) -> f64 {
        match self {
            Self::IndicatorUnit => 1.0,
            Self::Gaussian => GAUSSIAN_CUTOFF,
            Self::Table { t_max, .. } => *t_max,
        }
    }

    /// Smooth pieces of `rho` on `[0, reach]`.
    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::IndicatorUnit => vec![0.0, 1.0],
            Self::Gaussian => vec![0.0, 4.0, 10.0, GAUSSIAN_CUTOFF],
            Self::Table { t_max, values } => {
                let k = values.len() - 1;
                (0..=k).map(|i| t_max * i as f64 / k as f64).collect()
            }
        }
    }
}

impl FromStr for RadialWeight {
    type Err = SantaloError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "indicator" | "indicator_unit" | "indicator-unit" => Ok(Self::IndicatorUnit),
            "gaussian" => Ok(Self::Gaussian),
            other => Err(SantaloError::invalid(format!(
                "unknown weight '{other}' (expected indicator or gaussian)"
            ))),
        }
    }
}

/// `v_n = pi^(n/2) / Gamma(n/2 + 1)`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

fn check_n(n: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(SantaloError::UnsupportedDimension(n))
    }
}

/// `int_{R^n} rho(|x|) dx = n v_n int_0^inf rho(t) t^(n-1) dt`.
pub fn weight_integral(rho: &RadialWeight, n: usize) -> Result<f64> {
    check_n(n)?;
    rho.validate()?;
    let p = n as i32 - 1;
    let f = |t: f64| rho.eval(t) * t.powi(p);
    let knots = rho.breakpoints();
    let mut radial = 0.0;
    for w in knots.windows(2) {
        // integrate strictly inside each piece so jumps at knots do not count
        let (a, b) = (w[0], w[1]);
        let g = |t: f64| {
            if t <= a {
                rho_limit(rho, a, true) * a.powi(p)
            } else if t >= b {
                rho_limit(rho, b, false) * b.powi(p)
            } else {
                f(t)
            }
        };
        let scale = (b - a) * b.max(1.0).powi(p);
        let rough = adaptive_simpson(&g, a, b, 1e-8 * scale, 40).ok_or(SantaloError::NonIntegrable)?;
        let tol = 1e-14 * rough.abs().max(1e-300 * scale);
        radial += adaptive_simpson(&g, a, b, tol, 40).ok_or(SantaloError::NonIntegrable)?;
    }
    if !radial.is_finite() {
        return Err(SantaloError::NonIntegrable);
    }
    Ok(n as f64 * unit_ball_volume(n) * radial)
}

/// One-sided limit of `rho` at a knot.
fn rho_limit(rho: &RadialWeight, t: f64, from_right: bool) -> f64 {
    match rho {
        RadialWeight::IndicatorUnit => f64::from(u8::from(if from_right { t < 1.0 } else { t <= 1.0 })),
        _ => rho.eval(t),
    }
}

/// Checks `2^n int_{R_+^n} rho(|x|) dx = int_{R^n} rho(|x|) dx`, estimating the
/// orthant integral by stratified sampling of `[0, reach]^n` (one jittered
/// sample per stratum).
pub fn orthant_identity_check(rho: &RadialWeight, n: usize, samples: usize, seed: u64) -> Result<Certificate> {
    let full = weight_integral(rho, n)?;
    let reach = match rho {
        RadialWeight::Gaussian => 9.0,
        _ => rho.reach(),
    };
    let per_axis = ((samples.max(1) as f64).powf(1.0 / n as f64).floor() as usize).max(1);
    let strata = per_axis.pow(n as u32);
    let h = reach / per_axis as f64;
    let mut rng = sampling::rng(seed);
    let mut idx = vec![0usize; n];
    let mut sum = 0.0;
    for _ in 0..strata {
        let mut r2 = 0.0;
        for &i in &idx {
            let x = (i as f64 + rng.gen::<f64>()) * h;
            r2 += x * x;
        }
        sum += rho.eval(r2.sqrt());
        for k in (0..n).rev() {
            idx[k] += 1;
            if idx[k] < per_axis {
                break;
            }
            idx[k] = 0;
        }
    }
    let orthant = sum / strata as f64 * reach.powi(n as i32);
    let scaled = orthant * (1u64 << n) as f64;
    let rel = if full > 0.0 { (scaled - full).abs() / full } else { scaled.abs() };
    Ok(Certificate::inequality(rel, 1e-3, 0.0)
        .with("orthant_integral", orthant)
        .with("scaled_orthant_integral", scaled)
        .with("weight_integral", full)
        .with("samples", strata as f64))
}
