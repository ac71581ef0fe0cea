//! Built-in inputs: the one-dimensional counterexample, Gaussians and a few
//! polygons.

use crate::bodies::ConvexPolytope;
use crate::error::Result;
use crate::field::{BoxBounds, ScalarField};

/// Cells of the counterexample grids (spacing 1e-3 for both functions).
pub const STEP_F_CELLS: usize = 3000;
pub const STEP_G_CELLS: usize = 1500;

/// `1_(-2,0) + 4 * 1_(0,1)`.
pub fn step_f() -> ScalarField {
    step_f_with(STEP_F_CELLS)
}

pub fn step_f_with(cells: usize) -> ScalarField {
    let b = BoxBounds::new(vec![-2.0], vec![1.0]).expect("valid box");
    ScalarField::from_fn(b, vec![cells], |x| {
        let s = x[0];
        if s > -2.0 && s < 0.0 {
            1.0
        } else if s > 0.0 && s < 1.0 {
            4.0
        } else {
            0.0
        }
    })
    .expect("valid field")
}

/// `1_(-1/2,0] + 1/4 * 1_(0,1)`.
pub fn step_g() -> ScalarField {
    step_g_with(STEP_G_CELLS)
}

pub fn step_g_with(cells: usize) -> ScalarField {
    let b = BoxBounds::new(vec![-0.5], vec![1.0]).expect("valid box");
    ScalarField::from_fn(b, vec![cells], |y| {
        let t = y[0];
        if t > -0.5 && t <= 0.0 {
            1.0
        } else if t > 0.0 && t < 1.0 {
            0.25
        } else {
            0.0
        }
    })
    .expect("valid field")
}

/// `exp(-|x|^2 / 2)` on `[-8.1, 8.1]^n` with 81 cells per axis, so one cell
/// is centered at the origin.
pub fn gaussian_field(n: usize) -> Result<ScalarField> {
    ScalarField::from_fn(BoxBounds::cube(n, 8.1)?, vec![81; n], |x| {
        (-0.5 * x.iter().map(|v| v * v).sum::<f64>()).exp()
    })
}

/// `1_[-1,1]^n` on a grid slightly larger than the box.
pub fn box_indicator(n: usize, cells: usize) -> Result<ScalarField> {
    ScalarField::from_fn(BoxBounds::cube(n, 1.5)?, vec![cells; n], |x| {
        f64::from(u8::from(x.iter().all(|v| v.abs() <= 1.0)))
    })
}

/// `exp(-(x_1 + ... + x_n))` on `[0, 30]^n`.
pub fn exponential_field(n: usize, cells: usize) -> Result<ScalarField> {
    ScalarField::from_fn(BoxBounds::new(vec![0.0; n], vec![30.0; n])?, vec![cells; n], |x| {
        (-x.iter().sum::<f64>()).exp()
    })
}

pub fn square() -> ConvexPolytope {
    ConvexPolytope::cube(2, 1.0).expect("square")
}

pub fn polygon64() -> ConvexPolytope {
    ConvexPolytope::regular_polygon(64, 1.0).expect("64-gon")
}

pub fn triangle() -> ConvexPolytope {
    ConvexPolytope::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).expect("triangle")
}
