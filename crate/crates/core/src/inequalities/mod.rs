//! Radial weights, polar functions, the functional Santalo inequality, its
//! cone-wise proof trace and the Prekopa-Leindler checks behind it.

mod polar;
mod prekopa;
mod trace;
mod weight;

pub use polar::{
    duality_check, polar_function, polar_transform, santalo_verify, PolarKernel, PolarTransform, INTEGRAL_SLACK,
    POINTWISE_SLACK, SUPPORT_FLOOR,
};
pub use prekopa::{exp_substitution_check, log_pl_check, pl_check};
pub use trace::{conewise_trace, conewise_trace_with};
pub use weight::{orthant_identity_check, unit_ball_volume, weight_integral, RadialWeight};
