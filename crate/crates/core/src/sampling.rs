//! Seeded random generation: points in balls and boxes, test clouds.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::measures::WeightedPointCloud;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Deterministic per-shard seed derived from a base seed.
pub fn shard_seed(seed: u64, shard: u64) -> u64 {
    seed ^ shard.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

pub fn gaussian_vector(rng: &mut SeededRng, dim: usize) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Uniform point on the unit sphere.
pub fn unit_vector(rng: &mut SeededRng, dim: usize) -> DVector<f64> {
    loop {
        let v = gaussian_vector(rng, dim);
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// Uniform point in the ball of the given radius around `center`.
pub fn in_ball(rng: &mut SeededRng, center: &DVector<f64>, radius: f64) -> DVector<f64> {
    let dim = center.len();
    let u: f64 = rng.gen();
    let r = radius * u.powf(1.0 / dim as f64);
    center + unit_vector(rng, dim) * r
}

pub fn in_box(rng: &mut SeededRng, lo: &[f64], hi: &[f64]) -> DVector<f64> {
    DVector::from_iterator(
        lo.len(),
        lo.iter().zip(hi).map(|(&a, &b)| a + (b - a) * rng.gen::<f64>()),
    )
}

/// `n` atoms uniform in the unit ball of dimension `dim`, each of weight `1/n`.
pub fn uniform_ball_cloud(dim: usize, n: usize, seed: u64) -> WeightedPointCloud {
    let mut rng = rng(seed);
    let origin = DVector::zeros(dim);
    let pts: Vec<_> = (0..n).map(|_| in_ball(&mut rng, &origin, 1.0)).collect();
    WeightedPointCloud::uniform(pts).expect("nonempty cloud")
}

/// Standard Gaussian atoms, optionally symmetrised (`x` and `-x` both present).
pub fn gaussian_cloud(dim: usize, n: usize, seed: u64, even: bool) -> WeightedPointCloud {
    let mut rng = rng(seed);
    let pts: Vec<_> = if even {
        (0..n / 2)
            .flat_map(|_| {
                let v = gaussian_vector(&mut rng, dim);
                [v.clone(), -v]
            })
            .collect()
    } else {
        (0..n).map(|_| gaussian_vector(&mut rng, dim)).collect()
    };
    WeightedPointCloud::uniform(pts).expect("nonempty cloud")
}

/// Atoms uniform in the unit cube `[0,1]^dim`.
pub fn uniform_cube_cloud(dim: usize, n: usize, seed: u64) -> WeightedPointCloud {
    let mut rng = rng(seed);
    let lo = vec![0.0; dim];
    let hi = vec![1.0; dim];
    let pts: Vec<_> = (0..n).map(|_| in_box(&mut rng, &lo, &hi)).collect();
    WeightedPointCloud::uniform(pts).expect("nonempty cloud")
}
