//! End-to-end checks of the functional inequality on random inputs: the
//! center comes from an equipartition and `g` is the maximal polar.

use rand::Rng;
use santalo::equipartition::{yy_equipartition, SolverOptions};
use santalo::field::{BoxBounds, ScalarField};
use santalo::inequalities::{duality_check, polar_function, santalo_verify, RadialWeight};
use santalo::measures::cloud_from_grid;
use santalo::sampling;
use santalo::SantaloError;

/// Random non-negative field on `[-2, 2]^n`: a few shifted bumps, cut to
/// zero below a threshold so supports are irregular.
fn random_field(n: usize, cells: usize, seed: u64) -> ScalarField {
    let mut rng = sampling::rng(seed);
    let bumps: Vec<(Vec<f64>, f64, f64)> = (0..3)
        .map(|_| {
            let c = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            (c, rng.gen_range(0.2..0.8), rng.gen_range(0.5..3.0))
        })
        .collect();
    let b = BoxBounds::cube(n, 2.0).unwrap();
    ScalarField::from_fn(b, vec![cells; n], move |x| {
        let v: f64 = bumps
            .iter()
            .map(|(c, w, a)| {
                let d2: f64 = x.iter().zip(c).map(|(u, v)| (u - v) * (u - v)).sum();
                a * (-d2 / (2.0 * w * w)).exp()
            })
            .sum();
        if v < 0.05 {
            0.0
        } else {
            v
        }
    })
    .unwrap()
    .sampled_only()
}

fn center_of(f: &ScalarField, even: bool) -> Vec<f64> {
    let cloud = cloud_from_grid(f).unwrap();
    let opts = SolverOptions {
        even_mode: even,
        ..SolverOptions::default()
    };
    let report = match yy_equipartition(&cloud, &opts) {
        Ok(r) => r,
        // grid clouds are coarse; the best tree is still a Yao-Yao partition
        Err(SantaloError::NotConverged { best }) => *best,
        Err(e) => panic!("{e}"),
    };
    report.tree.center().as_slice().to_vec()
}

fn check(f: &ScalarField, c: &[f64], rho: &RadialWeight, out_cells: usize, seed: u64) {
    let n = f.dim();
    let out = BoxBounds::cube(n, 8.0).unwrap();
    let g = polar_function(f, c, rho, out, vec![out_cells; n]).unwrap();
    let dual = duality_check(f, &g, c, rho, 5000, seed).unwrap();
    assert!(dual.passed, "duality: {dual:?}");
    let cert = santalo_verify(f, &g, rho).unwrap();
    assert!(cert.passed, "seed {seed}, c {c:?}: {} > {}", cert.lhs, cert.rhs);
}

#[test]
fn random_fields_at_yao_yao_centers() {
    for seed in 0..20u64 {
        let n = if seed < 10 { 1 } else { 2 };
        let f = random_field(n, if n == 1 { 200 } else { 24 }, seed);
        let c = center_of(&f, false);
        for rho in [RadialWeight::IndicatorUnit, RadialWeight::Gaussian] {
            check(&f, &c, &rho, if n == 1 { 800 } else { 48 }, seed);
        }
    }
}

#[test]
fn even_fields_centered_at_origin() {
    for seed in 0..4u64 {
        let n = 1 + (seed % 2) as usize;
        let f = random_field(n, if n == 1 { 200 } else { 24 }, 100 + seed);
        // symmetrize on the grid: the box and shape are origin-symmetric
        let mut vals = f.values().to_vec();
        let rev: Vec<f64> = vals.iter().rev().copied().collect();
        for (v, r) in vals.iter_mut().zip(rev) {
            *v = v.max(r);
        }
        let even = ScalarField::new(f.bounds().clone(), f.shape().to_vec(), vals).unwrap();
        let c = center_of(&even, true);
        assert!(c.iter().all(|v| v.abs() <= 1e-9), "{c:?}");
        for rho in [RadialWeight::IndicatorUnit, RadialWeight::Gaussian] {
            check(&even, &c, &rho, if n == 1 { 800 } else { 48 }, seed);
        }
    }
}
