use super::{SimplicialCone, YaoYaoTree, MEMBERSHIP_TOL, SAMPLE_RADIUS};
use crate::certificate::Certificate;
use crate::error::{Result, SantaloError};
use crate::sampling;

/// Samples points in a ball around the common apex and counts (a) points in
/// no cone and (b) points strictly interior to two or more cones.
pub fn partition_cover_check(cones: &[SimplicialCone], samples: usize, seed: u64) -> Certificate {
    let Some(first) = cones.first() else {
        return Certificate::violations(samples)
            .with("cover_fraction", 0.0)
            .note("no cones");
    };
    let apex = first.apex().clone();
    if cones
        .iter()
        .any(|c| c.dim() != apex.len() || (c.apex() - &apex).norm() > 1e-12)
    {
        return Certificate::violations(samples).note("cones do not share one apex");
    }
    let mut rng = sampling::rng(seed);
    let mut covered = 0usize;
    let mut overlaps = 0usize;
    for _ in 0..samples {
        let x = sampling::in_ball(&mut rng, &apex, SAMPLE_RADIUS);
        let xs = x.as_slice();
        let mut inside = 0;
        let mut interior = 0;
        for c in cones {
            if c.contains_slice(xs, MEMBERSHIP_TOL) {
                inside += 1;
                if c.interior_contains_slice(xs, MEMBERSHIP_TOL) {
                    interior += 1;
                }
            }
        }
        if inside > 0 {
            covered += 1;
        }
        if interior >= 2 {
            overlaps += 1;
        }
    }
    let uncovered = samples - covered;
    let cover = if samples == 0 {
        1.0
    } else {
        covered as f64 / samples as f64
    };
    Certificate::violations(uncovered + overlaps)
        .with("cover_fraction", cover)
        .with("uncovered", uncovered as f64)
        .with("overlaps", overlaps as f64)
        .with("samples", samples as f64)
}

/// Checks that the dual cones of the leaves of a tree centered at the origin
/// again partition space.
pub fn dual_partition_check(tree: &YaoYaoTree, samples: usize, seed: u64) -> Result<Certificate> {
    if tree.center().norm() > 1e-12 {
        return Err(SantaloError::NonZeroApex);
    }
    let duals = tree
        .leaf_cones()?
        .iter()
        .map(|c| c.dual())
        .collect::<Result<Vec<_>>>()?;
    Ok(partition_cover_check(&duals, samples, seed))
}
