//! Transport rays of the signed distance to a subset of a finite metric
//! measure space, their conditional densities, and the inradius bound.

mod pivots;
mod rays;
mod signed;
mod subset;
mod transport;
mod verify;

pub use rays::{
    conditional_densities, extract_chains, finite_inner_curvature_check, inner_mean_curvature_field,
    ray_decomposition, surface_measure, weighted_quantile, BinConfig, CurvatureSample, DecompositionConfig,
    FiniteInnerCurvature, Ray, RayDecomposition, RayFlag, MAX_UNASSIGNED_FRACTION, SPAN_RESOLUTION,
};
pub use signed::{exterior_ball_check, inradius, inradius_from_field, lipschitz_defect, signed_distance, SignedDistanceField};
pub use subset::SubsetSpec;
pub use transport::{branching_points, transport_ordering, BranchingSets, TransportRelation, RELATION_TOL};
pub use verify::{
    backward_mc_estimate, bound_report, comparison_radius, decompose, verify_inradius_bound, Analysis, BoundReport,
    VerifyOptions, BOUND_TOL, DEFAULT_QUANTILE,
};

use std::f64::consts::PI;

use crate::mms::DiscreteMMS;

/// `intervals + 1` equispaced points on `[a, b]` with weight equal to the
/// spacing; the field is the coordinate.
pub fn line_grid(a: f64, b: f64, intervals: usize) -> DiscreteMMS {
    let step = (b - a) / intervals as f64;
    let xs: Vec<f64> = (0..=intervals).map(|i| a + i as f64 * step).collect();
    DiscreteMMS::euclidean(1, xs.clone(), vec![step; intervals + 1])
        .and_then(|s| s.with_field(xs))
        .expect("valid grid")
}

/// Polar lattice of the disk of radius `(rings + collar) / rings`: the
/// center (weight 0, index 0) and rings at radii `k / rings` with `angles`
/// points each, weighted by `r dr dtheta`.  The field is the radius.
pub fn disk_sample(rings: usize, angles: usize, collar: usize) -> DiscreteMMS {
    let dr = 1.0 / rings as f64;
    let dth = 2.0 * PI / angles as f64;
    let mut coords = vec![0.0, 0.0];
    let mut weights = vec![0.0];
    let mut radius = vec![0.0];
    for k in 1..=rings + collar {
        let r = k as f64 * dr;
        for j in 0..angles {
            let th = j as f64 * dth;
            coords.extend([r * th.cos(), r * th.sin()]);
            weights.push(r * dr * dth);
            radius.push(r);
        }
    }
    DiscreteMMS::euclidean(2, coords, weights)
        .and_then(|s| s.with_field(radius))
        .expect("valid disk")
}
