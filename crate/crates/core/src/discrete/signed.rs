//! Discrete signed distance to the boundary of a subset, inradius and the
//! exterior ball test.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pivots::{NearestIn, Pivots};
use super::subset::SubsetSpec;
use crate::error::Result;
use crate::mms::DiscreteMMS;

/// Ties within this relative gap count as nearest points.
pub const NEAREST_RTOL: f64 = 1e-12;

/// `u = d_Omega - d_{Omega^c}` with the boundary resolved at sample scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedDistanceField {
    pub u: Vec<f64>,
    /// Points of `Omega` that are nearest to some point outside; they play
    /// the role of the boundary and carry `u = 0`.
    pub boundary: Vec<usize>,
    /// `max (|u_i - u_j| - d(i,j))` over checked pairs; `0` when 1-Lipschitz.
    pub lipschitz_defect: f64,
}

/// On `Omega^c`, `u = d(., Omega)`; on `Omega`,
/// `u = -min(d(., S), d(., Omega^c))` where `S` is the set of points of
/// `Omega` nearest to some point of `Omega^c`.
///
/// A literal `-d(., Omega^c)` on a sample puts the zero level half a
/// spacing outside the last inner points; taking the nearest inner points
/// as the boundary keeps `u` exact on lattices, e.g. `u(x) = x - 1` for the
/// grid on `[0, 2]` with `Omega = [0, 1]`.
pub fn signed_distance(space: &DiscreteMMS, omega: &SubsetSpec) -> Result<SignedDistanceField> {
    omega.check_size(space)?;
    let inner = omega.inner();
    let outer = omega.outer();
    let pivots = Pivots::new(space);
    let to_inner = NearestIn::new(space, &pivots, &inner);
    let to_outer = NearestIn::new(space, &pivots, &outer);

    let outer_hits: Vec<(f64, Vec<usize>)> = outer
        .par_iter()
        .map(|&i| to_inner.nearest_all(i, NEAREST_RTOL))
        .collect();
    let mut boundary: Vec<usize> = outer_hits.iter().flat_map(|(_, h)| h.iter().copied()).collect();
    boundary.sort_unstable();
    boundary.dedup();
    let to_boundary = NearestIn::new(space, &pivots, &boundary);

    let inner_u: Vec<f64> = inner
        .par_iter()
        .map(|&i| -to_boundary.distance(i).min(to_outer.distance(i)))
        .collect();
    let mut u = vec![0.0; space.n()];
    for (&i, &v) in inner.iter().zip(&inner_u) {
        u[i] = v;
    }
    for (&i, (d, _)) in outer.iter().zip(&outer_hits) {
        u[i] = *d;
    }
    let lipschitz_defect = lipschitz_defect(space, &u);
    Ok(SignedDistanceField {
        u,
        boundary,
        lipschitz_defect,
    })
}

/// `max(|u_i - u_j| - d(i,j), 0)` over all pairs.
pub fn lipschitz_defect(space: &DiscreteMMS, u: &[f64]) -> f64 {
    let pivots = Pivots::new(space);
    (0..space.n())
        .into_par_iter()
        .map(|i| {
            let mut worst: f64 = 0.0;
            for j in 0..i {
                let gap = (u[i] - u[j]).abs();
                if gap <= worst || pivots.exceeds(i, j, gap - worst) {
                    continue;
                }
                worst = worst.max(gap - space.dist(i, j));
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

/// `max(-u)` over points of `Omega` with positive weight.
///
/// Zero-weight points (cone tips) are not seen by the measure and are
/// skipped.
pub fn inradius_from_field(space: &DiscreteMMS, omega: &SubsetSpec, field: &SignedDistanceField) -> f64 {
    omega
        .inner()
        .into_iter()
        .filter(|&i| space.weights()[i] > 0.0)
        .map(|i| -field.u[i])
        .fold(0.0, f64::max)
}

pub fn inradius(space: &DiscreteMMS, omega: &SubsetSpec) -> Result<f64> {
    let field = signed_distance(space, omega)?;
    Ok(inradius_from_field(space, omega, &field))
}

/// Every boundary point `x` has an outer point `p` with `d(x, p) >= delta`
/// whose open ball of radius `d(x, p)` misses `Omega`.
pub fn exterior_ball_check(space: &DiscreteMMS, omega: &SubsetSpec, delta: f64) -> Result<bool> {
    let field = signed_distance(space, omega)?;
    let outer = omega.outer();
    let rtol = 1e-9;
    Ok(field.boundary.par_iter().all(|&x| {
        outer.iter().any(|&p| {
            let d = space.dist(x, p);
            d >= delta && field.u[p] >= d * (1.0 - rtol)
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::{disk_sample, line_grid};

    #[test]
    fn line_signed_distance() {
        let space = line_grid(0.0, 2.0, 200);
        let omega = SubsetSpec::sublevel(space.field().unwrap(), 1.0 + 1e-9).unwrap();
        let f = signed_distance(&space, &omega).unwrap();
        for (i, &x) in space.field().unwrap().iter().enumerate() {
            assert!((f.u[i] - (x - 1.0)).abs() < 1e-12, "{i}");
        }
        assert_eq!(f.boundary, vec![100]);
        assert!(f.lipschitz_defect < 1e-12);
        assert!((inradius(&space, &omega).unwrap() - 1.0).abs() < 1e-12);
    }

    fn brute_force_u(space: &DiscreteMMS, omega: &SubsetSpec) -> Vec<f64> {
        let n = space.n();
        let min_over = |i: usize, set: &[usize]| set.iter().map(|&j| space.dist(i, j)).fold(f64::INFINITY, f64::min);
        let inner = omega.inner();
        let outer = omega.outer();
        let mut boundary = Vec::new();
        for &p in &outer {
            let m = min_over(p, &inner);
            boundary.extend(inner.iter().copied().filter(|&j| space.dist(p, j) <= m * (1.0 + NEAREST_RTOL)));
        }
        (0..n)
            .map(|i| {
                if omega.contains(i) {
                    -min_over(i, &boundary).min(min_over(i, &outer))
                } else {
                    min_over(i, &inner)
                }
            })
            .collect()
    }

    #[test]
    fn matches_brute_force_on_random_planes() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let n = rng.gen_range(5..60);
            let coords: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let space = DiscreteMMS::euclidean(2, coords.clone(), vec![1.0; n]).unwrap();
            let flags: Vec<bool> = (0..n).map(|i| coords[2 * i] < 0.2).collect();
            let Ok(omega) = SubsetSpec::new(flags) else { continue };
            let f = signed_distance(&space, &omega).unwrap();
            let oracle = brute_force_u(&space, &omega);
            for i in 0..n {
                assert!((f.u[i] - oracle[i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn one_far_point_outside() {
        let mut coords = vec![0.0, 0.0, 0.1, 0.0, 0.0, 0.1, 0.1, 0.1];
        coords.extend([0.6, 0.05]);
        let space = DiscreteMMS::euclidean(2, coords, vec![1.0; 5]).unwrap();
        let omega = SubsetSpec::new(vec![true, true, true, true, false]).unwrap();
        let f = signed_distance(&space, &omega).unwrap();
        assert_eq!(f.u, brute_force_u(&space, &omega));
    }

    #[test]
    fn exterior_balls_on_line() {
        let space = line_grid(0.0, 2.0, 200);
        let omega = SubsetSpec::sublevel(space.field().unwrap(), 1.0 + 1e-9).unwrap();
        assert!(exterior_ball_check(&space, &omega, 0.5).unwrap());
        assert!(!exterior_ball_check(&space, &omega, 1.5).unwrap());
    }

    #[test]
    fn disk_passes_exterior_balls() {
        let space = disk_sample(40, 50, 10);
        let omega = SubsetSpec::sublevel(space.field().unwrap(), 1.0 + 1e-9).unwrap();
        assert!(exterior_ball_check(&space, &omega, 0.2).unwrap());
    }

    #[test]
    fn reentrant_corner_fails_exterior_balls() {
        // Omega is the union of two overlapping disks; next to the points
        // where the circles cross, the complement is a wedge.
        let (mut coords, mut flags) = (Vec::new(), Vec::new());
        let step = 0.025;
        for a in -48..=48 {
            for b in -40..=40 {
                let (x, y) = (a as f64 * step, b as f64 * step);
                coords.extend([x, y]);
                let in_disk = |cx: f64| (x - cx).hypot(y) <= 0.5;
                flags.push(in_disk(-0.3) || in_disk(0.3));
            }
        }
        let n = flags.len();
        let space = DiscreteMMS::euclidean(2, coords, vec![step * step; n]).unwrap();
        let omega = SubsetSpec::new(flags).unwrap();
        assert!(!exterior_ball_check(&space, &omega, 0.2).unwrap());
    }
}
