//! Greedy decomposition of the nonbranched points into transport rays, and
//! the conditional densities carried by each ray.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::signed::SignedDistanceField;
use super::transport::{branching_points, BranchingSets, TransportRelation};
use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::mms::DiscreteMMS;
use crate::needle::{inner_mean_curvature_from_density, NeedleDensity, MIN_SAMPLES};

/// Spans are compared after rounding to this many units per unit length.
pub const SPAN_RESOLUTION: f64 = 1e9;

/// Default threshold on the unassigned mass fraction.
pub const MAX_UNASSIGNED_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RayFlag {
    CrossesS,
    InnerOnly,
    OuterOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    /// Point ids in increasing `u`.
    pub points: Vec<usize>,
    /// Arc length along the chain, zero at the crossing of `u = 0` (or at
    /// the end nearest to it).
    pub params: Vec<f64>,
    pub flag: RayFlag,
    /// Outer-only ray starting on the zero level.
    pub touches_s: bool,
    /// Sum of the weights of the points (the discrete quotient weight).
    pub mass: f64,
    /// Normalized conditional density, `integral = 1` unless the ray is
    /// massless.
    pub density: Option<NeedleDensity>,
}

impl Ray {
    pub fn length(&self) -> f64 {
        self.params[self.params.len() - 1] - self.params[0]
    }

    /// `h(0) q`; zero for rays that do not cross the zero level.
    pub fn surface_mass(&self) -> f64 {
        match (&self.density, self.flag) {
            (Some(h), RayFlag::CrossesS) => h.value_at_zero() * self.mass,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayDecomposition {
    pub rays: Vec<Ray>,
    /// Ray id of each point.
    pub assignment: Vec<Option<usize>>,
    pub unassigned_mass: f64,
    pub total_mass: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionConfig {
    pub tol: f64,
    pub max_unassigned_fraction: f64,
}

impl Default for DecompositionConfig {
    fn default() -> Self {
        Self {
            tol: super::transport::RELATION_TOL,
            max_unassigned_fraction: MAX_UNASSIGNED_FRACTION,
        }
    }
}

impl RayDecomposition {
    pub fn unassigned_fraction(&self) -> f64 {
        if self.total_mass > 0.0 {
            self.unassigned_mass / self.total_mass
        } else {
            0.0
        }
    }
}

/// Chains extracted longest first.
///
/// Candidates are relation pairs `(i, j)` of unassigned nonbranched points,
/// taken in order of decreasing `d(i, j)` (rounded to [`SPAN_RESOLUTION`]),
/// then increasing `(i, j)`.  The chain between `i` and `j` uses the
/// unassigned nonbranched points `p` with `i -> p -> j`; among the chains
/// with the most points whose consecutive members are related, the one
/// with lexicographically smallest id sequence wins.
pub fn extract_chains(relation: &TransportRelation, branching: &BranchingSets) -> Vec<Vec<usize>> {
    let n = relation.n();
    let free: Vec<bool> = (0..n).map(|i| !branching.is_branching(i)).collect();
    let mut candidates: Vec<(i64, u32, u32)> = (0..n)
        .into_par_iter()
        .filter(|&i| free[i])
        .flat_map_iter(|i| {
            relation
                .successors(i)
                .iter()
                .filter(|&&j| free[j as usize])
                .map(move |&j| {
                    let span = relation.u()[j as usize] - relation.u()[i];
                    (-(span * SPAN_RESOLUTION).round() as i64, i as u32, j)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    candidates.par_sort_unstable();

    let mut taken = vec![false; n];
    let mut chains = Vec::new();
    for &(_, i, j) in &candidates {
        let (i, j) = (i as usize, j as usize);
        if taken[i] || taken[j] {
            continue;
        }
        let mut nodes = vec![i];
        nodes.extend(
            relation
                .successors(i)
                .iter()
                .map(|&p| p as usize)
                .filter(|&p| p != j && free[p] && !taken[p] && relation.contains(p, j)),
        );
        nodes.push(j);
        let chain = best_path(relation, &nodes);
        for &p in &chain {
            taken[p] = true;
        }
        chains.push(chain);
    }
    chains
}

/// Longest path from `nodes[0]` to the last node through nodes sorted by
/// `u`, consecutive members related; ties go to the smallest id sequence.
fn best_path(relation: &TransportRelation, nodes: &[usize]) -> Vec<usize> {
    let m = nodes.len();
    let step = |a: usize, b: usize| relation.u()[nodes[a]] < relation.u()[nodes[b]] && relation.contains(nodes[a], nodes[b]);
    if (1..m).all(|k| step(k - 1, k)) {
        return nodes.to_vec();
    }
    // count[k]: most points on a path from node k to the last node.
    let mut count = vec![0usize; m];
    count[m - 1] = 1;
    for k in (0..m - 1).rev() {
        count[k] = (k + 1..m)
            .filter(|&l| count[l] > 0 && step(k, l))
            .map(|l| count[l] + 1)
            .max()
            .unwrap_or(0);
    }
    let mut path = vec![nodes[0]];
    let mut k = 0;
    while k != m - 1 {
        k = (k + 1..m)
            .filter(|&l| count[l] + 1 == count[k] && step(k, l))
            .min_by_key(|&l| nodes[l])
            .expect("a successor on an optimal path");
        path.push(nodes[k]);
    }
    path
}

/// Signed distance, relation, branching sets and chains, without densities.
pub fn ray_decomposition(
    space: &DiscreteMMS,
    field: &SignedDistanceField,
    relation: &TransportRelation,
    config: &DecompositionConfig,
) -> RayDecomposition {
    let branching = branching_points(relation);
    let chains = extract_chains(relation, &branching);
    let u = &field.u;
    let w = space.weights();
    let mut assignment = vec![None; space.n()];
    let mut rays = Vec::with_capacity(chains.len());
    for (id, chain) in chains.into_iter().enumerate() {
        for &p in &chain {
            assignment[p] = Some(id);
        }
        let mut arc = vec![0.0];
        for k in 1..chain.len() {
            let next = arc[k - 1] + space.dist(chain[k - 1], chain[k]);
            arc.push(next);
        }
        let us: Vec<f64> = chain.iter().map(|&p| u[p]).collect();
        let (first, last) = (us[0], us[us.len() - 1]);
        let (flag, origin) = if last < 0.0 {
            (RayFlag::InnerOnly, arc[arc.len() - 1])
        } else if first >= 0.0 {
            (RayFlag::OuterOnly, 0.0)
        } else {
            let k = us.iter().position(|&x| x >= 0.0).expect("sign change");
            let t = -us[k - 1] / (us[k] - us[k - 1]);
            (RayFlag::CrossesS, arc[k - 1] + t * (arc[k] - arc[k - 1]))
        };
        let params = arc.iter().map(|&s| s - origin).collect();
        rays.push(Ray {
            mass: chain.iter().map(|&p| w[p]).sum(),
            touches_s: flag == RayFlag::OuterOnly && first == 0.0,
            points: chain,
            params,
            flag,
            density: None,
        });
    }
    let total_mass = space.total_mass();
    let unassigned_mass = (0..space.n()).filter(|&p| assignment[p].is_none()).map(|p| w[p]).sum();
    let mut decomp = RayDecomposition {
        rays,
        assignment,
        unassigned_mass,
        total_mass,
        warnings: Vec::new(),
    };
    if decomp.unassigned_fraction() > config.max_unassigned_fraction {
        decomp.warnings.push(format!(
            "degenerate decomposition: {:.3} of the mass is unassigned (threshold {})",
            decomp.unassigned_fraction(),
            config.max_unassigned_fraction
        ));
    }
    decomp
}

/// Density estimation knobs; the default width is `length / sqrt(points)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BinConfig {
    pub width: Option<f64>,
}

/// Fills `density` on every ray.
///
/// Each point's weight is spread over its Voronoi cell on the ray (end
/// cells mirror their inner half), then averaged over a window of
/// `width` as a ratio of masses to lengths, and finally normalized.
pub fn conditional_densities(space: &DiscreteMMS, decomp: &mut RayDecomposition, bins: &BinConfig) -> Result<()> {
    let w = space.weights();
    decomp.rays.par_iter_mut().enumerate().try_for_each(|(id, ray)| {
        if ray.points.len() < 2 {
            return Err(Error::EmptyRay(id));
        }
        let weights: Vec<f64> = ray.points.iter().map(|&p| w[p]).collect();
        ray.density = Some(ray_density(&ray.params, &weights, bins.width)?);
        Ok(())
    })
}

fn ray_density(params: &[f64], weights: &[f64], width: Option<f64>) -> Result<NeedleDensity> {
    let m = params.len();
    let length = params[m - 1] - params[0];
    let width = width.unwrap_or(length / (m as f64).sqrt());
    let cell: Vec<f64> = (0..m)
        .map(|k| {
            let left = if k > 0 { params[k] - params[k - 1] } else { params[1] - params[0] };
            let right = if k + 1 < m { params[k + 1] - params[k] } else { params[m - 1] - params[m - 2] };
            0.5 * (left + right)
        })
        .collect();
    let half = 0.5 * width;
    let prefix = |v: &[f64]| {
        let mut p = vec![0.0];
        p.extend(v.iter().scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        }));
        p
    };
    let (mass, len) = (prefix(weights), prefix(&cell));
    let smooth: Vec<f64> = (0..m)
        .map(|k| {
            let lo = params.partition_point(|&x| x < params[k] - half);
            let hi = params.partition_point(|&x| x <= params[k] + half);
            ((mass[hi] - mass[lo]) / (len[hi] - len[lo])).max(0.0)
        })
        .collect();

    let mut grid = params.to_vec();
    let mut values = smooth;
    if grid.binary_search_by(|x| x.total_cmp(&0.0)).is_err() {
        let k = grid.partition_point(|&x| x < 0.0);
        let t = -grid[k - 1] / (grid[k] - grid[k - 1]);
        let v = values[k - 1] + t * (values[k] - values[k - 1]);
        grid.insert(k, 0.0);
        values.insert(k, v);
    }
    while grid.len() < MIN_SAMPLES {
        let k = (1..grid.len())
            .max_by(|&a, &b| (grid[a] - grid[a - 1]).total_cmp(&(grid[b] - grid[b - 1])))
            .expect("two nodes");
        grid.insert(k, 0.5 * (grid[k - 1] + grid[k]));
        values.insert(k, 0.5 * (values[k - 1] + values[k]));
    }
    let h = NeedleDensity::new(grid, values)?;
    let z = h.integral();
    Ok(if z > 0.0 { h.scaled(1.0 / z) } else { h })
}

/// Per-ray `h(0) q` and their total.
pub fn surface_measure(decomp: &RayDecomposition) -> (Vec<f64>, f64) {
    let masses: Vec<f64> = decomp.rays.iter().map(Ray::surface_mass).collect();
    let total = masses.iter().sum();
    (masses, total)
}

/// Inner mean curvature of one ray with its surface weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSample {
    pub ray: usize,
    pub value: ExtendedReal,
    pub surface_mass: f64,
}

/// Left log-derivative of the density at the crossing on crossing rays;
/// `+inf` on outer-only rays that start on the zero level.
pub fn inner_mean_curvature_field(decomp: &RayDecomposition) -> Result<Vec<CurvatureSample>> {
    let mut out = Vec::new();
    for (id, ray) in decomp.rays.iter().enumerate() {
        match ray.flag {
            RayFlag::CrossesS => {
                let h = ray.density.as_ref().ok_or_else(|| Error::Precondition("densities not filled".into()))?;
                out.push(CurvatureSample {
                    ray: id,
                    value: inner_mean_curvature_from_density(h)?,
                    surface_mass: ray.surface_mass(),
                });
            }
            RayFlag::OuterOnly if ray.touches_s => out.push(CurvatureSample {
                ray: id,
                value: ExtendedReal::PosInf,
                surface_mass: 0.0,
            }),
            _ => {}
        }
    }
    Ok(out)
}

/// `q` level with respect to the surface masses; `None` without mass.
pub fn weighted_quantile(samples: &[CurvatureSample], q: f64) -> Option<ExtendedReal> {
    let mut s: Vec<&CurvatureSample> = samples.iter().filter(|c| c.surface_mass > 0.0).collect();
    s.sort_by(|a, b| a.value.partial_cmp(&b.value).expect("ordered").then(a.ray.cmp(&b.ray)));
    let total: f64 = s.iter().map(|c| c.surface_mass).sum();
    if !(total > 0.0) {
        return None;
    }
    let mut acc = 0.0;
    for c in &s {
        acc += c.surface_mass;
        if acc >= q * total {
            return Some(c.value);
        }
    }
    s.last().map(|c| c.value)
}

/// Masses of inner-only and outer-only rays.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteInnerCurvature {
    pub b_in_mass: f64,
    pub b_out_mass: f64,
}

pub fn finite_inner_curvature_check(decomp: &RayDecomposition) -> FiniteInnerCurvature {
    let sum = |flag| decomp.rays.iter().filter(|r| r.flag == flag).map(|r| r.mass).sum();
    FiniteInnerCurvature {
        b_in_mass: sum(RayFlag::InnerOnly),
        b_out_mass: sum(RayFlag::OuterOnly),
    }
}
