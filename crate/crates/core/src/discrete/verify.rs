//! Inradius bound verification and the backward mean curvature estimate.

use serde::{Deserialize, Serialize};

use super::rays::{
    conditional_densities, inner_mean_curvature_field, ray_decomposition, surface_measure, weighted_quantile,
    BinConfig, CurvatureSample, DecompositionConfig, RayDecomposition, RayFlag,
};
use super::signed::{inradius_from_field, signed_distance, SignedDistanceField};
use super::subset::SubsetSpec;
use super::transport::transport_ordering;
use crate::comparison::{inradius_comparison_r, ComparisonTriple};
use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::mms::DiscreteMMS;
use crate::needle::{backward_mc_from_level_masses, level_parameters, BackwardMeanCurvature, BACKWARD_WINDOW};

/// Default quantile standing in for the essential infimum.
pub const DEFAULT_QUANTILE: f64 = 0.05;

/// Default absolute slack of the bound check.
pub const BOUND_TOL: f64 = 1e-6;

/// Signed distance plus a ray decomposition with densities filled.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub field: SignedDistanceField,
    pub decomposition: RayDecomposition,
}

pub fn decompose(
    space: &DiscreteMMS,
    omega: &SubsetSpec,
    config: &DecompositionConfig,
    bins: &BinConfig,
) -> Result<Analysis> {
    let field = signed_distance(space, omega)?;
    let relation = transport_ordering(space, &field.u, config.tol);
    let mut decomposition = ray_decomposition(space, &field, &relation, config);
    conditional_densities(space, &mut decomposition, bins)?;
    Ok(Analysis { field, decomposition })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub quantile: f64,
    pub tol: f64,
    /// Use this mean curvature bound instead of the estimate from data.
    pub h_override: Option<f64>,
    pub decomposition: DecompositionConfig,
    pub bins: BinConfig,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            quantile: DEFAULT_QUANTILE,
            tol: BOUND_TOL,
            h_override: None,
            decomposition: DecompositionConfig::default(),
            bins: BinConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub inradius: f64,
    pub h_lower: ExtendedReal,
    pub r_comparison: ExtendedReal,
    pub passed: bool,
    /// `r_comparison - inradius`.
    pub margin: ExtendedReal,
    pub surface_mass: f64,
    pub unassigned_fraction: f64,
    pub mean_curvature: Vec<CurvatureSample>,
    pub warnings: Vec<String>,
}

/// `r_{K,H,N}` with `H = +inf` read as radius 0 and `H = -inf` as no bound.
pub fn comparison_radius(k: f64, h: ExtendedReal, n: f64) -> Result<ExtendedReal> {
    match h {
        ExtendedReal::PosInf => Ok(ExtendedReal::Finite(0.0)),
        ExtendedReal::NegInf => Ok(ExtendedReal::PosInf),
        ExtendedReal::Finite(h) => Ok(inradius_comparison_r(&ComparisonTriple::new(k, h, n)?)),
    }
}

pub fn verify_inradius_bound(
    space: &DiscreteMMS,
    omega: &SubsetSpec,
    k: f64,
    n: f64,
    options: &VerifyOptions,
) -> Result<BoundReport> {
    ComparisonTriple::new(k, 0.0, n)?;
    if !(0.0..=1.0).contains(&options.quantile) {
        return Err(Error::InvalidParameter(format!("quantile {} outside [0, 1]", options.quantile)));
    }
    let analysis = decompose(space, omega, &options.decomposition, &options.bins)?;
    bound_report(space, omega, &analysis, k, n, options)
}

pub fn bound_report(
    space: &DiscreteMMS,
    omega: &SubsetSpec,
    analysis: &Analysis,
    k: f64,
    n: f64,
    options: &VerifyOptions,
) -> Result<BoundReport> {
    let decomp = &analysis.decomposition;
    let mean_curvature = inner_mean_curvature_field(decomp)?;
    let (_, surface_mass) = surface_measure(decomp);
    let h_lower = match options.h_override {
        Some(h) => ExtendedReal::from_f64(h),
        None => weighted_quantile(&mean_curvature, options.quantile).ok_or(Error::ZeroSurfaceMass)?,
    };
    let r_comparison = comparison_radius(k, h_lower, n)?;
    let inradius = inradius_from_field(space, omega, &analysis.field);
    let margin = r_comparison.add(ExtendedReal::Finite(-inradius));
    let passed = ExtendedReal::Finite(inradius) <= r_comparison.add(ExtendedReal::Finite(options.tol));
    let mut warnings = decomp.warnings.clone();
    if analysis.field.lipschitz_defect > options.decomposition.tol {
        warnings.push(format!("signed distance Lipschitz defect {:e}", analysis.field.lipschitz_defect));
    }
    Ok(BoundReport {
        inradius,
        h_lower,
        r_comparison,
        passed,
        margin,
        surface_mass,
        unassigned_fraction: decomp.unassigned_fraction(),
        mean_curvature,
        warnings,
    })
}

/// Rate of change of `p_t(Y) = sum h_a(t) q_a` at `t = 0-`, over crossing
/// rays `Y` (all of them when `rays` is `None`).  The default window is
/// [`BACKWARD_WINDOW`] times the median grid spacing of the rays.
pub fn backward_mc_estimate(
    decomp: &RayDecomposition,
    window: Option<f64>,
    rays: Option<&[usize]>,
) -> Result<BackwardMeanCurvature> {
    let all: Vec<usize> = (0..decomp.rays.len()).collect();
    let chosen: Vec<_> = rays
        .unwrap_or(&all)
        .iter()
        .map(|&id| {
            decomp
                .rays
                .get(id)
                .ok_or_else(|| Error::InvalidParameter(format!("no ray {id}")))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|r| r.flag == RayFlag::CrossesS)
        .map(|r| {
            r.density
                .as_ref()
                .map(|h| (h, r.mass))
                .ok_or_else(|| Error::Precondition("densities not filled".into()))
        })
        .collect::<Result<_>>()?;
    let window = match window {
        Some(w) if w > 0.0 => w,
        Some(w) => return Err(Error::InvalidParameter(format!("window {w} must be positive"))),
        None => {
            let mut gaps: Vec<f64> = chosen
                .iter()
                .flat_map(|(h, _)| h.grid().windows(2).map(|g| g[1] - g[0]))
                .collect();
            if gaps.is_empty() {
                return Err(Error::ZeroSurfaceMass);
            }
            let mid = gaps.len() / 2;
            let (_, median, _) = gaps.select_nth_unstable_by(mid, f64::total_cmp);
            BACKWARD_WINDOW as f64 * *median
        }
    };
    let ts = level_parameters(window, BACKWARD_WINDOW);
    let ps: Vec<f64> = ts.iter().map(|&t| chosen.iter().map(|(h, q)| h.eval(t) * q).sum()).collect();
    if !(ps[ps.len() - 1] > 0.0) {
        return Err(Error::ZeroSurfaceMass);
    }
    backward_mc_from_level_masses(&ts, &ps, BACKWARD_WINDOW)
}
