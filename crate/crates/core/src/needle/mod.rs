//! One-dimensional needle densities and the inequalities they satisfy.

mod backward;
mod bounds;
mod concavity;
mod density;

pub use backward::{backward_mc_from_level_masses, level_parameters, BackwardMeanCurvature, BACKWARD_WINDOW};
pub use bounds::{
    comparison_envelope, extremal_density, laplace_comparison_check, mcp_inradius_bound,
    riccati_compare, second_difference_excess, ComparisonReport, Envelope, EnvelopeReport,
    LaplaceReport, McpBoundReport, RiccatiReport, EXTREMAL_SAMPLES, SECOND_DIFFERENCE_FACTOR,
};
pub use concavity::{
    check_cd_density, check_mcp_density, inner_mean_curvature_from_density,
    one_sided_log_derivative, ConcavityReport, SigmaConvention, TOL_EXACT, TOL_SAMPLED,
};
pub use density::{uniform_grid_with_zero, NeedleDensity, Side, MIN_SAMPLES, STENCIL_POINTS};
