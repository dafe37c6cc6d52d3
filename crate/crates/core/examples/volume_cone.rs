//! Mass ratios of balls around the tip of each model match the comparison
//! ratio, and a sampled cone reproduces the truncation mass.
//!
//! cargo run --release --example volume_cone

use needlecomp::models::{base_circle, ModelKind, ModelSpace, DEFAULT_COLLAR};

fn main() -> needlecomp::Result<()> {
    for kind in [ModelKind::EuclideanCone, ModelKind::HyperbolicCone, ModelKind::SphericalSuspension] {
        let space = ModelSpace::new(kind, 2.0, base_circle(32)?)?;
        let (k, n) = kind.matched_parameters(2.0);
        let rep = space.volume_cone_check(k, n, 0.5, 1.0, 1e-6)?;
        let sample = space.truncated_cone_sample(1.0, 128, DEFAULT_COLLAR)?;
        let omega = space.truncation(&sample, 1.0)?;
        println!(
            "{:<22} K={k:>3} N={n}  ratio {:.10} vs {:.10} passed={}  sample: {} points, truncation mass {:.4}",
            kind.name(),
            rep.mass_ratio,
            rep.comparison_ratio,
            rep.passed,
            sample.n(),
            omega.mass(&sample)
        );
    }
    Ok(())
}
