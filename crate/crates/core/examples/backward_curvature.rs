//! Backward mean curvature from inner parallel masses compared with the
//! average of the per-ray inner curvature on a sampled Euclidean cone.
//!
//! cargo run --release --example backward_curvature [-- steps]

use needlecomp::discrete::*;
use needlecomp::models::{sharpness_witness, DEFAULT_COLLAR};

fn main() -> needlecomp::Result<()> {
    let steps: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(128);
    for n in [2.0, 3.0] {
        let w = sharpness_witness(0.0, 1.0, n, 64)?;
        let sample = w.space.truncated_cone_sample(w.r_trunc, steps, DEFAULT_COLLAR)?;
        let omega = w.space.truncation(&sample, w.r_trunc)?;
        let a = decompose(&sample, &omega, &DecompositionConfig::default(), &BinConfig::default())?;
        let field = inner_mean_curvature_field(&a.decomposition)?;
        let (num, den) = field
            .iter()
            .fold((0.0, 0.0), |(x, y), c| (x + c.surface_mass * c.value.to_f64(), y + c.surface_mass));
        let b = backward_mc_estimate(&a.decomposition, None, None)?;
        println!(
            "N={n}: rays {}, inner average {:.5}, backward limsup {} liminf {}",
            a.decomposition.rays.len(),
            num / den,
            b.limsup,
            b.liminf
        );
    }
    Ok(())
}
