//! Truncated cones and suspensions attain the inradius bound: the margin
//! `r - inradius` shrinks as the radial grid is refined.
//!
//! cargo run --release --example sharpness [-- max_steps]

use std::time::Instant;

use needlecomp::discrete::{verify_inradius_bound, weighted_quantile, VerifyOptions};
use needlecomp::models::{sharpness_witness, DEFAULT_COLLAR};

fn main() -> needlecomp::Result<()> {
    let max_steps: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(256);
    let base_points = 64;
    println!("{:>22} {:>3} {:>5} {:>9} {:>9} {:>9} {:>10} {:>7}", "kind", "N", "steps", "R", "inradius", "r", "margin", "secs");
    for (k_of, chi) in [(0.0, 1.0), (-1.0, 2.0), (1.0, 0.0)] {
        for n in [2.0, 3.0] {
            let k = k_of * (n - 1.0);
            let w = sharpness_witness(k, chi, n, base_points)?;
            let mut steps = 32;
            while steps <= max_steps {
                let start = Instant::now();
                let sample = w.space.truncated_cone_sample(w.r_trunc, steps, DEFAULT_COLLAR)?;
                let omega = w.space.truncation(&sample, w.r_trunc)?;
                let rep = verify_inradius_bound(&sample, &omega, k, n, &VerifyOptions::default())?;
                let median = weighted_quantile(&rep.mean_curvature, 0.5).map(|m| m.to_f64());
                println!(
                    "{:>22} {:>3} {:>5} {:>9.5} {:>9.5} {:>9.5} {:>10.2e} {:>7.2}  pass={} H5%={:.4} H50%={:.4?} unassigned={:.3}",
                    w.space.kind.name(),
                    n,
                    steps,
                    w.r_trunc,
                    rep.inradius,
                    rep.r_comparison,
                    rep.margin.to_f64(),
                    start.elapsed().as_secs_f64(),
                    rep.passed,
                    rep.h_lower,
                    median,
                    rep.unassigned_fraction,
                );
                steps *= 2;
            }
        }
    }
    Ok(())
}
