//! The unit disk in the plane: inradius, curvature of the boundary and the
//! bound with `K = 0`, `N = 2`.
//!
//! cargo run --release --example disk [-- rings angles]

use std::time::Instant;

use needlecomp::discrete::*;

fn main() -> needlecomp::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<usize>().ok());
    let rings = args.next().flatten().unwrap_or(40);
    let angles = args.next().flatten().unwrap_or(50);
    let start = Instant::now();
    let space = disk_sample(rings, angles, rings / 4);
    let omega = SubsetSpec::sublevel(space.field().unwrap(), 1.0 + 1e-9)?;
    let rep = verify_inradius_bound(&space, &omega, 0.0, 2.0, &VerifyOptions::default())?;
    let median = weighted_quantile(&rep.mean_curvature, 0.5);
    println!("points {} (inside {})", space.n(), omega.inner().len());
    println!("inradius {:.4}, r = {}, margin {}", rep.inradius, rep.r_comparison, rep.margin);
    println!("H lower {:.4}, median {:?}", rep.h_lower, median.map(|m| m.to_f64()));
    println!("unassigned {:.3}, passed {}", rep.unassigned_fraction, rep.passed);
    for w in &rep.warnings {
        println!("warning: {w}");
    }
    println!("{:.2} s", start.elapsed().as_secs_f64());
    Ok(())
}
