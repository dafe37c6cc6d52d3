//! How far the curvature data may move before the radius grows by more
//! than `epsilon`.
//!
//! cargo run --example stability

use needlecomp::comparison::{inradius_comparison_r, stability_margin, ComparisonTriple};

fn main() -> needlecomp::Result<()> {
    for (k, h, n) in [(0.0, 2.0, 3.0), (2.0, 1.0, 3.0), (-2.0, 4.0, 3.0)] {
        let p = ComparisonTriple::new(k, h, n)?;
        let r = inradius_comparison_r(&p);
        for eps in [1e-1, 1e-2, 1e-3] {
            match stability_margin(&p, eps) {
                Ok(delta) => println!("({k}, {h}, {n}) r={r} eps={eps:<6} delta={delta:.3e}"),
                Err(e) => println!("({k}, {h}, {n}) r={r} eps={eps:<6} {e}"),
            }
        }
    }
    Ok(())
}
