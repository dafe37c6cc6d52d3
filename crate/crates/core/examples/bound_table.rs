//! Table of the comparison radius `r_{K,H,N}` for the normalized curvature
//! signs, together with the case of the ball condition.
//!
//! cargo run --example bound_table [-- N]

use needlecomp::comparison::{ball_condition, inradius_comparison_r, ComparisonTriple};

fn main() -> needlecomp::Result<()> {
    let n: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3.0);
    let m = n - 1.0;
    println!("N = {n}");
    println!("{:>8} {:>8} {:>14}  case", "K", "H", "r");
    for k in [-m, 0.0, m] {
        for h in [-1.0, 0.0, 0.5, 1.0, 2.0, 4.0].map(|x| x * m) {
            let p = ComparisonTriple::new(k, h, n)?;
            let (kappa, lambda) = p.kappa_lambda();
            println!(
                "{:>8.3} {:>8.3} {:>14}  {:?}",
                k,
                h,
                inradius_comparison_r(&p).to_string(),
                ball_condition(kappa, lambda)
            );
        }
    }
    Ok(())
}
