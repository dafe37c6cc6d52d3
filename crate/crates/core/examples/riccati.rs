//! Sturm comparison for `u'' + kappa u <= 0`: a concave perturbation of
//! `cos + d sin` stays below it and ends no later.
//!
//! cargo run --example riccati

use needlecomp::comparison::{cos_kappa, sin_kappa};
use needlecomp::needle::{riccati_compare, NeedleDensity};

fn main() -> needlecomp::Result<()> {
    let (kappa, d) = (1.0, 0.3);
    for eps in [0.0, 0.05, 0.2] {
        let v = |r: f64| cos_kappa(kappa, r) + d * sin_kappa(kappa, r);
        // u = v - eps r^2 / 2 keeps u'' + u = -eps (1 + r^2 / 2) <= 0.
        let u = |r: f64| v(r) - 0.5 * eps * r * r;
        let mut b = 1.0;
        while u(b + 1e-3) > 0.0 {
            b += 1e-3;
        }
        let density = NeedleDensity::from_fn(0.0, b, 301, u)?;
        let rep = riccati_compare(&density, kappa, d, 1e-6)?;
        println!(
            "eps={eps:<5} b={:.4} b_bar={} passed={} length_ok={} worst={} at {:?}",
            rep.b, rep.b_bar, rep.comparison.passed, rep.length_ok, rep.comparison.worst_violation, rep.comparison.worst_at
        );
    }
    Ok(())
}
