//! Curvature-dimension checks on a single needle: the extremal density
//! passes CD and MCP, has inner mean curvature `H`, and its length is `r`.
//! A slightly bent copy fails CD.
//!
//! cargo run --example needle_checks

use needlecomp::needle::*;

fn main() -> needlecomp::Result<()> {
    let (k, h, n) = (1.0, 0.5, 2.5);
    let d = extremal_density(k, h, n, 1.0, 401)?;
    println!("extremal density on [{:.6}, 0], {} samples", d.a(), d.len());

    let cd = check_cd_density(&d, k, n, TOL_SAMPLED)?;
    let mcp = check_mcp_density(&d, k, n, TOL_SAMPLED, SigmaConvention::default())?;
    println!("CD  passed={} worst={}", cd.passed, cd.worst_violation);
    println!("MCP passed={} worst={}", mcp.passed, mcp.worst_violation);

    let mc = inner_mean_curvature_from_density(&d)?;
    println!("inner mean curvature {mc} (H = {h})");

    let bound = mcp_inradius_bound(&d, k, n, h, 1e-9)?;
    println!("length {:.9} <= r = {}: {}", bound.length, bound.max_length, bound.passed);

    // Convex bump on top of the extremal profile.
    let grid = d.grid().to_vec();
    let bent: Vec<f64> = grid
        .iter()
        .zip(d.values())
        .map(|(&r, &v)| v * (1.0 + 0.3 * (r - d.a() / 2.0).powi(2)))
        .collect();
    let bent = NeedleDensity::new(grid, bent)?;
    let cd = check_cd_density(&bent, k, n, TOL_SAMPLED)?;
    println!("bent copy: CD passed={} worst={} at {:?}", cd.passed, cd.worst_violation, cd.worst_triple);
    Ok(())
}
