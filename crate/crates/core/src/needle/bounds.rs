//! Comparison bounds along a single needle: the tangent envelope, Riccati
//! and Laplace comparison, the MCP length bound and extremal densities.

use serde::{Deserialize, Serialize};

use super::concavity::inner_mean_curvature_from_density;
use super::density::{one_sided_derivative, uniform_grid_with_zero, NeedleDensity, Side};
use crate::comparison::{
    cos_kappa, first_zero, inradius_comparison_r, jacobian_j, s_kappa_lambda, sin_kappa,
    ComparisonTriple,
};
use crate::error::{Error, Result};
use crate::extended::ExtendedReal;

/// Default number of samples for [`extremal_density`].
pub const EXTREMAL_SAMPLES: usize = 1001;

/// `r -> f0 cos_kappa(r) + slope sin_kappa(r)`, raised to `N - 1` after
/// taking the positive part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub kappa: f64,
    pub f0: f64,
    pub slope: f64,
    pub exponent: f64,
}

impl Envelope {
    /// The bound on `h^{1/(N-1)}`.
    pub fn root(&self, r: f64) -> f64 {
        self.f0 * cos_kappa(self.kappa, r) + self.slope * sin_kappa(self.kappa, r)
    }

    /// The bound on `h`.
    pub fn eval(&self, r: f64) -> f64 {
        let s = self.root(r);
        if s <= 0.0 {
            0.0
        } else {
            s.powf(self.exponent)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub envelope: Envelope,
    /// `-d+/dr log h` at 0, defined when `h(0) > 0`.
    pub mean_curvature: Option<ExtendedReal>,
    /// `r_{K,H,N}` for that `H`; the right end `b` may not exceed it.
    pub max_b: Option<ExtendedReal>,
    pub b: f64,
    pub length_ok: bool,
    /// `max_i (h(r_i) - envelope(r_i))`.
    pub worst_violation: f64,
    pub worst_at: f64,
    /// `max_i |h(r_i) - envelope(r_i)|`, zero for extremal densities.
    pub max_abs_gap: f64,
    pub passed: bool,
}

/// Tangent envelope of `h^{1/(N-1)}` at 0 built from the right derivative.
pub fn comparison_envelope(h: &NeedleDensity, k: f64, n: f64, tol: f64) -> Result<EnvelopeReport> {
    if !(n > 1.0) {
        return Err(Error::InvalidParameter(format!("N = {n} must exceed 1")));
    }
    let i0 = h.zero_index();
    if i0 + 1 == h.len() {
        return Err(Error::Degenerate(
            "r = 0 is the right end of the grid; reflect the density first".into(),
        ));
    }
    let p = 1.0 / (n - 1.0);
    let f: Vec<f64> = h.values().iter().map(|v| v.powf(p)).collect();
    let f0 = f[i0];
    let slope = one_sided_derivative(h.grid(), |k| f[k], i0, Side::Right, |_| true)
        .expect("a right neighbour exists");
    let envelope = Envelope {
        kappa: k / (n - 1.0),
        f0,
        slope,
        exponent: n - 1.0,
    };
    let (mean_curvature, max_b) = if f0 > 0.0 {
        let hc = -(n - 1.0) * slope / f0;
        let r = inradius_comparison_r(&ComparisonTriple { k, h: hc, n });
        (Some(ExtendedReal::Finite(hc)), Some(r))
    } else {
        (None, None)
    };
    let b = h.b();
    let length_ok = max_b.map_or(true, |m| m.add(ExtendedReal::Finite(tol)) >= b);
    let mut worst_violation = f64::NEG_INFINITY;
    let mut worst_at = 0.0;
    let mut max_abs_gap: f64 = 0.0;
    for (&r, &v) in h.grid().iter().zip(h.values()) {
        let gap = v - envelope.eval(r);
        if gap > worst_violation {
            worst_violation = gap;
            worst_at = r;
        }
        max_abs_gap = max_abs_gap.max(gap.abs());
    }
    Ok(EnvelopeReport {
        envelope,
        mean_curvature,
        max_b,
        b,
        length_ok,
        worst_violation,
        worst_at,
        max_abs_gap,
        passed: length_ok && worst_violation <= tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub passed: bool,
    /// Largest difference quotient of `log(lhs / rhs)` over a grid cell.
    pub worst_violation: ExtendedReal,
    pub worst_at: Option<f64>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiccatiReport {
    #[serde(flatten)]
    pub comparison: ComparisonReport,
    pub b: f64,
    /// First zero of `v = cos_kappa + d sin_kappa`.
    pub b_bar: ExtendedReal,
    pub length_ok: bool,
}

/// Scale for the distributional check `u'' + kappa u <= 0`.
pub const SECOND_DIFFERENCE_FACTOR: f64 = 10.0;

/// Largest value of the divided second difference of `u` plus `kappa u`,
/// minus the allowed slack `10 step^2 (1 + |kappa|) max|u|`.
pub fn second_difference_excess(grid: &[f64], u: &[f64], kappa: f64) -> (f64, f64) {
    let scale = u.iter().fold(1.0f64, |m, v| m.max(v.abs())) * (1.0 + kappa.abs());
    let mut worst = f64::NEG_INFINITY;
    let mut at = grid[0];
    for i in 1..grid.len() - 1 {
        let (hl, hr) = (grid[i] - grid[i - 1], grid[i + 1] - grid[i]);
        let d2 = 2.0 * ((u[i + 1] - u[i]) / hr - (u[i] - u[i - 1]) / hl) / (hl + hr);
        let step = hl.max(hr);
        let excess = d2 + kappa * u[i] - SECOND_DIFFERENCE_FACTOR * step * step * scale;
        if excess > worst {
            worst = excess;
            at = grid[i];
        }
    }
    (worst, at)
}

/// Checks that `log(lhs / rhs)` does not increase: the forward difference
/// quotient on each cell `[r_i, r_{i+1}]` with `lo < r_i < hi` (or
/// `r_i = lo` when `include_lo`) must stay below `tol`.
///
/// Difference quotients avoid the blow-up of a polynomial stencil where
/// `lhs` approaches zero.
fn compare_log_derivatives(
    grid: &[f64],
    lhs: &[f64],
    rhs: &[f64],
    include_lo: bool,
    tol: f64,
) -> ComparisonReport {
    let n = grid.len();
    let mut worst = ExtendedReal::NegInf;
    let mut worst_at = None;
    for i in 0..n - 1 {
        if i == 0 && !include_lo {
            continue;
        }
        // Once lhs vanishes its log-derivative is -inf.
        if lhs[i] <= 0.0 || lhs[i + 1] <= 0.0 {
            continue;
        }
        let v = if rhs[i] <= 0.0 || rhs[i + 1] <= 0.0 {
            ExtendedReal::PosInf
        } else {
            let step = grid[i + 1] - grid[i];
            ExtendedReal::Finite(((lhs[i + 1] / lhs[i]).ln() - (rhs[i + 1] / rhs[i]).ln()) / step)
        };
        if v > worst {
            worst = v;
            worst_at = Some(grid[i]);
        }
    }
    ComparisonReport {
        passed: worst <= tol,
        worst_violation: worst,
        worst_at,
        tolerance: tol,
    }
}

/// Checks `d+/dt log u <= (log v)'` with `v = cos_kappa + d sin_kappa` on
/// `[0, b)` and `b <= ` first zero of `v`.
///
/// `u` must start at `r = 0` with `u(0) = 1`, satisfy `u'' + kappa u <= 0`
/// in the grid sense and `u'(0) <= d`.
pub fn riccati_compare(u: &NeedleDensity, kappa: f64, d: f64, tol: f64) -> Result<RiccatiReport> {
    if u.a() != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "u must be sampled on [0, b], got a = {}",
            u.a()
        )));
    }
    let values = u.values();
    let grid = u.grid();
    if (values[0] - 1.0).abs() > 1e-9 {
        return Err(Error::Precondition(format!("u(0) = {} differs from 1", values[0])));
    }
    let (excess, at) = second_difference_excess(grid, values, kappa);
    if excess > 0.0 {
        return Err(Error::Precondition(format!(
            "u'' + kappa u > 0 near t = {at} (excess {excess:e})"
        )));
    }
    let du0 = one_sided_derivative(grid, |k| values[k], 0, Side::Right, |_| true)
        .expect("at least two nodes");
    if du0 > d + tol.max(1e-6) {
        return Err(Error::Precondition(format!("u'(0) = {du0} exceeds d = {d}")));
    }
    let v: Vec<f64> = grid.iter().map(|&t| s_kappa_lambda(kappa, -d, t)).collect();
    let comparison = compare_log_derivatives(grid, values, &v, true, tol);
    let b = u.b();
    let b_bar = first_zero(kappa, -d);
    let length_ok = b_bar.add(ExtendedReal::Finite(tol)) >= b;
    Ok(RiccatiReport {
        comparison: ComparisonReport {
            passed: comparison.passed && length_ok,
            ..comparison
        },
        b,
        b_bar,
        length_ok,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaplaceReport {
    #[serde(flatten)]
    pub comparison: ComparisonReport,
    pub mean_curvature: ExtendedReal,
}

/// With `h~(r) = h(-r)`, checks `d+/dr log h~ <= (N-1) s'/s` on `(0, -a)`
/// for `s = s_{K/(N-1), chi}`.
///
/// The density is assumed to satisfy the CD inequality (the caller runs
/// [`check_cd_density`](super::check_cd_density)); the inner mean
/// curvature must be at least `chi (N-1)` up to `tol`.
pub fn laplace_comparison_check(
    h: &NeedleDensity,
    k: f64,
    n: f64,
    chi: f64,
    tol: f64,
) -> Result<LaplaceReport> {
    if !(n > 1.0) {
        return Err(Error::InvalidParameter(format!("N = {n} must exceed 1")));
    }
    let mc = inner_mean_curvature_from_density(h)?;
    if mc < chi * (n - 1.0) - tol {
        return Err(Error::Precondition(format!(
            "inner mean curvature {mc} is below chi (N-1) = {}",
            chi * (n - 1.0)
        )));
    }
    let reflected = h.reflected();
    let kappa = k / (n - 1.0);
    let grid = reflected.grid();
    let i0 = reflected.zero_index();
    let g = &grid[i0..];
    let lhs = &reflected.values()[i0..];
    let rhs: Vec<f64> = g
        .iter()
        .map(|&r| {
            let s = s_kappa_lambda(kappa, chi, r);
            if s <= 0.0 {
                0.0
            } else {
                s.powf(n - 1.0)
            }
        })
        .collect();
    let comparison = if g.len() < 2 {
        ComparisonReport {
            passed: true,
            worst_violation: ExtendedReal::NegInf,
            worst_at: None,
            tolerance: tol,
        }
    } else {
        compare_log_derivatives(g, lhs, &rhs, false, tol)
    };
    Ok(LaplaceReport {
        comparison,
        mean_curvature: mc,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McpBoundReport {
    /// `-a`, the length of the needle inside the region.
    pub length: f64,
    /// `r_{K,H,N}`.
    pub max_length: ExtendedReal,
    pub passed: bool,
    /// Left log-derivative at 0 estimated from the samples, for comparison
    /// with the assumed `H`.
    pub estimated_mean_curvature: ExtendedReal,
    pub hypothesis_holds: bool,
}

/// `-a <= r_{K,H,N} + tol` for a needle whose inner mean curvature is
/// assumed to be at least `H`.
pub fn mcp_inradius_bound(h: &NeedleDensity, k: f64, n: f64, hc: f64, tol: f64) -> Result<McpBoundReport> {
    let p = ComparisonTriple::new(k, hc, n)?;
    let max_length = inradius_comparison_r(&p);
    let length = -h.a();
    let est = inner_mean_curvature_from_density(h)?;
    Ok(McpBoundReport {
        length,
        max_length,
        passed: max_length.add(ExtendedReal::Finite(tol)) >= length,
        estimated_mean_curvature: est,
        hypothesis_holds: est >= hc - tol.max(crate::needle::concavity::TOL_SAMPLED),
    })
}

/// `h(r) = h0 J_{K,H,N}(-r)` on `[-r_{K,H,N}, 0]` with `samples` nodes.
pub fn extremal_density(k: f64, hc: f64, n: f64, h0: f64, samples: usize) -> Result<NeedleDensity> {
    let p = ComparisonTriple::new(k, hc, n)?;
    if !(h0 > 0.0 && h0.is_finite()) {
        return Err(Error::InvalidParameter(format!("h0 = {h0} must be positive")));
    }
    let r = inradius_comparison_r(&p)
        .finite()
        .ok_or_else(|| Error::Degenerate("r_{K,H,N} is infinite (ball condition fails)".into()))?;
    let grid = uniform_grid_with_zero(-r, 0.0, samples.max(super::density::MIN_SAMPLES));
    let values = grid.iter().map(|&x| h0 * jacobian_j(&p, -x)).collect();
    NeedleDensity::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::needle::concavity::{check_cd_density, TOL_EXACT};
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn riccati_accepts_u_vanishing_at_the_end() {
        // u = cos r + d sin r - eps r^2 / 2 has u'' + u < 0 and hits zero
        // before v = cos r + d sin r does.
        let (d, eps) = (0.3, 0.2);
        let u = |r: f64| r.cos() + d * r.sin() - 0.5 * eps * r * r;
        let mut b = 1.6;
        while u(b + 1e-4) > 0.0 {
            b += 1e-4;
        }
        let density = NeedleDensity::from_fn(0.0, b, 301, u).unwrap();
        let rep = riccati_compare(&density, 1.0, d, 1e-6).unwrap();
        assert!(rep.comparison.passed, "{rep:?}");
        assert!(rep.b < rep.b_bar.to_f64());

        // lhs / rhs growing on one cell must be caught there.
        let grid: Vec<f64> = (0..5).map(|i| i as f64 * 0.25).collect();
        let rhs = vec![1.0; 5];
        let lhs = vec![1.0, 0.9, 0.95, 0.5, 0.0];
        let rep = compare_log_derivatives(&grid, &lhs, &rhs, true, 1e-6);
        assert!(!rep.passed);
        assert_eq!(rep.worst_at, Some(0.25));
        assert!((rep.worst_violation.to_f64() - 4.0 * (0.95f64 / 0.9).ln()).abs() < 1e-12);
    }

    #[test]
    fn extremal_examples() {
        let h = extremal_density(0.0, 2.0, 3.0, 1.0, 101).unwrap();
        assert_eq!(h.a(), -1.0);
        for (&r, &v) in h.grid().iter().zip(h.values()) {
            assert!((v - (1.0 + r).powi(2)).abs() < 1e-14);
        }
        let h = extremal_density(2.0, 0.0, 3.0, 1.0, 101).unwrap();
        assert!((h.a() + FRAC_PI_2).abs() < 1e-15);
        for (&r, &v) in h.grid().iter().zip(h.values()) {
            assert!((v - r.cos().powi(2)).abs() < 1e-14);
        }
        let h = extremal_density(-2.0, 4.0, 3.0, 1.0, 101).unwrap();
        assert!((h.a() + 0.5f64.atanh()).abs() < 1e-14);
        assert!(h.values()[0].abs() < 1e-9);
        assert!(matches!(
            extremal_density(-1.0, 0.0, 2.0, 1.0, 101),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn extremal_is_cd_with_mean_curvature_h() {
        let h = extremal_density(0.0, 2.0, 3.0, 1.0, EXTREMAL_SAMPLES).unwrap();
        let mc = inner_mean_curvature_from_density(&h).unwrap().to_f64();
        assert!((mc - 2.0).abs() < 1e-6);
        let h = extremal_density(0.0, 2.0, 3.0, 1.0, 101).unwrap();
        assert!(check_cd_density(&h, 0.0, 3.0, TOL_EXACT).unwrap().passed);
    }

    #[test]
    fn envelope_examples() {
        let h = NeedleDensity::from_fn(0.0, FRAC_PI_2, 1001, |r| r.cos().powi(2)).unwrap();
        let rep = comparison_envelope(&h, 2.0, 3.0, TOL_EXACT).unwrap();
        assert!(rep.passed);
        assert!(rep.max_abs_gap < 1e-8);
        assert!((rep.max_b.unwrap().to_f64() - FRAC_PI_2).abs() < 1e-6);

        let h = extremal_density(0.0, 2.0, 3.0, 1.0, 1001).unwrap().reflected();
        let rep = comparison_envelope(&h, 0.0, 3.0, TOL_EXACT).unwrap();
        assert!(rep.passed);
        assert!((rep.max_b.unwrap().to_f64() - 1.0).abs() < 1e-9);
        assert_eq!(rep.b, 1.0);

        let h = NeedleDensity::from_fn(-1.0, 1.0, 21, |_| 1.0).unwrap();
        let rep = comparison_envelope(&h, 0.0, 3.0, TOL_EXACT).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.max_b, Some(ExtendedReal::PosInf));
    }

    #[test]
    fn riccati_examples() {
        let u = NeedleDensity::from_fn(0.0, FRAC_PI_2 - 0.05, 400, f64::cos).unwrap();
        assert!(riccati_compare(&u, 1.0, 0.0, 1e-8).unwrap().comparison.passed);
        let u = NeedleDensity::from_fn(0.0, 0.4, 50, |t| 1.0 - 2.0 * t).unwrap();
        let rep = riccati_compare(&u, 0.0, -2.0, 1e-8).unwrap();
        assert!(rep.comparison.passed);
        assert!((rep.b_bar.to_f64() - 0.5).abs() < 1e-15);
        let u = NeedleDensity::from_fn(0.0, 0.6, 400, |t| t.cos() * (1.0 - 0.1 * t * t)).unwrap();
        assert!(riccati_compare(&u, 1.0, 0.0, 1e-8).unwrap().comparison.passed);
        let u = NeedleDensity::from_fn(0.0, 0.4, 50, |t| (1.0 - t).powi(2)).unwrap();
        assert!(matches!(riccati_compare(&u, 0.0, -2.0, 1e-8), Err(Error::Precondition(_))));
        let u = NeedleDensity::from_fn(0.0, 0.4, 50, |t| 2.0 - t).unwrap();
        assert!(matches!(riccati_compare(&u, 0.0, -1.0, 1e-8), Err(Error::Precondition(_))));
    }

    #[test]
    fn laplace_examples() {
        let h = extremal_density(0.0, 2.0, 3.0, 1.0, EXTREMAL_SAMPLES).unwrap();
        let rep = laplace_comparison_check(&h, 0.0, 3.0, 1.0, 1e-8).unwrap();
        assert!(rep.comparison.passed);
        assert!(rep.comparison.worst_violation.to_f64().abs() < 1e-8);

        let h = NeedleDensity::from_fn(-1.0, 0.0, 21, |_| 1.0).unwrap();
        assert!(laplace_comparison_check(&h, 0.0, 3.0, 0.0, 1e-8).unwrap().comparison.passed);

        let h = extremal_density(2.0, 0.0, 3.0, 1.0, EXTREMAL_SAMPLES).unwrap();
        let rep = laplace_comparison_check(&h, 2.0, 3.0, 0.0, 1e-8).unwrap();
        assert!(rep.comparison.passed);

        let h = extremal_density(0.0, 1.0, 3.0, 1.0, 201).unwrap();
        assert!(matches!(
            laplace_comparison_check(&h, 0.0, 3.0, 1.0, 1e-8),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn mcp_bound_examples() {
        let h = extremal_density(0.0, 1.0, 2.0, 1.0, 201).unwrap();
        let rep = mcp_inradius_bound(&h, 0.0, 2.0, 1.0, 1e-9).unwrap();
        assert!(rep.passed);
        assert!((rep.length - rep.max_length.to_f64()).abs() < 1e-9);

        let h = extremal_density(0.0, 2.0, 2.0, 1.0, 201).unwrap();
        let truncated = h.restricted(-0.4, 0.0).unwrap();
        assert!(mcp_inradius_bound(&truncated, 0.0, 2.0, 2.0, 1e-9).unwrap().passed);
        let stretched = h.dilated(1.2).unwrap();
        let rep = mcp_inradius_bound(&stretched, 0.0, 2.0, 2.0, 1e-9).unwrap();
        assert!(!rep.passed);
        assert!(!rep.hypothesis_holds);
    }
}
