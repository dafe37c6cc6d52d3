//! Grid checks of the CD and MCP density inequalities, and one-sided
//! logarithmic derivatives.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::density::{one_sided_derivative, NeedleDensity, Side};
use crate::comparison::{pi_kappa, sin_kappa, CONJUGATE_RELATIVE_GAP};
use crate::error::{Error, Result};
use crate::extended::ExtendedReal;

/// Default tolerance for closed-form densities.
pub const TOL_EXACT: f64 = 1e-8;
/// Default tolerance for sampled or estimated densities.
pub const TOL_SAMPLED: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcavityReport {
    pub passed: bool,
    /// Largest value of `lower bound - h^{1/(N-1)}` seen; nonpositive when
    /// the inequality holds everywhere.
    pub worst_violation: ExtendedReal,
    /// `(r0, r_t, r1)` where the worst violation occurred.
    pub worst_triple: Option<(f64, f64, f64)>,
    pub tolerance: f64,
}

impl ConcavityReport {
    fn from_worst(worst: ExtendedReal, triple: Option<(f64, f64, f64)>, tol: f64) -> Self {
        Self {
            passed: worst <= tol,
            worst_violation: worst,
            worst_triple: triple,
            tolerance: tol,
        }
    }
}

/// Which coefficient enters the MCP inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaConvention {
    /// `sigma_{K/(N-1)}`, the same coefficient as in the CD inequality.
    #[default]
    KOverNMinusOne,
    /// `sigma_{K,N}`, i.e. `sin_{K/N}`.
    KN,
}

fn check_n(n: f64) -> Result<()> {
    if n > 1.0 && n.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("N = {n} must exceed 1")))
    }
}

/// Upper-triangular table `S[i][j] = sin_kappa(r_j - r_i)` for `i < j`,
/// with `NaN` marking separations at or beyond the conjugate distance.
struct SinTable {
    n: usize,
    s: Vec<f64>,
}

impl SinTable {
    fn new(grid: &[f64], kappa: f64) -> Self {
        let n = grid.len();
        let cap = pi_kappa(kappa)
            .finite()
            .map(|p| (1.0 - CONJUGATE_RELATIVE_GAP) * p)
            .unwrap_or(f64::INFINITY);
        let mut s = vec![f64::NAN; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = grid[j] - grid[i];
                if d < cap {
                    s[i * n + j] = sin_kappa(kappa, d);
                }
            }
        }
        Self { n, s }
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.s[i * self.n + j]
    }
}

fn powers(h: &NeedleDensity, n: f64) -> Vec<f64> {
    let p = 1.0 / (n - 1.0);
    h.values().iter().map(|v| v.powf(p)).collect()
}

fn worst_of(
    items: impl ParallelIterator<Item = (f64, (usize, usize, usize))>,
) -> Option<(f64, (usize, usize, usize))> {
    items.reduce_with(|a, b| if b.0 > a.0 { b } else { a })
}

/// Checks `f(r_t) >= sigma^{(1-t)}(theta) f(r_0) + sigma^{(t)}(theta) f(r_1)`
/// with `f = h^{1/(N-1)}`, `sigma = sigma_{K/(N-1)}`, over all grid triples.
pub fn check_cd_density(h: &NeedleDensity, k: f64, n: f64, tol: f64) -> Result<ConcavityReport> {
    check_n(n)?;
    let grid = h.grid();
    let m = grid.len();
    if m < 3 {
        return Err(Error::Degenerate("fewer than 3 abscissae".into()));
    }
    let f = powers(h, n);
    let table = SinTable::new(grid, k / (n - 1.0));
    let worst = worst_of((0..m).into_par_iter().flat_map_iter(|i| {
        let table = &table;
        let f = &f;
        (i + 2..m).flat_map(move |l| {
            let s_il = table.get(i, l);
            (i + 1..l).map(move |j| {
                let v = if s_il.is_nan() {
                    // sigma = +inf on both terms; 0 * inf = 0.
                    if f[i] > 0.0 || f[l] > 0.0 {
                        f64::INFINITY
                    } else {
                        -f[j]
                    }
                } else {
                    let lower = table.get(j, l) / s_il * f[i] + table.get(i, j) / s_il * f[l];
                    lower - f[j]
                };
                (v, (i, j, l))
            })
        })
    }));
    Ok(report(grid, worst, tol))
}

fn report(grid: &[f64], worst: Option<(f64, (usize, usize, usize))>, tol: f64) -> ConcavityReport {
    match worst {
        Some((v, (i, j, l))) => ConcavityReport::from_worst(
            ExtendedReal::from_f64(v),
            Some((grid[i], grid[j], grid[l])),
            tol,
        ),
        None => ConcavityReport::from_worst(ExtendedReal::NegInf, None, tol),
    }
}

/// One-endpoint inequality `f(gamma_t) >= sigma^{(1-t)}(|gamma_0 - gamma_1|) f(gamma_0)`
/// over all ordered grid pairs, both orientations.  The reported triple is
/// `(gamma_0, gamma_t, gamma_1)`.
pub fn check_mcp_density(
    h: &NeedleDensity,
    k: f64,
    n: f64,
    tol: f64,
    convention: SigmaConvention,
) -> Result<ConcavityReport> {
    check_n(n)?;
    let grid = h.grid();
    let m = grid.len();
    if m < 3 {
        return Err(Error::Degenerate("fewer than 3 abscissae".into()));
    }
    let f = powers(h, n);
    let kappa = match convention {
        SigmaConvention::KOverNMinusOne => k / (n - 1.0),
        SigmaConvention::KN => k / n,
    };
    let table = SinTable::new(grid, kappa);
    let worst = worst_of((0..m).into_par_iter().flat_map_iter(|i| {
        let table = &table;
        let f = &f;
        (i + 2..m).flat_map(move |l| {
            let s_il = table.get(i, l);
            (i + 1..l).flat_map(move |j| {
                // gamma_0 = r_i, gamma_1 = r_l, and the reverse orientation.
                let (fwd, bwd) = if s_il.is_nan() {
                    let inf = |x: f64| if x > 0.0 { f64::INFINITY } else { 0.0 };
                    (inf(f[i]) - f[j], inf(f[l]) - f[j])
                } else {
                    (
                        table.get(j, l) / s_il * f[i] - f[j],
                        table.get(i, j) / s_il * f[l] - f[j],
                    )
                };
                [(fwd, (i, j, l)), (bwd, (l, j, i))]
            })
        })
    }));
    Ok(report(grid, worst, tol))
}

/// One-sided derivative of `log h` at the grid abscissa `at`.
///
/// A vanishing value at `at` gives `-inf` from the left and `+inf` from the
/// right; a vanishing neighbour next to a positive value gives `+inf` from
/// the left and `-inf` from the right.
pub fn one_sided_log_derivative(h: &NeedleDensity, at: f64, side: Side) -> Result<ExtendedReal> {
    let i = h
        .index_of(at)
        .ok_or_else(|| Error::Domain(format!("r = {at} is not a grid abscissa")))?;
    let n = h.len();
    let neighbour = match side {
        Side::Left if i > 0 => i - 1,
        Side::Right if i + 1 < n => i + 1,
        _ => {
            return Err(Error::Degenerate(format!(
                "r = {at} is the extreme grid point on the {side:?} side"
            )))
        }
    };
    let v = h.values();
    if v[i] == 0.0 {
        return Ok(match side {
            Side::Left => ExtendedReal::NegInf,
            Side::Right if v[neighbour] > 0.0 => ExtendedReal::PosInf,
            Side::Right => ExtendedReal::NegInf,
        });
    }
    if v[neighbour] == 0.0 {
        return Ok(match side {
            Side::Left => ExtendedReal::PosInf,
            Side::Right => ExtendedReal::NegInf,
        });
    }
    let d = one_sided_derivative(h.grid(), |k| v[k].ln(), i, side, |k| v[k] > 0.0)
        .expect("two positive nodes are available");
    Ok(ExtendedReal::Finite(d))
}

/// Left logarithmic derivative of `h` at `r = 0`.
pub fn inner_mean_curvature_from_density(h: &NeedleDensity) -> Result<ExtendedReal> {
    one_sided_log_derivative(h, 0.0, Side::Left)
}
