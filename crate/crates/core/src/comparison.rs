//! Generalized trigonometric functions, distortion coefficients and the
//! sharp inradius root `r_{K,H,N}`.
//!
//! `cos_k` and `sin_k` solve `v'' + k v = 0` with initial data `(1, 0)` and
//! `(0, 1)`.  With `k = K/(N-1)` and `l = H/(N-1)`, the comparison function
//! `s_{k,l} = cos_k - l sin_k` has a first positive zero exactly when the
//! pair `(k, l)` satisfies the ball condition, and that zero is `r_{K,H,N}`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;

/// Angles this close to `pi_k` (relative) are treated as conjugate points.
pub const CONJUGATE_RELATIVE_GAP: f64 = 1e-12;

/// Relative bracket width at which bisection stops.
pub const BISECTION_RTOL: f64 = 1e-12;

/// Curvature, mean-curvature and dimension parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTriple {
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "N")]
    pub n: f64,
}

impl ComparisonTriple {
    pub fn new(k: f64, h: f64, n: f64) -> Result<Self> {
        if !(k.is_finite() && h.is_finite() && n.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "(K, H, N) = ({k}, {h}, {n}) must be finite"
            )));
        }
        if n <= 1.0 {
            return Err(Error::InvalidParameter(format!("N = {n} must exceed 1")));
        }
        Ok(Self { k, h, n })
    }

    /// `(K/(N-1), H/(N-1))`, the arguments of `s_{k,l}`.
    pub fn kappa_lambda(&self) -> (f64, f64) {
        (self.k / (self.n - 1.0), self.h / (self.n - 1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BallConditionCase {
    PositiveKappa,
    ZeroKappaPositiveLambda,
    NegativeKappaLargeLambda,
    Fails,
}

impl BallConditionCase {
    pub fn holds(self) -> bool {
        self != BallConditionCase::Fails
    }
}

pub fn cos_kappa(kappa: f64, r: f64) -> f64 {
    if kappa > 0.0 {
        (kappa.sqrt() * r).cos()
    } else if kappa < 0.0 {
        ((-kappa).sqrt() * r).cosh()
    } else {
        1.0
    }
}

pub fn sin_kappa(kappa: f64, r: f64) -> f64 {
    if kappa > 0.0 {
        let sq = kappa.sqrt();
        (sq * r).sin() / sq
    } else if kappa < 0.0 {
        let sq = (-kappa).sqrt();
        (sq * r).sinh() / sq
    } else {
        r
    }
}

/// Derivative of `cos_kappa` in `r`.
pub fn cos_kappa_prime(kappa: f64, r: f64) -> f64 {
    -kappa * sin_kappa(kappa, r)
}

/// Derivative of `sin_kappa` in `r`.
pub fn sin_kappa_prime(kappa: f64, r: f64) -> f64 {
    cos_kappa(kappa, r)
}

/// First positive zero of `sin_kappa`: `pi / sqrt(kappa)` or `+inf`.
pub fn pi_kappa(kappa: f64) -> ExtendedReal {
    if kappa > 0.0 {
        ExtendedReal::Finite(PI / kappa.sqrt())
    } else {
        ExtendedReal::PosInf
    }
}

pub fn s_kappa_lambda(kappa: f64, lambda: f64, r: f64) -> f64 {
    cos_kappa(kappa, r) - lambda * sin_kappa(kappa, r)
}

pub fn s_kappa_lambda_prime(kappa: f64, lambda: f64, r: f64) -> f64 {
    cos_kappa_prime(kappa, r) - lambda * sin_kappa_prime(kappa, r)
}

pub fn ball_condition(kappa: f64, lambda: f64) -> BallConditionCase {
    if kappa > 0.0 {
        BallConditionCase::PositiveKappa
    } else if kappa == 0.0 && lambda > 0.0 {
        BallConditionCase::ZeroKappaPositiveLambda
    } else if kappa < 0.0 && lambda > (-kappa).sqrt() {
        BallConditionCase::NegativeKappaLargeLambda
    } else {
        BallConditionCase::Fails
    }
}

/// `J_{K,H,N}(r) = (s_{K/(N-1), H/(N-1)}(r))_+^{N-1}`.
pub fn jacobian_j(p: &ComparisonTriple, r: f64) -> f64 {
    let (kappa, lambda) = p.kappa_lambda();
    let s = s_kappa_lambda(kappa, lambda, r);
    if s <= 0.0 {
        0.0
    } else {
        s.powf(p.n - 1.0)
    }
}

/// First positive zero of `s_{kappa,lambda}` from the closed forms.
pub fn first_zero(kappa: f64, lambda: f64) -> ExtendedReal {
    match ball_condition(kappa, lambda) {
        BallConditionCase::PositiveKappa => {
            let sq = kappa.sqrt();
            ExtendedReal::Finite(sq.atan2(lambda) / sq)
        }
        BallConditionCase::ZeroKappaPositiveLambda => ExtendedReal::Finite(1.0 / lambda),
        BallConditionCase::NegativeKappaLargeLambda => {
            let sq = (-kappa).sqrt();
            ExtendedReal::Finite((sq / lambda).atanh() / sq)
        }
        BallConditionCase::Fails => ExtendedReal::PosInf,
    }
}

/// First positive zero of `s_{kappa,lambda}` by bracketed bisection.
///
/// The bracket is `(0, pi_kappa]` for positive `kappa`; otherwise the upper
/// end doubles until the sign changes.  Used as a fallback and as a cross
/// check for [`first_zero`].
pub fn first_zero_bisection(kappa: f64, lambda: f64) -> ExtendedReal {
    if !ball_condition(kappa, lambda).holds() {
        return ExtendedReal::PosInf;
    }
    let f = |r: f64| s_kappa_lambda(kappa, lambda, r);
    let mut hi = match pi_kappa(kappa) {
        ExtendedReal::Finite(p) => p,
        _ => {
            let mut hi = 1.0;
            while f(hi) > 0.0 {
                hi *= 2.0;
                if hi > 1e300 {
                    return ExtendedReal::PosInf;
                }
            }
            hi
        }
    };
    let mut lo = 0.0;
    // For kappa > 0 the first zero lies in (0, pi_kappa): s(pi_kappa) = -1.
    while hi - lo > BISECTION_RTOL * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ExtendedReal::Finite(0.5 * (lo + hi))
}

/// `r_{K,H,N}`, the first positive zero of `J_{K,H,N}`, or `+inf`.
pub fn inradius_comparison_r(p: &ComparisonTriple) -> ExtendedReal {
    let (kappa, lambda) = p.kappa_lambda();
    let r = first_zero(kappa, lambda);
    match r {
        ExtendedReal::Finite(x) if x.is_finite() && x > 0.0 => r,
        ExtendedReal::Finite(_) => first_zero_bisection(kappa, lambda),
        other => other,
    }
}

fn check_unit(t: f64) {
    assert!((0.0..=1.0).contains(&t), "t = {t} must lie in [0, 1]");
}

/// `sigma^{(t)}_{K,N}(theta) = sin_{K/N}(t theta) / sin_{K/N}(theta)` on
/// `[0, pi_{K/N})`, `+inf` beyond.
pub fn sigma_distortion(k: f64, n: f64, t: f64, theta: f64) -> ExtendedReal {
    check_unit(t);
    assert!(theta >= 0.0, "theta = {theta} must be nonnegative");
    assert!(n > 0.0, "N = {n} must be positive");
    let kappa = k / n;
    if theta == 0.0 {
        return ExtendedReal::Finite(t);
    }
    if let ExtendedReal::Finite(p) = pi_kappa(kappa) {
        if theta >= (1.0 - CONJUGATE_RELATIVE_GAP) * p {
            return ExtendedReal::PosInf;
        }
    }
    ExtendedReal::Finite(sin_kappa(kappa, t * theta) / sin_kappa(kappa, theta))
}

/// `tau^{(t)}_{K,N}(theta) = t^{1/N} sigma^{(t)}_{K,N-1}(theta)^{1-1/N}`.
pub fn tau_distortion(k: f64, n: f64, t: f64, theta: f64) -> ExtendedReal {
    check_unit(t);
    assert!(n >= 1.0, "N = {n} must be at least 1");
    if n == 1.0 {
        // sigma^{1 - 1/N} = sigma^0 = 1 by convention.
        return ExtendedReal::Finite(t);
    }
    let sigma = sigma_distortion(k, n - 1.0, t, theta);
    ExtendedReal::Finite(t.powf(1.0 / n)).mul(sigma.powf(1.0 - 1.0 / n))
}

/// Search grid for [`stability_margin`]: `delta_k = DELTA_MAX * 2^-k`.
pub const STABILITY_DELTA_MAX: f64 = 1.0;
pub const STABILITY_GRID_LEVELS: u32 = 60;

/// Largest `delta` on a dyadic grid such that
/// `r(K-d, H-d, N+d) <= r(K, H, N) + epsilon` holds at `delta` and at every
/// smaller grid point.
pub fn stability_margin(p_bar: &ComparisonTriple, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must be positive")));
    }
    let r_bar = inradius_comparison_r(p_bar)
        .finite()
        .ok_or_else(|| Error::Degenerate("r(K, H, N) is infinite".into()))?;
    let ok = |delta: f64| {
        let p = ComparisonTriple {
            k: p_bar.k - delta,
            h: p_bar.h - delta,
            n: p_bar.n + delta,
        };
        inradius_comparison_r(&p) <= r_bar + epsilon
    };
    let mut best = None;
    for level in (0..=STABILITY_GRID_LEVELS).rev() {
        let delta = STABILITY_DELTA_MAX * 0.5f64.powi(level as i32);
        if ok(delta) {
            best = Some(delta);
        } else {
            break;
        }
    }
    best.ok_or(Error::NoMargin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Classical RK4 on `v'' = -kappa v`.
    fn rk4(kappa: f64, v0: f64, dv0: f64, r: f64, steps: usize) -> f64 {
        let h = r / steps as f64;
        let (mut v, mut w) = (v0, dv0);
        for _ in 0..steps {
            let f = |v: f64, w: f64| (w, -kappa * v);
            let k1 = f(v, w);
            let k2 = f(v + 0.5 * h * k1.0, w + 0.5 * h * k1.1);
            let k3 = f(v + 0.5 * h * k2.0, w + 0.5 * h * k2.1);
            let k4 = f(v + h * k3.0, w + h * k3.1);
            v += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            w += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        }
        v
    }

    #[test]
    fn trig_examples() {
        assert_eq!(cos_kappa(0.0, 5.0), 1.0);
        assert_abs_diff_eq!(cos_kappa(1.0, PI / 2.0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cos_kappa(-1.0, 1.0), rk4(-1.0, 1.0, 0.0, 1.0, 2000), epsilon = 1e-12);
        assert_abs_diff_eq!(cos_kappa(-1.0, 1.0), 1.5430806348152437, epsilon = 1e-12);
        assert_eq!(sin_kappa(0.0, 3.5), 3.5);
        assert_abs_diff_eq!(sin_kappa(1.0, PI / 2.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sin_kappa(4.0, PI / 4.0), rk4(4.0, 0.0, 1.0, PI / 4.0, 2000), epsilon = 1e-12);
        assert_abs_diff_eq!(sin_kappa(4.0, PI / 4.0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn pi_kappa_examples() {
        assert_abs_diff_eq!(pi_kappa(4.0).to_f64(), PI / 2.0);
        assert_eq!(pi_kappa(0.0), ExtendedReal::PosInf);
        assert_eq!(pi_kappa(-1.0), ExtendedReal::PosInf);
    }

    #[test]
    fn s_examples() {
        assert_eq!(s_kappa_lambda(0.0, 1.0, 0.5), 0.5);
        assert_eq!(s_kappa_lambda(0.0, 1.0, 1.0), 0.0);
        let z = first_zero_bisection(-1.0, 2.0).to_f64();
        assert_abs_diff_eq!(z, 0.5493061443340549, epsilon = 1e-11);
        assert_abs_diff_eq!(s_kappa_lambda(-1.0, 2.0, z), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn ball_condition_examples() {
        assert_eq!(ball_condition(0.0, 1.0), BallConditionCase::ZeroKappaPositiveLambda);
        assert_eq!(ball_condition(-1.0, 0.5), BallConditionCase::Fails);
        assert_eq!(ball_condition(-1.0, 1.0), BallConditionCase::Fails);
        assert_eq!(ball_condition(1.0, -100.0), BallConditionCase::PositiveKappa);
        assert_eq!(ball_condition(0.0, 0.0), BallConditionCase::Fails);
    }

    #[test]
    fn jacobian_examples() {
        let p = ComparisonTriple::new(0.0, 2.0, 3.0).unwrap();
        assert_abs_diff_eq!(jacobian_j(&p, -0.5), 2.25, epsilon = 1e-15);
        assert_eq!(jacobian_j(&p, 0.0), 1.0);
        assert_eq!(jacobian_j(&p, 1.0), 0.0);
    }

    #[test]
    fn closed_forms_agree_with_bisection() {
        for &(k, l) in &[(1.0, 0.0), (1.0, -3.0), (2.5, 4.0), (0.0, 0.3), (-1.0, 2.0), (-0.25, 0.6)] {
            let a = first_zero(k, l).to_f64();
            let b = first_zero_bisection(k, l).to_f64();
            assert!((a - b).abs() <= 1e-11 * a.max(1.0), "{k} {l}: {a} vs {b}");
        }
    }

    #[test]
    fn inradius_examples() {
        for n in [2.0, 2.5, 3.0, 10.0] {
            let one = inradius_comparison_r(&ComparisonTriple::new(0.0, n - 1.0, n).unwrap());
            assert_abs_diff_eq!(one.to_f64(), 1.0, epsilon = 1e-12);
            let half_pi = inradius_comparison_r(&ComparisonTriple::new(n - 1.0, 0.0, n).unwrap());
            assert_abs_diff_eq!(half_pi.to_f64(), PI / 2.0, epsilon = 1e-12);
            let hyp = inradius_comparison_r(&ComparisonTriple::new(1.0 - n, 2.0 * (n - 1.0), n).unwrap());
            assert_abs_diff_eq!(hyp.to_f64(), 0.5f64.atanh(), epsilon = 1e-12);
        }
        let inf = inradius_comparison_r(&ComparisonTriple::new(-1.0, 0.0, 2.0).unwrap());
        assert_eq!(inf, ExtendedReal::PosInf);
    }

    #[test]
    fn sigma_and_tau_examples() {
        assert_abs_diff_eq!(sigma_distortion(0.0, 3.0, 0.3, 2.0).to_f64(), 0.3, epsilon = 1e-15);
        assert_eq!(sigma_distortion(2.0, 2.0, 0.3, PI), ExtendedReal::PosInf);
        assert_abs_diff_eq!(
            sigma_distortion(2.0, 2.0, 0.5, PI / 2.0).to_f64(),
            (PI / 4.0).sin(),
            epsilon = 1e-15
        );
        assert_eq!(sigma_distortion(1.0, 1.0, 0.7, 0.0), ExtendedReal::Finite(0.7));
        assert_abs_diff_eq!(tau_distortion(1.0, 3.0, 1.0, 1.0).to_f64(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(tau_distortion(0.0, 2.0, 0.25, 1.0).to_f64(), 0.25, epsilon = 1e-15);
        assert_eq!(tau_distortion(2.0, 3.0, 0.0, 10.0), ExtendedReal::Finite(0.0));
    }

    #[test]
    fn stability_examples() {
        let p = ComparisonTriple::new(0.0, 2.0, 3.0).unwrap();
        let d = stability_margin(&p, 0.1).unwrap();
        assert!(d > 0.0);
        let q = ComparisonTriple::new(-d, 2.0 - d, 3.0 + d).unwrap();
        assert!(inradius_comparison_r(&q) <= 1.1);
        let tiny = stability_margin(&p, 1e-9).unwrap();
        assert!(tiny < 1e-8);
        let inf = ComparisonTriple::new(-1.0, 0.0, 2.0).unwrap();
        assert!(matches!(stability_margin(&inf, 0.1), Err(Error::Degenerate(_))));
    }
}
