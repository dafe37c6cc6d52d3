//! Backward mean curvature from masses of inner parallel level sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;

/// Number of difference quotients closest to `t = 0` that are used.
pub const BACKWARD_WINDOW: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BackwardMeanCurvature {
    /// Largest extrapolated quotient in the window (the reported value).
    pub limsup: ExtendedReal,
    /// Smallest extrapolated quotient in the window.
    pub liminf: ExtendedReal,
}

impl BackwardMeanCurvature {
    pub fn value(&self) -> ExtendedReal {
        self.limsup
    }
}

/// Estimates `lim_{t -> 0-} (p_t - p_0) / (t p_0)` from samples `(t_j, p_j)`
/// with `t_j <= 0`, one of them at `t = 0`.
///
/// Consecutive quotients are extrapolated linearly to `t = 0` before taking
/// the max/min over the last `window` of them.
pub fn backward_mc_from_level_masses(ts: &[f64], ps: &[f64], window: usize) -> Result<BackwardMeanCurvature> {
    if ts.len() != ps.len() {
        return Err(Error::InvalidParameter("t and p samples differ in length".into()));
    }
    if ts.iter().any(|&t| !(t <= 0.0)) {
        return Err(Error::InvalidParameter("level parameters must be nonpositive".into()));
    }
    if ps.iter().any(|&p| !(p >= 0.0)) {
        return Err(Error::InvalidParameter("level masses must be nonnegative".into()));
    }
    let mut samples: Vec<(f64, f64)> = ts.iter().copied().zip(ps.iter().copied()).collect();
    samples.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite t"));
    let (t_last, p0) = *samples
        .last()
        .ok_or_else(|| Error::Degenerate("no samples".into()))?;
    if t_last != 0.0 {
        return Err(Error::InvalidParameter("a sample at t = 0 is required".into()));
    }
    if p0 <= 0.0 {
        return Err(Error::Degenerate("p_0 = 0".into()));
    }
    let quotients: Vec<(f64, f64)> = samples[..samples.len() - 1]
        .iter()
        .map(|&(t, p)| (t, (p - p0) / (t * p0)))
        .collect();
    if quotients.is_empty() {
        return Err(Error::Degenerate("no samples with t < 0".into()));
    }
    let start = quotients.len().saturating_sub(window.max(1));
    let tail = &quotients[start..];
    let extrapolated: Vec<f64> = if tail.len() < 2 {
        tail.iter().map(|q| q.1).collect()
    } else {
        tail.windows(2)
            .map(|w| {
                let ((ta, qa), (tb, qb)) = (w[0], w[1]);
                (ta * qb - tb * qa) / (ta - tb)
            })
            .collect()
    };
    let to_ext = |x: f64| {
        if x.is_nan() {
            ExtendedReal::NegInf
        } else {
            ExtendedReal::from_f64(x)
        }
    };
    let max = extrapolated.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = extrapolated.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(BackwardMeanCurvature {
        limsup: to_ext(max),
        liminf: to_ext(min),
    })
}

/// `count + 1` equispaced level parameters on `[-window, 0]`.
pub fn level_parameters(window: f64, count: usize) -> Vec<f64> {
    (0..=count)
        .map(|j| -window * ((count - j) as f64 / count as f64) + 0.0)
        .collect()
}
