//! Sampled one-dimensional densities on an interval `[a, b]` containing 0.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 4;

/// Nonnegative samples `h(r_i)` on a strictly increasing grid with
/// `r_0 = a <= 0 <= b = r_last` and `0` itself among the abscissae.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeedleDensity {
    grid: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl NeedleDensity {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "{} abscissae but {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid.len() < MIN_SAMPLES {
            return Err(Error::Degenerate(format!(
                "a needle density needs at least {MIN_SAMPLES} samples, got {}",
                grid.len()
            )));
        }
        for (i, (&r, &h)) in grid.iter().zip(&values).enumerate() {
            if !r.is_finite() {
                return Err(Error::InvalidParameter(format!("abscissa {i} is not finite")));
            }
            if !(h.is_finite() && h >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "value {h} at r = {r} is not a finite nonnegative number"
                )));
            }
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("abscissae must be strictly increasing".into()));
        }
        if !grid.contains(&0.0) {
            return Err(Error::InvalidParameter("the grid must contain r = 0".into()));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` on `samples` equispaced points of `[a, b]`, with `0`
    /// inserted when it is not already a node.
    pub fn from_fn(a: f64, b: f64, samples: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if !(a <= 0.0 && 0.0 <= b && a < b) {
            return Err(Error::InvalidParameter(format!("[{a}, {b}] must contain 0")));
        }
        let grid = uniform_grid_with_zero(a, b, samples.max(2));
        let values = grid.iter().map(|&r| f(r)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn a(&self) -> f64 {
        self.grid[0]
    }

    pub fn b(&self) -> f64 {
        self.grid[self.grid.len() - 1]
    }

    pub fn zero_index(&self) -> usize {
        self.index_of(0.0).expect("grid contains 0 by construction")
    }

    /// Index of an exact grid abscissa.
    pub fn index_of(&self, r: f64) -> Option<usize> {
        self.grid
            .binary_search_by(|x| x.partial_cmp(&r).expect("finite grid"))
            .ok()
    }

    pub fn value_at_zero(&self) -> f64 {
        self.values[self.zero_index()]
    }

    /// Piecewise-linear interpolation of `h`; zero outside `[a, b]`.
    pub fn eval(&self, r: f64) -> f64 {
        if r < self.a() || r > self.b() {
            return 0.0;
        }
        let k = self.grid.partition_point(|&x| x <= r);
        if k == 0 {
            return self.values[0];
        }
        if k == self.len() {
            return self.values[k - 1];
        }
        let (x0, x1) = (self.grid[k - 1], self.grid[k]);
        let (y0, y1) = (self.values[k - 1], self.values[k]);
        let w = (r - x0) / (x1 - x0);
        y0 + w * (y1 - y0)
    }

    /// Trapezoidal integral over `[a, b]`.
    pub fn integral(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
            .sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// `r -> h(-r)` on `[-b, -a]`.
    pub fn reflected(&self) -> Self {
        Self {
            grid: self.grid.iter().rev().map(|r| 0.0 - r).collect(),
            values: self.values.iter().rev().copied().collect(),
        }
    }

    /// `r -> h(r / factor)` on `[factor a, factor b]`.
    pub fn dilated(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidParameter(format!("dilation factor {factor}")));
        }
        Self::new(self.grid.iter().map(|r| r * factor).collect(), self.values.clone())
    }

    /// Restriction to the grid points inside `[lo, hi]`.
    pub fn restricted(&self, lo: f64, hi: f64) -> Result<Self> {
        let (grid, values) = self
            .grid
            .iter()
            .zip(&self.values)
            .filter(|(r, _)| **r >= lo && **r <= hi)
            .map(|(r, h)| (*r, *h))
            .unzip();
        Self::new(grid, values)
    }

    /// Reads a CSV file with header `r,h`.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    pub fn from_csv_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "r" || &headers[1] != "h" {
            return Err(Error::Parse(format!(
                "expected header `r,h`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut grid = Vec::new();
        let mut values = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {}: {s:?}: {e}", line + 1)))
            };
            grid.push(parse(&record[0])?);
            values.push(parse(&record[1])?);
        }
        Self::new(grid, values).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.to_csv_writer(std::io::BufWriter::new(file))
    }

    pub fn to_csv_writer(&self, writer: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["r", "h"])?;
        for (r, h) in self.grid.iter().zip(&self.values) {
            w.write_record([format!("{r:.16e}"), format!("{h:.16e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `samples` equispaced points on `[a, b]` plus `0` if missing.
pub fn uniform_grid_with_zero(a: f64, b: f64, samples: usize) -> Vec<f64> {
    let m = samples - 1;
    let mut grid: Vec<f64> = (0..=m)
        .map(|k| {
            if k == m {
                b
            } else {
                a + (b - a) * (k as f64 / m as f64)
            }
        })
        .map(|r| r + 0.0)
        .collect();
    if !grid.contains(&0.0) {
        let k = grid.partition_point(|&x| x < 0.0);
        grid.insert(k, 0.0);
    }
    grid
}

/// Derivative at `xs[0]` of the Lagrange interpolant through `(xs, ys)`.
pub(crate) fn lagrange_derivative_at_first(xs: &[f64], ys: &[f64]) -> f64 {
    // The weights sum to zero, so differences against ys[0] are used; this
    // keeps constants exact.
    let x0 = xs[0];
    let m = xs.len();
    let mut acc = 0.0;
    for j in 1..m {
        let mut w = 1.0 / (xs[j] - x0);
        for k in 1..m {
            if k != j {
                w *= (x0 - xs[k]) / (xs[j] - xs[k]);
            }
        }
        acc += w * (ys[j] - ys[0]);
    }
    acc
}

/// Points used by the one-sided stencils (cubic interpolant).
pub const STENCIL_POINTS: usize = 4;

/// Contiguous run of indices starting at `i` and moving towards `side`,
/// stopping at the grid end, at `max` points, or before an index for which
/// `keep` is false.
pub(crate) fn stencil_indices(
    n: usize,
    i: usize,
    side: Side,
    max: usize,
    keep: impl Fn(usize) -> bool,
) -> Vec<usize> {
    let mut idx = vec![i];
    let mut k = i;
    while idx.len() < max {
        let next = match side {
            Side::Left if k > 0 => k - 1,
            Side::Right if k + 1 < n => k + 1,
            _ => break,
        };
        if !keep(next) {
            break;
        }
        idx.push(next);
        k = next;
    }
    idx
}

/// One-sided derivative at grid index `i` of the samples `g`, restricted to
/// indices where `keep` holds.  `None` when fewer than two nodes are usable.
pub(crate) fn one_sided_derivative(
    grid: &[f64],
    g: impl Fn(usize) -> f64,
    i: usize,
    side: Side,
    keep: impl Fn(usize) -> bool,
) -> Option<f64> {
    let idx = stencil_indices(grid.len(), i, side, STENCIL_POINTS, keep);
    if idx.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = idx.iter().map(|&k| grid[k]).collect();
    let ys: Vec<f64> = idx.iter().map(|&k| g(k)).collect();
    Some(lagrange_derivative_at_first(&xs, &ys))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(NeedleDensity::new(vec![-1.0, 0.0, 1.0], vec![1.0; 3]).is_err());
        assert!(NeedleDensity::new(vec![-1.0, -0.5, 0.5, 1.0], vec![1.0; 4]).is_err());
        assert!(NeedleDensity::new(vec![-1.0, -0.5, 0.0, 1.0], vec![1.0, -1.0, 1.0, 1.0]).is_err());
        assert!(NeedleDensity::new(vec![-1.0, 0.0, 0.0, 1.0], vec![1.0; 4]).is_err());
        assert!(NeedleDensity::new(vec![-1.0, -0.5, 0.0, 1.0], vec![1.0; 4]).is_ok());
    }

    #[test]
    fn grid_always_contains_zero() {
        let g = uniform_grid_with_zero(-1.0, 2.0, 10);
        assert!(g.contains(&0.0));
        assert_eq!(g[0], -1.0);
        assert_eq!(*g.last().unwrap(), 2.0);
        let g = uniform_grid_with_zero(-1.0, 0.0, 11);
        assert_eq!(g.len(), 11);
        assert!(g.last().unwrap().is_sign_positive());
    }

    #[test]
    fn lagrange_weights_are_exact_on_cubics() {
        let xs = [0.3, 0.1, -0.2, -0.25];
        let f = |x: f64| 2.0 - x + 3.0 * x * x - 0.5 * x * x * x;
        let df = |x: f64| -1.0 + 6.0 * x - 1.5 * x * x;
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        assert!((lagrange_derivative_at_first(&xs, &ys) - df(0.3)).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip() {
        let h = NeedleDensity::from_fn(-1.0, 0.0, 11, |r| (1.0 + r).powi(2)).unwrap();
        let mut buf = Vec::new();
        h.to_csv_writer(&mut buf).unwrap();
        let back = NeedleDensity::from_csv_reader(buf.as_slice()).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn csv_rejects_negative_values() {
        let text = "r,h\n-1,0\n-0.5,-0.25\n-0.2,1\n0,1\n";
        assert!(matches!(NeedleDensity::from_csv_reader(text.as_bytes()), Err(Error::Parse(_))));
    }

    #[test]
    fn interpolation_and_integral() {
        let h = NeedleDensity::from_fn(-1.0, 1.0, 21, |r| 1.0 + r).unwrap();
        assert!((h.eval(0.05) - 1.05).abs() < 1e-15);
        assert_eq!(h.eval(1.5), 0.0);
        assert!((h.integral() - 2.0).abs() < 1e-14);
    }
}
