//! Finite metric measure spaces.
//!
//! Distances are stored densely, computed from Euclidean coordinates, or
//! evaluated in closed form for samples of cone and suspension models, so
//! that samples with tens of thousands of points never need an `n^2` matrix.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{ConeMetric, ModelKind};

/// Largest sample that is materialized as a dense matrix on request.
pub const DENSE_EXPORT_CAP: usize = 5000;

/// Relative slack for the triangle inequality check.
pub const TRIANGLE_RTOL: f64 = 1e-9;

/// Spaces up to this size get their triangle inequality checked on load.
pub const TRIANGLE_CHECK_MAX: usize = 400;

#[derive(Debug, Clone, PartialEq)]
pub enum Metric {
    /// Row-major `n x n` matrix.
    Dense(Vec<f64>),
    /// Points in `R^dim`, row-major coordinates.
    Euclidean { dim: usize, coords: Vec<f64> },
    Cone(ConeMetric),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMMS {
    metric: Metric,
    weights: Vec<f64>,
    labels: Option<Vec<String>>,
    field: Option<Vec<f64>>,
}

impl DiscreteMMS {
    pub fn new(metric: Metric, weights: Vec<f64>) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::Degenerate("empty space".into()));
        }
        match &metric {
            Metric::Dense(m) => {
                if m.len() != n * n {
                    return Err(Error::InvalidParameter(format!(
                        "metric has {} entries, expected {}",
                        m.len(),
                        n * n
                    )));
                }
                for i in 0..n {
                    if m[i * n + i] != 0.0 {
                        return Err(Error::InvalidParameter(format!("d({i},{i}) is not zero")));
                    }
                    for j in 0..i {
                        let (a, b) = (m[i * n + j], m[j * n + i]);
                        if !(a.is_finite() && a >= 0.0) {
                            return Err(Error::InvalidParameter(format!("d({i},{j}) = {a}")));
                        }
                        if a != b {
                            return Err(Error::InvalidParameter(format!(
                                "metric is not symmetric at ({i},{j})"
                            )));
                        }
                    }
                }
            }
            Metric::Euclidean { dim, coords } => {
                if *dim == 0 || coords.len() != dim * n || coords.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidParameter("bad Euclidean coordinates".into()));
                }
            }
            Metric::Cone(c) => {
                if c.len() != n {
                    return Err(Error::InvalidParameter("cone metric size mismatch".into()));
                }
            }
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter("weights must be finite and nonnegative".into()));
        }
        if !(weights.iter().sum::<f64>() > 0.0) {
            return Err(Error::Degenerate("total mass is zero".into()));
        }
        Ok(Self {
            metric,
            weights,
            labels: None,
            field: None,
        })
    }

    pub fn dense(n: usize, metric: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != n {
            return Err(Error::InvalidParameter(format!("{} weights for n = {n}", weights.len())));
        }
        Self::new(Metric::Dense(metric), weights)
    }

    pub fn euclidean(dim: usize, coords: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        Self::new(Metric::Euclidean { dim, coords }, weights)
    }

    /// Shortest-path metric of a connected weighted graph (Floyd-Warshall).
    pub fn from_graph(n: usize, edges: &[(usize, usize, f64)], weights: Vec<f64>) -> Result<Self> {
        let mut d = vec![f64::INFINITY; n * n];
        for i in 0..n {
            d[i * n + i] = 0.0;
        }
        for &(a, b, w) in edges {
            if a >= n || b >= n || !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidParameter(format!("bad edge ({a}, {b}, {w})")));
            }
            if w < d[a * n + b] {
                d[a * n + b] = w;
                d[b * n + a] = w;
            }
        }
        for k in 0..n {
            for i in 0..n {
                let dik = d[i * n + k];
                if dik.is_infinite() {
                    continue;
                }
                for j in 0..n {
                    let cand = dik + d[k * n + j];
                    if cand < d[i * n + j] {
                        d[i * n + j] = cand;
                    }
                }
            }
        }
        if d.iter().any(|x| x.is_infinite()) {
            return Err(Error::Degenerate("graph is disconnected".into()));
        }
        // Enforce exact symmetry against summation order.
        for i in 0..n {
            for j in 0..i {
                let m = d[i * n + j].min(d[j * n + i]);
                d[i * n + j] = m;
                d[j * n + i] = m;
            }
        }
        Self::dense(n, d, weights)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::InvalidParameter("label count differs from n".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Attaches an auxiliary real field (for example the radial coordinate
    /// of a cone sample), usable for sublevel-set regions.
    pub fn with_field(mut self, field: Vec<f64>) -> Result<Self> {
        if field.len() != self.n() || field.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("field must hold n finite values".into()));
        }
        self.field = Some(field);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn field(&self) -> Option<&[f64]> {
        self.field.as_deref()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match &self.metric {
            Metric::Dense(m) => m[i * self.n() + j],
            Metric::Euclidean { dim, coords } => {
                let (a, b) = if i <= j { (i, j) } else { (j, i) };
                let (pa, pb) = (&coords[a * dim..(a + 1) * dim], &coords[b * dim..(b + 1) * dim]);
                pa.iter().zip(pb).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
            }
            Metric::Cone(c) => c.dist(i, j),
        }
    }

    /// Largest violation `d(i,k) - d(i,j) - d(j,k)` relative to `max(1, d(i,k))`.
    pub fn triangle_defect(&self) -> f64 {
        let n = self.n();
        let mut worst = f64::NEG_INFINITY;
        for i in 0..n {
            for k in 0..n {
                let dik = self.dist(i, k);
                for j in 0..n {
                    let v = (dik - self.dist(i, j) - self.dist(j, k)) / dik.max(1.0);
                    worst = worst.max(v);
                }
            }
        }
        worst
    }

    pub fn to_dense(&self) -> Result<Self> {
        let n = self.n();
        if n > DENSE_EXPORT_CAP {
            return Err(Error::SizeCap {
                points: n,
                cap: DENSE_EXPORT_CAP,
            });
        }
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = self.dist(i, j);
            }
        }
        Ok(Self {
            metric: Metric::Dense(m),
            ..self.clone()
        })
    }

    /// Keys `d(pivot, i)`; by the triangle inequality
    /// `d(i, j) >= |key_i - key_j|`.
    pub fn pivot_keys(&self, pivot: usize) -> Vec<f64> {
        (0..self.n()).map(|i| self.dist(pivot, i)).collect()
    }

    /// Point closest to the origin of the key space: the cone tip for cone
    /// samples, otherwise point 0.
    pub fn default_pivot(&self) -> usize {
        match &self.metric {
            Metric::Cone(c) => c.tip().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_reader(BufReader::new(std::fs::File::open(path)?))
    }

    pub fn from_json_reader(reader: impl Read) -> Result<Self> {
        let repr: MmsRepr = serde_json::from_reader(reader)?;
        Self::try_from(repr)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        self.to_json_writer(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn to_json_writer(&self, writer: impl Write) -> Result<()> {
        crate::json::to_writer(writer, &MmsRepr::from(self))
    }

    /// Reads a comma-separated `n x n` matrix file and a weights file with
    /// one value per line (an optional non-numeric header line is skipped).
    pub fn read_csv_pair(matrix: impl AsRef<Path>, weights: impl AsRef<Path>) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (line_no, line) in BufReader::new(std::fs::File::open(matrix)?).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|e| {
                        Error::Parse(format!("matrix line {}: {s:?}: {e}", line_no + 1))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Parse("matrix is not square".into()));
        }
        let mut w = Vec::new();
        for (line_no, line) in BufReader::new(std::fs::File::open(weights)?).lines().enumerate() {
            let line = line?;
            let s = line.trim();
            if s.is_empty() {
                continue;
            }
            match s.parse::<f64>() {
                Ok(x) => w.push(x),
                Err(_) if line_no == 0 => {}
                Err(e) => return Err(Error::Parse(format!("weights line {}: {s:?}: {e}", line_no + 1))),
            }
        }
        Self::dense(n, rows.concat(), w).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn write_csv_pair(&self, matrix: impl AsRef<Path>, weights: impl AsRef<Path>) -> Result<()> {
        let n = self.n();
        if n > DENSE_EXPORT_CAP {
            return Err(Error::SizeCap {
                points: n,
                cap: DENSE_EXPORT_CAP,
            });
        }
        let mut m = std::io::BufWriter::new(std::fs::File::create(matrix)?);
        for i in 0..n {
            let row: Vec<String> = (0..n).map(|j| format!("{:.16e}", self.dist(i, j))).collect();
            writeln!(m, "{}", row.join(","))?;
        }
        m.flush()?;
        let mut w = std::io::BufWriter::new(std::fs::File::create(weights)?);
        writeln!(w, "weight")?;
        for x in &self.weights {
            writeln!(w, "{x:.16e}")?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MmsRepr {
    n: usize,
    metric: MetricRepr,
    weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    field: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum MetricRepr {
    Dense(Vec<f64>),
    Coded(CodedMetric),
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum CodedMetric {
    Euclidean {
        dim: usize,
        coords: Vec<f64>,
    },
    Cone {
        kind: ModelKind,
        t: Vec<f64>,
        base_index: Vec<usize>,
        base_n: usize,
        base_metric: Vec<f64>,
    },
}

impl From<&DiscreteMMS> for MmsRepr {
    fn from(s: &DiscreteMMS) -> Self {
        let metric = match &s.metric {
            Metric::Dense(m) => MetricRepr::Dense(m.clone()),
            Metric::Euclidean { dim, coords } => MetricRepr::Coded(CodedMetric::Euclidean {
                dim: *dim,
                coords: coords.clone(),
            }),
            Metric::Cone(c) => MetricRepr::Coded(CodedMetric::Cone {
                kind: c.kind(),
                t: c.radial().to_vec(),
                base_index: c.base_index().to_vec(),
                base_n: c.base_n(),
                base_metric: c.base_metric().to_vec(),
            }),
        };
        MmsRepr {
            n: s.n(),
            metric,
            weights: s.weights.clone(),
            labels: s.labels.clone(),
            field: s.field.clone(),
        }
    }
}

impl TryFrom<MmsRepr> for DiscreteMMS {
    type Error = Error;

    fn try_from(r: MmsRepr) -> Result<Self> {
        if r.weights.len() != r.n {
            return Err(Error::Parse(format!("{} weights for n = {}", r.weights.len(), r.n)));
        }
        let metric = match r.metric {
            MetricRepr::Dense(m) => Metric::Dense(m),
            MetricRepr::Coded(CodedMetric::Euclidean { dim, coords }) => Metric::Euclidean { dim, coords },
            MetricRepr::Coded(CodedMetric::Cone {
                kind,
                t,
                base_index,
                base_n,
                base_metric,
            }) => Metric::Cone(ConeMetric::new(kind, t, base_index, base_n, &base_metric)?),
        };
        let dense = matches!(metric, Metric::Dense(_));
        let mut s = DiscreteMMS::new(metric, r.weights).map_err(|e| Error::Parse(e.to_string()))?;
        if let Some(l) = r.labels {
            s = s.with_labels(l)?;
        }
        if let Some(f) = r.field {
            s = s.with_field(f)?;
        }
        if dense && s.n() <= TRIANGLE_CHECK_MAX && s.triangle_defect() > TRIANGLE_RTOL {
            return Err(Error::Parse("metric violates the triangle inequality".into()));
        }
        Ok(s)
    }
}
