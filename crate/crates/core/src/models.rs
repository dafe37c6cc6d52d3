//! Euclidean and hyperbolic cones and spherical suspensions over a finite
//! base, their radial measures, and truncated samples.
//!
//! A point is a pair `(t, x)` of a radial coordinate and a base point; all
//! points with `t = 0` (and, for the suspension, `t = pi`) are identified.
//! Distances use the half-angle forms
//!
//! ```text
//! euclidean:   d^2          = (t - s)^2 + 4 t s sin^2(th/2)
//! hyperbolic:  sinh^2(d/2)  = sinh^2((t - s)/2) + sinh t sinh s sin^2(th/2)
//! suspension:  sin^2(d/2)   = sin^2((t - s)/2) + sin t sin s sin^2(th/2)
//! ```
//!
//! with `th = min(d_base(x, y), pi)`, which avoid the cancellation of the
//! law-of-cosines forms for nearby points.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::comparison::{inradius_comparison_r, sin_kappa, ComparisonTriple};
use crate::discrete::SubsetSpec;
use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::mms::{DiscreteMMS, Metric};

/// Points allowed in a truncated sample.
pub const SAMPLE_SIZE_CAP: usize = 100_000;

/// Nodes of the composite Simpson rule in [`ModelSpace::volume_cone_check`].
pub const VOLUME_QUADRATURE_NODES: usize = 10_000;

/// Default fraction of `R` added outside the truncation.
pub const DEFAULT_COLLAR: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    EuclideanCone,
    HyperbolicCone,
    SphericalSuspension,
}

impl ModelKind {
    pub fn radial_max(self) -> ExtendedReal {
        match self {
            ModelKind::SphericalSuspension => ExtendedReal::Finite(PI),
            _ => ExtendedReal::PosInf,
        }
    }

    /// `(K, N)` of the comparison geometry matching measure exponent `n_exp`.
    pub fn matched_parameters(self, n_exp: f64) -> (f64, f64) {
        let k = match self {
            ModelKind::EuclideanCone => 0.0,
            ModelKind::HyperbolicCone => -n_exp,
            ModelKind::SphericalSuspension => n_exp,
        };
        (k, n_exp + 1.0)
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::EuclideanCone => "euclidean_cone",
            ModelKind::HyperbolicCone => "hyperbolic_cone",
            ModelKind::SphericalSuspension => "spherical_suspension",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" | "euclidean_cone" => Ok(ModelKind::EuclideanCone),
            "hyperbolic" | "hyperbolic_cone" => Ok(ModelKind::HyperbolicCone),
            "spherical" | "suspension" | "spherical_suspension" => Ok(ModelKind::SphericalSuspension),
            other => Err(Error::Parse(format!("unknown model kind {other:?}"))),
        }
    }
}

/// Closed-form distance on a finite sample of a cone or suspension.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeMetric {
    kind: ModelKind,
    t: Vec<f64>,
    base_index: Vec<usize>,
    base_n: usize,
    base_metric: Vec<f64>,
    /// `sin^2(min(d_base, pi) / 2)`, row-major.
    half_sin2: Vec<f64>,
    /// Per point: `(f(t), f(t/2), g(t/2))` with `f = sinh, g = cosh` for the
    /// hyperbolic cone and `f = sin, g = cos` for the suspension.
    aux: Vec<[f64; 3]>,
}

impl ConeMetric {
    pub fn new(
        kind: ModelKind,
        t: Vec<f64>,
        base_index: Vec<usize>,
        base_n: usize,
        base_metric: &[f64],
    ) -> Result<Self> {
        if t.len() != base_index.len() {
            return Err(Error::InvalidParameter("radial and base index lengths differ".into()));
        }
        if base_metric.len() != base_n * base_n || base_index.iter().any(|&b| b >= base_n) {
            return Err(Error::InvalidParameter("bad base metric".into()));
        }
        for &x in &t {
            check_radial(kind, x)?;
        }
        let half_sin2 = base_metric
            .iter()
            .map(|&d| (0.5 * d.min(PI)).sin().powi(2))
            .collect();
        let aux = t
            .iter()
            .map(|&x| match kind {
                ModelKind::EuclideanCone => [x, 0.0, 0.0],
                ModelKind::HyperbolicCone => [x.sinh(), (0.5 * x).sinh(), (0.5 * x).cosh()],
                ModelKind::SphericalSuspension => [x.sin(), (0.5 * x).sin(), (0.5 * x).cos()],
            })
            .collect();
        Ok(Self {
            kind,
            t,
            base_index,
            base_n,
            base_metric: base_metric.to_vec(),
            half_sin2,
            aux,
        })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn radial(&self) -> &[f64] {
        &self.t
    }

    pub fn base_index(&self) -> &[usize] {
        &self.base_index
    }

    pub fn base_n(&self) -> usize {
        self.base_n
    }

    pub fn base_metric(&self) -> &[f64] {
        &self.base_metric
    }

    /// Index of a point with `t = 0`, if any.
    pub fn tip(&self) -> Option<usize> {
        self.t.iter().position(|&x| x == 0.0)
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let s2 = self.half_sin2[self.base_index[i] * self.base_n + self.base_index[j]];
        let (a, b) = (&self.aux[i], &self.aux[j]);
        match self.kind {
            ModelKind::EuclideanCone => {
                let dt = a[0] - b[0];
                (dt * dt + 4.0 * a[0] * b[0] * s2).sqrt()
            }
            ModelKind::HyperbolicCone => {
                let half = a[1] * b[2] - a[2] * b[1];
                let y = (half * half + a[0] * b[0] * s2).sqrt();
                2.0 * y.asinh()
            }
            ModelKind::SphericalSuspension => {
                let half = a[1] * b[2] - a[2] * b[1];
                let y = (half * half + a[0] * b[0] * s2).sqrt();
                2.0 * y.min(1.0).asin()
            }
        }
    }
}

fn check_radial(kind: ModelKind, t: f64) -> Result<()> {
    let ok = t >= 0.0 && ExtendedReal::Finite(t) <= kind.radial_max() && t.is_finite();
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(format!("radial coordinate {t} outside the domain of {}", kind.name())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConePoint {
    pub t: f64,
    pub x: usize,
}

/// A cone or suspension over a finite base with measure
/// `rho(t)^{n_exp} dt (x) m_base`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpace {
    pub kind: ModelKind,
    pub n_exp: f64,
    pub base: DiscreteMMS,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeConeReport {
    /// `m(B_R(o)) / m(B_r(o))` from the radial density.
    pub mass_ratio: f64,
    /// The same ratio from the comparison function `sin_{K/(N-1)}^{N-1}`.
    pub comparison_ratio: f64,
    pub passed: bool,
}

impl ModelSpace {
    pub fn new(kind: ModelKind, n_exp: f64, base: DiscreteMMS) -> Result<Self> {
        if !(n_exp >= 0.0 && n_exp.is_finite()) {
            return Err(Error::InvalidParameter(format!("N_exp = {n_exp} must be nonnegative")));
        }
        Ok(Self { kind, n_exp, base })
    }

    pub fn radial_max(&self) -> ExtendedReal {
        self.kind.radial_max()
    }

    /// Base diameter after truncation at `pi`.
    pub fn base_diameter(&self) -> f64 {
        let n = self.base.n();
        let mut d: f64 = 0.0;
        for i in 0..n {
            for j in 0..i {
                d = d.max(self.base.dist(i, j).min(PI));
            }
        }
        d
    }

    fn check_point(&self, p: ConePoint) -> Result<()> {
        check_radial(self.kind, p.t)?;
        if p.x >= self.base.n() {
            return Err(Error::Domain(format!("base point {} out of range", p.x)));
        }
        Ok(())
    }

    pub fn cone_distance(&self, p: ConePoint, q: ConePoint) -> Result<f64> {
        self.check_point(p)?;
        self.check_point(q)?;
        let metric = ConeMetric::new(
            self.kind,
            vec![p.t, q.t],
            vec![p.x, q.x],
            self.base.n(),
            &base_matrix(&self.base),
        )?;
        Ok(metric.dist(0, 1))
    }

    pub fn radial_density(&self, t: f64) -> Result<f64> {
        check_radial(self.kind, t)?;
        Ok(radial_profile(self.kind, t).powf(self.n_exp))
    }

    /// Radial grid `t_i = i R / steps` (plus a collar of `collar * R`
    /// beyond `R`, clipped below `pi` for the suspension) times the base,
    /// plus the tip at index 0.  Point `(t_i, x_j)` weighs
    /// `rho(t_i) (R / steps) w_j`; the tip weighs 0.  The attached field is
    /// the radial coordinate.
    pub fn truncated_cone_sample(&self, r_trunc: f64, radial_steps: usize, collar: f64) -> Result<DiscreteMMS> {
        check_radial(self.kind, r_trunc)?;
        if !(r_trunc > 0.0) {
            return Err(Error::Domain("truncation radius must be positive".into()));
        }
        if radial_steps < 4 {
            return Err(Error::InvalidParameter("radial_steps must be at least 4".into()));
        }
        if !(collar >= 0.0 && collar.is_finite()) {
            return Err(Error::InvalidParameter(format!("collar = {collar}")));
        }
        let dt = r_trunc / radial_steps as f64;
        let extra = (collar * radial_steps as f64).round() as usize;
        let mut radii: Vec<f64> = (1..=radial_steps + extra)
            .map(|i| if i == radial_steps { r_trunc } else { i as f64 * dt })
            .collect();
        if self.kind == ModelKind::SphericalSuspension {
            radii.retain(|&t| t < PI);
        }
        let nb = self.base.n();
        let points = 1 + radii.len() * nb;
        if points > SAMPLE_SIZE_CAP {
            return Err(Error::SizeCap {
                points,
                cap: SAMPLE_SIZE_CAP,
            });
        }
        let mut t = Vec::with_capacity(points);
        let mut base_index = Vec::with_capacity(points);
        let mut weights = Vec::with_capacity(points);
        t.push(0.0);
        base_index.push(0);
        weights.push(0.0);
        for &ti in &radii {
            let rho = self.radial_density(ti)?;
            for j in 0..nb {
                t.push(ti);
                base_index.push(j);
                weights.push(rho * dt * self.base.weights()[j]);
            }
        }
        let metric = ConeMetric::new(self.kind, t.clone(), base_index, nb, &base_matrix(&self.base))?;
        DiscreteMMS::new(Metric::Cone(metric), weights)?.with_field(t)
    }

    /// Sample points with radial coordinate at most `r_trunc`.
    pub fn truncation(&self, sample: &DiscreteMMS, r_trunc: f64) -> Result<SubsetSpec> {
        let field = sample
            .field()
            .ok_or_else(|| Error::InvalidParameter("sample carries no radial field".into()))?;
        SubsetSpec::sublevel(field, r_trunc * (1.0 + 1e-12))
    }

    /// Compares `m(B_R(o)) / m(B_r(o))` with the ratio of integrals of
    /// `sin_{K/(N-1)}^{N-1}`, both by composite Simpson quadrature.
    pub fn volume_cone_check(&self, k: f64, n: f64, r: f64, r_big: f64, tol: f64) -> Result<VolumeConeReport> {
        let (k_m, n_m) = self.kind.matched_parameters(self.n_exp);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
        if !(close(k, k_m) && close(n, n_m)) {
            return Err(Error::ParameterMismatch(format!(
                "{} with N_exp = {} matches (K, N) = ({k_m}, {n_m}), got ({k}, {n})",
                self.kind.name(),
                self.n_exp
            )));
        }
        if !(n > 1.0) {
            return Err(Error::InvalidParameter("N must exceed 1".into()));
        }
        if !(0.0 < r && r <= r_big) || ExtendedReal::Finite(r_big) > self.radial_max() {
            return Err(Error::Domain(format!("need 0 < r <= R <= R_max, got r = {r}, R = {r_big}")));
        }
        let rho = |t: f64| radial_profile(self.kind, t).max(0.0).powf(self.n_exp);
        let kappa = k / (n - 1.0);
        let cmp = |u: f64| sin_kappa(kappa, u).max(0.0).powf(n - 1.0);
        let mass_ratio = simpson(rho, 0.0, r_big) / simpson(rho, 0.0, r);
        let comparison_ratio = simpson(cmp, 0.0, r_big) / simpson(cmp, 0.0, r);
        let passed = (mass_ratio - comparison_ratio).abs() <= tol * comparison_ratio.abs().max(1.0);
        Ok(VolumeConeReport {
            mass_ratio,
            comparison_ratio,
            passed,
        })
    }
}

fn radial_profile(kind: ModelKind, t: f64) -> f64 {
    match kind {
        ModelKind::EuclideanCone => t,
        ModelKind::HyperbolicCone => t.sinh(),
        ModelKind::SphericalSuspension => t.sin(),
    }
}

fn base_matrix(base: &DiscreteMMS) -> Vec<f64> {
    let n = base.n();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = base.dist(i, j);
        }
    }
    m
}

/// Composite Simpson rule with [`VOLUME_QUADRATURE_NODES`] intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let m = VOLUME_QUADRATURE_NODES;
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        let x = a + i as f64 * h;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    s * h / 3.0
}

/// `d_{Omega^c}` on the truncation `{t <= R}`: `R - t`.
pub fn signed_distance_in_truncated_cone(p: ConePoint, r_trunc: f64) -> Result<f64> {
    if !(p.t >= 0.0 && p.t <= r_trunc) {
        return Err(Error::Domain(format!("t = {} outside [0, {r_trunc}]", p.t)));
    }
    Ok(r_trunc - p.t)
}

/// Volume of the unit sphere `S^d`.
pub fn sphere_volume(d: usize) -> f64 {
    match d {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (d as f64 - 1.0) * sphere_volume(d - 2),
    }
}

/// Single base point of unit mass; its cone is a segment.
pub fn base_point() -> DiscreteMMS {
    DiscreteMMS::dense(1, vec![0.0], vec![1.0]).expect("valid")
}

/// `m` equispaced points on the unit circle with arc-length distance.
pub fn base_circle(m: usize) -> Result<DiscreteMMS> {
    if m == 0 {
        return Err(Error::InvalidParameter("empty base".into()));
    }
    let mut d = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            let k = (i as isize - j as isize).unsigned_abs();
            let k = k.min(m - k);
            d[i * m + j] = 2.0 * PI * k as f64 / m as f64;
        }
    }
    DiscreteMMS::dense(m, d, vec![2.0 * PI / m as f64; m])
}

/// `m` points on the unit sphere `S^dim` with great-circle distance and
/// equal weights summing to its volume.  The circle is equispaced, `S^2`
/// uses a Fibonacci lattice, higher spheres are seeded random samples.
pub fn base_sphere(dim: usize, m: usize, seed: u64) -> Result<DiscreteMMS> {
    if m == 0 {
        return Err(Error::InvalidParameter("empty base".into()));
    }
    match dim {
        0 => {
            let w = 1.0;
            DiscreteMMS::dense(2, vec![0.0, PI, PI, 0.0], vec![w, w])
        }
        1 => base_circle(m),
        _ => {
            let pts: Vec<Vec<f64>> = if dim == 2 {
                let golden = PI * (3.0 - 5f64.sqrt());
                (0..m)
                    .map(|i| {
                        let z = 1.0 - (2.0 * i as f64 + 1.0) / m as f64;
                        let r = (1.0 - z * z).sqrt();
                        let phi = golden * i as f64;
                        vec![r * phi.cos(), r * phi.sin(), z]
                    })
                    .collect()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..m)
                    .map(|_| loop {
                        let v: Vec<f64> = (0..=dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                        if norm > 1e-3 && norm <= 1.0 {
                            break v.iter().map(|x| x / norm).collect();
                        }
                    })
                    .collect()
            };
            let mut d = vec![0.0; m * m];
            for i in 0..m {
                for j in 0..i {
                    let chord = pts[i]
                        .iter()
                        .zip(&pts[j])
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    let g = 2.0 * (0.5 * chord).min(1.0).asin();
                    d[i * m + j] = g;
                    d[j * m + i] = g;
                }
            }
            DiscreteMMS::dense(m, d, vec![sphere_volume(dim) / m as f64; m])
        }
    }
}

/// A truncated model attaining `r_{K, chi(N-1), N}`.
#[derive(Debug, Clone)]
pub struct SharpnessWitness {
    pub space: ModelSpace,
    pub r_trunc: f64,
    pub achieved_inradius: f64,
}

/// Model of kind `sign(K)` with `N_exp = N - 1`, truncated at
/// `R = r_{K, chi(N-1), N}`, over a sphere of dimension `round(N - 1)`
/// sampled with `base_points` points.
pub fn sharpness_witness(k: f64, chi: f64, n: f64, base_points: usize) -> Result<SharpnessWitness> {
    let p = ComparisonTriple::new(k, chi * (n - 1.0), n)?;
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1.0);
    let kind = if close(k, n - 1.0) {
        ModelKind::SphericalSuspension
    } else if close(k, 0.0) {
        ModelKind::EuclideanCone
    } else if close(k, 1.0 - n) {
        ModelKind::HyperbolicCone
    } else {
        return Err(Error::UnsupportedCurvature { k, n });
    };
    let r = inradius_comparison_r(&p).finite().ok_or(Error::InfiniteRadius)?;
    let dim = (n - 1.0).round().max(0.0) as usize;
    let base = base_sphere(dim, base_points, 0)?;
    Ok(SharpnessWitness {
        space: ModelSpace::new(kind, n - 1.0, base)?,
        r_trunc: r,
        achieved_inradius: r,
    })
}
