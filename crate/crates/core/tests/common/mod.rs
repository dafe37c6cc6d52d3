#![allow(dead_code)]

use needlecomp::comparison::{cos_kappa, cos_kappa_prime};
use needlecomp::discrete::{branching_points, transport_ordering, SubsetSpec, TransportRelation};
use needlecomp::mms::DiscreteMMS;
use needlecomp::needle::{uniform_grid_with_zero, NeedleDensity};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `f = sum_m alpha_m cos_{kappa_m}(r - c_m)` with `kappa_m >= kappa`, so
/// `f'' + kappa f <= 0`; positive on `[a, b]` by the choice of length.
#[derive(Debug, Clone)]
pub struct ConcaveProfile {
    pub kappa: f64,
    pub n: f64,
    pub a: f64,
    pub b: f64,
    pub terms: Vec<(f64, f64, f64)>,
}

impl ConcaveProfile {
    pub fn k(&self) -> f64 {
        self.kappa * (self.n - 1.0)
    }

    pub fn f(&self, r: f64) -> f64 {
        self.terms.iter().map(|&(al, km, c)| al * cos_kappa(km, r - c)).sum()
    }

    pub fn df(&self, r: f64) -> f64 {
        self.terms.iter().map(|&(al, km, c)| al * cos_kappa_prime(km, r - c)).sum()
    }

    /// `h = f^{N-1}` on a grid of `samples` points, scaled so `h(0) = 1`.
    pub fn density(&self, samples: usize) -> NeedleDensity {
        let f0 = self.f(0.0);
        let grid = uniform_grid_with_zero(self.a, self.b, samples);
        let values = grid.iter().map(|&r| (self.f(r) / f0).powf(self.n - 1.0)).collect();
        NeedleDensity::new(grid, values).unwrap()
    }
}

/// `a <= 0 < b` unless `left_end_zero`, in which case `a = 0`.
pub fn concave_profile(left_end_zero: bool) -> impl Strategy<Value = ConcaveProfile> {
    (
        -1.0f64..1.0,
        1.5f64..6.0,
        prop::collection::vec((0.1f64..1.0, 0.0f64..1.0, 0.0f64..1.0), 1..4),
        0.2f64..1.0,
        0.0f64..1.0,
    )
        .prop_map(move |(kappa, n, raw, len_frac, left_frac)| {
            let kmax = raw.iter().map(|t| kappa + t.1).fold(kappa, f64::max);
            let cap = if kmax > 0.0 {
                0.9 * std::f64::consts::FRAC_PI_2 / kmax.sqrt()
            } else {
                2.0
            };
            let len = (len_frac * cap).min(2.0);
            let a = if left_end_zero { 0.0 } else { -left_frac * len * 0.8 - 0.1 * len };
            let b = a + len;
            let terms = raw
                .iter()
                .map(|&(al, dk, cf)| (al, kappa + dk, a + cf * len))
                .collect();
            ConcaveProfile { kappa, n, a, b, terms }
        })
}

/// Random connected weighted graph or line configuration with a random
/// proper subset.
pub fn random_instance(seed: u64) -> (DiscreteMMS, SubsetSpec) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.gen_range(4..=12);
        let space = if rng.gen_bool(0.5) {
            let mut edges = Vec::new();
            for i in 1..n {
                edges.push((rng.gen_range(0..i), i, rng.gen_range(1..=3) as f64));
            }
            for _ in 0..rng.gen_range(0..n) {
                let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
                if i != j {
                    edges.push((i, j, rng.gen_range(1..=3) as f64));
                }
            }
            DiscreteMMS::from_graph(n, &edges, vec![1.0; n]).unwrap()
        } else {
            let dim = rng.gen_range(1..=2);
            let coords = (0..n * dim).map(|_| rng.gen_range(0..6) as f64).collect();
            DiscreteMMS::euclidean(dim, coords, vec![1.0; n]).unwrap()
        };
        let flags = (0..n).map(|_| rng.gen_bool(0.6)).collect();
        if let Ok(omega) = SubsetSpec::new(flags) {
            return (space, omega);
        }
    }
}

/// Chains selected by exhaustive enumeration under the greedy rule:
/// largest `u` span, then smallest `(first, last)`, then most points, then
/// smallest id sequence.
pub fn brute_force_chains(space: &DiscreteMMS, u: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let n = space.n();
    let rel = |i: usize, j: usize| {
        let d = space.dist(i, j);
        u[j] > u[i] && (u[j] - u[i] - d).abs() <= tol * d.max(1.0)
    };
    let comparable = |i: usize, j: usize| i == j || rel(i, j) || rel(j, i);
    let branching = |i: usize| {
        let fw: Vec<usize> = (0..n).filter(|&z| rel(i, z)).collect();
        let bw: Vec<usize> = (0..n).filter(|&z| rel(z, i)).collect();
        let breaks = |s: &[usize]| s.iter().any(|&z| s.iter().any(|&w| !comparable(z, w)));
        breaks(&fw) || breaks(&bw)
    };
    let free: Vec<usize> = (0..n).filter(|&i| !branching(i)).collect();
    let mut taken = vec![false; n];
    let mut out = Vec::new();
    loop {
        let avail: Vec<usize> = free.iter().copied().filter(|&i| !taken[i]).collect();
        let mut best: Option<((i64, usize, usize, usize, Vec<usize>), Vec<usize>)> = None;
        for mask in 1u32..(1 << avail.len()) {
            let mut c: Vec<usize> = (0..avail.len()).filter(|b| mask >> b & 1 == 1).map(|b| avail[b]).collect();
            if c.len() < 2 {
                continue;
            }
            c.sort_by(|&a, &b| u[a].total_cmp(&u[b]).then(a.cmp(&b)));
            let (i, j) = (c[0], c[c.len() - 1]);
            let valid = rel(i, j)
                && c[1..c.len() - 1].iter().all(|&p| rel(i, p) && rel(p, j))
                && c.windows(2).all(|w| rel(w[0], w[1]));
            if !valid {
                continue;
            }
            // Smaller key wins.
            let key = (
                -((u[j] - u[i]) * needlecomp::discrete::SPAN_RESOLUTION).round() as i64,
                i,
                j,
                usize::MAX - c.len(),
                c.clone(),
            );
            if best.as_ref().map_or(true, |(k, _)| key < *k) {
                best = Some((key, c));
            }
        }
        match best {
            Some((_, c)) => {
                for &p in &c {
                    taken[p] = true;
                }
                out.push(c);
            }
            None => return out,
        }
    }
}

pub fn relation(space: &DiscreteMMS, u: &[f64]) -> TransportRelation {
    transport_ordering(space, u, needlecomp::discrete::RELATION_TOL)
}

pub fn greedy_chains(space: &DiscreteMMS, u: &[f64]) -> Vec<Vec<usize>> {
    let r = relation(space, u);
    let b = branching_points(&r);
    needlecomp::discrete::extract_chains(&r, &b)
}

/// Classical RK4 for `v'' = -kappa v`, sampled at the given increasing
/// abscissae starting from 0.
pub fn rk4_solution(kappa: f64, v0: f64, dv0: f64, at: &[f64], substeps: usize) -> Vec<f64> {
    let (mut v, mut w, mut x) = (v0, dv0, 0.0);
    let mut out = Vec::with_capacity(at.len());
    for &target in at {
        let h = (target - x) / substeps as f64;
        for _ in 0..substeps {
            let f = |v: f64, w: f64| (w, -kappa * v);
            let k1 = f(v, w);
            let k2 = f(v + 0.5 * h * k1.0, w + 0.5 * h * k1.1);
            let k3 = f(v + 0.5 * h * k2.0, w + 0.5 * h * k2.1);
            let k4 = f(v + h * k3.0, w + h * k3.1);
            v += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            w += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        }
        x = target;
        out.push(v);
    }
    out
}
