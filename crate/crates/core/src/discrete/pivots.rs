//! Lower bounds `d(i, j) >= max_p |d(p, i) - d(p, j)|` from a few pivots,
//! used to skip distance evaluations.

use crate::mms::DiscreteMMS;

/// Pivots chosen beyond the default one.
pub const EXTRA_PIVOTS: usize = 7;

pub struct Pivots {
    /// `keys[p][i] = d(pivot_p, i)`; the first pivot is the default pivot.
    keys: Vec<Vec<f64>>,
}

impl Pivots {
    /// Default pivot plus farthest-point picks.
    pub fn new(space: &DiscreteMMS) -> Self {
        let n = space.n();
        let first = space.default_pivot();
        let mut keys = vec![space.pivot_keys(first)];
        let mut nearest = keys[0].clone();
        for _ in 0..EXTRA_PIVOTS.min(n.saturating_sub(1)) {
            let (far, &gap) = nearest
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
                .expect("nonempty");
            if gap == 0.0 {
                break;
            }
            let k = space.pivot_keys(far);
            for (m, &x) in nearest.iter_mut().zip(&k) {
                *m = m.min(x);
            }
            keys.push(k);
        }
        Self { keys }
    }

    /// Primary key, `d(default pivot, i)`.
    pub fn primary(&self) -> &[f64] {
        &self.keys[0]
    }

    /// True if `d(i, j) > bound` is certain.
    #[inline]
    pub fn exceeds(&self, i: usize, j: usize, bound: f64) -> bool {
        self.keys.iter().any(|k| (k[i] - k[j]).abs() > bound)
    }
}

/// Nearest-neighbour queries into a fixed subset.
pub struct NearestIn<'a> {
    space: &'a DiscreteMMS,
    pivots: &'a Pivots,
    /// Subset members sorted by primary key.
    sorted: Vec<usize>,
    sorted_keys: Vec<f64>,
}

impl<'a> NearestIn<'a> {
    pub fn new(space: &'a DiscreteMMS, pivots: &'a Pivots, members: &[usize]) -> Self {
        let key = pivots.primary();
        let mut sorted = members.to_vec();
        sorted.sort_by(|&a, &b| key[a].total_cmp(&key[b]).then(a.cmp(&b)));
        let sorted_keys = sorted.iter().map(|&i| key[i]).collect();
        Self {
            space,
            pivots,
            sorted,
            sorted_keys,
        }
    }

    /// Members within `radius` of `i` (inclusive), visiting candidates in
    /// order of primary-key gap.
    fn scan(&self, i: usize, mut radius: impl FnMut() -> f64, mut visit: impl FnMut(usize, f64)) {
        let k = self.pivots.primary()[i];
        let start = self.sorted_keys.partition_point(|&x| x < k);
        let (mut lo, mut hi) = (start, start);
        loop {
            let r = radius();
            let down = (lo > 0).then(|| k - self.sorted_keys[lo - 1]).filter(|&g| g <= r);
            let up = (hi < self.sorted.len())
                .then(|| self.sorted_keys[hi] - k)
                .filter(|&g| g <= r);
            let j = match (down, up) {
                (None, None) => break,
                (Some(a), Some(b)) if a <= b => {
                    lo -= 1;
                    self.sorted[lo]
                }
                (Some(_), None) => {
                    lo -= 1;
                    self.sorted[lo]
                }
                _ => {
                    hi += 1;
                    self.sorted[hi - 1]
                }
            };
            if self.pivots.exceeds(i, j, r) {
                continue;
            }
            visit(j, self.space.dist(i, j));
        }
    }

    /// `min_j d(i, j)` over the subset.
    pub fn distance(&self, i: usize) -> f64 {
        let best = std::cell::Cell::new(f64::INFINITY);
        self.scan(i, || best.get(), |_, d| best.set(best.get().min(d)));
        best.get()
    }

    /// Members at distance `<= d_min (1 + rtol)` together with `d_min`.
    pub fn nearest_all(&self, i: usize, rtol: f64) -> (f64, Vec<usize>) {
        let best = self.distance(i);
        let cut = best * (1.0 + rtol) + f64::MIN_POSITIVE;
        let mut hits = Vec::new();
        self.scan(i, || cut, |j, d| {
            if d <= cut {
                hits.push(j);
            }
        });
        hits.sort_unstable();
        (best, hits)
    }
}
