//! The transport relation `u(y) - u(x) = d(x, y)` and its branching points.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pivots::Pivots;
use crate::mms::DiscreteMMS;

/// Default relative tolerance of the relation.
pub const RELATION_TOL: f64 = 1e-6;

/// Ordered pairs `(i, j)` with `|u_j - u_i - d(i,j)| <= tol max(1, d(i,j))`
/// and `u_j > u_i`.
#[derive(Debug, Clone)]
pub struct TransportRelation {
    u: Vec<f64>,
    tol: f64,
    /// Successors of each point sorted by `(u, id)`.
    succ: Vec<Vec<u32>>,
    /// Successors sorted by id, for membership tests.
    succ_by_id: Vec<Vec<u32>>,
    /// Predecessors sorted by `(u, id)`.
    pred: Vec<Vec<u32>>,
}

impl TransportRelation {
    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn successors(&self, i: usize) -> &[u32] {
        &self.succ[i]
    }

    pub fn predecessors(&self, i: usize) -> &[u32] {
        &self.pred[i]
    }

    #[inline]
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.succ_by_id[i].binary_search(&(j as u32)).is_ok()
    }

    /// `(i, j)` or `(j, i)` in the relation.
    #[inline]
    pub fn comparable(&self, i: usize, j: usize) -> bool {
        i == j || self.contains(i, j) || self.contains(j, i)
    }

    pub fn len(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.iter().map(move |&j| (i, j as usize)))
    }

    fn order_key(&self, i: u32) -> (f64, u32) {
        (self.u[i as usize], i)
    }

    fn sort_by_u(&self, v: &mut [u32]) {
        v.sort_by(|&a, &b| {
            let (ka, kb) = (self.order_key(a), self.order_key(b));
            ka.0.total_cmp(&kb.0).then(ka.1.cmp(&kb.1))
        });
    }
}

pub fn transport_ordering(space: &DiscreteMMS, u: &[f64], tol: f64) -> TransportRelation {
    let n = space.n();
    assert_eq!(u.len(), n, "one value of u per point");
    let pivots = Pivots::new(space);
    let succ_by_id: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            for j in 0..n {
                let du = u[j] - u[i];
                if !(du > 0.0) {
                    continue;
                }
                let reach = (du + tol) / (1.0 - tol);
                if pivots.exceeds(i, j, reach) {
                    continue;
                }
                let d = space.dist(i, j);
                if (du - d).abs() <= tol * d.max(1.0) {
                    out.push(j as u32);
                }
            }
            out
        })
        .collect();
    let mut pred = vec![Vec::new(); n];
    for (i, s) in succ_by_id.iter().enumerate() {
        for &j in s {
            pred[j as usize].push(i as u32);
        }
    }
    let mut rel = TransportRelation {
        u: u.to_vec(),
        tol,
        succ: succ_by_id.clone(),
        succ_by_id,
        pred,
    };
    let mut succ = std::mem::take(&mut rel.succ);
    let mut pred = std::mem::take(&mut rel.pred);
    succ.par_iter_mut().for_each(|s| rel.sort_by_u(s));
    pred.par_iter_mut().for_each(|s| rel.sort_by_u(s));
    rel.succ = succ;
    rel.pred = pred;
    rel
}

/// Forward and backward branching points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchingSets {
    pub a_plus: Vec<usize>,
    pub a_minus: Vec<usize>,
}

impl BranchingSets {
    pub fn is_branching(&self, i: usize) -> bool {
        self.a_plus.binary_search(&i).is_ok() || self.a_minus.binary_search(&i).is_ok()
    }
}

/// `x` is in `A+` (`A-`) when two of its successors (predecessors) are not
/// related to each other.
///
/// The successors are ordered by `u`; with a transitive relation they are
/// pairwise comparable exactly when consecutive ones are.
pub fn branching_points(relation: &TransportRelation) -> BranchingSets {
    let chain_breaks = |list: &[u32]| {
        list.windows(2).any(|w| {
            let (a, b) = (w[0] as usize, w[1] as usize);
            relation.u[a] == relation.u[b] || !relation.contains(a, b)
        })
    };
    let n = relation.n();
    let flags: Vec<(bool, bool)> = (0..n)
        .into_par_iter()
        .map(|i| (chain_breaks(&relation.succ[i]), chain_breaks(&relation.pred[i])))
        .collect();
    BranchingSets {
        a_plus: (0..n).filter(|&i| flags[i].0).collect(),
        a_minus: (0..n).filter(|&i| flags[i].1).collect(),
    }
}
