use std::cmp::Ordering;

use petgraph::unionfind::UnionFind;

use super::{FiltrationConvention, PersistenceDiagram, PersistencePair};
use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Spanning-tree edge with `i < j` and the unscaled Euclidean length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MstEdge<T> {
    pub i: usize,
    pub j: usize,
    pub weight: T,
}

impl<T> MstEdge<T> {
    fn new(a: usize, b: usize, weight: T) -> Self {
        Self {
            i: a.min(b),
            j: a.max(b),
            weight,
        }
    }
}

/// Exact Euclidean MST by Prim's algorithm on the complete graph, O(n^2).
///
/// Equal candidate lengths resolve to the lexicographically smaller edge
/// and the smaller vertex, so the tree is a deterministic function of the
/// input order. Edges are returned in the order they join the tree.
pub fn euclidean_mst<T: Scalar>(pc: &PointCloud<T>) -> Result<Vec<MstEdge<T>>> {
    pc.ensure_nonempty()?;
    let n = pc.len();
    let pts = pc.points();
    let mut in_tree = vec![false; n];
    let mut best = vec![T::infinity(); n];
    let mut parent = vec![usize::MAX; n];
    let mut edges = Vec::with_capacity(n - 1);

    let mut current = 0;
    in_tree[0] = true;
    for _ in 1..n {
        let pc_ = pts[current];
        let mut next = usize::MAX;
        let mut next_d = T::infinity();
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            let d = pc_.dist_squared(&pts[v]);
            let better = match d.partial_cmp(&best[v]) {
                Some(Ordering::Less) => true,
                Some(Ordering::Equal) => {
                    (current.min(v), current.max(v)) < (parent[v].min(v), parent[v].max(v))
                }
                _ => false,
            };
            if better {
                best[v] = d;
                parent[v] = current;
            }
            if best[v] < next_d || next == usize::MAX {
                next_d = best[v];
                next = v;
            }
        }
        in_tree[next] = true;
        edges.push(MstEdge::new(parent[next], next, best[next].sqrt()));
        current = next;
    }
    Ok(edges)
}

/// Dimension-0 diagram: one `(0, w)` pair per MST edge plus the essential
/// class `(0, inf)`.
pub fn ph0<T: Scalar>(pc: &PointCloud<T>, convention: FiltrationConvention) -> Result<PersistenceDiagram<T>> {
    let mst = euclidean_mst(pc)?;
    let mut pairs: Vec<PersistencePair<T>> = mst
        .iter()
        .map(|e| PersistencePair::new(0, T::zero(), convention.scale(e.weight)))
        .collect();
    pairs.push(PersistencePair::essential(0, T::zero()));
    Ok(PersistenceDiagram::from_pairs(pairs, convention, pc.len(), None))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkageCut<T> {
    /// Join points linked by MST edges no longer than this distance.
    Threshold(T),
    /// Remove the `k - 1` longest MST edges.
    Count(usize),
}

/// Single-linkage cluster labels, 0-based, numbered in order of each
/// cluster's smallest point index.
pub fn single_linkage_components<T: Scalar>(pc: &PointCloud<T>, cut: LinkageCut<T>) -> Result<Vec<usize>> {
    pc.ensure_nonempty()?;
    let n = pc.len();
    let mut mst = euclidean_mst(pc)?;
    let keep: Vec<MstEdge<T>> = match cut {
        LinkageCut::Threshold(t) => mst.into_iter().filter(|e| e.weight <= t).collect(),
        LinkageCut::Count(k) => {
            if k == 0 || k > n {
                return Err(Error::InvalidArgument(format!(
                    "component count {k} must be in 1..={n}"
                )));
            }
            mst.sort_by(|a, b| {
                b.weight
                    .partial_cmp(&a.weight)
                    .unwrap_or(Ordering::Equal)
                    .then((a.i, a.j).cmp(&(b.i, b.j)))
            });
            mst.split_off(k - 1)
        }
    };
    let mut uf = UnionFind::<usize>::new(n);
    for e in &keep {
        uf.union(e.i, e.j);
    }
    let mut label_of_root = vec![usize::MAX; n];
    let mut next = 0;
    Ok((0..n)
        .map(|i| {
            let r = uf.find(i);
            if label_of_root[r] == usize::MAX {
                label_of_root[r] = next;
                next += 1;
            }
            label_of_root[r]
        })
        .collect())
}
