use std::collections::HashMap;

use petgraph::unionfind::UnionFind;

use super::filtration::{build_vr_filtration, estimate_simplex_count, VRComplex, DEFAULT_MAX_SIMPLICES};
use super::{FiltrationConvention, PersistenceDiagram, PersistencePair};
use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ph1Algorithm {
    /// Persistent cohomology with clearing and apparent pairs; never builds
    /// the triangle list.
    #[default]
    Cohomology,
    /// Plain left-to-right reduction of the full boundary matrix.
    StandardReduction,
}

impl std::str::FromStr for Ph1Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cohomology" => Ok(Self::Cohomology),
            "standard" => Ok(Self::StandardReduction),
            other => Err(Error::InvalidArgument(format!("unknown ph1 algorithm '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Ph1Options<T> {
    /// Cap on filtration values, in convention units.
    pub max_filtration: Option<T>,
    pub max_simplices: u128,
    pub algorithm: Ph1Algorithm,
}

impl<T> Default for Ph1Options<T> {
    fn default() -> Self {
        Self {
            max_filtration: None,
            max_simplices: DEFAULT_MAX_SIMPLICES,
            algorithm: Ph1Algorithm::Cohomology,
        }
    }
}

/// Symmetric difference of two ascending lists.
fn xor_sorted<K: Ord + Copy>(a: &[K], b: &[K]) -> Vec<K> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Standard Z/2 boundary-matrix reduction of an explicit complex.
///
/// Reports dimensions below the complex's top dimension. Dimension-0 pairs
/// are all kept (duplicate points give zero-length bars); pairs of higher
/// dimension with equal birth and death are dropped.
pub fn reduce_complex<T: Scalar>(complex: &VRComplex<T>) -> PersistenceDiagram<T> {
    let simplices = &complex.simplices;
    let position: HashMap<&[usize], usize> = simplices
        .iter()
        .enumerate()
        .map(|(i, s)| (s.vertices(), i))
        .collect();

    let mut owner: Vec<Option<usize>> = vec![None; simplices.len()];
    let mut reduced: Vec<Vec<usize>> = Vec::with_capacity(simplices.len());
    for (j, s) in simplices.iter().enumerate() {
        let mut col: Vec<usize> = s.faces().iter().map(|f| position[f.as_slice()]).collect();
        col.sort_unstable();
        while let Some(&low) = col.last() {
            match owner[low] {
                Some(k) => col = xor_sorted(&col, &reduced[k]),
                None => {
                    owner[low] = Some(j);
                    break;
                }
            }
        }
        reduced.push(col);
    }

    let mut pairs = Vec::new();
    for (j, col) in reduced.iter().enumerate() {
        let Some(&low) = col.last() else { continue };
        let (b, d) = (&simplices[low], &simplices[j]);
        if b.dim() >= complex.max_dim {
            continue;
        }
        if b.dim() == 0 || b.value < d.value {
            pairs.push(PersistencePair::new(b.dim(), b.value, d.value));
        }
    }
    for (j, col) in reduced.iter().enumerate() {
        let s = &simplices[j];
        if col.is_empty() && owner[j].is_none() && s.dim() < complex.max_dim {
            pairs.push(PersistencePair::essential(s.dim(), s.value));
        }
    }
    PersistenceDiagram::from_pairs(pairs, complex.convention, complex.n_points, complex.max_filtration)
}

/// Dimension-1 persistence diagram of the Vietoris–Rips filtration.
///
/// Classes still alive at the cap are reported with `death = +inf`; the cap
/// is recorded on the diagram.
pub fn ph1<T: Scalar>(
    pc: &PointCloud<T>,
    convention: FiltrationConvention,
    opts: Ph1Options<T>,
) -> Result<PersistenceDiagram<T>> {
    pc.ensure_nonempty()?;
    if let Some(c) = opts.max_filtration {
        if !(c >= T::zero()) {
            return Err(Error::InvalidArgument("max_filtration must be >= 0".into()));
        }
    }
    let estimated = estimate_simplex_count(pc, 2, opts.max_filtration, convention);
    if estimated > opts.max_simplices {
        return Err(Error::SizeGuard {
            estimated,
            limit: opts.max_simplices,
        });
    }
    match opts.algorithm {
        Ph1Algorithm::StandardReduction => {
            let complex = build_vr_filtration(pc, 2, opts.max_filtration, convention, opts.max_simplices)?;
            let full = reduce_complex(&complex);
            Ok(PersistenceDiagram::from_pairs(
                full.pairs.into_iter().filter(|p| p.dim == 1).collect(),
                convention,
                pc.len(),
                opts.max_filtration,
            ))
        }
        Ph1Algorithm::Cohomology => Ok(cohomology_ph1(pc, convention, opts.max_filtration)),
    }
}

const VERTEX_BITS: u32 = 21;
const NO_EDGE: u32 = u32::MAX;

/// Triangle key: dense rank of its filtration value in the high 64 bits,
/// packed sorted vertices in the low bits. Integer order is filtration order.
#[inline]
fn triangle_key(rank: u32, a: usize, b: usize, c: usize) -> u128 {
    let (mut v0, mut v1, mut v2) = (a, b, c);
    if v0 > v1 {
        std::mem::swap(&mut v0, &mut v1);
    }
    if v1 > v2 {
        std::mem::swap(&mut v1, &mut v2);
    }
    if v0 > v1 {
        std::mem::swap(&mut v0, &mut v1);
    }
    let packed = ((v0 as u64) << (2 * VERTEX_BITS)) | ((v1 as u64) << VERTEX_BITS) | v2 as u64;
    ((rank as u128) << 64) | packed as u128
}

struct RankedEdges<T> {
    n: usize,
    /// `(i, j)` in filtration order.
    edges: Vec<(usize, usize)>,
    /// Dense value rank of each edge in `edges`.
    edge_rank: Vec<u32>,
    /// n x n matrix of value ranks, `NO_EDGE` above the cap.
    rank: Vec<u32>,
    value_of_rank: Vec<T>,
}

impl<T: Scalar> RankedEdges<T> {
    fn new(pc: &PointCloud<T>, convention: FiltrationConvention, cap: Option<T>) -> Self {
        let n = pc.len();
        let pts = pc.points();
        let mut list: Vec<(T, usize, usize)> = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = convention.scale(pts[i].dist(&pts[j]));
                if cap.is_none_or(|c| v <= c) {
                    list.push((v, i, j));
                }
            }
        }
        list.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then((a.1, a.2).cmp(&(b.1, b.2)))
        });
        let mut rank = vec![NO_EDGE; n * n];
        let mut value_of_rank: Vec<T> = Vec::new();
        let mut edge_rank = Vec::with_capacity(list.len());
        for &(v, i, j) in &list {
            if value_of_rank.last().is_none_or(|&last| v > last) {
                value_of_rank.push(v);
            }
            let r = (value_of_rank.len() - 1) as u32;
            rank[i * n + j] = r;
            rank[j * n + i] = r;
            edge_rank.push(r);
        }
        Self {
            n,
            edges: list.into_iter().map(|(_, i, j)| (i, j)).collect(),
            edge_rank,
            rank,
            value_of_rank,
        }
    }

    /// Triangles containing edge `(a, b)`, ascending in filtration order.
    fn coboundary(&self, a: usize, b: usize) -> Vec<u128> {
        let n = self.n;
        let rab = self.rank[a * n + b];
        let mut col: Vec<u128> = (0..n)
            .filter(|&c| c != a && c != b)
            .filter_map(|c| {
                let rac = self.rank[a * n + c];
                let rbc = self.rank[b * n + c];
                if rac == NO_EDGE || rbc == NO_EDGE {
                    None
                } else {
                    Some(triangle_key(rab.max(rac).max(rbc), a, b, c))
                }
            })
            .collect();
        col.sort_unstable();
        col
    }
}

/// Dual reduction: coboundary columns of edges, processed from the last
/// edge to the first, pivot = earliest coface. Edges that merge components
/// (the dimension-0 deaths) are cleared up front.
fn cohomology_ph1<T: Scalar>(
    pc: &PointCloud<T>,
    convention: FiltrationConvention,
    cap: Option<T>,
) -> PersistenceDiagram<T> {
    let n = pc.len();
    assert!(n < (1 << VERTEX_BITS), "too many points for triangle packing");
    let ranked = RankedEdges::new(pc, convention, cap);

    let mut uf = UnionFind::<usize>::new(n);
    let cleared: Vec<bool> = ranked.edges.iter().map(|&(i, j)| uf.union(i, j)).collect();

    let mut pivot_owner: HashMap<u128, usize> = HashMap::new();
    // Columns that differ from their plain coboundary after reduction.
    let mut stored: HashMap<usize, Vec<u128>> = HashMap::new();
    let mut pairs = Vec::new();

    for e in (0..ranked.edges.len()).rev() {
        if cleared[e] {
            continue;
        }
        let (a, b) = ranked.edges[e];
        let mut col = ranked.coboundary(a, b);
        let mut modified = false;
        let birth = ranked.value_of_rank[ranked.edge_rank[e] as usize];
        loop {
            let Some(&pivot) = col.first() else {
                pairs.push(PersistencePair::essential(1, birth));
                break;
            };
            match pivot_owner.get(&pivot) {
                Some(&other) => {
                    let other_col = match stored.get(&other) {
                        Some(c) => xor_sorted(&col, c),
                        None => {
                            let (oa, ob) = ranked.edges[other];
                            xor_sorted(&col, &ranked.coboundary(oa, ob))
                        }
                    };
                    col = other_col;
                    modified = true;
                }
                None => {
                    pivot_owner.insert(pivot, e);
                    let death = ranked.value_of_rank[(pivot >> 64) as usize];
                    if birth < death {
                        pairs.push(PersistencePair::new(1, birth, death));
                    }
                    if modified {
                        stored.insert(e, col);
                    }
                    break;
                }
            }
        }
    }
    PersistenceDiagram::from_pairs(pairs, convention, n, cap)
}
