use std::cmp::Ordering;

use super::FiltrationConvention;
use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default ceiling on the number of simplices a dimension-1 computation may
/// touch.
pub const DEFAULT_MAX_SIMPLICES: u128 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simplex<T> {
    vertices: [usize; 3],
    dim: u8,
    pub value: T,
}

impl<T: Scalar> Simplex<T> {
    pub fn vertex(v: usize) -> Self {
        Self {
            vertices: [v, 0, 0],
            dim: 0,
            value: T::zero(),
        }
    }

    pub fn edge(a: usize, b: usize, value: T) -> Self {
        Self {
            vertices: [a.min(b), a.max(b), 0],
            dim: 1,
            value,
        }
    }

    pub fn triangle(a: usize, b: usize, c: usize, value: T) -> Self {
        let mut v = [a, b, c];
        v.sort_unstable();
        Self {
            vertices: v,
            dim: 2,
            value,
        }
    }

    #[inline]
    pub fn dim(&self) -> u8 {
        self.dim
    }

    /// Sorted vertex indices.
    #[inline]
    pub fn vertices(&self) -> &[usize] {
        &self.vertices[..=self.dim as usize]
    }

    /// Codimension-1 faces as sorted vertex lists.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let v = self.vertices();
        if v.len() == 1 {
            return Vec::new();
        }
        (0..v.len())
            .map(|skip| {
                v.iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, &x)| x)
                    .collect()
            })
            .collect()
    }

    /// Filtration order: value, then dimension, then vertex tuple.
    pub fn filtration_cmp(&self, other: &Self) -> Ordering {
        self.value
            .partial_cmp(&other.value)
            .unwrap_or(Ordering::Equal)
            .then(self.dim.cmp(&other.dim))
            .then_with(|| self.vertices().cmp(other.vertices()))
    }
}

/// A Vietoris–Rips complex with its simplices in filtration order.
#[derive(Debug, Clone)]
pub struct VRComplex<T> {
    pub simplices: Vec<Simplex<T>>,
    pub max_dim: u8,
    pub max_filtration: Option<T>,
    pub convention: FiltrationConvention,
    pub n_points: usize,
}

impl<T: Scalar> VRComplex<T> {
    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn count_dim(&self, dim: u8) -> usize {
        self.simplices.iter().filter(|s| s.dim == dim).count()
    }
}

fn validate<T: Scalar>(pc: &PointCloud<T>, max_dim: u8, cap: Option<T>) -> Result<()> {
    pc.ensure_nonempty()?;
    if !(1..=2).contains(&max_dim) {
        return Err(Error::InvalidArgument(format!("max_dim must be 1 or 2, got {max_dim}")));
    }
    if let Some(c) = cap {
        if !(c >= T::zero()) {
            return Err(Error::InvalidArgument("max_filtration must be >= 0".into()));
        }
    }
    Ok(())
}

/// Upper estimate of the complex size. Exact for vertices and edges;
/// triangles are bounded by counting length-2 paths (each triangle has three).
pub fn estimate_simplex_count<T: Scalar>(
    pc: &PointCloud<T>,
    max_dim: u8,
    max_filtration: Option<T>,
    convention: FiltrationConvention,
) -> u128 {
    let n = pc.len() as u128;
    let Some(cap) = max_filtration else {
        let edges = n * n.saturating_sub(1) / 2;
        let tris = if max_dim >= 2 {
            n * n.saturating_sub(1) * n.saturating_sub(2) / 6
        } else {
            0
        };
        return n + edges + tris;
    };
    let pts = pc.points();
    let mut degree = vec![0u128; pts.len()];
    let mut edges = 0u128;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            if convention.scale(pts[i].dist(&pts[j])) <= cap {
                degree[i] += 1;
                degree[j] += 1;
                edges += 1;
            }
        }
    }
    let tris = if max_dim >= 2 {
        degree
            .iter()
            .map(|&d| d * d.saturating_sub(1) / 2)
            .sum::<u128>()
            .div_ceil(3)
    } else {
        0
    };
    n + edges + tris
}

/// Builds the explicit filtered complex up to `max_dim` (1 or 2).
///
/// Every edge gets the convention-scaled distance, every triangle the largest
/// of its edge values; simplices above `max_filtration` are left out.
pub fn build_vr_filtration<T: Scalar>(
    pc: &PointCloud<T>,
    max_dim: u8,
    max_filtration: Option<T>,
    convention: FiltrationConvention,
    max_simplices: u128,
) -> Result<VRComplex<T>> {
    validate(pc, max_dim, max_filtration)?;
    let estimated = estimate_simplex_count(pc, max_dim, max_filtration, convention);
    if estimated > max_simplices {
        return Err(Error::SizeGuard {
            estimated,
            limit: max_simplices,
        });
    }
    let n = pc.len();
    let pts = pc.points();
    let within = |v: T| max_filtration.is_none_or(|c| v <= c);

    let mut value = vec![T::nan(); n * n];
    let mut simplices: Vec<Simplex<T>> = (0..n).map(Simplex::vertex).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = convention.scale(pts[i].dist(&pts[j]));
            value[i * n + j] = v;
            value[j * n + i] = v;
            if within(v) {
                simplices.push(Simplex::edge(i, j, v));
            }
        }
    }
    if max_dim >= 2 {
        for a in 0..n {
            for b in (a + 1)..n {
                let ab = value[a * n + b];
                if !within(ab) {
                    continue;
                }
                for c in (b + 1)..n {
                    let v = ab.max(value[a * n + c]).max(value[b * n + c]);
                    if within(v) {
                        simplices.push(Simplex::triangle(a, b, c, v));
                    }
                }
            }
        }
    }
    simplices.sort_by(|x, y| x.filtration_cmp(y));
    Ok(VRComplex {
        simplices,
        max_dim,
        max_filtration,
        convention,
        n_points: n,
    })
}
