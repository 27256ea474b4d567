//! Exact k-nearest-neighbour and radius queries.
//!
//! Small clouds are scanned directly. Larger clouds are bucketed into a
//! uniform grid and searched ring by ring; the search stops only once every
//! unvisited cell is provably farther than the current k-th candidate, so the
//! answers are identical to a full scan, including tie order.

use std::cmp::Ordering;

use crate::cloud::{Point3, PointCloud};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Clouds at or below this size are always scanned exhaustively.
pub const BRUTE_FORCE_MAX: usize = 64;

#[derive(Debug, Clone, Copy)]
pub enum Query<T> {
    /// A point of the indexed cloud, by index.
    Index(usize),
    /// An arbitrary location.
    Point(Point3<T>),
}

#[derive(Debug, Clone)]
struct Grid<T> {
    origin: Point3<T>,
    cell: T,
    dims: [i64; 3],
    /// CSR layout: points of cell `c` are `order[starts[c]..starts[c + 1]]`.
    starts: Vec<usize>,
    order: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct NeighborIndex<'a, T> {
    cloud: &'a PointCloud<T>,
    grid: Option<Grid<T>>,
}

#[inline]
fn by_dist_then_index<T: Scalar>(a: &(usize, T), b: &(usize, T)) -> Ordering {
    a.1.partial_cmp(&b.1)
        .unwrap_or(Ordering::Equal)
        .then(a.0.cmp(&b.0))
}

impl<'a, T: Scalar> NeighborIndex<'a, T> {
    /// Picks brute force or a grid depending on the cloud size.
    pub fn new(cloud: &'a PointCloud<T>) -> Self {
        if cloud.len() <= BRUTE_FORCE_MAX {
            Self::brute_force(cloud)
        } else {
            Self::with_grid(cloud)
        }
    }

    pub fn brute_force(cloud: &'a PointCloud<T>) -> Self {
        Self { cloud, grid: None }
    }

    pub fn with_grid(cloud: &'a PointCloud<T>) -> Self {
        let grid = Self::build_grid(cloud);
        Self { cloud, grid }
    }

    pub fn cloud(&self) -> &'a PointCloud<T> {
        self.cloud
    }

    pub fn len(&self) -> usize {
        self.cloud.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cloud.is_empty()
    }

    pub fn is_grid(&self) -> bool {
        self.grid.is_some()
    }

    fn build_grid(cloud: &PointCloud<T>) -> Option<Grid<T>> {
        let (lo, hi) = cloud.bounding_box().ok()?;
        let extent = (hi.x - lo.x).max(hi.y - lo.y).max(hi.z - lo.z);
        if extent <= T::zero() {
            return None;
        }
        let per_axis = (cloud.len() as f64).cbrt().ceil().max(1.0);
        let cell = extent / T::lit(per_axis);
        let dim = |span: T| -> i64 { ((span / cell).floor().as_f64() as i64 + 1).max(1) };
        let dims = [dim(hi.x - lo.x), dim(hi.y - lo.y), dim(hi.z - lo.z)];
        let ncells = (dims[0] * dims[1] * dims[2]) as usize;
        let mut grid = Grid {
            origin: lo,
            cell,
            dims,
            starts: vec![0; ncells + 1],
            order: Vec::with_capacity(cloud.len()),
        };
        let cells: Vec<usize> = cloud
            .iter()
            .map(|p| {
                let c = grid.cell_of(p);
                grid.flat(grid.clamp(c))
            })
            .collect();
        for &c in &cells {
            grid.starts[c + 1] += 1;
        }
        for c in 0..ncells {
            grid.starts[c + 1] += grid.starts[c];
        }
        let mut fill = grid.starts.clone();
        grid.order = vec![0; cloud.len()];
        for (i, &c) in cells.iter().enumerate() {
            grid.order[fill[c]] = i;
            fill[c] += 1;
        }
        Some(grid)
    }

    fn resolve(&self, query: Query<T>, exclude_self: bool) -> Result<(Point3<T>, Option<usize>)> {
        match query {
            Query::Index(i) => {
                if i >= self.cloud.len() {
                    return Err(Error::InvalidArgument(format!(
                        "query index {i} out of range for {} points",
                        self.cloud.len()
                    )));
                }
                Ok((self.cloud[i], exclude_self.then_some(i)))
            }
            Query::Point(p) => Ok((p, None)),
        }
    }

    /// The `k` nearest points sorted by distance, ties by smaller index.
    pub fn knn(&self, query: Query<T>, k: usize, exclude_self: bool) -> Result<Vec<(usize, T)>> {
        let (q, skip) = self.resolve(query, exclude_self)?;
        let available = self.cloud.len() - usize::from(skip.is_some());
        if k > available {
            return Err(Error::KTooLarge { k, available });
        }
        if k == 0 {
            return Ok(Vec::new());
        }
        let mut found = match &self.grid {
            None => self.scan_all(&q, skip),
            Some(grid) => self.grid_knn(grid, &q, k, skip),
        };
        found.sort_by(by_dist_then_index);
        found.truncate(k);
        Ok(found
            .into_iter()
            .map(|(i, d2)| (i, d2.sqrt()))
            .collect())
    }

    /// Nearest point to an arbitrary location as `(index, squared distance)`.
    pub fn nearest_squared(&self, q: &Point3<T>) -> Result<(usize, T)> {
        self.cloud.ensure_nonempty()?;
        let found = match &self.grid {
            None => self.scan_all(q, None),
            Some(grid) => self.grid_knn(grid, q, 1, None),
        };
        Ok(found
            .into_iter()
            .min_by(by_dist_then_index)
            .expect("nonempty cloud"))
    }

    /// All points within `radius` (inclusive), sorted like [`Self::knn`].
    pub fn radius(&self, query: Query<T>, radius: T, exclude_self: bool) -> Result<Vec<(usize, T)>> {
        if !(radius >= T::zero()) {
            return Err(Error::InvalidArgument("radius must be nonnegative".into()));
        }
        let (q, skip) = self.resolve(query, exclude_self)?;
        let r2 = radius * radius;
        let mut found: Vec<(usize, T)> = match &self.grid {
            None => self.scan_all(&q, skip),
            Some(grid) => {
                let reach = (radius / grid.cell).ceil().as_f64() as i64 + 1;
                let center = grid.cell_of(&q);
                let mut out = Vec::new();
                grid.visit_box(center, reach, |c| self.push_cell(grid, c, &q, skip, &mut out));
                out
            }
        };
        found.retain(|&(_, d2)| d2 <= r2);
        found.sort_by(by_dist_then_index);
        Ok(found.into_iter().map(|(i, d2)| (i, d2.sqrt())).collect())
    }

    fn scan_all(&self, q: &Point3<T>, skip: Option<usize>) -> Vec<(usize, T)> {
        self.cloud
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != skip)
            .map(|(i, p)| (i, q.dist_squared(p)))
            .collect()
    }

    fn push_cell(
        &self,
        grid: &Grid<T>,
        cell: usize,
        q: &Point3<T>,
        skip: Option<usize>,
        out: &mut Vec<(usize, T)>,
    ) {
        for &i in &grid.order[grid.starts[cell]..grid.starts[cell + 1]] {
            if Some(i) != skip {
                out.push((i, q.dist_squared(&self.cloud[i])));
            }
        }
    }

    /// Candidates containing at least the true `k` nearest (squared distances).
    fn grid_knn(&self, grid: &Grid<T>, q: &Point3<T>, k: usize, skip: Option<usize>) -> Vec<(usize, T)> {
        let center = grid.cell_of(q);
        let max_ring = grid.max_ring_from(center);
        let mut candidates: Vec<(usize, T)> = Vec::new();
        let shrink = T::one() - T::epsilon() * T::lit(64.0);
        let mut ring = grid.min_ring_from(center);
        loop {
            grid.visit_ring(center, ring, |c| self.push_cell(grid, c, q, skip, &mut candidates));
            if ring >= max_ring {
                break;
            }
            if candidates.len() >= k {
                candidates.sort_by(by_dist_then_index);
                candidates.truncate(k.max(1));
                let kth = candidates[k - 1].1;
                // Anything outside the visited rings is at least `ring * cell`
                // away; one ring of slack absorbs rounding in cell assignment.
                let bound = grid.cell * T::from_count((ring - 1).max(0) as usize) * shrink;
                if ring >= 1 && kth < bound * bound {
                    break;
                }
            }
            ring += 1;
        }
        candidates
    }
}

impl<T: Scalar> Grid<T> {
    fn cell_of(&self, p: &Point3<T>) -> [i64; 3] {
        let f = |v: T, o: T| ((v - o) / self.cell).floor().as_f64() as i64;
        [f(p.x, self.origin.x), f(p.y, self.origin.y), f(p.z, self.origin.z)]
    }

    fn clamp(&self, c: [i64; 3]) -> [i64; 3] {
        [
            c[0].clamp(0, self.dims[0] - 1),
            c[1].clamp(0, self.dims[1] - 1),
            c[2].clamp(0, self.dims[2] - 1),
        ]
    }

    fn flat(&self, c: [i64; 3]) -> usize {
        ((c[2] * self.dims[1] + c[1]) * self.dims[0] + c[0]) as usize
    }

    /// Chebyshev distance from `c` to the farthest grid cell.
    fn max_ring_from(&self, c: [i64; 3]) -> i64 {
        (0..3)
            .map(|a| c[a].abs().max((self.dims[a] - 1 - c[a]).abs()))
            .max()
            .unwrap_or(0)
    }

    /// Chebyshev distance from `c` to the nearest grid cell.
    fn min_ring_from(&self, c: [i64; 3]) -> i64 {
        (0..3)
            .map(|a| {
                if c[a] < 0 {
                    -c[a]
                } else if c[a] >= self.dims[a] {
                    c[a] - self.dims[a] + 1
                } else {
                    0
                }
            })
            .max()
            .unwrap_or(0)
    }

    fn visit_box(&self, c: [i64; 3], reach: i64, mut f: impl FnMut(usize)) {
        let lo = |a: usize| (c[a] - reach).max(0);
        let hi = |a: usize| (c[a] + reach).min(self.dims[a] - 1);
        for z in lo(2)..=hi(2) {
            for y in lo(1)..=hi(1) {
                for x in lo(0)..=hi(0) {
                    f(self.flat([x, y, z]));
                }
            }
        }
    }

    /// Cells at Chebyshev distance exactly `ring` from `c`, clipped to the grid.
    fn visit_ring(&self, c: [i64; 3], ring: i64, mut f: impl FnMut(usize)) {
        if ring == 0 {
            if (0..3).all(|a| c[a] >= 0 && c[a] < self.dims[a]) {
                f(self.flat(c));
            }
            return;
        }
        let lo = |a: usize| (c[a] - ring).max(0);
        let hi = |a: usize| (c[a] + ring).min(self.dims[a] - 1);
        for z in lo(2)..=hi(2) {
            let z_edge = (z - c[2]).abs() == ring;
            for y in lo(1)..=hi(1) {
                let yz_edge = z_edge || (y - c[1]).abs() == ring;
                if yz_edge {
                    for x in lo(0)..=hi(0) {
                        f(self.flat([x, y, z]));
                    }
                } else {
                    for x in [c[0] - ring, c[0] + ring] {
                        if x >= 0 && x < self.dims[0] {
                            f(self.flat([x, y, z]));
                        }
                    }
                }
            }
        }
    }
}
