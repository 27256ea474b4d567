//! Points and point clouds.

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Point3<T> {
    #[inline]
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    #[inline]
    pub fn dot(&self, other: &Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn norm_squared(&self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    /// Squared Euclidean distance. Every distance in the crate goes through
    /// this function so that equal inputs always produce bit-identical values.
    #[inline]
    pub fn dist_squared(&self, other: &Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        dx * dx + dy * dy + dz * dz
    }

    #[inline]
    pub fn dist(&self, other: &Self) -> T {
        self.dist_squared(other).sqrt()
    }

    #[inline]
    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn from_array(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    /// Converts coordinates to another scalar type.
    pub fn cast<U: Scalar>(self) -> Point3<U> {
        Point3::new(
            U::lit(self.x.as_f64()),
            U::lit(self.y.as_f64()),
            U::lit(self.z.as_f64()),
        )
    }
}

impl<T: Scalar> Add for Point3<T> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl<T: Scalar> Sub for Point3<T> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl<T: Scalar> Mul<T> for Point3<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl<T: Scalar> Neg for Point3<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Scalar> AddAssign for Point3<T> {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<T: Scalar> SubAssign for Point3<T> {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

/// Ordered list of finite points. Indices are stable identifiers: every
/// operation that returns a subset reports it in terms of these indices.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointCloud<T> {
    points: Vec<Point3<T>>,
}

impl<T: Scalar> PointCloud<T> {
    /// Builds a cloud, rejecting non-finite coordinates.
    pub fn new(points: Vec<Point3<T>>) -> Result<Self> {
        if let Some(pos) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "point {pos} has a non-finite coordinate"
            )));
        }
        Ok(Self { points })
    }

    pub fn from_arrays(coords: &[[T; 3]]) -> Result<Self> {
        Self::new(coords.iter().map(|&a| Point3::from_array(a)).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn points(&self) -> &[Point3<T>] {
        &self.points
    }

    #[inline]
    pub fn iter(&self) -> std::slice::Iter<'_, Point3<T>> {
        self.points.iter()
    }

    pub fn into_points(self) -> Vec<Point3<T>> {
        self.points
    }

    pub(crate) fn points_mut(&mut self) -> &mut [Point3<T>] {
        &mut self.points
    }

    /// Errors with [`Error::EmptyCloud`] when there is nothing to analyse.
    pub fn ensure_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptyCloud)
        } else {
            Ok(())
        }
    }

    pub fn centroid(&self) -> Result<Point3<T>> {
        self.ensure_nonempty()?;
        let sum = self
            .points
            .iter()
            .fold(Point3::zero(), |acc, p| acc + *p);
        Ok(sum * (T::one() / T::from_count(self.len())))
    }

    /// Axis-aligned bounding box as `(min, max)`.
    pub fn bounding_box(&self) -> Result<(Point3<T>, Point3<T>)> {
        self.ensure_nonempty()?;
        let first = self.points[0];
        Ok(self.points.iter().fold((first, first), |(lo, hi), p| {
            (
                Point3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z)),
                Point3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z)),
            )
        }))
    }

    /// Sub-cloud made of the given indices, in the order given.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            points: indices.iter().map(|&i| self.points[i]).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&Point3<T>) -> Point3<T>) -> Result<Self> {
        Self::new(self.points.iter().map(f).collect())
    }

    pub fn scaled(&self, s: T) -> Result<Self> {
        self.map(|p| *p * s)
    }

    pub fn translated(&self, t: Point3<T>) -> Result<Self> {
        self.map(|p| *p + t)
    }

    /// Minimum distance over all pairs; `None` for fewer than two points.
    pub fn min_pairwise_distance(&self) -> Option<T> {
        let n = self.len();
        let mut best: Option<T> = None;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = self.points[i].dist_squared(&self.points[j]);
                best = Some(match best {
                    Some(b) if b <= d => b,
                    _ => d,
                });
            }
        }
        best.map(|d| d.sqrt())
    }
}

impl<T> Index<usize> for PointCloud<T> {
    type Output = Point3<T>;
    #[inline]
    fn index(&self, i: usize) -> &Point3<T> {
        &self.points[i]
    }
}

impl<'a, T> IntoIterator for &'a PointCloud<T> {
    type Item = &'a Point3<T>;
    type IntoIter = std::slice::Iter<'a, Point3<T>>;
    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}
