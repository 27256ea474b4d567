//! Set-to-set distances: Chamfer (L1/L2) and Hausdorff.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::{Point3, PointCloud};
use crate::error::{Error, Result};
use crate::neighbors::NeighborIndex;
use crate::scalar::Scalar;

/// `L2` sums squared nearest-neighbour distances; `L1` sums the plain
/// Euclidean norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChamferVariant {
    L1,
    L2,
}

/// `Sum` adds the two directional sums; `Mean` divides each directional sum
/// by the size of the cloud it ranges over before adding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Reduction {
    #[default]
    Sum,
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum HausdorffMode {
    OneSided,
    #[default]
    SymmetricAvg,
}

impl std::str::FromStr for ChamferVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" | "cd-l1" => Ok(Self::L1),
            "l2" | "cd-l2" => Ok(Self::L2),
            other => Err(Error::InvalidArgument(format!("unknown Chamfer variant '{other}'"))),
        }
    }
}

impl std::str::FromStr for Reduction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sum" => Ok(Self::Sum),
            "mean" => Ok(Self::Mean),
            other => Err(Error::InvalidArgument(format!("unknown reduction '{other}'"))),
        }
    }
}

impl std::fmt::Display for ChamferVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::L1 => "cd-l1",
            Self::L2 => "cd-l2",
        })
    }
}

impl std::fmt::Display for Reduction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Sum => "sum",
            Self::Mean => "mean",
        })
    }
}

/// Squared distance from each point of `from` to its nearest point in `to`,
/// in the order of `from`.
pub fn nearest_squared_distances<T: Scalar>(
    from: &PointCloud<T>,
    to: &PointCloud<T>,
) -> Result<Vec<(usize, T)>> {
    from.ensure_nonempty()?;
    to.ensure_nonempty()?;
    let index = NeighborIndex::new(to);
    from.points()
        .par_iter()
        .map(|p| index.nearest_squared(p))
        .collect()
}

fn directional<T: Scalar>(from: &PointCloud<T>, to: &PointCloud<T>, variant: ChamferVariant, reduction: Reduction) -> Result<T> {
    let d2 = nearest_squared_distances(from, to)?;
    let sum: T = d2
        .iter()
        .map(|&(_, d)| match variant {
            ChamferVariant::L2 => d,
            ChamferVariant::L1 => d.sqrt(),
        })
        .fold(T::zero(), |a, b| a + b);
    Ok(match reduction {
        Reduction::Sum => sum,
        Reduction::Mean => sum / T::from_count(from.len()),
    })
}

pub fn chamfer<T: Scalar>(
    x: &PointCloud<T>,
    y: &PointCloud<T>,
    variant: ChamferVariant,
    reduction: Reduction,
) -> Result<T> {
    Ok(directional(x, y, variant, reduction)? + directional(y, x, variant, reduction)?)
}

/// L2 Chamfer distance and its gradient with respect to the points of `x`
/// (`y` held fixed).
pub fn chamfer_l2_with_grad<T: Scalar>(
    x: &PointCloud<T>,
    y: &PointCloud<T>,
    reduction: Reduction,
) -> Result<(T, Vec<Point3<T>>)> {
    let forward = nearest_squared_distances(x, y)?;
    let backward = nearest_squared_distances(y, x)?;
    let (wx, wy) = match reduction {
        Reduction::Sum => (T::one(), T::one()),
        Reduction::Mean => (
            T::one() / T::from_count(x.len()),
            T::one() / T::from_count(y.len()),
        ),
    };
    let two = T::lit(2.0);
    let mut grad = vec![Point3::zero(); x.len()];
    let mut fsum = T::zero();
    for (i, &(j, d2)) in forward.iter().enumerate() {
        fsum = fsum + d2;
        grad[i] += (x[i] - y[j]) * (two * wx);
    }
    let mut bsum = T::zero();
    for (j, &(i, d2)) in backward.iter().enumerate() {
        bsum = bsum + d2;
        grad[i] += (x[i] - y[j]) * (two * wy);
    }
    Ok((fsum * wx + bsum * wy, grad))
}

pub fn hausdorff<T: Scalar>(s: &PointCloud<T>, s2: &PointCloud<T>, mode: HausdorffMode) -> Result<T> {
    let one_sided = |a: &PointCloud<T>, b: &PointCloud<T>| -> Result<T> {
        let d2 = nearest_squared_distances(a, b)?;
        Ok(d2
            .iter()
            .map(|&(_, d)| d)
            .fold(T::zero(), T::max)
            .sqrt())
    };
    match mode {
        HausdorffMode::OneSided => one_sided(s, s2),
        HausdorffMode::SymmetricAvg => {
            Ok((one_sided(s, s2)? + one_sided(s2, s)?) * T::lit(0.5))
        }
    }
}
