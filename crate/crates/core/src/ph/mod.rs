//! Vietoris–Rips persistent homology in dimensions 0 and 1.
//!
//! Dimension 0 is computed from the Euclidean minimum spanning tree, which
//! never materialises the complex. Dimension 1 uses a persistent cohomology
//! reduction over Z/2 with clearing and apparent-pair shortcuts; the explicit
//! boundary-matrix reduction of a built [`VRComplex`] is kept alongside as a
//! reference route.

mod diagram;
mod filtration;
mod mst;
mod reduction;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::scalar::Scalar;

pub use diagram::{
    diagram_stats, parse_diagram_csv, write_diagram_csv, DiagramStats, PersistenceDiagram,
    PersistencePair,
};
pub use filtration::{
    build_vr_filtration, estimate_simplex_count, Simplex, VRComplex, DEFAULT_MAX_SIMPLICES,
};
pub use mst::{euclidean_mst, ph0, single_linkage_components, LinkageCut, MstEdge};
pub use reduction::{ph1, reduce_complex, Ph1Algorithm, Ph1Options};

/// How a pairwise distance becomes an edge filtration value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FiltrationConvention {
    /// Edge value is the distance itself.
    #[default]
    Diameter,
    /// Edge value is half the distance (balls of radius alpha touch at 2 alpha).
    Radius,
}

impl FiltrationConvention {
    #[inline]
    pub fn scale<T: Scalar>(self, distance: T) -> T {
        match self {
            FiltrationConvention::Diameter => distance,
            FiltrationConvention::Radius => distance * T::lit(0.5),
        }
    }

    /// Factor applied to distances (and distance gradients).
    #[inline]
    pub fn factor<T: Scalar>(self) -> T {
        self.scale(T::one())
    }

    pub fn name(self) -> &'static str {
        match self {
            FiltrationConvention::Diameter => "diameter",
            FiltrationConvention::Radius => "radius",
        }
    }
}

impl std::fmt::Display for FiltrationConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for FiltrationConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "diameter" => Ok(Self::Diameter),
            "radius" => Ok(Self::Radius),
            other => Err(Error::InvalidArgument(format!("unknown convention '{other}'"))),
        }
    }
}
