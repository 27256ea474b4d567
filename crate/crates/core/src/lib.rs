//! Topological analysis of 3D point clouds.
//!
//! * Vietoris–Rips persistent homology in dimensions 0 and 1 ([`ph`]).
//! * Dataset metrics: local-plane noise, nearest-neighbour non-uniformity and
//!   mean persistence, with a per-class report ([`metrics`]).
//! * Viewpoint-based degradation of ground-truth clouds ([`degrade`]).
//! * A zero-dimensional topological loss with analytic gradients and a
//!   skeletonizing optimizer ([`topo`]).
//! * Farthest-point backbone sampling and a backbone-augmented completion
//!   loss ([`bosh`]).
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix the common `f64` case.
//!
//! ```
//! use pctopo::{ph, Cloud, FiltrationConvention};
//!
//! let square = Cloud::from_arrays(&[
//!     [0.0, 0.0, 0.0],
//!     [1.0, 0.0, 0.0],
//!     [1.0, 1.0, 0.0],
//!     [0.0, 1.0, 0.0],
//! ])
//! .unwrap();
//! let h1 = ph::ph1(&square, FiltrationConvention::Diameter, Default::default()).unwrap();
//! assert_eq!(h1.pairs.len(), 1);
//! assert_eq!(h1.pairs[0].death, 2f64.sqrt());
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bosh;
pub mod cloud;
pub mod degrade;
pub mod distance;
pub mod error;
pub mod io;
pub mod metrics;
pub mod neighbors;
pub mod ph;
pub mod rng;
pub mod scalar;
pub mod svg;
pub mod topo;

pub use cloud::{Point3, PointCloud};
pub use error::{Error, Result};
pub use ph::FiltrationConvention;
pub use scalar::Scalar;

pub type Point = Point3<f64>;
pub type Cloud = PointCloud<f64>;
pub type Diagram = ph::PersistenceDiagram<f64>;
pub type Pair = ph::PersistencePair<f64>;
pub type Metrics = metrics::CloudMetrics<f64>;
pub type Report = metrics::MetricsReport<f64>;
pub type LossResult = topo::TopoLossResult<f64>;

pub type Point32 = Point3<f32>;
pub type Cloud32 = PointCloud<f32>;
pub type Diagram32 = ph::PersistenceDiagram<f32>;
