//! Viewpoint-driven degradation of ground-truth clouds: partial removal,
//! distance-weighted sparsification and uniform sparsification.
//!
//! All randomness comes from [`crate::rng`], addressed per point, so outputs
//! are a pure function of the input cloud and the spec. Weighted sampling
//! without replacement uses exponential keys: point `i` gets
//! `key_i = -ln(u_i) / w_i` with `u_i` the `i`-th draw of the sampling stream,
//! and the `N` smallest keys (ties by index) are kept.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cloud::{Point3, PointCloud};
use crate::error::{Error, Result};
use crate::io::to_xyz_string;
use crate::rng::{substream, unit_open_closed};
use crate::scalar::Scalar;

pub const DEFAULT_RADIUS_FACTOR: f64 = 1.5;

const VIEWPOINT_STREAM: u64 = 1;
const SAMPLING_STREAM: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Viewpoint<T> {
    pub position: Point3<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegradeMode {
    Partial,
    Nonuniform,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// Probability proportional to d^3.
    Proportional,
    /// Probability proportional to d^-3.
    Inverse,
}

impl std::str::FromStr for DegradeMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "partial" => Ok(Self::Partial),
            "nonuniform" | "non-uniform" => Ok(Self::Nonuniform),
            "uniform" => Ok(Self::Uniform),
            other => Err(Error::InvalidArgument(format!("unknown mode '{other}'"))),
        }
    }
}

impl std::str::FromStr for Weighting {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "proportional" => Ok(Self::Proportional),
            "inverse" => Ok(Self::Inverse),
            other => Err(Error::InvalidArgument(format!("unknown weighting '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegradeSpec<T> {
    pub mode: DegradeMode,
    /// Points removed (partial) or kept (sampling modes).
    pub n: usize,
    pub viewpoint: Option<Viewpoint<T>>,
    pub weighting: Option<Weighting>,
    pub seed: u64,
}

/// Uniform direction on the sphere, placed `radius_factor` half bounding-box
/// diagonals away from the centroid. A cloud with zero diagonal uses a unit
/// radius instead.
pub fn random_viewpoint<T: Scalar>(pc: &PointCloud<T>, seed: u64, radius_factor: T) -> Result<Viewpoint<T>> {
    let centroid = pc.centroid()?;
    let (lo, hi) = pc.bounding_box()?;
    let mut half_diag = hi.dist(&lo) * T::lit(0.5);
    if half_diag == T::zero() {
        half_diag = T::one();
    }
    let stream = substream(seed, VIEWPOINT_STREAM);
    let z = 2.0 * unit_open_closed(stream, 0) - 1.0;
    let phi = 2.0 * std::f64::consts::PI * unit_open_closed(stream, 1);
    let r = (1.0 - z * z).max(0.0).sqrt();
    let dir = Point3::new(T::lit(r * phi.cos()), T::lit(r * phi.sin()), T::lit(z));
    Ok(Viewpoint {
        position: centroid + dir * (radius_factor * half_diag),
    })
}

fn check_count(n: usize, count: usize, max: usize, what: &str) -> Result<()> {
    if count == 0 || count > max {
        return Err(Error::InvalidArgument(format!(
            "{what} N = {count} must be in 1..={max} for a cloud of {n} points"
        )));
    }
    Ok(())
}

/// Keeps the `n - N` points closest to the viewpoint, in input order.
pub fn viewpoint_partial<T: Scalar>(pc: &PointCloud<T>, viewpoint: &Viewpoint<T>, remove: usize) -> Result<PointCloud<T>> {
    let n = pc.len();
    if n < 2 {
        return Err(Error::InvalidArgument("partial removal needs at least 2 points".into()));
    }
    check_count(n, remove, n - 1, "removal")?;
    let mut order: Vec<(T, usize)> = pc
        .iter()
        .enumerate()
        .map(|(i, p)| (p.dist_squared(&viewpoint.position), i))
        .collect();
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)));
    let mut keep: Vec<usize> = order[..n - remove].iter().map(|&(_, i)| i).collect();
    keep.sort_unstable();
    Ok(pc.select(&keep))
}

/// Indices of the `count` smallest exponential keys, ascending.
fn order_sample(weights: &[f64], count: usize, stream: u64) -> Vec<usize> {
    let mut keys: Vec<(f64, usize)> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let e = -unit_open_closed(stream, i as u64).ln();
            let key = if w > 0.0 { e / w } else { f64::INFINITY };
            (key, i)
        })
        .collect();
    keys.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)));
    let mut chosen: Vec<usize> = keys[..count].iter().map(|&(_, i)| i).collect();
    chosen.sort_unstable();
    chosen
}

/// Sampling weights; zero distances under inverse weighting get 10^3 times
/// the largest finite weight of the other points.
pub fn sampling_weights<T: Scalar>(pc: &PointCloud<T>, viewpoint: &Viewpoint<T>, weighting: Weighting) -> Vec<f64> {
    let d: Vec<f64> = pc.iter().map(|p| p.dist(&viewpoint.position).as_f64()).collect();
    match weighting {
        Weighting::Proportional => d.iter().map(|x| x * x * x).collect(),
        Weighting::Inverse => {
            let w: Vec<f64> = d.iter().map(|&x| if x > 0.0 { 1.0 / (x * x * x) } else { f64::INFINITY }).collect();
            let max_finite = w.iter().copied().filter(|x| x.is_finite()).fold(0.0, f64::max);
            let clamp = if max_finite > 0.0 { max_finite * 1e3 } else { 1.0 };
            w.into_iter().map(|x| if x.is_finite() { x } else { clamp }).collect()
        }
    }
}

/// Draws `N` distinct points with probability proportional to the weighting
/// of their distance to the viewpoint, at every draw. Output in input order.
pub fn nonuniform_sample<T: Scalar>(
    pc: &PointCloud<T>,
    viewpoint: &Viewpoint<T>,
    count: usize,
    weighting: Weighting,
    seed: u64,
) -> Result<PointCloud<T>> {
    check_count(pc.len(), count, pc.len(), "sample")?;
    let w = sampling_weights(pc, viewpoint, weighting);
    Ok(pc.select(&order_sample(&w, count, substream(seed, SAMPLING_STREAM))))
}

pub fn uniform_sample_indices(n: usize, count: usize, seed: u64) -> Result<Vec<usize>> {
    check_count(n, count, n, "sample")?;
    Ok(order_sample(&vec![1.0; n], count, substream(seed, SAMPLING_STREAM)))
}

/// Uniform sample without replacement, in input order.
pub fn uniform_sample<T: Scalar>(pc: &PointCloud<T>, count: usize, seed: u64) -> Result<PointCloud<T>> {
    Ok(pc.select(&uniform_sample_indices(pc.len(), count, seed)?))
}

/// Applies one spec.
pub fn degrade<T: Scalar>(gt: &PointCloud<T>, spec: &DegradeSpec<T>) -> Result<PointCloud<T>> {
    gt.ensure_nonempty()?;
    let vp = || {
        spec.viewpoint
            .ok_or_else(|| Error::InvalidArgument(format!("{:?} mode needs a viewpoint", spec.mode)))
    };
    match spec.mode {
        DegradeMode::Partial => viewpoint_partial(gt, &vp()?, spec.n),
        DegradeMode::Nonuniform => {
            let w = spec
                .weighting
                .ok_or_else(|| Error::InvalidArgument("nonuniform mode needs a weighting".into()))?;
            nonuniform_sample(gt, &vp()?, spec.n, w, spec.seed)
        }
        DegradeMode::Uniform => uniform_sample(gt, spec.n, spec.seed),
    }
}

/// SHA-256 of the canonical XYZ serialisation.
pub fn cloud_digest<T: Scalar>(pc: &PointCloud<T>) -> String {
    hex::encode(Sha256::digest(to_xyz_string(pc).as_bytes()))
}

/// Provenance record sufficient to regenerate a degraded cloud.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest<T> {
    pub tool: String,
    pub tool_version: String,
    pub rng: String,
    pub gt_path: Option<String>,
    pub gt_sha256: String,
    pub gt_points: usize,
    pub spec: DegradeSpec<T>,
    pub output_points: usize,
    pub output_sha256: String,
}

impl<T: Scalar + Serialize + for<'de> Deserialize<'de>> Manifest<T> {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serialises");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Manifest(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegradedPair<T> {
    pub degraded: PointCloud<T>,
    pub manifest: Manifest<T>,
}

pub fn make_manifest<T: Scalar>(
    gt: &PointCloud<T>,
    gt_path: Option<&str>,
    spec: &DegradeSpec<T>,
    output: &PointCloud<T>,
) -> Manifest<T> {
    Manifest {
        tool: "pctopo".into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        rng: "splitmix64-counter".into(),
        gt_path: gt_path.map(str::to_string),
        gt_sha256: cloud_digest(gt),
        gt_points: gt.len(),
        spec: spec.clone(),
        output_points: output.len(),
        output_sha256: cloud_digest(output),
    }
}

/// One degraded cloud per spec, each with its manifest.
pub fn make_pairs<T: Scalar>(
    gt: &PointCloud<T>,
    gt_path: Option<&str>,
    specs: &[DegradeSpec<T>],
) -> Result<Vec<DegradedPair<T>>> {
    use rayon::prelude::*;
    specs
        .par_iter()
        .map(|spec| {
            let degraded = degrade(gt, spec)?;
            let manifest = make_manifest(gt, gt_path, spec, &degraded);
            Ok(DegradedPair { degraded, manifest })
        })
        .collect()
}

/// Re-runs a manifest against its ground truth and checks both digests.
pub fn regenerate<T: Scalar>(gt: &PointCloud<T>, manifest: &Manifest<T>) -> Result<PointCloud<T>> {
    if cloud_digest(gt) != manifest.gt_sha256 {
        return Err(Error::Manifest("ground-truth digest mismatch".into()));
    }
    let out = degrade(gt, &manifest.spec)?;
    if cloud_digest(&out) != manifest.output_sha256 {
        return Err(Error::Manifest("regenerated output digest mismatch".into()));
    }
    Ok(out)
}
