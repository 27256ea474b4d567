//! Dataset characterisation metrics: local-plane noise, nearest-neighbour
//! non-uniformity and mean persistence, plus the per-class report.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bosh::{fps, FpsStart};
use crate::cloud::{Point3, PointCloud};
use crate::error::{Error, Result};
use crate::neighbors::{NeighborIndex, Query};
use crate::ph::{self, diagram_stats, FiltrationConvention, Ph1Options, DEFAULT_MAX_SIMPLICES};
use crate::scalar::Scalar;

pub const DEFAULT_PLANE_K: usize = 10;
pub const DEFAULT_PH1_BUDGET: usize = 512;

/// How the local plane of a neighbourhood is fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlaneFit {
    /// Principal-component plane; rotation invariant.
    #[default]
    TotalLeastSquares,
    /// Ordinary least squares of z on (x, y). Falls back to the principal
    /// plane when the neighbourhood is vertical or degenerate in x/y.
    Regression,
}

impl std::str::FromStr for PlaneFit {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tls" | "total-least-squares" | "pca" => Ok(Self::TotalLeastSquares),
            "regression" | "ols" => Ok(Self::Regression),
            other => Err(Error::InvalidArgument(format!("unknown plane fit '{other}'"))),
        }
    }
}

impl std::fmt::Display for PlaneFit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::TotalLeastSquares => "total-least-squares",
            Self::Regression => "regression",
        })
    }
}

/// Eigen-decomposition of a symmetric 3x3 matrix by cyclic Jacobi sweeps.
/// Returns eigenvalues ascending and the matching unit eigenvectors.
fn symmetric_eigen3<T: Scalar>(m: [[T; 3]; 3]) -> ([T; 3], [Point3<T>; 3]) {
    let mut a = m;
    let mut v = [[T::zero(); 3]; 3];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = T::one();
    }
    for _sweep in 0..64 {
        let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
        if off == T::zero() {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            if a[p][q] == T::zero() {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
            let c = T::one() / (t * t + T::one()).sqrt();
            let s = t * c;
            for row in a.iter_mut() {
                let (akp, akq) = (row[p], row[q]);
                row[p] = c * akp - s * akq;
                row[q] = s * akp + c * akq;
            }
            let (rp, rq) = (a[p], a[q]);
            for (k, (&apk, &aqk)) in rp.iter().zip(&rq).enumerate() {
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for row in v.iter_mut() {
                let (vkp, vkq) = (row[p], row[q]);
                row[p] = c * vkp - s * vkq;
                row[q] = s * vkp + c * vkq;
            }
        }
        if off <= T::epsilon() * T::epsilon() * (a[0][0].abs() + a[1][1].abs() + a[2][2].abs()) {
            break;
        }
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap_or(std::cmp::Ordering::Equal));
    let vals = order.map(|i| a[i][i]);
    let vecs = order.map(|i| Point3::new(v[0][i], v[1][i], v[2][i]));
    (vals, vecs)
}

/// Distance from `p` to the best-fit affine subspace of `nbrs` (plane, or
/// line/point when the neighbourhood has rank below 2).
fn tls_deviation<T: Scalar>(p: Point3<T>, nbrs: &[Point3<T>]) -> T {
    let inv = T::one() / T::from_count(nbrs.len());
    let c = nbrs.iter().fold(Point3::zero(), |acc, q| acc + *q) * inv;
    let mut cov = [[T::zero(); 3]; 3];
    for q in nbrs {
        let d = (*q - c).to_array();
        for i in 0..3 {
            for j in 0..3 {
                cov[i][j] = cov[i][j] + d[i] * d[j];
            }
        }
    }
    let (vals, vecs) = symmetric_eigen3(cov);
    let rel = T::epsilon() * T::lit(1e3);
    let scale = c.norm_squared() * T::from_count(nbrs.len());
    let r = p - c;
    if vals[2] <= rel * scale || vals[2] == T::zero() {
        r.norm()
    } else if vals[1] <= rel * vals[2] {
        let along = vecs[2] * r.dot(&vecs[2]);
        (r - along).norm()
    } else {
        r.dot(&vecs[0]).abs()
    }
}

fn regression_deviation<T: Scalar>(p: Point3<T>, nbrs: &[Point3<T>]) -> T {
    let inv = T::one() / T::from_count(nbrs.len());
    let c = nbrs.iter().fold(Point3::zero(), |acc, q| acc + *q) * inv;
    let (mut sxx, mut sxy, mut syy, mut sxz, mut syz) = (T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
    for q in nbrs {
        let d = *q - c;
        sxx = sxx + d.x * d.x;
        sxy = sxy + d.x * d.y;
        syy = syy + d.y * d.y;
        sxz = sxz + d.x * d.z;
        syz = syz + d.y * d.z;
    }
    let det = sxx * syy - sxy * sxy;
    if det.abs() <= T::epsilon() * T::lit(1e3) * (sxx * syy).abs() || det == T::zero() {
        return tls_deviation(p, nbrs);
    }
    let a = (sxz * syy - syz * sxy) / det;
    let b = (syz * sxx - sxz * sxy) / det;
    let r = p - c;
    (r.z - (a * r.x + b * r.y)).abs() / (T::one() + a * a + b * b).sqrt()
}

fn check_plane_args<T: Scalar>(pc: &PointCloud<T>, k: usize) -> Result<()> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!("plane fit needs k >= 3, got {k}")));
    }
    if pc.len() < k + 1 {
        return Err(Error::InvalidArgument(format!(
            "plane fit with k = {k} needs at least {} points, cloud has {}",
            k + 1,
            pc.len()
        )));
    }
    Ok(())
}

fn deviation_at<T: Scalar>(index: &NeighborIndex<'_, T>, idx: usize, k: usize, fit: PlaneFit) -> Result<T> {
    let cloud = index.cloud();
    let nbrs: Vec<Point3<T>> = index
        .knn(Query::Index(idx), k, true)?
        .into_iter()
        .map(|(j, _)| cloud[j])
        .collect();
    Ok(match fit {
        PlaneFit::TotalLeastSquares => tls_deviation(cloud[idx], &nbrs),
        PlaneFit::Regression => regression_deviation(cloud[idx], &nbrs),
    })
}

/// Perpendicular distance from point `idx` to the plane fitted through its
/// `k` nearest neighbours (the point itself excluded).
pub fn point_plane_deviation<T: Scalar>(pc: &PointCloud<T>, idx: usize, k: usize) -> Result<T> {
    point_plane_deviation_with(pc, idx, k, PlaneFit::TotalLeastSquares)
}

pub fn point_plane_deviation_with<T: Scalar>(pc: &PointCloud<T>, idx: usize, k: usize, fit: PlaneFit) -> Result<T> {
    check_plane_args(pc, k)?;
    deviation_at(&NeighborIndex::new(pc), idx, k, fit)
}

/// Mean plane deviation over every point.
pub fn noise_metric<T: Scalar>(pc: &PointCloud<T>, k: usize) -> Result<T> {
    noise_metric_with(pc, k, PlaneFit::TotalLeastSquares)
}

pub fn noise_metric_with<T: Scalar>(pc: &PointCloud<T>, k: usize, fit: PlaneFit) -> Result<T> {
    check_plane_args(pc, k)?;
    let index = NeighborIndex::new(pc);
    let devs: Vec<T> = (0..pc.len())
        .into_par_iter()
        .map(|i| deviation_at(&index, i, k, fit))
        .collect::<Result<_>>()?;
    Ok(devs.iter().fold(T::zero(), |a, &b| a + b) / T::from_count(pc.len()))
}

/// Population standard deviation of nearest-neighbour distances.
pub fn non_uniformity<T: Scalar>(pc: &PointCloud<T>) -> Result<T> {
    if pc.len() < 2 {
        return Err(Error::InvalidArgument("non-uniformity needs at least 2 points".into()));
    }
    let index = NeighborIndex::new(pc);
    let d: Vec<T> = (0..pc.len())
        .into_par_iter()
        .map(|i| index.knn(Query::Index(i), 1, true).map(|r| r[0].1))
        .collect::<Result<_>>()?;
    let n = T::from_count(d.len());
    let mean = d.iter().fold(T::zero(), |a, &b| a + b) / n;
    let var = d.iter().fold(T::zero(), |a, &b| a + (b - mean) * (b - mean)) / n;
    Ok(var.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhMetric<T> {
    pub h0_mean: T,
    pub h1_mean: T,
    /// Number of points the dimension-1 diagram was computed on.
    pub ph1_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhMetricOptions<T> {
    pub convention: FiltrationConvention,
    pub max_filtration: Option<T>,
    /// Clouds larger than this are reduced by farthest-point sampling before
    /// the dimension-1 computation.
    pub ph1_budget: usize,
    pub max_simplices: u128,
}

impl<T> Default for PhMetricOptions<T> {
    fn default() -> Self {
        Self {
            convention: FiltrationConvention::Diameter,
            max_filtration: None,
            ph1_budget: DEFAULT_PH1_BUDGET,
            max_simplices: DEFAULT_MAX_SIMPLICES,
        }
    }
}

/// Mean finite persistence in dimensions 0 and 1.
pub fn ph_metric<T: Scalar>(pc: &PointCloud<T>, opts: &PhMetricOptions<T>) -> Result<PhMetric<T>> {
    pc.ensure_nonempty()?;
    if opts.ph1_budget == 0 {
        return Err(Error::InvalidArgument("ph1 budget must be >= 1".into()));
    }
    let h0 = diagram_stats(&ph::ph0(pc, opts.convention)?).h0_mean;
    let sub;
    let ph1_cloud = if pc.len() > opts.ph1_budget {
        sub = pc.select(&fps(pc, opts.ph1_budget, FpsStart::Index(0))?);
        &sub
    } else {
        pc
    };
    let d1 = ph::ph1(
        ph1_cloud,
        opts.convention,
        Ph1Options {
            max_filtration: opts.max_filtration,
            max_simplices: opts.max_simplices,
            ..Default::default()
        },
    )?;
    Ok(PhMetric {
        h0_mean: h0,
        h1_mean: diagram_stats(&d1).h1_mean,
        ph1_points: ph1_cloud.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CloudMetrics<T> {
    pub noise: T,
    pub non_uniformity: T,
    pub h0_mean: T,
    pub h1_mean: T,
}

impl<T: Scalar> CloudMetrics<T> {
    fn add(self, o: Self) -> Self {
        Self {
            noise: self.noise + o.noise,
            non_uniformity: self.non_uniformity + o.non_uniformity,
            h0_mean: self.h0_mean + o.h0_mean,
            h1_mean: self.h1_mean + o.h1_mean,
        }
    }

    fn div(self, n: usize) -> Self {
        let n = T::from_count(n);
        Self {
            noise: self.noise / n,
            non_uniformity: self.non_uniformity / n,
            h0_mean: self.h0_mean / n,
            h1_mean: self.h1_mean / n,
        }
    }

    /// Unweighted mean of a nonempty list.
    pub fn mean_of(items: &[Self]) -> Self {
        items
            .iter()
            .fold(Self::zero(), |acc, m| acc.add(*m))
            .div(items.len())
    }

    fn zero() -> Self {
        Self {
            noise: T::zero(),
            non_uniformity: T::zero(),
            h0_mean: T::zero(),
            h1_mean: T::zero(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsConfig<T> {
    pub plane_k: usize,
    pub plane_fit: PlaneFit,
    pub ph: PhMetricOptions<T>,
}

impl<T> Default for MetricsConfig<T> {
    fn default() -> Self {
        Self {
            plane_k: DEFAULT_PLANE_K,
            plane_fit: PlaneFit::TotalLeastSquares,
            ph: PhMetricOptions::default(),
        }
    }
}

/// All four metrics for one cloud, and the dimension-1 sample size used.
pub fn cloud_metrics<T: Scalar>(pc: &PointCloud<T>, cfg: &MetricsConfig<T>) -> Result<(CloudMetrics<T>, usize)> {
    let ph = ph_metric(pc, &cfg.ph)?;
    Ok((
        CloudMetrics {
            noise: noise_metric_with(pc, cfg.plane_k, cfg.plane_fit)?,
            non_uniformity: non_uniformity(pc)?,
            h0_mean: ph.h0_mean,
            h1_mean: ph.h1_mean,
        },
        ph.ph1_points,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata<T> {
    pub plane_k: usize,
    pub plane_fit: PlaneFit,
    pub convention: FiltrationConvention,
    pub max_filtration: Option<T>,
    pub ph1_budget: usize,
    /// Largest cloud size the dimension-1 diagram was actually computed on.
    pub ph1_points_max: usize,
    pub clouds: usize,
    /// Class values average over clouds; the overall row averages classes.
    pub aggregation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport<T> {
    pub classes: Vec<(String, CloudMetrics<T>)>,
    pub mean: CloudMetrics<T>,
    pub metadata: ReportMetadata<T>,
}

/// Per-class means over clouds and the unweighted mean over classes.
/// Classes keep the order given.
pub fn aggregate_report<T: Scalar>(
    dataset: &[(String, Vec<PointCloud<T>>)],
    cfg: &MetricsConfig<T>,
) -> Result<MetricsReport<T>> {
    if dataset.is_empty() || dataset.iter().any(|(_, clouds)| clouds.is_empty()) {
        return Err(Error::InvalidArgument(
            "dataset needs at least one class and every class at least one cloud".into(),
        ));
    }
    let jobs: Vec<(usize, &PointCloud<T>)> = dataset
        .iter()
        .enumerate()
        .flat_map(|(c, (_, clouds))| clouds.iter().map(move |pc| (c, pc)))
        .collect();
    let results: Vec<(usize, CloudMetrics<T>, usize)> = jobs
        .par_iter()
        .map(|&(c, pc)| cloud_metrics(pc, cfg).map(|(m, p)| (c, m, p)))
        .collect::<Result<_>>()?;

    let mut classes = Vec::with_capacity(dataset.len());
    for (c, (name, _)) in dataset.iter().enumerate() {
        let per_cloud: Vec<CloudMetrics<T>> = results
            .iter()
            .filter(|r| r.0 == c)
            .map(|r| r.1)
            .collect();
        classes.push((name.clone(), CloudMetrics::mean_of(&per_cloud)));
    }
    let class_means: Vec<CloudMetrics<T>> = classes.iter().map(|c| c.1).collect();
    Ok(MetricsReport {
        mean: CloudMetrics::mean_of(&class_means),
        metadata: ReportMetadata {
            plane_k: cfg.plane_k,
            plane_fit: cfg.plane_fit,
            convention: cfg.ph.convention,
            max_filtration: cfg.ph.max_filtration,
            ph1_budget: cfg.ph.ph1_budget,
            ph1_points_max: results.iter().map(|r| r.2).max().unwrap_or(0),
            clouds: results.len(),
            aggregation: "class = mean over clouds; Mean = unweighted mean over classes".into(),
        },
        classes,
    })
}

impl<T: Scalar> MetricsReport<T> {
    /// One row per class followed by a `Mean` row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("class,noise,non_uniformity,h0_mean,h1_mean\n");
        let rows = self
            .classes
            .iter()
            .map(|(n, m)| (n.as_str(), m))
            .chain(std::iter::once(("Mean", &self.mean)));
        for (name, m) in rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                name, m.noise, m.non_uniformity, m.h0_mean, m.h1_mean
            );
        }
        out
    }

    /// Table laid out with metric groups as column blocks (classes then
    /// `Mean` inside each block) and the dataset as the row, values in raw
    /// units, preceded by a metadata block.
    pub fn to_text(&self, dataset_label: &str) -> String {
        let md = &self.metadata;
        let mut out = String::new();
        let _ = writeln!(out, "# plane_k: {}", md.plane_k);
        let _ = writeln!(out, "# plane_fit: {}", md.plane_fit);
        let _ = writeln!(out, "# convention: {}", md.convention);
        let _ = writeln!(
            out,
            "# max_filtration: {}",
            md.max_filtration.map_or("none".to_string(), |c| c.to_string())
        );
        let _ = writeln!(out, "# ph1_budget: {}", md.ph1_budget);
        let _ = writeln!(out, "# ph1_points_max: {}", md.ph1_points_max);
        let _ = writeln!(out, "# clouds: {}", md.clouds);
        let _ = writeln!(out, "# aggregation: {}", md.aggregation);

        let mut cols: Vec<String> = self.classes.iter().map(|(n, _)| n.clone()).collect();
        cols.push("Mean".into());
        let values: Vec<&CloudMetrics<T>> = self
            .classes
            .iter()
            .map(|(_, m)| m)
            .chain(std::iter::once(&self.mean))
            .collect();

        let blocks: [(&str, Vec<String>); 3] = [
            ("Noise", values.iter().map(|m| m.noise.to_string()).collect()),
            (
                "Non-Uniformity",
                values.iter().map(|m| m.non_uniformity.to_string()).collect(),
            ),
            (
                "PH-based (H0; H1)",
                values
                    .iter()
                    .map(|m| format!("{}; {}", m.h0_mean, m.h1_mean))
                    .collect(),
            ),
        ];
        let mut group = vec![String::new()];
        let mut header = vec!["dataset".to_string()];
        let mut row = vec![dataset_label.to_string()];
        for (title, cells) in &blocks {
            for (i, (col, cell)) in cols.iter().zip(cells).enumerate() {
                group.push(if i == 0 { (*title).to_string() } else { String::new() });
                header.push(col.clone());
                row.push(cell.clone());
            }
        }
        let widths: Vec<usize> = (0..header.len())
            .map(|i| group[i].len().max(header[i].len()).max(row[i].len()))
            .collect();
        for line in [&group, &header, &row] {
            let cells: Vec<String> = line
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            let _ = writeln!(out, "{}", cells.join(" | ").trim_end());
        }
        out
    }
}
