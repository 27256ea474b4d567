//! Zero-dimensional topological loss, its gradient, and a gradient-descent
//! skeletonizer built on it.
//!
//! The finite dimension-0 pairs of a Vietoris–Rips filtration are the
//! Euclidean MST edges. The loss sums the persistence of all of them except
//! the `k - 1` most persistent, so minimising it pulls the cloud towards `k`
//! connected clusters while leaving the `k - 1` widest gaps untouched.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::path::Path;

use crate::cloud::{Point3, PointCloud};
use crate::distance::{chamfer_l2_with_grad, Reduction};
use crate::error::{Error, Result};
use crate::io::{save_pointcloud, write_atomic, Format};
use crate::ph::{euclidean_mst, FiltrationConvention, MstEdge, PersistencePair};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TopoLossConfig {
    /// Number of components the loss leaves alone.
    pub k: usize,
    pub convention: FiltrationConvention,
}

impl TopoLossConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            convention: FiltrationConvention::Diameter,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopoLossResult<T> {
    pub value: T,
    pub gradient: Vec<Point3<T>>,
    pub protected_pairs: Vec<PersistencePair<T>>,
    /// `(i, j, weight)` with convention-scaled weights.
    pub active_edges: Vec<(usize, usize, T)>,
}

fn evaluate<T: Scalar>(pc: &PointCloud<T>, cfg: &TopoLossConfig, strict: bool) -> Result<TopoLossResult<T>> {
    pc.ensure_nonempty()?;
    if cfg.k == 0 || cfg.k > pc.len() {
        return Err(Error::InvalidArgument(format!(
            "k = {} must be in 1..={}",
            cfg.k,
            pc.len()
        )));
    }
    let mut mst: Vec<MstEdge<T>> = euclidean_mst(pc)?;
    mst.sort_by(|a, b| {
        b.weight
            .partial_cmp(&a.weight)
            .unwrap_or(Ordering::Equal)
            .then((a.i, a.j).cmp(&(b.i, b.j)))
    });
    let factor: T = cfg.convention.factor();
    let active = mst.split_off(cfg.k - 1);
    let protected_pairs = mst
        .iter()
        .map(|e| PersistencePair::new(0, T::zero(), e.weight * factor))
        .collect();

    let pts = pc.points();
    let mut gradient = vec![Point3::zero(); pc.len()];
    let mut value = T::zero();
    for e in &active {
        value = value + e.weight * factor;
        if e.weight == T::zero() {
            if strict {
                return Err(Error::CoincidentPoints { i: e.i, j: e.j });
            }
            continue;
        }
        let dir = (pts[e.i] - pts[e.j]) * (factor / e.weight);
        gradient[e.i] += dir;
        gradient[e.j] -= dir;
    }
    Ok(TopoLossResult {
        value,
        gradient,
        protected_pairs,
        active_edges: active.iter().map(|e| (e.i, e.j, e.weight * factor)).collect(),
    })
}

/// Loss value, protected pairs and active edges. Zero-length active edges
/// contribute a zero subgradient here instead of failing.
pub fn topo_loss<T: Scalar>(pc: &PointCloud<T>, cfg: &TopoLossConfig) -> Result<TopoLossResult<T>> {
    evaluate(pc, cfg, false)
}

/// Like [`topo_loss`], but refuses clouds where an active edge has zero
/// length, since the gradient is undefined there.
pub fn topo_loss_grad<T: Scalar>(pc: &PointCloud<T>, cfg: &TopoLossConfig) -> Result<TopoLossResult<T>> {
    evaluate(pc, cfg, true)
}

/// Largest deviation between the analytic gradient and central differences
/// with step `h`, relative to the larger of the two gradients' max norms.
pub fn fd_check<T: Scalar>(pc: &PointCloud<T>, cfg: &TopoLossConfig, h: T) -> Result<T> {
    if !(h > T::zero()) {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    if let Some(min) = pc.min_pairwise_distance() {
        if !(min > h * T::lit(10.0)) {
            return Err(Error::Degenerate(format!(
                "minimum pairwise distance {min} is not above 10 h"
            )));
        }
    }
    let analytic = topo_loss_grad(pc, cfg)?.gradient;
    let mut pts = pc.points().to_vec();
    let mut numeric = vec![[T::zero(); 3]; pts.len()];
    for i in 0..pts.len() {
        for a in 0..3 {
            let orig = pts[i].to_array();
            let mut shifted = |s: T| -> Result<T> {
                let mut c = orig;
                c[a] = c[a] + s;
                pts[i] = Point3::from_array(c);
                let v = topo_loss(&PointCloud::new(pts.clone())?, cfg)?.value;
                pts[i] = Point3::from_array(orig);
                Ok(v)
            };
            let plus = shifted(h)?;
            let minus = shifted(-h)?;
            numeric[i][a] = (plus - minus) / (h + h);
        }
    }
    let mut scale = T::zero();
    let mut worst = T::zero();
    for (g, f) in analytic.iter().zip(&numeric) {
        for (x, y) in g.to_array().iter().zip(f) {
            scale = scale.max(x.abs()).max(y.abs());
            worst = worst.max((*x - *y).abs());
        }
    }
    Ok(if scale == T::zero() { T::zero() } else { worst / scale })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepSchedule {
    Constant,
    /// Step decays linearly from `step_size` towards zero over the run.
    #[default]
    Linear,
}

impl std::str::FromStr for StepSchedule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "constant" => Ok(Self::Constant),
            "linear" => Ok(Self::Linear),
            other => Err(Error::InvalidArgument(format!("unknown step schedule '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkeletonizeOptions<T> {
    pub iterations: usize,
    pub step_size: T,
    pub lambda_topo: T,
    pub lambda_fid: T,
    pub schedule: StepSchedule,
    /// Snapshot cadence in iterations; 0 keeps only the initial and final clouds.
    pub snapshot_every: usize,
    /// Consecutive loss increases tolerated before giving up.
    pub divergence_patience: usize,
}

impl<T: Scalar> Default for SkeletonizeOptions<T> {
    fn default() -> Self {
        Self {
            iterations: 2000,
            step_size: T::lit(0.05),
            lambda_topo: T::one(),
            lambda_fid: T::zero(),
            schedule: StepSchedule::Linear,
            snapshot_every: 100,
            divergence_patience: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationLog<T> {
    pub iteration: usize,
    pub topo: T,
    pub fidelity: T,
    pub total: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    /// `(iteration, cloud)`, starting with the input and ending with the result.
    pub snapshots: Vec<(usize, PointCloud<T>)>,
    /// Loss terms before each step, plus one entry for the final cloud.
    pub log: Vec<IterationLog<T>>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn initial(&self) -> &PointCloud<T> {
        &self.snapshots.first().expect("trajectory has snapshots").1
    }

    pub fn final_cloud(&self) -> &PointCloud<T> {
        &self.snapshots.last().expect("trajectory has snapshots").1
    }

    pub fn log_csv(&self) -> String {
        let mut out = String::from("iteration,topo,fidelity,total\n");
        for l in &self.log {
            let _ = writeln!(out, "{},{},{},{}", l.iteration, l.topo, l.fidelity, l.total);
        }
        out
    }

    /// Writes `snapshot_<iteration>.xyz` files and `log.csv` into `dir`.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<Vec<std::path::PathBuf>> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut written = Vec::new();
        for (it, cloud) in &self.snapshots {
            let path = dir.join(format!("snapshot_{it:06}.xyz"));
            save_pointcloud(cloud, &path, Format::Xyz)?;
            written.push(path);
        }
        let log = dir.join("log.csv");
        write_atomic(&log, self.log_csv().as_bytes())?;
        written.push(log);
        Ok(written)
    }
}

/// Gradient descent on `lambda_topo * topo_loss + lambda_fid * CD-L2(mean)`
/// against the input cloud.
pub fn skeletonize<T: Scalar>(
    pc: &PointCloud<T>,
    cfg: &TopoLossConfig,
    opts: &SkeletonizeOptions<T>,
) -> Result<Trajectory<T>> {
    if !(opts.step_size > T::zero()) {
        return Err(Error::InvalidArgument("step size must be positive".into()));
    }
    if opts.lambda_topo < T::zero() || opts.lambda_fid < T::zero() {
        return Err(Error::InvalidArgument("loss weights must be nonnegative".into()));
    }
    let original = pc.clone();
    let mut current = pc.clone();
    let mut snapshots = vec![(0, current.clone())];
    let mut log = Vec::with_capacity(opts.iterations + 1);
    let mut previous_total: Option<T> = None;
    let mut streak = 0usize;

    let terms = |cloud: &PointCloud<T>| -> Result<(T, T, Vec<Point3<T>>)> {
        let topo = topo_loss(cloud, cfg)?;
        let mut grad: Vec<Point3<T>> = topo.gradient.iter().map(|g| *g * opts.lambda_topo).collect();
        let mut fid = T::zero();
        if opts.lambda_fid > T::zero() {
            let (v, g) = chamfer_l2_with_grad(cloud, &original, Reduction::Mean)?;
            fid = v;
            for (a, b) in grad.iter_mut().zip(g) {
                *a += b * opts.lambda_fid;
            }
        }
        Ok((topo.value, fid, grad))
    };

    for it in 0..opts.iterations {
        let (topo, fid, grad) = terms(&current)?;
        let total = opts.lambda_topo * topo + opts.lambda_fid * fid;
        log.push(IterationLog { iteration: it, topo, fidelity: fid, total });
        if previous_total.is_some_and(|p| total > p) {
            streak += 1;
            if streak >= opts.divergence_patience {
                return Err(Error::Divergence { iteration: it, streak });
            }
        } else {
            streak = 0;
        }
        previous_total = Some(total);

        let step = match opts.schedule {
            StepSchedule::Constant => opts.step_size,
            StepSchedule::Linear => {
                opts.step_size * T::from_count(opts.iterations - it) / T::from_count(opts.iterations)
            }
        };
        for (p, g) in current.points_mut().iter_mut().zip(&grad) {
            *p -= *g * step;
        }
        if opts.snapshot_every > 0 && (it + 1) % opts.snapshot_every == 0 && it + 1 < opts.iterations {
            snapshots.push((it + 1, current.clone()));
        }
    }
    let (topo, fid, _) = terms(&current)?;
    log.push(IterationLog {
        iteration: opts.iterations,
        topo,
        fidelity: fid,
        total: opts.lambda_topo * topo + opts.lambda_fid * fid,
    });
    if opts.iterations > 0 {
        snapshots.push((opts.iterations, current));
    }
    Ok(Trajectory { snapshots, log })
}
