//! Backbone sampling and the backbone-augmented completion loss.
//!
//! Backbones are sparse subsets of a complete cloud at several resolutions.
//! The loss adds, for every training pair, the metric between the completion
//! of each backbone and the complete cloud to the usual partial-input term.

use std::io::Write as _;
use std::process::{Command, Stdio};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::degrade::uniform_sample_indices;
use crate::distance::{chamfer, ChamferVariant, Reduction};
use crate::error::{Error, Result};
use crate::io::{parse_xyz, to_xyz_string};
use crate::rng::{splitmix64, substream};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FpsStart {
    Index(usize),
    /// Start index drawn from the given seed.
    Seeded(u64),
}

/// Greedy farthest-point sampling. Returns indices in selection order; each
/// pick maximises the distance to the already selected set, ties going to
/// the smaller index.
pub fn fps<T: Scalar>(pc: &PointCloud<T>, m: usize, start: FpsStart) -> Result<Vec<usize>> {
    let n = pc.len();
    if m == 0 || m > n {
        return Err(Error::InvalidArgument(format!(
            "sample size {m} must be in 1..={n}"
        )));
    }
    let first = match start {
        FpsStart::Index(i) if i < n => i,
        FpsStart::Index(i) => {
            return Err(Error::InvalidArgument(format!("start index {i} out of range")));
        }
        FpsStart::Seeded(seed) => (splitmix64(seed, 0) % n as u64) as usize,
    };
    let pts = pc.points();
    let mut min_d2 = vec![T::infinity(); n];
    let mut chosen = Vec::with_capacity(m);
    let mut selected = vec![false; n];
    let mut current = first;
    loop {
        chosen.push(current);
        selected[current] = true;
        if chosen.len() == m {
            break;
        }
        let p = pts[current];
        let mut best = usize::MAX;
        let mut best_d = T::neg_infinity();
        for i in 0..n {
            let d = p.dist_squared(&pts[i]);
            if d < min_d2[i] {
                min_d2[i] = d;
            }
            if !selected[i] && min_d2[i] > best_d {
                best_d = min_d2[i];
                best = i;
            }
        }
        current = best;
    }
    Ok(chosen)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackboneSampler {
    #[default]
    Fps,
    Uniform,
}

impl std::str::FromStr for BackboneSampler {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fps" => Ok(Self::Fps),
            "uniform" => Ok(Self::Uniform),
            other => Err(Error::InvalidArgument(format!("unknown sampler '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BackboneSizes {
    Explicit(Vec<usize>),
    /// `n/2, n/4, ..., n/2^k` (floored, at least 1).
    Halving,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoshConfig {
    pub backbones: usize,
    pub sizes: BackboneSizes,
    pub sampler: BackboneSampler,
    /// Used for the uniform sampler and seeded FPS starts.
    pub seed: u64,
    pub fps_start: Option<usize>,
}

impl BoshConfig {
    pub fn halving(backbones: usize) -> Self {
        Self {
            backbones,
            sizes: BackboneSizes::Halving,
            sampler: BackboneSampler::Fps,
            seed: 0,
            fps_start: Some(0),
        }
    }

    pub fn explicit(sizes: Vec<usize>) -> Self {
        Self {
            backbones: sizes.len(),
            sizes: BackboneSizes::Explicit(sizes),
            sampler: BackboneSampler::Fps,
            seed: 0,
            fps_start: Some(0),
        }
    }

    /// Backbone sizes for a cloud of `n` points, validated.
    pub fn resolve_sizes(&self, n: usize) -> Result<Vec<usize>> {
        if self.backbones == 0 {
            return Err(Error::InvalidArgument("backbone count must be >= 1".into()));
        }
        let sizes = match &self.sizes {
            BackboneSizes::Explicit(s) => {
                if s.len() != self.backbones {
                    return Err(Error::InvalidArgument(format!(
                        "{} sizes given for {} backbones",
                        s.len(),
                        self.backbones
                    )));
                }
                s.clone()
            }
            BackboneSizes::Halving => (1..=self.backbones)
                .map(|j| (n >> j.min(63)).max(1))
                .collect(),
        };
        if let Some(bad) = sizes.iter().find(|&&s| s == 0 || s > n) {
            return Err(Error::InvalidArgument(format!(
                "backbone size {bad} must be in 1..={n}"
            )));
        }
        Ok(sizes)
    }
}

/// The configured backbones of a complete cloud, each in input order.
pub fn bosh_sample<T: Scalar>(complete: &PointCloud<T>, cfg: &BoshConfig) -> Result<Vec<PointCloud<T>>> {
    complete.ensure_nonempty()?;
    let sizes = cfg.resolve_sizes(complete.len())?;
    sizes
        .iter()
        .enumerate()
        .map(|(j, &m)| {
            let mut idx = match cfg.sampler {
                BackboneSampler::Fps => {
                    let start = match cfg.fps_start {
                        Some(i) => FpsStart::Index(i),
                        None => FpsStart::Seeded(cfg.seed),
                    };
                    fps(complete, m, start)?
                }
                BackboneSampler::Uniform => {
                    uniform_sample_indices(complete.len(), m, substream(cfg.seed, j as u64))?
                }
            };
            idx.sort_unstable();
            Ok(complete.select(&idx))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletionPair<T> {
    pub complete: PointCloud<T>,
    pub partial: PointCloud<T>,
}

impl<T: Scalar> CompletionPair<T> {
    pub fn new(complete: PointCloud<T>, partial: PointCloud<T>) -> Result<Self> {
        complete.ensure_nonempty()?;
        partial.ensure_nonempty()?;
        Ok(Self { complete, partial })
    }
}

/// A deterministic cloud-to-cloud map standing in for a completion model.
pub trait CompletionMap<T>: Sync {
    fn complete(&self, input: &PointCloud<T>) -> Result<PointCloud<T>>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityMap;

impl<T: Scalar> CompletionMap<T> for IdentityMap {
    fn complete(&self, input: &PointCloud<T>) -> Result<PointCloud<T>> {
        Ok(input.clone())
    }
}

impl<T, F> CompletionMap<T> for F
where
    F: Fn(&PointCloud<T>) -> Result<PointCloud<T>> + Sync,
{
    fn complete(&self, input: &PointCloud<T>) -> Result<PointCloud<T>> {
        self(input)
    }
}

/// Runs an external program once per cloud: XYZ in on stdin, XYZ out on
/// stdout. A non-zero exit status fails the term.
#[derive(Debug, Clone)]
pub struct ExternalCommand {
    pub program: String,
    pub args: Vec<String>,
}

impl ExternalCommand {
    pub fn new(program: impl Into<String>, args: Vec<String>) -> Self {
        Self {
            program: program.into(),
            args,
        }
    }

    /// `sh -c <command>`.
    pub fn shell(command: impl Into<String>) -> Self {
        Self::new("sh", vec!["-c".into(), command.into()])
    }
}

impl<T: Scalar> CompletionMap<T> for ExternalCommand {
    fn complete(&self, input: &PointCloud<T>) -> Result<PointCloud<T>> {
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| Error::Net(format!("cannot start '{}': {e}", self.program)))?;
        let payload = to_xyz_string(input);
        let mut stdin = child.stdin.take().expect("piped stdin");
        let writer = std::thread::spawn(move || stdin.write_all(payload.as_bytes()));
        let out = child
            .wait_with_output()
            .map_err(|e| Error::Net(format!("'{}' failed: {e}", self.program)))?;
        let _ = writer.join();
        if !out.status.success() {
            let stderr = String::from_utf8_lossy(&out.stderr);
            return Err(Error::Net(format!(
                "'{}' exited with {}: {}",
                self.program,
                out.status,
                stderr.lines().next().unwrap_or("")
            )));
        }
        let text = String::from_utf8(out.stdout)
            .map_err(|_| Error::Net("output is not UTF-8".into()))?;
        parse_xyz(&text).map_err(|e| Error::Net(format!("unreadable output: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TermKind {
    Backbone(usize),
    Partial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossTerm<T> {
    pub pair: usize,
    pub kind: TermKind,
    pub value: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoshLoss<T> {
    pub total: T,
    /// Ordered by pair, then backbones before the partial term.
    pub terms: Vec<LossTerm<T>>,
}

impl<T: Scalar> BoshLoss<T> {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("pair,term,value\n");
        for t in &self.terms {
            let kind = match t.kind {
                TermKind::Backbone(j) => format!("backbone{j}"),
                TermKind::Partial => "partial".to_string(),
            };
            out.push_str(&format!("{},{},{}\n", t.pair, kind, t.value));
        }
        out.push_str(&format!("total,,{}\n", self.total));
        out
    }
}

/// Backbone terms plus partial-input terms, summed over all pairs.
pub fn bosh_total_loss<T: Scalar>(
    pairs: &[CompletionPair<T>],
    net: &dyn CompletionMap<T>,
    cfg: &BoshConfig,
    metric: ChamferVariant,
    reduction: Reduction,
) -> Result<BoshLoss<T>> {
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("no completion pairs".into()));
    }
    let mut jobs: Vec<(usize, TermKind, PointCloud<T>)> = Vec::new();
    for (i, pair) in pairs.iter().enumerate() {
        for (j, backbone) in bosh_sample(&pair.complete, cfg)?.into_iter().enumerate() {
            jobs.push((i, TermKind::Backbone(j), backbone));
        }
        jobs.push((i, TermKind::Partial, pair.partial.clone()));
    }
    let terms: Vec<LossTerm<T>> = jobs
        .par_iter()
        .map(|(i, kind, input)| {
            let out = net.complete(input)?;
            if out.is_empty() {
                return Err(Error::Net(format!("empty output for pair {i}")));
            }
            Ok(LossTerm {
                pair: *i,
                kind: *kind,
                value: chamfer(&out, &pairs[*i].complete, metric, reduction)?,
            })
        })
        .collect::<Result<_>>()?;
    let total = terms.iter().fold(T::zero(), |a, t| a + t.value);
    Ok(BoshLoss { total, terms })
}
