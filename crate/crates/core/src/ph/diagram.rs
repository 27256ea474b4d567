use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::FiltrationConvention;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One `(birth, death)` pair. Essential classes have `death = +inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistencePair<T> {
    pub dim: u8,
    pub birth: T,
    pub death: T,
}

impl<T: Scalar> PersistencePair<T> {
    pub fn new(dim: u8, birth: T, death: T) -> Self {
        Self { dim, birth, death }
    }

    pub fn essential(dim: u8, birth: T) -> Self {
        Self::new(dim, birth, T::infinity())
    }

    #[inline]
    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }

    #[inline]
    pub fn persistence(&self) -> T {
        self.death - self.birth
    }

    pub(crate) fn cmp_key(&self, other: &Self) -> Ordering {
        self.dim
            .cmp(&other.dim)
            .then(self.birth.partial_cmp(&other.birth).unwrap_or(Ordering::Equal))
            .then(self.death.partial_cmp(&other.death).unwrap_or(Ordering::Equal))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram<T> {
    pub pairs: Vec<PersistencePair<T>>,
    pub convention: FiltrationConvention,
    pub n_points: usize,
    /// Filtration cap the diagram was computed under, in convention units.
    pub max_filtration: Option<T>,
}

impl<T: Scalar> PersistenceDiagram<T> {
    pub(crate) fn from_pairs(
        mut pairs: Vec<PersistencePair<T>>,
        convention: FiltrationConvention,
        n_points: usize,
        max_filtration: Option<T>,
    ) -> Self {
        pairs.sort_by(|a, b| a.cmp_key(b));
        Self {
            pairs,
            convention,
            n_points,
            max_filtration,
        }
    }

    pub fn in_dim(&self, dim: u8) -> impl Iterator<Item = &PersistencePair<T>> {
        self.pairs.iter().filter(move |p| p.dim == dim)
    }

    pub fn finite_in_dim(&self, dim: u8) -> impl Iterator<Item = &PersistencePair<T>> {
        self.in_dim(dim).filter(|p| !p.is_essential())
    }

    /// Concatenates the pairs of two diagrams of the same cloud.
    pub fn merged(&self, other: &Self) -> Result<Self> {
        if self.convention != other.convention || self.n_points != other.n_points {
            return Err(Error::InvalidArgument(
                "diagrams differ in convention or point count".into(),
            ));
        }
        let mut pairs = self.pairs.clone();
        pairs.extend_from_slice(&other.pairs);
        Ok(Self::from_pairs(
            pairs,
            self.convention,
            self.n_points,
            self.max_filtration.or(other.max_filtration),
        ))
    }

    /// Every birth and death multiplied by `s`.
    pub fn scaled(&self, s: T) -> Self {
        Self {
            pairs: self
                .pairs
                .iter()
                .map(|p| PersistencePair::new(p.dim, p.birth * s, p.death * s))
                .collect(),
            convention: self.convention,
            n_points: self.n_points,
            max_filtration: self.max_filtration.map(|c| c * s),
        }
    }
}

/// Mean persistence of the finite pairs in dimensions 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagramStats<T> {
    pub h0_mean: T,
    pub h1_mean: T,
}

/// Essential pairs are excluded; a dimension without finite pairs has mean 0.
pub fn diagram_stats<T: Scalar>(d: &PersistenceDiagram<T>) -> DiagramStats<T> {
    let mean = |dim: u8| {
        let (sum, count) = d
            .finite_in_dim(dim)
            .fold((T::zero(), 0usize), |(s, c), p| (s + p.persistence(), c + 1));
        if count == 0 {
            T::zero()
        } else {
            sum / T::from_count(count)
        }
    };
    DiagramStats {
        h0_mean: mean(0),
        h1_mean: mean(1),
    }
}

/// `dim,birth,death` CSV with `inf` for essential deaths.
pub fn write_diagram_csv<T: Scalar>(d: &PersistenceDiagram<T>) -> String {
    let mut out = String::from("dim,birth,death\n");
    for p in &d.pairs {
        if p.is_essential() {
            let _ = writeln!(out, "{},{},inf", p.dim, p.birth);
        } else {
            let _ = writeln!(out, "{},{},{}", p.dim, p.birth, p.death);
        }
    }
    out
}

/// Reads the CSV written by [`write_diagram_csv`]. Convention and point count
/// are not part of the file; the caller supplies them.
pub fn parse_diagram_csv<T: Scalar>(
    text: &str,
    convention: FiltrationConvention,
) -> Result<PersistenceDiagram<T>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "dim,birth,death" => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: "expected header 'dim,birth,death'".into(),
            })
        }
    }
    let mut pairs = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let bad = |m: &str| Error::Parse {
            line: line_no,
            message: m.to_string(),
        };
        if fields.len() != 3 {
            return Err(bad("expected 3 fields"));
        }
        let dim: u8 = fields[0].trim().parse().map_err(|_| bad("invalid dim"))?;
        let birth: T = fields[1].trim().parse().map_err(|_| bad("invalid birth"))?;
        let death: T = match fields[2].trim() {
            "inf" | "+inf" | "Infinity" => T::infinity(),
            s => s.parse().map_err(|_| bad("invalid death"))?,
        };
        if !birth.is_finite() || death.is_nan() || death < birth {
            return Err(bad("pair must satisfy finite birth <= death"));
        }
        pairs.push(PersistencePair::new(dim, birth, death));
    }
    let n_points = pairs.iter().filter(|p| p.dim == 0).count();
    Ok(PersistenceDiagram::from_pairs(pairs, convention, n_points, None))
}
