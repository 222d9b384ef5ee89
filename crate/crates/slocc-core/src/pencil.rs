//! Rank behavior of the pencil a*G1 + b*G2 over the projective line: the
//! (n, l) = (max rank, min rank) signature and generic-rank witnesses.

use std::cmp::Ordering;
use std::fmt;

use crate::canonical::CanonicalForm;
use crate::exactmath::GaussRat;
use crate::state::MatrixPair;

/// A point of P^1 over Q(i). `Finite(v)` is the combination G1 + v*G2,
/// `Infinity` is G2 alone.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum ProjectivePoint {
    Finite(GaussRat),
    Infinity,
}

impl ProjectivePoint {
    pub fn zero() -> Self {
        ProjectivePoint::Finite(GaussRat::zero())
    }

    pub fn one() -> Self {
        ProjectivePoint::Finite(GaussRat::one())
    }

    pub fn from_int(v: i64) -> Self {
        ProjectivePoint::Finite(GaussRat::from_int(v))
    }

    /// Homogeneous coordinates (alpha : beta).
    pub fn homogeneous(&self) -> (GaussRat, GaussRat) {
        match self {
            ProjectivePoint::Finite(v) => (GaussRat::one(), v.clone()),
            ProjectivePoint::Infinity => (GaussRat::zero(), GaussRat::one()),
        }
    }

    /// Canonical order: finite points by the field's total order, Infinity
    /// greatest.
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ProjectivePoint::Finite(a), ProjectivePoint::Finite(b)) => a.total_cmp(b),
            (ProjectivePoint::Finite(_), ProjectivePoint::Infinity) => Ordering::Less,
            (ProjectivePoint::Infinity, ProjectivePoint::Finite(_)) => Ordering::Greater,
            (ProjectivePoint::Infinity, ProjectivePoint::Infinity) => Ordering::Equal,
        }
    }

    pub fn render(&self) -> String {
        match self {
            ProjectivePoint::Finite(v) => v.to_string(),
            ProjectivePoint::Infinity => "inf".to_string(),
        }
    }
}

impl PartialOrd for ProjectivePoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.total_cmp(other))
    }
}

impl Ord for ProjectivePoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_cmp(other)
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// The (n, l) pair: maximum and minimum rank of the pencil over P^1.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PencilSignature {
    pub n: usize,
    pub l: usize,
}

/// Rank of the combination selected by `p`.
pub fn rank_at(s: &MatrixPair, p: &ProjectivePoint) -> usize {
    match p {
        ProjectivePoint::Finite(v) => s.gamma1.add(&s.gamma2.scale(v)).rank(),
        ProjectivePoint::Infinity => s.gamma2.rank(),
    }
}

/// Deterministic probe grid: 0, infinity, 1, 2, ..., rows+1. Rank can drop
/// at no more than `rows` projective points, so the maximum over the grid is
/// the true maximum.
pub fn probe_grid(rows: usize) -> Vec<ProjectivePoint> {
    let mut grid = vec![ProjectivePoint::zero(), ProjectivePoint::Infinity];
    grid.extend((1..=(rows as i64 + 1)).map(ProjectivePoint::from_int));
    grid
}

/// Maximum rank over the pencil together with the first grid point that
/// achieves it.
pub fn generic_rank(s: &MatrixPair) -> (usize, ProjectivePoint) {
    let mut best = 0;
    let mut witness = ProjectivePoint::zero();
    for p in probe_grid(s.rows()) {
        let r = rank_at(s, &p);
        if r > best {
            best = r;
            witness = p;
        }
        if best == s.rows().min(s.cols()) {
            break;
        }
    }
    (best, witness)
}

/// The (n, l) signature, with l read off the canonical data: the minimum
/// rank occurs at an eigenvalue point of the pencil, where the rank drops by
/// the number of blocks at that point.
pub fn signature(s: &MatrixPair, cf: &CanonicalForm) -> PencilSignature {
    let (n, _) = generic_rank(s);
    let max_drop = cf
        .segre
        .entries
        .iter()
        .map(|(_, blocks)| blocks.len())
        .max()
        .unwrap_or(0);
    PencilSignature {
        n,
        l: n - max_drop.min(n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::Matrix;

    #[test]
    fn rank_at_ghz() {
        let ghz = MatrixPair::ghz();
        assert_eq!(rank_at(&ghz, &ProjectivePoint::one()), 2);
        assert_eq!(rank_at(&ghz, &ProjectivePoint::zero()), 1);
        assert_eq!(rank_at(&ghz, &ProjectivePoint::Infinity), 1);
    }

    #[test]
    fn generic_rank_examples() {
        let (n, w) = generic_rank(&MatrixPair::ghz());
        assert_eq!((n, w), (2, ProjectivePoint::one()));

        let zero = MatrixPair::new(Matrix::zeros(2, 2), Matrix::zeros(2, 2)).unwrap();
        assert_eq!(generic_rank(&zero), (0, ProjectivePoint::zero()));

        let (n, w) = generic_rank(&MatrixPair::w());
        assert_eq!((n, w), (2, ProjectivePoint::zero()));
    }
}
