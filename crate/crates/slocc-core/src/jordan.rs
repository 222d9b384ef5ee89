//! Exact Jordan canonical form of the residual square block, and projective
//! (Moebius) normalization of the pencil eigenvalue structure into a
//! canonical Segre symbol.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::exactmath::{roots_in_field, GaussRat, Matrix};
use crate::pencil::ProjectivePoint;

/// Multiset of (eigenvalue point, descending Jordan block sizes).
///
/// Entries are kept in the canonical order: descending total multiplicity,
/// then descending block lists lexicographically, then ascending point with
/// Infinity greatest.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SegreSymbol {
    pub entries: Vec<(ProjectivePoint, Vec<usize>)>,
}

fn entry_cmp(a: &(ProjectivePoint, Vec<usize>), b: &(ProjectivePoint, Vec<usize>)) -> Ordering {
    let ta: usize = a.1.iter().sum();
    let tb: usize = b.1.iter().sum();
    tb.cmp(&ta)
        .then_with(|| b.1.cmp(&a.1))
        .then_with(|| a.0.total_cmp(&b.0))
}

impl SegreSymbol {
    pub fn empty() -> Self {
        SegreSymbol {
            entries: Vec::new(),
        }
    }

    /// Builds a symbol, sorting blocks and entries canonically. Points must
    /// be pairwise distinct and block lists nonempty.
    pub fn new(entries: Vec<(ProjectivePoint, Vec<usize>)>) -> Self {
        let mut entries: Vec<(ProjectivePoint, Vec<usize>)> = entries
            .into_iter()
            .map(|(p, mut blocks)| {
                assert!(!blocks.is_empty(), "empty block list");
                assert!(blocks.iter().all(|&b| b > 0), "zero block size");
                blocks.sort_unstable_by(|x, y| y.cmp(x));
                (p, blocks)
            })
            .collect();
        for i in 0..entries.len() {
            for j in i + 1..entries.len() {
                assert!(entries[i].0 != entries[j].0, "duplicate eigenvalue point");
            }
        }
        entries.sort_by(entry_cmp);
        SegreSymbol { entries }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum of all block sizes: the dimension of the square part.
    pub fn total_dim(&self) -> usize {
        self.entries
            .iter()
            .map(|(_, b)| b.iter().sum::<usize>())
            .sum()
    }

    /// Largest number of blocks attached to a single point.
    pub fn max_block_count(&self) -> usize {
        self.entries.iter().map(|(_, b)| b.len()).max().unwrap_or(0)
    }

    pub fn points(&self) -> Vec<ProjectivePoint> {
        self.entries.iter().map(|(p, _)| p.clone()).collect()
    }

    /// The multiset of block partitions, order-insensitive over points.
    pub fn partition_multiset(&self) -> Vec<Vec<usize>> {
        let mut parts: Vec<Vec<usize>> = self.entries.iter().map(|(_, b)| b.clone()).collect();
        parts.sort();
        parts
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(p, blocks)| {
                let bs: Vec<String> = blocks.iter().map(|b| b.to_string()).collect();
                format!("({},[{}])", p.render(), bs.join(","))
            })
            .collect();
        format!("[{}]", parts.join(","))
    }
}

impl PartialOrd for SegreSymbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SegreSymbol {
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.entries.len().min(other.entries.len());
        for k in 0..n {
            let c = entry_cmp(&self.entries[k], &other.entries[k]);
            if c != Ordering::Equal {
                return c;
            }
        }
        self.entries.len().cmp(&other.entries.len())
    }
}

// ---------------------------------------------------------------------------
// Jordan form

/// Incremental row-echelon independence tracker.
struct SpanTracker {
    reduced: Vec<Vec<GaussRat>>,
}

impl SpanTracker {
    fn new() -> Self {
        SpanTracker {
            reduced: Vec::new(),
        }
    }

    /// Reduces `v` against the stored span; if a nonzero remainder is left,
    /// stores it and returns true.
    fn insert(&mut self, mut v: Vec<GaussRat>) -> bool {
        for basis in &self.reduced {
            let lead = basis.iter().position(|e| !e.is_zero()).unwrap();
            if !v[lead].is_zero() {
                let coeff = &v[lead] / &basis[lead];
                for (ve, be) in v.iter_mut().zip(basis) {
                    *ve = &*ve - &(&coeff * be);
                }
            }
        }
        if v.iter().all(|e| e.is_zero()) {
            return false;
        }
        self.reduced.push(v);
        true
    }
}

fn column(m: &Matrix, c: usize) -> Vec<GaussRat> {
    (0..m.rows()).map(|r| m[(r, c)].clone()).collect()
}

/// Exact Jordan form: returns the raw symbol (matrix eigenvalues as finite
/// points) and an invertible `s` with s^-1 * a * s in Jordan layout matching
/// `jordan_matrix` of the symbol.
pub fn jordan_form(a: &Matrix) -> Result<(SegreSymbol, Matrix)> {
    assert!(a.is_square());
    let n = a.rows();
    if n == 0 {
        return Ok((SegreSymbol::empty(), Matrix::identity(0)));
    }
    let charpoly = a.charpoly();
    let (roots, fully_split) = roots_in_field(&charpoly);
    if !fully_split {
        return Err(Error::EigenvalueOutsideField(format!(
            "characteristic polynomial {charpoly} does not split over Q(i)"
        )));
    }

    let mut entries = Vec::new();
    let mut chains_per_eigen: Vec<(GaussRat, Vec<Vec<Vec<GaussRat>>>)> = Vec::new();

    for (lambda, alg_mult) in &roots {
        let nilpotent = a.sub(&Matrix::identity(n).scale(lambda));
        // Kernel filtration dims and bases.
        let mut powers = vec![Matrix::identity(n)];
        let mut kernels = vec![Matrix::zeros(n, 0)];
        let mut dims = vec![0usize];
        loop {
            let next = powers.last().unwrap().mul(&nilpotent);
            let ker = next.kernel_basis();
            let d = ker.cols();
            powers.push(next);
            kernels.push(ker);
            dims.push(d);
            if d == *alg_mult {
                break;
            }
        }
        let top_height = dims.len() - 1;

        // Chain tops, tallest first.
        let mut tops: Vec<(Vec<GaussRat>, usize)> = Vec::new();
        for h in (1..=top_height).rev() {
            let wanted = dims[h] - dims[h - 1];
            let have = tops.iter().filter(|(_, th)| *th > h).count();
            if wanted == have {
                continue;
            }
            let mut tracker = SpanTracker::new();
            for c in 0..kernels[h - 1].cols() {
                tracker.insert(column(&kernels[h - 1], c));
            }
            for (v, th) in &tops {
                let img = apply_power(&powers[th - h], v);
                tracker.insert(img);
            }
            let mut added = 0;
            for c in 0..kernels[h].cols() {
                if added == wanted - have {
                    break;
                }
                if tracker.insert(column(&kernels[h], c)) {
                    // recover the raw (unreduced) candidate as the top
                    tops.push((column(&kernels[h], c), h));
                    added += 1;
                }
            }
            debug_assert_eq!(added, wanted - have);
        }

        // Expand chains: deepest vector first.
        let mut chains: Vec<Vec<Vec<GaussRat>>> = Vec::new();
        for (v, h) in &tops {
            let chain: Vec<Vec<GaussRat>> =
                (0..*h).rev().map(|k| apply_power(&powers[k], v)).collect();
            chains.push(chain);
        }
        chains.sort_by_key(|c| std::cmp::Reverse(c.len()));
        let blocks: Vec<usize> = chains.iter().map(|c| c.len()).collect();
        entries.push((ProjectivePoint::Finite(lambda.clone()), blocks));
        chains_per_eigen.push((lambda.clone(), chains));
    }

    let symbol = SegreSymbol::new(entries);

    // Assemble S following the symbol's canonical entry order.
    let mut cols: Vec<Vec<GaussRat>> = Vec::new();
    for (point, blocks) in &symbol.entries {
        let ProjectivePoint::Finite(lambda) = point else {
            unreachable!("raw symbol has finite points only")
        };
        let chains = &chains_per_eigen
            .iter()
            .find(|(l, _)| l == lambda)
            .expect("eigenvalue present")
            .1;
        let mut used = vec![false; chains.len()];
        for &size in blocks {
            let idx = chains
                .iter()
                .enumerate()
                .position(|(i, c)| !used[i] && c.len() == size)
                .expect("chain of matching size");
            used[idx] = true;
            cols.extend(chains[idx].iter().cloned());
        }
    }
    let s = Matrix::from_fn(n, n, |r, c| cols[c][r].clone());
    debug_assert!(s.rank() == n, "Jordan basis must be invertible");
    Ok((symbol, s))
}

fn apply_power(power: &Matrix, v: &[GaussRat]) -> Vec<GaussRat> {
    let n = power.rows();
    let mut out = vec![GaussRat::zero(); n];
    for r in 0..n {
        let mut acc = GaussRat::zero();
        for c in 0..n {
            if !power[(r, c)].is_zero() && !v[c].is_zero() {
                acc = &acc + &(&power[(r, c)] * &v[c]);
            }
        }
        out[r] = acc;
    }
    out
}

/// Block-diagonal Jordan matrix realizing `entries` (finite eigenvalues) in
/// the given order.
pub fn jordan_matrix(entries: &[(GaussRat, Vec<usize>)]) -> Matrix {
    let dim: usize = entries.iter().map(|(_, b)| b.iter().sum::<usize>()).sum();
    let mut j = Matrix::zeros(dim, dim);
    let mut pos = 0;
    for (lambda, blocks) in entries {
        for &size in blocks {
            for k in 0..size {
                j[(pos + k, pos + k)] = lambda.clone();
                if k + 1 < size {
                    j[(pos + k, pos + k + 1)] = GaussRat::one();
                }
            }
            pos += size;
        }
    }
    j
}

/// Jordan matrix of a raw symbol with finite points.
pub fn jordan_matrix_of_symbol(symbol: &SegreSymbol) -> Matrix {
    let entries: Vec<(GaussRat, Vec<usize>)> = symbol
        .entries
        .iter()
        .map(|(p, b)| match p {
            ProjectivePoint::Finite(v) => (v.clone(), b.clone()),
            ProjectivePoint::Infinity => panic!("raw symbol has finite points only"),
        })
        .collect();
    jordan_matrix(&entries)
}

// ---------------------------------------------------------------------------
// Moebius normalization

/// An invertible 2x2 matrix acting on homogeneous coordinates of P^1.
#[derive(Clone, Debug)]
pub struct Moebius {
    pub m: [[GaussRat; 2]; 2],
}

impl Moebius {
    pub fn identity() -> Self {
        Moebius {
            m: [
                [GaussRat::one(), GaussRat::zero()],
                [GaussRat::zero(), GaussRat::one()],
            ],
        }
    }

    pub fn apply(&self, p: &ProjectivePoint) -> ProjectivePoint {
        let (alpha, beta) = p.homogeneous();
        let a = &(&self.m[0][0] * &alpha) + &(&self.m[0][1] * &beta);
        let b = &(&self.m[1][0] * &alpha) + &(&self.m[1][1] * &beta);
        if a.is_zero() {
            assert!(!b.is_zero(), "Moebius matrix is singular");
            ProjectivePoint::Infinity
        } else {
            ProjectivePoint::Finite(&b / &a)
        }
    }

    pub fn apply_symbol(&self, s: &SegreSymbol) -> SegreSymbol {
        SegreSymbol::new(
            s.entries
                .iter()
                .map(|(p, b)| (self.apply(p), b.clone()))
                .collect(),
        )
    }

    fn perp(p: &ProjectivePoint) -> (GaussRat, GaussRat) {
        let (alpha, beta) = p.homogeneous();
        (beta, -&alpha)
    }

    fn dot(a: &(GaussRat, GaussRat), p: &ProjectivePoint) -> GaussRat {
        let (alpha, beta) = p.homogeneous();
        &(&a.0 * &alpha) + &(&a.1 * &beta)
    }

    /// The unique map sending (a, b, c) to (0, 1, Infinity).
    pub fn to_standard_triple(
        a: &ProjectivePoint,
        b: &ProjectivePoint,
        c: &ProjectivePoint,
    ) -> Self {
        let pa = Self::perp(a);
        let pc = Self::perp(c);
        let s_top = Self::dot(&pa, b);
        let s_bot = Self::dot(&pc, b);
        assert!(!s_top.is_zero() && !s_bot.is_zero(), "triple not distinct");
        Moebius {
            m: [
                [&s_top * &pc.0, &s_top * &pc.1],
                [&s_bot * &pa.0, &s_bot * &pa.1],
            ],
        }
    }

    /// A map sending a to 0 and b to Infinity.
    pub fn to_zero_infinity(a: &ProjectivePoint, b: &ProjectivePoint) -> Self {
        let pa = Self::perp(a);
        let pb = Self::perp(b);
        Moebius {
            m: [[pb.0, pb.1], [pa.0, pa.1]],
        }
    }

    /// A map sending a to 0.
    pub fn to_zero(a: &ProjectivePoint) -> Self {
        let pa = Self::perp(a);
        // Complete to an invertible matrix; a unit row always works because
        // the perp of a finite point has nonzero second coordinate.
        let row1 = match a {
            ProjectivePoint::Finite(_) => (GaussRat::one(), GaussRat::zero()),
            ProjectivePoint::Infinity => (GaussRat::zero(), GaussRat::one()),
        };
        Moebius {
            m: [[row1.0, row1.1], [pa.0, pa.1]],
        }
    }

    pub fn compose(&self, inner: &Moebius) -> Moebius {
        let mut out = [
            [GaussRat::zero(), GaussRat::zero()],
            [GaussRat::zero(), GaussRat::zero()],
        ];
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] = &(&self.m[r][0] * &inner.m[0][c]) + &(&self.m[r][1] * &inner.m[1][c]);
            }
        }
        Moebius { m: out }
    }
}

/// Deterministic canonical representative of the symbol's orbit under
/// Moebius transformations of the pencil parameter.
pub fn moebius_canonicalize(raw: &SegreSymbol) -> SegreSymbol {
    moebius_canonicalize_with_map(raw).0
}

/// Canonicalization together with a map realizing it.
pub fn moebius_canonicalize_with_map(raw: &SegreSymbol) -> (SegreSymbol, Moebius) {
    let points = raw.points();
    match points.len() {
        0 => (raw.clone(), Moebius::identity()),
        1 => {
            let map = Moebius::to_zero(&points[0]);
            (map.apply_symbol(raw), map)
        }
        2 => {
            let mut best: Option<(SegreSymbol, Moebius)> = None;
            for (a, b) in [(&points[0], &points[1]), (&points[1], &points[0])] {
                let map = Moebius::to_zero_infinity(a, b);
                let sym = map.apply_symbol(raw);
                if best.as_ref().map_or(true, |(bsym, _)| sym < *bsym) {
                    best = Some((sym, map));
                }
            }
            best.unwrap()
        }
        _ => {
            let mut best: Option<(SegreSymbol, Moebius)> = None;
            for a in &points {
                for b in &points {
                    if b == a {
                        continue;
                    }
                    for c in &points {
                        if c == a || c == b {
                            continue;
                        }
                        let map = Moebius::to_standard_triple(a, b, c);
                        let sym = map.apply_symbol(raw);
                        if best.as_ref().map_or(true, |(bsym, _)| sym < *bsym) {
                            best = Some((sym, map));
                        }
                    }
                }
            }
            best.unwrap()
        }
    }
}

/// Maps a matrix eigenvalue of the square block to the pencil point where
/// the combination G1 + v*G2 loses rank: mu = 0 sits at Infinity, otherwise
/// v = -1/mu.
pub fn pencil_point_of_eigenvalue(mu: &GaussRat) -> ProjectivePoint {
    if mu.is_zero() {
        ProjectivePoint::Infinity
    } else {
        ProjectivePoint::Finite(-&mu.inv().expect("nonzero"))
    }
}

/// Deterministic eigenvalue assignment used when building literal canonical
/// matrices from a normalized symbol: finite points keep their value, the
/// Infinity point takes the first of 1, -1, 2, -2, ... not colliding with a
/// finite point.
pub fn denormalized_eigenvalues(symbol: &SegreSymbol) -> Vec<(GaussRat, Vec<usize>)> {
    let finite: Vec<GaussRat> = symbol
        .entries
        .iter()
        .filter_map(|(p, _)| match p {
            ProjectivePoint::Finite(v) => Some(v.clone()),
            ProjectivePoint::Infinity => None,
        })
        .collect();
    let infinity_value = || {
        for k in 1.. {
            for cand in [GaussRat::from_int(k), GaussRat::from_int(-k)] {
                if !finite.contains(&cand) {
                    return cand;
                }
            }
        }
        unreachable!()
    };
    symbol
        .entries
        .iter()
        .map(|(p, blocks)| match p {
            ProjectivePoint::Finite(v) => (v.clone(), blocks.clone()),
            ProjectivePoint::Infinity => (infinity_value(), blocks.clone()),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(v: i64) -> ProjectivePoint {
        ProjectivePoint::from_int(v)
    }

    #[test]
    fn jordan_diag_with_zero() {
        let a = Matrix::from_ints(&[&[3, 0], &[0, 0]]);
        let (sym, s) = jordan_form(&a).unwrap();
        assert_eq!(
            sym,
            SegreSymbol::new(vec![(fin(3), vec![1]), (fin(0), vec![1])])
        );
        let j = jordan_matrix_of_symbol(&sym);
        assert_eq!(s.invert().unwrap().mul(&a).mul(&s), j);
    }

    #[test]
    fn jordan_nilpotent() {
        let a = Matrix::from_ints(&[&[0, 1], &[0, 0]]);
        let (sym, s) = jordan_form(&a).unwrap();
        assert_eq!(sym, SegreSymbol::new(vec![(fin(0), vec![2])]));
        let j = jordan_matrix_of_symbol(&sym);
        assert_eq!(s.invert().unwrap().mul(&a).mul(&s), j);
    }

    #[test]
    fn jordan_ones_matrix() {
        // [[1,1],[1,1]]: eigenvalues 2 and 0.
        let a = Matrix::from_ints(&[&[1, 1], &[1, 1]]);
        let (sym, _) = jordan_form(&a).unwrap();
        assert_eq!(
            sym,
            SegreSymbol::new(vec![(fin(2), vec![1]), (fin(0), vec![1])])
        );
    }

    #[test]
    fn jordan_outside_field() {
        let a = Matrix::from_ints(&[&[0, 2], &[1, 0]]); // t^2 - 2
        assert!(matches!(
            jordan_form(&a),
            Err(Error::EigenvalueOutsideField(_))
        ));
    }

    #[test]
    fn jordan_bigger_block_structure() {
        // J_2(5) + J_1(5) + J_1(7) assembled, then conjugated.
        let j = jordan_matrix(&[
            (GaussRat::from_int(5), vec![2, 1]),
            (GaussRat::from_int(7), vec![1]),
        ]);
        let g = Matrix::from_ints(&[&[1, 2, 0, 1], &[0, 1, 1, 3], &[1, 0, 1, 0], &[2, 1, 0, 1]]);
        let a = g.mul(&j).mul(&g.invert().unwrap());
        let (sym, s) = jordan_form(&a).unwrap();
        assert_eq!(
            sym,
            SegreSymbol::new(vec![(fin(5), vec![2, 1]), (fin(7), vec![1]),])
        );
        assert_eq!(
            s.invert().unwrap().mul(&a).mul(&s),
            jordan_matrix_of_symbol(&sym)
        );
    }

    #[test]
    fn moebius_two_points() {
        let raw = SegreSymbol::new(vec![(fin(5), vec![1]), (fin(7), vec![1])]);
        let canon = moebius_canonicalize(&raw);
        assert_eq!(
            canon,
            SegreSymbol::new(vec![
                (ProjectivePoint::zero(), vec![1]),
                (ProjectivePoint::Infinity, vec![1]),
            ])
        );
    }

    #[test]
    fn moebius_single_point() {
        let raw = SegreSymbol::new(vec![(fin(9), vec![2])]);
        assert_eq!(
            moebius_canonicalize(&raw),
            SegreSymbol::new(vec![(ProjectivePoint::zero(), vec![2])])
        );
    }

    #[test]
    fn moebius_four_points_matches_exhaustive_minimum() {
        let raw = SegreSymbol::new(vec![
            (fin(0), vec![1]),
            (fin(1), vec![1]),
            (fin(4), vec![1]),
            (ProjectivePoint::Infinity, vec![1]),
        ]);
        let canon = moebius_canonicalize(&raw);
        // Independent oracle: enumerate all 24 ordered triples directly.
        let points = raw.points();
        let mut images = Vec::new();
        for a in &points {
            for b in &points {
                for c in &points {
                    if a == b || b == c || a == c {
                        continue;
                    }
                    let map = Moebius::to_standard_triple(a, b, c);
                    images.push(map.apply_symbol(&raw));
                }
            }
        }
        assert_eq!(images.len(), 24);
        let min = images.into_iter().min().unwrap();
        assert_eq!(canon, min);
        // The cross-ratio orbit of {0,1,4,inf} pins the free point at -3.
        assert_eq!(
            canon,
            SegreSymbol::new(vec![
                (fin(-3), vec![1]),
                (fin(0), vec![1]),
                (fin(1), vec![1]),
                (ProjectivePoint::Infinity, vec![1]),
            ])
        );
    }

    #[test]
    fn moebius_idempotent_and_orbit_constant() {
        let raw = SegreSymbol::new(vec![
            (fin(2), vec![2, 1]),
            (fin(-5), vec![1]),
            (ProjectivePoint::Infinity, vec![3]),
        ]);
        let canon = moebius_canonicalize(&raw);
        assert_eq!(moebius_canonicalize(&canon), canon);
        // A few deterministic maps across the orbit.
        for (a, b, c, d) in [(1, 2, 3, 5), (0, 1, -1, 0), (2, -1, 1, 1), (3, 0, 7, 2)] {
            let map = Moebius {
                m: [
                    [GaussRat::from_int(a), GaussRat::from_int(b)],
                    [GaussRat::from_int(c), GaussRat::from_int(d)],
                ],
            };
            let moved = map.apply_symbol(&raw);
            assert_eq!(moebius_canonicalize(&moved), canon);
        }
    }

    #[test]
    fn multiplicity_preserved() {
        let raw = SegreSymbol::new(vec![(fin(3), vec![2, 2]), (fin(1), vec![1])]);
        let canon = moebius_canonicalize(&raw);
        assert_eq!(canon.total_dim(), raw.total_dim());
        assert_eq!(canon.partition_multiset(), raw.partition_multiset());
    }
}
