//! Independent oracles and property harnesses: seeded random ILOs,
//! orbit-invariance sweeps, pencil invariants via the Smith form and rank
//! sequences, and the stabilizer-dimension invariant.

use serde::Serialize;

use crate::canonical::{classify, classify_detail, CanonicalForm};
use crate::error::Result;
use crate::exactmath::{roots_in_field, GaussRat, Matrix, Poly, PolyMatrix};
use crate::jordan::{moebius_canonicalize, SegreSymbol};
use crate::pencil::ProjectivePoint;
use crate::reduction::{conjugate_partition, IloTriple};
use crate::state::MatrixPair;

/// Seed for the deterministic random streams used by the harnesses.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Seed(pub u64);

/// SplitMix64: tiny, stable, reproducible forever.
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: Seed) -> Self {
        Rng { state: seed.0 }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [lo, hi].
    pub fn next_range(&mut self, lo: i64, hi: i64) -> i64 {
        let span = (hi - lo + 1) as u64;
        lo + (self.next_u64() % span) as i64
    }
}

fn random_square(rng: &mut Rng, dim: usize) -> Matrix {
    loop {
        let m = Matrix::from_fn(dim, dim, |_, _| {
            GaussRat::new(
                num_rational::BigRational::from_integer(rng.next_range(-3, 3).into()),
                num_rational::BigRational::from_integer(rng.next_range(-3, 3).into()),
            )
        });
        if !m.det().is_zero() {
            return m;
        }
    }
}

/// A deterministic random ILO with Gaussian-integer entries in [-3, 3],
/// resampled until all three factors are invertible.
pub fn random_ilo(m: usize, n: usize, seed: Seed) -> IloTriple {
    let mut rng = Rng::new(seed);
    IloTriple {
        t: random_square(&mut rng, 2),
        p: random_square(&mut rng, m),
        q: random_square(&mut rng, n),
    }
}

/// One orbit-invariance failure.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitFailure {
    pub seed: u64,
    pub expected: String,
    pub got: String,
}

/// Result of an orbit-invariance sweep.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitReport {
    pub trials: usize,
    pub failures: Vec<OrbitFailure>,
}

/// Classifies `trials` random ILO images of `s` and compares byte-exactly
/// with the base classification.
pub fn orbit_invariance(s: &MatrixPair, trials: usize, seed: Seed) -> Result<OrbitReport> {
    let base = classify(s)?;
    let mut failures = Vec::new();
    let mut rng = Rng::new(seed);
    for _ in 0..trials {
        let trial_seed = rng.next_u64();
        let ilo = random_ilo(s.rows(), s.cols(), Seed(trial_seed));
        let moved = ilo.apply(s);
        let got = classify(&moved)?;
        if got != base {
            failures.push(OrbitFailure {
                seed: trial_seed,
                expected: base.encoding.clone(),
                got: got.encoding,
            });
        }
    }
    Ok(OrbitReport { trials, failures })
}

/// Pencil invariants computed independently of the reduction path.
#[derive(Clone, Debug)]
pub struct PencilInvariants {
    /// Invariant factors of gamma1 + t*gamma2 over Q(i)[t].
    pub invariant_factors: Vec<Poly>,
    /// Eigenvalue structure: elementary divisors grouped per point,
    /// including the point at infinity.
    pub eigen_structure: SegreSymbol,
    /// Right minimal indices (ascending).
    pub right_minimal_indices: Vec<usize>,
    /// Left minimal indices (ascending).
    pub left_minimal_indices: Vec<usize>,
}

/// Invariant factors and rank-sequence analysis of the pencil, computed via
/// determinantal divisors (the same data the Smith form carries; the two
/// routes are cross-checked in the test suite).
pub fn pencil_invariants_oracle(s: &MatrixPair) -> Result<PencilInvariants> {
    let invariant_factors = PolyMatrix::pencil_invariant_factors(&s.gamma1, &s.gamma2);

    // Elementary divisors at finite points of the t-parameterization.
    let mut per_point: std::collections::BTreeMap<ProjectivePoint, Vec<usize>> =
        std::collections::BTreeMap::new();
    for factor in &invariant_factors {
        if factor.degree() == Some(0) {
            continue;
        }
        let (roots, _) = roots_in_field(factor);
        let degree_sum: usize = roots.iter().map(|(_, m)| m).sum();
        if degree_sum != factor.degree().unwrap_or(0) {
            return Err(crate::error::Error::EigenvalueOutsideField(format!(
                "invariant factor {factor} does not split over Q(i)"
            )));
        }
        for (root, mult) in roots {
            per_point
                .entry(ProjectivePoint::Finite(root))
                .or_default()
                .push(mult);
        }
    }
    // The infinity point from the reversed pencil gamma2 + u*gamma1 at u=0.
    for factor in PolyMatrix::pencil_invariant_factors(&s.gamma2, &s.gamma1) {
        if factor.degree() == Some(0) {
            continue;
        }
        // multiplicity of the root u = 0
        let mut mult = 0;
        let mut work = factor.clone();
        loop {
            let (q, r) = work.div_rem(&Poly::t());
            if !r.is_zero() {
                break;
            }
            mult += 1;
            work = q;
            if work.is_zero() {
                break;
            }
        }
        if mult > 0 {
            per_point
                .entry(ProjectivePoint::Infinity)
                .or_default()
                .push(mult);
        }
    }
    let eigen_structure = SegreSymbol::new(per_point.into_iter().collect());

    let right_minimal_indices = minimal_indices(&s.gamma1, &s.gamma2);
    let left_minimal_indices = minimal_indices(&s.gamma1.transpose(), &s.gamma2.transpose());

    Ok(PencilInvariants {
        invariant_factors,
        eigen_structure,
        right_minimal_indices,
        left_minimal_indices,
    })
}

/// Right minimal indices from the kernel dimensions of the stacked pencil
/// matrices: the dimension for degree bound k is the sum of k+1-e over the
/// indices e <= k, so consecutive increments count the indices.
fn minimal_indices(g1: &Matrix, g2: &Matrix) -> Vec<usize> {
    let n = g1.cols();
    let pair = MatrixPair {
        gamma1: g1.clone(),
        gamma2: g2.clone(),
    };
    let block_count = n - crate::pencil::generic_rank(&pair).0;
    let mut indices = Vec::new();
    let mut prev_dim = 0;
    let mut prev_increment = 0;
    for k in 0..=n {
        let dim = stacked_pencil(g1, g2, k).nullity();
        let increment = dim - prev_dim;
        for _ in 0..increment - prev_increment {
            indices.push(k);
        }
        prev_dim = dim;
        prev_increment = increment;
        if increment == block_count {
            break;
        }
    }
    debug_assert_eq!(indices.len(), block_count);
    indices
}

/// Block-Toeplitz stacking whose kernel is the space of polynomial kernel
/// vectors of degree <= k.
fn stacked_pencil(g1: &Matrix, g2: &Matrix, k: usize) -> Matrix {
    let m = g1.rows();
    let n = g1.cols();
    let rows = (k + 2) * m;
    let cols = (k + 1) * n;
    Matrix::from_fn(rows, cols, |r, c| {
        let block_r = r / m;
        let block_c = c / n;
        let rr = r % m;
        let cc = c % n;
        if block_r == block_c {
            g1[(rr, cc)].clone()
        } else if block_r == block_c + 1 {
            g2[(rr, cc)].clone()
        } else {
            GaussRat::zero()
        }
    })
}

/// Compares the oracle's invariants with a classification outcome: the
/// minimal-index data must match the staircase and deficiency profile, and
/// the eigenvalue structure must agree after Moebius normalization.
pub fn oracle_agrees(s: &MatrixPair, cf: &CanonicalForm) -> Result<bool> {
    let inv = pencil_invariants_oracle(s)?;
    // Trimmed states only: zero minimal indices correspond to trimmed planes.
    let right_nonzero: Vec<usize> = inv
        .right_minimal_indices
        .iter()
        .copied()
        .filter(|&e| e > 0)
        .collect();
    let left_nonzero: Vec<usize> = inv
        .left_minimal_indices
        .iter()
        .copied()
        .filter(|&e| e > 0)
        .collect();
    let mut eps = conjugate_partition(&cf.staircase);
    eps.sort_unstable();
    let mut etas = conjugate_partition(&cf.deficiency.left_profile);
    etas.sort_unstable();
    if right_nonzero != eps || left_nonzero != etas {
        return Ok(false);
    }
    let canon_oracle = moebius_canonicalize(&inv.eigen_structure);
    Ok(canon_oracle == cf.segre)
}

/// Dimension of the Lie-algebra stabilizer of the state: the nullity of the
/// linearized local action tau (x) p (x) q.
pub fn stabilizer_dimension(s: &MatrixPair) -> usize {
    let m = s.rows();
    let n = s.cols();
    // unknowns: tau (4), p (m*m), q (n*n)
    let vars = 4 + m * m + n * n;
    let eqs = 2 * m * n;
    let mut system = Matrix::zeros(eqs, vars);
    let slices = [&s.gamma1, &s.gamma2];
    for i in 0..2 {
        for r in 0..m {
            for c in 0..n {
                let eq = i * m * n + r * n + c;
                // tau[i][j] * gamma_j
                for j in 0..2 {
                    let val = &slices[j][(r, c)];
                    if !val.is_zero() {
                        system[(eq, i * 2 + j)] = val.clone();
                    }
                }
                // (p gamma_i)[r][c] = sum_k p[r][k] gamma_i[k][c]
                for k in 0..m {
                    let val = &slices[i][(k, c)];
                    if !val.is_zero() {
                        system[(eq, 4 + r * m + k)] = val.clone();
                    }
                }
                // (gamma_i q)[r][c] = sum_k gamma_i[r][k] q[k][c]
                for k in 0..n {
                    let val = &slices[i][(r, k)];
                    if !val.is_zero() {
                        system[(eq, 4 + m * m + k * n + c)] = val.clone();
                    }
                }
            }
        }
    }
    system.nullity()
}

/// Oracle cross-check of a classification: classify plus Smith/rank-sequence
/// agreement.
pub fn classify_and_cross_check(s: &MatrixPair) -> Result<(CanonicalForm, bool)> {
    let detail = classify_detail(s)?;
    let agrees = oracle_agrees(s, &detail.form)?;
    Ok((detail.form, agrees))
}
