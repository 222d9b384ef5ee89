//! Enumeration of all inequivalent genuine class families for given
//! dimensions, instantiation of concrete representatives, and count tables.

use crate::canonical::{classify, CanonicalForm};
use crate::error::{Error, Result};
use crate::exactmath::GaussRat;
use crate::jordan::{denormalized_eigenvalues, jordan_matrix, SegreSymbol};
use crate::pencil::ProjectivePoint;
use crate::reduction::assemble_block_pair;
use crate::state::{is_genuine, MatrixPair};

/// A family of equivalent canonical shapes: rectangular structure plus a
/// Segre shape whose points beyond the three pinned ones are free
/// parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassFamily {
    pub m: usize,
    pub n: usize,
    /// Descending column-compression ranks (conjugate of the right minimal
    /// indices).
    pub staircase: Vec<usize>,
    /// Descending deficiency-chain profile (conjugate of the left minimal
    /// indices).
    pub left_profile: Vec<usize>,
    /// Jordan block partitions per eigenvalue point, heaviest first; the
    /// point values themselves are pinned to 0, 1, infinity and then free.
    pub partitions: Vec<Vec<usize>>,
    pub param_count: usize,
}

impl ClassFamily {
    /// Symbolic identity string; families of fixed (m, n) are distinct iff
    /// these differ.
    pub fn skeleton(&self) -> String {
        let st: Vec<String> = self.staircase.iter().map(|v| v.to_string()).collect();
        let lp: Vec<String> = self.left_profile.iter().map(|v| v.to_string()).collect();
        let parts: Vec<String> = self
            .partitions
            .iter()
            .map(|p| {
                let b: Vec<String> = p.iter().map(|v| v.to_string()).collect();
                format!("[{}]", b.join(","))
            })
            .collect();
        format!(
            "family|{}x{}|st=[{}]|lp=[{}]|parts=[{}]",
            self.m,
            self.n,
            st.join(","),
            lp.join(","),
            parts.join(",")
        )
    }

    /// Human-readable parameter constraints.
    pub fn constraints(&self) -> String {
        if self.param_count == 0 {
            "no free parameters".to_string()
        } else {
            format!(
                "{} parameter(s); pairwise distinct and different from 0 and 1",
                self.param_count
            )
        }
    }

    /// Deterministic valid default parameters: 2, 3, 4, ...
    pub fn default_params(&self) -> Vec<GaussRat> {
        (0..self.param_count)
            .map(|k| GaussRat::from_int(k as i64 + 2))
            .collect()
    }

    /// Eigenvalue points of the instantiated symbol: pinned points first,
    /// then the given parameters.
    fn points(&self, params: &[GaussRat]) -> Vec<ProjectivePoint> {
        let k = self.partitions.len();
        let mut pts = Vec::with_capacity(k);
        match k {
            0 => {}
            1 => pts.push(ProjectivePoint::zero()),
            2 => {
                pts.push(ProjectivePoint::zero());
                pts.push(ProjectivePoint::Infinity);
            }
            _ => {
                pts.push(ProjectivePoint::zero());
                pts.push(ProjectivePoint::one());
                pts.push(ProjectivePoint::Infinity);
                pts.extend(params.iter().cloned().map(ProjectivePoint::Finite));
            }
        }
        pts
    }
}

/// Builds the literal canonical matrix pair of a family member.
pub fn instantiate(f: &ClassFamily, params: &[GaussRat]) -> Result<MatrixPair> {
    if params.len() != f.param_count {
        return Err(Error::ConstraintViolation(format!(
            "expected {} parameters, got {}",
            f.param_count,
            params.len()
        )));
    }
    for (i, p) in params.iter().enumerate() {
        if p.is_zero() || p.is_one() {
            return Err(Error::ConstraintViolation(format!(
                "parameter {i} collides with a pinned point"
            )));
        }
        for q in &params[..i] {
            if p == q {
                return Err(Error::ConstraintViolation(
                    "parameters must be pairwise distinct".into(),
                ));
            }
        }
    }
    let points = f.points(params);
    let symbol = SegreSymbol::new(
        points
            .into_iter()
            .zip(f.partitions.iter().cloned())
            .collect(),
    );
    let square = jordan_matrix(&denormalized_eigenvalues(&symbol));
    Ok(assemble_block_pair(&square, &f.staircase, &f.left_profile))
}

/// Canonical form of the family's default instantiation.
pub fn family_form(f: &ClassFamily) -> Result<CanonicalForm> {
    classify(&instantiate(f, &f.default_params())?)
}

// ---------------------------------------------------------------------------
// Combinatorics

/// Descending partitions of `total` into exactly `parts` positive parts.
fn partitions_exact(total: usize, parts: usize, max: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    if total < parts {
        return vec![];
    }
    let mut out = Vec::new();
    let hi = max.min(total - (parts - 1));
    for first in (1..=hi).rev() {
        for mut rest in partitions_exact(total - first, parts - 1, first) {
            let mut p = vec![first];
            p.append(&mut rest);
            out.push(p);
        }
    }
    out
}

/// All descending partitions of `total`.
fn partitions_all(total: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for parts in 1..=total {
        out.extend(partitions_exact(total, parts, total));
    }
    out
}

/// Multisets of nonempty partitions with sizes summing to `total`,
/// enumerated as canonically ordered lists (heaviest first).
fn partition_multisets(total: usize) -> Vec<Vec<Vec<usize>>> {
    // Universe ordered heaviest-first; multisets are non-increasing index
    // sequences over it.
    let mut universe: Vec<Vec<usize>> = Vec::new();
    for size in (1..=total).rev() {
        universe.extend(partitions_all(size));
    }
    universe.sort_by(|a, b| {
        let ta: usize = a.iter().sum();
        let tb: usize = b.iter().sum();
        tb.cmp(&ta).then_with(|| b.cmp(a))
    });
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(
        universe: &[Vec<usize>],
        start: usize,
        remaining: usize,
        current: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if remaining == 0 {
            out.push(current.clone());
            return;
        }
        for idx in start..universe.len() {
            let size: usize = universe[idx].iter().sum();
            if size > remaining {
                continue;
            }
            current.push(universe[idx].clone());
            rec(universe, idx, remaining - size, current, out);
            current.pop();
        }
    }
    if total == 0 {
        return vec![vec![]];
    }
    rec(&universe, 0, total, &mut current, &mut out);
    out
}

/// True for the one non-genuine square shape: a single point carrying only
/// size-one blocks with no chains anywhere (the square block is then a
/// scalar multiple of the identity and the qubit cut collapses).
fn is_scalar_only(partitions: &[Vec<usize>]) -> bool {
    partitions.len() == 1 && partitions[0].iter().all(|&b| b == 1)
}

/// Complete, duplicate-free list of class families for trimmed dimensions
/// (m, n) with m <= n <= 2m.
///
/// For square dimensions the pencil is required to have full generic row
/// rank, matching the square-system counting convention; see the count
/// reproduction tests. With `genuine_only` false, the scalar square-block
/// family (qubit rank 1) is reported as well for audit sums.
pub fn enumerate_families(m: usize, n: usize, genuine_only: bool) -> Result<Vec<ClassFamily>> {
    if m < 1 || n < m || n > 2 * m {
        return Err(Error::DimensionOutOfRange(format!(
            "need 1 <= m <= n <= 2m, got ({m}, {n})"
        )));
    }
    let mut out = Vec::new();
    let max_z1 = if n == m { 0 } else { m };
    for z1 in 0..=max_z1 {
        let n_right = (n - m) + z1;
        // left chains: z1 parts, each >= 1
        let left_budget = m.saturating_sub(n_right + z1);
        let left_options: Vec<Vec<usize>> = if z1 == 0 {
            vec![vec![]]
        } else {
            (z1..=left_budget)
                .flat_map(|tot| partitions_exact(tot, z1, tot))
                .collect()
        };
        for etas in left_options {
            let eta_sum: usize = etas.iter().sum();
            let right_options: Vec<Vec<usize>> = if n_right == 0 {
                vec![vec![]]
            } else {
                let right_budget = m - eta_sum - z1;
                (n_right..=right_budget)
                    .flat_map(|tot| partitions_exact(tot, n_right, tot))
                    .collect()
            };
            for eps in right_options {
                let eps_sum: usize = eps.iter().sum();
                let d = m - eps_sum - eta_sum - z1;
                for partitions in partition_multisets(d) {
                    if genuine_only && z1 == 0 && n_right == 0 && is_scalar_only(&partitions) {
                        continue;
                    }
                    let k = partitions.len();
                    let family = ClassFamily {
                        m,
                        n,
                        staircase: conjugate(&eps),
                        left_profile: conjugate(&etas),
                        param_count: k.saturating_sub(3),
                        partitions,
                    };
                    debug_assert!({
                        let inst = instantiate(&family, &family.default_params()).unwrap();
                        let scalar_shape =
                            z1 == 0 && n_right == 0 && is_scalar_only(&family.partitions);
                        is_genuine(&inst) != scalar_shape
                    });
                    out.push(family);
                }
            }
        }
    }
    Ok(out)
}

fn conjugate(parts: &[usize]) -> Vec<usize> {
    crate::reduction::conjugate_partition(parts)
}

/// Genuine-family counts for all 1 <= m <= max_m, m <= n <= min(2m, max_n).
pub fn count_table(max_m: usize, max_n: usize) -> Vec<(usize, usize, usize)> {
    let mut rows = Vec::new();
    for m in 1..=max_m {
        for n in m..=(2 * m).min(max_n) {
            let count = enumerate_families(m, n, true).map(|f| f.len()).unwrap_or(0);
            rows.push((m, n, count));
        }
    }
    rows
}
