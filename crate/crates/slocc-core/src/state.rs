//! The 2xMxN state model: a pair of MxN matrices over Q(i), reduced-density
//! ranks, the genuine-entanglement test, and support trimming.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{GaussRat, Matrix};

/// A 2xMxN pure state as its two MxN coefficient slices along the qubit
/// index.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatrixPair {
    pub gamma1: Matrix,
    pub gamma2: Matrix,
}

impl MatrixPair {
    pub fn new(gamma1: Matrix, gamma2: Matrix) -> Result<Self> {
        if gamma1.rows() != gamma2.rows() || gamma1.cols() != gamma2.cols() {
            return Err(Error::DimensionMismatch(format!(
                "slices {}x{} vs {}x{}",
                gamma1.rows(),
                gamma1.cols(),
                gamma2.rows(),
                gamma2.cols()
            )));
        }
        Ok(MatrixPair { gamma1, gamma2 })
    }

    pub fn rows(&self) -> usize {
        self.gamma1.rows()
    }

    pub fn cols(&self) -> usize {
        self.gamma1.cols()
    }

    /// GHZ written as a matrix pair.
    pub fn ghz() -> Self {
        MatrixPair {
            gamma1: Matrix::from_ints(&[&[1, 0], &[0, 0]]),
            gamma2: Matrix::from_ints(&[&[0, 0], &[0, 1]]),
        }
    }

    /// W written as a matrix pair.
    pub fn w() -> Self {
        MatrixPair {
            gamma1: Matrix::from_ints(&[&[0, 1], &[1, 0]]),
            gamma2: Matrix::from_ints(&[&[1, 0], &[0, 0]]),
        }
    }
}

/// Ranks of the three single-party reduced density matrices.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ReducedRanks {
    pub r0: usize,
    pub r1: usize,
    pub r2: usize,
}

/// Exact reduced-density-matrix ranks. Conjugation over Q(i) negates the
/// imaginary part, so all three ranks are decidable exactly.
pub fn reduced_ranks(s: &MatrixPair) -> ReducedRanks {
    let g1 = &s.gamma1;
    let g2 = &s.gamma2;
    let g1d = g1.conj_transpose();
    let g2d = g2.conj_transpose();
    let r2 = g1d.mul(g1).add(&g2d.mul(g2)).rank();
    let r1 = g1.mul(&g1d).add(&g2.mul(&g2d)).rank();
    let gram = Matrix::from_fn(2, 2, |i, j| {
        let a = if i == 0 { g1 } else { g2 };
        let b = if j == 0 { &g1d } else { &g2d };
        a.mul(b).trace()
    });
    let r0 = gram.rank();
    ReducedRanks { r0, r1, r2 }
}

/// True iff every single-party reduced density matrix has full rank.
pub fn is_genuine(s: &MatrixPair) -> bool {
    let r = reduced_ranks(s);
    r.r0 == 2 && r.r1 == s.rows() && r.r2 == s.cols()
}

/// Result of compressing a state onto its supporting subspaces.
#[derive(Clone, Debug)]
pub struct TrimOutcome {
    pub pair: MatrixPair,
    pub m_trim: usize,
    pub n_trim: usize,
    /// The qubit Gram rank is at most 1: the state carries no tripartite
    /// structure.
    pub effectively_bipartite: bool,
}

/// Moves the state onto its supporting row and column spaces and drops the
/// complement, yielding an SLOCC-equivalent pair on minimal dimensions.
/// Already-minimal states are returned unchanged, which makes trimming
/// idempotent.
pub fn trim(s: &MatrixPair) -> TrimOutcome {
    let ranks = reduced_ranks(s);
    if ranks.r1 == s.rows() && ranks.r2 == s.cols() {
        return TrimOutcome {
            pair: s.clone(),
            m_trim: ranks.r1,
            n_trim: ranks.r2,
            effectively_bipartite: ranks.r0 <= 1,
        };
    }
    // Column support: stack the slices vertically and column-compress.
    let stacked = s.gamma1.vstack(&s.gamma2);
    let (_, col_ops_t, col_pivots) = stacked.transpose().rref_with_transform();
    let n_trim = col_pivots.len();
    let col_ops = col_ops_t.transpose();
    let keep_cols: Vec<usize> = (0..n_trim).collect();
    let all_rows_1: Vec<usize> = (0..s.rows()).collect();
    let g1 = s.gamma1.mul(&col_ops).submatrix(&all_rows_1, &keep_cols);
    let g2 = s.gamma2.mul(&col_ops).submatrix(&all_rows_1, &keep_cols);

    // Row support: stack horizontally and row-compress.
    let side = g1.hstack(&g2);
    let (_, left_ops, row_pivots) = side.rref_with_transform();
    let m_trim = row_pivots.len();
    let keep_rows: Vec<usize> = (0..m_trim).collect();
    let all_cols: Vec<usize> = (0..n_trim).collect();
    let g1 = left_ops.mul(&g1).submatrix(&keep_rows, &all_cols);
    let g2 = left_ops.mul(&g2).submatrix(&keep_rows, &all_cols);

    let pair = MatrixPair {
        gamma1: g1,
        gamma2: g2,
    };
    let r0 = reduced_ranks(&pair).r0;
    TrimOutcome {
        pair,
        m_trim,
        n_trim,
        effectively_bipartite: r0 <= 1,
    }
}

/// Enforces the row-count <= column-count orientation by transposing both
/// slices when needed.
pub fn transpose_orient(s: &MatrixPair) -> (MatrixPair, bool) {
    if s.rows() > s.cols() {
        (
            MatrixPair {
                gamma1: s.gamma1.transpose(),
                gamma2: s.gamma2.transpose(),
            },
            true,
        )
    } else {
        (s.clone(), false)
    }
}

// ---------------------------------------------------------------------------
// Wire format

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaussWire {
    re: String,
    im: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateWire {
    m: usize,
    n: usize,
    gamma1: Vec<Vec<GaussWire>>,
    gamma2: Vec<Vec<GaussWire>>,
}

fn matrix_from_wire(w: &[Vec<GaussWire>], m: usize, n: usize, name: &str) -> Result<Matrix> {
    if w.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "{name}: expected {m} rows, found {}",
            w.len()
        )));
    }
    let mut rows = Vec::with_capacity(m);
    for (ri, row) in w.iter().enumerate() {
        if row.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{name} row {ri}: expected {n} entries, found {}",
                row.len()
            )));
        }
        let mut out = Vec::with_capacity(n);
        for e in row {
            out.push(GaussRat::from_strings(&e.re, &e.im)?);
        }
        rows.push(out);
    }
    Matrix::from_rows(rows)
}

fn matrix_to_wire(m: &Matrix) -> Vec<Vec<GaussWire>> {
    (0..m.rows())
        .map(|r| {
            (0..m.cols())
                .map(|c| {
                    let (re, im) = m[(r, c)].to_strings();
                    GaussWire { re, im }
                })
                .collect()
        })
        .collect()
}

/// Parses the state JSON schema.
pub fn parse_state(bytes: &[u8]) -> Result<MatrixPair> {
    let wire: StateWire =
        serde_json::from_slice(bytes).map_err(|e| Error::MalformedInput(e.to_string()))?;
    let gamma1 = matrix_from_wire(&wire.gamma1, wire.m, wire.n, "gamma1")?;
    let gamma2 = matrix_from_wire(&wire.gamma2, wire.m, wire.n, "gamma2")?;
    MatrixPair::new(gamma1, gamma2)
}

/// Canonical JSON rendering of a state.
pub fn serialize_state(s: &MatrixPair) -> Vec<u8> {
    let wire = StateWire {
        m: s.rows(),
        n: s.cols(),
        gamma1: matrix_to_wire(&s.gamma1),
        gamma2: matrix_to_wire(&s.gamma2),
    };
    serde_json::to_vec(&wire).expect("state serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_ranks_examples() {
        assert_eq!(
            reduced_ranks(&MatrixPair::ghz()),
            ReducedRanks {
                r0: 2,
                r1: 2,
                r2: 2
            }
        );
        let product =
            MatrixPair::new(Matrix::from_ints(&[&[1, 0], &[0, 0]]), Matrix::zeros(2, 2)).unwrap();
        assert_eq!(
            reduced_ranks(&product),
            ReducedRanks {
                r0: 1,
                r1: 1,
                r2: 1
            }
        );
        let zero = MatrixPair::new(Matrix::zeros(2, 2), Matrix::zeros(2, 2)).unwrap();
        assert_eq!(
            reduced_ranks(&zero),
            ReducedRanks {
                r0: 0,
                r1: 0,
                r2: 0
            }
        );
    }

    #[test]
    fn genuine_examples() {
        assert!(is_genuine(&MatrixPair::ghz()));
        assert!(is_genuine(&MatrixPair::w()));
        let zero = MatrixPair::new(Matrix::zeros(2, 2), Matrix::zeros(2, 2)).unwrap();
        assert!(!is_genuine(&zero));
    }

    #[test]
    fn trim_zero_plane() {
        // GHZ padded with a zero third column.
        let g1 = Matrix::from_ints(&[&[1, 0, 0], &[0, 0, 0]]);
        let g2 = Matrix::from_ints(&[&[0, 0, 0], &[0, 1, 0]]);
        let t = trim(&MatrixPair::new(g1, g2).unwrap());
        assert_eq!((t.m_trim, t.n_trim), (2, 2));
        assert_eq!(t.pair, MatrixPair::ghz());
        assert!(!t.effectively_bipartite);
    }

    #[test]
    fn trim_middle_planes() {
        // (E|0|0),(0|0|E) with M=2, N=5 compresses to the 2x2x4 pair.
        let g1 = Matrix::from_ints(&[&[1, 0, 0, 0, 0], &[0, 1, 0, 0, 0]]);
        let g2 = Matrix::from_ints(&[&[0, 0, 0, 1, 0], &[0, 0, 0, 0, 1]]);
        let t = trim(&MatrixPair::new(g1, g2).unwrap());
        assert_eq!((t.m_trim, t.n_trim), (2, 4));
        assert_eq!(
            t.pair.gamma1,
            Matrix::from_ints(&[&[1, 0, 0, 0], &[0, 1, 0, 0]])
        );
        assert_eq!(
            t.pair.gamma2,
            Matrix::from_ints(&[&[0, 0, 1, 0], &[0, 0, 0, 1]])
        );
    }

    #[test]
    fn trim_already_minimal() {
        let t = trim(&MatrixPair::w());
        assert_eq!((t.m_trim, t.n_trim), (2, 2));
        assert_eq!(t.pair, MatrixPair::w());
    }

    #[test]
    fn orient_examples() {
        let tall = MatrixPair::new(Matrix::zeros(3, 2), Matrix::zeros(3, 2)).unwrap();
        let (o, swapped) = transpose_orient(&tall);
        assert!(swapped);
        assert_eq!((o.rows(), o.cols()), (2, 3));
        let (o2, swapped2) = transpose_orient(&o);
        assert!(!swapped2);
        assert_eq!(o2, o);
    }

    #[test]
    fn wire_round_trip() {
        let ghz_json = br#"{ "m":2,"n":2,"gamma1":[[{"re":"1","im":"0"},{"re":"0","im":"0"}],[{"re":"0","im":"0"},{"re":"0","im":"0"}]],
  "gamma2":[[{"re":"0","im":"0"},{"re":"0","im":"0"}],[{"re":"0","im":"0"},{"re":"1","im":"0"}]] }"#;
        let s = parse_state(ghz_json).unwrap();
        assert_eq!(s, MatrixPair::ghz());
        let bytes = serialize_state(&s);
        assert_eq!(parse_state(&bytes).unwrap(), s);
    }

    #[test]
    fn wire_rejects_ragged() {
        let bad = br#"{"m":2,"n":2,"gamma1":[[{"re":"1","im":"0"}],[{"re":"0","im":"0"},{"re":"0","im":"0"}]],"gamma2":[[{"re":"0","im":"0"},{"re":"0","im":"0"}],[{"re":"0","im":"0"},{"re":"1","im":"0"}]]}"#;
        assert!(matches!(parse_state(bad), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn wire_rejects_truncated() {
        assert!(matches!(
            parse_state(b"{\"m\":2"),
            Err(Error::MalformedInput(_))
        ));
    }
}
