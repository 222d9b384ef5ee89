use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::exactmath::gauss::GaussRat;
use crate::exactmath::poly::Poly;

/// Dense matrix over Q(i), row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<GaussRat>,
}

impl Index<(usize, usize)> for Matrix {
    type Output = GaussRat;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &GaussRat {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut GaussRat {
        &mut self.data[r * self.cols + c]
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![GaussRat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = GaussRat::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> GaussRat) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows_elems: Vec<Vec<GaussRat>>) -> Result<Self> {
        let rows = rows_elems.len();
        let cols = rows_elems.first().map_or(0, |r| r.len());
        for row in &rows_elems {
            if row.len() != cols {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
        }
        Ok(Matrix {
            rows,
            cols,
            data: rows_elems.into_iter().flatten().collect(),
        })
    }

    /// Integer-entry convenience constructor.
    pub fn from_ints(rows_elems: &[&[i64]]) -> Self {
        let rows: Vec<Vec<GaussRat>> = rows_elems
            .iter()
            .map(|r| r.iter().map(|&v| GaussRat::from_int(v)).collect())
            .collect();
        Matrix::from_rows(rows).expect("rectangular literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn conj_transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: &GaussRat) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |r, c| &self[(r, c)] * s)
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.rows, self.cols, |r, c| &self[(r, c)] + &rhs[(r, c)])
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.rows, self.cols, |r, c| &self[(r, c)] - &rhs[(r, c)])
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "inner dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = &rhs[(k, c)];
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a * b;
                    let cell = &mut out[(r, c)];
                    *cell = &*cell + &prod;
                }
            }
        }
        out
    }

    pub fn trace(&self) -> GaussRat {
        assert!(self.is_square());
        let mut t = GaussRat::zero();
        for k in 0..self.rows {
            t = &t + &self[(k, k)];
        }
        t
    }

    pub fn submatrix(&self, row_ids: &[usize], col_ids: &[usize]) -> Matrix {
        Matrix::from_fn(row_ids.len(), col_ids.len(), |r, c| {
            self[(row_ids[r], col_ids[c])].clone()
        })
    }

    pub fn hstack(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.rows, rhs.rows);
        Matrix::from_fn(self.rows, self.cols + rhs.cols, |r, c| {
            if c < self.cols {
                self[(r, c)].clone()
            } else {
                rhs[(r, c - self.cols)].clone()
            }
        })
    }

    pub fn vstack(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.cols);
        Matrix::from_fn(self.rows + rhs.rows, self.cols, |r, c| {
            if r < self.rows {
                self[(r, c)].clone()
            } else {
                rhs[(r - self.rows, c)].clone()
            }
        })
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(&self, rhs: &Matrix) -> Matrix {
        Matrix::from_fn(self.rows + rhs.rows, self.cols + rhs.cols, |r, c| {
            if r < self.rows && c < self.cols {
                self[(r, c)].clone()
            } else if r >= self.rows && c >= self.cols {
                rhs[(r - self.rows, c - self.cols)].clone()
            } else {
                GaussRat::zero()
            }
        })
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    /// row_i += coeff * row_j
    pub fn add_scaled_row(&mut self, i: usize, j: usize, coeff: &GaussRat) {
        assert_ne!(i, j);
        for c in 0..self.cols {
            let add = &self[(j, c)] * coeff;
            if !add.is_zero() {
                let cell = &mut self[(i, c)];
                *cell = &*cell + &add;
            }
        }
    }

    pub fn scale_row(&mut self, i: usize, coeff: &GaussRat) {
        for c in 0..self.cols {
            let cell = &mut self[(i, c)];
            *cell = &*cell * coeff;
        }
    }

    /// Exact rank over Q(i), by fraction-free Bareiss elimination on a
    /// row-scaled Gaussian-integer copy. Entry growth stays bounded by minor
    /// sizes instead of exploding through rational normalization.
    pub fn rank(&self) -> usize {
        use num_bigint::BigInt;
        use num_integer::Integer;
        use num_traits::{One, Zero};

        type GInt = (BigInt, BigInt);
        let mut a: Vec<Vec<GInt>> = (0..self.rows)
            .map(|r| {
                let mut lcm = BigInt::one();
                for c in 0..self.cols {
                    let e = &self[(r, c)];
                    lcm = lcm.lcm(e.re.denom());
                    lcm = lcm.lcm(e.im.denom());
                }
                (0..self.cols)
                    .map(|c| {
                        let e = &self[(r, c)];
                        (
                            e.re.numer() * (&lcm / e.re.denom()),
                            e.im.numer() * (&lcm / e.im.denom()),
                        )
                    })
                    .collect()
            })
            .collect();
        let rows = self.rows;
        let cols = self.cols;
        let is_zero = |g: &GInt| g.0.is_zero() && g.1.is_zero();
        let weight = |g: &GInt| g.0.magnitude().bits() + g.1.magnitude().bits();
        let mul =
            |x: &GInt, y: &GInt| -> GInt { (&x.0 * &y.0 - &x.1 * &y.1, &x.0 * &y.1 + &x.1 * &y.0) };
        // exact division (divisibility guaranteed by the Bareiss identity)
        let div = |x: &GInt, y: &GInt| -> GInt {
            let n = &y.0 * &y.0 + &y.1 * &y.1;
            let conj = (y.0.clone(), -y.1.clone());
            let p = mul(x, &conj);
            (&p.0 / &n, &p.1 / &n)
        };

        let mut rank = 0;
        let mut prev: GInt = (BigInt::one(), BigInt::zero());
        let mut col_of: Vec<usize> = (0..cols).collect();
        for step in 0..rows.min(cols) {
            // lightest nonzero pivot in the trailing block
            let mut pivot: Option<(usize, usize, u64)> = None;
            for r in step..rows {
                for c in step..cols {
                    let e = &a[r][c];
                    if is_zero(e) {
                        continue;
                    }
                    let w = weight(e);
                    if pivot.map_or(true, |(_, _, bw)| w < bw) {
                        pivot = Some((r, c, w));
                    }
                }
            }
            let Some((pr, pc, _)) = pivot else {
                break;
            };
            a.swap(step, pr);
            if pc != step {
                for row in a.iter_mut() {
                    row.swap(step, pc);
                }
                col_of.swap(step, pc);
            }
            for r in step + 1..rows {
                if a[r][step..].iter().all(is_zero) {
                    continue;
                }
                for c in step + 1..cols {
                    let t1 = mul(&a[step][step], &a[r][c]);
                    let t2 = mul(&a[r][step], &a[step][c]);
                    let num = (&t1.0 - &t2.0, &t1.1 - &t2.1);
                    a[r][c] = if prev.0.is_one() && prev.1.is_zero() {
                        num
                    } else {
                        div(&num, &prev)
                    };
                }
                a[r][step] = (BigInt::zero(), BigInt::zero());
            }
            prev = a[step][step].clone();
            rank = step + 1;
        }
        rank
    }

    /// Gauss-Jordan elimination with a recorded row transform.
    ///
    /// Returns (reduced, row_ops, pivot_cols) with row_ops * self = reduced,
    /// row_ops invertible, reduced in reduced row-echelon form and the pivot
    /// columns in ascending order.
    pub fn rref_with_transform(&self) -> (Matrix, Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut ops = Matrix::identity(self.rows);
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(pivot) = (rank..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(rank, pivot);
            ops.swap_rows(rank, pivot);
            let inv = m[(rank, col)].inv().expect("nonzero pivot");
            m.scale_row(rank, &inv);
            ops.scale_row(rank, &inv);
            for r in 0..m.rows {
                if r != rank && !m[(r, col)].is_zero() {
                    let coeff = -&m[(r, col)];
                    m.add_scaled_row(r, rank, &coeff);
                    ops.add_scaled_row(r, rank, &coeff);
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        (m, ops, pivots)
    }

    /// Exact inverse. Fails with `Singular` when no inverse exists.
    pub fn invert(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "inverse of non-square matrix".into(),
            ));
        }
        let (reduced, ops, pivots) = self.rref_with_transform();
        if pivots.len() != self.rows {
            return Err(Error::Singular);
        }
        debug_assert_eq!(reduced, Matrix::identity(self.rows));
        Ok(ops)
    }

    pub fn det(&self) -> GaussRat {
        assert!(self.is_square());
        let mut m = self.clone();
        let mut det = GaussRat::one();
        for col in 0..m.cols {
            let Some(pivot) = (col..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                return GaussRat::zero();
            };
            if pivot != col {
                m.swap_rows(col, pivot);
                det = -&det;
            }
            det = &det * &m[(col, col)];
            let inv = m[(col, col)].inv().expect("nonzero pivot");
            for r in col + 1..m.rows {
                if !m[(r, col)].is_zero() {
                    let coeff = -&(&m[(r, col)] * &inv);
                    m.add_scaled_row(r, col, &coeff);
                }
            }
        }
        det
    }

    /// Basis of the right kernel, as columns of an n x k matrix.
    pub fn kernel_basis(&self) -> Matrix {
        let (reduced, _, pivots) = self.rref_with_transform();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Matrix::zeros(self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            basis[(fc, k)] = GaussRat::one();
            for (prow, &pc) in pivots.iter().enumerate() {
                basis[(pc, k)] = -&reduced[(prow, fc)];
            }
        }
        basis
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    /// Monic characteristic polynomial det(tI - self) by the
    /// Faddeev-LeVerrier recurrence.
    pub fn charpoly(&self) -> Poly {
        assert!(self.is_square(), "charpoly of non-square matrix");
        let n = self.rows;
        // c[n] = 1; M_0 = 0; M_k = A*M_{k-1} + c_{n-k+1} I; c_{n-k} = -tr(A*M_k)/k
        let mut coeffs = vec![GaussRat::zero(); n + 1];
        coeffs[n] = GaussRat::one();
        let mut mk = Matrix::zeros(n, n);
        for k in 1..=n {
            let mut step = self.mul(&mk);
            for d in 0..n {
                let cell = &mut step[(d, d)];
                *cell = &*cell + &coeffs[n - k + 1];
            }
            mk = step;
            let am = self.mul(&mk);
            let t = am.trace();
            let kk = GaussRat::from_int(k as i64);
            coeffs[n - k] = -&(&t / &kk);
        }
        Poly::new(coeffs)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self[(r, c)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(Matrix::zeros(3, 4).rank(), 0);
        assert_eq!(Matrix::identity(5).rank(), 5);
        // [[1, i], [i, -1]] has rank 1: row2 - i*row1 = 0.
        let m = Matrix::from_rows(vec![
            vec![GaussRat::one(), GaussRat::i()],
            vec![GaussRat::i(), GaussRat::from_int(-1)],
        ])
        .unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn rref_examples() {
        let id = Matrix::identity(3);
        let (r, ops, piv) = id.rref_with_transform();
        assert_eq!(r, id);
        assert_eq!(ops, id);
        assert_eq!(piv, vec![0, 1, 2]);

        let m = Matrix::from_ints(&[&[0, 2], &[0, 0]]);
        let (r, ops, piv) = m.rref_with_transform();
        assert_eq!(r, Matrix::from_ints(&[&[0, 1], &[0, 0]]));
        assert_eq!(piv, vec![1]);
        assert_eq!(ops.mul(&m), r);

        let m = Matrix::from_ints(&[&[1, 1], &[1, 1]]);
        let (r, ops, piv) = m.rref_with_transform();
        assert_eq!(r, Matrix::from_ints(&[&[1, 1], &[0, 0]]));
        assert_eq!(piv, vec![0]);
        assert_eq!(ops.mul(&m), r);
        assert!(ops.invert().is_ok());
    }

    #[test]
    fn invert_examples() {
        let id = Matrix::identity(4);
        assert_eq!(id.invert().unwrap(), id);

        let swap = Matrix::from_ints(&[&[0, 1], &[1, 0]]);
        assert_eq!(swap.invert().unwrap(), swap);

        let m = Matrix::from_ints(&[&[1, 1], &[0, 1]]);
        let inv = m.invert().unwrap();
        assert_eq!(inv, Matrix::from_ints(&[&[1, -1], &[0, 1]]));
        assert_eq!(m.mul(&inv), Matrix::identity(2));

        let sing = Matrix::from_ints(&[&[1, 2], &[2, 4]]);
        assert!(matches!(sing.invert(), Err(Error::Singular)));
    }

    #[test]
    fn charpoly_examples() {
        // (t-1)^2 = t^2 - 2t + 1
        let p = Matrix::identity(2).charpoly();
        assert_eq!(p.coeff_ints(), vec![1, -2, 1]);
        // nilpotent: t^2
        let p = Matrix::from_ints(&[&[0, 1], &[0, 0]]).charpoly();
        assert_eq!(p.coeff_ints(), vec![0, 0, 1]);
        // rotation: t^2 + 1
        let p = Matrix::from_ints(&[&[0, -1], &[1, 0]]).charpoly();
        assert_eq!(p.coeff_ints(), vec![1, 0, 1]);
    }

    #[test]
    fn kernel_basis_is_kernel() {
        let m = Matrix::from_ints(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = m.kernel_basis();
        assert_eq!(k.cols(), 2);
        assert!(m.mul(&k).is_zero());
    }
}
