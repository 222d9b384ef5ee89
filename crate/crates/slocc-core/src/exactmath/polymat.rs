//! Matrices over Q(i)[t] and their Smith normal form.
//!
//! Used as an independent oracle for pencil invariants; the classification
//! pipeline itself never goes through this code.

use crate::exactmath::gauss::GaussRat;
use crate::exactmath::matrix::Matrix;
use crate::exactmath::poly::Poly;

/// Dense polynomial matrix, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            data: vec![Poly::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Poly) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        PolyMatrix { rows, cols, data }
    }

    /// The pencil a + t*b.
    pub fn pencil(a: &Matrix, b: &Matrix) -> Self {
        assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()));
        PolyMatrix::from_fn(a.rows(), a.cols(), |r, c| {
            Poly::new(vec![a[(r, c)].clone(), b[(r, c)].clone()])
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Poly {
        &self.data[r * self.cols + c]
    }

    fn set(&mut self, r: usize, c: usize, v: Poly) {
        self.data[r * self.cols + c] = v;
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// row_i -= q * row_j
    fn sub_scaled_row(&mut self, i: usize, j: usize, q: &Poly) {
        for c in 0..self.cols {
            let v = self.at(i, c).sub(&self.at(j, c).mul(q));
            self.set(i, c, v);
        }
    }

    /// col_i -= q * col_j
    fn sub_scaled_col(&mut self, i: usize, j: usize, q: &Poly) {
        for r in 0..self.rows {
            let v = self.at(r, i).sub(&self.at(r, j).mul(q));
            self.set(r, i, v);
        }
    }

    fn add_row(&mut self, i: usize, j: usize) {
        for c in 0..self.cols {
            let v = self.at(i, c).add(self.at(j, c));
            self.set(i, c, v);
        }
    }

    /// Common unit scalar that makes all coefficients of the given
    /// polynomials coprime integers; a valid (unit) row or column operation
    /// that controls coefficient growth during elimination.
    fn common_content_scale<'a>(polys: impl Iterator<Item = &'a Poly>) -> Option<GaussRat> {
        use num_bigint::BigInt;
        use num_integer::Integer;
        use num_traits::{One, Zero};
        let mut den_lcm = BigInt::one();
        let mut coeffs: Vec<&GaussRat> = Vec::new();
        for p in polys {
            for c in p.coeffs() {
                den_lcm = den_lcm.lcm(c.re.denom());
                den_lcm = den_lcm.lcm(c.im.denom());
                coeffs.push(c);
            }
        }
        let mut num_gcd = BigInt::zero();
        for c in coeffs {
            num_gcd = num_gcd.gcd(&(c.re.numer() * (&den_lcm / c.re.denom())));
            num_gcd = num_gcd.gcd(&(c.im.numer() * (&den_lcm / c.im.denom())));
        }
        if num_gcd.is_zero() {
            return None;
        }
        Some(GaussRat::new(
            num_rational::BigRational::new(den_lcm, num_gcd),
            num_rational::BigRational::zero(),
        ))
    }

    fn strip_row(&mut self, r: usize) {
        let Some(scale) = Self::common_content_scale((0..self.cols).map(|c| self.at(r, c))) else {
            return;
        };
        for c in 0..self.cols {
            let v = self.at(r, c).scale(&scale);
            self.set(r, c, v);
        }
    }

    fn strip_col(&mut self, c: usize) {
        let Some(scale) = Self::common_content_scale((0..self.rows).map(|r| self.at(r, c))) else {
            return;
        };
        for r in 0..self.rows {
            let v = self.at(r, c).scale(&scale);
            self.set(r, c, v);
        }
    }

    /// Invariant factors d1 | d2 | ... | dr of the matrix over Q(i)[t],
    /// monic, r = generic rank.
    pub fn smith_form(&self) -> Vec<Poly> {
        let mut m = self.clone();
        for r in 0..m.rows {
            m.strip_row(r);
        }
        let n = m.rows.min(m.cols);
        let mut k = 0;
        while k < n {
            // Lightest minimal-degree nonzero entry in the trailing block.
            let weight = |p: &Poly| -> u64 {
                p.coeffs()
                    .iter()
                    .map(|c| {
                        c.re.numer().magnitude().bits()
                            + c.re.denom().magnitude().bits()
                            + c.im.numer().magnitude().bits()
                            + c.im.denom().magnitude().bits()
                    })
                    .sum()
            };
            let mut best: Option<(usize, usize, usize, u64)> = None;
            for r in k..m.rows {
                for c in k..m.cols {
                    if let Some(d) = m.at(r, c).degree() {
                        let w = weight(m.at(r, c));
                        if best.map_or(true, |(_, _, bd, bw)| d < bd || (d == bd && w < bw)) {
                            best = Some((r, c, d, w));
                        }
                    }
                }
            }
            let Some((br, bc, _, _)) = best else {
                break;
            };
            m.swap_rows(k, br);
            m.swap_cols(k, bc);

            // Clear row and column k; degree of the pivot strictly drops on
            // every retry, so this terminates.
            loop {
                let mut dirty = false;
                for r in k + 1..m.rows {
                    if m.at(r, k).is_zero() {
                        continue;
                    }
                    let (q, rem) = m.at(r, k).div_rem(m.at(k, k));
                    m.sub_scaled_row(r, k, &q);
                    m.strip_row(r);
                    if !rem.is_zero() {
                        m.swap_rows(k, r);
                        dirty = true;
                    }
                }
                for c in k + 1..m.cols {
                    if m.at(k, c).is_zero() {
                        continue;
                    }
                    let (q, rem) = m.at(k, c).div_rem(m.at(k, k));
                    m.sub_scaled_col(c, k, &q);
                    m.strip_col(c);
                    if !rem.is_zero() {
                        m.swap_cols(k, c);
                        dirty = true;
                    }
                }
                if !dirty {
                    break;
                }
            }

            // Enforce divisibility into the trailing block.
            let mut fixed = true;
            'check: for r in k + 1..m.rows {
                for c in k + 1..m.cols {
                    let (_, rem) = m.at(r, c).div_rem(m.at(k, k));
                    if !rem.is_zero() {
                        m.add_row(k, r);
                        fixed = false;
                        break 'check;
                    }
                }
            }
            if fixed {
                k += 1;
            }
        }
        (0..k).map(|d| m.at(d, d).monic()).collect()
    }

    /// Invariant factors of the pencil a + t*b via determinantal divisors:
    /// d_j is the monic gcd of all j x j minors and the factors are the
    /// successive quotients d_j / d_(j-1).
    ///
    /// Each minor determinant is interpolated from exact scalar-point
    /// determinant evaluations, which avoids the coefficient growth of
    /// direct polynomial elimination on larger pencils.
    pub fn pencil_invariant_factors(a: &Matrix, b: &Matrix) -> Vec<Poly> {
        assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()));
        let rows = a.rows();
        let cols = a.cols();
        let nmax = rows.min(cols);
        let mut divisors: Vec<Poly> = Vec::new();
        for j in 1..=nmax {
            let mut g = Poly::zero();
            'minors: for rs in combinations(rows, j) {
                for cs in combinations(cols, j) {
                    let minor = interpolated_minor(a, b, &rs, &cs);
                    g = g.gcd(&minor);
                    if g.degree() == Some(0) {
                        // gcd is already a unit; d_j = 1
                        break 'minors;
                    }
                }
            }
            if g.is_zero() {
                break;
            }
            divisors.push(g.monic());
        }
        let mut factors = Vec::with_capacity(divisors.len());
        let mut prev = Poly::one();
        for d in &divisors {
            let (q, rem) = d.div_rem(&prev);
            debug_assert!(rem.is_zero(), "determinantal divisors must divide");
            factors.push(q.monic());
            prev = d.clone();
        }
        factors
    }

    /// Determinantal divisors: gcd of all j x j minors for j = 1..=min dim.
    /// Brute force; test oracle only.
    pub fn determinantal_divisors(&self) -> Vec<Poly> {
        let n = self.rows.min(self.cols);
        let mut out = Vec::new();
        for j in 1..=n {
            let mut g = Poly::zero();
            for rs in combinations(self.rows, j) {
                for cs in combinations(self.cols, j) {
                    let minor = self.minor_det(&rs, &cs);
                    g = g.gcd(&minor);
                }
            }
            if g.is_zero() {
                break;
            }
            out.push(g);
        }
        out
    }

    fn minor_det(&self, rs: &[usize], cs: &[usize]) -> Poly {
        // cofactor expansion; minors stay tiny in tests
        let n = rs.len();
        if n == 0 {
            return Poly::one();
        }
        if n == 1 {
            return self.at(rs[0], cs[0]).clone();
        }
        let mut det = Poly::zero();
        for (k, &c) in cs.iter().enumerate() {
            let sub_rs = &rs[1..];
            let sub_cs: Vec<usize> = cs
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &v)| v)
                .collect();
            let term = self
                .at(rs[0], c)
                .clone()
                .mul(&self.minor_det(sub_rs, &sub_cs));
            det = if k % 2 == 0 {
                det.add(&term)
            } else {
                det.sub(&term)
            };
        }
        det
    }
}

/// Determinant of the (rs x cs) pencil submatrix as a polynomial in t,
/// recovered by Lagrange interpolation from scalar evaluations.
fn interpolated_minor(a: &Matrix, b: &Matrix, rs: &[usize], cs: &[usize]) -> Poly {
    let j = rs.len();
    let points: Vec<GaussRat> = (0..=j as i64).map(GaussRat::from_int).collect();
    let values: Vec<GaussRat> = points
        .iter()
        .map(|t| {
            let sub = Matrix::from_fn(j, j, |r, c| &a[(rs[r], cs[c])] + &(&b[(rs[r], cs[c])] * t));
            sub.det()
        })
        .collect();
    // Lagrange basis assembly; degree <= j so j+1 points determine it.
    let mut out = Poly::zero();
    for (k, xk) in points.iter().enumerate() {
        if values[k].is_zero() {
            continue;
        }
        let mut basis = Poly::constant(values[k].clone());
        for (l, xl) in points.iter().enumerate() {
            if l == k {
                continue;
            }
            let denom = xk - xl;
            let scale = denom.inv().expect("distinct points");
            basis = basis.mul(&Poly::linear(xl).scale(&scale));
        }
        out = out.add(&basis);
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::gauss::GaussRat;

    fn t() -> Poly {
        Poly::t()
    }

    #[test]
    fn diag_t_t() {
        let mut m = PolyMatrix::zeros(2, 2);
        m.set(0, 0, t());
        m.set(1, 1, t());
        assert_eq!(m.smith_form(), vec![t(), t()]);
    }

    #[test]
    fn unimodular() {
        // [[1, t], [0, 1]] -> (1, 1)
        let mut m = PolyMatrix::zeros(2, 2);
        m.set(0, 0, Poly::one());
        m.set(0, 1, t());
        m.set(1, 1, Poly::one());
        assert_eq!(m.smith_form(), vec![Poly::one(), Poly::one()]);
    }

    #[test]
    fn jordan_like() {
        // [[t, 1], [0, t]] -> (1, t^2)
        let mut m = PolyMatrix::zeros(2, 2);
        m.set(0, 0, t());
        m.set(0, 1, Poly::one());
        m.set(1, 1, t());
        assert_eq!(m.smith_form(), vec![Poly::one(), t().mul(&t())]);
    }

    #[test]
    fn chain_divisibility_and_gcd_match() {
        // invariant factors from smith equal quotients of determinantal divisors
        let m = PolyMatrix::from_fn(3, 3, |r, c| {
            Poly::new(vec![
                GaussRat::from_int((r * c) as i64 % 3),
                GaussRat::from_int((r + 2 * c) as i64 % 4),
            ])
        });
        let smith = m.smith_form();
        for w in smith.windows(2) {
            let (_, rem) = w[1].div_rem(&w[0]);
            assert!(rem.is_zero());
        }
        let dets = m.determinantal_divisors();
        let mut prev = Poly::one();
        for (k, d) in dets.iter().enumerate() {
            let expect = d.div_rem(&prev).0.monic();
            assert_eq!(smith[k], expect);
            prev = d.clone();
        }
    }

    #[test]
    fn interpolated_route_matches_smith_on_pencils() {
        // deterministic pseudo-random small pencils across shapes
        let mut state = 0x12345u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            ((state >> 32) % 7) as i64 - 3
        };
        for (rows, cols) in [(2, 2), (2, 3), (3, 3), (3, 4), (4, 4)] {
            for _ in 0..3 {
                let a = Matrix::from_fn(rows, cols, |_, _| GaussRat::from_int(next()));
                let b = Matrix::from_fn(rows, cols, |_, _| GaussRat::from_int(next()));
                let smith = PolyMatrix::pencil(&a, &b).smith_form();
                let interp = PolyMatrix::pencil_invariant_factors(&a, &b);
                assert_eq!(smith, interp, "{rows}x{cols} pencil");
            }
        }
    }
}
