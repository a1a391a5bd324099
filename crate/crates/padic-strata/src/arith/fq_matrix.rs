//! Dense matrices over the residue fields `GF(p^f)`.
//!
//! Provides the linear algebra needed on residue quotients: rank/kernel via
//! row reduction, determinants, characteristic polynomials (via Hessenberg
//! reduction, valid in any characteristic) and minimal polynomials (via
//! Krylov chains and least-common-multiple assembly).

use crate::arith::fq::FqElem;
use crate::arith::residue_poly::ResiduePoly;
use crate::error::{Error, Result};

/// A dense row-major matrix over `GF(p^f)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FqMatrix {
    p: u64,
    f: usize,
    rows: usize,
    cols: usize,
    entries: Vec<FqElem>,
}

impl FqMatrix {
    pub fn zero(p: u64, f: usize, rows: usize, cols: usize) -> Self {
        FqMatrix {
            p,
            f,
            rows,
            cols,
            entries: vec![FqElem::zero(p, f); rows * cols],
        }
    }

    pub fn identity(p: u64, f: usize, n: usize) -> Self {
        let mut m = Self::zero(p, f, n, n);
        for i in 0..n {
            *m.at_mut(i, i) = FqElem::one(p, f);
        }
        m
    }

    pub fn from_rows(p: u64, f: usize, rows_data: Vec<Vec<FqElem>>) -> Self {
        let rows = rows_data.len();
        let cols = rows_data.first().map_or(0, |r| r.len());
        let mut entries = Vec::with_capacity(rows * cols);
        for r in rows_data {
            assert_eq!(r.len(), cols, "ragged rows");
            entries.extend(r);
        }
        FqMatrix { p, f, rows, cols, entries }
    }

    pub fn from_fn(
        p: u64,
        f: usize,
        rows: usize,
        cols: usize,
        mut gen: impl FnMut(usize, usize) -> FqElem,
    ) -> Self {
        let mut m = Self::zero(p, f, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                *m.at_mut(i, j) = gen(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn field_degree(&self) -> usize {
        self.f
    }

    pub fn at(&self, i: usize, j: usize) -> &FqElem {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut FqElem {
        &mut self.entries[i * self.cols + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, other: &FqMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect();
        FqMatrix { p: self.p, f: self.f, rows: self.rows, cols: self.cols, entries }
    }

    pub fn neg(&self) -> Self {
        FqMatrix {
            p: self.p,
            f: self.f,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(FqElem::neg).collect(),
        }
    }

    pub fn sub(&self, other: &FqMatrix) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &FqElem) -> Self {
        FqMatrix {
            p: self.p,
            f: self.f,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.mul(c)).collect(),
        }
    }

    pub fn mul(&self, other: &FqMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zero(self.p, self.f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a.mul(other.at(k, j));
                    let cur = out.at(i, j).add(&t);
                    *out.at_mut(i, j) = cur;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.p, self.f, self.cols, self.rows, |i, j| {
            self.at(j, i).clone()
        })
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: &[FqElem]) -> Vec<FqElem> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = FqElem::zero(self.p, self.f);
                for j in 0..self.cols {
                    acc = acc.add(&self.at(i, j).mul(&v[j]));
                }
                acc
            })
            .collect()
    }

    /// Row-reduce in place; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = vec![];
        let mut row = 0;
        for col in 0..self.cols {
            if row >= self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| !self.at(r, col).is_zero()) else {
                continue;
            };
            self.swap_rows(row, pr);
            let inv = self.at(row, col).inv().expect("pivot nonzero");
            for j in 0..self.cols {
                *self.at_mut(row, j) = self.at(row, j).mul(&inv);
            }
            for r in 0..self.rows {
                if r != row && !self.at(r, col).is_zero() {
                    let factor = self.at(r, col).clone();
                    for j in 0..self.cols {
                        let t = factor.mul(self.at(row, j));
                        *self.at_mut(r, j) = self.at(r, j).sub(&t);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// A basis of the right kernel `{x : A x = 0}`, as column vectors.
    pub fn kernel(&self) -> Vec<Vec<FqElem>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let mut basis = vec![];
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![FqElem::zero(self.p, self.f); self.cols];
            v[free] = FqElem::one(self.p, self.f);
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = m.at(r, free).neg();
            }
            basis.push(v);
        }
        basis
    }

    /// Determinant via Gaussian elimination.
    pub fn det(&self) -> Result<FqElem> {
        if self.rows != self.cols {
            return Err(Error::InvalidParameter("determinant of non-square matrix".into()));
        }
        let mut m = self.clone();
        let n = self.rows;
        let mut det = FqElem::one(self.p, self.f);
        for col in 0..n {
            let Some(pr) = (col..n).find(|&r| !m.at(r, col).is_zero()) else {
                return Ok(FqElem::zero(self.p, self.f));
            };
            if pr != col {
                m.swap_rows(col, pr);
                det = det.neg();
            }
            let pivot = m.at(col, col).clone();
            det = det.mul(&pivot);
            let inv = pivot.inv().expect("pivot nonzero");
            for r in col + 1..n {
                if m.at(r, col).is_zero() {
                    continue;
                }
                let factor = m.at(r, col).mul(&inv);
                for j in col..n {
                    let t = factor.mul(m.at(col, j));
                    *m.at_mut(r, j) = m.at(r, j).sub(&t);
                }
            }
        }
        Ok(det)
    }

    /// Characteristic polynomial `det(x I - A)`, monic of degree `n`.
    ///
    /// Computed by similarity reduction to upper Hessenberg form followed by
    /// the leading-principal-minor recurrence; valid in any characteristic.
    pub fn char_poly(&self) -> Result<ResiduePoly> {
        if self.rows != self.cols {
            return Err(Error::InvalidParameter(
                "characteristic polynomial of non-square matrix".into(),
            ));
        }
        let n = self.rows;
        let (p, f) = (self.p, self.f);
        if n == 0 {
            return Ok(ResiduePoly::one(p, f));
        }
        let mut h = self.clone();
        // Hessenberg reduction by similarity transformations.
        for j in 0..n.saturating_sub(2) {
            let Some(pr) = (j + 1..n).find(|&r| !h.at(r, j).is_zero()) else {
                continue;
            };
            if pr != j + 1 {
                h.swap_rows(j + 1, pr);
                // matching column swap for similarity
                for r in 0..n {
                    let tmp = h.at(r, j + 1).clone();
                    *h.at_mut(r, j + 1) = h.at(r, pr).clone();
                    *h.at_mut(r, pr) = tmp;
                }
            }
            let inv = h.at(j + 1, j).inv().expect("pivot nonzero");
            for r in j + 2..n {
                if h.at(r, j).is_zero() {
                    continue;
                }
                let t = h.at(r, j).mul(&inv);
                // row_r -= t * row_{j+1}
                for cc in 0..n {
                    let s = t.mul(h.at(j + 1, cc));
                    *h.at_mut(r, cc) = h.at(r, cc).sub(&s);
                }
                // col_{j+1} += t * col_r
                for rr in 0..n {
                    let s = t.mul(h.at(rr, r));
                    *h.at_mut(rr, j + 1) = h.at(rr, j + 1).add(&s);
                }
            }
        }
        // Recurrence on leading principal minors of xI - H.
        let mut polys: Vec<ResiduePoly> = vec![ResiduePoly::one(p, f)];
        for m in 1..=n {
            let x_minus = ResiduePoly::from_coeffs(
                p,
                f,
                vec![h.at(m - 1, m - 1).neg(), FqElem::one(p, f)],
            );
            let mut pm = x_minus.mul(&polys[m - 1]);
            let mut subdiag_prod = FqElem::one(p, f);
            for k in 1..m {
                subdiag_prod = subdiag_prod.mul(h.at(m - k, m - k - 1));
                if subdiag_prod.is_zero() {
                    break;
                }
                let coeff = h.at(m - 1 - k, m - 1).mul(&subdiag_prod);
                let term = polys[m - 1 - k].scale(&coeff);
                pm = pm.sub(&term);
            }
            polys.push(pm);
        }
        Ok(polys.pop().expect("nonempty"))
    }

    /// Minimal polynomial, monic: the least monic polynomial annihilating the
    /// matrix. Computed as the lcm of the local minimal polynomials of the
    /// standard basis vectors (Krylov chains).
    pub fn min_poly(&self) -> Result<ResiduePoly> {
        if self.rows != self.cols {
            return Err(Error::InvalidParameter(
                "minimal polynomial of non-square matrix".into(),
            ));
        }
        let n = self.rows;
        let (p, f) = (self.p, self.f);
        if n == 0 {
            return Ok(ResiduePoly::one(p, f));
        }
        let mut result = ResiduePoly::one(p, f);
        for i in 0..n {
            let mut v = vec![FqElem::zero(p, f); n];
            v[i] = FqElem::one(p, f);
            let local = self.local_min_poly(&v)?;
            result = poly_lcm(&result, &local)?;
            if result.degree() == Some(n) {
                break;
            }
        }
        Ok(result)
    }

    /// The minimal polynomial of `A` on the cyclic subspace generated by `v`.
    fn local_min_poly(&self, v: &[FqElem]) -> Result<ResiduePoly> {
        let n = self.rows;
        let (p, f) = (self.p, self.f);
        // Krylov chain v, Av, A^2 v, ...; find the first linear dependency by
        // solving with an augmented rref.
        let mut chain: Vec<Vec<FqElem>> = vec![v.to_vec()];
        loop {
            let last = chain.last().expect("nonempty");
            let next = self.apply(last);
            // Solve: next = sum c_j chain[j]?
            let k = chain.len();
            let mut aug = FqMatrix::zero(p, f, n, k + 1);
            for (j, w) in chain.iter().enumerate() {
                for r in 0..n {
                    *aug.at_mut(r, j) = w[r].clone();
                }
            }
            for r in 0..n {
                *aug.at_mut(r, k) = next[r].clone();
            }
            let pivots = aug.rref();
            if !pivots.contains(&k) {
                // Dependency found: read coefficients from the reduced system.
                let mut coeffs = vec![FqElem::zero(p, f); k + 1];
                for (r, &pc) in pivots.iter().enumerate() {
                    coeffs[pc] = aug.at(r, k).neg();
                }
                coeffs[k] = FqElem::one(p, f);
                return Ok(ResiduePoly::from_coeffs(p, f, coeffs));
            }
            if k == n {
                return Err(Error::InvalidParameter(
                    "Krylov chain exceeded dimension (inconsistent state)".into(),
                ));
            }
            chain.push(next);
        }
    }
}

/// Least common multiple of two polynomials (monic result).
pub fn poly_lcm(a: &ResiduePoly, b: &ResiduePoly) -> Result<ResiduePoly> {
    if a.is_zero() || b.is_zero() {
        return Ok(ResiduePoly::zero(a.p(), a.field_degree()));
    }
    let g = a.gcd(b)?;
    a.mul(b).div_exact(&g)?.monic()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::fq::FqElem;

    fn m_f3(rows: Vec<Vec<u64>>) -> FqMatrix {
        let data = rows
            .into_iter()
            .map(|r| r.into_iter().map(|c| FqElem::from_prime(3, 1, c)).collect())
            .collect();
        FqMatrix::from_rows(3, 1, data)
    }

    #[test]
    fn rank_and_kernel_are_complementary() {
        let a = m_f3(vec![vec![1, 2, 0], vec![2, 1, 0], vec![0, 0, 0]]);
        let rank = a.rank();
        let kernel = a.kernel();
        assert_eq!(rank + kernel.len(), 3);
        for v in &kernel {
            assert!(a.apply(v).iter().all(|e| e.is_zero()));
        }
    }

    #[test]
    fn det_matches_cofactor_on_2x2() {
        let a = m_f3(vec![vec![1, 2], vec![2, 2]]);
        // det = 1*2 - 2*2 = -2 = 1 mod 3.
        assert_eq!(a.det().unwrap(), FqElem::from_prime(3, 1, 1));
    }

    #[test]
    fn char_poly_of_companion_matrix_is_its_polynomial() {
        // Companion matrix of x^3 + 2x + 1 over F_3.
        let a = m_f3(vec![vec![0, 0, 2], vec![1, 0, 1], vec![0, 1, 0]]);
        // companion of p(x) = x^3 + 0x^2 + 2x + 1: columns shift, last column
        // is -(coefficients) = (-1, -2, 0) = (2, 1, 0).
        let c = a.char_poly().unwrap();
        let expected = ResiduePoly::from_prime_coeffs(3, 1, &[1, 2, 0, 1]);
        assert_eq!(c, expected);
    }

    #[test]
    fn char_poly_satisfies_cayley_hamilton() {
        let a = m_f3(vec![vec![1, 2, 0], vec![0, 1, 1], vec![2, 0, 1]]);
        let c = a.char_poly().unwrap();
        // Evaluate c at the matrix.
        let n = 3;
        let mut acc = FqMatrix::zero(3, 1, n, n);
        let mut power = FqMatrix::identity(3, 1, n);
        for i in 0..c.coeffs().len() {
            acc = acc.add(&power.scale(&c.coeff(i)));
            power = power.mul(&a);
        }
        assert!(acc.is_zero());
    }

    #[test]
    fn min_poly_divides_char_poly_and_annihilates() {
        // A diagonalizable matrix with repeated eigenvalue: diag(1, 1, 2).
        let a = m_f3(vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 2]]);
        let mp = a.min_poly().unwrap();
        // (x-1)(x-2) = x^2 - 3x + 2 = x^2 + 2 over F_3? (x-1)(x-2) = x^2 -3x + 2 ≡ x^2 + 2.
        let expected = ResiduePoly::from_prime_coeffs(3, 1, &[2, 0, 1]);
        assert_eq!(mp, expected);
        let cp = a.char_poly().unwrap();
        let (_, r) = cp.div_rem(&mp).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn min_poly_of_nilpotent_jordan_block() {
        let a = m_f3(vec![vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, 0]]);
        let mp = a.min_poly().unwrap();
        let expected = ResiduePoly::from_prime_coeffs(3, 1, &[0, 0, 0, 1]); // x^3
        assert_eq!(mp, expected);
    }

    #[test]
    fn char_poly_over_extension_field() {
        // Multiplication-by-w matrix on GF(4) over GF(2) has char poly w's
        // minimal polynomial x^2 + x + 1 — but here we test directly over
        // GF(4): char poly of diag(w, w^2) is (x-w)(x-w^2) = x^2 + x + 1
        // with coefficients in GF(4) that happen to lie in GF(2).
        let w = FqElem::generator(2, 2).unwrap();
        let w2 = w.mul(&w);
        let a = FqMatrix::from_rows(
            2,
            2,
            vec![
                vec![w.clone(), FqElem::zero(2, 2)],
                vec![FqElem::zero(2, 2), w2.clone()],
            ],
        );
        let c = a.char_poly().unwrap();
        let expected = ResiduePoly::from_prime_coeffs(2, 2, &[1, 1, 1]);
        assert_eq!(c, expected);
    }
}
