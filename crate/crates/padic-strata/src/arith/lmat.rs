//! Linear algebra over the unramified coefficient fields.
//!
//! [`LMatrix`] is a dense matrix over an unramified extension `L/Q_p`
//! (the base field itself is the degree-1 case). Elimination uses
//! minimum-valuation pivoting, which keeps precision loss at the provable
//! minimum: a pivot is only accepted when its valuation is exactly known,
//! and the reported precision of results follows from the scalar tracking.

use crate::arith::padic::PadicScalar;
use crate::arith::padic_poly::PadicPoly;
use crate::arith::unram::UnramifiedElement;
use crate::error::{Error, Result};

/// A dense row-major matrix over the unramified extension of degree `f`.
#[derive(Debug, Clone)]
pub struct LMatrix {
    p: u64,
    f: usize,
    rows: usize,
    cols: usize,
    entries: Vec<UnramifiedElement>,
}

impl LMatrix {
    pub fn zero(p: u64, f: usize, rows: usize, cols: usize) -> Self {
        LMatrix {
            p,
            f,
            rows,
            cols,
            entries: vec![UnramifiedElement::zero(p, f); rows * cols],
        }
    }

    pub fn identity(p: u64, f: usize, n: usize, prec: u32) -> Self {
        let mut m = Self::zero(p, f, n, n);
        for i in 0..n {
            *m.at_mut(i, i) = UnramifiedElement::one(p, f, prec);
        }
        m
    }

    pub fn from_fn(
        p: u64,
        f: usize,
        rows: usize,
        cols: usize,
        mut gen: impl FnMut(usize, usize) -> UnramifiedElement,
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

    pub fn at(&self, i: usize, j: usize) -> &UnramifiedElement {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut UnramifiedElement {
        &mut self.entries[i * self.cols + j]
    }

    pub fn add(&self, other: &LMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect();
        LMatrix { p: self.p, f: self.f, rows: self.rows, cols: self.cols, entries }
    }

    pub fn sub(&self, other: &LMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.sub(b))
            .collect();
        LMatrix { p: self.p, f: self.f, rows: self.rows, cols: self.cols, entries }
    }

    pub fn mul(&self, other: &LMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zero(self.p, self.f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_exact_zero() {
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

    pub fn scale(&self, c: &UnramifiedElement) -> Self {
        LMatrix {
            p: self.p,
            f: self.f,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.mul(c)).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.p, self.f, self.cols, self.rows, |i, j| {
            self.at(j, i).clone()
        })
    }

    /// Trace (sum of diagonal entries).
    pub fn trace(&self) -> Result<UnramifiedElement> {
        if self.rows != self.cols {
            return Err(Error::InvalidParameter("trace of non-square matrix".into()));
        }
        let mut acc = UnramifiedElement::zero(self.p, self.f);
        for i in 0..self.rows {
            acc = acc.add(self.at(i, i));
        }
        Ok(acc)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Find the pivot with minimal exactly-known valuation in `col` among
    /// rows `from..`. Errors if every candidate is of unknown valuation but
    /// not provably negligible.
    fn find_pivot(&self, from: usize, col: usize) -> Result<Option<usize>> {
        let mut best: Option<(usize, i64)> = None;
        let mut has_indeterminate = false;
        let mut min_vlb = i64::MAX;
        for r in from..self.rows {
            let e = self.at(r, col);
            if e.is_exact_zero() {
                continue;
            }
            min_vlb = min_vlb.min(e.vlb());
            match e.valuation() {
                Ok(v) => {
                    if best.map_or(true, |(_, bv)| v < bv) {
                        best = Some((r, v));
                    }
                }
                Err(_) => has_indeterminate = true,
            }
        }
        match best {
            Some((r, v)) => {
                // An indeterminate entry could hide a smaller valuation only
                // if its lower bound is below the chosen pivot valuation.
                if has_indeterminate && min_vlb < v {
                    return Err(Error::InsufficientPrecision(
                        "pivot selection ambiguous at this precision".into(),
                    ));
                }
                Ok(Some(r))
            }
            None => {
                if has_indeterminate {
                    Err(Error::InsufficientPrecision(
                        "column contains only indeterminate entries".into(),
                    ))
                } else {
                    Ok(None)
                }
            }
        }
    }

    /// Determinant via Gaussian elimination with min-valuation pivoting.
    ///
    /// When a column contains no entry of certified valuation, the
    /// determinant is returned as a zero-at-precision scalar (its valuation
    /// lower bound is the best provable one), never as a false exact zero.
    pub fn det(&self) -> Result<UnramifiedElement> {
        if self.rows != self.cols {
            return Err(Error::InvalidParameter("determinant of non-square matrix".into()));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = UnramifiedElement::one(self.p, self.f, 64);
        let mut negate = false;
        for col in 0..n {
            let pivot_row = match m.find_pivot(col, col) {
                Ok(Some(pr)) => pr,
                Ok(None) | Err(Error::InsufficientPrecision(_)) => {
                    // Remaining block cannot be resolved: bound the valuation.
                    let mut bound = 0i64;
                    let mut exact_zero_col = false;
                    for j in col..n {
                        let col_min = (col..n).map(|r| m.at(r, j).vlb()).min().unwrap_or(i64::MAX);
                        if col_min == i64::MAX {
                            exact_zero_col = true;
                            break;
                        }
                        bound = bound.saturating_add(col_min);
                    }
                    if exact_zero_col {
                        return Ok(UnramifiedElement::zero(self.p, self.f));
                    }
                    let tail = UnramifiedElement::from_scalar(
                        self.f,
                        PadicScalar::unknown(self.p, bound),
                    );
                    let mut out = det.mul(&tail);
                    if negate {
                        out = out.neg();
                    }
                    return Ok(out);
                }
                Err(e) => return Err(e),
            };
            if pivot_row != col {
                m.swap_rows(col, pivot_row);
                negate = !negate;
            }
            let pivot = m.at(col, col).clone();
            det = det.mul(&pivot);
            let pinv = pivot.inv()?;
            for r in col + 1..n {
                if m.at(r, col).is_exact_zero() {
                    continue;
                }
                let factor = m.at(r, col).mul(&pinv);
                for j in col..n {
                    let t = factor.mul(m.at(col, j));
                    *m.at_mut(r, j) = m.at(r, j).sub(&t);
                }
            }
        }
        if negate {
            det = det.neg();
        }
        Ok(det)
    }

    /// Matrix inverse via Gauss–Jordan with min-valuation pivoting.
    pub fn inverse(&self) -> Result<LMatrix> {
        if self.rows != self.cols {
            return Err(Error::InvalidParameter("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let prec = self
            .entries
            .iter()
            .filter(|e| !e.is_exact_zero())
            .map(|e| e.abs_prec())
            .min()
            .unwrap_or(32)
            .clamp(1, 256) as u32;
        let mut m = self.clone();
        let mut inv = Self::identity(self.p, self.f, n, prec);
        for col in 0..n {
            let pr = m
                .find_pivot(col, col)?
                .ok_or_else(|| Error::NotInvertible("matrix is singular".into()))?;
            m.swap_rows(col, pr);
            inv.swap_rows(col, pr);
            let pinv = m.at(col, col).inv()?;
            for j in 0..n {
                let a = m.at(col, j).mul(&pinv);
                *m.at_mut(col, j) = a;
                let b = inv.at(col, j).mul(&pinv);
                *inv.at_mut(col, j) = b;
            }
            for r in 0..n {
                if r == col || m.at(r, col).is_exact_zero() {
                    continue;
                }
                let factor = m.at(r, col).clone();
                for j in 0..n {
                    let t = factor.mul(m.at(col, j));
                    *m.at_mut(r, j) = m.at(r, j).sub(&t);
                    let t2 = factor.mul(inv.at(col, j));
                    *inv.at_mut(r, j) = inv.at(r, j).sub(&t2);
                }
            }
        }
        Ok(inv)
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: &[UnramifiedElement]) -> Vec<UnramifiedElement> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = UnramifiedElement::zero(self.p, self.f);
                for j in 0..self.cols {
                    if self.at(i, j).is_exact_zero() || v[j].is_exact_zero() {
                        continue;
                    }
                    acc = acc.add(&self.at(i, j).mul(&v[j]));
                }
                acc
            })
            .collect()
    }
}

/// The minimal polynomial *over the base field `F`* of a square matrix with
/// entries in `L`, at working precision.
///
/// Works on the flattened powers `I, A, A^2, ...` of the matrix inside its
/// enveloping algebra, with every `L`-entry expanded into its `f` base-field
/// coordinates: the first `F`-linear dependency among them *is* the minimal
/// polynomial, so no polynomial gcd/lcm arithmetic is needed. A dependency is
/// accepted only when the residual is provably zero modulo `p^wprec`; a
/// provably nonzero residual certifies independence; anything in between
/// raises [`Error::InsufficientPrecision`].
pub fn min_poly_padic(mat: &LMatrix, wprec: i64) -> Result<PadicPoly> {
    if mat.rows() != mat.cols() {
        return Err(Error::InvalidParameter(
            "minimal polynomial of non-square matrix".into(),
        ));
    }
    let n = mat.rows();
    let f = mat.field_degree();
    let p = mat.p();
    let dim = n * n * f;
    let flatten = |m: &LMatrix| -> Vec<UnramifiedElement> {
        let mut v = Vec::with_capacity(dim);
        for i in 0..n {
            for j in 0..n {
                for c in m.at(i, j).coords() {
                    v.push(UnramifiedElement::from_scalar(1, c.clone()));
                }
            }
        }
        v
    };
    let mut chain: Vec<Vec<UnramifiedElement>> =
        vec![flatten(&LMatrix::identity(p, f, n, 64))];
    let mut power = LMatrix::identity(p, f, n, 64);
    loop {
        power = power.mul(mat);
        let next = flatten(&power);
        let k = chain.len();
        let mut aug = LMatrix::zero(p, 1, dim, k + 1);
        for (j, w) in chain.iter().enumerate() {
            for r in 0..dim {
                *aug.at_mut(r, j) = w[r].clone();
            }
        }
        for r in 0..dim {
            *aug.at_mut(r, k) = next[r].clone();
        }
        match solve_dependency(&aug, wprec)? {
            Some(coeffs) => {
                // A^k = Σ coeffs[j] A^j: min poly is x^k - Σ coeffs[j] x^j.
                let mut poly = Vec::with_capacity(k + 1);
                for c in coeffs {
                    poly.push(c.expect_base_rational()?.neg());
                }
                poly.push(PadicScalar::one(p, 64));
                return Ok(PadicPoly::from_coeffs(p, poly));
            }
            None => {
                if k == n * f {
                    return Err(Error::InsufficientPrecision(
                        "no certified dependency up to the matrix dimension".into(),
                    ));
                }
                chain.push(next);
            }
        }
    }
}

/// If the last column of `aug` lies in the span of the others at precision
/// `wprec`, return the coefficients; if it is provably independent, `None`.
fn solve_dependency(aug: &LMatrix, wprec: i64) -> Result<Option<Vec<UnramifiedElement>>> {
    let n = aug.rows();
    let k = aug.cols() - 1;
    let p = aug.p();
    let mut m = aug.clone();
    let mut pivots: Vec<(usize, usize)> = vec![]; // (row, col)
    let mut row = 0usize;
    for col in 0..k {
        if row >= n {
            break;
        }
        let Some(pr) = m.find_pivot(row, col)? else {
            continue;
        };
        m.swap_rows(row, pr);
        let pinv = m.at(row, col).inv()?;
        for j in 0..=k {
            let a = m.at(row, j).mul(&pinv);
            *m.at_mut(row, j) = a;
        }
        for r in 0..n {
            if r == row || m.at(r, col).is_exact_zero() {
                continue;
            }
            let factor = m.at(r, col).clone();
            for j in 0..=k {
                let t = factor.mul(m.at(row, j));
                *m.at_mut(r, j) = m.at(r, j).sub(&t);
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    // Residual of the last column below the pivot rows.
    for r in row..n {
        let e = m.at(r, k);
        if e.is_exact_zero() {
            continue;
        }
        match e.valuation() {
            Ok(v) if v < wprec => return Ok(None), // provably independent
            _ => {
                if e.vlb() < wprec {
                    return Err(Error::InsufficientPrecision(
                        "dependency residual not resolved at working precision".into(),
                    ));
                }
            }
        }
    }
    // Dependent at precision: read the combination off the pivot rows.
    let mut coeffs = vec![UnramifiedElement::zero(p, 1); k];
    for &(r, c) in &pivots {
        coeffs[c] = m.at(r, k).clone();
    }
    Ok(Some(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::padic::PadicScalar;

    const PREC: u32 = 20;

    fn fmat(p: u64, data: Vec<Vec<i64>>) -> LMatrix {
        let rows = data.len();
        let cols = data[0].len();
        LMatrix::from_fn(p, 1, rows, cols, |i, j| {
            UnramifiedElement::from_scalar(1, PadicScalar::from_integer(p, data[i][j], PREC))
        })
    }

    #[test]
    fn inverse_of_unimodular_matrix() {
        let a = fmat(3, vec![vec![1, 2], vec![1, 1]]);
        let ai = a.inverse().unwrap();
        let prod = a.mul(&ai);
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1 } else { 0 };
                let e = prod
                    .at(i, j)
                    .clone()
                    .expect_base_rational()
                    .unwrap();
                assert!(e
                    .congruent_mod(&PadicScalar::from_integer(3, expect, PREC), 16)
                    .unwrap());
            }
        }
    }

    #[test]
    fn inverse_with_nontrivial_valuations() {
        // det = 3 * 5 - 3 * 3 = 6, v_3(det) = 1: inverse has denominators.
        let a = fmat(3, vec![vec![3, 3], vec![3, 5]]);
        let ai = a.inverse().unwrap();
        let prod = a.mul(&ai);
        let id00 = prod.at(0, 0).clone().expect_base_rational().unwrap();
        assert!(id00
            .congruent_mod(&PadicScalar::one(3, PREC), 12)
            .unwrap());
        let id01 = prod.at(0, 1).clone().expect_base_rational().unwrap();
        assert!(id01.is_zero_mod(12).unwrap());
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let a = fmat(5, vec![vec![2, 1, 0], vec![0, 3, 1], vec![5, 0, 1]]);
        // det = 2*(3*1-1*0) - 1*(0*1-1*5) + 0 = 6 + 5 = 11.
        let d = a.det().unwrap().expect_base_rational().unwrap();
        assert!(d
            .congruent_mod(&PadicScalar::from_integer(5, 11, PREC), 15)
            .unwrap());
    }

    #[test]
    fn singular_matrix_yields_zero_det_and_no_inverse() {
        let a = fmat(3, vec![vec![1, 2], vec![2, 4]]);
        let d = a.det().unwrap();
        assert!(d.is_zero_mod(16).unwrap());
        assert!(a.inverse().is_err());
    }

    #[test]
    fn min_poly_of_companion_matrix() {
        // Companion of x^2 - p over Q_3 (p = 3): [[0, 3], [1, 0]].
        let a = fmat(3, vec![vec![0, 3], vec![1, 0]]);
        let mp = min_poly_padic(&a, 12).unwrap();
        assert_eq!(mp.degree(), Some(2));
        // Coefficients: x^2 - 3.
        assert!(mp.coeff(0).congruent_mod(&PadicScalar::from_integer(3, -3, PREC), 10).unwrap());
        assert!(mp.coeff(1).is_zero_mod(10).unwrap());
    }

    #[test]
    fn min_poly_detects_split_diagonal() {
        let a = fmat(5, vec![vec![2, 0], vec![0, 7]]);
        let mp = min_poly_padic(&a, 12).unwrap();
        // (x-2)(x-7) = x^2 - 9x + 14.
        assert_eq!(mp.degree(), Some(2));
        assert!(mp.coeff(0).congruent_mod(&PadicScalar::from_integer(5, 14, PREC), 10).unwrap());
        assert!(mp.coeff(1).congruent_mod(&PadicScalar::from_integer(5, -9, PREC), 10).unwrap());
    }

    #[test]
    fn min_poly_of_scalar_matrix_is_linear() {
        let a = fmat(3, vec![vec![4, 0], vec![0, 4]]);
        let mp = min_poly_padic(&a, 12).unwrap();
        assert_eq!(mp.degree(), Some(1));
        assert!(mp.coeff(0).congruent_mod(&PadicScalar::from_integer(3, -4, PREC), 10).unwrap());
    }
}
