//! Exact matrix algebra over `Z/p^N`.
//!
//! Lattice and order computations in this crate reduce, in suitable monomial
//! coordinates, to integer linear algebra modulo a prime power: images,
//! kernels, membership in spans, and intersections of row spans.  This module
//! provides that layer.  Entries are plain residues — all precision questions
//! are settled *before* data enters (via
//! [`PadicScalar::scaled_residue`](super::padic::PadicScalar::scaled_residue)),
//! so everything here is exact arithmetic in `Z/p^N`.
//!
//! The workhorse is a Smith normal form over `Z/p^N`: every matrix `A` admits
//! unimodular `U`, `V` with `U A V = diag(p^{e_1}, ..., p^{e_r}, 0, ...)`,
//! where exponents are reported as `min(e_i, N)` (an entry divisible by `p^N`
//! is indistinguishable from zero).  Kernels, solving, and span membership
//! all read off from the diagonal and the transforms.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::padic::{inv_mod_ppow, p_pow};
use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// ZpMat
// ---------------------------------------------------------------------------

/// A dense matrix over `Z/p^N`, stored row-major with reduced entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZpMat {
    p: u64,
    nexp: u32,
    rows: usize,
    cols: usize,
    entries: Vec<BigUint>,
}

impl ZpMat {
    /// The zero matrix of the given shape.
    pub fn zero(p: u64, nexp: u32, rows: usize, cols: usize) -> Self {
        ZpMat {
            p,
            nexp,
            rows,
            cols,
            entries: vec![BigUint::zero(); rows * cols],
        }
    }

    /// The identity matrix.
    pub fn identity(p: u64, nexp: u32, n: usize) -> Self {
        let mut m = ZpMat::zero(p, nexp, n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigUint::one();
        }
        m
    }

    /// Builds a matrix from an entry function, reducing mod `p^N`.
    pub fn from_fn(
        p: u64,
        nexp: u32,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> BigUint,
    ) -> Self {
        let modulus = p_pow(p, nexp);
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j) % &modulus);
            }
        }
        ZpMat {
            p,
            nexp,
            rows,
            cols,
            entries,
        }
    }

    /// Builds a matrix from row-major `u64` entries (test convenience).
    pub fn from_rows(p: u64, nexp: u32, rows: usize, cols: usize, data: &[u64]) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count mismatch");
        ZpMat::from_fn(p, nexp, rows, cols, |i, j| BigUint::from(data[i * cols + j]))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// The exponent `N` of the working modulus `p^N`.
    pub fn modulus_exp(&self) -> u32 {
        self.nexp
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigUint {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigUint) {
        let modulus = p_pow(self.p, self.nexp);
        self.entries[i * self.cols + j] = v % modulus;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(BigUint::is_zero)
    }

    /// Extracts row `i` as a 1×cols matrix.
    pub fn row(&self, i: usize) -> ZpMat {
        ZpMat {
            p: self.p,
            nexp: self.nexp,
            rows: 1,
            cols: self.cols,
            entries: self.entries[i * self.cols..(i + 1) * self.cols].to_vec(),
        }
    }

    /// Vertically stacks `self` over `other` (same column count).
    pub fn vstack(&self, other: &ZpMat) -> ZpMat {
        assert_eq!(self.cols, other.cols, "column mismatch in vstack");
        assert_eq!(self.nexp, other.nexp, "modulus mismatch in vstack");
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        ZpMat {
            p: self.p,
            nexp: self.nexp,
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn add(&self, other: &ZpMat) -> ZpMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let modulus = p_pow(self.p, self.nexp);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a + b) % &modulus)
            .collect();
        ZpMat {
            entries,
            ..self.clone()
        }
    }

    pub fn neg(&self) -> ZpMat {
        let modulus = p_pow(self.p, self.nexp);
        let entries = self
            .entries
            .iter()
            .map(|a| {
                if a.is_zero() {
                    BigUint::zero()
                } else {
                    &modulus - a
                }
            })
            .collect();
        ZpMat {
            entries,
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &ZpMat) -> ZpMat {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ZpMat) -> ZpMat {
        assert_eq!(self.cols, other.rows, "shape mismatch in mul");
        let modulus = p_pow(self.p, self.nexp);
        let mut out = ZpMat::zero(self.p, self.nexp, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.entries[idx] = (&out.entries[idx] + a * b) % &modulus;
                }
            }
        }
        out
    }

    /// Multiplies every entry by `p^k` (staying inside `Z/p^N`).
    pub fn scale_p_pow(&self, k: u32) -> ZpMat {
        let modulus = p_pow(self.p, self.nexp);
        let factor = p_pow(self.p, k.min(self.nexp));
        let entries = self
            .entries
            .iter()
            .map(|a| (a * &factor) % &modulus)
            .collect();
        ZpMat {
            entries,
            ..self.clone()
        }
    }

    /// p-adic valuation of an entry, capped at `N` (zero entries report `N`).
    fn entry_val(&self, i: usize, j: usize) -> u32 {
        let mut x = self.at(i, j).clone();
        if x.is_zero() {
            return self.nexp;
        }
        let p = BigUint::from(self.p);
        let mut v = 0;
        while (&x % &p).is_zero() {
            x /= &p;
            v += 1;
        }
        v
    }
}

// ---------------------------------------------------------------------------
// Smith normal form over Z/p^N
// ---------------------------------------------------------------------------

/// Smith normal form data: `u * a * v = diag(p^{diag[i]})` with `u`, `v`
/// invertible over `Z/p^N`.  A diagonal exponent of `N` means the pivot is
/// zero mod `p^N`.
#[derive(Clone, Debug)]
pub struct Snf {
    /// Diagonal exponents `e_i`, ascending, of length `min(rows, cols)`.
    pub diag: Vec<u32>,
    /// Row transform (rows × rows), invertible.
    pub u: ZpMat,
    /// Column transform (cols × cols), invertible.
    pub v: ZpMat,
}

impl ZpMat {
    /// Computes the Smith normal form over `Z/p^N`.
    ///
    /// Over the local ring `Z/p^N` every matrix is equivalent to a diagonal
    /// of prime powers; the algorithm repeatedly moves a global
    /// minimum-valuation entry to the pivot, scales it to a pure power of
    /// `p`, and clears its row and column (exact divisions, since the pivot
    /// divides everything it eliminates).
    pub fn snf(&self) -> Snf {
        let p = self.p;
        let nexp = self.nexp;
        let modulus = p_pow(p, nexp);
        let mut a = self.clone();
        let mut u = ZpMat::identity(p, nexp, self.rows);
        let mut v = ZpMat::identity(p, nexp, self.cols);
        let k = self.rows.min(self.cols);
        let mut diag = Vec::with_capacity(k);

        for step in 0..k {
            // Find the global minimum-valuation entry in the trailing block.
            let mut best: Option<(u32, usize, usize)> = None;
            for i in step..a.rows {
                for j in step..a.cols {
                    let val = a.entry_val(i, j);
                    if val < nexp && best.map_or(true, |(bv, _, _)| val < bv) {
                        best = Some((val, i, j));
                    }
                }
            }
            let (e, pi, pj) = match best {
                Some(b) => b,
                None => {
                    // Remaining block is zero mod p^N.
                    for _ in step..k {
                        diag.push(nexp);
                    }
                    break;
                }
            };
            a.swap_rows(step, pi);
            u.swap_rows(step, pi);
            a.swap_cols(step, pj);
            v.swap_cols(step, pj);

            // Scale the pivot row so the pivot becomes exactly p^e: the
            // pivot is p^e * (unit); multiply the row by the unit inverse.
            let pivot = a.at(step, step).clone();
            let unit = &pivot / p_pow(p, e);
            let unit_inv = inv_mod_ppow(&unit, p, nexp).expect("unit by construction");
            a.scale_row(step, &unit_inv, &modulus);
            u.scale_row(step, &unit_inv, &modulus);

            // Clear the column below and the row to the right.  Every entry
            // in the trailing block has valuation >= e, so the quotients are
            // exact integers.
            let pe = p_pow(p, e);
            for i in (step + 1)..a.rows {
                let entry = a.at(i, step).clone();
                if entry.is_zero() {
                    continue;
                }
                let q = &entry / &pe; // exact: v(entry) >= e
                let q = (&modulus - (q % &modulus)) % &modulus; // -q mod p^N
                a.add_multiple_of_row(step, i, &q, &modulus);
                u.add_multiple_of_row(step, i, &q, &modulus);
            }
            for j in (step + 1)..a.cols {
                let entry = a.at(step, j).clone();
                if entry.is_zero() {
                    continue;
                }
                let q = &entry / &pe;
                let q = (&modulus - (q % &modulus)) % &modulus;
                a.add_multiple_of_col(step, j, &q, &modulus);
                v.add_multiple_of_col(step, j, &q, &modulus);
            }
            diag.push(e);
        }
        diag.sort_unstable();
        // Note: the min-valuation pivot strategy already produces ascending
        // exponents, so the sort is a no-op kept as a guard.
        Snf { diag, u, v }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn scale_row(&mut self, i: usize, c: &BigUint, modulus: &BigUint) {
        for j in 0..self.cols {
            let idx = i * self.cols + j;
            self.entries[idx] = (&self.entries[idx] * c) % modulus;
        }
    }

    /// row[dst] += c * row[src]
    fn add_multiple_of_row(&mut self, src: usize, dst: usize, c: &BigUint, modulus: &BigUint) {
        for j in 0..self.cols {
            let s = self.entries[src * self.cols + j].clone();
            let idx = dst * self.cols + j;
            self.entries[idx] = (&self.entries[idx] + s * c) % modulus;
        }
    }

    /// col[dst] += c * col[src]
    fn add_multiple_of_col(&mut self, src: usize, dst: usize, c: &BigUint, modulus: &BigUint) {
        for i in 0..self.rows {
            let s = self.entries[i * self.cols + src].clone();
            let idx = i * self.cols + dst;
            self.entries[idx] = (&self.entries[idx] + s * c) % modulus;
        }
    }
}

// ---------------------------------------------------------------------------
// Derived operations: kernel, membership, solving, intersection
// ---------------------------------------------------------------------------

impl ZpMat {
    /// A generating set for the left kernel `{x : x A = 0 mod p^N}`, returned
    /// as the rows of a matrix.
    ///
    /// With `U A V = D`, a row vector `x` kills `A` iff `x U^{-1} D = 0`, so
    /// the kernel is generated by `p^{N - e_i} U_i` (rows with `0 < e_i < N`)
    /// together with `U_i` for `e_i = N` and all `U_i` with `i >= rank`.
    pub fn left_kernel(&self) -> ZpMat {
        let snf = self.snf();
        let mut gens: Vec<BigUint> = Vec::new();
        let mut count = 0usize;
        let k = snf.diag.len();
        for i in 0..self.rows {
            let e = if i < k { snf.diag[i] } else { 0 };
            if i >= k {
                // No diagonal constraint beyond the square block: row i of U
                // maps onto a zero row of D only when rows > cols.
                let urow = snf.u.row(i);
                gens.extend_from_slice(&urow.entries);
                count += 1;
            } else if e >= self.nexp {
                let urow = snf.u.row(i);
                gens.extend_from_slice(&urow.entries);
                count += 1;
            } else if e > 0 {
                let urow = snf.u.row(i).scale_p_pow(self.nexp - e);
                gens.extend_from_slice(&urow.entries);
                count += 1;
            }
        }
        ZpMat {
            p: self.p,
            nexp: self.nexp,
            rows: count,
            cols: self.rows,
            entries: gens,
        }
    }

    /// Tests whether the row vector `x` (1×cols) lies in the row span of
    /// `self` over `Z/p^N`.
    pub fn row_membership(&self, x: &ZpMat) -> bool {
        self.solve_row(x).is_some()
    }

    /// Solves `c * self = x` for a row vector `c` (1×rows), if possible.
    ///
    /// With `U A V = D`: `c A = x` iff `(c U^{-1}) D = x V`, so writing
    /// `z = x V` we need `p^{e_i} | z_i` for `i < k` and `z_i = 0` beyond,
    /// then `c = y U` with `y_i = z_i / p^{e_i}`.
    pub fn solve_row(&self, x: &ZpMat) -> Option<ZpMat> {
        assert_eq!(x.rows, 1, "solve_row expects a row vector");
        assert_eq!(x.cols, self.cols, "dimension mismatch");
        let snf = self.snf();
        let z = x.mul(&snf.v);
        let k = snf.diag.len();
        let modulus = p_pow(self.p, self.nexp);
        let mut y = ZpMat::zero(self.p, self.nexp, 1, self.rows);
        for j in 0..self.cols {
            let zj = z.at(0, j).clone();
            if j >= k {
                if !zj.is_zero() {
                    return None;
                }
                continue;
            }
            let e = snf.diag[j];
            if e >= self.nexp {
                if !zj.is_zero() {
                    return None;
                }
                continue;
            }
            if zj.is_zero() {
                continue;
            }
            let pe = p_pow(self.p, e);
            if !(&zj % &pe).is_zero() {
                return None;
            }
            y.entries[j] = (&zj / &pe) % &modulus;
        }
        Some(y.mul(&snf.u))
    }

    /// Number of diagonal exponents strictly below `N` (the "rank" of the
    /// matrix mod `p^N`; columns/rows beyond it are annihilated).
    pub fn rank_at_modulus(&self) -> usize {
        self.snf().diag.iter().filter(|&&e| e < self.nexp).count()
    }

    /// Inverse of a square matrix that is invertible mod `p^N`.
    ///
    /// From `U A V = I` (all Smith exponents zero) the inverse is `V U`.
    /// Returns [`Error::NotInvertible`] when any Smith exponent is positive,
    /// i.e. when the determinant is divisible by `p`.
    pub fn inverse(&self) -> Result<ZpMat> {
        assert_eq!(self.rows, self.cols, "inverse requires a square matrix");
        let snf = self.snf();
        if snf.diag.len() < self.rows || snf.diag.iter().any(|&e| e > 0) {
            return Err(Error::NotInvertible(
                "matrix is singular modulo p and has no inverse at this modulus".into(),
            ));
        }
        Ok(snf.v.mul(&snf.u))
    }

    /// Generators of the intersection of the row spans of `g1` and `g2`.
    ///
    /// A vector in the intersection is `x g1 = -(y) g2` for the stacked
    /// kernel relation `(x, y) [G1; G2] = 0`; projecting kernel generators
    /// onto their first block and multiplying by `G1` yields generators.
    pub fn row_span_intersection(g1: &ZpMat, g2: &ZpMat) -> ZpMat {
        assert_eq!(g1.cols, g2.cols, "ambient dimension mismatch");
        let stacked = g1.vstack(g2);
        let ker = stacked.left_kernel();
        // First g1.rows coordinates of each kernel row give the x part.
        let mut xpart = ZpMat::zero(g1.p, g1.nexp, ker.rows, g1.rows);
        for i in 0..ker.rows {
            for j in 0..g1.rows {
                xpart.set(i, j, ker.at(i, j).clone());
            }
        }
        xpart.mul(g1)
    }

    /// Tests whether the row span of `sub` is contained in the row span of
    /// `sup`.
    pub fn row_span_subset(sub: &ZpMat, sup: &ZpMat) -> bool {
        (0..sub.rows).all(|i| sup.row_membership(&sub.row(i)))
    }

    /// `log_p` of the index of the row span inside the full space
    /// `(Z/p^N)^cols`, i.e. `sum_i min(e_i, N)` padded with `N` for missing
    /// diagonal entries.  For a square-lattice generating matrix in scaled
    /// coordinates this is the module index used in dimension counts.
    pub fn span_index_exp(&self) -> u64 {
        let snf = self.snf();
        let mut total: u64 = 0;
        let k = snf.diag.len();
        for i in 0..self.cols {
            let e = if i < k { snf.diag[i] } else { self.nexp };
            total += u64::from(e.min(self.nexp));
        }
        total
    }
}

/// Checks `U A V = diag` for test purposes.
#[cfg(test)]
fn snf_checks(a: &ZpMat) {
    let snf = a.snf();
    let d = snf.u.mul(a).mul(&snf.v);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if i == j && i < snf.diag.len() && snf.diag[i] < a.modulus_exp() {
                assert_eq!(
                    d.at(i, j),
                    &p_pow(a.p(), snf.diag[i]),
                    "diagonal mismatch at {i}"
                );
            } else {
                assert!(d.at(i, j).is_zero(), "off-diagonal nonzero at ({i},{j})");
            }
        }
    }
}

// Intentionally public-in-crate only: higher layers consume ZpMat through the
// lattice module.
#[allow(unused)]
fn _doc_anchor() {}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snf_of_diagonalizable_matrix() {
        // [[2, 4], [6, 8]] over Z/2^8: SNF diag (1, 2) since det = -8.
        let a = ZpMat::from_rows(2, 8, 2, 2, &[2, 4, 6, 8]);
        snf_checks(&a);
        let snf = a.snf();
        assert_eq!(snf.diag, vec![1, 2]);
    }

    #[test]
    fn inverse_of_unimodular_matrix() {
        // [[1, 2], [3, 7]] has det 1, so it is invertible at every modulus.
        let a = ZpMat::from_rows(5, 6, 2, 2, &[1, 2, 3, 7]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), ZpMat::identity(5, 6, 2));
        assert_eq!(inv.mul(&a), ZpMat::identity(5, 6, 2));

        // det 5 ≡ 0 mod 5: not invertible.
        let b = ZpMat::from_rows(5, 6, 2, 2, &[1, 2, 3, 11]);
        assert!(b.inverse().is_err());
    }

    #[test]
    fn snf_handles_rectangular_and_zero_blocks() {
        let a = ZpMat::from_rows(3, 6, 2, 3, &[3, 9, 0, 0, 27, 0]);
        snf_checks(&a);
        let snf = a.snf();
        assert_eq!(snf.diag, vec![1, 3]);

        let z = ZpMat::zero(3, 4, 2, 2);
        let snf = z.snf();
        assert_eq!(snf.diag, vec![4, 4]);
    }

    #[test]
    fn left_kernel_annihilates() {
        let a = ZpMat::from_rows(2, 6, 3, 3, &[1, 0, 0, 0, 4, 0, 0, 0, 0]);
        let ker = a.left_kernel();
        assert!(ker.mul(&a).is_zero());
        // Kernel of x -> xA: e = (0, 2, 6); contributions 2^{6-2} e_2 and e_3.
        assert_eq!(ker.rows(), 2);
    }

    #[test]
    fn solve_row_and_membership() {
        // Row span of [[1,2],[0,4]] over Z/2^6.
        let g = ZpMat::from_rows(2, 6, 2, 2, &[1, 2, 0, 4]);
        let x = ZpMat::from_rows(2, 6, 1, 2, &[3, 14]); // = 3*(1,2) + 2*(0,4)
        let c = g.solve_row(&x).expect("solvable");
        assert_eq!(c.mul(&g), x);
        // (0, 2) is NOT in the span: second coordinate only reachable in 4Z + 2*row1,
        // and using row1 twice contributes 2 to the first coordinate.
        let y = ZpMat::from_rows(2, 6, 1, 2, &[0, 2]);
        assert!(!g.row_membership(&y));
    }

    #[test]
    fn intersection_of_row_spans() {
        // <(2,0),(0,1)> ∩ <(1,0),(0,2)> over Z/2^8 = <(2,0),(0,2)>.
        let g1 = ZpMat::from_rows(2, 8, 2, 2, &[2, 0, 0, 1]);
        let g2 = ZpMat::from_rows(2, 8, 2, 2, &[1, 0, 0, 2]);
        let cap = ZpMat::row_span_intersection(&g1, &g2);
        let expected = ZpMat::from_rows(2, 8, 2, 2, &[2, 0, 0, 2]);
        assert!(ZpMat::row_span_subset(&cap, &expected));
        assert!(ZpMat::row_span_subset(&expected, &cap));
    }

    #[test]
    fn span_index_counts_module_size() {
        // diag(1, p, p^2) over Z/3^5: index exponent 0 + 1 + 2 = 3.
        let g = ZpMat::from_rows(3, 5, 3, 3, &[1, 0, 0, 0, 3, 0, 0, 0, 9]);
        assert_eq!(g.span_index_exp(), 3);
        // Missing directions count N each.
        let h = ZpMat::from_rows(3, 5, 1, 2, &[1, 0]);
        assert_eq!(h.span_index_exp(), 5);
    }

    #[test]
    fn transforms_are_invertible() {
        let a = ZpMat::from_rows(5, 4, 2, 2, &[5, 10, 15, 20]);
        let snf = a.snf();
        // U and V are products of elementary operations; check invertibility
        // by SNF: all diagonal exponents must be 0.
        assert!(snf.u.snf().diag.iter().all(|&e| e == 0));
        assert!(snf.v.snf().diag.iter().all(|&e| e == 0));
    }
}
