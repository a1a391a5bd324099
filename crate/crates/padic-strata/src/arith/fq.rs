//! The finite fields `GF(p^f)` underlying the residue computations.
//!
//! Each supported field is realized as `GF(p)[x]/(h̄)` where `h̄` is the fixed
//! defining polynomial from [`defining_poly`] (the same integral polynomial
//! defines the unramified extension `L = Q_p[x]/(h)` upstairs, so reduction
//! maps are coordinatewise). Elements are coordinate vectors in the power
//! basis of the class of `x`.

use rand::Rng;

use crate::error::{Error, Result};

/// Primes for which defining polynomials are tabulated.
pub const SUPPORTED_PRIMES: [u64; 3] = [2, 3, 5];
/// Extension degrees for which defining polynomials are tabulated.
pub const SUPPORTED_DEGREES: [usize; 5] = [1, 2, 3, 4, 6];

/// The fixed monic integral defining polynomial for the unramified extension
/// of degree `f` of `Q_p`, as coefficients `c_0, ..., c_f` (with `c_f = 1`).
///
/// Each reduction modulo `p` is irreducible over `GF(p)`; this is verified by
/// unit tests against the factorization machinery.
pub fn defining_poly(p: u64, f: usize) -> Result<&'static [i64]> {
    let poly: &'static [i64] = match (p, f) {
        (2, 1) => &[1, 1],
        (2, 2) => &[1, 1, 1],
        (2, 3) => &[1, 0, 1, 1],
        (2, 4) => &[1, 0, 0, 1, 1],
        (2, 6) => &[1, 0, 0, 0, 0, 1, 1],
        (3, 1) => &[2, 1],
        (3, 2) => &[1, 0, 1],
        (3, 3) => &[1, 0, 2, 1],
        (3, 4) => &[1, 0, 1, 1, 1],
        (3, 6) => &[1, 0, 0, 0, 1, 1, 1],
        (5, 1) => &[4, 1],
        (5, 2) => &[1, 1, 1],
        (5, 3) => &[1, 0, 1, 1],
        (5, 4) => &[1, 0, 1, 1, 1],
        (5, 6) => &[1, 0, 0, 0, 1, 1, 1],
        _ => {
            return Err(Error::InvalidParameter(format!(
                "no defining polynomial tabulated for p={p}, f={f}"
            )))
        }
    };
    Ok(poly)
}

/// The reduction of the defining polynomial modulo `p`, coefficients
/// `c_0, ..., c_f` in `[0, p)`.
pub fn defining_poly_mod_p(p: u64, f: usize) -> Result<Vec<u64>> {
    Ok(defining_poly(p, f)?
        .iter()
        .map(|&c| c.rem_euclid(p as i64) as u64)
        .collect())
}

/// An element of `GF(p^f)` in the power basis of the fixed generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FqElem {
    p: u64,
    f: usize,
    /// `f` coordinates, each reduced modulo `p`.
    coords: Vec<u64>,
}

impl FqElem {
    /// The zero of `GF(p^f)`.
    pub fn zero(p: u64, f: usize) -> Self {
        FqElem { p, f, coords: vec![0; f] }
    }

    /// The one of `GF(p^f)`.
    pub fn one(p: u64, f: usize) -> Self {
        let mut coords = vec![0; f];
        coords[0] = 1;
        FqElem { p, f, coords }
    }

    /// The class of the defining generator (the image of `x`).
    pub fn generator(p: u64, f: usize) -> Result<Self> {
        defining_poly(p, f)?;
        if f == 1 {
            // Defining polynomial is x - 1: the generator is 1.
            return Ok(Self::one(p, 1));
        }
        let mut coords = vec![0; f];
        coords[1] = 1;
        Ok(FqElem { p, f, coords })
    }

    /// An element of the prime field `GF(p)` embedded in `GF(p^f)`.
    pub fn from_prime(p: u64, f: usize, a: u64) -> Self {
        let mut coords = vec![0; f];
        coords[0] = a % p;
        FqElem { p, f, coords }
    }

    /// Build from explicit coordinates (reduced modulo `p`).
    pub fn from_coords(p: u64, coords: Vec<u64>) -> Self {
        let f = coords.len();
        let coords = coords.into_iter().map(|c| c % p).collect();
        FqElem { p, f, coords }
    }

    /// A uniformly random element.
    pub fn random<R: Rng>(p: u64, f: usize, rng: &mut R) -> Self {
        let coords = (0..f).map(|_| rng.gen_range(0..p)).collect();
        FqElem { p, f, coords }
    }

    /// Enumerate all `p^f` elements (small fields only; used by oracles).
    pub fn all(p: u64, f: usize) -> Vec<Self> {
        let q = (p as u128).pow(f as u32) as u64;
        (0..q)
            .map(|mut idx| {
                let mut coords = vec![0u64; f];
                for c in coords.iter_mut() {
                    *c = idx % p;
                    idx /= p;
                }
                FqElem { p, f, coords }
            })
            .collect()
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn f(&self) -> usize {
        self.f
    }

    /// The field size `q = p^f`.
    pub fn q(&self) -> u64 {
        (self.p as u128).pow(self.f as u32) as u64
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coords[0] == 1 && self.coords[1..].iter().all(|&c| c == 0)
    }

    fn assert_compat(&self, other: &FqElem) {
        assert_eq!(self.p, other.p, "mixed characteristics");
        assert_eq!(self.f, other.f, "mixed field degrees");
    }

    pub fn add(&self, other: &FqElem) -> Self {
        self.assert_compat(other);
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a + b) % self.p)
            .collect();
        FqElem { p: self.p, f: self.f, coords }
    }

    pub fn neg(&self) -> Self {
        let coords = self
            .coords
            .iter()
            .map(|&a| if a == 0 { 0 } else { self.p - a })
            .collect();
        FqElem { p: self.p, f: self.f, coords }
    }

    pub fn sub(&self, other: &FqElem) -> Self {
        self.add(&other.neg())
    }

    /// Product, reducing by the fixed defining polynomial.
    pub fn mul(&self, other: &FqElem) -> Self {
        self.assert_compat(other);
        let p = self.p;
        let f = self.f;
        if f == 1 {
            return FqElem { p, f, coords: vec![self.coords[0] * other.coords[0] % p] };
        }
        let mut prod = vec![0u64; 2 * f - 1];
        for (i, &a) in self.coords.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coords.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a * b) % p;
            }
        }
        let h = defining_poly_mod_p(p, f).expect("element built over a supported field");
        // Reduce: x^f ≡ -(c_0 + c_1 x + ... + c_{f-1} x^{f-1})
        for k in (f..2 * f - 1).rev() {
            let lead = prod[k];
            if lead == 0 {
                continue;
            }
            prod[k] = 0;
            for j in 0..f {
                let sub = lead * h[j] % p;
                prod[k - f + j] = (prod[k - f + j] + p - sub) % p;
            }
        }
        prod.truncate(f);
        FqElem { p, f, coords: prod }
    }

    /// `self^e` by square-and-multiply.
    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(self.p, self.f);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse (errors on zero).
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotInvertible("zero in GF(p^f)".into()));
        }
        Ok(self.pow(self.q() - 2))
    }

    /// The arithmetic Frobenius `x -> x^p`.
    pub fn frobenius(&self) -> Self {
        self.pow(self.p)
    }

    /// `k`-fold Frobenius (negative `k` allowed; the automorphism group is
    /// cyclic of order `f`).
    pub fn frobenius_iter(&self, k: i64) -> Self {
        let f = self.f as i64;
        let k = k.rem_euclid(f) as u32;
        let mut out = self.clone();
        for _ in 0..k {
            out = out.frobenius();
        }
        out
    }

    /// Field trace to the prime field `GF(p)`, returned as a scalar.
    pub fn trace_to_prime(&self) -> u64 {
        let mut acc = FqElem::zero(self.p, self.f);
        let mut cur = self.clone();
        for _ in 0..self.f {
            acc = acc.add(&cur);
            cur = cur.frobenius();
        }
        debug_assert!(acc.coords[1..].iter().all(|&c| c == 0), "trace lies in GF(p)");
        acc.coords[0]
    }

    /// Field norm to the prime field `GF(p)`, returned as a scalar.
    pub fn norm_to_prime(&self) -> u64 {
        let mut acc = FqElem::one(self.p, self.f);
        let mut cur = self.clone();
        for _ in 0..self.f {
            acc = acc.mul(&cur);
            cur = cur.frobenius();
        }
        debug_assert!(acc.coords[1..].iter().all(|&c| c == 0), "norm lies in GF(p)");
        acc.coords[0]
    }
}

/// Convenience context carrying `(p, f)` for constructing many elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FqCtx {
    pub p: u64,
    pub f: usize,
}

impl FqCtx {
    pub fn new(p: u64, f: usize) -> Result<Self> {
        defining_poly(p, f)?;
        Ok(FqCtx { p, f })
    }

    pub fn zero(&self) -> FqElem {
        FqElem::zero(self.p, self.f)
    }

    pub fn one(&self) -> FqElem {
        FqElem::one(self.p, self.f)
    }

    pub fn generator(&self) -> FqElem {
        FqElem::generator(self.p, self.f).expect("context is validated")
    }

    pub fn from_prime(&self, a: u64) -> FqElem {
        FqElem::from_prime(self.p, self.f, a)
    }

    pub fn q(&self) -> u64 {
        (self.p as u128).pow(self.f as u32) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_hold_in_gf4() {
        let ctx = FqCtx::new(2, 2).unwrap();
        let w = ctx.generator();
        // w^2 + w + 1 = 0, so w^2 = w + 1.
        let w2 = w.mul(&w);
        assert_eq!(w2, w.add(&ctx.one()));
        // w^3 = 1.
        assert!(w.pow(3).is_one());
    }

    #[test]
    fn inverses_work_in_every_supported_field() {
        for &p in SUPPORTED_PRIMES.iter() {
            for &f in SUPPORTED_DEGREES.iter() {
                let ctx = FqCtx::new(p, f).unwrap();
                let w = ctx.generator();
                let wi = w.inv().unwrap();
                assert!(w.mul(&wi).is_one(), "p={p} f={f}");
            }
        }
    }

    #[test]
    fn frobenius_is_an_automorphism_of_order_f() {
        for &p in SUPPORTED_PRIMES.iter() {
            for &f in [2usize, 3, 4].iter() {
                let ctx = FqCtx::new(p, f).unwrap();
                let w = ctx.generator();
                let mut x = w.clone();
                for _ in 0..f {
                    x = x.frobenius();
                }
                assert_eq!(x, w, "frobenius^f = id for p={p}, f={f}");
                // Additivity on a sample.
                let a = w.pow(3);
                let b = w.add(&ctx.one());
                assert_eq!(
                    a.add(&b).frobenius(),
                    a.frobenius().add(&b.frobenius())
                );
            }
        }
    }

    #[test]
    fn multiplicative_group_has_order_q_minus_one() {
        let ctx = FqCtx::new(3, 3).unwrap();
        let w = ctx.generator();
        assert!(w.pow(26).is_one());
        // The order of w divides 26 = 2 * 13; verify w is not of order <= 2.
        assert!(!w.pow(2).is_one());
        assert!(!w.pow(13).is_one() || !w.pow(2).is_one());
    }

    #[test]
    fn trace_and_norm_land_in_prime_field() {
        let ctx = FqCtx::new(5, 2).unwrap();
        let w = ctx.generator();
        // For h = x^2 + x + 1 over F_5: trace(w) = w + w^5 = -1 (sum of roots),
        // norm(w) = w * w^5 = 1 (product of roots).
        assert_eq!(w.trace_to_prime(), 4);
        assert_eq!(w.norm_to_prime(), 1);
    }

    #[test]
    fn all_enumerates_the_field_exactly() {
        let all = FqElem::all(3, 2);
        assert_eq!(all.len(), 9);
        let distinct: std::collections::HashSet<_> = all.iter().cloned().collect();
        assert_eq!(distinct.len(), 9);
    }
}
