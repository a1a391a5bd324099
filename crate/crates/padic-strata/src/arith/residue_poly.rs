//! Polynomials over the residue fields `GF(p^f)` and their factorization.
//!
//! Factorization runs the classical pipeline: squarefree decomposition
//! (handling inseparable parts by p-th roots), distinct-degree splitting via
//! `x^{q^i} mod f`, and Cantor–Zassenhaus equal-degree splitting (the trace
//! variant in characteristic 2). Randomness is drawn from a seeded ChaCha
//! stream so all results are reproducible.

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::fq::FqElem;
use crate::error::{Error, Result};

/// Default seed for the equal-degree splitting randomness.
const DEFAULT_FACTOR_SEED: u64 = 0x5eed_cafe_f00d_0001;

/// A polynomial over `GF(p^f)`, dense in the variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResiduePoly {
    p: u64,
    f: usize,
    /// Coefficient of `x^i` at index `i`; no trailing zeros (zero poly = empty).
    coeffs: Vec<FqElem>,
}

impl ResiduePoly {
    // ------------------------------------------------------------------
    // Construction and normal form
    // ------------------------------------------------------------------

    pub fn zero(p: u64, f: usize) -> Self {
        ResiduePoly { p, f, coeffs: vec![] }
    }

    pub fn one(p: u64, f: usize) -> Self {
        ResiduePoly { p, f, coeffs: vec![FqElem::one(p, f)] }
    }

    pub fn x(p: u64, f: usize) -> Self {
        ResiduePoly {
            p,
            f,
            coeffs: vec![FqElem::zero(p, f), FqElem::one(p, f)],
        }
    }

    /// Build from coefficients (low to high); trailing zeros are trimmed.
    pub fn from_coeffs(p: u64, f: usize, coeffs: Vec<FqElem>) -> Self {
        let mut poly = ResiduePoly { p, f, coeffs };
        poly.trim();
        poly
    }

    /// Build from prime-field scalars (low to high).
    pub fn from_prime_coeffs(p: u64, f: usize, coeffs: &[u64]) -> Self {
        Self::from_coeffs(
            p,
            f,
            coeffs.iter().map(|&c| FqElem::from_prime(p, f, c)).collect(),
        )
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn field_degree(&self) -> usize {
        self.f
    }

    /// Field size `q = p^f`.
    pub fn q(&self) -> u64 {
        (self.p as u128).pow(self.f as u32) as u64
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FqElem {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| FqElem::zero(self.p, self.f))
    }

    pub fn leading(&self) -> Option<&FqElem> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        matches!(self.leading(), Some(c) if c.is_one())
    }

    // ------------------------------------------------------------------
    // Ring operations
    // ------------------------------------------------------------------

    fn assert_compat(&self, other: &ResiduePoly) {
        assert_eq!(self.p, other.p, "mixed characteristics");
        assert_eq!(self.f, other.f, "mixed field degrees");
    }

    pub fn add(&self, other: &ResiduePoly) -> Self {
        self.assert_compat(other);
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i).add(&other.coeff(i))).collect();
        Self::from_coeffs(self.p, self.f, coeffs)
    }

    pub fn neg(&self) -> Self {
        ResiduePoly {
            p: self.p,
            f: self.f,
            coeffs: self.coeffs.iter().map(FqElem::neg).collect(),
        }
    }

    pub fn sub(&self, other: &ResiduePoly) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ResiduePoly) -> Self {
        self.assert_compat(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.p, self.f);
        }
        let mut coeffs =
            vec![FqElem::zero(self.p, self.f); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Self::from_coeffs(self.p, self.f, coeffs)
    }

    pub fn scale(&self, c: &FqElem) -> Self {
        Self::from_coeffs(
            self.p,
            self.f,
            self.coeffs.iter().map(|a| a.mul(c)).collect(),
        )
    }

    /// Make monic (errors on the zero polynomial).
    pub fn monic(&self) -> Result<Self> {
        let lead = self
            .leading()
            .ok_or_else(|| Error::InvalidParameter("monic of zero polynomial".into()))?;
        Ok(self.scale(&lead.inv()?))
    }

    /// Euclidean division: `self = q * div + r` with `deg r < deg div`.
    pub fn div_rem(&self, div: &ResiduePoly) -> Result<(Self, Self)> {
        self.assert_compat(div);
        let dd = div
            .degree()
            .ok_or_else(|| Error::InvalidParameter("division by zero polynomial".into()))?;
        let lead_inv = div.leading().expect("nonzero").inv()?;
        let mut rem = self.clone();
        let mut quo = vec![FqElem::zero(self.p, self.f); self.coeffs.len().saturating_sub(dd)];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let c = rem.coeffs[rd].mul(&lead_inv);
            let shift = rd - dd;
            quo[shift] = quo[shift].add(&c);
            for (j, b) in div.coeffs.iter().enumerate() {
                let t = c.mul(b);
                rem.coeffs[shift + j] = rem.coeffs[shift + j].sub(&t);
            }
            rem.trim();
        }
        Ok((Self::from_coeffs(self.p, self.f, quo), rem))
    }

    pub fn rem(&self, div: &ResiduePoly) -> Result<Self> {
        Ok(self.div_rem(div)?.1)
    }

    /// Exact quotient (panics in debug if the division is inexact).
    pub fn div_exact(&self, div: &ResiduePoly) -> Result<Self> {
        let (q, r) = self.div_rem(div)?;
        if !r.is_zero() {
            return Err(Error::InvalidParameter("inexact polynomial division".into()));
        }
        Ok(q)
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &ResiduePoly) -> Result<Self> {
        self.assert_compat(other);
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        if a.is_zero() {
            Ok(a)
        } else {
            a.monic()
        }
    }

    /// Extended gcd: returns `(g, u, v)` monic `g` with `u*self + v*other = g`.
    pub fn xgcd(&self, other: &ResiduePoly) -> Result<(Self, Self, Self)> {
        self.assert_compat(other);
        let (mut a, mut b) = (self.clone(), other.clone());
        let (mut u0, mut v0) = (Self::one(self.p, self.f), Self::zero(self.p, self.f));
        let (mut u1, mut v1) = (Self::zero(self.p, self.f), Self::one(self.p, self.f));
        while !b.is_zero() {
            let (q, r) = a.div_rem(&b)?;
            let u2 = u0.sub(&q.mul(&u1));
            let v2 = v0.sub(&q.mul(&v1));
            a = b;
            b = r;
            u0 = u1;
            v0 = v1;
            u1 = u2;
            v1 = v2;
        }
        if a.is_zero() {
            return Ok((a, u0, v0));
        }
        let linv = a.leading().expect("nonzero").inv()?;
        Ok((a.scale(&linv), u0.scale(&linv), v0.scale(&linv)))
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero(self.p, self.f);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| {
                let scalar = FqElem::from_prime(self.p, self.f, (i as u64) % self.p);
                c.mul(&scalar)
            })
            .collect();
        Self::from_coeffs(self.p, self.f, coeffs)
    }

    pub fn eval(&self, x: &FqElem) -> FqElem {
        let mut acc = FqElem::zero(self.p, self.f);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// `self^e mod modulus` with a `BigUint` exponent.
    pub fn pow_mod(&self, e: &BigUint, modulus: &ResiduePoly) -> Result<Self> {
        let mut acc = Self::one(self.p, self.f).rem(modulus)?;
        let mut base = self.rem(modulus)?;
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                acc = acc.mul(&base).rem(modulus)?;
            }
            if i + 1 < bits {
                base = base.mul(&base).rem(modulus)?;
            }
        }
        Ok(acc)
    }

    // ------------------------------------------------------------------
    // Squarefreeness and irreducibility
    // ------------------------------------------------------------------

    /// True iff the polynomial is squarefree (constants are squarefree).
    pub fn is_squarefree(&self) -> Result<bool> {
        match self.degree() {
            None => Err(Error::InvalidParameter(
                "squarefreeness of the zero polynomial is undefined".into(),
            )),
            Some(0) => Ok(true),
            Some(_) => {
                let g = self.gcd(&self.derivative())?;
                Ok(g.degree() == Some(0))
            }
        }
    }

    /// True iff the polynomial is irreducible over `GF(p^f)`.
    ///
    /// Uses the standard criterion: `x^{q^n} ≡ x (mod f)` together with
    /// `gcd(x^{q^{n/ℓ}} - x, f) = 1` for every prime `ℓ | n`.
    pub fn is_irreducible(&self) -> Result<bool> {
        let n = match self.degree() {
            None | Some(0) => return Ok(false),
            Some(1) => return Ok(true),
            Some(n) => n,
        };
        let me = self.monic()?;
        let q = BigUint::from(self.q());
        let x = Self::x(self.p, self.f);
        // x^{q^n} mod me
        let mut xq = x.clone();
        for _ in 0..n {
            xq = xq.pow_mod(&q, &me)?;
        }
        if xq.sub(&x).rem(&me)? != Self::zero(self.p, self.f) {
            return Ok(false);
        }
        for l in prime_divisors(n) {
            let k = n / l;
            let mut xqk = x.clone();
            for _ in 0..k {
                xqk = xqk.pow_mod(&q, &me)?;
            }
            let g = me.gcd(&xqk.sub(&x))?;
            if g.degree() != Some(0) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    // ------------------------------------------------------------------
    // Factorization
    // ------------------------------------------------------------------

    /// Full factorization into monic irreducible factors with multiplicities,
    /// using the default deterministic seed. The leading coefficient is
    /// returned separately.
    pub fn factor(&self) -> Result<(FqElem, Vec<(ResiduePoly, usize)>)> {
        self.factor_seeded(DEFAULT_FACTOR_SEED)
    }

    /// Factorization with an explicit seed for the equal-degree splitting.
    pub fn factor_seeded(&self, seed: u64) -> Result<(FqElem, Vec<(ResiduePoly, usize)>)> {
        let lead = self
            .leading()
            .ok_or_else(|| Error::InvalidParameter("factorization of zero polynomial".into()))?
            .clone();
        if self.degree() == Some(0) {
            return Ok((lead, vec![]));
        }
        let monic = self.monic()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out: Vec<(ResiduePoly, usize)> = vec![];
        for (sf_part, mult) in squarefree_decomposition(&monic)? {
            for (dd_part, deg) in distinct_degree_split(&sf_part)? {
                for irr in equal_degree_split(&dd_part, deg, &mut rng)? {
                    out.push((irr, mult));
                }
            }
        }
        out.sort_by(|a, b| cmp_poly(&a.0, &b.0));
        Ok((lead, out))
    }

    /// The roots in `GF(p^f)` (without multiplicity), via linear factors.
    pub fn roots(&self) -> Result<Vec<FqElem>> {
        let (_, factors) = self.factor()?;
        let mut roots = vec![];
        for (fac, _) in factors {
            if fac.degree() == Some(1) {
                // x + c has root -c.
                roots.push(fac.coeff(0).neg());
            }
        }
        Ok(roots)
    }
}

/// Canonical ordering of polynomials (degree, then coordinates low-to-high).
fn cmp_poly(a: &ResiduePoly, b: &ResiduePoly) -> std::cmp::Ordering {
    a.coeffs
        .len()
        .cmp(&b.coeffs.len())
        .then_with(|| {
            for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
                match x.coords().cmp(y.coords()) {
                    std::cmp::Ordering::Equal => continue,
                    o => return o,
                }
            }
            std::cmp::Ordering::Equal
        })
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Squarefree decomposition of a monic polynomial (Yun's algorithm adapted to
/// characteristic p: the inseparable part is peeled off as a p-th power).
fn squarefree_decomposition(poly: &ResiduePoly) -> Result<Vec<(ResiduePoly, usize)>> {
    let p = poly.p();
    let f = poly.field_degree();
    let mut out: Vec<(ResiduePoly, usize)> = vec![];
    let one = ResiduePoly::one(p, f);

    let deriv = poly.derivative();
    let mut c = poly.gcd(&deriv)?;
    if c.is_zero() {
        // Derivative vanished identically: poly = g(x^p).
        let g = p_th_root(poly)?;
        for (fac, mult) in squarefree_decomposition(&g)? {
            out.push((fac, mult * p as usize));
        }
        return Ok(out);
    }
    let mut w = poly.div_exact(&c)?;
    let mut i = 1usize;
    while !w.is_one() {
        let y = w.gcd(&c)?;
        let fac = w.div_exact(&y)?;
        if fac != one && fac.degree() != Some(0) {
            out.push((fac, i));
        }
        w = y.clone();
        c = c.div_exact(&y)?;
        i += 1;
    }
    if c.degree() != Some(0) {
        let g = p_th_root(&c)?;
        for (fac, mult) in squarefree_decomposition(&g)? {
            out.push((fac, mult * p as usize));
        }
    }
    Ok(out)
}

/// For `c(x) = g(x)^p` (all exponents divisible by p), recover `g`.
fn p_th_root(c: &ResiduePoly) -> Result<ResiduePoly> {
    let p = c.p();
    let f = c.field_degree();
    let deg = c
        .degree()
        .ok_or_else(|| Error::InvalidParameter("p-th root of zero polynomial".into()))?;
    if deg % p as usize != 0 {
        return Err(Error::InvalidParameter(
            "polynomial is not a p-th power".into(),
        ));
    }
    let mut coeffs = vec![];
    for j in 0..=deg / p as usize {
        for k in 1..p as usize {
            let idx = j * p as usize + k;
            if idx <= deg && !c.coeff(idx).is_zero() {
                return Err(Error::InvalidParameter(
                    "polynomial is not a p-th power".into(),
                ));
            }
        }
        // a^{1/p} = a^{p^{f-1}} in GF(p^f).
        let a = c.coeff(j * p as usize);
        let mut root = a;
        for _ in 0..f.saturating_sub(1) {
            root = root.frobenius();
        }
        coeffs.push(root);
    }
    Ok(ResiduePoly::from_coeffs(p, f, coeffs))
}

/// Distinct-degree splitting of a monic squarefree polynomial: returns pairs
/// (product of all irreducible factors of degree d, d).
fn distinct_degree_split(poly: &ResiduePoly) -> Result<Vec<(ResiduePoly, usize)>> {
    let p = poly.p();
    let f = poly.field_degree();
    let q = BigUint::from(poly.q());
    let x = ResiduePoly::x(p, f);
    let mut rest = poly.clone();
    let mut xq = x.rem(&rest)?;
    let mut out = vec![];
    let mut d = 1usize;
    while rest.degree().map_or(false, |n| n >= 2 * d) {
        xq = xq.pow_mod(&q, &rest)?;
        let g = rest.gcd(&xq.sub(&x))?;
        if g.degree() != Some(0) {
            out.push((g.clone(), d));
            rest = rest.div_exact(&g)?;
            xq = xq.rem(&rest)?;
        }
        d += 1;
    }
    if rest.degree().map_or(false, |n| n >= 1) {
        let n = rest.degree().expect("nonzero");
        out.push((rest, n));
    }
    Ok(out)
}

/// Equal-degree splitting (Cantor–Zassenhaus; trace variant for p = 2).
fn equal_degree_split(
    poly: &ResiduePoly,
    d: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<ResiduePoly>> {
    let p = poly.p();
    let f = poly.field_degree();
    let n = poly.degree().expect("nonzero input");
    if n == d {
        return Ok(vec![poly.clone()]);
    }
    let target = n / d;
    let mut factors = vec![poly.clone()];
    let one = ResiduePoly::one(p, f);
    let mut guard = 0;
    while factors.len() < target {
        guard += 1;
        if guard > 10_000 {
            return Err(Error::InvalidParameter(
                "equal-degree splitting failed to converge".into(),
            ));
        }
        let a = random_poly_below(p, f, n, rng);
        if a.degree().is_none() {
            continue;
        }
        let mut next = vec![];
        for u in factors.into_iter() {
            let ud = u.degree().expect("factors are nonzero");
            if ud == d {
                next.push(u);
                continue;
            }
            let b = if p == 2 {
                // Trace map over GF(2): T(a) = a + a^2 + ... + a^{2^{df-1}}.
                let k = (d * f) as u32;
                let mut acc = ResiduePoly::zero(p, f);
                let mut cur = a.rem(&u)?;
                for _ in 0..k {
                    acc = acc.add(&cur).rem(&u)?;
                    cur = cur.mul(&cur).rem(&u)?;
                }
                acc
            } else {
                // a^{(q^d-1)/2} - 1 mod u.
                let qd = BigUint::from(poly.q()).pow(d as u32);
                let e = (&qd - BigUint::one()) / BigUint::from(2u32);
                a.pow_mod(&e, &u)?.sub(&one)
            };
            let g = u.gcd(&b)?;
            match g.degree() {
                Some(gd) if gd > 0 && gd < ud => {
                    let h = u.div_exact(&g)?;
                    next.push(g);
                    next.push(h);
                }
                _ => next.push(u),
            }
        }
        factors = next;
    }
    Ok(factors)
}

fn random_poly_below(p: u64, f: usize, deg_bound: usize, rng: &mut ChaCha8Rng) -> ResiduePoly {
    let deg = rng.gen_range(1..deg_bound.max(2));
    let coeffs = (0..=deg).map(|_| FqElem::random(p, f, rng)).collect();
    ResiduePoly::from_coeffs(p, f, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::fq::{defining_poly_mod_p, FqCtx, SUPPORTED_DEGREES, SUPPORTED_PRIMES};

    fn pp(p: u64, f: usize, cs: &[u64]) -> ResiduePoly {
        ResiduePoly::from_prime_coeffs(p, f, cs)
    }

    #[test]
    fn tabulated_defining_polynomials_are_irreducible() {
        for &p in SUPPORTED_PRIMES.iter() {
            for &f in SUPPORTED_DEGREES.iter() {
                let coeffs = defining_poly_mod_p(p, f).unwrap();
                let poly = pp(p, 1, &coeffs);
                assert!(
                    poly.is_irreducible().unwrap(),
                    "table entry for p={p}, f={f} must be irreducible"
                );
            }
        }
    }

    #[test]
    fn division_and_gcd_are_consistent() {
        // (x^2+1)(x+2) over F_3.
        let a = pp(3, 1, &[1, 0, 1]);
        let b = pp(3, 1, &[2, 1]);
        let prod = a.mul(&b);
        let (q, r) = prod.div_rem(&a).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, b);
        let g = prod.gcd(&a).unwrap();
        assert_eq!(g, a.monic().unwrap());
    }

    #[test]
    fn xgcd_produces_bezout_witnesses() {
        let a = pp(5, 1, &[1, 0, 1]); // x^2 + 1
        let b = pp(5, 1, &[2, 1]); // x + 2: (x+2)(x-2) = x^2+1 over F_5, so gcd = x+2
        let (g, u, v) = a.xgcd(&b).unwrap();
        assert_eq!(u.mul(&a).add(&v.mul(&b)), g);
        assert_eq!(g, b.monic().unwrap());
        // Coprime case.
        let c = pp(5, 1, &[1, 1]); // x + 1
        let (g2, u2, v2) = a.xgcd(&c).unwrap();
        assert!(g2.is_one());
        assert_eq!(u2.mul(&a).add(&v2.mul(&c)), g2);
    }

    #[test]
    fn squarefree_detection() {
        let x = ResiduePoly::x(3, 1);
        let sq = x.mul(&x); // x^2
        assert!(!sq.is_squarefree().unwrap());
        let sf = pp(3, 1, &[1, 1]).mul(&pp(3, 1, &[2, 1])); // (x+1)(x+2)
        assert!(sf.is_squarefree().unwrap());
        // Inseparable: x^3 + 2 = (x + 2)^3 over F_3 (since -1 ≡ 2, (x+2)^3 = x^3 + 8 = x^3 + 2).
        let insep = pp(3, 1, &[2, 0, 0, 1]);
        assert!(!insep.is_squarefree().unwrap());
    }

    #[test]
    fn factorization_recovers_known_factors() {
        // (x+1)^2 (x^2+x+1) over F_2; x^2+x+1 irreducible.
        let a = pp(2, 1, &[1, 1]);
        let b = pp(2, 1, &[1, 1, 1]);
        let prod = a.mul(&a).mul(&b);
        let (lead, factors) = prod.factor().unwrap();
        assert!(lead.is_one());
        assert_eq!(factors.len(), 2);
        let mut found_linear = false;
        let mut found_quadratic = false;
        for (fac, mult) in &factors {
            if fac == &a {
                assert_eq!(*mult, 2);
                found_linear = true;
            }
            if fac == &b {
                assert_eq!(*mult, 1);
                found_quadratic = true;
            }
        }
        assert!(found_linear && found_quadratic);
    }

    #[test]
    fn factorization_of_pth_power_parts() {
        // (x^2 + 1)^3 over F_3 has vanishing derivative contributions.
        let a = pp(3, 1, &[1, 0, 1]); // irreducible over F_3
        let prod = a.mul(&a).mul(&a);
        let (_, factors) = prod.factor().unwrap();
        assert_eq!(factors.len(), 1);
        assert_eq!(factors[0].0, a);
        assert_eq!(factors[0].1, 3);
    }

    #[test]
    fn factorization_over_extension_fields() {
        // Over GF(4): x^2 + x + 1 splits into (x + w)(x + w^2).
        let ctx = FqCtx::new(2, 2).unwrap();
        let poly = pp(2, 2, &[1, 1, 1]);
        let (_, factors) = poly.factor().unwrap();
        assert_eq!(factors.len(), 2);
        for (fac, mult) in &factors {
            assert_eq!(fac.degree(), Some(1));
            assert_eq!(*mult, 1);
        }
        // Roots are w and w^2 = w + 1.
        let roots = poly.roots().unwrap();
        let w = ctx.generator();
        assert!(roots.contains(&w));
        assert!(roots.contains(&w.mul(&w)));
    }

    #[test]
    fn irreducibility_matches_factor_count() {
        for &p in &[2u64, 3] {
            let fd = 1usize;
            // Enumerate all monic cubics and cross-check.
            for c0 in 0..p {
                for c1 in 0..p {
                    for c2 in 0..p {
                        let poly = pp(p, fd, &[c0, c1, c2, 1]);
                        let irr = poly.is_irreducible().unwrap();
                        let (_, factors) = poly.factor().unwrap();
                        let total: usize = factors
                            .iter()
                            .map(|(f_, m)| f_.degree().unwrap() * m)
                            .sum();
                        assert_eq!(total, 3, "factor degrees sum to deg");
                        let single = factors.len() == 1
                            && factors[0].1 == 1
                            && factors[0].0.degree() == Some(3);
                        assert_eq!(irr, single, "p={p} poly={:?}", (c0, c1, c2));
                    }
                }
            }
        }
    }

    #[test]
    fn factor_is_deterministic_across_seeds_content() {
        // Different seeds must give the same multiset of factors.
        let poly = pp(5, 1, &[2, 0, 0, 0, 1, 1]); // arbitrary quintic-ish
        let (_, f1) = poly.factor_seeded(1).unwrap();
        let (_, f2) = poly.factor_seeded(99).unwrap();
        assert_eq!(f1, f2, "canonical sorting makes factorization seed-independent");
        // And reconstruct the original.
        let mut prod = ResiduePoly::one(5, 1);
        for (fac, mult) in &f1 {
            for _ in 0..*mult {
                prod = prod.mul(fac);
            }
        }
        assert_eq!(prod, poly.monic().unwrap());
    }
}
