//! The unramified extensions `L/Q_p` of the tabulated degrees.
//!
//! `L = Q_p[ω]` where `ω` is a root of the fixed defining polynomial `h` of
//! [`crate::arith::fq::defining_poly`]. Since `L/Q_p` is unramified, the power
//! basis `1, ω, ..., ω^{f-1}` is an integral basis and the valuation of
//! `x = Σ a_i ω^i` (normalized by `v(p) = 1`) is `min_i v_p(a_i)`.
//!
//! The Frobenius `φ` of `L/Q_p` is computed once per (p, f, precision) by
//! Newton-lifting `ω^p` to the root of `h` in its residue class (`h'` is a
//! unit there because the residue of `h` is separable), and cached.

use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::sync::Mutex;

use rand::Rng;

use crate::arith::fq::{defining_poly, FqElem};
use crate::arith::padic::PadicScalar;
use crate::error::{Error, Result};

/// An element of the unramified extension of degree `f`, in the power basis
/// of the fixed generator `ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnramifiedElement {
    p: u64,
    f: usize,
    /// `f` coordinates; coordinate `i` multiplies `ω^i`.
    coords: Vec<PadicScalar>,
}

impl UnramifiedElement {
    // ------------------------------------------------------------------
    // Constructors
    // ------------------------------------------------------------------

    pub fn zero(p: u64, f: usize) -> Self {
        UnramifiedElement {
            p,
            f,
            coords: vec![PadicScalar::exact_zero(p); f],
        }
    }

    pub fn one(p: u64, f: usize, prec: u32) -> Self {
        let mut coords = vec![PadicScalar::exact_zero(p); f];
        coords[0] = PadicScalar::one(p, prec);
        UnramifiedElement { p, f, coords }
    }

    /// The fixed generator `ω`.
    pub fn generator(p: u64, f: usize, prec: u32) -> Result<Self> {
        defining_poly(p, f)?;
        if f == 1 {
            return Ok(Self::one(p, 1, prec));
        }
        let mut coords = vec![PadicScalar::exact_zero(p); f];
        coords[1] = PadicScalar::one(p, prec);
        Ok(UnramifiedElement { p, f, coords })
    }

    /// Embed a base-field scalar.
    pub fn from_scalar(f: usize, a: PadicScalar) -> Self {
        let p = a.p();
        let mut coords = vec![PadicScalar::exact_zero(p); f];
        coords[0] = a;
        UnramifiedElement { p, f, coords }
    }

    pub fn from_coords(p: u64, coords: Vec<PadicScalar>) -> Self {
        let f = coords.len();
        UnramifiedElement { p, f, coords }
    }

    /// Lift a residue-field element to the integral element with the same
    /// small-integer coordinates, carried at relative precision `prec`.
    /// (The representative is exact, so it carries full precision even though
    /// only its residue is canonical.)
    pub fn lift_residue(r: &FqElem, prec: u32) -> Self {
        let coords = r
            .coords()
            .iter()
            .map(|&c| PadicScalar::from_integer(r.p(), c as i64, prec))
            .collect();
        UnramifiedElement { p: r.p(), f: r.f(), coords }
    }

    /// A random integral element with independently uniform residue digits up
    /// to `p^digits`, carried at relative precision `prec`.
    pub fn random_integral<R: Rng>(
        p: u64,
        f: usize,
        digits: u32,
        prec: u32,
        rng: &mut R,
    ) -> Self {
        let coords = (0..f)
            .map(|_| {
                let mut v = num_bigint::BigInt::from(0);
                for k in 0..digits {
                    let d = rng.gen_range(0..p);
                    v += num_bigint::BigInt::from(d) * num_bigint::BigInt::from(p).pow(k);
                }
                PadicScalar::from_bigint(p, &v, prec)
            })
            .collect();
        UnramifiedElement { p, f, coords }
    }

    // ------------------------------------------------------------------
    // Observers
    // ------------------------------------------------------------------

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn coords(&self) -> &[PadicScalar] {
        &self.coords
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_exact_zero())
    }

    /// Valuation lower bound (min over coordinates).
    pub fn vlb(&self) -> i64 {
        self.coords.iter().map(|c| c.vlb()).min().unwrap_or(i64::MAX)
    }

    /// The exact valuation `v_L(x) = min_i v_p(a_i)`, when determined.
    pub fn valuation(&self) -> Result<i64> {
        if self.is_exact_zero() {
            return Err(Error::IndeterminateValuation(
                "exact zero has infinite valuation".into(),
            ));
        }
        let lb = self.vlb();
        // Determined iff some coordinate provably attains the minimum.
        for c in &self.coords {
            if c.has_exact_valuation() && c.valuation()? == lb {
                return Ok(lb);
            }
        }
        Err(Error::IndeterminateValuation(format!(
            "only v >= {lb} is known at this precision"
        )))
    }

    /// Decide `x ≡ 0 (mod p^k o_L)`.
    pub fn is_zero_mod(&self, k: i64) -> Result<bool> {
        for c in &self.coords {
            if !c.is_zero_mod(k)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn congruent_mod(&self, other: &UnramifiedElement, k: i64) -> Result<bool> {
        self.sub(other).is_zero_mod(k)
    }

    /// Minimum absolute precision across coordinates.
    pub fn abs_prec(&self) -> i64 {
        self.coords.iter().map(|c| c.abs_prec()).min().unwrap_or(i64::MAX)
    }

    /// The residue of `x · p^{-scale}` in `GF(p^f)` (requires integrality of
    /// the scaled element and one known digit).
    pub fn residue_at(&self, scale: i64) -> Result<FqElem> {
        let mut digits = Vec::with_capacity(self.f);
        for c in &self.coords {
            let shifted = c.shift(-scale);
            if shifted.vlb() < 0 {
                if shifted.has_exact_valuation() {
                    return Err(Error::NotIntegral(format!(
                        "coordinate has valuation {} < 0 at scale {scale}",
                        shifted.valuation()?
                    )));
                }
                return Err(Error::InsufficientPrecision(
                    "integrality of residue lift not certified".into(),
                ));
            }
            digits.push(shifted.digit(0)?);
        }
        Ok(FqElem::from_coords(self.p, digits))
    }

    /// The residue of an integral element.
    pub fn residue(&self) -> Result<FqElem> {
        self.residue_at(0)
    }

    // ------------------------------------------------------------------
    // Arithmetic
    // ------------------------------------------------------------------

    fn assert_compat(&self, other: &UnramifiedElement) {
        assert_eq!(self.p, other.p, "mixed characteristics");
        assert_eq!(self.f, other.f, "mixed extension degrees");
    }

    pub fn add(&self, other: &UnramifiedElement) -> Self {
        self.assert_compat(other);
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.add(b))
            .collect();
        UnramifiedElement { p: self.p, f: self.f, coords }
    }

    pub fn neg(&self) -> Self {
        UnramifiedElement {
            p: self.p,
            f: self.f,
            coords: self.coords.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn sub(&self, other: &UnramifiedElement) -> Self {
        self.add(&other.neg())
    }

    /// Product, reducing by the defining polynomial `h` (whose coefficients
    /// are exact small integers, so reduction costs no precision).
    pub fn mul(&self, other: &UnramifiedElement) -> Self {
        self.assert_compat(other);
        let (p, f) = (self.p, self.f);
        if f == 1 {
            return UnramifiedElement {
                p,
                f,
                coords: vec![self.coords[0].mul(&other.coords[0])],
            };
        }
        let mut prod = vec![PadicScalar::exact_zero(p); 2 * f - 1];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in other.coords.iter().enumerate() {
                prod[i + j] = prod[i + j].add(&a.mul(b));
            }
        }
        let h = defining_poly(p, f).expect("validated on construction");
        for k in (f..2 * f - 1).rev() {
            let lead = prod[k].clone();
            if lead.is_exact_zero() {
                continue;
            }
            prod[k] = PadicScalar::exact_zero(p);
            for (j, &hj) in h.iter().take(f).enumerate() {
                if hj != 0 {
                    prod[k - f + j] = prod[k - f + j].sub(&lead.mul_small_int(hj));
                }
            }
        }
        prod.truncate(f);
        UnramifiedElement { p, f, coords: prod }
    }

    pub fn mul_scalar(&self, s: &PadicScalar) -> Self {
        UnramifiedElement {
            p: self.p,
            f: self.f,
            coords: self.coords.iter().map(|c| c.mul(s)).collect(),
        }
    }

    pub fn mul_small_int(&self, n: i64) -> Self {
        UnramifiedElement {
            p: self.p,
            f: self.f,
            coords: self.coords.iter().map(|c| c.mul_small_int(n)).collect(),
        }
    }

    /// Multiply by `p^k`.
    pub fn shift(&self, k: i64) -> Self {
        UnramifiedElement {
            p: self.p,
            f: self.f,
            coords: self.coords.iter().map(|c| c.shift(k)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let prec = self.min_rel_prec().unwrap_or(1);
        let mut acc = Self::one(self.p, self.f, prec);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    fn min_rel_prec(&self) -> Option<u32> {
        self.coords
            .iter()
            .filter(|c| !c.is_exact_zero())
            .map(|c| c.rel_prec())
            .min()
    }

    /// Multiplicative inverse via residue inversion and Newton refinement
    /// `z ← z(2 - xz)`; relative precision is preserved.
    pub fn inv(&self) -> Result<Self> {
        let v = self.valuation()?;
        let unit = self.shift(-v);
        let r = unit.residue()?;
        let r_inv = r.inv()?;
        let target = unit.abs_prec();
        if target <= 0 {
            return Err(Error::InsufficientPrecision(
                "no certified digits to invert".into(),
            ));
        }
        let prec = target as u32;
        let mut z = Self::lift_residue(&r_inv, prec);
        let two = Self::one(self.p, self.f, prec).mul_small_int(2);
        let mut steps = 0;
        loop {
            let err = Self::one(self.p, self.f, prec).sub(&unit.mul(&z));
            if err.is_zero_mod(target).unwrap_or(false) {
                break;
            }
            z = z.mul(&two.sub(&unit.mul(&z)));
            steps += 1;
            if steps > 64 {
                return Err(Error::InsufficientPrecision(
                    "inverse iteration failed to certify convergence".into(),
                ));
            }
        }
        Ok(z.shift(-v))
    }

    /// The arithmetic Frobenius `φ` (generator of Gal(L/F)) applied `k` times
    /// (negative `k` allowed).
    pub fn frobenius_iter(&self, k: i64) -> Result<Self> {
        let f = self.f as i64;
        let k = k.rem_euclid(f) as usize;
        if k == 0 || self.f == 1 {
            return Ok(self.clone());
        }
        let prec = self.working_prec();
        let images = frobenius_images(self.p, self.f, prec, k)?;
        let mut acc = Self::zero(self.p, self.f);
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            acc = acc.add(&images[i].mul_scalar(a));
        }
        Ok(acc)
    }

    pub fn frobenius(&self) -> Result<Self> {
        self.frobenius_iter(1)
    }

    /// The field trace to `Q_p` (sum of Galois conjugates), as a base scalar.
    pub fn trace(&self) -> Result<PadicScalar> {
        let mut acc = Self::zero(self.p, self.f);
        for k in 0..self.f {
            acc = acc.add(&self.frobenius_iter(k as i64)?);
        }
        acc.expect_base_rational()
    }

    /// Certify that the element lies in the base field `Q_p` (all `ω^{>=1}`
    /// coordinates provably vanish at the element's absolute precision) and
    /// return its base coordinate.
    pub fn expect_base_rational(&self) -> Result<PadicScalar> {
        let ap = self.abs_prec();
        for c in &self.coords[1..] {
            if c.is_exact_zero() {
                continue;
            }
            if !c.is_zero_mod(ap.min(c.abs_prec()))? {
                return Err(Error::InvalidParameter(
                    "element does not lie in the base field".into(),
                ));
            }
        }
        Ok(self.coords[0].clone())
    }

    fn working_prec(&self) -> u32 {
        let ap = self
            .coords
            .iter()
            .map(|c| c.abs_prec())
            .filter(|&a| a != i64::MAX)
            .max()
            .unwrap_or(1);
        let lb = self.vlb().min(0);
        (ap - lb).max(1) as u32
    }
}

impl std::fmt::Display for UnramifiedElement {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, c)| format!("({c})·ω^{i}"))
            .collect();
        write!(fm, "{}", parts.join(" + "))
    }
}

/// Key for the Frobenius image cache.
type FrobKey = (u64, usize, u32);

static FROB_CACHE: Lazy<Mutex<HashMap<FrobKey, Vec<Vec<UnramifiedElement>>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// `images[k][i] = φ^{k+1}(ω^i)` for `k in 0..f-1`, at relative precision
/// `prec`. Computed on demand and cached.
fn frobenius_images(p: u64, f: usize, prec: u32, k: usize) -> Result<Vec<UnramifiedElement>> {
    debug_assert!(k >= 1 && k < f);
    {
        let cache = FROB_CACHE.lock().expect("cache lock");
        if let Some(images) = cache.get(&(p, f, prec)) {
            return Ok(images[k - 1].clone());
        }
    }
    let phi_omega = frobenius_of_generator(p, f, prec)?;
    // tables[j-1][i] = φ^j(ω^i) = (φ^j(ω))^i for j = 1..f-1.
    let mut tables: Vec<Vec<UnramifiedElement>> = vec![];
    let mut gen_image = phi_omega; // φ^j(ω), starting at j = 1
    for j in 1..f {
        let mut powers = Vec::with_capacity(f);
        let mut acc = UnramifiedElement::one(p, f, prec);
        for _ in 0..f {
            powers.push(acc.clone());
            acc = acc.mul(&gen_image);
        }
        tables.push(powers);
        if j + 1 < f {
            // φ^{j+1}(ω) = φ(φ^j(ω)), by substituting the φ-table.
            gen_image = apply_power_table(&tables[0], &gen_image);
        }
    }
    let result = tables[k - 1].clone();
    let mut cache = FROB_CACHE.lock().expect("cache lock");
    cache.insert((p, f, prec), tables);
    Ok(result)
}

/// Substitute: given `table[i] = σ(ω^i)`, compute `σ(x)` for `x = Σ a_i ω^i`.
fn apply_power_table(table: &[UnramifiedElement], x: &UnramifiedElement) -> UnramifiedElement {
    let mut acc = UnramifiedElement::zero(x.p(), x.f());
    for (i, a) in x.coords().iter().enumerate() {
        if a.is_exact_zero() {
            continue;
        }
        acc = acc.add(&table[i].mul_scalar(a));
    }
    acc
}

/// Newton-lift `ω^p` to the root of `h` in its residue class: the image
/// `φ(ω)` of the generator under the arithmetic Frobenius.
fn frobenius_of_generator(p: u64, f: usize, prec: u32) -> Result<UnramifiedElement> {
    let h = defining_poly(p, f)?;
    let omega = UnramifiedElement::generator(p, f, prec)?;
    let mut z = omega.pow(p as u32);
    let eval_h = |x: &UnramifiedElement| -> UnramifiedElement {
        let mut acc = UnramifiedElement::zero(p, f);
        for &c in h.iter().rev() {
            acc = acc.mul(x);
            if c != 0 {
                acc = acc.add(&UnramifiedElement::one(p, f, prec).mul_small_int(c));
            }
        }
        acc
    };
    let eval_hp = |x: &UnramifiedElement| -> UnramifiedElement {
        let mut acc = UnramifiedElement::zero(p, f);
        for (i, &c) in h.iter().enumerate().skip(1).rev() {
            acc = acc.mul(x);
            let ci = (i as i64) * c;
            if ci != 0 {
                acc = acc.add(&UnramifiedElement::one(p, f, prec).mul_small_int(ci));
            }
        }
        acc
    };
    let target = prec as i64;
    let mut steps = 0;
    loop {
        let hz = eval_h(&z);
        if hz.is_zero_mod(target).unwrap_or(false) {
            break;
        }
        let hpz = eval_hp(&z);
        let delta = hz.mul(&hpz.inv()?);
        z = z.sub(&delta);
        steps += 1;
        if steps > 64 {
            return Err(Error::InsufficientPrecision(
                "Frobenius lift failed to certify convergence".into(),
            ));
        }
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::fq::SUPPORTED_PRIMES;

    const PREC: u32 = 16;

    fn gen(p: u64, f: usize) -> UnramifiedElement {
        UnramifiedElement::generator(p, f, PREC).unwrap()
    }

    #[test]
    fn generator_satisfies_its_defining_polynomial() {
        for &p in SUPPORTED_PRIMES.iter() {
            for &f in [2usize, 3, 4].iter() {
                let h = defining_poly(p, f).unwrap();
                let w = gen(p, f);
                let mut acc = UnramifiedElement::zero(p, f);
                for &c in h.iter().rev() {
                    acc = acc.mul(&w);
                    if c != 0 {
                        acc = acc.add(&UnramifiedElement::one(p, f, PREC).mul_small_int(c));
                    }
                }
                assert!(
                    acc.is_zero_mod(PREC as i64).unwrap(),
                    "h(ω) = 0 for p={p}, f={f}"
                );
            }
        }
    }

    #[test]
    fn valuation_is_min_of_coordinates() {
        let p = 3;
        let w = gen(p, 2);
        // x = 3 + 9ω: valuation 1.
        let x = UnramifiedElement::from_scalar(2, PadicScalar::from_integer(p, 3, PREC))
            .add(&w.mul_scalar(&PadicScalar::from_integer(p, 9, PREC)));
        assert_eq!(x.valuation().unwrap(), 1);
        // ω itself is a unit.
        assert_eq!(w.valuation().unwrap(), 0);
    }

    #[test]
    fn inverse_multiplies_to_one() {
        for &p in SUPPORTED_PRIMES.iter() {
            let w = gen(p, 3);
            // x = ω^2 + p·ω + 1 is a unit.
            let x = w
                .mul(&w)
                .add(&w.shift(1))
                .add(&UnramifiedElement::one(p, 3, PREC));
            let xi = x.inv().unwrap();
            let prod = x.mul(&xi);
            let one = UnramifiedElement::one(p, 3, PREC);
            assert!(
                prod.congruent_mod(&one, PREC as i64 - 1).unwrap(),
                "x * x^{{-1}} = 1 for p={p}"
            );
        }
    }

    #[test]
    fn inverse_of_non_unit_scales_correctly() {
        let p = 5;
        let w = gen(p, 2);
        let x = w.shift(2); // valuation 2
        let xi = x.inv().unwrap();
        assert_eq!(xi.vlb(), -2);
        let prod = x.mul(&xi);
        assert!(prod
            .congruent_mod(&UnramifiedElement::one(p, 2, PREC), (PREC - 1) as i64)
            .unwrap());
    }

    #[test]
    fn frobenius_reduces_to_residue_frobenius() {
        for &p in SUPPORTED_PRIMES.iter() {
            for &f in [2usize, 3].iter() {
                let w = gen(p, f);
                let fw = w.frobenius().unwrap();
                // Residue of φ(ω) must equal residue(ω)^p.
                let expected = w.residue().unwrap().frobenius();
                assert_eq!(fw.residue().unwrap(), expected, "p={p} f={f}");
                // And φ(ω) is again a root of h.
                let h = defining_poly(p, f).unwrap();
                let mut acc = UnramifiedElement::zero(p, f);
                for &c in h.iter().rev() {
                    acc = acc.mul(&fw);
                    if c != 0 {
                        acc = acc.add(&UnramifiedElement::one(p, f, PREC).mul_small_int(c));
                    }
                }
                assert!(acc.is_zero_mod(PREC as i64 - 2).unwrap());
            }
        }
    }

    #[test]
    fn frobenius_has_order_f_and_is_multiplicative() {
        let p = 2;
        let f = 3;
        let w = gen(p, f);
        let x = w.mul(&w).add(&UnramifiedElement::one(p, f, PREC));
        let mut y = x.clone();
        for _ in 0..f {
            y = y.frobenius().unwrap();
        }
        assert!(y.congruent_mod(&x, PREC as i64 - 3).unwrap(), "φ^f = id");
        // Multiplicativity.
        let a = w.clone();
        let b = x.clone();
        let lhs = a.mul(&b).frobenius().unwrap();
        let rhs = a.frobenius().unwrap().mul(&b.frobenius().unwrap());
        assert!(lhs.congruent_mod(&rhs, PREC as i64 - 3).unwrap());
    }

    #[test]
    fn frobenius_fixes_the_base_field() {
        let p = 5;
        let x = UnramifiedElement::from_scalar(2, PadicScalar::from_integer(p, 7, PREC));
        let y = x.frobenius().unwrap();
        assert!(y.congruent_mod(&x, PREC as i64 - 1).unwrap());
    }

    #[test]
    fn trace_of_generator_matches_defining_polynomial() {
        // For monic h of degree f, trace(ω) = -(coefficient of x^{f-1}).
        let p = 3;
        let f = 2;
        let w = gen(p, f);
        let tr = w.trace().unwrap();
        // h = x^2 + 1 for p = 3: trace(ω) = 0.
        assert!(tr.is_zero_mod((PREC - 2) as i64).unwrap());
    }

    #[test]
    fn base_rational_certification_rejects_generic_elements() {
        let p = 3;
        let w = gen(p, 2);
        assert!(w.expect_base_rational().is_err());
        let x = UnramifiedElement::from_scalar(2, PadicScalar::from_integer(p, 4, PREC));
        assert_eq!(x.expect_base_rational().unwrap().unit_residue().unwrap(), 1);
    }
}
