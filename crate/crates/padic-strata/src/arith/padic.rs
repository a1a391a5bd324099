//! Precision-tracked scalars of the p-adic field `F = Q_p`.
//!
//! A [`PadicScalar`] represents an element `x = value * p^floor` whose
//! `value` part is known modulo `p^prec`. Equivalently, `x` is known modulo
//! `p^(floor + prec)` and satisfies `v_p(x) >= floor`. Every arithmetic
//! operation propagates the *provable minimum* precision of the result; no
//! operation ever reports more digits than the inputs justify.
//!
//! Normal form. After every operation a scalar is in exactly one of three
//! states:
//!
//! * **exact zero** — the mathematical `0`, of infinite valuation;
//! * **unit form** — `value` is a p-adic unit known to `prec >= 1` digits,
//!   so the valuation is *exactly* `floor`;
//! * **unknown form** — `value = 0` with `prec = 0`: nothing is known except
//!   `v_p(x) >= floor`. This arises from cancellation, e.g. `x - x` at finite
//!   precision.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Sentinel relative precision marking an exact zero.
const PREC_EXACT: u32 = u32::MAX;

/// `p^e` as a `BigUint`.
pub(crate) fn p_pow(p: u64, e: u32) -> BigUint {
    BigUint::from(p).pow(e)
}

/// The exact p-adic valuation of a nonzero `BigUint`, capped at `cap`.
fn val_of(value: &BigUint, p: u64, cap: u32) -> u32 {
    if value.is_zero() {
        return cap;
    }
    let pb = BigUint::from(p);
    let mut v = 0u32;
    let mut cur = value.clone();
    while v < cap {
        let (q, r) = cur.div_rem(&pb);
        if !r.is_zero() {
            break;
        }
        cur = q;
        v += 1;
    }
    v
}

/// Inverse of a unit modulo `p^e` via the extended Euclidean algorithm.
pub(crate) fn inv_mod_ppow(value: &BigUint, p: u64, e: u32) -> Result<BigUint> {
    let modulus = BigInt::from(p_pow(p, e));
    let a = BigInt::from(value.clone());
    let g = a.extended_gcd(&modulus);
    if !g.gcd.is_one() {
        return Err(Error::NotInvertible(format!(
            "value shares a factor with p^{e}"
        )));
    }
    let mut x = g.x % &modulus;
    if x.is_negative() {
        x += &modulus;
    }
    Ok(x.to_biguint().expect("reduced representative is nonnegative"))
}

/// A precision-tracked element of `Q_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicScalar {
    /// The residue characteristic.
    p: u64,
    /// Valuation floor: the scalar is `value * p^floor`.
    floor: i64,
    /// Unit part, reduced modulo `p^prec`; `0` in unknown/exact-zero form.
    value: BigUint,
    /// Relative precision: number of certified base-p digits of `value`.
    prec: u32,
}

impl PadicScalar {
    // ------------------------------------------------------------------
    // Constructors
    // ------------------------------------------------------------------

    /// The exact zero of `Q_p` (infinite valuation).
    pub fn exact_zero(p: u64) -> Self {
        PadicScalar { p, floor: 0, value: BigUint::zero(), prec: PREC_EXACT }
    }

    /// A scalar about which nothing is known except `v_p(x) >= floor`.
    pub fn unknown(p: u64, floor: i64) -> Self {
        PadicScalar { p, floor, value: BigUint::zero(), prec: 0 }
    }

    /// Build from an integer, known to `prec` relative digits.
    pub fn from_integer(p: u64, n: i64, prec: u32) -> Self {
        Self::from_bigint(p, &BigInt::from(n), prec)
    }

    /// Build from a `BigInt`, known to `prec` relative digits.
    pub fn from_bigint(p: u64, n: &BigInt, prec: u32) -> Self {
        if n.is_zero() {
            return Self::exact_zero(p);
        }
        let (sign, mag) = (n.sign(), n.magnitude().clone());
        let v = val_of(&mag, p, u32::MAX - 1);
        let unit = mag / p_pow(p, v);
        let modulus = p_pow(p, prec.max(1));
        let mut value = unit % &modulus;
        if sign == Sign::Minus && !value.is_zero() {
            value = &modulus - value;
        } else if sign == Sign::Minus {
            value = BigUint::zero();
        }
        PadicScalar { p, floor: v as i64, value, prec: prec.max(1) }.normalized()
    }

    /// Build the exact rational `num/den` to `prec` relative digits.
    ///
    /// `den` must be nonzero. The valuation of the result is computed exactly
    /// as `v_p(num) - v_p(den)`.
    pub fn from_rational(p: u64, num: &BigInt, den: &BigInt, prec: u32) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        if num.is_zero() {
            return Ok(Self::exact_zero(p));
        }
        let nv = val_of(num.magnitude(), p, u32::MAX - 1);
        let dv = val_of(den.magnitude(), p, u32::MAX - 1);
        let nunit = num.magnitude() / p_pow(p, nv);
        let dunit = den.magnitude() / p_pow(p, dv);
        let prec = prec.max(1);
        let modulus = p_pow(p, prec);
        let dinv = inv_mod_ppow(&(dunit % &modulus), p, prec)?;
        let mut value = (nunit % &modulus) * dinv % &modulus;
        if (num.sign() == Sign::Minus) != (den.sign() == Sign::Minus) && !value.is_zero() {
            value = &modulus - value;
        }
        Ok(PadicScalar {
            p,
            floor: nv as i64 - dv as i64,
            value,
            prec,
        }
        .normalized())
    }

    /// The multiplicative unit, known to `prec` digits.
    pub fn one(p: u64, prec: u32) -> Self {
        PadicScalar { p, floor: 0, value: BigUint::one(), prec: prec.max(1) }
    }

    /// `p^k`, known to `prec` relative digits.
    pub fn p_power(p: u64, k: i64, prec: u32) -> Self {
        PadicScalar { p, floor: k, value: BigUint::one(), prec: prec.max(1) }
    }

    /// Rebuild from raw parts: `value * p^floor` with `value` known modulo
    /// `p^prec` (value need not be a unit; the result is normalized).
    pub fn from_parts(p: u64, floor: i64, value: BigUint, prec: u32) -> Self {
        let modulus = p_pow(p, prec);
        let value = if prec == 0 { BigUint::zero() } else { value % modulus };
        PadicScalar { p, floor, value, prec }.normalized()
    }

    // ------------------------------------------------------------------
    // Normal form and basic observers
    // ------------------------------------------------------------------

    /// Restore the normal-form invariant.
    fn normalized(mut self) -> Self {
        if self.prec == PREC_EXACT {
            debug_assert!(self.value.is_zero());
            self.floor = 0;
            return self;
        }
        if self.value.is_zero() {
            // All prec digits vanish: only v >= floor + prec is known.
            self.floor += self.prec as i64;
            self.prec = 0;
            return self;
        }
        let v = val_of(&self.value, self.p, self.prec);
        if v >= self.prec {
            self.floor += self.prec as i64;
            self.prec = 0;
            self.value = BigUint::zero();
        } else if v > 0 {
            self.value /= p_pow(self.p, v);
            self.floor += v as i64;
            self.prec -= v;
        }
        self
    }

    /// The residue characteristic.
    pub fn p(&self) -> u64 {
        self.p
    }

    /// True iff this is the mathematical zero (infinite valuation).
    pub fn is_exact_zero(&self) -> bool {
        self.prec == PREC_EXACT
    }

    /// True iff nothing but a valuation bound is known.
    pub fn is_unknown(&self) -> bool {
        self.prec == 0
    }

    /// True iff the valuation is exactly determined (unit form).
    pub fn has_exact_valuation(&self) -> bool {
        self.prec >= 1 && self.prec != PREC_EXACT
    }

    /// Valuation lower bound. `i64::MAX` for the exact zero.
    pub fn vlb(&self) -> i64 {
        if self.is_exact_zero() {
            i64::MAX
        } else {
            self.floor
        }
    }

    /// Absolute precision: the scalar is known modulo `p^abs_prec()`.
    /// `i64::MAX` for the exact zero.
    pub fn abs_prec(&self) -> i64 {
        if self.is_exact_zero() {
            i64::MAX
        } else {
            self.floor + self.prec as i64
        }
    }

    /// Relative precision (certified digits of the unit part).
    pub fn rel_prec(&self) -> u32 {
        if self.is_exact_zero() {
            PREC_EXACT
        } else {
            self.prec
        }
    }

    /// The exact valuation, if determined.
    ///
    /// Errors with [`Error::IndeterminateValuation`] in unknown form and for
    /// the exact zero (whose valuation is infinite, not an integer).
    pub fn valuation(&self) -> Result<i64> {
        if self.is_exact_zero() {
            Err(Error::IndeterminateValuation(
                "exact zero has infinite valuation".into(),
            ))
        } else if self.prec == 0 {
            Err(Error::IndeterminateValuation(format!(
                "only v >= {} is known at this precision",
                self.floor
            )))
        } else {
            Ok(self.floor)
        }
    }

    /// Decide `x ≡ 0 (mod p^k)`.
    ///
    /// Errors with [`Error::InsufficientPrecision`] when the known digits do
    /// not determine the answer.
    pub fn is_zero_mod(&self, k: i64) -> Result<bool> {
        if self.is_exact_zero() {
            return Ok(true);
        }
        if self.prec >= 1 {
            // Valuation is exactly floor.
            return Ok(self.floor >= k);
        }
        if self.floor >= k {
            Ok(true)
        } else {
            Err(Error::InsufficientPrecision(format!(
                "cannot decide x ≡ 0 mod p^{k} knowing only v(x) >= {}",
                self.floor
            )))
        }
    }

    /// Decide congruence with `other` modulo `p^k`.
    pub fn congruent_mod(&self, other: &PadicScalar, k: i64) -> Result<bool> {
        self.sub(other).is_zero_mod(k)
    }

    /// The base-p digit of `x` at `p^k` (in `0..p`).
    ///
    /// Requires `abs_prec() > k`; digits below the valuation floor are zero.
    pub fn digit(&self, k: i64) -> Result<u64> {
        if self.is_exact_zero() {
            return Ok(0);
        }
        if k < self.floor {
            return Ok(0);
        }
        if k >= self.abs_prec() {
            return Err(Error::InsufficientPrecision(format!(
                "digit at p^{k} requested but absolute precision is {}",
                self.abs_prec()
            )));
        }
        let shift = (k - self.floor) as u32;
        let d = (&self.value / p_pow(self.p, shift)) % BigUint::from(self.p);
        Ok(d.to_u64_digits().first().copied().unwrap_or(0))
    }

    /// The residue of `x * p^{-scale}` modulo `p^modexp`, as an exact
    /// `BigUint` in `[0, p^modexp)`.
    ///
    /// This is the bridge into the exact linear-algebra layer. It requires
    /// `x * p^{-scale}` to be provably integral and known modulo `p^modexp`.
    pub fn scaled_residue(&self, scale: i64, modexp: u32) -> Result<BigUint> {
        if self.is_exact_zero() {
            return Ok(BigUint::zero());
        }
        if self.floor < scale {
            if self.prec >= 1 {
                return Err(Error::NotIntegral(format!(
                    "valuation {} < required scale {scale}",
                    self.floor
                )));
            }
            return Err(Error::InsufficientPrecision(format!(
                "integrality at scale {scale} not certified (v >= {})",
                self.floor
            )));
        }
        if self.abs_prec() < scale + modexp as i64 {
            return Err(Error::InsufficientPrecision(format!(
                "need abs precision {} but have {}",
                scale + modexp as i64,
                self.abs_prec()
            )));
        }
        let shift = (self.floor - scale) as u32;
        Ok(&self.value * p_pow(self.p, shift) % p_pow(self.p, modexp))
    }

    /// The canonical rational representative of the fractional part of `x`
    /// (the class of `x` in `Q_p / Z_p`), in `[0, 1)`.
    ///
    /// Requires `abs_prec() >= 0` so the class is determined.
    pub fn fractional_part(&self) -> Result<BigRational> {
        if self.is_exact_zero() {
            return Ok(BigRational::zero());
        }
        if self.abs_prec() < 0 {
            return Err(Error::InsufficientPrecision(
                "fractional part needs absolute precision >= 0".into(),
            ));
        }
        if self.floor >= 0 {
            return Ok(BigRational::zero());
        }
        let denexp = (-self.floor) as u32;
        let den = p_pow(self.p, denexp);
        let numer = &self.value % &den;
        Ok(BigRational::new(BigInt::from(numer), BigInt::from(den)))
    }

    // ------------------------------------------------------------------
    // Arithmetic
    // ------------------------------------------------------------------

    fn assert_same_p(&self, other: &PadicScalar) {
        assert_eq!(self.p, other.p, "mixed residue characteristics");
    }

    /// Negation (precision preserved).
    pub fn neg(&self) -> Self {
        if self.is_exact_zero() || self.prec == 0 {
            return self.clone();
        }
        let modulus = p_pow(self.p, self.prec);
        let value = if self.value.is_zero() {
            BigUint::zero()
        } else {
            &modulus - &self.value
        };
        PadicScalar { p: self.p, floor: self.floor, value, prec: self.prec }
    }

    /// Sum, at the provable minimum precision.
    pub fn add(&self, other: &PadicScalar) -> Self {
        self.assert_same_p(other);
        if self.is_exact_zero() {
            return other.clone();
        }
        if other.is_exact_zero() {
            return self.clone();
        }
        let abs = self.abs_prec().min(other.abs_prec());
        let floor = self.floor.min(other.floor);
        if abs <= floor {
            return Self::unknown(self.p, floor);
        }
        let prec = (abs - floor) as u32;
        let modulus = p_pow(self.p, prec);
        let a = &self.value * p_pow(self.p, (self.floor - floor) as u32) % &modulus;
        let b = &other.value * p_pow(self.p, (other.floor - floor) as u32) % &modulus;
        let value = (a + b) % &modulus;
        PadicScalar { p: self.p, floor, value, prec }.normalized()
    }

    /// Difference, at the provable minimum precision.
    pub fn sub(&self, other: &PadicScalar) -> Self {
        self.add(&other.neg())
    }

    /// Product, at the provable minimum precision.
    pub fn mul(&self, other: &PadicScalar) -> Self {
        self.assert_same_p(other);
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::exact_zero(self.p);
        }
        let floor = self.floor + other.floor;
        if self.prec == 0 || other.prec == 0 {
            return Self::unknown(self.p, floor);
        }
        let prec = self.prec.min(other.prec);
        let modulus = p_pow(self.p, prec);
        let value = (&self.value % &modulus) * (&other.value % &modulus) % &modulus;
        PadicScalar { p: self.p, floor, value, prec }.normalized()
    }

    /// Multiply by an exact small integer (no precision loss beyond the
    /// valuation bookkeeping: the integer is known exactly).
    pub fn mul_small_int(&self, n: i64) -> Self {
        if n == 0 {
            return Self::exact_zero(self.p);
        }
        if self.is_exact_zero() {
            return self.clone();
        }
        let nv = val_of(&BigUint::from(n.unsigned_abs()), self.p, 64);
        let floor = self.floor + nv as i64;
        if self.prec == 0 {
            return Self::unknown(self.p, floor);
        }
        let unit = BigUint::from(n.unsigned_abs()) / p_pow(self.p, nv);
        let modulus = p_pow(self.p, self.prec);
        let mut value = &self.value * (unit % &modulus) % &modulus;
        if n < 0 && !value.is_zero() {
            value = &modulus - value;
        }
        PadicScalar { p: self.p, floor, value, prec: self.prec }.normalized()
    }

    /// Multiply by `p^k` (exact, precision preserved).
    pub fn shift(&self, k: i64) -> Self {
        if self.is_exact_zero() {
            return self.clone();
        }
        let mut out = self.clone();
        out.floor += k;
        out
    }

    /// Multiplicative inverse. The relative precision is preserved.
    pub fn inv(&self) -> Result<Self> {
        if self.is_exact_zero() {
            return Err(Error::NotInvertible("exact zero".into()));
        }
        if self.prec == 0 {
            return Err(Error::IndeterminateValuation(
                "cannot invert: valuation not determined at this precision".into(),
            ));
        }
        let value = inv_mod_ppow(&self.value, self.p, self.prec)?;
        Ok(PadicScalar { p: self.p, floor: -self.floor, value, prec: self.prec })
    }

    /// Integer power; negative exponents require invertibility.
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e == 0 {
            return Ok(Self::one(self.p, self.rel_prec_or(1)));
        }
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one(self.p, base.rel_prec_or(1));
        let mut cur = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&cur);
            }
            cur = cur.mul(&cur);
            k >>= 1;
        }
        Ok(acc)
    }

    fn rel_prec_or(&self, fallback: u32) -> u32 {
        if self.is_exact_zero() || self.prec == 0 {
            fallback
        } else {
            self.prec
        }
    }

    /// Truncate to absolute precision at most `k` (forget higher digits).
    pub fn reduce_abs(&self, k: i64) -> Self {
        if self.is_exact_zero() {
            // An exact zero truncated to finite precision becomes unknown
            // beyond p^k only if the caller insists; keep exactness.
            return self.clone();
        }
        if self.abs_prec() <= k {
            return self.clone();
        }
        if k <= self.floor {
            return Self::unknown(self.p, self.floor.min(k));
        }
        let prec = (k - self.floor) as u32;
        let value = &self.value % p_pow(self.p, prec);
        PadicScalar { p: self.p, floor: self.floor, value, prec }.normalized()
    }

    /// Weaken the relative precision to at most `r` digits.
    pub fn with_rel_prec_at_most(&self, r: u32) -> Self {
        if self.is_exact_zero() || self.prec <= r {
            return self.clone();
        }
        let value = &self.value % p_pow(self.p, r);
        PadicScalar { p: self.p, floor: self.floor, value, prec: r }.normalized()
    }

    /// The unit-part residue `value mod p` (requires unit form).
    pub fn unit_residue(&self) -> Result<u64> {
        if self.has_exact_valuation() {
            let d = &self.value % BigUint::from(self.p);
            Ok(d.to_u64_digits().first().copied().unwrap_or(0))
        } else {
            Err(Error::IndeterminateValuation(
                "no unit part at this precision".into(),
            ))
        }
    }

    /// Raw unit part (reduced mod `p^prec`), for serialization.
    pub fn unit_value(&self) -> &BigUint {
        &self.value
    }
}

impl std::fmt::Display for PadicScalar {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_exact_zero() {
            return write!(fm, "0");
        }
        if self.prec == 0 {
            return write!(fm, "O({}^{})", self.p, self.floor);
        }
        write!(
            fm,
            "{}·{}^{} + O({}^{})",
            self.value,
            self.p,
            self.floor,
            self.p,
            self.abs_prec()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: u64, n: i64) -> PadicScalar {
        PadicScalar::from_integer(p, n, 12)
    }

    #[test]
    fn integer_constructor_normalizes_valuation() {
        let x = s(3, 18); // 18 = 2 * 3^2
        assert_eq!(x.valuation().unwrap(), 2);
        assert_eq!(x.unit_residue().unwrap(), 2);
        assert_eq!(x.abs_prec(), 14);
    }

    #[test]
    fn negative_integers_reduce_correctly() {
        let x = s(5, -1);
        assert_eq!(x.valuation().unwrap(), 0);
        // -1 mod 5^12 has last digit 4.
        assert_eq!(x.digit(0).unwrap(), 4);
        let y = x.add(&s(5, 1));
        assert!(y.is_exact_zero() || y.is_zero_mod(12).unwrap());
    }

    #[test]
    fn addition_tracks_cancellation_honestly() {
        let x = s(2, 7);
        let y = x.neg();
        let z = x.add(&y);
        // All certified digits cancelled: nothing is known beyond v >= abs prec.
        assert!(z.is_unknown());
        assert_eq!(z.vlb(), 12);
        assert!(z.valuation().is_err());
    }

    #[test]
    fn addition_of_different_valuations_is_exactly_valued() {
        let x = s(3, 3); // v = 1
        let y = s(3, 9); // v = 2
        let z = x.add(&y); // 12 = 3 * 4, v = 1
        assert_eq!(z.valuation().unwrap(), 1);
        assert_eq!(z.unit_residue().unwrap(), 1);
    }

    #[test]
    fn multiplication_adds_valuations_and_keeps_min_rel_prec() {
        let x = PadicScalar::from_integer(5, 50, 8); // v=2, unit 2
        let y = PadicScalar::from_integer(5, 15, 4); // v=1, unit 3
        let z = x.mul(&y);
        assert_eq!(z.valuation().unwrap(), 3);
        assert_eq!(z.rel_prec(), 4);
        assert_eq!(z.unit_residue().unwrap(), 1); // 2*3 = 6 ≡ 1 mod 5
    }

    #[test]
    fn inverse_preserves_relative_precision() {
        let x = PadicScalar::from_integer(7, 21, 6); // v=1, unit 3
        let xi = x.inv().unwrap();
        assert_eq!(xi.valuation().unwrap(), -1);
        assert_eq!(xi.rel_prec(), 6);
        let prod = x.mul(&xi);
        assert_eq!(prod.valuation().unwrap(), 0);
        assert!(prod.sub(&PadicScalar::one(7, 6)).is_zero_mod(6).unwrap());
    }

    #[test]
    fn inverting_unknown_form_is_an_error() {
        let z = PadicScalar::unknown(3, 2);
        assert!(matches!(z.inv(), Err(Error::IndeterminateValuation(_))));
    }

    #[test]
    fn from_rational_handles_denominator_valuation() {
        let x = PadicScalar::from_rational(
            3,
            &BigInt::from(2),
            &BigInt::from(9),
            10,
        )
        .unwrap();
        assert_eq!(x.valuation().unwrap(), -2);
        // 2/9 * 9 = 2
        let y = x.mul(&s(3, 9));
        assert!(y.congruent_mod(&s(3, 2), 10).unwrap());
    }

    #[test]
    fn fractional_part_is_exact_in_q_mod_z() {
        // 2/9 in Q_3: fractional part 2/9.
        let x = PadicScalar::from_rational(3, &BigInt::from(2), &BigInt::from(9), 10).unwrap();
        let f = x.fractional_part().unwrap();
        assert_eq!(f, BigRational::new(BigInt::from(2), BigInt::from(9)));
        // An integral element has fractional part 0.
        assert!(s(3, 7).fractional_part().unwrap().is_zero());
        // -1/3 has fractional part 2/3.
        let y = PadicScalar::from_rational(3, &BigInt::from(-1), &BigInt::from(3), 10).unwrap();
        assert_eq!(
            y.fractional_part().unwrap(),
            BigRational::new(BigInt::from(2), BigInt::from(3))
        );
    }

    #[test]
    fn digits_and_scaled_residues() {
        let x = PadicScalar::from_integer(2, 12, 10); // 1100 in base 2
        assert_eq!(x.digit(0).unwrap(), 0);
        assert_eq!(x.digit(1).unwrap(), 0);
        assert_eq!(x.digit(2).unwrap(), 1);
        assert_eq!(x.digit(3).unwrap(), 1);
        assert_eq!(
            x.scaled_residue(0, 8).unwrap(),
            BigUint::from(12u32)
        );
        assert_eq!(
            x.scaled_residue(2, 8).unwrap(),
            BigUint::from(3u32)
        );
        assert!(matches!(
            x.scaled_residue(3, 4),
            Err(Error::NotIntegral(_))
        ));
    }

    #[test]
    fn zero_mod_decisions_are_honest() {
        let x = s(3, 9);
        assert!(x.is_zero_mod(2).unwrap());
        assert!(!x.is_zero_mod(3).unwrap());
        let u = PadicScalar::unknown(3, 4);
        assert!(u.is_zero_mod(4).unwrap());
        assert!(matches!(
            u.is_zero_mod(5),
            Err(Error::InsufficientPrecision(_))
        ));
        assert!(PadicScalar::exact_zero(3).is_zero_mod(1_000_000).unwrap());
    }

    #[test]
    fn reduce_abs_truncates() {
        let x = PadicScalar::from_integer(5, 27, 10);
        let y = x.reduce_abs(2);
        assert_eq!(y.abs_prec(), 2);
        assert!(y.congruent_mod(&s(5, 2), 2).unwrap());
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let x = PadicScalar::from_integer(3, 5, 10);
        let mut acc = PadicScalar::one(3, 10);
        for _ in 0..7 {
            acc = acc.mul(&x);
        }
        let y = x.pow(7).unwrap();
        assert!(acc.congruent_mod(&y, 10).unwrap());
        let z = x.pow(-2).unwrap();
        let w = z.mul(&x).mul(&x);
        assert!(w.congruent_mod(&PadicScalar::one(3, 10), 10).unwrap());
    }
}
