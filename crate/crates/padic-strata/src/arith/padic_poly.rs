//! Polynomials over `Q_p` with precision tracking, and Hensel lifting.
//!
//! Hensel lifting takes a monic integral polynomial together with a
//! factorization of its reduction into pairwise coprime monic factors over
//! `GF(p)`, and lifts it to a factorization at the full working precision by
//! quadratic iteration with Bezout updates. Factors that are not pairwise
//! coprime are rejected with [`Error::NonCoprimeFactors`].

use crate::arith::fq::FqElem;
use crate::arith::padic::PadicScalar;
use crate::arith::residue_poly::ResiduePoly;
use crate::error::{Error, Result};

/// A dense polynomial over `Q_p`.
#[derive(Debug, Clone)]
pub struct PadicPoly {
    p: u64,
    /// Coefficient of `x^i` at index `i`. Trailing *exact* zeros are trimmed;
    /// trailing zero-at-precision coefficients are kept (the apparent degree
    /// is a statement at working precision).
    coeffs: Vec<PadicScalar>,
}

impl PadicPoly {
    pub fn zero(p: u64) -> Self {
        PadicPoly { p, coeffs: vec![] }
    }

    pub fn one(p: u64, prec: u32) -> Self {
        PadicPoly { p, coeffs: vec![PadicScalar::one(p, prec)] }
    }

    pub fn x(p: u64, prec: u32) -> Self {
        PadicPoly {
            p,
            coeffs: vec![PadicScalar::exact_zero(p), PadicScalar::one(p, prec)],
        }
    }

    pub fn from_coeffs(p: u64, coeffs: Vec<PadicScalar>) -> Self {
        let mut poly = PadicPoly { p, coeffs };
        poly.trim();
        poly
    }

    pub fn from_integer_coeffs(p: u64, coeffs: &[i64], prec: u32) -> Self {
        Self::from_coeffs(
            p,
            coeffs
                .iter()
                .map(|&c| PadicScalar::from_integer(p, c, prec))
                .collect(),
        )
    }

    /// Lift a residue polynomial (over the prime field) coefficientwise with
    /// exact small-integer representatives.
    pub fn lift_residue(rp: &ResiduePoly, prec: u32) -> Self {
        assert_eq!(rp.field_degree(), 1, "lift from the prime residue field");
        Self::from_coeffs(
            rp.p(),
            rp.coeffs()
                .iter()
                .map(|c| PadicScalar::from_integer(rp.p(), c.coords()[0] as i64, prec))
                .collect(),
        )
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_exact_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[PadicScalar] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> PadicScalar {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| PadicScalar::exact_zero(self.p))
    }

    /// Apparent degree at working precision (`None` for the zero polynomial).
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading(&self) -> Option<&PadicScalar> {
        self.coeffs.last()
    }

    /// True iff the leading coefficient is provably a unit congruent to 1.
    pub fn is_monic_at(&self, k: i64) -> bool {
        match self.leading() {
            Some(c) => c
                .sub(&PadicScalar::one(self.p, 1))
                .is_zero_mod(k)
                .unwrap_or(false),
            None => false,
        }
    }

    /// True iff every coefficient is provably integral.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.vlb() >= 0)
    }

    /// Minimum absolute precision over the (non-exact) coefficients.
    pub fn abs_prec(&self) -> i64 {
        self.coeffs.iter().map(|c| c.abs_prec()).min().unwrap_or(i64::MAX)
    }

    pub fn add(&self, other: &PadicPoly) -> Self {
        assert_eq!(self.p, other.p);
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs(self.p, (0..n).map(|i| self.coeff(i).add(&other.coeff(i))).collect())
    }

    pub fn neg(&self) -> Self {
        PadicPoly {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn sub(&self, other: &PadicPoly) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PadicPoly) -> Self {
        assert_eq!(self.p, other.p);
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero(self.p);
        }
        let mut coeffs =
            vec![PadicScalar::exact_zero(self.p); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Self::from_coeffs(self.p, coeffs)
    }

    pub fn scale(&self, c: &PadicScalar) -> Self {
        Self::from_coeffs(self.p, self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero(self.p);
        }
        Self::from_coeffs(
            self.p,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.mul_small_int(i as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &PadicScalar) -> PadicScalar {
        let mut acc = PadicScalar::exact_zero(self.p);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// Division with remainder by a polynomial whose leading coefficient is a
    /// certified unit (e.g. monic divisors).
    pub fn div_rem_unit_lead(&self, div: &PadicPoly) -> Result<(Self, Self)> {
        assert_eq!(self.p, div.p);
        let dd = div
            .degree()
            .ok_or_else(|| Error::InvalidParameter("division by zero polynomial".into()))?;
        let lead = div.leading().expect("nonzero");
        let lead_inv = lead.inv().map_err(|_| {
            Error::InsufficientPrecision("divisor leading coefficient is not a certified unit".into())
        })?;
        let mut rem: Vec<PadicScalar> = self.coeffs.clone();
        let n = rem.len();
        if n <= dd {
            return Ok((Self::zero(self.p), self.clone()));
        }
        let mut quo = vec![PadicScalar::exact_zero(self.p); n - dd];
        for k in (dd..n).rev() {
            let c = rem[k].mul(&lead_inv);
            if c.is_exact_zero() {
                continue;
            }
            quo[k - dd] = c.clone();
            for (j, b) in div.coeffs.iter().enumerate() {
                rem[k - dd + j] = rem[k - dd + j].sub(&c.mul(b));
            }
        }
        rem.truncate(dd);
        Ok((
            Self::from_coeffs(self.p, quo),
            Self::from_coeffs(self.p, rem),
        ))
    }

    /// Reduce modulo `p` to a residue polynomial over `GF(p)` (requires
    /// certified integral coefficients with at least one known digit).
    pub fn reduce_mod_p(&self) -> Result<ResiduePoly> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            if c.vlb() < 0 {
                if c.has_exact_valuation() {
                    return Err(Error::NotIntegral(
                        "coefficient has negative valuation".into(),
                    ));
                }
                return Err(Error::InsufficientPrecision(
                    "coefficient integrality is not certified".into(),
                ));
            }
            coeffs.push(FqElem::from_prime(self.p, 1, c.digit(0)?));
        }
        Ok(ResiduePoly::from_coeffs(self.p, 1, coeffs))
    }

    /// The transformed polynomial `p^{-n w} f(p^w y)` in the variable `y`
    /// (for monic `f` of degree `n`, again monic): shifts a Newton-polygon
    /// slope by `-w`.
    pub fn substitute_scaled(&self, w: i64) -> Self {
        let n = match self.degree() {
            Some(n) => n as i64,
            None => return self.clone(),
        };
        Self::from_coeffs(
            self.p,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c.shift(w * (i as i64 - n)))
                .collect(),
        )
    }

    /// Truncate every coefficient to absolute precision `k`.
    pub fn reduce_abs(&self, k: i64) -> Self {
        Self::from_coeffs(self.p, self.coeffs.iter().map(|c| c.reduce_abs(k)).collect())
    }

    /// Decide whether every coefficient is `≡ 0 (mod p^k)`.
    pub fn is_zero_mod(&self, k: i64) -> Result<bool> {
        for c in &self.coeffs {
            if !c.is_zero_mod(k)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn congruent_mod(&self, other: &PadicPoly, k: i64) -> Result<bool> {
        self.sub(other).is_zero_mod(k)
    }

    // ------------------------------------------------------------------
    // Hensel lifting
    // ------------------------------------------------------------------

    /// Lift a residue factorization of a monic integral polynomial to the
    /// working absolute precision.
    ///
    /// `residue_factors` must be monic, pairwise coprime over `GF(p)`, with
    /// product equal to the reduction of `self`. The returned factors are
    /// monic, integral, congruent to their residues, and multiply to `self`
    /// modulo `p^N` where `N` is the working precision (the minimum absolute
    /// coefficient precision of `self`).
    pub fn hensel_lift(&self, residue_factors: &[ResiduePoly]) -> Result<Vec<PadicPoly>> {
        let n = self
            .degree()
            .ok_or_else(|| Error::InvalidParameter("Hensel lift of zero polynomial".into()))?;
        if !self.is_integral() {
            return Err(Error::NotIntegral("Hensel lifting needs integral input".into()));
        }
        if !self.is_monic_at(1) {
            return Err(Error::InvalidParameter("Hensel lifting needs monic input".into()));
        }
        let target = self.abs_prec();
        if target < 1 {
            return Err(Error::InsufficientPrecision(
                "no certified digits to lift against".into(),
            ));
        }
        // Validate the residue data.
        let fbar = self.reduce_mod_p()?;
        let mut prod = ResiduePoly::one(self.p, 1);
        for g in residue_factors {
            if !g.is_monic() {
                return Err(Error::InvalidParameter("residue factors must be monic".into()));
            }
            prod = prod.mul(g);
        }
        if prod != fbar {
            return Err(Error::InvalidParameter(
                "residue factors do not multiply to the reduction".into(),
            ));
        }
        for i in 0..residue_factors.len() {
            for j in i + 1..residue_factors.len() {
                let g = residue_factors[i].gcd(&residue_factors[j])?;
                if g.degree() != Some(0) {
                    return Err(Error::NonCoprimeFactors(format!(
                        "residue factors {i} and {j} share a common factor"
                    )));
                }
            }
        }
        let _ = n;
        // Fold: lift (first, product of rest), recurse into the rest.
        let mut out = Vec::with_capacity(residue_factors.len());
        let mut current = self.clone();
        let mut remaining: Vec<ResiduePoly> = residue_factors.to_vec();
        while remaining.len() > 1 {
            let g_bar = remaining.remove(0);
            if g_bar.degree() == Some(0) {
                continue;
            }
            let mut h_bar = ResiduePoly::one(self.p, 1);
            for r in &remaining {
                h_bar = h_bar.mul(r);
            }
            let (g, h) = lift_two_factors(&current, &g_bar, &h_bar, target)?;
            out.push(g);
            current = h;
        }
        out.push(current);
        Ok(out)
    }
}

/// Drop coefficients above `deg` after certifying they vanish modulo `p^k`
/// (sound at lifting level `k`: the discarded tail is `≡ 0 (mod p^k)`).
fn truncate_degree_checked(poly: &PadicPoly, deg: usize, k: i64) -> Result<PadicPoly> {
    if poly.coeffs().len() <= deg + 1 {
        return Ok(poly.clone());
    }
    for c in poly.coeffs().iter().skip(deg + 1) {
        if !c.is_zero_mod(k)? {
            return Err(Error::InvalidParameter(
                "cofactor degree overflow in Hensel step".into(),
            ));
        }
    }
    Ok(PadicPoly::from_coeffs(
        poly.p(),
        poly.coeffs()[..=deg].to_vec(),
    ))
}

/// Quadratic Hensel lift of a two-factor coprime residue factorization.
fn lift_two_factors(
    f: &PadicPoly,
    g_bar: &ResiduePoly,
    h_bar: &ResiduePoly,
    target: i64,
) -> Result<(PadicPoly, PadicPoly)> {
    let p = f.p();
    let prec = target.max(1) as u32;
    let (gcd, u_bar, v_bar) = g_bar.xgcd(h_bar)?;
    if !gcd.is_one() {
        return Err(Error::NonCoprimeFactors(
            "two-factor lift requires coprime residues".into(),
        ));
    }
    let mut g = PadicPoly::lift_residue(g_bar, prec);
    let mut h = PadicPoly::lift_residue(h_bar, prec);
    // Bezout witnesses: u g + v h ≡ 1 (mod p).
    let mut u = PadicPoly::lift_residue(&u_bar, prec);
    let mut v = PadicPoly::lift_residue(&v_bar, prec);

    let h_deg = h_bar.degree().expect("nonzero cofactor");
    let mut k: i64 = 1;
    while k < target {
        let level = (2 * k).min(target);
        // Representatives are carried at full working precision; `level` is
        // the depth to which the factorization is mathematically valid after
        // this step (truncations at `level` are re-corrected later).
        let e = f.sub(&g.mul(&h)).reduce_abs(target);
        let (q, r) = v.mul(&e).div_rem_unit_lead(&g)?;
        let g_next = g.add(&r).reduce_abs(target);
        let h_next = truncate_degree_checked(
            &h.add(&u.mul(&e)).add(&q.mul(&h)).reduce_abs(target),
            h_deg,
            level,
        )?;
        // Bezout update: b = u g + v h - 1 ≡ 0 (mod p^k).
        let b = u
            .mul(&g_next)
            .add(&v.mul(&h_next))
            .sub(&PadicPoly::one(p, prec))
            .reduce_abs(target);
        let (q2, r2) = v.mul(&b).div_rem_unit_lead(&g_next)?;
        let v_next = v.sub(&r2).reduce_abs(target);
        let u_next = u.sub(&u.mul(&b)).sub(&q2.mul(&h_next)).reduce_abs(target);
        g = g_next;
        h = h_next;
        // Keep the Bezout pair at controlled degrees: v mod g (and the
        // matching correction on u) preserves u g + v h exactly.
        let (qv, v_red) = v_next.div_rem_unit_lead(&g)?;
        u = u_next.add(&qv.mul(&h)).reduce_abs(target);
        v = v_red.reduce_abs(target);
        k *= 2;
    }
    // Certify the result at the working precision.
    if !f.sub(&g.mul(&h)).is_zero_mod(target)? {
        return Err(Error::InsufficientPrecision(
            "Hensel iteration failed to certify the factorization".into(),
        ));
    }
    Ok((g, h))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PREC: u32 = 20;

    fn ip(p: u64, cs: &[i64]) -> PadicPoly {
        PadicPoly::from_integer_coeffs(p, cs, PREC)
    }

    #[test]
    fn division_reconstructs() {
        let a = ip(3, &[1, 0, 2, 1]); // x^3 + 2x^2 + 1
        let b = ip(3, &[1, 1]); // x + 1
        let (q, r) = a.div_rem_unit_lead(&b).unwrap();
        let back = q.mul(&b).add(&r);
        assert!(back.congruent_mod(&a, 18).unwrap());
        assert!(r.degree().map_or(true, |d| d == 0));
    }

    #[test]
    fn reduction_mod_p_requires_integrality() {
        let ok = ip(5, &[10, 3, 1]);
        let rp = ok.reduce_mod_p().unwrap();
        assert_eq!(rp.coeff(0).coords()[0], 0);
        assert_eq!(rp.coeff(1).coords()[0], 3);
        let bad = PadicPoly::from_coeffs(
            5,
            vec![PadicScalar::from_rational(
                5,
                &num_bigint::BigInt::from(1),
                &num_bigint::BigInt::from(5),
                PREC,
            )
            .unwrap()],
        );
        assert!(matches!(bad.reduce_mod_p(), Err(Error::NotIntegral(_))));
    }

    #[test]
    fn hensel_lift_splits_x2_minus_unit_square() {
        // x^2 - 4 over Q_3 factors as (x-2)(x+2); residues x+1 and x+2 mod 3.
        let f = ip(3, &[-4, 0, 1]);
        let r1 = ResiduePoly::from_prime_coeffs(3, 1, &[1, 1]); // x + 1 ≡ x - 2
        let r2 = ResiduePoly::from_prime_coeffs(3, 1, &[2, 1]); // x + 2
        let factors = f.hensel_lift(&[r1, r2]).unwrap();
        assert_eq!(factors.len(), 2);
        let prod = factors[0].mul(&factors[1]);
        assert!(prod.congruent_mod(&f, PREC as i64).unwrap());
        // One factor must be x - 2 mod 3^18.
        let target = ip(3, &[-2, 1]);
        let matches_first = factors[0].congruent_mod(&target, 18).unwrap();
        let matches_second = factors[1].congruent_mod(&target, 18).unwrap();
        assert!(matches_first || matches_second);
    }

    #[test]
    fn hensel_lift_three_factors() {
        // (x-1)(x-2)(x-4) over Q_7: distinct residues 1, 2, 4 mod 7.
        let f = ip(7, &[-8, 14, -7, 1]);
        let rs: Vec<ResiduePoly> = [6u64, 5, 3] // x - 1 = x + 6, x - 2 = x + 5, x - 4 = x + 3
            .iter()
            .map(|&c| ResiduePoly::from_prime_coeffs(7, 1, &[c, 1]))
            .collect();
        let factors = f.hensel_lift(&rs).unwrap();
        assert_eq!(factors.len(), 3);
        let prod = factors[0].mul(&factors[1]).mul(&factors[2]);
        assert!(prod.congruent_mod(&f, PREC as i64).unwrap());
        for (fac, root) in factors.iter().zip([1i64, 2, 4]) {
            let x = PadicScalar::from_integer(7, root, PREC);
            assert!(fac.eval(&x).is_zero_mod(18).unwrap());
        }
    }

    #[test]
    fn hensel_lift_rejects_non_coprime_residues() {
        let f = ip(3, &[0, 0, 1]); // x^2
        let r = ResiduePoly::from_prime_coeffs(3, 1, &[0, 1]); // x
        let err = f.hensel_lift(&[r.clone(), r]);
        assert!(matches!(err, Err(Error::NonCoprimeFactors(_))));
    }

    #[test]
    fn hensel_lift_with_inert_quadratic_factor() {
        // (x^2 + 1)(x - 1) over Q_3: x^2 + 1 irreducible mod 3.
        let f = ip(3, &[-1, 1, -1, 1]);
        let r1 = ResiduePoly::from_prime_coeffs(3, 1, &[1, 0, 1]);
        let r2 = ResiduePoly::from_prime_coeffs(3, 1, &[2, 1]);
        let factors = f.hensel_lift(&[r1, r2]).unwrap();
        let prod = factors[0].mul(&factors[1]);
        assert!(prod.congruent_mod(&f, PREC as i64).unwrap());
        assert!(factors[0].congruent_mod(&ip(3, &[1, 0, 1]), 18).unwrap());
        assert!(factors[1].congruent_mod(&ip(3, &[-1, 1]), 18).unwrap());
    }

    #[test]
    fn substitute_scaled_shifts_valuations() {
        // f = x^2 - p^2: roots of valuation 1; after w=1 transform, y^2 - 1.
        let f = ip(5, &[-25, 0, 1]);
        let g = f.substitute_scaled(1);
        assert!(g.congruent_mod(&ip(5, &[-1, 0, 1]), 15).unwrap());
    }
}
