//! Constructions that build new strata from old: direct sums (plain and
//! scaled), the †/‡ strictness constructions, restriction of scalars to `F`,
//! and unramified base change `⊗L̃`.
//!
//! *Direct sum*: for `r = r'` and equal `o_D`-periods,
//! `Δ ⊕ Δ' = [Λ⊕Λ', max(n,n'), r, β⊕β']`.  The scaled variant first
//! stretches each side by the opposite `e(Λ|E)`-factor,
//! `[e'Λ ⊕ eΛ', max(ne',n'e), max(re',r'e), β⊕β']` with
//! `e = e(Λ|E)/g`, `e' = e(Λ'|E')/g`, `g` their gcd; when the resulting
//! `o_D`-periods still disagree, both sides are stretched once more to the
//! common lcm (a stretch leaves every invariant of a stratum unchanged, it
//! only refines the indexing).
//!
//! *Dagger*: `Δ† = ⊕_{i=0}^{e(Λ|F)−1}[Λ−i, n, r, β]` is strict.  `Δ‡` uses
//! the shift sequence `s_k = k`, `k = 0..e(Λ|F)−1` — the same summands — and
//! is moreover sound for simple `Δ` (the point of ‡ is the soundness
//! guarantee, not a different construction).
//!
//! *Restriction of scalars*: `Res_F(Δ) = [Λ, n, r, β]` viewed in
//! `End_F(V) ≅ M_{md²}(F)`.  In the split basis `e_k π_D^i ω^t` the lattice
//! profile restricts to `c_{(k,i,t)}(j) = ⌈(c_k(j) − i)/d⌉` and `β` becomes
//! its scalar-restriction matrix.
//!
//! *Base change*: `Δ ⊗ L̃` for `L̃|F` unramified of degree `f̃` with
//! `L ⊆ L̃` (i.e. `d | f̃`).  The minimal polynomial of a matrix is
//! invariant under base change and the intersection conditions are rank
//! conditions (also invariant), so the classification of `Δ ⊗ L̃` is decided
//! from the factorization pattern of `μ_Δ` over `GF(p^{f̃})`: a `GF(p)`-
//! irreducible factor of degree `g` stays irreducible exactly when
//! `gcd(g, f̃) = 1`.

use num_rational::Ratio;

use crate::csa::{AMatrix, AlgebraCtx};
use crate::error::{Error, Result};
use crate::lattice::LatticeSeq;

use super::Stratum;

// ---------------------------------------------------------------------------
// Block-diagonal β
// ---------------------------------------------------------------------------

/// `a ⊕ b` as a block-diagonal matrix in the given (larger) context.
fn block_diag(ctx: &AlgebraCtx, a: &AMatrix, b: &AMatrix) -> AMatrix {
    let m1 = a.ctx().m;
    let m2 = b.ctx().m;
    debug_assert_eq!(ctx.m, m1 + m2);
    let mut out = AMatrix::zero(ctx);
    for k in 0..m1 {
        for l in 0..m1 {
            *out.at_mut(k, l) = a.at(k, l).clone();
        }
    }
    for k in 0..m2 {
        for l in 0..m2 {
            *out.at_mut(m1 + k, m1 + l) = b.at(k, l).clone();
        }
    }
    out
}

impl Stratum {
    /// `Δ ⊕ Δ' = [Λ⊕Λ', max(n,n'), r, β⊕β']`; requires `r = r'` and equal
    /// `o_D`-periods.
    pub fn direct_sum(&self, other: &Stratum) -> Result<Stratum> {
        let (c1, c2) = (self.ctx(), other.ctx());
        if c1.p != c2.p || c1.d != c2.d {
            return Err(Error::InvalidParameter(
                "direct sum requires the same division algebra".into(),
            ));
        }
        if self.r() != other.r() {
            return Err(Error::InvalidParameter(format!(
                "direct sum requires r = r' (got {} and {})",
                self.r(),
                other.r()
            )));
        }
        if self.lat().e_d() != other.lat().e_d() {
            return Err(Error::PeriodMismatch(format!(
                "o_D-periods differ: {} vs {}; use the scaled sum",
                self.lat().e_d(),
                other.lat().e_d()
            )));
        }
        let lat = self.lat().direct_sum(other.lat())?;
        let beta = block_diag(lat.ctx(), self.beta(), other.beta());
        Stratum::new(lat, self.n().max(other.n()), self.r(), beta)
    }

    /// The scaled direct sum `[e'Λ ⊕ eΛ', max(ne',n'e), max(re',r'e), β⊕β']`
    /// with `e = e(Λ|E)/g`, `e' = e(Λ'|E')/g`; requires both splittings to
    /// certify (for the `e(Λ|E)` data).
    pub fn direct_sum_scaled(&self, other: &Stratum) -> Result<Stratum> {
        let (c1, c2) = (self.ctx(), other.ctx());
        if c1.p != c2.p || c1.d != c2.d {
            return Err(Error::InvalidParameter(
                "direct sum requires the same division algebra".into(),
            ));
        }
        let ee1 = self.splitting()?.e_lambda_e(self.lat().e_f());
        let ee2 = other.splitting()?.e_lambda_e(other.lat().e_f());
        let g = num_integer::gcd(ee1, ee2);
        let (e, e_prime) = (ee1 / g, ee2 / g);
        let mut lat1 = self.lat().rescale_period(e_prime as usize)?;
        let mut lat2 = other.lat().rescale_period(e as usize)?;
        let (mut n1, mut r1) = (self.n() * e_prime, self.r() * e_prime);
        let (mut n2, mut r2) = (other.n() * e, other.r() * e);
        // Equalize the o_D-periods by a final common stretch.
        let lcm = num_integer::lcm(lat1.e_d(), lat2.e_d());
        let (k1, k2) = (lcm / lat1.e_d(), lcm / lat2.e_d());
        if k1 > 1 {
            lat1 = lat1.rescale_period(k1)?;
            n1 *= k1 as i64;
            r1 *= k1 as i64;
        }
        if k2 > 1 {
            lat2 = lat2.rescale_period(k2)?;
            n2 *= k2 as i64;
            r2 *= k2 as i64;
        }
        let lat = lat1.direct_sum(&lat2)?;
        let beta = block_diag(lat.ctx(), self.beta(), other.beta());
        Stratum::new(lat, n1.max(n2), r1.max(r2), beta)
    }

    /// `Δ† = ⊕_{i=0}^{e(Λ|F)−1} [Λ−i, n, r, β]` — a strict stratum.
    pub fn dagger(&self) -> Result<Stratum> {
        let e_f = self.lat().e_f();
        let mut acc = Stratum::new(
            self.lat().clone(),
            self.n(),
            self.r(),
            self.beta().clone(),
        )?;
        for i in 1..e_f {
            let summand = Stratum::new(
                self.lat().translate(i),
                self.n(),
                self.r(),
                self.beta().clone(),
            )?;
            acc = acc.direct_sum(&summand)?;
        }
        Ok(acc)
    }

    /// `Δ‡`, the †-construction with shift sequence `s_k = k` over one
    /// `F`-period: the same summands as [`Stratum::dagger`], with the
    /// additional guarantee (for simple input) that the result is sound.
    pub fn ddagger(&self) -> Result<Stratum> {
        self.dagger()
    }

    /// `Res_F(Δ) = [Λ, n, r, β]` viewed in `End_F(V) ≅ M_{md²}(F)`.
    pub fn res_f(&self) -> Result<Stratum> {
        let ctx = *self.ctx();
        if ctx.d == 1 {
            return Ok(self.clone());
        }
        if self.lat().conjugator().is_some() {
            return Err(Error::InvalidParameter(
                "restriction of scalars needs a split lattice sequence".into(),
            ));
        }
        let (m, d) = (ctx.m, ctx.d);
        let ctx_f = AlgebraCtx::new(ctx.p, 1, m * d * d, ctx.prec)?;
        // Profile over F in the basis e_k π_D^i ω^t (t-independent).
        let e_f = self.lat().e_f();
        let mut profile = Vec::with_capacity(e_f as usize);
        for j in 0..e_f {
            let mut row = vec![0i64; m * d * d];
            for k in 0..m {
                let c = self.lat().c(k, j);
                for i in 0..d {
                    let v = (c - i as i64).div_euclid(d as i64)
                        + i64::from((c - i as i64).rem_euclid(d as i64) != 0);
                    for t in 0..d {
                        row[(k * d + i) * d + t] = v;
                    }
                }
            }
            profile.push(row);
        }
        let lat_f = LatticeSeq::new_split(&ctx_f, profile)?;
        let restricted = self.beta().restrict_to_f()?;
        let mut beta_f = AMatrix::zero(&ctx_f);
        let nn = m * d * d;
        for r in 0..nn {
            for c in 0..nn {
                let entry = restricted.at(r, c);
                *beta_f.at_mut(r, c) =
                    crate::csa::DElement::from_f(&ctx_f, entry.coords()[0].clone());
            }
        }
        Stratum::new(lat_f, self.n(), self.r(), beta_f)
    }

    /// `Δ ⊗ L̃` for the unramified extension of degree `ftilde` (must be a
    /// multiple of `d` so that `L ⊆ L̃`).
    pub fn tensor_l(&self, ftilde: usize) -> Result<TensorStratum> {
        if ftilde == 0 || ftilde % self.ctx().d != 0 {
            return Err(Error::InvalidParameter(format!(
                "ftilde = {ftilde} must be a positive multiple of d = {}",
                self.ctx().d
            )));
        }
        Ok(TensorStratum {
            base: self.clone(),
            ftilde,
        })
    }
}

// ---------------------------------------------------------------------------
// Unramified base change
// ---------------------------------------------------------------------------

/// `Δ ⊗ L̃` represented through its base stratum: levels and minimal
/// classifications are decided by base-change-invariant data (the minimal
/// polynomial and `GF(p)`-ranks), so no arithmetic over `L̃` is stored.
#[derive(Clone, Debug)]
pub struct TensorStratum {
    base: Stratum,
    ftilde: usize,
}

impl TensorStratum {
    pub fn base(&self) -> &Stratum {
        &self.base
    }

    /// `[L̃ : F]`.
    pub fn ftilde(&self) -> usize {
        self.ftilde
    }

    /// The level is preserved under base change.
    pub fn level(&self) -> Ratio<i64> {
        self.base.level()
    }

    /// Equivalence to the zero stratum is decided by `μ = X` plus rank
    /// conditions, all invariant under base change.
    pub fn is_equiv_zero_minimal(&self) -> Result<bool> {
        self.base.is_equiv_zero_minimal()
    }

    /// Squarefreeness of `μ` and the intersection ranks are invariant under
    /// separable base change, so the decision equals the base one.
    pub fn is_equiv_semisimple_minimal(&self) -> Result<bool> {
        self.base.is_equiv_semisimple_minimal()
    }

    /// Equivalent to a simple stratum over `L̃`: for `μ = X` this is the
    /// (invariant) zero criterion; otherwise `μ` must be irreducible over
    /// `GF(p^{f̃})`, i.e. irreducible over `GF(p)` with degree coprime
    /// to `f̃`.
    pub fn is_equiv_simple_minimal(&self) -> Result<bool> {
        let (_, mu) = self.base.char_min_poly()?;
        let x = crate::arith::residue_poly::ResiduePoly::x(mu.p(), mu.field_degree());
        if mu == x {
            return self.base.is_equiv_simple_minimal();
        }
        if !self.base.is_equiv_simple_minimal()? {
            return Ok(false);
        }
        let deg = mu.degree().unwrap_or(0);
        Ok(num_integer::gcd(deg, self.ftilde) == 1)
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::padic::PadicScalar;
    use crate::csa::DElement;

    fn ctx(p: u64, d: usize, m: usize) -> AlgebraCtx {
        AlgebraCtx::new(p, d, m, 24).unwrap()
    }

    fn scalar_stratum(c: &AlgebraCtx, lat: LatticeSeq, n: i64, r: i64, num: i64) -> Stratum {
        let v = PadicScalar::from_integer(c.p, num, 24).mul(&PadicScalar::p_power(c.p, -n, 24));
        let beta = AMatrix::scalar(c, &DElement::from_f(c, v));
        Stratum::new(lat, n, r, beta).unwrap()
    }

    #[test]
    fn direct_sum_concatenates_and_takes_max_depth() {
        let c = ctx(5, 1, 1);
        let lat = LatticeSeq::standard_maximal(&c);
        let s1 = scalar_stratum(&c, lat.clone(), 1, 0, 1);
        let s2 = scalar_stratum(&c, lat, 2, 0, 3);
        let sum = s1.direct_sum(&s2).unwrap();
        assert_eq!(sum.ctx().m, 2);
        assert_eq!(sum.n(), 2);
        assert_eq!(sum.r(), 0);
        // The blocks sit on the diagonal.
        assert!(sum.beta().at(0, 1).is_exact_zero());
        assert!(!sum.beta().at(1, 1).is_exact_zero());
    }

    #[test]
    fn direct_sum_rejects_mismatched_r_and_period() {
        let c = ctx(5, 1, 1);
        let lat = LatticeSeq::standard_maximal(&c);
        let s1 = scalar_stratum(&c, lat.clone(), 2, 0, 1);
        let s2 = scalar_stratum(&c, lat.clone(), 2, 1, 1);
        assert!(matches!(
            s1.direct_sum(&s2),
            Err(Error::InvalidParameter(_))
        ));
        let c2 = ctx(5, 1, 2);
        let stair = LatticeSeq::staircase(&c2, 2).unwrap();
        let beta = AMatrix::scalar(
            &c2,
            &DElement::from_f(&c2, PadicScalar::p_power(5, -1, 24)),
        );
        let s3 = Stratum::new(stair, 2, 0, beta).unwrap();
        assert!(matches!(s1.direct_sum(&s3), Err(Error::PeriodMismatch(_))));
    }

    #[test]
    fn scaled_sum_cross_scales_periods() {
        // e(Λ|E) = 1 (unramified block) vs e(Λ'|E') = 2 (ramified block on a
        // maximal chain would give e(Λ'|E') = e(Λ'|F)/e(E'|F) = 1; use the
        // F-side: a chain of period 2 with E' = F gives e = 2).
        let p = 3;
        let c1 = ctx(p, 1, 1);
        let lat1 = LatticeSeq::standard_maximal(&c1);
        let s1 = scalar_stratum(&c1, lat1, 1, 0, 1); // E = F, e(Λ|E) = 1
        let c2 = ctx(p, 1, 2);
        let lat2 = LatticeSeq::staircase(&c2, 2).unwrap();
        let beta2 = AMatrix::scalar(
            &c2,
            &DElement::from_f(&c2, PadicScalar::p_power(p, -1, 24)),
        );
        let s2 = Stratum::new(lat2, 2, 1, beta2).unwrap(); // E' = F, e(Λ'|E') = 2
        let sum = s1.direct_sum_scaled(&s2).unwrap();
        // [2Λ ⊕ Λ', max(2·1, 2), max(2·0, 1), β⊕β']
        assert_eq!(sum.n(), 2);
        assert_eq!(sum.r(), 1);
        assert_eq!(sum.lat().e_d(), 2);
        assert_eq!(sum.ctx().m, 3);
    }

    #[test]
    fn dagger_of_strict_period_one_stratum_is_itself() {
        let c = ctx(5, 1, 1);
        let lat = LatticeSeq::standard_maximal(&c);
        let s = scalar_stratum(&c, lat, 1, 0, 2);
        let dag = s.dagger().unwrap();
        assert_eq!(dag.ctx().m, 1);
        assert!(dag.is_equivalent(&s).unwrap());
        let ddag = s.ddagger().unwrap();
        assert!(ddag.is_equivalent(&s).unwrap());
    }

    #[test]
    fn dagger_preserves_fundamental_and_level() {
        // Quaternion algebra: e(Λ|F) = 2, so Δ† has two summands.
        let c = ctx(3, 2, 1);
        let lat = LatticeSeq::standard_maximal(&c);
        let beta = AMatrix::scalar(&c, &DElement::pi(&c)).inverse().unwrap();
        let s = Stratum::new(lat, 1, 0, beta).unwrap();
        let dag = s.dagger().unwrap();
        assert_eq!(dag.ctx().m, 2);
        assert_eq!(dag.level(), s.level());
        assert_eq!(
            dag.is_fundamental().unwrap(),
            s.is_fundamental().unwrap()
        );
        assert!(dag.lat().is_strict());
    }

    #[test]
    fn res_f_is_identity_for_split_algebra() {
        let c = ctx(5, 1, 2);
        let lat = LatticeSeq::standard_maximal(&c);
        let beta = AMatrix::scalar(
            &c,
            &DElement::from_f(&c, PadicScalar::p_power(5, -1, 24)),
        );
        let s = Stratum::new(lat, 1, 0, beta).unwrap();
        let r = s.res_f().unwrap();
        assert_eq!(r.ctx().m, 2);
        assert_eq!(r.ctx().d, 1);
        assert!(r.is_equivalent(&s).unwrap());
    }

    #[test]
    fn res_f_preserves_level_and_classification() {
        let c = ctx(3, 2, 1);
        let lat = LatticeSeq::standard_maximal(&c);
        let beta = AMatrix::scalar(&c, &DElement::pi(&c)).inverse().unwrap();
        let s = Stratum::new(lat, 1, 0, beta).unwrap();
        let r = s.res_f().unwrap();
        assert_eq!(r.ctx().d, 1);
        assert_eq!(r.ctx().m, 4);
        assert_eq!(r.level(), s.level());
        assert_eq!(r.n(), s.n());
        // π_D generates a ramified quadratic: still simple after Res_F.
        assert_eq!(
            r.is_equiv_simple_minimal().unwrap(),
            s.is_equiv_simple_minimal().unwrap()
        );
        assert_eq!(
            r.is_fundamental().unwrap(),
            s.is_fundamental().unwrap()
        );
    }

    #[test]
    fn res_f_zero_stratum_stays_zero() {
        let c = ctx(3, 2, 1);
        let lat = LatticeSeq::standard_maximal(&c);
        let s = Stratum::zero(lat, 2).unwrap();
        let r = s.res_f().unwrap();
        assert!(r.is_zero());
        assert_eq!(r.level(), s.level());
    }

    #[test]
    fn tensor_l_level_and_semisimple_decision_invariant() {
        let c = ctx(3, 2, 1);
        let lat = LatticeSeq::standard_maximal(&c);
        let omega = crate::arith::unram::UnramifiedElement::generator(3, 2, 24).unwrap();
        let beta = AMatrix::scalar(&c, &DElement::from_l(&c, omega.shift(-1)).unwrap());
        let s = Stratum::new(lat, 2, 1, beta).unwrap();
        let t = s.tensor_l(2).unwrap();
        assert_eq!(t.level(), s.level());
        assert_eq!(
            t.is_equiv_semisimple_minimal().unwrap(),
            s.is_equiv_semisimple_minimal().unwrap()
        );
    }

    #[test]
    fn tensor_l_splits_unramified_generator() {
        // β with residue generating GF(9): simple over F, but μ (degree 2)
        // splits over L̃ of degree 2.
        let c = ctx(3, 2, 1);
        let lat = LatticeSeq::standard_maximal(&c);
        let omega = crate::arith::unram::UnramifiedElement::generator(3, 2, 24).unwrap();
        let beta = AMatrix::scalar(&c, &DElement::from_l(&c, omega.shift(-1)).unwrap());
        let s = Stratum::new(lat, 2, 1, beta).unwrap();
        assert!(s.is_equiv_simple_minimal().unwrap());
        let t = s.tensor_l(2).unwrap();
        assert!(!t.is_equiv_simple_minimal().unwrap());
        // A ramified generator keeps μ = X-power or degree-1 data: π_D case.
        let beta2 = AMatrix::scalar(&c, &DElement::pi(&c)).inverse().unwrap();
        let s2 = Stratum::new(LatticeSeq::standard_maximal(&c), 1, 0, beta2).unwrap();
        let t2 = s2.tensor_l(2).unwrap();
        assert_eq!(
            t2.is_equiv_simple_minimal().unwrap(),
            s2.is_equiv_simple_minimal().unwrap()
        );
    }

    #[test]
    fn tensor_l_requires_l_inside() {
        let c = ctx(3, 2, 1);
        let lat = LatticeSeq::standard_maximal(&c);
        let s = Stratum::zero(lat, 1).unwrap();
        assert!(s.tensor_l(3).is_err());
        assert!(s.tensor_l(2).is_ok());
        assert!(s.tensor_l(4).is_ok());
    }
}
