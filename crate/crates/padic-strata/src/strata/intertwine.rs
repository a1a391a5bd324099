//! Intertwining of strata: the membership test, the lattice `𝔪(Δ)`, and
//! matchings between semisimple strata.
//!
//! An invertible `g` intertwines `Δ` with `Δ'` when `g(β + 𝔞_{−r})g^{-1}`
//! meets `β' + 𝔞'_{−r'}`, i.e. `gβg^{-1} − β' ∈ g𝔞_{−r}g^{-1} + 𝔞'_{−r'}`
//! — a lattice-membership test carried out on generator matrices.
//!
//! The intertwining of a single semisimple stratum with itself is controlled
//! by `𝔪(Δ) = 𝔫_{−r}(β,Λ) ∩ 𝔞_{−(r+k₀)}` (with `𝔪 = 𝔞_0` for central `β`,
//! where `k₀ = −∞`); the full intertwining set
//! `(1 + 𝔪(Δ)) C_{A^×}(β) (1 + 𝔪(Δ))` is reported symbolically alongside
//! the computed lattice.
//!
//! A *matching* between semisimple `Δ` and `Δ'` (equal `n`, `r`, periods) is
//! the unique bijection `ζ` of blocks such that `Δ_i ⊕ Δ'_{ζ(i)}` is
//! equivalent to a simple stratum.  In the minimal range `n = r + 1` the
//! pair criterion reduces to equality of the block minimal polynomials
//! `μ̄_i` of `ȳ(Δ)` (two irreducible polynomials have an irreducible lcm
//! exactly when they are equal, and zero blocks pair with zero blocks);
//! deeper strata need defining sequences and are reported as undecidable
//! here.

use crate::arith::fq::FqElem;
use crate::arith::fq_matrix::FqMatrix;
use crate::arith::padic::PadicScalar;
use crate::arith::residue_poly::ResiduePoly;
use crate::csa::AMatrix;
use crate::error::{Error, Result};
use crate::lattice::GenLat;

use super::centralizer::CriticalExponent;
use super::Stratum;

// ---------------------------------------------------------------------------
// Intertwining membership
// ---------------------------------------------------------------------------

impl Stratum {
    /// Does `g` intertwine `Δ` with `Δ'`?  Decides
    /// `gβg^{-1} − β' ∈ g𝔞_{−r}g^{-1} + 𝔞'_{−r'}`.
    pub fn intertwines(&self, g: &AMatrix, other: &Stratum) -> Result<bool> {
        let ctx = self.ctx();
        let octx = other.ctx();
        if ctx.p != octx.p || ctx.d != octx.d || ctx.m != octx.m {
            return Err(Error::InvalidParameter(
                "intertwining requires strata on the same space".into(),
            ));
        }
        if self.lat().conjugator().is_some() || other.lat().conjugator().is_some() {
            return Err(Error::InvalidParameter(
                "intertwining test needs split lattice sequences".into(),
            ));
        }
        let dim = ctx.m * ctx.m * ctx.d * ctx.d;
        let g_inv = g.inverse()?;
        let diff = g.mul(self.beta())?.mul(&g_inv)?.sub(other.beta());
        let diff_coords = diff.f_coords();

        // Generators of g 𝔞_{−r} g^{-1} in F-coordinates.
        let exps = self.lat().square_exponents(-self.r());
        let mut gens: Vec<Vec<PadicScalar>> = Vec::with_capacity(dim);
        for c in 0..dim {
            let j = c % ctx.d;
            let i = (c / ctx.d) % ctx.d;
            let l = (c / (ctx.d * ctx.d)) % ctx.m;
            let k = c / (ctx.d * ctx.d * ctx.m);
            let mono = AMatrix::unit_monomial(ctx, k, l, i, j);
            let conj = g.mul(&mono)?.mul(&g_inv)?;
            gens.push(
                conj.f_coords()
                    .into_iter()
                    .map(|x| x.shift(exps[c]))
                    .collect(),
            );
        }

        // Base and working modulus: honest bounds from the certified data.
        let other_exps = other.lat().square_exponents(-other.r());
        let mut base = other_exps.clone();
        let mut max_abs_prec_gap = i64::MAX;
        for gen in &gens {
            for (idx, x) in gen.iter().enumerate() {
                if x.is_exact_zero() {
                    continue;
                }
                base[idx] = base[idx].min(x.vlb());
            }
        }
        for (idx, x) in diff_coords.iter().enumerate() {
            if !x.is_exact_zero() {
                base[idx] = base[idx].min(x.vlb());
            }
        }
        for gen in gens.iter().chain(std::iter::once(&diff_coords)) {
            for (idx, x) in gen.iter().enumerate() {
                if x.is_exact_zero() {
                    continue;
                }
                max_abs_prec_gap = max_abs_prec_gap.min(x.abs_prec() - base[idx]);
            }
        }
        let mut nexp = max_abs_prec_gap.min(self.ctx().prec as i64);
        // The representation tail p^{nexp + base} must lie inside 𝔞'_{−r'},
        // otherwise a positive answer would not be certified.
        let tail_need = (0..dim)
            .map(|c| other_exps[c] - base[c])
            .max()
            .unwrap_or(0);
        nexp = nexp.min(self.ctx().prec as i64);
        if nexp < 1 || nexp < tail_need {
            return Err(Error::InsufficientPrecision(format!(
                "certifiable modulus {nexp} below the conductor gap {tail_need}"
            )));
        }
        let nexp = nexp as u32;

        let conj_lat = GenLat::from_elements(ctx.p, nexp, base.clone(), &gens)?;
        let other_sq = GenLat::square(other.lat(), -other.r(), nexp);
        let sum = conj_lat.sum(&other_sq)?;
        sum.contains(&diff_coords)
    }
}

// ---------------------------------------------------------------------------
// The lattice 𝔪(Δ)
// ---------------------------------------------------------------------------

/// The computed `𝔪(Δ)` together with the symbolic description of the full
/// intertwining set.
#[derive(Clone, Debug)]
pub struct IntertwiningData {
    /// Generator-matrix representation of `𝔪(Δ)`.
    pub lattice: GenLat,
    /// The symbolic intertwining set `(1+𝔪(Δ)) C_{A^×}(β) (1+𝔪(Δ))`.
    pub description: String,
}

fn as_not_semisimple(e: Error) -> Error {
    match e {
        Error::NotSemiPure(m) => Error::NotCertifiedSemisimple(m),
        other => other,
    }
}

impl Stratum {
    /// `𝔪(Δ) = 𝔫_{−r}(β,Λ) ∩ 𝔞_{−(r+k₀)}`, with the convention `𝔪 = 𝔞_0`
    /// for `k₀ = −∞` (central or zero `β`).
    pub fn intertwining_lattice(&self, nexp: u32) -> Result<IntertwiningData> {
        let k0 = self.critical_exponent().map_err(as_not_semisimple)?;
        match k0 {
            CriticalExponent::NegInfinity => Ok(IntertwiningData {
                lattice: GenLat::square(self.lat(), 0, nexp),
                description: "(1 + m(Δ)) · A^× · (1 + m(Δ)) with m(Δ) = a_0 \
                              (k₀ = −∞, centralizer is all of A)"
                    .into(),
            }),
            CriticalExponent::Finite(k0) => {
                let n_part = self.n_lattice(-self.r(), nexp)?;
                let a_part = GenLat::square(self.lat(), -(self.r() + k0), nexp);
                let lattice = n_part.intersect(&a_part)?;
                Ok(IntertwiningData {
                    lattice,
                    description: format!(
                        "(1 + m(Δ)) · C_{{A^×}}(β) · (1 + m(Δ)) with m(Δ) = \
                         n_{{{}}}(β,Λ) ∩ a_{{{}}} (k₀ = {k0})",
                        -self.r(),
                        -(self.r() + k0)
                    ),
                })
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Matching
// ---------------------------------------------------------------------------

/// One matched block pair with its verified invariants.
#[derive(Clone, Debug)]
pub struct BlockMatch {
    /// Block index in `Δ`.
    pub left: usize,
    /// Matched block index in `Δ'`.
    pub right: usize,
    /// The common block minimal polynomial `μ̄_i` of `ȳ`.
    pub mu: ResiduePoly,
    /// The common `dim_D V^i`.
    pub dim_d: usize,
    /// Common ramification index `e(E_i|F)`.
    pub e: usize,
    /// Common residue degree `f(E_i|F)`.
    pub f: usize,
}

/// A matching `ζ`: the unique block bijection pairing blocks whose direct
/// sum is equivalent to a simple stratum.
#[derive(Clone, Debug)]
pub struct Matching {
    pub pairs: Vec<BlockMatch>,
}

/// Minimal polynomial of `y` restricted to the column space of the
/// idempotent `pmat` (both as residue matrices; they commute mod `p`).
fn restricted_min_poly(y: &FqMatrix, pmat: &FqMatrix) -> Result<ResiduePoly> {
    let n = pmat.rows();
    let p = pmat.p();
    let mut work = pmat.clone();
    let pivots = work.rref();
    let k = pivots.len();
    if k == 0 {
        return Err(Error::CertificationUnavailable(
            "block idempotent reduces to zero".into(),
        ));
    }
    // Augmented system [B | Y·B]: B = independent columns of pmat.
    let mut aug = FqMatrix::zero(p, 1, n, 2 * k);
    for (bj, &col) in pivots.iter().enumerate() {
        let b: Vec<FqElem> = (0..n).map(|i| pmat.at(i, col).clone()).collect();
        let yb = y.apply(&b);
        for i in 0..n {
            *aug.at_mut(i, bj) = b[i].clone();
            *aug.at_mut(i, k + bj) = yb[i].clone();
        }
    }
    let aug_pivots = aug.rref();
    if aug_pivots.len() != k || aug_pivots.iter().enumerate().any(|(i, &c)| c != i) {
        return Err(Error::CertificationUnavailable(
            "idempotent column space is not invariant under ȳ".into(),
        ));
    }
    let restricted = FqMatrix::from_fn(p, 1, k, k, |i, j| aug.at(i, k + j).clone());
    restricted.min_poly()
}

impl Stratum {
    /// Per-block residue minimal polynomials `μ̄_i` (blocks of the certified
    /// splitting, in order).
    fn block_residue_min_polys(&self) -> Result<Vec<ResiduePoly>> {
        let split = self.splitting().map_err(as_not_semisimple)?;
        let y = self.y_element()?;
        let y_bar = self.lat().quotient_action(&y)?;
        split
            .idempotents
            .iter()
            .map(|e| {
                let p_bar = self.lat().quotient_action(e)?;
                restricted_min_poly(&y_bar, &p_bar)
            })
            .collect()
    }

    /// The matching `ζ` between the blocks of two semisimple strata with
    /// `n = n'`, `r = r'` and equal periods.
    ///
    /// Fully decided in the minimal range `n = r + 1` (and for `n = r`,
    /// where both strata are zero); deeper strata require defining sequences
    /// and return [`Error::Undecidable`].
    pub fn matching(&self, other: &Stratum) -> Result<Matching> {
        let (c1, c2) = (self.ctx(), other.ctx());
        if c1.p != c2.p || c1.d != c2.d || c1.m != c2.m {
            return Err(Error::InvalidParameter(
                "matching requires strata on the same space".into(),
            ));
        }
        if self.n() != other.n() || self.r() != other.r() {
            return Err(Error::InvalidParameter(
                "matching requires n = n' and r = r'".into(),
            ));
        }
        if self.lat().e_d() != other.lat().e_d() {
            return Err(Error::PeriodMismatch(format!(
                "o_D-periods differ: {} vs {}",
                self.lat().e_d(),
                other.lat().e_d()
            )));
        }
        // n = r: both strata are equivalent to zero; one zero block each.
        if self.n() == self.r() {
            return Ok(Matching {
                pairs: vec![BlockMatch {
                    left: 0,
                    right: 0,
                    mu: ResiduePoly::x(c1.p, 1),
                    dim_d: c1.m,
                    e: 1,
                    f: 1,
                }],
            });
        }
        if self.n() > self.r() + 1 {
            return Err(Error::Undecidable(
                "matching beyond the minimal range needs defining sequences".into(),
            ));
        }
        if !self.is_equiv_semisimple_minimal()? {
            return Err(Error::NotCertifiedSemisimple(
                "left stratum is not equivalent to a semisimple stratum".into(),
            ));
        }
        if !other.is_equiv_semisimple_minimal()? {
            return Err(Error::NotCertifiedSemisimple(
                "right stratum is not equivalent to a semisimple stratum".into(),
            ));
        }
        let left_split = self.splitting().map_err(as_not_semisimple)?;
        let right_split = other.splitting().map_err(as_not_semisimple)?;
        let left_mus = self.block_residue_min_polys()?;
        let right_mus = other.block_residue_min_polys()?;
        if left_mus.len() != right_mus.len() {
            return Err(Error::NoMatching(format!(
                "block counts differ: {} vs {}",
                left_mus.len(),
                right_mus.len()
            )));
        }
        let mut pairs = Vec::with_capacity(left_mus.len());
        for (i, mu) in left_mus.iter().enumerate() {
            let j = match right_mus.iter().position(|m| m == mu) {
                Some(j) => j,
                None => {
                    return Err(Error::NoMatching(format!(
                        "no block of Δ' shares the minimal polynomial of block {i}"
                    )))
                }
            };
            let (lb, rb) = (&left_split.blocks[i], &right_split.blocks[j]);
            if lb.dim_d != rb.dim_d {
                return Err(Error::NoMatching(format!(
                    "matched blocks {i} ↔ {j} have different dimensions \
                     ({} vs {})",
                    lb.dim_d, rb.dim_d
                )));
            }
            if lb.e != rb.e || lb.f != rb.f {
                return Err(Error::CertificationUnavailable(format!(
                    "matched blocks {i} ↔ {j} disagree on certified field \
                     invariants (e,f) = ({},{}) vs ({},{})",
                    lb.e, lb.f, rb.e, rb.f
                )));
            }
            pairs.push(BlockMatch {
                left: i,
                right: j,
                mu: mu.clone(),
                dim_d: lb.dim_d,
                e: lb.e,
                f: lb.f,
            });
        }
        Ok(Matching { pairs })
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csa::{AlgebraCtx, DElement};
    use crate::lattice::LatticeSeq;

    fn ctx(p: u64, d: usize, m: usize) -> AlgebraCtx {
        AlgebraCtx::new(p, d, m, 24).unwrap()
    }

    fn diag_stratum(c: &AlgebraCtx, n: i64, r: i64, nums: &[i64]) -> Stratum {
        let lat = LatticeSeq::standard_maximal(c);
        let mut beta = AMatrix::zero(c);
        for (k, &num) in nums.iter().enumerate() {
            *beta.at_mut(k, k) = DElement::from_f(
                c,
                PadicScalar::from_integer(c.p, num, 24).mul(&PadicScalar::p_power(c.p, -n, 24)),
            );
        }
        Stratum::new(lat, n, r, beta).unwrap()
    }

    #[test]
    fn identity_intertwines_stratum_with_itself() {
        let c = ctx(5, 1, 2);
        let s = diag_stratum(&c, 1, 0, &[1, 2]);
        let one = AMatrix::identity(&c);
        assert!(s.intertwines(&one, &s).unwrap());
        // Central scalars behave like the identity.
        let central = AMatrix::scalar(&c, &DElement::from_f(&c, PadicScalar::from_integer(5, 3, 24)));
        assert!(s.intertwines(&central, &s).unwrap());
    }

    #[test]
    fn identity_does_not_intertwine_distinct_cosets() {
        let c = ctx(5, 1, 1);
        let s1 = diag_stratum(&c, 1, 0, &[1]);
        let s2 = diag_stratum(&c, 1, 0, &[2]);
        assert!(!s1.is_equivalent(&s2).unwrap());
        let one = AMatrix::identity(&c);
        assert!(!s1.intertwines(&one, &s2).unwrap());
    }

    #[test]
    fn permutation_conjugate_intertwines() {
        let c = ctx(5, 1, 2);
        let s = diag_stratum(&c, 1, 0, &[1, 2]);
        let swapped = diag_stratum(&c, 1, 0, &[2, 1]);
        // The transposition matrix normalizes the standard maximal chain.
        let mut g = AMatrix::zero(&c);
        *g.at_mut(0, 1) = DElement::from_f(&c, PadicScalar::from_integer(5, 1, 24));
        *g.at_mut(1, 0) = DElement::from_f(&c, PadicScalar::from_integer(5, 1, 24));
        assert!(s.intertwines(&g, &swapped).unwrap());
        let one = AMatrix::identity(&c);
        assert!(!s.intertwines(&one, &swapped).unwrap());
    }

    #[test]
    fn central_beta_gives_full_intertwining_lattice() {
        let c = ctx(3, 1, 2);
        let lat = LatticeSeq::standard_maximal(&c);
        let s = Stratum::zero(lat.clone(), 2).unwrap();
        let data = s.intertwining_lattice(8).unwrap();
        let a0 = GenLat::square(&lat, 0, 8);
        assert!(data.lattice.equals(&a0).unwrap());
        assert!(data.description.contains("A^×"));
    }

    #[test]
    fn minimal_stratum_intertwining_lattice_inside_a1() {
        // β = π_D^{-1}, r = 0, k₀ = −1: 𝔪 = 𝔫_0 ∩ 𝔞_1 ⊆ 𝔞_1.
        let c = ctx(3, 2, 1);
        let lat = LatticeSeq::standard_maximal(&c);
        let beta = AMatrix::scalar(&c, &DElement::pi(&c)).inverse().unwrap();
        let s = Stratum::new(lat.clone(), 1, 0, beta).unwrap();
        let data = s.intertwining_lattice(8).unwrap();
        let a1 = GenLat::square(&lat, 1, 8);
        assert!(data.lattice.subset_of(&a1).unwrap());
        assert!(data.description.contains("k₀ = -1"));
    }

    #[test]
    fn matching_of_identical_strata_is_identity() {
        let c = ctx(5, 1, 2);
        let s = diag_stratum(&c, 1, 0, &[1, 2]);
        let m = s.matching(&s).unwrap();
        assert_eq!(m.pairs.len(), 2);
        for pair in &m.pairs {
            assert_eq!(pair.left, pair.right);
            assert_eq!(pair.dim_d, 1);
        }
    }

    #[test]
    fn matching_recovers_block_permutation() {
        // Swapping the diagonal slots relabels the simple blocks.  Block
        // enumeration is canonical in the residue data, so the index pairing
        // is the identity — the permutation shows up in the slots the paired
        // idempotents select, which must be swapped between the two sides.
        let c = ctx(5, 1, 2);
        let s = diag_stratum(&c, 1, 0, &[1, 2]);
        let swapped = diag_stratum(&c, 1, 0, &[2, 1]);
        let m = s.matching(&swapped).unwrap();
        assert_eq!(m.pairs.len(), 2);
        // The unit diagonal slot of a diagonal idempotent.
        let support = |e: &AMatrix| -> usize {
            let slots: Vec<usize> = (0..2)
                .filter(|&k| e.at(k, k).coeffs()[0].coords()[0].vlb() == 0)
                .collect();
            assert_eq!(slots.len(), 1, "idempotent supported on one slot");
            slots[0]
        };
        let ls = s.splitting().unwrap();
        let rs = swapped.splitting().unwrap();
        for pair in &m.pairs {
            assert_ne!(
                support(&ls.idempotents[pair.left]),
                support(&rs.idempotents[pair.right]),
                "matched blocks sit in swapped slots"
            );
        }
        // The two pairs carry the two distinct residue polynomials.
        assert_ne!(m.pairs[0].mu, m.pairs[1].mu);
    }

    #[test]
    fn matching_fails_for_disjoint_residues() {
        let c = ctx(5, 1, 2);
        let s1 = diag_stratum(&c, 1, 0, &[1, 2]);
        let s2 = diag_stratum(&c, 1, 0, &[1, 3]);
        match s1.matching(&s2) {
            Err(Error::NoMatching(_)) => {}
            other => panic!("expected NoMatching, got {other:?}"),
        }
    }

    #[test]
    fn matching_fails_on_dimension_mismatch() {
        let c = ctx(5, 1, 3);
        let s1 = diag_stratum(&c, 1, 0, &[1, 1, 2]);
        let s2 = diag_stratum(&c, 1, 0, &[1, 2, 2]);
        match s1.matching(&s2) {
            Err(Error::NoMatching(_)) => {}
            other => panic!("expected NoMatching, got {other:?}"),
        }
    }

    #[test]
    fn matching_zero_range_and_deep_range() {
        let c = ctx(5, 1, 2);
        let lat = LatticeSeq::standard_maximal(&c);
        let z1 = Stratum::zero(lat.clone(), 2).unwrap();
        let z2 = Stratum::zero(lat.clone(), 2).unwrap();
        let m = z1.matching(&z2).unwrap();
        assert_eq!(m.pairs.len(), 1);
        assert_eq!(m.pairs[0].dim_d, 2);
        // Deep range: n > r + 1 is undecidable here.
        let s1 = diag_stratum(&c, 2, 0, &[1, 2]);
        let s2 = diag_stratum(&c, 2, 0, &[1, 2]);
        match s1.matching(&s2) {
            Err(Error::Undecidable(_)) => {}
            other => panic!("expected Undecidable, got {other:?}"),
        }
    }
}
