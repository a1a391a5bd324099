//! Certification of semi-purity: splitting `β` into field blocks.
//!
//! A stratum is *semi-pure* when it is a direct sum of pure strata, i.e.
//! `β` generates over `F` a product of fields `E = Π_i E_i` splitting both
//! `V` and `Λ`.  This module certifies that structure from the raw matrix:
//!
//! 1. the minimal polynomial `μ` of `β` over `F` (Krylov chain on the split
//!    representation, every dependency certified),
//! 2. a certified factorization of `μ` into irreducibles over `F`:
//!    Newton-polygon segments are split off by integer-valuation
//!    substitutions and Hensel lifting; a single segment with irreducible
//!    residual of multiplicity one is an irreducibility certificate (with
//!    `e` = slope denominator and `f` = residual degree); repeated *linear*
//!    residuals at integer slopes are refined by Ore-style shifts
//!    `X ↦ X + c`.  Inputs beyond this calculus (e.g. several fractional
//!    valuation classes, or repeated non-linear residuals) are rejected
//!    with [`Error::CertificationUnavailable`] — the scope is honest, not
//!    a general factorization engine,
//! 3. block idempotents `1^i = P_i(β)` through Bézout identities between
//!    the coprime factors, verified to be an orthogonal decomposition of 1
//!    commuting with `β` at a recorded precision level,
//! 4. compatibility with `Λ`: every `1^i` must lie in `𝔞_0`, every block
//!    ramification index must divide `e(Λ|F)`, and the block valuations
//!    must be integral over `E_i`.
//!
//! The data then feeds the invariants `group_level = ⌊r/e(Λ|E)⌋` (with
//! `e(Λ|E) = gcd_i e(Λ^i|E_i)`, infinite for zero strata) and
//! `degree = dim_F E = Σ_i e_i f_i`.

use crate::arith::newton::{IrredVerdict, NewtonPolygon};
use crate::arith::padic::PadicScalar;
use crate::arith::padic_poly::PadicPoly;
use crate::arith::residue_poly::ResiduePoly;
use crate::csa::AMatrix;
use crate::error::{Error, Result};

use super::Stratum;

/// Bound on Ore refinement steps (each shifts the variable by a cluster
/// center; genuinely deeper inputs are rejected rather than ground on).
const MAX_REFINEMENTS: u32 = 8;

// ---------------------------------------------------------------------------
// Splitting data
// ---------------------------------------------------------------------------

/// One certified field block `E_i = F[β_i]`.
#[derive(Clone, Debug)]
pub struct BlockData {
    /// The irreducible factor of the minimal polynomial cut out by this
    /// block (monic, over `F`).
    pub factor: PadicPoly,
    /// Ramification index `e(E_i|F)`.
    pub e: usize,
    /// Residue degree `f(E_i|F)`.
    pub f: usize,
    /// `m_i = dim_D V^i` (so `dim_F V^i = m_i d²`).
    pub dim_d: usize,
}

impl BlockData {
    /// `[E_i : F] = e_i f_i`.
    pub fn field_degree(&self) -> usize {
        self.e * self.f
    }
}

/// Certified semi-purity data: idempotents and per-block field invariants.
#[derive(Clone, Debug)]
pub struct SplittingData {
    /// Block idempotents `1^i`, pairwise orthogonal, summing to `1`,
    /// commuting with `β` — all verified modulo `p^{check_level}`.
    pub idempotents: Vec<AMatrix>,
    /// Field data per block, aligned with `idempotents`.
    pub blocks: Vec<BlockData>,
    /// Absolute precision level at which the idempotent identities and the
    /// factorization `μ = Π μ_i` were verified.
    pub check_level: i64,
}

impl SplittingData {
    /// `dim_F E = Σ_i [E_i : F]`.
    pub fn degree(&self) -> usize {
        self.blocks.iter().map(BlockData::field_degree).sum()
    }

    /// `e(Λ|E) = gcd_i e(Λ^i|E_i)` with `e(Λ^i|E_i) = e(Λ|F)/e(E_i|F)`.
    pub fn e_lambda_e(&self, e_f: i64) -> i64 {
        self.blocks
            .iter()
            .map(|b| e_f / b.e as i64)
            .fold(0, num_integer::gcd)
    }

    /// Double-centralizer dimension count `dim_F C_A(β) = Σ_i m_i²d²/[E_i:F]`.
    pub fn centralizer_dim_f(&self, ctx: &crate::csa::AlgebraCtx) -> usize {
        self.blocks
            .iter()
            .map(|b| (b.dim_d * ctx.d) * (b.dim_d * ctx.d) / b.field_degree())
            .sum()
    }
}

// ---------------------------------------------------------------------------
// Polynomial helpers over F
// ---------------------------------------------------------------------------

/// A finite precision at which exact unit constants (Bézout identities,
/// product accumulators, binomial powers) can be carried: the maximum
/// relative precision present in the data.  Taking the maximum means the
/// constant never caps a partner's precision under min-propagation, while
/// staying far away from the degenerate `p^(2^32)` moduli an "infinite"
/// marker would produce in constant-times-constant products.
fn ident_prec<'a>(polys: impl IntoIterator<Item = &'a PadicPoly>) -> u32 {
    let mut best = 1u32;
    for f in polys {
        for c in f.coeffs() {
            if !c.is_exact_zero() {
                best = best.max(c.rel_prec());
            }
        }
    }
    best
}

/// Division with remainder by a divisor with certified-invertible leading
/// coefficient.  The cancelling head coefficients are forced to exact zero
/// (they vanish identically as field expressions), so precision noise never
/// inflates the formal degree of the remainder.
fn poly_divmod(f: &PadicPoly, g: &PadicPoly) -> Result<(PadicPoly, PadicPoly)> {
    let p = f.p();
    let dg = g
        .degree()
        .ok_or_else(|| Error::InvalidParameter("division by zero polynomial".into()))?;
    let glead_inv = g
        .leading()
        .expect("nonzero divisor has a leading coefficient")
        .inv()?;
    let df = match f.degree() {
        None => return Ok((PadicPoly::zero(p), PadicPoly::zero(p))),
        Some(df) if df < dg => return Ok((PadicPoly::zero(p), f.clone())),
        Some(df) => df,
    };
    let mut rem: Vec<PadicScalar> = (0..=df).map(|i| f.coeff(i)).collect();
    let mut quo = vec![PadicScalar::exact_zero(p); df - dg + 1];
    for k in (dg..=df).rev() {
        let c = rem[k].mul(&glead_inv);
        if !c.is_exact_zero() {
            for i in 0..dg {
                rem[k - dg + i] = rem[k - dg + i].sub(&c.mul(&g.coeff(i)));
            }
        }
        rem[k] = PadicScalar::exact_zero(p);
        quo[k - dg] = c;
    }
    rem.truncate(dg);
    Ok((
        PadicPoly::from_coeffs(p, quo),
        PadicPoly::from_coeffs(p, rem),
    ))
}

/// Extended Euclid over `F[X]`: returns `(g, a, b)` with `a f + b h = g`,
/// `g` monic.  Needs every intermediate leading coefficient certified
/// invertible; precision starvation surfaces as an error.
fn poly_xgcd(f: &PadicPoly, h: &PadicPoly) -> Result<(PadicPoly, PadicPoly, PadicPoly)> {
    let p = f.p();
    let wprec = ident_prec([f, h]);
    let (mut r0, mut r1) = (f.clone(), h.clone());
    let (mut a0, mut a1) = (PadicPoly::one(p, wprec), PadicPoly::zero(p));
    let (mut b0, mut b1) = (PadicPoly::zero(p), PadicPoly::one(p, wprec));
    while r1.degree().is_some() {
        let (q, r) = poly_divmod(&r0, &r1)?;
        let a = a0.sub(&q.mul(&a1));
        let b = b0.sub(&q.mul(&b1));
        (r0, r1) = (r1, r);
        (a0, a1) = (a1, a);
        (b0, b1) = (b1, b);
    }
    let lead_inv = r0
        .leading()
        .ok_or_else(|| Error::InsufficientPrecision("vanishing gcd remainder".into()))?
        .inv()?;
    Ok((
        r0.scale(&lead_inv),
        a0.scale(&lead_inv),
        b0.scale(&lead_inv),
    ))
}

/// `f(X + c)` by the Taylor-shift convolution (degrees here are tiny).
fn taylor_shift(f: &PadicPoly, c: &PadicScalar) -> PadicPoly {
    let p = f.p();
    let n = match f.degree() {
        None => return f.clone(),
        Some(n) => n,
    };
    // Binomial table C(i, j) for i ≤ n (n ≤ m²d² stays far below i64 range).
    let mut binom = vec![vec![0i64; n + 1]; n + 1];
    binom[0][0] = 1;
    for i in 1..=n {
        binom[i][0] = 1;
        for j in 1..=i {
            binom[i][j] = binom[i - 1][j - 1] + if j <= i - 1 { binom[i - 1][j] } else { 0 };
        }
    }
    let mut powers = Vec::with_capacity(n + 1);
    let wprec = if c.is_exact_zero() {
        ident_prec([f])
    } else {
        ident_prec([f]).max(c.rel_prec())
    };
    powers.push(PadicScalar::one(p, wprec));
    for _ in 1..=n {
        let last = powers.last().expect("nonempty").clone();
        powers.push(last.mul(c));
    }
    let coeffs = (0..=n)
        .map(|j| {
            let mut acc = PadicScalar::exact_zero(p);
            for i in j..=n {
                acc = acc.add(&f.coeff(i).mul_small_int(binom[i][j]).mul(&powers[i - j]));
            }
            acc
        })
        .collect();
    PadicPoly::from_coeffs(p, coeffs)
}

/// The reversed polynomial `X^n f(1/X) / f(0)` (monic, roots inverted).
fn reverse_monic(f: &PadicPoly) -> Result<PadicPoly> {
    let p = f.p();
    let n = f
        .degree()
        .ok_or_else(|| Error::InvalidParameter("reversal of zero polynomial".into()))?;
    let c0_inv = f.coeff(0).inv()?;
    let coeffs = (0..=n).map(|i| f.coeff(n - i).mul(&c0_inv)).collect();
    Ok(PadicPoly::from_coeffs(p, coeffs))
}

/// `f / X` (requires the constant coefficient to be exactly zero).
fn divide_by_x(f: &PadicPoly) -> PadicPoly {
    debug_assert!(f.coeff(0).is_exact_zero());
    let n = f.degree().expect("nonzero polynomial");
    PadicPoly::from_coeffs(f.p(), (1..=n).map(|i| f.coeff(i)).collect())
}

// ---------------------------------------------------------------------------
// Certified factorization
// ---------------------------------------------------------------------------

/// An irreducible factor with its field invariants.
#[derive(Clone, Debug)]
pub(crate) struct FactorCert {
    pub poly: PadicPoly,
    pub e: usize,
    pub f: usize,
}

impl FactorCert {
    fn field_degree(&self) -> usize {
        self.e * self.f
    }
}

/// Certified factorization of a monic squarefree-expected polynomial over
/// `F` into irreducibles, within the calculus described in the module docs.
fn certified_factors(f: &PadicPoly, depth: u32, allow_reverse: bool) -> Result<Vec<FactorCert>> {
    let p = f.p();
    let deg = f
        .degree()
        .ok_or_else(|| Error::InvalidParameter("factorization of zero polynomial".into()))?;
    if deg == 0 {
        return Ok(vec![]);
    }
    if deg == 1 {
        // Monic linear polynomials are irreducible whatever the constant
        // term looks like (including an uncertified zeroish one left behind
        // by a refinement shift).
        return Ok(vec![FactorCert {
            poly: f.clone(),
            e: 1,
            f: 1,
        }]);
    }
    // Exact zero roots: at most one X factor is consistent with squarefree.
    if f.coeff(0).is_exact_zero() {
        let wprec = ident_prec([f]);
        let rest = divide_by_x(f);
        if rest.degree() == Some(0) {
            return Ok(vec![FactorCert {
                poly: PadicPoly::x(p, wprec),
                e: 1,
                f: 1,
            }]);
        }
        if rest.coeff(0).is_exact_zero() {
            return Err(Error::NotSemiPure(
                "minimal polynomial is divisible by X²".into(),
            ));
        }
        let mut out = certified_factors(&rest, depth, true)?;
        out.push(FactorCert {
            poly: PadicPoly::x(p, wprec),
            e: 1,
            f: 1,
        });
        return Ok(out);
    }

    let polygon = NewtonPolygon::of(f)?;
    debug_assert_eq!(polygon.zero_roots, 0);
    if polygon.uncertain_roots > 0 {
        // A zeroish low-order cluster sits strictly above the certified
        // segments.  Splitting at the smallest certified root valuation
        // moves the cluster into the residue class of 0, coprime to the
        // bottom residual (whose constant digit is a unit), so the Hensel
        // split below separates it; recursion then resolves the cluster on
        // certified coefficients of smaller degree.
        let bottom = polygon.segments.last().ok_or_else(|| {
            Error::InsufficientPrecision(
                "low-order coefficients carry no certified valuation structure".into(),
            )
        })?;
        let (num, den) = bottom.root_valuation();
        if den != 1 {
            return Err(Error::CertificationUnavailable(
                "cannot separate an uncertified low-order cluster at a fractional \
                 valuation"
                    .into(),
            ));
        }
        return split_at_valuation(f, num, depth);
    }
    if polygon.segments.len() == 1 {
        match polygon.irreducibility() {
            IrredVerdict::Irreducible { e, f: fres } => {
                return Ok(vec![FactorCert {
                    poly: f.clone(),
                    e: e as usize,
                    f: fres as usize,
                }])
            }
            IrredVerdict::Reducible | IrredVerdict::Unknown => {
                let (num, den) = polygon.segments[0].root_valuation();
                if den != 1 {
                    return Err(Error::CertificationUnavailable(
                        "cannot split a fractional-valuation class with reducible or \
                         ambiguous residual"
                            .into(),
                    ));
                }
                return split_at_valuation(f, num, depth);
            }
        }
    }

    // Several valuation classes: peel at an integer extremal valuation.
    let vals: Vec<(i64, i64)> = polygon
        .segments
        .iter()
        .map(|s| s.root_valuation())
        .collect();
    let v_min = vals
        .iter()
        .copied()
        .min_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)))
        .expect("polygon has segments");
    let v_max = vals
        .iter()
        .copied()
        .max_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)))
        .expect("polygon has segments");
    if v_min.1 == 1 {
        return split_at_valuation(f, v_min.0, depth);
    }
    if allow_reverse && v_max.1 == 1 {
        let rev = reverse_monic(f)?;
        let certs = certified_factors(&rev, depth, false)?;
        return certs
            .into_iter()
            .map(|c| {
                Ok(FactorCert {
                    poly: reverse_monic(&c.poly)?,
                    e: c.e,
                    f: c.f,
                })
            })
            .collect();
    }
    Err(Error::CertificationUnavailable(
        "several fractional valuation classes; splitting them needs machinery \
         beyond the implemented calculus"
            .into(),
    ))
}

/// Split `f` along the residue factorization of `p^{-w·deg} f(p^w X)`
/// (`w` an integer attained-or-bounding root valuation), Hensel-lifting the
/// coprime residual groups; single repeated linear residuals trigger an Ore
/// refinement shift.
fn split_at_valuation(f: &PadicPoly, w: i64, depth: u32) -> Result<Vec<FactorCert>> {
    let p = f.p();
    let g = f.substitute_scaled(w);
    let gbar = g.reduce_mod_p()?;
    let (_, residue_factors) = gbar.factor()?;
    if residue_factors.len() >= 2 {
        let groups: Vec<ResiduePoly> = residue_factors
            .iter()
            .map(|(q, mult)| {
                let mut acc = ResiduePoly::one(p, 1);
                for _ in 0..*mult {
                    acc = acc.mul(q);
                }
                acc
            })
            .collect();
        let lifts = g.hensel_lift(&groups)?;
        let mut out = Vec::new();
        for lift in lifts {
            let back = lift.substitute_scaled(-w);
            out.extend(certified_factors(&back, depth, true)?);
        }
        return Ok(out);
    }
    let (q, mult) = &residue_factors[0];
    if *mult == 1 {
        // Single irreducible residual at an integer slope: irreducible with
        // e = 1, f = deg q (unreachable from the polygon dispatch, kept for
        // completeness).
        return Ok(vec![FactorCert {
            poly: f.clone(),
            e: 1,
            f: q.degree().unwrap_or(1),
        }]);
    }
    if q.degree() != Some(1) {
        return Err(Error::CertificationUnavailable(
            "repeated non-linear residual: refinement over residue extensions is \
             not implemented"
                .into(),
        ));
    }
    if depth == 0 {
        return Err(Error::CertificationUnavailable(
            "refinement depth exhausted while separating close valuation clusters".into(),
        ));
    }
    // Ore refinement: shift by the cluster center ρ p^w and retry.
    let rho = {
        let c0 = q.coeff(0);
        let c = c0.coords()[0];
        (p - c % p) % p
    };
    let center = PadicScalar::from_integer(p, rho as i64, ident_prec([f])).shift(w);
    let shifted = taylor_shift(f, &center);
    let certs = certified_factors(&shifted, depth - 1, true)?;
    Ok(certs
        .into_iter()
        .map(|c| FactorCert {
            poly: taylor_shift(&c.poly, &center.neg()),
            e: c.e,
            f: c.f,
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Matrix-level helpers
// ---------------------------------------------------------------------------

/// Evaluate a polynomial at a matrix argument (Horner).
fn eval_at_matrix(poly: &PadicPoly, x: &AMatrix) -> Result<AMatrix> {
    let ctx = x.ctx();
    let n = match poly.degree() {
        None => return Ok(AMatrix::zero(ctx)),
        Some(n) => n,
    };
    let scalar = |c: &PadicScalar| {
        AMatrix::scalar(ctx, &crate::csa::DElement::from_f(ctx, c.clone()))
    };
    let mut acc = scalar(&poly.coeff(n));
    for i in (0..n).rev() {
        acc = acc.mul(x)?.add(&scalar(&poly.coeff(i)));
    }
    Ok(acc)
}

/// The largest level `L ≤ cap` with `x ≡ 0 mod p^L` certified coordinatewise;
/// a coordinate with certified nonzero digits is a hard failure.
fn certified_zero_level(x: &AMatrix, cap: i64) -> Result<i64> {
    let mut level = cap;
    for c in x.f_coords() {
        if c.is_exact_zero() {
            continue;
        }
        if c.is_unknown() {
            level = level.min(c.vlb());
        } else {
            // Certified nonzero digits: the identity genuinely fails.
            return Err(Error::CertificationUnavailable(
                "a splitting identity is certifiably violated".into(),
            ));
        }
    }
    if level < 1 {
        return Err(Error::InsufficientPrecision(
            "splitting identities cannot be verified to a single digit".into(),
        ));
    }
    Ok(level)
}

/// Recover a small certified non-negative integer from a scalar known to be
/// one mathematically (e.g. the reduced trace of an idempotent).
fn expect_small_integer(s: &PadicScalar, bound: u64) -> Result<u64> {
    let p = s.p();
    if s.is_exact_zero() {
        return Ok(0);
    }
    let mut k = 1u32;
    let mut modulus = p;
    while modulus <= bound {
        modulus *= p;
        k += 1;
    }
    let residue = s.scaled_residue(0, k)?;
    let val = u64::try_from(&residue).map_err(|_| {
        Error::InvalidParameter("residue exceeds the expected integer bound".into())
    })?;
    if val > bound {
        return Err(Error::CertificationUnavailable(format!(
            "expected an integer in [0, {bound}], found residue {val}"
        )));
    }
    Ok(val)
}

// ---------------------------------------------------------------------------
// Stratum-level certification
// ---------------------------------------------------------------------------

impl Stratum {
    /// The certified semi-purity data of the stratum (cached, write-once).
    ///
    /// Errors: [`Error::NotSemiPure`] when the input is certifiably not
    /// semi-pure (square factors, incompatible lattice), and
    /// [`Error::CertificationUnavailable`] when the implemented calculus
    /// cannot decide.
    pub fn splitting(&self) -> Result<&SplittingData> {
        if let Some(s) = self.split_cache.get() {
            return Ok(s);
        }
        let data = self.compute_splitting()?;
        let _ = self.split_cache.set(data);
        Ok(self.split_cache.get().expect("cache filled above"))
    }

    fn compute_splitting(&self) -> Result<SplittingData> {
        let ctx = *self.ctx();
        let p = ctx.p;
        let md = (ctx.m * ctx.d) as u64;

        // Zero β: E = F, one block covering everything.
        if self.beta().is_exact_zero() {
            return Ok(SplittingData {
                idempotents: vec![AMatrix::identity(&ctx)],
                blocks: vec![BlockData {
                    factor: PadicPoly::x(p, ctx.prec),
                    e: 1,
                    f: 1,
                    dim_d: ctx.m,
                }],
                check_level: ctx.prec as i64,
            });
        }

        // Minimal polynomial of β over F, then a certified factorization.
        // The Krylov solve works on the integral rescaling p^u β (negative
        // valuations would silently eat absolute precision during the
        // elimination); the polynomial is scaled back afterwards.
        let mut split = self.beta().split_to_l()?;
        let mut u = 0i64;
        for i in 0..split.rows() {
            for j in 0..split.cols() {
                for c in split.at(i, j).coords() {
                    u = u.max(-c.vlb());
                }
            }
        }
        let u = u.max(0);
        if u > 0 {
            for i in 0..split.rows() {
                for j in 0..split.cols() {
                    let shifted = split.at(i, j).shift(u);
                    *split.at_mut(i, j) = shifted;
                }
            }
        }
        let mu_scaled =
            crate::arith::lmat::min_poly_padic(&split, ctx.prec as i64)?;
        let mu = mu_scaled.substitute_scaled(u);
        let factors = certified_factors(&mu, MAX_REFINEMENTS, true)?;

        // Pairwise coprimality (squarefree μ): Bézout certificates double as
        // the idempotent ingredients below.
        let polys: Vec<&PadicPoly> = factors.iter().map(|c| &c.poly).collect();
        for i in 0..polys.len() {
            for j in (i + 1)..polys.len() {
                let (g, _, _) = poly_xgcd(polys[i], polys[j])?;
                if g.degree() != Some(0) {
                    return Err(Error::NotSemiPure(
                        "minimal polynomial has a repeated factor".into(),
                    ));
                }
            }
        }

        // Verify the factorization against μ.
        let factor_prec = {
            let mut polys: Vec<&PadicPoly> = factors.iter().map(|c| &c.poly).collect();
            polys.push(&mu);
            ident_prec(polys)
        };
        let mut prod = PadicPoly::one(p, factor_prec);
        for c in &factors {
            prod = prod.mul(&c.poly);
        }
        let poly_level = {
            let diff = prod.sub(&mu);
            let mut lvl = ctx.prec as i64;
            for c in diff.coeffs() {
                if c.is_exact_zero() {
                    continue;
                }
                if c.is_unknown() {
                    lvl = lvl.min(c.vlb());
                } else {
                    return Err(Error::CertificationUnavailable(
                        "factor product certifiably differs from the minimal polynomial"
                            .into(),
                    ));
                }
            }
            if lvl < 1 {
                return Err(Error::InsufficientPrecision(
                    "factorization cannot be verified to a single digit".into(),
                ));
            }
            lvl
        };

        // Idempotents 1^i = (a_i · μ/μ_i)(β) via Bézout.
        let mut idempotents = Vec::with_capacity(factors.len());
        for (i, cert) in factors.iter().enumerate() {
            let mut cofactor = PadicPoly::one(p, factor_prec);
            for (j, other) in factors.iter().enumerate() {
                if j != i {
                    cofactor = cofactor.mul(&other.poly);
                }
            }
            let (g, a, _) = poly_xgcd(&cofactor, &cert.poly)?;
            if g.degree() != Some(0) {
                return Err(Error::NotSemiPure(
                    "minimal polynomial has a repeated factor".into(),
                ));
            }
            let p_i = a.mul(&cofactor);
            idempotents.push(eval_at_matrix(&p_i, self.beta())?);
        }

        // Verify the decomposition.
        let mut check_level = poly_level;
        let mut sum = AMatrix::zero(&ctx);
        for e in &idempotents {
            sum = sum.add(e);
        }
        check_level =
            check_level.min(certified_zero_level(&sum.sub(&AMatrix::identity(&ctx)), check_level)?);
        for (i, ei) in idempotents.iter().enumerate() {
            check_level = check_level
                .min(certified_zero_level(&ei.mul(ei)?.sub(ei), check_level)?);
            check_level = check_level
                .min(certified_zero_level(&ei.bracket(self.beta())?, check_level)?);
            for ej in idempotents.iter().skip(i + 1) {
                check_level =
                    check_level.min(certified_zero_level(&ei.mul(ej)?, check_level)?);
            }
        }

        // Lattice compatibility and block dimensions.
        let e_f = self.lat().e_f();
        let mut blocks = Vec::with_capacity(factors.len());
        let mut total_dim = 0usize;
        for (cert, ei) in factors.iter().zip(&idempotents) {
            match self.lat().contains_in_square(ei, 0) {
                Ok(true) => {}
                Ok(false) => {
                    return Err(Error::NotSemiPure(
                        "a block idempotent does not stabilize the lattice sequence".into(),
                    ))
                }
                Err(e) => return Err(e),
            }
            if e_f % cert.e as i64 != 0 {
                return Err(Error::NotSemiPure(format!(
                    "block ramification e = {} does not divide e(Λ|F) = {e_f}",
                    cert.e
                )));
            }
            let trd = ei.trd()?;
            let m_i_d = expect_small_integer(&trd, md)?;
            if m_i_d == 0 || m_i_d % ctx.d as u64 != 0 {
                return Err(Error::CertificationUnavailable(format!(
                    "block dimension trd(1^i) = {m_i_d} is not a positive multiple of d"
                )));
            }
            let dim_d = (m_i_d / ctx.d as u64) as usize;
            if (m_i_d as usize) % cert.field_degree() != 0 {
                return Err(Error::NotSemiPure(format!(
                    "[E_i:F] = {} does not divide m_i·d = {m_i_d}",
                    cert.field_degree()
                )));
            }
            total_dim += dim_d;
            blocks.push(BlockData {
                factor: cert.poly.clone(),
                e: cert.e,
                f: cert.f,
                dim_d,
            });
        }
        if total_dim != ctx.m {
            return Err(Error::CertificationUnavailable(format!(
                "block dimensions sum to {total_dim}, expected m = {}",
                ctx.m
            )));
        }

        // Block valuations must be integral over E_i (skip certified-zero
        // blocks, where β_i vanishes).
        for (cert, ei) in blocks.iter().zip(&idempotents) {
            let beta_i = ei.mul(self.beta())?;
            if beta_i.is_exact_zero() {
                continue;
            }
            let nu = match self.lat().nu(&beta_i) {
                Ok(v) => v,
                Err(Error::IndeterminateValuation(_)) => continue,
                Err(e) => return Err(e),
            };
            if nu == i64::MAX {
                continue;
            }
            if (nu * cert.e as i64) % e_f != 0 {
                return Err(Error::NotSemiPure(format!(
                    "block valuation ν_Λ(β_i) = {nu} is not integral over E_i \
                     (e_i = {}, e(Λ|F) = {e_f})",
                    cert.e
                )));
            }
        }

        Ok(SplittingData {
            idempotents,
            blocks,
            check_level,
        })
    }

    /// Group level `⌊r / e(Λ|E)⌋`; `None` encodes `+∞` (zero strata).
    pub fn group_level(&self) -> Result<Option<i64>> {
        if self.is_zero() {
            return Ok(None);
        }
        let split = self.splitting()?;
        let e = split.e_lambda_e(self.lat().e_f());
        Ok(Some(self.r().div_euclid(e)))
    }

    /// Degree `dim_F E` of a certified semi-pure stratum.
    pub fn degree(&self) -> Result<usize> {
        Ok(self.splitting()?.degree())
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

    fn poly(p: u64, coeffs: &[i64]) -> PadicPoly {
        PadicPoly::from_integer_coeffs(p, coeffs, 24)
    }

    #[test]
    fn divmod_and_xgcd_roundtrip() {
        let p = 5;
        let f = poly(p, &[2, 0, 1]); // X² + 2
        let g = poly(p, &[1, 1]); // X + 1
        let (q, r) = poly_divmod(&f, &g).unwrap();
        let back = q.mul(&g).add(&r);
        assert!(back.congruent_mod(&f, 20).unwrap());
        let (gcd, a, b) = poly_xgcd(&f, &g).unwrap();
        assert_eq!(gcd.degree(), Some(0));
        let ident = a.mul(&f).add(&b.mul(&g));
        assert!(ident.congruent_mod(&gcd, 18).unwrap());
    }

    #[test]
    fn taylor_shift_reverses() {
        let p = 3;
        let f = poly(p, &[1, 4, 2, 1]);
        let c = PadicScalar::from_integer(p, 7, 24);
        let shifted = taylor_shift(&f, &c);
        let back = taylor_shift(&shifted, &c.neg());
        assert!(back.congruent_mod(&f, 20).unwrap());
        // f(X+c) at 0 equals f(c).
        let v = shifted.coeff(0);
        assert!(v.sub(&f.eval(&c)).is_zero_mod(20).unwrap());
    }

    #[test]
    fn factors_split_residues() {
        // (X-1)(X-2) over Q₅: distinct residues split by Hensel.
        let f = poly(5, &[2, -3, 1]);
        let certs = certified_factors(&f, 4, true).unwrap();
        assert_eq!(certs.len(), 2);
        assert!(certs.iter().all(|c| c.e == 1 && c.f == 1));
    }

    #[test]
    fn factors_split_distinct_valuations() {
        // (X - p)(X - p²·u): two integer valuation classes.
        let p = 3;
        let f = poly(p, &[0, 3, 1]); // X² + 3X = X(X+3): zero root + val-1 root
        let certs = certified_factors(&f, 4, true).unwrap();
        assert_eq!(certs.len(), 2);
        // (X - 3)(X - 9) = X² - 12X + 27.
        let g = poly(p, &[27, -12, 1]);
        let certs = certified_factors(&g, 4, true).unwrap();
        assert_eq!(certs.len(), 2);
        assert!(certs.iter().all(|c| c.e == 1 && c.f == 1));
    }

    #[test]
    fn factors_certify_eisenstein_and_unramified() {
        // X² - 3 over Q₃: e = 2, f = 1.
        let f = poly(3, &[-3, 0, 1]);
        let certs = certified_factors(&f, 4, true).unwrap();
        assert_eq!(certs.len(), 1);
        assert_eq!((certs[0].e, certs[0].f), (2, 1));
        // X² + 1 over Q₃: unramified quadratic.
        let g = poly(3, &[1, 0, 1]);
        let certs = certified_factors(&g, 4, true).unwrap();
        assert_eq!(certs.len(), 1);
        assert_eq!((certs[0].e, certs[0].f), (1, 2));
    }

    #[test]
    fn factors_refine_close_clusters() {
        // (X - 1)(X - 1 - 3): same residue class mod 3, split by one Ore
        // shift.
        let f = poly(3, &[4, -5, 1]);
        let certs = certified_factors(&f, 4, true).unwrap();
        assert_eq!(certs.len(), 2);
    }

    #[test]
    fn factors_reject_inseparable_looking_input() {
        // X² stripped twice → NotSemiPure.
        let f = poly(3, &[0, 0, 1]);
        match certified_factors(&f, 4, true) {
            Err(Error::NotSemiPure(_)) => {}
            other => panic!("expected NotSemiPure, got {other:?}"),
        }
    }

    #[test]
    fn factors_mixed_fractional_and_integer() {
        // (X² - 3)(X - 1): fractional class plus an integer class.
        let f = poly(3, &[3, -3, -1, 1]);
        let certs = certified_factors(&f, 4, true).unwrap();
        assert_eq!(certs.len(), 2);
        let mut efs: Vec<(usize, usize)> = certs.iter().map(|c| (c.e, c.f)).collect();
        efs.sort();
        assert_eq!(efs, vec![(1, 1), (2, 1)]);
    }

    #[test]
    fn splitting_single_scalar_block() {
        let c = ctx(3, 1, 1);
        let lat = LatticeSeq::standard_maximal(&c);
        let beta = AMatrix::scalar(&c, &DElement::from_f(&c, PadicScalar::p_power(3, -1, 24)));
        let s = Stratum::new(lat, 1, 0, beta).unwrap();
        let split = s.splitting().unwrap();
        assert_eq!(split.blocks.len(), 1);
        assert_eq!(split.degree(), 1);
        assert_eq!(s.degree().unwrap(), 1);
        assert_eq!(s.group_level().unwrap(), Some(0));
    }

    #[test]
    fn splitting_two_blocks_with_idempotents() {
        // β = diag(p^{-1}, p^{-2}·2) in M₂(Q₃): E = F × F.
        let c = ctx(3, 1, 2);
        let lat = LatticeSeq::standard_maximal(&c);
        let mut beta = AMatrix::zero(&c);
        *beta.at_mut(0, 0) = DElement::from_f(&c, PadicScalar::p_power(3, -1, 24));
        *beta.at_mut(1, 1) = DElement::from_f(
            &c,
            PadicScalar::from_integer(3, 2, 24).mul(&PadicScalar::p_power(3, -2, 24)),
        );
        let s = Stratum::new(lat, 2, 0, beta).unwrap();
        let split = s.splitting().unwrap();
        assert_eq!(split.blocks.len(), 2);
        assert_eq!(split.degree(), 2);
        assert_eq!(split.centralizer_dim_f(&c), 2);
        assert!(split.check_level >= 1);
        // Idempotents are diag(1,0) and diag(0,1) up to precision.
        let e0 = &split.idempotents[0];
        let sums = e0.add(&split.idempotents[1]);
        let lvl = certified_zero_level(
            &sums.sub(&AMatrix::identity(&c)),
            split.check_level,
        )
        .unwrap();
        assert!(lvl >= 1);
        assert_eq!(s.group_level().unwrap(), Some(0));
    }

    #[test]
    fn splitting_quaternion_uniformizer() {
        // β = π_D^{-1} in the quaternion algebra: E = F[π_D] ramified
        // quadratic, e = 2, f = 1.
        let c = ctx(3, 2, 1);
        let lat = LatticeSeq::standard_maximal(&c);
        let beta = AMatrix::scalar(&c, &DElement::pi(&c)).inverse().unwrap();
        let s = Stratum::new(lat, 1, 0, beta).unwrap();
        let split = s.splitting().unwrap();
        assert_eq!(split.blocks.len(), 1);
        assert_eq!((split.blocks[0].e, split.blocks[0].f), (2, 1));
        assert_eq!(split.e_lambda_e(s.lat().e_f()), 1);
        assert_eq!(s.degree().unwrap(), 2);
        // r = 0, e(Λ|E) = 1: group level 0.
        assert_eq!(s.group_level().unwrap(), Some(0));
    }

    #[test]
    fn splitting_unramified_witness() {
        // β = ω/p in the quaternion algebra: E = L unramified quadratic.
        let c = ctx(3, 2, 1);
        let lat = LatticeSeq::standard_maximal(&c);
        let omega = crate::arith::unram::UnramifiedElement::generator(3, 2, 24).unwrap();
        let beta = AMatrix::scalar(&c, &DElement::from_l(&c, omega.shift(-1)).unwrap());
        let s = Stratum::new(lat, 2, 1, beta).unwrap();
        let split = s.splitting().unwrap();
        assert_eq!(split.blocks.len(), 1);
        assert_eq!((split.blocks[0].e, split.blocks[0].f), (1, 2));
        assert_eq!(split.e_lambda_e(s.lat().e_f()), 2);
        // Group level: r = 1, e(Λ|E) = 2 → 0.
        assert_eq!(s.group_level().unwrap(), Some(0));
    }

    #[test]
    fn zero_stratum_splitting_and_group_level() {
        let c = ctx(3, 1, 2);
        let lat = LatticeSeq::standard_maximal(&c);
        let s = Stratum::zero(lat, 3).unwrap();
        let split = s.splitting().unwrap();
        assert_eq!(split.blocks.len(), 1);
        assert_eq!(split.blocks[0].dim_d, 2);
        assert_eq!(s.group_level().unwrap(), None);
        assert_eq!(s.degree().unwrap(), 1);
    }
}
