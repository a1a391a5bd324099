//! The central division algebra `D` and the ambient algebra `A = M_m(D)`.
//!
//! `D` is presented cyclically: fix the unramified extension `L/F` of degree
//! `d` (per the [`arith`](crate::arith) tables) and a uniformizer `pi_D` with
//!
//! ```text
//! pi_D a pi_D^{-1} = phi(a)   (a in L, phi = Frobenius of L/F),
//! pi_D^d = p.
//! ```
//!
//! Elements of `D` are stored as left coefficient vectors `x = sum a_i
//! pi_D^i` with `a_i in L`.  The split case `d = 1` is the degenerate
//! instance `D = F`, `pi_D = p` — same code path throughout.
//!
//! `A = M_m(D)` acts on the left of the right `D`-vector space `V = D^m`
//! (column vectors, fixed ordered basis `e_1..e_m`).  Two base-change
//! functors are provided:
//!
//! * [`AMatrix::split_to_L`]: the left regular representation of `D` over `L`
//!   turns `A` into `(md)x(md)` matrices over `L` — an injective algebra
//!   homomorphism realizing `A ⊗_F L ≅ M_{md}(L)`.  Reduced trace and norm
//!   are read off its trace and determinant and certified to lie in `F`.
//! * [`AMatrix::restrict_to_F`]: expanding `L`-entries by the regular
//!   representation of `L/F` gives the faithful action on the
//!   `(m d^2)`-dimensional `F`-vector space underlying `V`.

use rand::Rng;

use crate::arith::lmat::LMatrix;
use crate::arith::padic::PadicScalar;
use crate::arith::unram::UnramifiedElement;
use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Algebra context
// ---------------------------------------------------------------------------

/// Shared parameters of the ambient algebra `A = M_m(D)`: the prime, the
/// index `d` of `D`, the matrix size `m`, and the default working precision
/// for newly created constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AlgebraCtx {
    /// Residue characteristic of `F = Q_p`.
    pub p: u64,
    /// Index of the division algebra (`deg D = d^2`, `D = F` iff `d = 1`).
    pub d: usize,
    /// Size of the matrix algebra `A = M_m(D)`.
    pub m: usize,
    /// Default relative precision (in base-`p` digits) for constants.
    pub prec: u32,
}

impl AlgebraCtx {
    /// Creates a context, validating that the arithmetic tables support the
    /// requested parameters.
    pub fn new(p: u64, d: usize, m: usize, prec: u32) -> Result<Self> {
        if !crate::arith::fq::SUPPORTED_PRIMES.contains(&p) {
            return Err(Error::InvalidParameter(format!("unsupported prime {p}")));
        }
        if !crate::arith::fq::SUPPORTED_DEGREES.contains(&d) {
            return Err(Error::InvalidParameter(format!(
                "unsupported division-algebra index {d}"
            )));
        }
        if m == 0 {
            return Err(Error::InvalidParameter("matrix size m must be >= 1".into()));
        }
        if prec == 0 {
            return Err(Error::InvalidParameter("precision must be >= 1".into()));
        }
        Ok(AlgebraCtx { p, d, m, prec })
    }

    /// `dim_F V = m d^2` — the size of the scalar restriction.
    pub fn dim_f(&self) -> usize {
        self.m * self.d * self.d
    }

    /// `dim_F A = (md)^2` — the number of flat monomial coordinates of `A`.
    pub fn dim_a(&self) -> usize {
        self.m * self.m * self.d * self.d
    }

    /// `md` — the size of the split representation over `L`.
    pub fn split_dim(&self) -> usize {
        self.m * self.d
    }
}

// ---------------------------------------------------------------------------
// Elements of D
// ---------------------------------------------------------------------------

/// An element of `D`, stored as left coefficients `x = sum_i coeffs[i] *
/// pi_D^i` with `coeffs[i] in L` and `0 <= i < d`.
#[derive(Clone, Debug)]
pub struct DElement {
    p: u64,
    d: usize,
    coeffs: Vec<UnramifiedElement>,
}

impl DElement {
    pub fn zero(ctx: &AlgebraCtx) -> Self {
        DElement {
            p: ctx.p,
            d: ctx.d,
            coeffs: (0..ctx.d)
                .map(|_| UnramifiedElement::zero(ctx.p, ctx.d))
                .collect(),
        }
    }

    pub fn one(ctx: &AlgebraCtx) -> Self {
        let mut x = DElement::zero(ctx);
        x.coeffs[0] = UnramifiedElement::one(ctx.p, ctx.d, ctx.prec);
        x
    }

    /// The chosen uniformizer `pi_D` (equals `p` itself when `d = 1`).
    pub fn pi(ctx: &AlgebraCtx) -> Self {
        let mut x = DElement::zero(ctx);
        if ctx.d == 1 {
            x.coeffs[0] = UnramifiedElement::from_scalar(
                1,
                PadicScalar::p_power(ctx.p, 1, ctx.prec),
            );
        } else {
            x.coeffs[1] = UnramifiedElement::one(ctx.p, ctx.d, ctx.prec);
        }
        x
    }

    /// Embeds `a in L` (so `a` must live in the degree-`d` table field).
    pub fn from_l(ctx: &AlgebraCtx, a: UnramifiedElement) -> Result<Self> {
        if a.f() != ctx.d || a.p() != ctx.p {
            return Err(Error::InvalidParameter(
                "coefficient field does not match the algebra context".into(),
            ));
        }
        let mut x = DElement::zero(ctx);
        x.coeffs[0] = a;
        Ok(x)
    }

    /// Embeds a scalar of `F`.
    pub fn from_f(ctx: &AlgebraCtx, s: PadicScalar) -> Self {
        let mut x = DElement::zero(ctx);
        x.coeffs[0] = UnramifiedElement::from_scalar(ctx.d, s);
        x
    }

    /// Builds an element from explicit left coefficients (length `d`).
    pub fn from_coeffs(ctx: &AlgebraCtx, coeffs: Vec<UnramifiedElement>) -> Result<Self> {
        if coeffs.len() != ctx.d {
            return Err(Error::InvalidParameter(format!(
                "expected {} pi_D-coefficients, got {}",
                ctx.d,
                coeffs.len()
            )));
        }
        for c in &coeffs {
            if c.f() != ctx.d || c.p() != ctx.p {
                return Err(Error::InvalidParameter(
                    "coefficient field does not match the algebra context".into(),
                ));
            }
        }
        Ok(DElement {
            p: ctx.p,
            d: ctx.d,
            coeffs,
        })
    }

    /// A random integral element (uniform residue digits), for sampling laws.
    pub fn random_integral<R: Rng>(ctx: &AlgebraCtx, digits: u32, rng: &mut R) -> Self {
        DElement {
            p: ctx.p,
            d: ctx.d,
            coeffs: (0..ctx.d)
                .map(|_| UnramifiedElement::random_integral(ctx.p, ctx.d, digits, ctx.prec, rng))
                .collect(),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Left coefficients `a_0..a_{d-1}` with `x = sum a_i pi_D^i`.
    pub fn coeffs(&self) -> &[UnramifiedElement] {
        &self.coeffs
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.iter().all(UnramifiedElement::is_exact_zero)
    }

    // ------------------------------------------------------------------
    // Valuation
    // ------------------------------------------------------------------

    /// Lower bound for the valuation `nu_D` (normalized by `nu_D(pi_D) = 1`,
    /// so `nu_D|_F = d * v_F`).  Exact zeros contribute nothing; the all-zero
    /// element reports `i64::MAX`.
    pub fn nu_lb(&self) -> i64 {
        let mut best = i64::MAX;
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            best = best.min((self.d as i64) * a.vlb() + i as i64);
        }
        best
    }

    /// The valuation `nu_D(x)`, when determinate.
    ///
    /// Writing `x = sum a_i pi_D^i`, the candidate values `d*v_L(a_i) + i`
    /// are pairwise distinct mod `d`, so the minimum is attained by exactly
    /// one term; it is certified when that term has exactly known valuation
    /// and every other term has a lower bound at least as large.
    pub fn nu(&self) -> Result<i64> {
        if self.is_exact_zero() {
            return Err(Error::IndeterminateValuation(
                "valuation of the zero element of D".into(),
            ));
        }
        let lb = self.nu_lb();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            if let Ok(v) = a.valuation() {
                if (self.d as i64) * v + i as i64 == lb {
                    return Ok(lb);
                }
            }
        }
        Err(Error::InsufficientPrecision(format!(
            "nu_D only bounded below by {lb}"
        )))
    }

    // ------------------------------------------------------------------
    // Ring operations
    // ------------------------------------------------------------------

    pub fn add(&self, other: &DElement) -> DElement {
        assert_eq!(self.d, other.d, "mixed division algebras");
        DElement {
            p: self.p,
            d: self.d,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> DElement {
        DElement {
            p: self.p,
            d: self.d,
            coeffs: self.coeffs.iter().map(UnramifiedElement::neg).collect(),
        }
    }

    pub fn sub(&self, other: &DElement) -> DElement {
        self.add(&other.neg())
    }

    /// Noncommutative product via the defining relations: `(a pi^i)(b pi^j) =
    /// a phi^i(b) pi^{i+j}` and `pi^d = p`.
    pub fn mul(&self, other: &DElement) -> Result<DElement> {
        assert_eq!(self.d, other.d, "mixed division algebras");
        let d = self.d;
        let mut coeffs: Vec<UnramifiedElement> =
            (0..d).map(|_| UnramifiedElement::zero(self.p, d)).collect();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_exact_zero() {
                    continue;
                }
                let tw = b.frobenius_iter(i as i64)?;
                let term = a.mul(&tw);
                let k = i + j;
                if k < d {
                    coeffs[k] = coeffs[k].add(&term);
                } else {
                    // pi^{i+j} = p * pi^{i+j-d}
                    coeffs[k - d] = coeffs[k - d].add(&term.shift(1));
                }
            }
        }
        Ok(DElement {
            p: self.p,
            d,
            coeffs,
        })
    }

    /// Multiplies by `pi_D^k` on the left for integer `k` (negative powers
    /// use `pi^{-1} = p^{-1} pi^{d-1}`).
    pub fn mul_pi_pow_left(&self, ctx: &AlgebraCtx, k: i64) -> Result<DElement> {
        let d = self.d as i64;
        let q = k.div_euclid(d);
        let s = k.rem_euclid(d) as usize;
        let mut x = self.clone();
        if s > 0 {
            let mut pi_s = DElement::zero(ctx);
            pi_s.coeffs[s] = UnramifiedElement::one(ctx.p, ctx.d, ctx.prec);
            x = pi_s.mul(&x)?;
        }
        // pi^{qd} = p^q is central.
        Ok(DElement {
            p: x.p,
            d: x.d,
            coeffs: x.coeffs.iter().map(|c| c.shift(q)).collect(),
        })
    }

    /// Conjugation action of the uniformizer: `tau(x) = pi_D x pi_D^{-1}`,
    /// which applies the Frobenius to each left coefficient.
    pub fn tau(&self) -> Result<DElement> {
        Ok(DElement {
            p: self.p,
            d: self.d,
            coeffs: self
                .coeffs
                .iter()
                .map(UnramifiedElement::frobenius)
                .collect::<Result<_>>()?,
        })
    }

    // ------------------------------------------------------------------
    // The regular representation over L
    // ------------------------------------------------------------------

    /// Matrix of left multiplication by `self` on `D` as a *right* `L`-module
    /// with basis `pi^0, ..., pi^{d-1}`: `x * pi^j = sum_i pi^i M_ij` with
    /// `M_ij in L`.  This map is an injective algebra homomorphism.
    pub fn split_matrix(&self) -> Result<LMatrix> {
        let d = self.d;
        let mut mat = LMatrix::zero(self.p, d, d, d);
        for j in 0..d {
            for (i, a) in self.coeffs.iter().enumerate() {
                if a.is_exact_zero() {
                    continue;
                }
                let t = i + j;
                let (q, s) = (t / d, t % d);
                // a pi^{i+j} = pi^{i+j} phi^{-(i+j)}(a) = p^q pi^s phi^{-s}(a).
                let coef = a.frobenius_iter(-(s as i64))?.shift(q as i64);
                *mat.at_mut(s, j) = mat.at(s, j).add(&coef);
            }
        }
        Ok(mat)
    }

    /// Recovers a `DElement` from the first column of a split matrix: column
    /// zero holds the right coefficients `x = sum pi^i c_i`, and the left
    /// coefficients are `a_i = phi^i(c_i)`.
    pub fn from_split_column(ctx: &AlgebraCtx, mat: &LMatrix) -> Result<DElement> {
        if mat.rows() != ctx.d || mat.cols() != ctx.d {
            return Err(Error::InvalidParameter(
                "split matrix has wrong dimensions".into(),
            ));
        }
        let mut coeffs = Vec::with_capacity(ctx.d);
        for i in 0..ctx.d {
            coeffs.push(mat.at(i, 0).frobenius_iter(i as i64)?);
        }
        DElement::from_coeffs(ctx, coeffs)
    }

    /// Multiplicative inverse in `D`.
    pub fn inv(&self, ctx: &AlgebraCtx) -> Result<DElement> {
        let m = self.split_matrix()?;
        let minv = m.inverse()?;
        DElement::from_split_column(ctx, &minv)
    }

    /// Congruence test `x = y mod pi_D^k` (i.e. `nu_D(x - y) >= k`), decided
    /// honestly: errors when precision cannot settle it.
    pub fn congruent_mod_pi(&self, other: &DElement, k: i64) -> Result<bool> {
        let diff = self.sub(other);
        if diff.is_exact_zero() {
            return Ok(true);
        }
        if diff.nu_lb() >= k {
            return Ok(true);
        }
        // Some coefficient could still be small: decide per coefficient.
        for (i, a) in diff.coeffs.iter().enumerate() {
            // need d * v_L(a) + i >= k, i.e. v_L(a) >= ceil((k - i)/d)
            let need = (k - i as i64).div_euclid(self.d as i64)
                + i64::from((k - i as i64).rem_euclid(self.d as i64) != 0);
            if !a.is_zero_mod(need)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

// ---------------------------------------------------------------------------
// Matrices over D: the algebra A = M_m(D)
// ---------------------------------------------------------------------------

/// An element of `A = M_m(D) = End_D(V)`, acting on the left of column
/// vectors in the right `D`-space `V = D^m`.
#[derive(Clone, Debug)]
pub struct AMatrix {
    ctx: AlgebraCtx,
    entries: Vec<DElement>,
}

impl AMatrix {
    pub fn zero(ctx: &AlgebraCtx) -> Self {
        AMatrix {
            ctx: *ctx,
            entries: (0..ctx.m * ctx.m).map(|_| DElement::zero(ctx)).collect(),
        }
    }

    pub fn identity(ctx: &AlgebraCtx) -> Self {
        let mut a = AMatrix::zero(ctx);
        for k in 0..ctx.m {
            a.entries[k * ctx.m + k] = DElement::one(ctx);
        }
        a
    }

    /// Scalar matrix `x * I_m` for `x in D`.
    pub fn scalar(ctx: &AlgebraCtx, x: &DElement) -> Self {
        let mut a = AMatrix::zero(ctx);
        for k in 0..ctx.m {
            a.entries[k * ctx.m + k] = x.clone();
        }
        a
    }

    pub fn from_fn(ctx: &AlgebraCtx, mut f: impl FnMut(usize, usize) -> DElement) -> Self {
        let entries = (0..ctx.m * ctx.m)
            .map(|idx| f(idx / ctx.m, idx % ctx.m))
            .collect();
        AMatrix { ctx: *ctx, entries }
    }

    pub fn random_integral<R: Rng>(ctx: &AlgebraCtx, digits: u32, rng: &mut R) -> Self {
        let entries = (0..ctx.m * ctx.m)
            .map(|_| DElement::random_integral(ctx, digits, rng))
            .collect();
        AMatrix { ctx: *ctx, entries }
    }

    pub fn ctx(&self) -> &AlgebraCtx {
        &self.ctx
    }

    pub fn m(&self) -> usize {
        self.ctx.m
    }

    pub fn at(&self, k: usize, l: usize) -> &DElement {
        &self.entries[k * self.ctx.m + l]
    }

    pub fn at_mut(&mut self, k: usize, l: usize) -> &mut DElement {
        &mut self.entries[k * self.ctx.m + l]
    }

    pub fn is_exact_zero(&self) -> bool {
        self.entries.iter().all(DElement::is_exact_zero)
    }

    pub fn add(&self, other: &AMatrix) -> AMatrix {
        AMatrix {
            ctx: self.ctx,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> AMatrix {
        AMatrix {
            ctx: self.ctx,
            entries: self.entries.iter().map(DElement::neg).collect(),
        }
    }

    pub fn sub(&self, other: &AMatrix) -> AMatrix {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &AMatrix) -> Result<AMatrix> {
        let m = self.ctx.m;
        let mut out = AMatrix::zero(&self.ctx);
        for i in 0..m {
            for k in 0..m {
                let a = self.at(i, k);
                if a.is_exact_zero() {
                    continue;
                }
                for j in 0..m {
                    let b = other.at(k, j);
                    if b.is_exact_zero() {
                        continue;
                    }
                    let t = a.mul(b)?;
                    *out.at_mut(i, j) = out.at(i, j).add(&t);
                }
            }
        }
        Ok(out)
    }

    /// Left scalar multiple `x * self` for `x in D`.
    pub fn scale_left(&self, x: &DElement) -> Result<AMatrix> {
        let mut out = AMatrix::zero(&self.ctx);
        for i in 0..self.ctx.m {
            for j in 0..self.ctx.m {
                *out.at_mut(i, j) = x.mul(self.at(i, j))?;
            }
        }
        Ok(out)
    }

    /// Commutator bracket `[self, y] = self*y - y*self`.
    pub fn bracket(&self, y: &AMatrix) -> Result<AMatrix> {
        Ok(self.mul(y)?.sub(&y.mul(self)?))
    }

    // ------------------------------------------------------------------
    // Base change
    // ------------------------------------------------------------------

    /// The split representation over `L`: every `D`-entry is replaced by its
    /// `d x d` regular-representation block, producing an `(md) x (md)`
    /// matrix over `L` in the basis `e_k pi^i mapsto k*d + i`.
    pub fn split_to_l(&self) -> Result<LMatrix> {
        let (m, d) = (self.ctx.m, self.ctx.d);
        let n = m * d;
        let mut out = LMatrix::zero(self.ctx.p, d, n, n);
        for k in 0..m {
            for l in 0..m {
                let block = self.at(k, l).split_matrix()?;
                for i in 0..d {
                    for j in 0..d {
                        *out.at_mut(k * d + i, l * d + j) = block.at(i, j).clone();
                    }
                }
            }
        }
        Ok(out)
    }

    /// Reassembles an `AMatrix` from a split `(md) x (md)` matrix over `L`
    /// (the inverse of [`AMatrix::split_to_l`] on its image; entries are read
    /// off the first column of each block).
    pub fn from_split(ctx: &AlgebraCtx, mat: &LMatrix) -> Result<AMatrix> {
        let (m, d) = (ctx.m, ctx.d);
        if mat.rows() != m * d || mat.cols() != m * d {
            return Err(Error::InvalidParameter(
                "split matrix has wrong dimensions".into(),
            ));
        }
        let mut out = AMatrix::zero(ctx);
        for k in 0..m {
            for l in 0..m {
                let mut block = LMatrix::zero(ctx.p, d, d, d);
                for i in 0..d {
                    for j in 0..d {
                        *block.at_mut(i, j) = mat.at(k * d + i, l * d + j).clone();
                    }
                }
                *out.at_mut(k, l) = DElement::from_split_column(ctx, &block)?;
            }
        }
        Ok(out)
    }

    /// Inverse in `A`, computed through the split representation.
    pub fn inverse(&self) -> Result<AMatrix> {
        let inv = self.split_to_l()?.inverse()?;
        AMatrix::from_split(&self.ctx, &inv)
    }

    /// Reduced trace `trd_{A|F}`, certified to lie in `F`.
    pub fn trd(&self) -> Result<PadicScalar> {
        let tr = self.split_to_l()?.trace()?;
        tr.expect_base_rational().map_err(|_| {
            Error::InsufficientPrecision(
                "Galois invariance of the reduced trace not certified".into(),
            )
        })
    }

    /// Reduced norm `nrd_{A|F}`, certified to lie in `F`.
    pub fn nrd(&self) -> Result<PadicScalar> {
        let det = self.split_to_l()?.det()?;
        det.expect_base_rational().map_err(|_| {
            Error::InsufficientPrecision(
                "Galois invariance of the reduced norm not certified".into(),
            )
        })
    }

    // ------------------------------------------------------------------
    // Flat F-coordinates
    // ------------------------------------------------------------------

    /// Flat `F`-coordinates of the element in the monomial basis
    /// `E_{kl} omega^j pi_D^i` (left coefficients), indexed by
    /// `((k*m + l)*d + i)*d + j`.  Length `m^2 d^2`.
    pub fn f_coords(&self) -> Vec<PadicScalar> {
        let (m, d) = (self.ctx.m, self.ctx.d);
        let mut out = Vec::with_capacity(m * m * d * d);
        for k in 0..m {
            for l in 0..m {
                for i in 0..d {
                    let a = &self.at(k, l).coeffs()[i];
                    for j in 0..d {
                        out.push(a.coords()[j].clone());
                    }
                }
            }
        }
        out
    }

    /// Rebuilds an element from flat `F`-coordinates (inverse of
    /// [`AMatrix::f_coords`]).
    pub fn from_f_coords(ctx: &AlgebraCtx, coords: &[PadicScalar]) -> Result<AMatrix> {
        let (m, d) = (ctx.m, ctx.d);
        if coords.len() != m * m * d * d {
            return Err(Error::InvalidParameter(format!(
                "expected {} coordinates, got {}",
                m * m * d * d,
                coords.len()
            )));
        }
        let mut out = AMatrix::zero(ctx);
        let mut idx = 0;
        for k in 0..m {
            for l in 0..m {
                let mut dcoeffs = Vec::with_capacity(d);
                for _ in 0..d {
                    let cs = coords[idx..idx + d].to_vec();
                    idx += d;
                    dcoeffs.push(UnramifiedElement::from_coords(ctx.p, cs));
                }
                *out.at_mut(k, l) = DElement::from_coeffs(ctx, dcoeffs)?;
            }
        }
        Ok(out)
    }

    /// The basis monomial `E_{kl} * omega^j pi_D^i` (entry `omega^j pi_D^i`
    /// at position `(k, l)`, zero elsewhere).
    pub fn unit_monomial(ctx: &AlgebraCtx, k: usize, l: usize, i: usize, j: usize) -> AMatrix {
        let mut coords = vec![PadicScalar::exact_zero(ctx.p); ctx.m * ctx.m * ctx.d * ctx.d];
        let idx = ((k * ctx.m + l) * ctx.d + i) * ctx.d + j;
        coords[idx] = PadicScalar::from_integer(ctx.p, 1, ctx.prec);
        AMatrix::from_f_coords(ctx, &coords).expect("well-formed monomial")
    }

    /// Scalar restriction: the faithful action on `V` as an `F`-vector space
    /// of dimension `m d^2`, in the basis `e_k pi^i omega^j mapsto (k*d +
    /// i)*d + j`.  Entries are returned as a matrix over the trivial
    /// extension (`f = 1`), i.e. plain `F`-scalars.
    pub fn restrict_to_f(&self) -> Result<LMatrix> {
        let (m, d) = (self.ctx.m, self.ctx.d);
        let split = self.split_to_l()?;
        let n = m * d * d;
        let mut out = LMatrix::zero(self.ctx.p, 1, n, n);
        // Basis powers omega^b of L over F: coordinate vectors.
        let mut omega_pows = Vec::with_capacity(d);
        for b in 0..d {
            let mut coords = vec![PadicScalar::exact_zero(self.ctx.p); d];
            coords[b] = PadicScalar::from_integer(self.ctx.p, 1, self.ctx.prec);
            omega_pows.push(UnramifiedElement::from_coords(self.ctx.p, coords));
        }
        for r in 0..m * d {
            for c in 0..m * d {
                let y = split.at(r, c);
                if y.is_exact_zero() {
                    continue;
                }
                for (b, om) in omega_pows.iter().enumerate() {
                    let prod = y.mul(om);
                    for (j, coord) in prod.coords().iter().enumerate() {
                        *out.at_mut(r * d + j, c * d + b) =
                            UnramifiedElement::from_scalar(1, coord.clone());
                    }
                }
            }
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::lmat::min_poly_padic;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx223() -> AlgebraCtx {
        AlgebraCtx::new(2, 2, 3, 24).unwrap()
    }

    #[test]
    fn pi_conjugation_is_frobenius() {
        // pi_D a = phi(a) pi_D for a in L, tested via full products in D.
        let ctx = AlgebraCtx::new(3, 2, 1, 24).unwrap();
        let omega = UnramifiedElement::generator(3, 2, 24).unwrap();
        let a = DElement::from_l(&ctx, omega.clone()).unwrap();
        let pi = DElement::pi(&ctx);
        let left = pi.mul(&a).unwrap();
        let right = DElement::from_l(&ctx, omega.frobenius().unwrap())
            .unwrap()
            .mul(&pi)
            .unwrap();
        assert!(left.congruent_mod_pi(&right, 40).unwrap());
    }

    #[test]
    fn pi_to_the_d_is_p() {
        for (p, d) in [(2u64, 2usize), (3, 3), (5, 4)] {
            let ctx = AlgebraCtx::new(p, d, 1, 20).unwrap();
            let pi = DElement::pi(&ctx);
            let mut x = DElement::one(&ctx);
            for _ in 0..d {
                x = pi.mul(&x).unwrap();
            }
            let pf = DElement::from_f(&ctx, PadicScalar::p_power(p, 1, 20));
            assert!(x.congruent_mod_pi(&pf, 30).unwrap());
        }
    }

    #[test]
    fn split_of_pi_matches_regular_representation() {
        // m = 1, d = 2: split(pi_D) = [[0, p], [1, 0]] in the basis {1, pi}.
        let ctx = AlgebraCtx::new(2, 2, 1, 24).unwrap();
        let pi = DElement::pi(&ctx);
        let m = pi.split_matrix().unwrap();
        assert!(m.at(0, 0).is_exact_zero());
        assert_eq!(m.at(0, 1).expect_base_rational().unwrap().valuation().unwrap(), 1);
        assert_eq!(m.at(1, 0).expect_base_rational().unwrap().valuation().unwrap(), 0);
        assert!(m.at(1, 1).is_exact_zero());
        // And trd(pi_D) = 0 at working precision.
        let a = AMatrix::scalar(&ctx, &pi);
        let t = a.trd().unwrap();
        assert!(t.is_zero_mod(20).unwrap());
    }

    #[test]
    fn split_is_multiplicative_and_additive() {
        let ctx = ctx223();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let x = AMatrix::random_integral(&ctx, 3, &mut rng);
            let y = AMatrix::random_integral(&ctx, 3, &mut rng);
            let lhs = x.mul(&y).unwrap().split_to_l().unwrap();
            let rhs = x.split_to_l().unwrap().mul(&y.split_to_l().unwrap());
            for i in 0..ctx.split_dim() {
                for j in 0..ctx.split_dim() {
                    assert!(lhs.at(i, j).congruent_mod(rhs.at(i, j), 20).unwrap());
                }
            }
        }
    }

    #[test]
    fn inverse_roundtrip_in_d_and_a() {
        let ctx = AlgebraCtx::new(5, 2, 2, 24).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // D-element inverse.
        let x = DElement::random_integral(&ctx, 3, &mut rng).add(&DElement::one(&ctx));
        if let Ok(xi) = x.inv(&ctx) {
            let prod = x.mul(&xi).unwrap();
            assert!(prod.congruent_mod_pi(&DElement::one(&ctx), 30).unwrap());
        } else {
            panic!("random unit failed to invert");
        }
        // A-matrix inverse.
        let a = AMatrix::random_integral(&ctx, 3, &mut rng)
            .add(&AMatrix::identity(&ctx));
        match a.inverse() {
            Ok(ai) => {
                let prod = a.mul(&ai).unwrap();
                let idm = AMatrix::identity(&ctx);
                for i in 0..ctx.m {
                    for j in 0..ctx.m {
                        assert!(prod
                            .at(i, j)
                            .congruent_mod_pi(idm.at(i, j), 30)
                            .unwrap());
                    }
                }
            }
            Err(Error::NotInvertible(_)) => {} // legitimately singular sample
            Err(e) => panic!("unexpected error {e:?}"),
        }
    }

    #[test]
    fn trd_is_linear_and_symmetric() {
        let ctx = ctx223();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..5 {
            let x = AMatrix::random_integral(&ctx, 3, &mut rng);
            let y = AMatrix::random_integral(&ctx, 3, &mut rng);
            let txy = x.mul(&y).unwrap().trd().unwrap();
            let tyx = y.mul(&x).unwrap().trd().unwrap();
            assert!(txy.sub(&tyx).is_zero_mod(18).unwrap());
            let tsum = x.add(&y).trd().unwrap();
            let tx = x.trd().unwrap();
            let ty = y.trd().unwrap();
            assert!(tsum.sub(&tx.add(&ty)).is_zero_mod(18).unwrap());
        }
    }

    #[test]
    fn trd_and_nrd_of_f_scalars() {
        // trd(a * 1_A) = m*d*a, nrd(a * 1_A) = a^{md}.
        let ctx = AlgebraCtx::new(3, 2, 2, 24).unwrap();
        let a = PadicScalar::from_integer(3, 7, 24);
        let am = AMatrix::scalar(&ctx, &DElement::from_f(&ctx, a.clone()));
        let t = am.trd().unwrap();
        let expected = a.mul_small_int(4);
        assert!(t.sub(&expected).is_zero_mod(20).unwrap());
        let n = am.nrd().unwrap();
        let expected_n = a.pow(4).unwrap();
        assert!(n.sub(&expected_n).is_zero_mod(20).unwrap());
    }

    #[test]
    fn nrd_is_multiplicative() {
        let ctx = AlgebraCtx::new(3, 2, 1, 24).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..5 {
            let x = AMatrix::random_integral(&ctx, 2, &mut rng);
            let y = AMatrix::random_integral(&ctx, 2, &mut rng);
            let nxy = x.mul(&y).unwrap().nrd().unwrap();
            let nx = x.nrd().unwrap();
            let ny = y.nrd().unwrap();
            assert!(nxy.sub(&nx.mul(&ny)).is_zero_mod(15).unwrap());
        }
    }

    #[test]
    fn restrict_to_f_dimension_and_d1_identity() {
        let ctx = ctx223();
        let x = AMatrix::identity(&ctx);
        let r = x.restrict_to_f().unwrap();
        assert_eq!(r.rows(), ctx.dim_f());
        // d = 1: restriction is the entrywise identity.
        let ctx1 = AlgebraCtx::new(5, 1, 2, 20).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let y = AMatrix::random_integral(&ctx1, 3, &mut rng);
        let r1 = y.restrict_to_f().unwrap();
        assert_eq!(r1.rows(), 2);
        for i in 0..2 {
            for j in 0..2 {
                assert!(r1
                    .at(i, j)
                    .congruent_mod(&y.at(i, j).coeffs()[0], 15)
                    .unwrap());
            }
        }
    }

    #[test]
    fn restriction_preserves_min_poly() {
        // beta = pi_D with d = 2, m = 1: min poly X^2 - p both ways.
        let ctx = AlgebraCtx::new(2, 2, 1, 24).unwrap();
        let pi = AMatrix::scalar(&ctx, &DElement::pi(&ctx));
        let split = pi.split_to_l().unwrap();
        let mp_split = min_poly_padic(&split, 12).unwrap();
        let restr = pi.restrict_to_f().unwrap();
        let mp_restr = min_poly_padic(&restr, 12).unwrap();
        assert_eq!(mp_split.degree(), Some(2));
        assert_eq!(mp_restr.degree(), Some(2));
        for i in 0..=2 {
            assert!(mp_split
                .coeff(i)
                .sub(&mp_restr.coeff(i))
                .is_zero_mod(10)
                .unwrap());
        }
    }

    #[test]
    fn d_valuation_rules() {
        let ctx = AlgebraCtx::new(2, 2, 1, 24).unwrap();
        let pi = DElement::pi(&ctx);
        assert_eq!(pi.nu().unwrap(), 1);
        let p_elt = DElement::from_f(&ctx, PadicScalar::p_power(2, 1, 24));
        assert_eq!(p_elt.nu().unwrap(), 2); // nu_D |_F = d * v_F
        let mixed = pi.add(&p_elt);
        assert_eq!(mixed.nu().unwrap(), 1);
        // nu(xy) = nu(x) + nu(y) on random units times powers of pi.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let x = DElement::random_integral(&ctx, 3, &mut rng)
                .add(&DElement::one(&ctx));
            let y = DElement::random_integral(&ctx, 3, &mut rng)
                .add(&DElement::pi(&ctx));
            if let (Ok(nx), Ok(ny)) = (x.nu(), y.nu()) {
                let prod = x.mul(&y).unwrap();
                assert_eq!(prod.nu().unwrap(), nx + ny);
            }
        }
    }
}
