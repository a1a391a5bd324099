//! Centralizers `B = C_A(β)`, the congruence lattices `𝔫_k(β,Λ)`, the
//! filtration `𝔟_t = 𝔞_t ∩ B`, and the critical exponent `k₀(β,Λ)`.
//!
//! Everything here works in the split-normal frame of `Λ` (elements are
//! transported by the conjugator first), where every `𝔞_t` is diagonal in
//! the flat monomial coordinates of `A`.
//!
//! Two kinds of lattices appear:
//!
//! * `𝔫_k^{t}(β,Λ) = {x ∈ 𝔞_t : βx − xβ ∈ 𝔞_k}` is *congruence-defined*:
//!   it contains `p^δ 𝔞_t` for an explicit `δ`, so its generators are an
//!   exact kernel computation over `Z/p^δ` — no saturation questions arise.
//! * `B = ker(ad_β)` is a `Q_p`-subspace; its integral points are computed
//!   from the Smith normal form of the matrix of `ad_β` at the working
//!   modulus.  The basis vectors are certified approximations: each is
//!   congruent to a true centralizer element modulo `p^{M − slack}` where
//!   `slack` is the largest finite elementary divisor.  The honest
//!   replacement for `𝔟_0 + 𝔞_1` in the critical-exponent test is
//!   `𝔫_K + 𝔞_1` for an explicitly sufficient `K` (see below), which is
//!   exact.
//!
//! Critical exponent: `k₀(β,Λ) = max{ν_Λ(β), sup{k : 𝔫_k ⊄ 𝔟_0 + 𝔞_1}}`
//! and `k₀(0,Λ) = −∞`.  The containment is monotone in `k` (the `𝔫_k`
//! decrease), so the threshold is found by a scan over the window
//! `[ν_Λ(β), 0]`; if the containment still fails at `k = 0` the stratum has
//! `k₀ ≥ 0` and `ThresholdOutOfWindow` is reported.

use num_bigint::BigUint;

use crate::arith::padic::PadicScalar;
use crate::arith::zpmat::ZpMat;
use crate::csa::AMatrix;
use crate::error::{Error, Result};
use crate::lattice::{GenLat, LatticeSeq};

use super::Stratum;

// ---------------------------------------------------------------------------
// The matrix of ad_β and its kernel
// ---------------------------------------------------------------------------

/// Bracket images `[β, mon_c]` of all flat unit monomials, as coordinate
/// rows: `brackets[c][c'] = coordinate c' of [β, mon_c]`.
fn bracket_rows(beta: &AMatrix) -> Result<Vec<Vec<PadicScalar>>> {
    let ctx = *beta.ctx();
    let n = ctx.dim_a();
    let (m, d) = (ctx.m, ctx.d);
    let mut rows = Vec::with_capacity(n);
    for c in 0..n {
        let j = c % d;
        let i = (c / d) % d;
        let l = (c / (d * d)) % m;
        let k = c / (d * d * m);
        let mon = AMatrix::unit_monomial(&ctx, k, l, i, j);
        rows.push(beta.bracket(&mon)?.f_coords());
    }
    Ok(rows)
}

/// The kernel data of `ad_β` at the working modulus.
pub(crate) struct AdKernel {
    /// Modulus exponent `M` the Smith normal form was computed at.
    pub modexp: u32,
    /// Largest finite elementary divisor exponent (`< M`).
    pub slack: u32,
    /// Rows of the transform certified to annihilate `ad_β` mod `p^M`;
    /// each is congruent to a true centralizer element mod `p^{M − slack}`.
    pub rows: Vec<Vec<BigUint>>,
}

/// Kernel of `ad_β` over `Z/p^M` from the Smith normal form of the matrix
/// of `x ↦ [p^u β, x]` on the plain monomial lattice (`u` makes `β`
/// integral; scaling by a central power of `p` does not change the kernel).
fn ad_kernel(beta: &AMatrix) -> Result<AdKernel> {
    let ctx = *beta.ctx();
    let p = ctx.p;
    let n = ctx.dim_a();
    // Integralize: u = max(0, -min vlb).
    let u = beta
        .f_coords()
        .iter()
        .map(|c| -c.vlb())
        .max()
        .unwrap_or(0)
        .max(0);
    let scaled_coords: Vec<PadicScalar> =
        beta.f_coords().iter().map(|c| c.shift(u)).collect();
    let beta_int = AMatrix::from_f_coords(&ctx, &scaled_coords)?;
    let rows = bracket_rows(&beta_int)?;
    // Honest modulus: every entry certified; cap at the context precision.
    let mut modexp = ctx.prec as i64;
    for r in &rows {
        for c in r {
            modexp = modexp.min(c.abs_prec());
        }
    }
    if modexp < 1 {
        return Err(Error::InsufficientPrecision(
            "no certified digits for the adjoint matrix".into(),
        ));
    }
    let modexp = modexp as u32;
    let mat = ZpMat::from_fn(p, modexp, n, n, |i, j| {
        rows[i][j]
            .scaled_residue(0, modexp)
            .expect("integral bracket coordinates at checked precision")
    });
    let snf = mat.snf();
    let mut slack = 0u32;
    let mut kernel = Vec::new();
    for i in 0..n {
        let e = if i < snf.diag.len() { snf.diag[i] } else { modexp };
        if e >= modexp {
            let row = snf.u.row(i);
            kernel.push((0..n).map(|j| row.at(0, j).clone()).collect());
        } else {
            slack = slack.max(e);
        }
    }
    Ok(AdKernel {
        modexp,
        slack,
        rows: kernel,
    })
}

// ---------------------------------------------------------------------------
// Centralizer data
// ---------------------------------------------------------------------------

/// An `F`-basis of `B = C_A(β)` (equivalently `ker ad_β`) at working
/// precision, in flat monomial coordinates of the split-normal frame.
#[derive(Clone, Debug)]
pub struct CentralizerData {
    p: u64,
    flat_dim: usize,
    /// Certified absolute precision of the basis coordinates.
    modexp: u32,
    basis: Vec<Vec<PadicScalar>>,
}

impl CentralizerData {
    /// Dimension over `F` of the computed centralizer (at the working
    /// modulus; equals `dim_F B` whenever the modulus separates the kernel,
    /// which the certified double-centralizer check confirms for semi-pure
    /// strata).
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Basis vectors in flat coordinates; each satisfies `[β, b] ≡ 0` to the
    /// stated precision.
    pub fn basis(&self) -> &[Vec<PadicScalar>] {
        &self.basis
    }

    /// Certified absolute precision of the basis coordinates.
    pub fn modulus_exp(&self) -> u32 {
        self.modexp
    }

    /// The filtration lattice `𝔟_t = 𝔞_t ∩ B` as a generated lattice at
    /// modulus `nexp`.
    ///
    /// `B` enters through the lattice `p^{-s} B₀` (`B₀` = integral points of
    /// `B`, `s` chosen so that `B ∩ 𝔞_t ⊆ p^{-s} B₀`), so the intersection
    /// equals `𝔟_t` up to the `p^{nexp}`-tail of the representation.
    pub fn b_lattice(&self, lat: &LatticeSeq, t: i64, nexp: u32) -> Result<GenLat> {
        let exps = lat.square_exponents(t);
        let s = exps.iter().map(|e| (-e).max(0)).max().unwrap_or(0);
        let elems: Vec<Vec<PadicScalar>> = self
            .basis
            .iter()
            .map(|b| b.iter().map(|c| c.shift(-s)).collect())
            .collect();
        let base = vec![-s; self.flat_dim];
        let b_scaled = GenLat::from_elements(self.p, nexp, base, &elems)?;
        let square = GenLat::square(lat, t, nexp);
        b_scaled.intersect(&square)
    }
}

// ---------------------------------------------------------------------------
// Stratum-level operations
// ---------------------------------------------------------------------------

/// The critical exponent `k₀(β,Λ)`: either `−∞` (zero `β`) or a finite
/// integer; values `≥ 0` are reported as `ThresholdOutOfWindow`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CriticalExponent {
    NegInfinity,
    Finite(i64),
}

impl CriticalExponent {
    /// `k₀ < bound`, with `−∞` below everything.
    pub fn less_than(&self, bound: i64) -> bool {
        match self {
            CriticalExponent::NegInfinity => true,
            CriticalExponent::Finite(k) => *k < bound,
        }
    }
}

impl Stratum {
    /// An `F`-basis of the centralizer `B = C_A(β)` at working precision.
    ///
    /// No semi-purity is required; the basis spans the kernel of `ad_β` at
    /// the working modulus, expressed in the split-normal frame of `Λ`.
    pub fn centralizer(&self) -> Result<CentralizerData> {
        let beta = self.frame_beta()?;
        let ker = ad_kernel(&beta)?;
        let prec = ker.modexp - ker.slack;
        if prec == 0 {
            return Err(Error::InsufficientPrecision(
                "centralizer basis has no certified digits".into(),
            ));
        }
        let basis = ker
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| PadicScalar::from_parts(self.ctx().p, 0, v.clone(), prec))
                    .collect()
            })
            .collect();
        Ok(CentralizerData {
            p: self.ctx().p,
            flat_dim: self.ctx().dim_a(),
            modexp: prec,
            basis,
        })
    }

    /// The congruence lattice `{x ∈ 𝔞_t : [β, x] ∈ 𝔞_k}` as a generated
    /// lattice at modulus `nexp` (exact: the lattice contains `p^δ 𝔞_t` for
    /// the explicit conductor `δ` of the condition).
    pub(crate) fn n_lattice_in(&self, t: i64, k: i64, nexp: u32) -> Result<GenLat> {
        let ctx = *self.ctx();
        let p = ctx.p;
        let n = ctx.dim_a();
        let beta = self.frame_beta()?;
        let e_t = self.lat().square_exponents(t);
        let e_k = self.lat().square_exponents(k);
        let brackets = bracket_rows(&beta)?;
        // Condition on x = Σ v_c p^{E_t[c]} mon_c: for every c',
        //   Σ_c v_c · brackets[c][c'] · p^{E_t[c] − E_k[c']}  ∈  o_F.
        // δ = conductor: p^δ times every entry is integral.
        let mut delta = 0i64;
        for (c, row) in brackets.iter().enumerate() {
            for (c2, entry) in row.iter().enumerate() {
                if entry.is_exact_zero() {
                    continue;
                }
                delta = delta.max(-(entry.vlb() + e_t[c] - e_k[c2]));
            }
        }
        if delta <= 0 {
            // No condition: the whole a_t qualifies.
            return Ok(GenLat::square(self.lat(), t, nexp));
        }
        let delta = delta as u32;
        if delta > nexp {
            return Err(Error::InsufficientPrecision(format!(
                "congruence conductor p^{delta} exceeds the requested modulus p^{nexp}"
            )));
        }
        let cond = ZpMat::from_fn(p, delta, n, n, |c, c2| {
            brackets[c][c2]
                .shift(e_t[c] - e_k[c2] + delta as i64)
                .scaled_residue(0, delta)
                .expect("conductor-scaled entries are integral at working precision")
        });
        let kernel = cond.left_kernel();
        // Elements: kernel rows in v-coordinates (scaled by the a_t
        // diagonal), plus p^δ a_t itself.
        let mut elems: Vec<Vec<PadicScalar>> = Vec::with_capacity(kernel.rows() + n);
        for i in 0..kernel.rows() {
            elems.push(
                (0..n)
                    .map(|c| {
                        PadicScalar::from_parts(p, e_t[c], kernel.at(i, c).clone(), nexp)
                    })
                    .collect(),
            );
        }
        for c in 0..n {
            let mut v = vec![PadicScalar::exact_zero(p); n];
            v[c] = PadicScalar::p_power(p, e_t[c] + delta as i64, nexp);
            elems.push(v);
        }
        GenLat::from_elements(p, nexp, e_t, &elems)
    }

    /// `𝔫_k(β,Λ) = {x ∈ 𝔞_0 : βx − xβ ∈ 𝔞_k}`.
    pub fn n_lattice(&self, k: i64, nexp: u32) -> Result<GenLat> {
        self.n_lattice_in(0, k, nexp)
    }

    /// The critical exponent `k₀(β,Λ)`.
    ///
    /// Requires certified semi-purity (the dimension of the centralizer is
    /// cross-checked against the double-centralizer count `Σ (m_i d)²/[E_i:F]`
    /// from the splitting data).  The containment test replaces `𝔟_0 + 𝔞_1`
    /// by the exact lattice `𝔫_K + 𝔞_1` for an explicitly sufficient `K`:
    /// once `min_c E_K[c] ≥ max_c E_1[c] + slack − u`, every `x ∈ 𝔫_K`
    /// splits as a centralizer part plus an `𝔞_1`-part (Smith normal form
    /// bound), so `𝔫_K + 𝔞_1 = 𝔟_0 + 𝔞_1`.
    pub fn critical_exponent(&self) -> Result<CriticalExponent> {
        let beta = self.frame_beta()?;
        if beta.is_exact_zero() {
            return Ok(CriticalExponent::NegInfinity);
        }
        let split = self.splitting()?;
        let expected_dim = split.centralizer_dim_f(self.ctx());
        let ker = ad_kernel(&beta)?;
        if ker.rows.len() != expected_dim {
            return Err(Error::InsufficientPrecision(format!(
                "kernel of ad_β has {} generators at the working modulus, \
                 but the certified centralizer dimension is {expected_dim}",
                ker.rows.len()
            )));
        }
        let nu = self.lat().nu(&self.beta)?;
        if nu == i64::MAX {
            return Ok(CriticalExponent::NegInfinity);
        }
        let nexp = self.ctx().prec;

        // Sufficient depth K for 𝔫_K + 𝔞_1 = 𝔟_0 + 𝔞_1.
        let u = self
            .beta
            .f_coords()
            .iter()
            .map(|c| -c.vlb())
            .max()
            .unwrap_or(0)
            .max(0);
        let e1_max = self
            .lat()
            .square_exponents(1)
            .iter()
            .copied()
            .max()
            .unwrap_or(0);
        let needed = e1_max + ker.slack as i64 - u;
        let mut big_k = 1i64;
        while self
            .lat()
            .square_exponents(big_k)
            .iter()
            .copied()
            .min()
            .unwrap_or(0)
            < needed
        {
            big_k += 1;
        }
        let a1 = GenLat::square(self.lat(), 1, nexp);
        let b0_plus_a1 = self.n_lattice(big_k, nexp)?.sum(&a1)?;

        // Monotone scan of the window (ν, 0].
        let mut containments = Vec::new();
        for k in (nu + 1)..=0 {
            let nk = self.n_lattice(k, nexp)?.sum(&a1)?;
            containments.push((k, nk.subset_of(&b0_plus_a1)?));
        }
        // 𝔫_k decreases with k, so containment is monotone in k.
        for w in containments.windows(2) {
            debug_assert!(
                !w[0].1 || w[1].1,
                "containment of n_k in b_0 + a_1 must be monotone in k"
            );
        }
        match containments.iter().rev().find(|(_, c)| !c) {
            Some((k, _)) if *k == 0 => Err(Error::ThresholdOutOfWindow(
                "critical exponent is >= 0; the stratum is never simple".into(),
            )),
            Some((k, _)) => Ok(CriticalExponent::Finite((*k).max(nu))),
            None => Ok(CriticalExponent::Finite(nu)),
        }
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
