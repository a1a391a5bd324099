//! Newton polygons of polynomials over `Q_p`.
//!
//! The Newton polygon of `f = sum a_i X^i` is the lower convex hull of the
//! points `(i, v(a_i))`.  Its segments control the valuations of the roots of
//! `f` in an algebraic closure: a segment of slope `-lambda` and horizontal
//! length `l` accounts for exactly `l` roots of valuation `lambda`.
//!
//! Working at finite precision makes hull construction subtle: a coefficient
//! whose valuation is only bounded below ("zeroish") contributes no vertex,
//! but it *constrains* the hull — we may only certify a polygon once every
//! such coefficient provably lies on or above it.  All routines here either
//! return a certified polygon or refuse with
//! [`Error::InsufficientPrecision`](crate::error::Error).
//!
//! Beyond the polygon itself, each segment carries a *residual polynomial*
//! over the residue field `GF(p)`.  The classical irreducibility criterion
//! implemented by [`NewtonPolygon::irreducibility`] reads: if the polygon has
//! a single segment of slope `-h/e` in lowest terms and the residual
//! polynomial is irreducible of degree `f0`, then the polynomial is
//! irreducible over `Q_p` and any root generates an extension with
//! ramification index `e` and residue degree `f0`.  (Eisenstein polynomials
//! and unramified factorizations are the two extreme special cases.)

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::padic_poly::PadicPoly;
use super::residue_poly::ResiduePoly;
use crate::error::{Error, Result};

/// Converts a residue digit (already reduced below the prime) to `u64`.
fn biguint_to_u64(x: &BigUint) -> u64 {
    x.to_u64().expect("residue digit fits in u64")
}

// ---------------------------------------------------------------------------
// Data types
// ---------------------------------------------------------------------------

/// One segment of a Newton polygon, running between two vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonSegment {
    /// Abscissa of the left endpoint.
    pub x_start: i64,
    /// Abscissa of the right endpoint.
    pub x_end: i64,
    /// Ordinate (valuation) at the left endpoint.
    pub v_start: i64,
    /// Ordinate at the right endpoint.
    pub v_end: i64,
    /// Slope numerator, with `slope = s_num / s_den` in lowest terms.
    pub s_num: i64,
    /// Slope denominator (always positive).
    pub s_den: i64,
    /// Residual polynomial of the segment over `GF(p)`.
    ///
    /// Coefficient `j` is the residue of `a_{x_start + j*s_den} * p^{-(v_start
    /// + j*s_num)}`; abscissae off the slope lattice contribute zero.  The
    /// residual has degree `(x_end - x_start) / s_den` and nonzero constant
    /// and leading coefficients.
    pub residual: ResiduePoly,
}

impl NewtonSegment {
    /// Horizontal length of the segment (number of roots it accounts for).
    pub fn length(&self) -> i64 {
        self.x_end - self.x_start
    }

    /// Common valuation of the roots attached to this segment, as a reduced
    /// fraction `(num, den)` with positive denominator.
    pub fn root_valuation(&self) -> (i64, i64) {
        (-self.s_num, self.s_den)
    }
}

/// A certified Newton polygon.
#[derive(Clone, Debug)]
pub struct NewtonPolygon {
    /// The prime of the ambient field.
    pub p: u64,
    /// Degree of the polynomial the polygon was computed from.
    pub degree: i64,
    /// Number of roots of valuation `+infinity`, i.e. the multiplicity of the
    /// root `0` (the exact-zero low-order coefficients of the polynomial).
    pub zero_roots: i64,
    /// Number of low-order roots covered only by a one-sided certificate:
    /// the corresponding low-order coefficients are zeroish (valuation
    /// bounded below, digits unknown), certified to clear the leftward
    /// extension of the first segment strictly.  Each such root has
    /// valuation *strictly greater* than the first segment's root
    /// valuation; when `segments` is empty nothing is certified about them.
    pub uncertain_roots: i64,
    /// Segments in order of strictly increasing slope.
    pub segments: Vec<NewtonSegment>,
}

/// Outcome of the Newton-polygon irreducibility test.
///
/// The test is one-sided in places: `Unknown` means the polygon alone does
/// not decide, not that the polynomial is reducible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IrredVerdict {
    /// Certified irreducible; a root generates an extension of `Q_p` with the
    /// recorded ramification index and residue degree.
    Irreducible { e: i64, f: i64 },
    /// Certified reducible (several segments, or a residual polynomial with
    /// two distinct irreducible factors).
    Reducible,
    /// The polygon does not decide (single segment whose residual polynomial
    /// is a proper power of one irreducible).
    Unknown,
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

impl NewtonPolygon {
    /// Computes the certified Newton polygon of `f`.
    ///
    /// Requirements on the coefficients:
    /// * the leading coefficient must have exactly known valuation;
    /// * every coefficient above the lowest exactly-valued one must either
    ///   have exact valuation, or be known to lie on or above the hull
    ///   (zeroish with a sufficient valuation lower bound);
    /// * zeroish coefficients *below* the lowest exactly-valued one must
    ///   clear the leftward extension of the first hull segment strictly;
    ///   they then account for `uncertain_roots` roots of valuation
    ///   strictly greater than the first segment's root valuation.
    ///
    /// Exact-zero low-order coefficients are factored off as roots at zero
    /// and reported via `zero_roots`.
    pub fn of(f: &PadicPoly) -> Result<Self> {
        let p = f.p();
        let n = f
            .degree()
            .ok_or_else(|| Error::InvalidParameter("Newton polygon of the zero polynomial".into()))?;
        let lead = f.coeff(n as usize);
        if !lead.has_exact_valuation() {
            return Err(Error::InsufficientPrecision(
                "leading coefficient valuation not certified".into(),
            ));
        }

        // Strip exact-zero low-order coefficients: roots at 0.
        let mut start = 0usize;
        while f.coeff(start).is_exact_zero() {
            start += 1;
        }
        let zero_roots = start as i64;

        // Gather certain points and constraints.
        #[derive(Clone, Copy)]
        enum Coef {
            Exact(i64),   // exact valuation
            Bound(i64),   // only v >= bound known
            Zero,         // exact zero: no constraint
        }
        let mut coefs: Vec<Coef> = Vec::with_capacity((n as usize) - start + 1);
        for i in start..=(n as usize) {
            let c = f.coeff(i);
            if c.is_exact_zero() {
                coefs.push(Coef::Zero);
            } else if c.has_exact_valuation() {
                coefs.push(Coef::Exact(c.valuation().unwrap()));
            } else {
                coefs.push(Coef::Bound(c.vlb()));
            }
        }

        // The hull is anchored at the lowest exactly-valued coefficient;
        // anything zeroish below it becomes the uncertain bottom zone.
        let x_lo = start
            + coefs
                .iter()
                .position(|c| matches!(c, Coef::Exact(_)))
                .expect("leading coefficient is exact");
        let uncertain_roots = (x_lo - start) as i64;

        // Lower convex hull of the Exact points (Andrew's monotone chain on
        // the lower side).  Points are (i, v) with i increasing.
        let pts: Vec<(i64, i64)> = coefs
            .iter()
            .enumerate()
            .filter_map(|(off, c)| match c {
                Coef::Exact(v) => Some(((start + off) as i64, *v)),
                _ => None,
            })
            .collect();
        // The leading coefficient is Exact, so pts is nonempty; it spans
        // [x_lo, n] with the uncertain bottom zone (if any) to its left.
        let mut hull: Vec<(i64, i64)> = Vec::new();
        for &(x, v) in &pts {
            while hull.len() >= 2 {
                let (x1, v1) = hull[hull.len() - 2];
                let (x2, v2) = hull[hull.len() - 1];
                // Drop (x2,v2) if it is above or on the segment (x1,v1)-(x,v):
                // cross product (x2-x1, v2-v1) x (x-x1, v-v1) <= 0 keeps the
                // hull strictly convex from below.
                let cross = (x2 - x1) as i128 * (v - v1) as i128
                    - (v2 - v1) as i128 * (x - x1) as i128;
                if cross <= 0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push((x, v));
        }

        // Certify the constraints: every Bound coefficient must provably lie
        // on or above the hull.  Height of the hull at abscissa x within a
        // segment [x1,x2] is v1 + (x-x1)*(v2-v1)/(x2-x1), a rational; a bound
        // b suffices iff b >= height when the height is non-integral or the
        // abscissa carries no lattice point... more precisely we need
        // v(a_x) >= ceil(height) OR the residual contribution to be a known
        // digit; since a Bound coefficient has no known digit we require
        // b >= height, and when the height is integral *and* the abscissa is
        // a lattice point of the segment slope we additionally require b >
        // height (the coefficient would otherwise contribute an unknown
        // residual digit).
        for (off, c) in coefs.iter().enumerate() {
            let x = (start + off) as i64;
            let b = match c {
                Coef::Bound(b) => *b,
                _ => continue,
            };
            if x < x_lo as i64 {
                // Uncertain bottom zone: must clear the leftward extension of
                // the first segment strictly (a point on or below the line
                // would extend the segment or steal a residual digit).
                let ((x1, v1), (x2, v2)) = match hull.windows(2).next() {
                    Some(w) => (w[0], w[1]),
                    // Single-vertex hull: no certified line exists; nothing
                    // is claimed about the bottom zone, so nothing to check.
                    None => continue,
                };
                let num = (v1 as i128) * ((x2 - x1) as i128)
                    + ((x - x1) as i128) * ((v2 - v1) as i128);
                let den = (x2 - x1) as i128;
                if (b as i128) * den <= num {
                    return Err(Error::InsufficientPrecision(format!(
                        "coefficient of X^{x} only known to valuation >= {b}; \
                         the first-segment extension is not cleared"
                    )));
                }
                continue;
            }
            // Find the hull segment containing x.
            let mut seg = None;
            for w in hull.windows(2) {
                if w[0].0 <= x && x <= w[1].0 {
                    seg = Some((w[0], w[1]));
                    break;
                }
            }
            let ((x1, v1), (x2, v2)) = match seg {
                Some(s) => s,
                None => continue, // x coincides with a lone vertex; Exact there
            };
            if x2 == x1 {
                continue;
            }
            // height = v1 + (x-x1)(v2-v1)/(x2-x1) as an exact rational.
            let num = (v1 as i128) * ((x2 - x1) as i128) + ((x - x1) as i128) * ((v2 - v1) as i128);
            let den = (x2 - x1) as i128;
            let height_ceil = Integer::div_ceil(&num, &den);
            let integral = num.rem_euclid(den) == 0;
            if integral {
                // Lattice point of the segment: need strict clearance, since
                // a residue digit exactly on the hull would matter.
                if (b as i128) <= height_ceil {
                    return Err(Error::InsufficientPrecision(format!(
                        "coefficient of X^{x} only known to valuation >= {b}; \
                         Newton polygon needs clearance above height {height_ceil}"
                    )));
                }
            } else if (b as i128) < height_ceil {
                return Err(Error::InsufficientPrecision(format!(
                    "coefficient of X^{x} only known to valuation >= {b}; \
                     Newton polygon height at {x} not cleared"
                )));
            }
        }

        // Build segments with residual polynomials.
        let mut segments = Vec::new();
        for w in hull.windows(2) {
            let (x1, v1) = w[0];
            let (x2, v2) = w[1];
            let dx = x2 - x1;
            let dv = v2 - v1;
            let g = dx.gcd(&dv.abs()).max(1);
            let (s_num, s_den) = if dv == 0 { (0, 1) } else { (dv / g, dx / g) };
            let segments_count = dx / s_den;
            let mut residual_coeffs: Vec<u64> = Vec::new();
            for j in 0..=segments_count {
                let x = x1 + j * s_den;
                let target_v = v1 + j * s_num;
                let c = f.coeff(x as usize);
                let digit = if c.is_exact_zero() {
                    0u64
                } else if c.has_exact_valuation() {
                    if c.valuation().unwrap() == target_v {
                        biguint_to_u64(&c.scaled_residue(target_v, 1)?)
                    } else {
                        0u64
                    }
                } else {
                    // Certified above the hull (strictly, at lattice points).
                    0u64
                };
                residual_coeffs.push(digit);
            }
            let residual = ResiduePoly::from_prime_coeffs(p, 1, &residual_coeffs);
            segments.push(NewtonSegment {
                x_start: x1,
                x_end: x2,
                v_start: v1,
                v_end: v2,
                s_num,
                s_den,
                residual,
            });
        }

        Ok(NewtonPolygon {
            p,
            degree: n as i64,
            zero_roots,
            uncertain_roots,
            segments,
        })
    }

    /// Total horizontal length of the polygon (degree minus zero roots and
    /// uncertain roots).
    pub fn span(&self) -> i64 {
        self.segments.iter().map(NewtonSegment::length).sum()
    }

    /// Newton-polygon irreducibility test.  See the module documentation for
    /// the exact statement; `Unknown` is returned whenever the polygon and
    /// segment residuals do not decide.
    pub fn irreducibility(&self) -> IrredVerdict {
        if self.zero_roots > 0 {
            // X divides the polynomial.
            if self.degree == self.zero_roots && self.degree == 1 {
                // f = c X, irreducible of degree 1 (e = f = 1).
                return IrredVerdict::Irreducible { e: 1, f: 1 };
            }
            return IrredVerdict::Reducible;
        }
        if self.uncertain_roots > 0 {
            if self.degree == 1 {
                // Monic linear with a zeroish constant: still linear.
                return IrredVerdict::Irreducible { e: 1, f: 1 };
            }
            if !self.segments.is_empty() {
                // Roots of two provably different valuations.
                return IrredVerdict::Reducible;
            }
            return IrredVerdict::Unknown;
        }
        if self.segments.len() > 1 {
            return IrredVerdict::Reducible;
        }
        let seg = match self.segments.first() {
            Some(s) => s,
            None => {
                // Degree-zero polynomial after stripping: constant.
                return IrredVerdict::Unknown;
            }
        };
        if seg.length() == 1 {
            // Linear polynomial.
            return IrredVerdict::Irreducible { e: 1, f: 1 };
        }
        let factors = match seg.residual.factor() {
            Ok((_, fs)) => fs,
            Err(_) => return IrredVerdict::Unknown,
        };
        if factors.len() >= 2 {
            // Two distinct irreducible residual factors lift to a proper
            // factorization of the segment part.
            return IrredVerdict::Reducible;
        }
        let (irr, mult) = &factors[0];
        let f0 = irr.degree().unwrap_or(0) as i64;
        if *mult == 1 {
            // Single segment, irreducible residual: f is irreducible,
            // e = slope denominator, f = residual degree.
            return IrredVerdict::Irreducible {
                e: seg.s_den,
                f: f0,
            };
        }
        IrredVerdict::Unknown
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
