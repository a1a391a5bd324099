//! Exact stratum calculus for inner forms of general linear groups over p-adic fields.
//!
//! This crate implements a computational model of the arithmetic of a central
//! simple algebra `A = M_m(D)` over a p-adic field `F = Q_p`, where `D` is a
//! central division algebra of index `d` presented cyclically as
//! `D = L[π_D]` with `L/F` unramified of degree `d`,
//! `π_D a π_D^{-1} = φ(a)` (`φ` the Frobenius of `L/F`) and `π_D^d = p`.
//!
//! On top of that arithmetic it provides:
//!
//! * precision-tracked p-adic scalars and unramified extension arithmetic
//!   ([`arith`]), including residue-field polynomial factorization, Hensel
//!   lifting and Newton polygons with irreducibility certificates;
//! * lattice sequences in `V = D^m` in split normal form and the associated
//!   square-lattice filtrations `a_t` of `A` ([`lattice`]);
//! * strata `[Λ, n, r, β]`, their invariants (level, critical exponent,
//!   fundamentality, minimality, semisimplicity certificates), direct sums,
//!   scalar restriction/extension, intertwining and matching ([`strata`]);
//! * tame corestrictions and derived strata driving the inductive
//!   classification ([`corestrict`]);
//! * additive/multiplicative character computations exact in `Q/Z`
//!   ([`characters`]);
//! * endo-parameter bookkeeping ([`endoparam`]).
//!
//! All arithmetic is exact: scalars are tracked to a provable number of base-p
//! digits, residue computations are exact over `GF(p^f)`, and character values
//! are exact rationals modulo `1`. No binary floating point is used anywhere.

pub mod arith;
pub mod csa;
pub mod error;
pub mod lattice;
pub mod strata;

pub use arith::fq::FqElem;
pub use arith::newton::NewtonPolygon;
pub use arith::padic::PadicScalar;
pub use arith::residue_poly::ResiduePoly;
pub use arith::unram::UnramifiedElement;
pub use csa::{AMatrix, AlgebraCtx, DElement};
pub use error::{Error, Result};
pub use lattice::{GenLat, LatticeSeq};
pub use strata::centralizer::{CentralizerData, CriticalExponent};
pub use strata::combine::TensorStratum;
pub use strata::intertwine::{BlockMatch, IntertwiningData, Matching};
pub use strata::semipure::{BlockData, SplittingData};
pub use strata::Stratum;
