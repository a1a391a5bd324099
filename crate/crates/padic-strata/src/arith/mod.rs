//! Exact base arithmetic: precision-tracked p-adic scalars, unramified
//! extensions with their fixed defining polynomials, residue fields
//! `GF(p^f)` with polynomial factorization, matrices over residue fields,
//! polynomials over the p-adics with Hensel lifting, Newton polygons with
//! irreducibility certificates, and linear algebra over `Z/p^N`.

pub mod fq;
pub mod fq_matrix;
pub mod lmat;
pub mod newton;
pub mod padic;
pub mod padic_poly;
pub mod residue_poly;
pub mod unram;
pub mod zpmat;

pub use fq::{defining_poly, FqCtx, FqElem, SUPPORTED_DEGREES, SUPPORTED_PRIMES};
pub use fq_matrix::FqMatrix;
pub use lmat::LMatrix;
pub use newton::{NewtonPolygon, NewtonSegment};
pub use padic::PadicScalar;
pub use padic_poly::PadicPoly;
pub use residue_poly::ResiduePoly;
pub use unram::UnramifiedElement;
pub use zpmat::ZpMat;
