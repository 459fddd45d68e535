//! Exact computer algebra for flat F-manifold structures attached to
//! Landau-Ginzburg potentials.
//!
//! The pipeline: parse a polynomial potential, build the Groebner basis of
//! its Jacobian ideal with cofactor tracking, realize the quotient algebra
//! with an explicit basis, run the perturbative level-by-level recursion for
//! the structure constants, and verify every defining identity exactly over
//! arbitrary-precision rationals.

pub mod engine;
pub mod groebner;
pub mod monomial;
pub mod multi_index;
pub mod parse;
pub mod poly;
pub mod polyvec;
pub mod prng;
pub mod problem;
pub mod quotient;
pub mod resultfile;
pub mod series;
pub mod verifier;

pub use engine::{CoeffTable, Engine, FlatFStructure};
pub use groebner::{Completeness, GroebnerBasis};
pub use monomial::{Monomial, MonomialOrder, OrderKind};
pub use multi_index::MultiIndex;
pub use parse::{parse_poly, ParseError};
pub use poly::{Poly, Rat};
pub use polyvec::{
    apply_delta_s, apply_divergence, apply_twist, bv_bracket, parse_polyvector, ChargeSpec,
    PolyVector,
};
pub use problem::Problem;
pub use quotient::{Basis, Quotient};
pub use verifier::Report;
