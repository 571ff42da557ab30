//! Computer algebra for dioperads through 2-colored shuffle operads.
//!
//! The pieces, bottom up:
//!
//! - [`trees`]: colored shuffle/planar tree monomials, composition, divisor
//!   search, admissible monomial orders.
//! - [`presentation`]: exact rational polynomials, rewrite rules, the
//!   presentation file format.
//! - [`rewrite`]: normal forms, overlap enumeration, S-polynomials,
//!   confluence checking, Buchberger-style completion.
//! - [`psi`]: dioperadic trees and presentations, the rerooting map, and
//!   symmetric-to-shuffle expansion.
//! - [`theta`]: the coloring functor from cyclic-operad presentations to
//!   colored rewriting systems, and the caterpillar machinery.
//! - [`hilbert`]: normal-form counting, a brute-force dimension oracle,
//!   q-graded bivariate series and the Koszul functional equation.
//! - [`resolution`]: the inclusion-exclusion complex of a monomial operad.
//! - [`corpus`]: the built-in presentations studied by the library.
//!
//! Everything is immutable and exact: coefficients are arbitrary-precision
//! rationals and there is no floating point anywhere.

pub mod corpus;
pub mod hilbert;
pub mod linalg;
pub mod par;
pub mod presentation;
pub mod psi;
pub mod resolution;
pub mod rewrite;
pub mod theta;
pub mod trees;

pub use presentation::{Coefficient, Polynomial, Presentation, RewriteRule};
pub use trees::{AritySignature, Color, GenId, GeneratorSymbol, Mode, TreeMonomial};
