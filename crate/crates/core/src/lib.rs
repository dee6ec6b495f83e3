//! Exact q-series engine for the tails of colored Jones polynomials of
//! pretzel and torus knot families.
//!
//! The crate is organized around one numeric type, [`series::TruncatedSeries`]:
//! an exact Laurent series over arbitrary-precision integers on a fractional
//! exponent grid, known strictly below a tracked truncation. On top of it:
//!
//! - [`qfun`]: q-Pochhammer symbols, the Euler function, quantum integers
//!   and factorials, Gaussian binomials;
//! - [`theta`]: Ramanujan's two-variable theta and false theta functions;
//! - [`skein`]: the skein-theoretic coefficient families (Delta, theta
//!   coefficients, bubble expansion coefficients, E/P/C/Gamma);
//! - [`tails`]: the infinite multi-sum tail formulas of the knot families;
//! - [`stabilization`]: exact finite-color skein evaluations by independent
//!   routes and the tail-agreement checker;
//! - [`bracket`]: a brute-force Kauffman bracket state-sum oracle over
//!   planar diagram codes, with pretzel diagram generation.

pub mod bracket;
pub mod qfun;
pub mod series;
pub mod skein;
pub mod stabilization;
pub mod tails;
pub mod theta;

pub use series::{agree_up_to, ComparisonReport, SeriesError, TruncatedSeries, TRUNC_EXACT};
