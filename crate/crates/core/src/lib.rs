//! Exact computation of the spectrum at infinity and irregular Hodge data of
//! convenient non-degenerate Laurent polynomials, plus a symbolic model of the
//! V-filtration in a normal-crossing chart.

pub mod chart;
pub mod corpus;
pub mod groebner;
pub mod hodge;
pub mod laurent;
pub mod linalg;
pub mod newton;
pub mod parse;
pub mod rational;
pub mod report;
pub mod spectrum;
pub mod unipoly;

pub use laurent::{ExponentVector, LaurentPolynomial};
pub use parse::{parse_laurent, ParseError};
pub use rational::Rational;
