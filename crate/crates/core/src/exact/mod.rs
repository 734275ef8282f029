//! Exact coefficient arithmetic: rationals, polynomials in `y`, truncated series.

mod rational;
mod series;
mod ypoly;

pub use rational::Rational;
pub use series::{exponent_key, parse_exponent_key, Exponents, TruncatedSeries};
pub use ypoly::YPoly;
