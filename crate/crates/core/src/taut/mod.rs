//! Generators, monomials and exact-rational polynomials of the tautological ring.

mod generator;
mod markset;
mod monomial;
mod polynomial;
mod text;

pub use generator::{Generator, RingContext};
pub use markset::{MarkSet, MAX_MARKINGS};
pub use monomial::Monomial;
pub use polynomial::Polynomial;
pub(crate) use polynomial::fmt_rational;
pub use text::{parse_monomial, parse_polynomial};

pub type Rational = num_rational::BigRational;

/// Builds a rational from a machine integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Builds `num/den`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Formats a rational as `p/q` (or `p` when integral).
pub fn format_rational(c: &Rational) -> String {
    fmt_rational(c)
}
