//! Exact computer-algebra kernel: rationals, sparse multivariate polynomials
//! and rational functions, with differentiation, substitution, evaluation,
//! parsing and printing.

mod format;
mod monomial;
mod parse;
mod poly;
mod ratfn;
mod var;

pub use format::{format_expr, format_poly, format_with};
pub use monomial::Monomial;
pub use parse::parse_expr;
pub use poly::Poly;
pub use ratfn::RatFn;
pub use var::{VarId, VarKind, VarTable};

/// Arbitrary-precision rational coefficient.
pub type Rational = num_rational::BigRational;

/// Shorthand for an integer-valued rational.
pub fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Shorthand for `n / d`.
pub fn qr(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
