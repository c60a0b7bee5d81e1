//! Exact sparse multivariate polynomials and rational functions over ℚ.

mod monomial;
mod parse;
mod poly;
mod ratfun;
mod subst;
mod vars;

pub use monomial::Monomial;
pub use parse::{parse_poly, parse_rational_function};
pub use poly::Poly;
pub use ratfun::RationalFunction;
pub use vars::{alpha, VarTable, MAX_VARS, P, Q, T};

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Nearest rational with a power-of-two denominator; exact for finite floats.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}
