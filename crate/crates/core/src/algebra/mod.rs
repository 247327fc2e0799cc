//! Exact polynomial algebra over the rationals.

mod division;
mod groebner;
mod parse;
mod poly;
mod positivity;
mod ratfunc;
mod ring;
mod sturm;

use thiserror::Error;

pub use division::{divide, divide_exact, normal_form, strip_factors, strip_positive_factors};
pub use groebner::{
    groebner_basis, groebner_basis_with, interreduce, is_groebner_basis, power_membership,
    s_polynomial, GroebnerStats,
};
pub use parse::{identifiers, parse_poly, ParseError};
pub use poly::Poly;
pub use positivity::PositivityContext;
pub use ratfunc::RatFunc;
pub use ring::{Monomial, MonomialOrder, PolyRing, VarRegistry};
pub use sturm::{sturm_roots, RootReport, UniPoly};

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("invalid variable name `{0}`")]
    InvalidVariableName(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("polynomials belong to different rings")]
    RingMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("factor `{0}` is not certified nonzero")]
    UncertifiedFactor(String),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial is not univariate: {0}")]
    NotUnivariate(String),
    #[error("empty interval: lower bound must be below upper bound")]
    EmptyInterval,
}
