//! Exact multivariate rational functions over a named coordinate chart.
//!
//! Everything in the symbolic layer is built on [`RatFunc`]: a reduced
//! fraction of two [`Poly`]s with arbitrary-precision rational coefficients.
//! Canonical forms make zero-testing exact.

mod chart;
mod gcd;
mod parse;
mod poly;
mod ratfunc;

pub use chart::Chart;
pub use gcd::gcd;
pub use parse::parse;
pub use poly::{Monomial, Poly};
pub use ratfunc::{ArithOp, RatFunc, Substitution, Value};

use thiserror::Error;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("division by the zero polynomial at {pos}")]
    LiteralDivisionByZero { pos: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("chart mismatch: [{left}] vs [{right}]")]
    ChartMismatch { left: String, right: String },
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("missing binding for coordinate `{0}`")]
    MissingBinding(String),
    #[error("substituted denominator vanishes identically")]
    DegenerateSubstitution,
    #[error("pole: denominator vanishes at the evaluation point")]
    Pole,
}

pub type Result<T> = std::result::Result<T, SymError>;
