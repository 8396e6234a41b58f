//! Exact symbolic expressions.
//!
//! An [`Expr`] is a polynomial over the rationals, optionally multiplied by
//! half-integer powers of a single radical kernel `R`. The representation is
//! canonical, so structural equality is mathematical equality and the zero
//! test is a comparison against the empty expression.

mod eval;
mod expression;
mod linsolve;
mod monomial;
mod parse;
mod poly;
mod print;
mod symbol;

use thiserror::Error;

pub use eval::{QuadValue, Quadratic};
pub use expression::{Expr, Part};
pub use linsolve::{linear_solve, solve_combination, LinearSolution};
pub use monomial::Monomial;
pub use parse::{parse, ParseError};
pub use poly::Poly;
pub use symbol::{FuncId, OpaqueDeriv, Param, Symbol, Var, MAX_ARITY};

pub type Rational = num_rational::BigRational;

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Shorthand for the rational `n/d`.
pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("expression mixes two distinct radical kernels: sqrt({first}) and sqrt({second})")]
    KernelConflict { first: String, second: String },
    #[error("nested radical: the argument {0} of sqrt already contains a radical")]
    NestedRadical(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error(
        "cannot divide by {0}: only rational constants and powers of sqrt(...) are invertible"
    )]
    NotInvertible(String),
    #[error("unbound symbol {0}")]
    Unbound(String),
    #[error("negative radicand {0} in exact evaluation")]
    NegativeRadicand(String),
    #[error("radicand {0} is not the square of a rational; request floating evaluation")]
    Irrational(String),
    #[error("system is not linear and homogeneous in the unknowns (offending term {0})")]
    NotLinear(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}
