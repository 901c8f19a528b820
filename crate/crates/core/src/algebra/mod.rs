//! Exact arithmetic over ℚ(i) with at most one square root adjoined.

mod linear;
mod partial;
mod poly;
mod ratfunc;
mod roots;
mod scalar;

pub use linear::{solve_linear, LinearSolution};
pub use partial::{partial_fractions, PartialFractions, PfTerm};
pub use poly::{poly_gcd, sym, Polynomial, Symbol};
pub use ratfunc::RationalFunction;
pub use roots::find_roots;
pub use scalar::{q, qf, q_to_f64, AlgebraicScalar, GaussianRational, Scalar, Q};

use num_bigint::BigInt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("incompatible surds √{0} and √{1}")]
    IncompatibleSurds(BigInt, BigInt),
    #[error("division by zero")]
    DivisionByZero,
    #[error("unsupported factorization: {0}")]
    UnsupportedFactorization(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("inexact polynomial division")]
    NotDivisible,
}
