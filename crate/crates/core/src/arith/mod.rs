//! Exact arithmetic: rationals, univariate polynomials, homogeneous binary
//! forms and dense matrices over a field.

pub(crate) mod form;
mod formmatrix;
mod matrix;
mod poly;
mod rational;
pub(crate) mod roots;

pub use form::{factor_form, gcd_forms, BinaryForm, FactorMode, FormFactor};
pub use formmatrix::{generic_rank, minors_gcd, FormMatrix};
pub use matrix::{Mat, RatMatrix, Scalar};
pub use poly::Poly;
pub use rational::{parse_rational, rat, ratio, to_f64, Rational};
