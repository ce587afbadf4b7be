//! Einstein nilradicals of type (2, q).
//!
//! A two-step nilpotent Lie algebra with two-dimensional center is given by a
//! pair of skew-symmetric matrices `J1, J2`, i.e. by the skew pencil
//! `x J1 + y J2`. This crate computes the complete projective invariant of
//! such a pencil (reduced elementary divisors and minimal indices), decides
//! whether the algebra is an Einstein nilradical, and builds and certifies
//! nilsoliton metrics and pre-Einstein derivations.
//!
//! The crate is `no_std` and only needs `alloc`. All invariant computations
//! are exact over the rationals; metric constructions that need square roots
//! or exponentials run in `f64` and are certified by residuals.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod algebra;
pub mod arith;
pub mod canonical;
pub mod classifier;
mod error;
pub(crate) mod fmath;
pub mod nilsoliton;
pub mod pencil;
pub mod pre_einstein;

pub use error::{Error, Result};

pub use algebra::{MetricData, RicciData, TwoStepAlgebra};
pub use arith::{BinaryForm, FormMatrix, Mat, RatMatrix, Rational};
pub use canonical::CanonicalSpec;
pub use classifier::{classify, FailedCondition, Verdict, VerdictCase};
pub use nilsoliton::NilsolitonCertificate;
pub use pencil::{compute_invariants, CaseTag, Mode, PencilInvariants, SkewPencil};
pub use pre_einstein::PreEinsteinDerivation;
