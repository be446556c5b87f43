//! Subequations of fully nonlinear, degenerate elliptic second-order
//! equations.
//!
//! A subequation is a closed set F of 2-jets (r, p, A) described by a
//! defining function, F = {rho ≥ 0} with Int F = {rho > 0}. The crate
//! provides the jet algebra, Dirichlet duality, sampled axiom and
//! monotonicity checks, a catalog of named equations and monotonicity cones,
//! Gårding hyperbolic polynomials, affine jet maps, Riesz characteristics,
//! boundary convexity tests and a grid Perron solver.

// `!(x >= lo)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary;
pub mod catalog;
pub mod checks;
pub mod error;
pub mod expr;
pub mod garding;
pub mod jet_equiv;
pub mod linalg;
pub mod registry;
pub mod riesz;
pub mod sampling;
pub mod solver;
pub mod subequation;

pub use error::{Error, Result};
pub use linalg::{Jet, SymMatrix};
pub use subequation::{Class, Flags, Membership, ScalarField, Subequation};
