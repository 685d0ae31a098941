//! Numerical engine for lifts of vector fields to the tangent bundle of a
//! semi-Riemannian manifold.
//!
//! The crate builds affine transport lifts `Y^(A,k) = Y^a H_a + (A^a_b p^b + k^a) V_a`
//! from user-declared metric and field expressions, verifies the bracket
//! identities of the connection basis and of the lift algebra numerically,
//! classifies base vector fields by symmetry type, and integrates
//! transport and geodesic equations with invariant monitoring.

// contractions are written as index loops, mirroring the tensor notation
#![allow(clippy::needless_range_loop)]

pub mod bundle;
pub mod catalog;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod lifts;
pub mod sample;
pub mod symmetry;
pub mod tensor;
pub mod transport;

pub use error::{Error, Result};
