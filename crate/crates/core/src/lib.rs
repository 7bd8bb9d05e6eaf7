//! Numerics for the biharmonic heat equation: the fundamental solution,
//! self-similar profiles of the linear flow from |x|^{-β} data, lobe-wise
//! positivity certificates, and globally positive solutions of
//! ∂_t u + Δ²u = |u|^{p-1}u.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::type_complexity)]

pub mod bessel;
pub mod error;
pub mod gamma;
pub mod grid;
pub mod kernel;
pub mod linear;
pub mod quad;
pub mod semilinear;

pub use error::{Error, Result};
