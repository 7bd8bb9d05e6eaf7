//! Globally positive self-similar solutions of ∂_t u + Δ²u = |u|^{p-1}u.

mod duhamel;
mod hankel;
mod hbound;
mod problem;

pub use duhamel::{duhamel_apply, picard_solve, DuhamelSolver, Envelopes, PicardResult};
pub use hankel::R_MAX;
pub use hbound::{h_bound_report, h_weighted, HReport};
pub use problem::{Nonlinearity, ProblemSpec, WeightedField};
