//! Numerical engine for meridian surfaces in four-dimensional Euclidean space.
//!
//! A meridian surface is `z(u, v) = f(u)·l(v) + g(u)·e₄`, where `(f, g)` is a
//! unit-speed meridian profile and `l(v)` an arc-length curve on the unit
//! sphere of R³. The crate computes the surface's fundamental forms, scalar
//! invariants and the eight frame invariants (γ₁, γ₂, ν₁, ν₂, λ, μ, β₁, β₂),
//! both from closed forms and from finite differences of explicit frame
//! fields, and bundles the Chen (λ = 0) and parallel-normal-bundle
//! (β₁ = β₂ = 0) classifications into verification suites.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curves;
pub mod error;
pub mod meridian;
pub mod numeric;
pub mod profiles;
pub mod surface;
pub mod surface_spec;
pub mod verify;

pub use error::{GeomError, Result};
