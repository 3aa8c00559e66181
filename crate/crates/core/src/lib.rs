//! Picard-Manin calculus for random products of plane birational maps.
//!
//! The crate is layered bottom-up:
//!
//! - [`poly`]: homogeneous polynomials in `x, y, z` over exact rationals,
//!   gcd, multiplicities, Jacobians.
//! - [`maps`]: birational maps as coprime polynomial triples, quadratic
//!   generators `a∘σ∘b`, genericity certificates.
//! - [`picard`]: point registry, Weil classes in the canonical basis, the
//!   intersection form and the pullback action of generators.
//! - [`walk`]: random walks on the free group generated by the generators,
//!   the reduced-word class stack and its convergence diagnostics.
//! - [`equidist`]: curve pullbacks, strict transforms, Lelong numbers and
//!   the class-level equidistribution diagnostic.

pub mod crosscheck;
pub mod equidist;
pub mod error;
pub mod maps;
pub mod picard;
pub mod poly;
pub mod scalar;
pub mod walk;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use scalar::{Exact, Float, Mode, DEFAULT_TOLERANCE};
