//! Exact computations with deformations of finite-group representations
//! over finite local rings.
//!
//! The crate is organised bottom-up:
//!
//! - [`local_ring`]: finite local rings with residue field F_{p^r}, stored as
//!   structure constants over Z/p^m, and precision-tracked models of
//!   characteristic-zero rings.
//! - [`presented`]: integer polynomial presentations, their rational fibers,
//!   Gröbner bases, trace forms and differentials, and the finite étale test.
//! - [`group`]: finite groups as Cayley tables.
//! - [`representation`]: residual representations, lifts, strict
//!   equivalence classes, tangent spaces and the averaging argument.
//! - [`udr_checks`]: the necessary condition for a ring to be a universal
//!   deformation ring, group-order lower bounds and cross-checks.
//! - [`cli`]: job files, JSON reports and the result cache behind the `udr`
//!   binary.

pub mod cli;
pub mod error;
pub mod group;
pub mod limits;
pub mod local_ring;
pub mod poly;
pub mod presented;
pub mod representation;
pub mod udr_checks;
pub mod zmod;

pub use error::{Error, Result};
pub use limits::Limits;
