//! Newton–Okounkov bodies of explicit polynomial section spaces, their
//! Okounkov domains, and the toric moment-map geometry used to glue
//! Euclidean Kähler potentials into them.
//!
//! The crate is organised bottom-up:
//!
//! - [`order`]: additive orders on exponent vectors and separating weights.
//! - [`sections`]: exact polynomial sections, valuations, elimination to the
//!   distinguished basis and the built-in models.
//! - [`bodies`]: the exact rational polytope engine (`Δ_k`, slices, essential
//!   interiors, Okounkov domains, Seshadri parameters).
//! - [`moment`]: log-sum-exp potentials, moment maps, symplectic volumes, the
//!   regularized maximum and capped potentials.
//! - [`degeneration`]: the `τ^γ` rescaling of a distinguished basis and the
//!   numerical gluing certificate.
//! - [`format`]: the line-oriented section-space and polytope files.
//! - [`verify`]: the aggregated property suite.

pub mod bodies;
pub mod degeneration;
pub mod error;
pub mod format;
pub mod moment;
pub mod order;
pub mod rational;
pub mod sections;
pub mod verify;

pub use error::{Error, Result};
pub use order::{Exponent, OrderSpec};
pub use rational::Q;
