//! Stationary lattice directed-polymer models built on beta-gamma weight
//! algebra.
//!
//! The crate provides:
//!
//! * exact samplers and log-densities for the gamma/beta families and their
//!   reciprocal and shifted variants ([`distributions`]),
//! * the closed-form polymer involution for linear weight links, its
//!   G-factorization, domains, and Jacobians ([`involution`]),
//! * the four basic stationary models, the (a, b) classification, and the
//!   reflection/scaling modifications ([`models`]),
//! * lattice simulation of the ratio fields with a path-enumeration oracle
//!   ([`lattice`]),
//! * distributional tests (KS, rank independence) and the invariance test
//!   suite ([`stats`]),
//! * deterministic analytic verification of the density-level invariance
//!   identities ([`verify`]).

pub mod distributions;
pub mod error;
pub mod involution;
pub mod lattice;
pub mod models;
pub mod rng;
pub mod stats;
pub mod tolerances;
pub mod verify;

pub use error::{Error, Result};
