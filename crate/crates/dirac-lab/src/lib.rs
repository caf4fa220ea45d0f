//! Simulation and verification workbench for distributed-parameter
//! port-Hamiltonian systems on flat 1-d/2-d/3-d domains.
//!
//! The crate discretizes the domain as a structured cubical complex with
//! staggered primal/dual cochains ([`mesh`], [`forms`]), builds the
//! power-conserving interconnection structure with boundary ports
//! ([`stokes_dirac`]), integrates the induced evolution equations ([`phs`]),
//! lifts states per mesh cell into canonical contact coordinates and checks
//! that the dynamics is a restricted contact Hamiltonian vector field
//! ([`contact`]), and exposes the convex-duality geometry of the energy
//! density: Legendre transforms, fiber metric, dual connections and the
//! canonical divergence ([`infogeo`]).
//!
//! The `dirac-lab` binary drives scenarios from plain `key = value` config
//! files and runs the invariant batteries; see the README for usage.

pub mod config;
pub mod contact;
pub mod density;
pub mod error;
pub mod exterior;
pub mod forms;
pub mod infogeo;
pub mod mesh;
pub mod parallel;
pub mod phs;
pub mod runner;
pub mod snapshot;
pub mod stokes_dirac;

mod linalg;

pub use error::{Error, Result};
