//! Deterministic discontinuous-Galerkin solver for the Boltzmann-Poisson system
//! in 2D silicon devices with 3D momentum and reflective wall conditions.

pub mod boundary;
pub mod collision;
pub mod config;
pub mod convergence;
pub mod device;
pub mod driver;
pub mod error;
pub mod grid;
pub mod material;
pub mod observables;
pub mod output;
pub mod poisson;
pub mod quadrature;
pub mod state;
pub mod transport;

pub use error::{Error, Result};
