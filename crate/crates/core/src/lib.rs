//! Numerical library for Hopf-algebraic quantum double lattice models.

pub mod acceptance;
pub mod comodule;
pub mod error;
pub mod hopf;
pub mod lattice;
pub mod linalg;
pub mod network;
pub mod operators;
pub mod ribbon;
pub mod zoo;

pub use error::{Error, Result};
