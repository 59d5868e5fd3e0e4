//! Coherent-state transfer through networks of coupled, damped oscillators.

pub mod cli;
pub mod coherent;
pub mod error;
pub mod fockoracle;
pub mod linalg;
pub mod propagator;
pub mod topology;
pub mod transfer;

pub use error::{Error, Result};
