//! Simulator and numerical certifier for quantum verification procedures.

pub mod binomial;
pub mod circuit;
pub mod classical;
pub mod constructions;
pub mod emap;
pub mod error;
pub mod fixtures;
pub mod iterative;
pub mod linalg;
pub mod procedure;
pub mod report;
pub mod spectral;
pub mod tolerances;
pub mod verify;

pub use error::{Error, Result};
