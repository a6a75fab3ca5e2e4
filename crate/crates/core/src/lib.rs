//! Exact integer minimization of convex functions from a separation oracle.

pub mod error;
pub mod barrier;
pub mod bench;
pub mod cli;
pub mod cutting_plane;
pub mod dimred;
pub mod lattice;
pub mod oracles;
pub mod instance;
pub mod report;
pub mod sfm;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
