//! Numerics on the Siegel upper half space.

pub mod arithmetic;
pub mod cli;
pub mod enumeration;
pub mod error;
pub mod kernel;
pub mod matkit;
pub mod sampling;
pub mod siegel;
pub mod verify;
pub mod volumes;

pub use error::{Error, Result};
