//! Vacuum fluctuations focused by a parabolic mirror: geometric-optics ray
//! interference near the focus, the resulting renormalized field observables,
//! and laboratory-scale Casimir-Polder estimates.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod lab;
pub mod multiray;
pub mod observables;
pub mod quadrature;
pub mod segments;
pub mod verify;

pub use error::{Error, Result};
