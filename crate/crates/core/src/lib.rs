//! Crossing point process of a random geometric graph in the unit-volume
//! ball of R³, drawn by orthogonal projection onto planes through the origin.
//!
//! The crate is `no_std` and only needs `alloc`. Randomness is injected via
//! [`rand::Rng`] so callers decide how streams are seeded; file formats,
//! parallel experiment drivers and the command line live in the `planecross`
//! companion crate.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod math;

pub mod crossings;
pub mod geometry;
pub mod pointprocess;
pub mod quadrature;
pub mod rgg;
pub mod seeding;
pub mod stats;
pub mod theory;

pub use crate::crossings::{Crossing, CrossingSet};
pub use crate::error::{Error, Result};
pub use crate::geometry::{BallWindow, Point2, ProjectionPlane, Region2, SpherePoint, Vec3};
pub use crate::pointprocess::PointCloud;
pub use crate::rgg::GeometricGraph;
pub use crate::stats::EmpiricalPmf;
pub use crate::theory::{ModelConstants, RegimeSpec};
