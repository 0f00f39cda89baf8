//! Pseudo-spectral laboratory for the rotating, weakly inhomogeneous
//! incompressible Euler system on the periodic square and its
//! quasi-homogeneous limit.

pub mod asymptotics;
pub mod besov;
pub mod error;
pub mod harness;
pub mod primitive;
pub mod qh;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use primitive::PrimitiveState;
pub use qh::QhState;
pub use solver::{SolverParams, TimeStep};
pub use spectral::{GridSpec, ScalarField, SpectralScalar, VectorField};
