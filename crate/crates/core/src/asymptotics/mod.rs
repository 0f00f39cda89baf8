//! Experiments on the approach to the quasi-homogeneous limit.

mod lifespan;
mod sweep;
mod wave;

pub use lifespan::{
    lifespan_measure, lifespan_schedule, lifespan_shape, lower_bound_primitive, lower_bound_qh, LifespanConfig,
    LifespanReport, LifespanShape,
};
pub use sweep::{gamma_compactness, run_eps_sweep, GammaReport, GammaTrace, SweepConfig, SweepMember, SweepResult};
pub use wave::{wave_residual, WaveResidual};

use crate::error::Result;
use crate::spectral::{leray_project, perp, VectorField};

/// `||P(u^perp)||_{L^2}`, which vanishes for divergence-free `u` with zero mean.
pub fn limit_constraint_check(u: &VectorField) -> Result<f64> {
    Ok(leray_project(&perp(u))?.l2_norm())
}
