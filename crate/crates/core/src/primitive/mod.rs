//! The rotating density-dependent system written for `a = (1/rho - 1)/eps`.

pub mod data;
mod dynamics;
pub mod picard;
mod pressure;
pub mod stability;

pub use data::{make_initial_data, make_qh_initial_data, DataKind, DataSpec, FourierMode};
pub use dynamics::{integrate_primitive, primitive_rhs, step_primitive, step_primitive_dt, PrimitiveRhs};
pub(crate) use dynamics::fix_mean;
pub use picard::{picard_construct, CauchyReport, PicardResult};
pub use pressure::{solve_pressure, solve_pressure_rhs, PressureSolution};
pub use stability::{
    fit_gronwall_constant, gronwall_envelope, run_stability_twin, stability_a_rate, stability_distance, stability_history,
    StabilityRecord, TwinReport,
};

use crate::error::{Error, Result};
use crate::spectral::{sup_norm, trig_extrema, GridSpec, ScalarField, VectorField};

#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveState {
    pub t: f64,
    pub epsilon: f64,
    pub a: ScalarField,
    pub u: VectorField,
    pub pi: ScalarField,
}

impl PrimitiveState {
    pub fn grid(&self) -> GridSpec {
        self.a.grid
    }

    /// `rho = 1 / (1 + eps a)`.
    pub fn density(&self) -> ScalarField {
        let e = self.epsilon;
        self.a.map(|a| 1.0 / (1.0 + e * a))
    }

    /// `R = -a rho = (rho - 1) / eps`.
    pub fn fluctuation(&self) -> ScalarField {
        let e = self.epsilon;
        self.a.map(|a| -a / (1.0 + e * a))
    }

    /// Momentum `V = rho u`.
    pub fn momentum(&self) -> VectorField {
        self.u.mul_scalar(&self.density())
    }

    pub fn check_density(&self, bounds: (f64, f64)) -> Result<()> {
        let rho = self.density();
        let (min, max) = (rho.min(), rho.max());
        if !(min >= bounds.0 && max <= bounds.1) || self.a.values.iter().any(|&a| 1.0 + self.epsilon * a <= 0.0) {
            return Err(Error::DensityBounds { min, max, lo: bounds.0, hi: bounds.1 });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conserved {
    /// `int rho |u|^2` for the normalized measure.
    pub energy: f64,
    /// `sup |R|`, taken from the extrema of the trigonometric interpolant of `a`.
    pub linf_r: f64,
    pub l2_r: f64,
    pub mean_a: f64,
    /// `sup |a|` of the trigonometric interpolant.
    pub linf_a: f64,
    pub momentum: [f64; 2],
}

/// `R = -a / (1 + eps a)` is monotone in `a`, so its extreme modulus sits at an extremum of `a`.
pub fn linf_fluctuation(a: &ScalarField, eps: f64) -> f64 {
    let (lo, hi) = trig_extrema(a);
    let r = |a: f64| (a / (1.0 + eps * a)).abs();
    r(lo).max(r(hi))
}

pub fn conserved_quantities(state: &PrimitiveState) -> Conserved {
    let rho = state.density();
    let u2 = state.u.dot(&state.u);
    let energy = rho.mul(&u2).mean();
    let m = state.momentum();
    Conserved {
        energy,
        linf_r: linf_fluctuation(&state.a, state.epsilon),
        l2_r: state.fluctuation().l2_norm(),
        mean_a: state.a.mean(),
        linf_a: sup_norm(&state.a),
        momentum: [m.x.mean(), m.y.mean()],
    }
}
