//! Time-stepping controls shared by the primitive and limit solvers.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::spectral::{dealias_raw, leray_raw, VectorField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep {
    Fixed(f64),
    /// CFL number: `dt * (n/2) * max|u| <= cfl`.
    Cfl(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    pub time_step: TimeStep,
    pub pressure_tol: f64,
    pub pressure_max_iter: usize,
    pub blowup_threshold: f64,
    pub density_bounds: (f64, f64),
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            time_step: TimeStep::Cfl(0.5),
            pressure_tol: 1e-11,
            pressure_max_iter: 200,
            blowup_threshold: 1e4,
            density_bounds: (0.5, 2.0),
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        match self.time_step {
            TimeStep::Fixed(dt) if !(dt > 0.0 && dt.is_finite()) => return bad(format!("dt must be positive, got {dt}")),
            TimeStep::Cfl(c) if !(c > 0.0 && c <= 1.0) => return bad(format!("cfl must lie in (0, 1], got {c}")),
            _ => {}
        }
        if !(self.pressure_tol > 0.0 && self.pressure_tol < 1e-6) {
            return bad(format!("pressure_tol must lie in (0, 1e-6), got {}", self.pressure_tol));
        }
        if self.pressure_max_iter == 0 {
            return bad("pressure_max_iter must be positive".into());
        }
        if !(self.blowup_threshold > 0.0) {
            return bad(format!("blowup_threshold must be positive, got {}", self.blowup_threshold));
        }
        let (lo, hi) = self.density_bounds;
        if !(lo > 0.0 && lo < 1.0 && hi > 1.0 && hi.is_finite()) {
            return bad(format!("density bounds must satisfy 0 < rho_min < 1 < rho_max, got ({lo}, {hi})"));
        }
        Ok(())
    }

    /// Step size allowed by the configured rule for a velocity field.
    pub fn dt_for(&self, u: &VectorField) -> f64 {
        match self.time_step {
            TimeStep::Fixed(dt) => dt,
            TimeStep::Cfl(c) => {
                let umax = u.linf_norm();
                let k = u.grid().n() as f64 / 2.0;
                if umax > 0.0 {
                    c / (k * umax)
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct StepReport<S> {
    pub state: S,
    pub dt: f64,
    pub pressure_iters: usize,
    /// Grid maximum of `|grad u|` after the step.
    pub grad_u_max: f64,
    pub blowup: bool,
}

#[derive(Debug, Clone)]
pub struct Frame<S> {
    pub state: S,
    /// Pressure iterations spent since the previous frame.
    pub pressure_iters: usize,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory<S> {
    pub frames: Vec<Frame<S>>,
    /// Time at which the blow-up proxy fired, if it did.
    pub blowup: Option<f64>,
    pub steps: usize,
}

impl<S> Trajectory<S> {
    pub fn last(&self) -> &S {
        &self.frames.last().expect("trajectory has at least one frame").state
    }

    pub fn states(&self) -> impl Iterator<Item = &S> {
        self.frames.iter().map(|f| &f.state)
    }
}

pub(crate) fn check_output_times(t0: f64, times: &[f64]) -> Result<()> {
    let mut prev = t0;
    for &t in times {
        if !t.is_finite() || t < prev || (t == prev && t != t0) {
            return Err(Error::InvalidArgument(format!("output times must increase from {t0}, got {t}")));
        }
        prev = t;
    }
    Ok(())
}

/// Drive `step(state, max_dt)` through every output time.
pub(crate) fn integrate_with<S: Clone>(
    initial: S,
    output_times: &[f64],
    time_of: impl Fn(&S) -> f64,
    set_time: impl Fn(&mut S, f64),
    mut step: impl FnMut(&S, f64) -> Result<StepReport<S>>,
) -> Result<Trajectory<S>> {
    let t0 = time_of(&initial);
    check_output_times(t0, output_times)?;
    let clock = Instant::now();
    let mut frames = vec![Frame { state: initial.clone(), pressure_iters: 0, wall_time_ms: 0.0 }];
    let mut state = initial;
    let mut iters = 0;
    let mut steps = 0;
    for &target in output_times {
        if target == t0 {
            continue;
        }
        while time_of(&state) < target {
            let remaining = target - time_of(&state);
            let rep = step(&state, remaining)?;
            steps += 1;
            iters += rep.pressure_iters;
            state = rep.state;
            if rep.dt >= remaining {
                set_time(&mut state, target);
            }
            if rep.blowup {
                let t = time_of(&state);
                frames.push(Frame { state, pressure_iters: iters, wall_time_ms: clock.elapsed().as_secs_f64() * 1e3 });
                return Ok(Trajectory { frames, blowup: Some(t), steps });
            }
        }
        frames.push(Frame { state: state.clone(), pressure_iters: iters, wall_time_ms: clock.elapsed().as_secs_f64() * 1e3 });
        iters = 0;
    }
    Ok(Trajectory { frames, blowup: None, steps })
}

/// Choose the step so that a nearly exhausted interval is not left with a sliver.
pub(crate) fn clamp_dt(dt: f64, remaining: f64) -> f64 {
    if dt >= remaining * (1.0 - 1e-10) {
        remaining
    } else {
        dt
    }
}

pub(crate) fn project_and_dealias(u: &VectorField) -> VectorField {
    let p = leray_raw(u);
    VectorField { x: dealias_raw(&p.x), y: dealias_raw(&p.y) }
}

pub(crate) fn check_finite_state(a: &crate::ScalarField, u: &VectorField) -> Result<()> {
    a.check_finite().and_then(|_| u.check_finite()).map_err(|e| Error::Numerical(format!("state became non-finite: {e}")))
}
