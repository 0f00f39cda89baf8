use num_complex::Complex64;

use super::pressure::{rhs_coeffs, solve_coeffs, PressureSolution};
use super::PrimitiveState;
use crate::error::{Error, Result};
use crate::solver::{check_finite_state, clamp_dt, integrate_with, project_and_dealias, SolverParams, StepReport, Trajectory};
use crate::spectral::{advect_raw, coeffs, dealias_raw, grad_linf, leray_coeffs, real, ScalarField, VectorField};

#[derive(Debug, Clone)]
pub struct PrimitiveRhs {
    pub da_dt: ScalarField,
    pub du_dt: VectorField,
    pub pressure: PressureSolution,
}

pub(crate) struct Tendency {
    pub da: ScalarField,
    pub du: VectorField,
    pub pi: Vec<Complex64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Right-hand side of the transport and momentum equations with `a` and `u`
/// advected by `w`; `w = u` gives the nonlinear system.
pub(crate) fn tendency(
    a: &ScalarField,
    w: &VectorField,
    u: &VectorField,
    eps: f64,
    params: &SolverParams,
    guess: Option<&[Complex64]>,
) -> Result<Tendency> {
    let g = a.grid;
    let da = advect_raw(w, a).scale(-1.0);
    let adv = [coeffs(&advect_raw(w, &u.x)), coeffs(&advect_raw(w, &u.y))];
    let rhs = rhs_coeffs(u, &adv, eps);
    let p = solve_coeffs(a, &rhs, eps, params.pressure_tol, params.pressure_max_iter, guess)?;
    let mut gx: Vec<Complex64> = adv[0].iter().zip(&p.flux[0]).map(|(v, f)| -v - f).collect();
    let mut gy: Vec<Complex64> = adv[1].iter().zip(&p.flux[1]).map(|(v, f)| -v - f).collect();
    leray_coeffs(g, &mut gx, &mut gy);
    gx[0] = Complex64::new(0.0, 0.0);
    gy[0] = Complex64::new(0.0, 0.0);
    let du = VectorField { x: real(g, &gx), y: real(g, &gy) };
    Ok(Tendency { da, du, pi: p.pi, iterations: p.iterations, residual: p.residual })
}

/// Mean of `rho u`, which rotates rigidly at angular speed `1/eps`.
pub(crate) fn momentum_mean_of(a: &ScalarField, u: &VectorField, eps: f64) -> [f64; 2] {
    let n = a.values.len();
    let (mut mx, mut my) = (0.0, 0.0);
    for i in 0..n {
        let rho = 1.0 / (1.0 + eps * a.values[i]);
        mx += rho * u.x.values[i];
        my += rho * u.y.values[i];
    }
    [mx / n as f64, my / n as f64]
}

/// Set the mean of `u` so that the momentum mean equals `m0` rotated by `tau/eps`.
pub(crate) fn fix_mean(a: &ScalarField, u: &mut VectorField, eps: f64, m0: [f64; 2], tau: f64) {
    let (s, c) = (tau / eps).sin_cos();
    let target = [c * m0[0] + s * m0[1], -s * m0[0] + c * m0[1]];
    let (ux, uy) = (u.x.mean(), u.y.mean());
    let n = a.values.len();
    let (mut rx, mut ry, mut rho_mean) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let rho = 1.0 / (1.0 + eps * a.values[i]);
        rho_mean += rho;
        rx += rho * (u.x.values[i] - ux);
        ry += rho * (u.y.values[i] - uy);
    }
    let (rx, ry, rho_mean) = (rx / n as f64, ry / n as f64, rho_mean / n as f64);
    let mx = (target[0] - rx) / rho_mean;
    let my = (target[1] - ry) / rho_mean;
    for v in u.x.values.iter_mut() {
        *v += mx - ux;
    }
    for v in u.y.values.iter_mut() {
        *v += my - uy;
    }
}

fn combine(base: &ScalarField, cb: f64, cur: &ScalarField, cc: f64, d: &ScalarField, dt: f64) -> ScalarField {
    let values = (0..base.values.len())
        .map(|i| cb * base.values[i] + cc * (cur.values[i] + dt * d.values[i]))
        .collect();
    ScalarField { grid: base.grid, values }
}

fn combine_v(base: &VectorField, cb: f64, cur: &VectorField, cc: f64, d: &VectorField, dt: f64) -> VectorField {
    VectorField { x: combine(&base.x, cb, &cur.x, cc, &d.x, dt), y: combine(&base.y, cb, &cur.y, cc, &d.y, dt) }
}

fn validate_state(state: &PrimitiveState) -> Result<()> {
    if !(state.epsilon > 0.0 && state.epsilon <= 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1], got {}", state.epsilon)));
    }
    state.a.check_finite()?;
    state.u.check_finite()?;
    state.a.grid.check_same(&state.u.grid())?;
    state.u.x.grid.check_same(&state.u.y.grid)
}

/// Time derivatives of `a` and `u`, with the pressure solved from a zero initial guess.
pub fn primitive_rhs(state: &PrimitiveState, params: &SolverParams) -> Result<PrimitiveRhs> {
    validate_state(state)?;
    let t = tendency(&state.a, &state.u, &state.u, state.epsilon, params, None)?;
    let pressure = PressureSolution { pi: real(state.grid(), &t.pi), iterations: t.iterations, residual: t.residual };
    Ok(PrimitiveRhs { da_dt: t.da, du_dt: t.du, pressure })
}

/// One SSP-RK3 step of size `dt`; negative `dt` integrates backwards.
pub fn step_primitive_dt(state: &PrimitiveState, params: &SolverParams, dt: f64) -> Result<StepReport<PrimitiveState>> {
    validate_state(state)?;
    if !(dt.is_finite() && dt != 0.0) {
        return Err(Error::InvalidArgument(format!("step size must be finite and nonzero, got {dt}")));
    }
    let eps = state.epsilon;
    let (a0, u0) = (&state.a, &state.u);
    let m0 = momentum_mean_of(a0, u0, eps);
    let guess0 = coeffs(&state.pi);
    let k1 = tendency(a0, u0, u0, eps, params, Some(&guess0))?;
    let a1 = combine(a0, 0.0, a0, 1.0, &k1.da, dt);
    let mut u1 = project_and_dealias(&combine_v(u0, 0.0, u0, 1.0, &k1.du, dt));
    fix_mean(&a1, &mut u1, eps, m0, dt);
    let k2 = tendency(&a1, &u1, &u1, eps, params, Some(&k1.pi))?;
    let a2 = combine(a0, 0.75, &a1, 0.25, &k2.da, dt);
    let mut u2 = project_and_dealias(&combine_v(u0, 0.75, &u1, 0.25, &k2.du, dt));
    fix_mean(&a2, &mut u2, eps, m0, 0.5 * dt);
    let k3 = tendency(&a2, &u2, &u2, eps, params, Some(&k2.pi))?;
    let a3 = dealias_raw(&combine(a0, 1.0 / 3.0, &a2, 2.0 / 3.0, &k3.da, dt));
    let mut u3 = project_and_dealias(&combine_v(u0, 1.0 / 3.0, &u2, 2.0 / 3.0, &k3.du, dt));
    fix_mean(&a3, &mut u3, eps, m0, dt);
    check_finite_state(&a3, &u3)?;
    let fin = tendency(&a3, &u3, &u3, eps, params, Some(&k3.pi))?;
    let next = PrimitiveState { t: state.t + dt, epsilon: eps, a: a3, u: u3, pi: real(state.grid(), &fin.pi) };
    next.check_density(params.density_bounds).map_err(|e| Error::Numerical(format!("at t = {}: {e}", next.t)))?;
    let grad_u_max = grad_linf(&next.u);
    Ok(StepReport {
        blowup: !(grad_u_max <= params.blowup_threshold),
        state: next,
        dt,
        pressure_iters: k1.iterations + k2.iterations + k3.iterations + fin.iterations,
        grad_u_max,
    })
}

/// One step sized by the configured rule.
pub fn step_primitive(state: &PrimitiveState, params: &SolverParams) -> Result<StepReport<PrimitiveState>> {
    let dt = params.dt_for(&state.u);
    step_primitive_dt(state, params, if dt.is_finite() { dt } else { 0.1 })
}

/// Advance through `output_times`, landing exactly on each.
pub fn integrate_primitive(
    initial: &PrimitiveState,
    params: &SolverParams,
    output_times: &[f64],
) -> Result<Trajectory<PrimitiveState>> {
    params.validate()?;
    validate_state(initial)?;
    integrate_with(
        initial.clone(),
        output_times,
        |s| s.t,
        |s, t| s.t = t,
        |s, remaining| step_primitive_dt(s, params, clamp_dt(params.dt_for(&s.u), remaining)),
    )
}
