//! The quasi-homogeneous limit: `R` transported by `u`, Euler dynamics forced by `R u^perp`.

use num_complex::Complex64;

use crate::besov::{besov_norm, besov_norm_vector};
use crate::error::{Error, Result};
use crate::solver::{check_finite_state, clamp_dt, integrate_with, project_and_dealias, SolverParams, StepReport, Trajectory};
use crate::spectral::{
    advect_raw, coeffs, curl2, dealias_coeffs, dealias_raw, deriv_coeffs, gradient_raw, grad_linf, inv_laplacian_coeffs,
    leray_coeffs, real, GridSpec, ScalarField, VectorField,
};

#[derive(Debug, Clone, PartialEq)]
pub struct QhState {
    pub t: f64,
    pub r: ScalarField,
    pub u: VectorField,
    pub pi: ScalarField,
}

impl QhState {
    pub fn grid(&self) -> GridSpec {
        self.r.grid
    }
}

/// Coefficients of `G = u . grad u + R u^perp`, dealiased.
fn forcing(r: &ScalarField, u: &VectorField) -> [Vec<Complex64>; 2] {
    let g = r.grid;
    let gx = advect_raw(u, &u.x);
    let gy = advect_raw(u, &u.y);
    let mut fx = coeffs(&r.zip_map(&u.y, |r, v| -r * v));
    let mut fy = coeffs(&r.mul(&u.x));
    dealias_coeffs(g, &mut fx);
    dealias_coeffs(g, &mut fy);
    let cx = coeffs(&gx).into_iter().zip(fx).map(|(a, b)| a + b).collect();
    let cy = coeffs(&gy).into_iter().zip(fy).map(|(a, b)| a + b).collect();
    [cx, cy]
}

fn pressure_coeffs(g: GridSpec, f: &[Vec<Complex64>; 2]) -> Vec<Complex64> {
    let mut d = deriv_coeffs(g, &f[0], 0);
    for (a, b) in d.iter_mut().zip(deriv_coeffs(g, &f[1], 1)) {
        *a = -(*a + b);
    }
    inv_laplacian_coeffs(g, &mut d);
    d
}

fn validate(r: &ScalarField, u: &VectorField) -> Result<()> {
    r.check_finite()?;
    u.check_finite()?;
    r.grid.check_same(&u.grid())?;
    u.x.grid.check_same(&u.y.grid)
}

/// `Pi = -Delta^{-1} div(u . grad u + R u^perp)`.
pub fn qh_pressure(r: &ScalarField, u: &VectorField) -> Result<ScalarField> {
    validate(r, u)?;
    Ok(real(r.grid, &pressure_coeffs(r.grid, &forcing(r, u))))
}

fn tendency(r: &ScalarField, u: &VectorField) -> (ScalarField, VectorField) {
    let g = r.grid;
    let dr = advect_raw(u, r).scale(-1.0);
    let [mut gx, mut gy] = forcing(r, u);
    leray_coeffs(g, &mut gx, &mut gy);
    gx[0] = Complex64::new(0.0, 0.0);
    gy[0] = Complex64::new(0.0, 0.0);
    let du = VectorField { x: real(g, &gx).scale(-1.0), y: real(g, &gy).scale(-1.0) };
    (dr, du)
}

/// `(dR/dt, du/dt) = (-u . grad R, -P(u . grad u + R u^perp))`.
pub fn qh_rhs(state: &QhState) -> Result<(ScalarField, VectorField)> {
    validate(&state.r, &state.u)?;
    Ok(tendency(&state.r, &state.u))
}

fn lin(base: &ScalarField, cb: f64, cur: &ScalarField, cc: f64, d: &ScalarField, dt: f64) -> ScalarField {
    let values = (0..base.values.len())
        .map(|i| cb * base.values[i] + cc * (cur.values[i] + dt * d.values[i]))
        .collect();
    ScalarField { grid: base.grid, values }
}

fn lin_v(base: &VectorField, cb: f64, cur: &VectorField, cc: f64, d: &VectorField, dt: f64) -> VectorField {
    VectorField { x: lin(&base.x, cb, &cur.x, cc, &d.x, dt), y: lin(&base.y, cb, &cur.y, cc, &d.y, dt) }
}

pub fn step_qh_dt(state: &QhState, params: &SolverParams, dt: f64) -> Result<StepReport<QhState>> {
    validate(&state.r, &state.u)?;
    if !(dt.is_finite() && dt != 0.0) {
        return Err(Error::InvalidArgument(format!("step size must be finite and nonzero, got {dt}")));
    }
    let (r0, u0) = (&state.r, &state.u);
    let (dr, du) = tendency(r0, u0);
    let r1 = lin(r0, 0.0, r0, 1.0, &dr, dt);
    let u1 = project_and_dealias(&lin_v(u0, 0.0, u0, 1.0, &du, dt));
    let (dr, du) = tendency(&r1, &u1);
    let r2 = lin(r0, 0.75, &r1, 0.25, &dr, dt);
    let u2 = project_and_dealias(&lin_v(u0, 0.75, &u1, 0.25, &du, dt));
    let (dr, du) = tendency(&r2, &u2);
    let r3 = dealias_raw(&lin(r0, 1.0 / 3.0, &r2, 2.0 / 3.0, &dr, dt));
    let u3 = project_and_dealias(&lin_v(u0, 1.0 / 3.0, &u2, 2.0 / 3.0, &du, dt));
    check_finite_state(&r3, &u3)?;
    let pi = real(r3.grid, &pressure_coeffs(r3.grid, &forcing(&r3, &u3)));
    let grad_u_max = grad_linf(&u3);
    Ok(StepReport {
        state: QhState { t: state.t + dt, r: r3, u: u3, pi },
        dt,
        pressure_iters: 0,
        grad_u_max,
        blowup: !(grad_u_max <= params.blowup_threshold),
    })
}

pub fn step_qh(state: &QhState, params: &SolverParams) -> Result<StepReport<QhState>> {
    let dt = params.dt_for(&state.u);
    step_qh_dt(state, params, if dt.is_finite() { dt } else { 0.1 })
}

pub fn integrate_qh(initial: &QhState, params: &SolverParams, output_times: &[f64]) -> Result<Trajectory<QhState>> {
    params.validate()?;
    validate(&initial.r, &initial.u)?;
    integrate_with(
        initial.clone(),
        output_times,
        |s| s.t,
        |s, t| s.t = t,
        |s, remaining| step_qh_dt(s, params, clamp_dt(params.dt_for(&s.u), remaining)),
    )
}

/// `d_t omega + u . grad omega + div(R u)`, with `d_t` from a three-point stencil.
fn vorticity_residual_at(prev: &QhState, cur: &QhState, next: &QhState) -> Result<f64> {
    let (h0, h1) = (cur.t - prev.t, next.t - cur.t);
    if !(h0 > 0.0 && h1 > 0.0) {
        return Err(Error::InvalidArgument("frames must have increasing times".into()));
    }
    let w0 = curl2(&prev.u)?;
    let w1 = curl2(&cur.u)?;
    let w2 = curl2(&next.u)?;
    let c0 = -h1 / (h0 * (h0 + h1));
    let c1 = (h1 - h0) / (h0 * h1);
    let c2 = h0 / (h1 * (h0 + h1));
    let adv = advect_raw(&cur.u, &w1);
    let g = gradient_raw(&cur.r);
    let div_ru = dealias_raw(&cur.u.dot(&g));
    let n = w1.values.len();
    let values = (0..n)
        .map(|i| c0 * w0.values[i] + c1 * w1.values[i] + c2 * w2.values[i] + adv.values[i] + div_ru.values[i])
        .collect();
    Ok(ScalarField { grid: w1.grid, values }.l2_norm())
}

/// Maximum over interior frames of the vorticity-equation residual in `L^2`.
pub fn qh_vorticity_residual(frames: &[QhState]) -> Result<f64> {
    if frames.len() < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 frames, got {}", frames.len())));
    }
    let mut worst: f64 = 0.0;
    for w in frames.windows(3) {
        worst = worst.max(vorticity_residual_at(&w[0], &w[1], &w[2])?);
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QhEnergy {
    /// `||u||_{L^2} + ||omega||_{B^0_{inf,1}}`.
    pub e_total: f64,
    /// `||R||_{B^1_{inf,1}}`.
    pub r_norm: f64,
    /// `||u||_{B^1_{inf,1}}`, equivalent to `e_total` up to constants.
    pub u_besov: f64,
}

pub fn qh_energy(state: &QhState) -> Result<QhEnergy> {
    let w = curl2(&state.u)?;
    Ok(QhEnergy {
        e_total: state.u.l2_norm() + besov_norm(&w, 0.0, f64::INFINITY, 1.0)?,
        r_norm: besov_norm(&state.r, 1.0, f64::INFINITY, 1.0)?,
        u_besov: besov_norm_vector(&state.u, 1.0, f64::INFINITY, 1.0)?,
    })
}
