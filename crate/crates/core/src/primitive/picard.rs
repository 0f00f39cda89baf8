//! Successive linearization: transport and momentum advected by the previous iterate.

use super::dynamics::{momentum_mean_of, tendency};
use super::{fix_mean, PrimitiveState};
use crate::error::{Error, Result};
use crate::solver::{project_and_dealias, SolverParams};
use crate::spectral::{coeffs, dealias_raw, real, ScalarField, VectorField};

#[derive(Debug, Clone)]
pub struct CauchyReport {
    /// `d_n = sup_t (||a^{n+1} - a^n|| + ||u^{n+1} - u^n||)` in `L^2`.
    pub d: Vec<f64>,
    /// `d_{n+1} / d_n`, absent when either side is below the round-off floor.
    pub ratios: Vec<Option<f64>>,
    pub noise_floor: f64,
    /// Set when `d_n` grew three times in a row.
    pub diverging: bool,
}

#[derive(Debug, Clone)]
pub struct PicardResult {
    pub times: Vec<f64>,
    /// `iterates[n][k]` is iterate `n` at `times[k]`.
    pub iterates: Vec<Vec<PrimitiveState>>,
    pub report: CauchyReport,
}

fn lin(x: &[(&ScalarField, f64)]) -> ScalarField {
    let mut out = ScalarField::zeros(x[0].0.grid);
    for (f, c) in x {
        out.axpy(*c, f);
    }
    out
}

fn lin_v(x: &[(&VectorField, f64)]) -> VectorField {
    let mut out = VectorField::zeros(x[0].0.grid());
    for (f, c) in x {
        out.axpy(*c, f);
    }
    out
}

/// Advecting field of the previous iterate midway through step `k`, by cubic interpolation.
fn midpoint(prev: &[PrimitiveState], k: usize) -> VectorField {
    let m = prev.len() - 1;
    let (idx, w): ([usize; 4], [f64; 4]) = if k == 0 {
        ([0, 1, 2, 3], [0.3125, 0.9375, -0.3125, 0.0625])
    } else if k + 1 == m {
        ([m - 3, m - 2, m - 1, m], [0.0625, -0.3125, 0.9375, 0.3125])
    } else {
        ([k - 1, k, k + 1, k + 2], [-0.0625, 0.5625, 0.5625, -0.0625])
    };
    lin_v(&[(&prev[idx[0]].u, w[0]), (&prev[idx[1]].u, w[1]), (&prev[idx[2]].u, w[2]), (&prev[idx[3]].u, w[3])])
}

fn next_iterate(data: &PrimitiveState, prev: &[PrimitiveState], dt: f64, params: &SolverParams) -> Result<Vec<PrimitiveState>> {
    let eps = data.epsilon;
    let mut out = vec![data.clone()];
    let mut guess = coeffs(&data.pi);
    for k in 0..prev.len() - 1 {
        let s = out.last().expect("nonempty");
        let (a0, u0) = (&s.a, &s.u);
        let m0 = momentum_mean_of(a0, u0, eps);
        let (w0, w1, wh) = (&prev[k].u, &prev[k + 1].u, midpoint(prev, k));
        let k1 = tendency(a0, w0, u0, eps, params, Some(&guess))?;
        let a1 = lin(&[(a0, 1.0), (&k1.da, dt)]);
        let mut u1 = project_and_dealias(&lin_v(&[(u0, 1.0), (&k1.du, dt)]));
        fix_mean(&a1, &mut u1, eps, m0, dt);
        let k2 = tendency(&a1, w1, &u1, eps, params, Some(&k1.pi))?;
        let a2 = lin(&[(a0, 0.75), (&a1, 0.25), (&k2.da, 0.25 * dt)]);
        let mut u2 = project_and_dealias(&lin_v(&[(u0, 0.75), (&u1, 0.25), (&k2.du, 0.25 * dt)]));
        fix_mean(&a2, &mut u2, eps, m0, 0.5 * dt);
        let k3 = tendency(&a2, &wh, &u2, eps, params, Some(&k2.pi))?;
        let a3 = dealias_raw(&lin(&[(a0, 1.0 / 3.0), (&a2, 2.0 / 3.0), (&k3.da, 2.0 / 3.0 * dt)]));
        let mut u3 = project_and_dealias(&lin_v(&[(u0, 1.0 / 3.0), (&u2, 2.0 / 3.0), (&k3.du, 2.0 / 3.0 * dt)]));
        fix_mean(&a3, &mut u3, eps, m0, dt);
        let fin = tendency(&a3, w1, &u3, eps, params, Some(&k3.pi))?;
        guess = fin.pi.clone();
        let pi = real(a3.grid, &fin.pi);
        out.push(PrimitiveState { t: prev[k + 1].t, epsilon: eps, a: a3, u: u3, pi });
    }
    Ok(out)
}

fn distance(x: &[PrimitiveState], y: &[PrimitiveState]) -> f64 {
    x.iter().zip(y).map(|(p, q)| p.a.sub(&q.a).l2_norm() + p.u.sub(&q.u).l2_norm()).fold(0.0, f64::max)
}

/// Run `n_iters` Picard iterations on a uniform grid of `steps` steps over `[0, horizon]`.
/// Iterate 0 is the datum held constant in time with zero pressure.
pub fn picard_construct(
    data: &PrimitiveState,
    horizon: f64,
    steps: usize,
    n_iters: usize,
    params: &SolverParams,
) -> Result<PicardResult> {
    if !(horizon > 0.0 && horizon.is_finite()) || steps < 3 || n_iters == 0 {
        return Err(Error::InvalidArgument(format!(
            "picard needs horizon > 0, at least 3 steps and one iteration (got {horizon}, {steps}, {n_iters})"
        )));
    }
    params.validate()?;
    let dt = horizon / steps as f64;
    let times: Vec<f64> = (0..=steps).map(|k| if k == steps { horizon } else { k as f64 * dt }).collect();
    let base = PrimitiveState { pi: ScalarField::zeros(data.grid()), ..data.clone() };
    let zeroth: Vec<PrimitiveState> = times.iter().map(|&t| PrimitiveState { t, ..base.clone() }).collect();
    let mut iterates = vec![zeroth];
    let mut d = Vec::new();
    for _ in 0..n_iters {
        let prev = iterates.last().expect("nonempty");
        let next = next_iterate(data, prev, dt, params)?;
        d.push(distance(&next, prev));
        iterates.push(next);
    }
    let noise_floor = 1e-13 * (data.a.l2_norm() + data.u.l2_norm()).max(1e-300);
    let ratios = d
        .windows(2)
        .map(|w| (w[0] > noise_floor && w[1] > noise_floor).then(|| w[1] / w[0]))
        .collect();
    let diverging = d.windows(4).any(|w| w[1] > w[0] && w[2] > w[1] && w[3] > w[2]);
    Ok(PicardResult { times, iterates, report: CauchyReport { d, ratios, noise_floor, diverging } })
}
