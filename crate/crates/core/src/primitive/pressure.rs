use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::solver::SolverParams;
use crate::spectral::{
    advect_raw, coeffs, curl_coeffs, dealias_coeffs, deriv_coeffs, inv_laplacian_coeffs, real, GridSpec, ScalarField,
    VectorField,
};

#[derive(Debug, Clone)]
pub struct PressureSolution {
    pub pi: ScalarField,
    pub iterations: usize,
    /// Final `||div((1 + eps a) grad Pi) + rhs|| / ||rhs||`.
    pub residual: f64,
}

pub(crate) struct PressureWork {
    pub pi: Vec<Complex64>,
    /// Dealiased coefficients of `a grad Pi` at the returned `Pi`.
    pub flux: [Vec<Complex64>; 2],
    pub iterations: usize,
    pub residual: f64,
}

fn l2(c: &[Complex64]) -> f64 {
    c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn flux_of(a: &ScalarField, pi: &[Complex64]) -> [Vec<Complex64>; 2] {
    let g = a.grid;
    let f = |axis| {
        let d = real(g, &deriv_coeffs(g, pi, axis));
        let mut c = coeffs(&a.mul(&d));
        dealias_coeffs(g, &mut c);
        c
    };
    [f(0), f(1)]
}

fn divergence_of(g: GridSpec, f: &[Vec<Complex64>; 2]) -> Vec<Complex64> {
    let mut d = deriv_coeffs(g, &f[0], 0);
    for (x, y) in d.iter_mut().zip(deriv_coeffs(g, &f[1], 1)) {
        *x += y;
    }
    d
}

/// Fixed point `c Delta Pi^{m+1} = -rhs - div((1 + eps a - c) grad Pi^m)` on coefficients, with `c` the
/// midrange of `1 + eps a`, so the contraction factor is `(max - min) / (max + min)`.
pub(crate) fn solve_coeffs(
    a: &ScalarField,
    rhs: &[Complex64],
    eps: f64,
    tol: f64,
    max_iter: usize,
    guess: Option<&[Complex64]>,
) -> Result<PressureWork> {
    let g = a.grid;
    let zero = Complex64::new(0.0, 0.0);
    let rnorm = l2(rhs);
    if rnorm == 0.0 {
        let z = vec![zero; g.len()];
        return Ok(PressureWork { pi: z.clone(), flux: [z.clone(), z], iterations: 0, residual: 0.0 });
    }
    let mut pi = guess.map(|c| c.to_vec()).unwrap_or_else(|| vec![zero; g.len()]);
    let mut iterations = 0;
    let n = g.n();
    let shift = eps * 0.5 * (a.max() + a.min());
    let c = 1.0 + shift;
    loop {
        let flux = flux_of(a, &pi);
        let mut lower = divergence_of(g, &flux);
        for z in lower.iter_mut() {
            *z *= eps;
        }
        let mut res = 0.0;
        for iy in 0..n {
            let ky = g.wavenumber(iy) as f64;
            for ix in 0..n {
                let kx = g.wavenumber(ix) as f64;
                let i = iy * n + ix;
                res += (pi[i] * (-(kx * kx + ky * ky)) + lower[i] + rhs[i]).norm_sqr();
            }
        }
        let residual = res.sqrt() / rnorm;
        if residual <= tol {
            return Ok(PressureWork { pi, flux, iterations, residual });
        }
        if iterations >= max_iter || !residual.is_finite() {
            return Err(Error::PressureNotConverged { iterations, residual });
        }
        let mut next: Vec<Complex64> = rhs.iter().zip(&lower).map(|(r, l)| -r - l).collect();
        if shift != 0.0 {
            for iy in 0..n {
                let ky = g.wavenumber(iy) as f64;
                for ix in 0..n {
                    let kx = g.wavenumber(ix) as f64;
                    let i = iy * n + ix;
                    next[i] = (next[i] - pi[i] * (shift * (kx * kx + ky * ky))) / c;
                }
            }
        }
        inv_laplacian_coeffs(g, &mut next);
        pi = next;
        iterations += 1;
    }
}

/// Coefficients of `eps div(u . grad u) - curl u` given the dealiased advection term.
pub(crate) fn rhs_coeffs(u: &VectorField, adv: &[Vec<Complex64>; 2], eps: f64) -> Vec<Complex64> {
    let g = u.grid();
    let d = divergence_of(g, adv);
    let c = curl_coeffs(u);
    d.into_iter().zip(c).map(|(d, c)| d * eps - c).collect()
}

fn validate(a: &ScalarField, u: Option<&VectorField>, eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1], got {eps}")));
    }
    a.check_finite()?;
    if let Some(u) = u {
        u.check_finite()?;
        a.grid.check_same(&u.grid())?;
        u.x.grid.check_same(&u.y.grid)?;
    }
    Ok(())
}

/// Solve `-div((1 + eps a) grad Pi) = eps div(u . grad u) - curl u` for zero-mean `Pi`.
pub fn solve_pressure(a: &ScalarField, u: &VectorField, eps: f64, params: &SolverParams) -> Result<PressureSolution> {
    validate(a, Some(u), eps)?;
    let adv = [coeffs(&advect_raw(u, &u.x)), coeffs(&advect_raw(u, &u.y))];
    let rhs = rhs_coeffs(u, &adv, eps);
    finish(a, &rhs, eps, params)
}

/// Solve `-div((1 + eps a) grad Pi) = rhs` for a given zero-mean right-hand side.
pub fn solve_pressure_rhs(a: &ScalarField, rhs: &ScalarField, eps: f64, params: &SolverParams) -> Result<PressureSolution> {
    validate(a, None, eps)?;
    rhs.check_finite()?;
    a.grid.check_same(&rhs.grid)?;
    let m = rhs.mean();
    if m.abs() > 1e-10 {
        return Err(Error::NonZeroMean(m));
    }
    let mut c = coeffs(rhs);
    c[0] = Complex64::new(0.0, 0.0);
    finish(a, &c, eps, params)
}

fn finish(a: &ScalarField, rhs: &[Complex64], eps: f64, params: &SolverParams) -> Result<PressureSolution> {
    let w = solve_coeffs(a, rhs, eps, params.pressure_tol, params.pressure_max_iter, None)?;
    Ok(PressureSolution { pi: real(a.grid, &w.pi), iterations: w.iterations, residual: w.residual })
}
