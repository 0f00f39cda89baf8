use num_complex::Complex64;

use super::{fft, GridSpec, ScalarField, SpectralScalar, VectorField};
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub(crate) fn coeffs(f: &ScalarField) -> Vec<Complex64> {
    fft::forward(&f.values, f.grid.n())
}

pub(crate) fn real(grid: GridSpec, c: &[Complex64]) -> ScalarField {
    ScalarField { grid, values: fft::inverse(c, grid.n()) }
}

pub(crate) fn deriv_coeffs(grid: GridSpec, c: &[Complex64], axis: usize) -> Vec<Complex64> {
    let n = grid.n();
    let mut out = c.to_vec();
    for iy in 0..n {
        for ix in 0..n {
            let k = if axis == 0 { grid.derivative_wavenumber(ix) } else { grid.derivative_wavenumber(iy) };
            out[iy * n + ix] *= I * k;
        }
    }
    out
}

pub(crate) fn dealias_coeffs(grid: GridSpec, c: &mut [Complex64]) {
    let n = grid.n();
    let zero = Complex64::new(0.0, 0.0);
    for iy in 0..n {
        let ky = grid.wavenumber(iy);
        for ix in 0..n {
            if !grid.is_retained(grid.wavenumber(ix), ky) {
                c[iy * n + ix] = zero;
            }
        }
    }
}

/// Multiply coefficients by `m(kx, ky)` in place.
pub(crate) fn scale_coeffs(grid: GridSpec, c: &mut [Complex64], m: impl Fn(f64, f64) -> f64) {
    let n = grid.n();
    for iy in 0..n {
        let ky = grid.wavenumber(iy) as f64;
        for ix in 0..n {
            c[iy * n + ix] *= m(grid.wavenumber(ix) as f64, ky);
        }
    }
}

pub(crate) fn dealias_raw(f: &ScalarField) -> ScalarField {
    let mut c = coeffs(f);
    dealias_coeffs(f.grid, &mut c);
    real(f.grid, &c)
}

pub(crate) fn gradient_raw(f: &ScalarField) -> VectorField {
    let c = coeffs(f);
    VectorField { x: real(f.grid, &deriv_coeffs(f.grid, &c, 0)), y: real(f.grid, &deriv_coeffs(f.grid, &c, 1)) }
}

pub(crate) fn divergence_coeffs(u: &VectorField) -> Vec<Complex64> {
    let g = u.grid();
    let mut cx = deriv_coeffs(g, &coeffs(&u.x), 0);
    let cy = deriv_coeffs(g, &coeffs(&u.y), 1);
    for (a, b) in cx.iter_mut().zip(cy) {
        *a += b;
    }
    cx
}

pub(crate) fn curl_coeffs(u: &VectorField) -> Vec<Complex64> {
    let g = u.grid();
    let mut c = deriv_coeffs(g, &coeffs(&u.y), 0);
    let d = deriv_coeffs(g, &coeffs(&u.x), 1);
    for (a, b) in c.iter_mut().zip(d) {
        *a -= b;
    }
    c
}

/// Leray projection acting on coefficient arrays. `k = 0` passes through.
pub(crate) fn leray_coeffs(grid: GridSpec, cx: &mut [Complex64], cy: &mut [Complex64]) {
    let n = grid.n();
    for iy in 0..n {
        let ky = grid.derivative_wavenumber(iy);
        for ix in 0..n {
            let kx = grid.derivative_wavenumber(ix);
            let k2 = kx * kx + ky * ky;
            if k2 == 0.0 {
                continue;
            }
            let idx = iy * n + ix;
            let p = (cx[idx] * kx + cy[idx] * ky) / k2;
            cx[idx] -= p * kx;
            cy[idx] -= p * ky;
        }
    }
}

/// `Delta^{-1}` on coefficients, with the `k = 0` coefficient set to zero.
pub(crate) fn inv_laplacian_coeffs(grid: GridSpec, c: &mut [Complex64]) {
    scale_coeffs(grid, c, |kx, ky| {
        let k2 = kx * kx + ky * ky;
        if k2 == 0.0 {
            0.0
        } else {
            -1.0 / k2
        }
    });
}

pub(crate) fn leray_raw(u: &VectorField) -> VectorField {
    let g = u.grid();
    let mut cx = coeffs(&u.x);
    let mut cy = coeffs(&u.y);
    leray_coeffs(g, &mut cx, &mut cy);
    VectorField { x: real(g, &cx), y: real(g, &cy) }
}

/// Dealiased `u . grad f`.
pub(crate) fn advect_raw(u: &VectorField, f: &ScalarField) -> ScalarField {
    let g = gradient_raw(f);
    let n = f.values.len();
    let values = (0..n).map(|i| u.x.values[i] * g.x.values[i] + u.y.values[i] * g.y.values[i]).collect();
    dealias_raw(&ScalarField { grid: f.grid, values })
}

fn check_vector(u: &VectorField) -> Result<()> {
    u.x.grid.check_same(&u.y.grid)?;
    u.check_finite()
}

pub fn to_spectral(f: &ScalarField) -> Result<SpectralScalar> {
    f.check_finite()?;
    Ok(SpectralScalar { grid: f.grid, coeffs: coeffs(f) })
}

pub fn from_spectral(s: &SpectralScalar) -> ScalarField {
    real(s.grid, &s.coeffs)
}

pub fn gradient(f: &ScalarField) -> Result<VectorField> {
    f.check_finite()?;
    Ok(gradient_raw(f))
}

pub fn divergence(u: &VectorField) -> Result<ScalarField> {
    check_vector(u)?;
    Ok(real(u.grid(), &divergence_coeffs(u)))
}

/// Scalar vorticity `d1 u2 - d2 u1`.
pub fn curl2(u: &VectorField) -> Result<ScalarField> {
    check_vector(u)?;
    Ok(real(u.grid(), &curl_coeffs(u)))
}

/// Rotation by a quarter turn, `(u1, u2) -> (-u2, u1)`.
pub fn perp(u: &VectorField) -> VectorField {
    VectorField { x: u.y.scale(-1.0), y: u.x.clone() }
}

/// `grad^perp psi = (-d2 psi, d1 psi)`.
pub fn perp_gradient(psi: &ScalarField) -> Result<VectorField> {
    Ok(perp(&gradient(psi)?))
}

pub fn leray_project(u: &VectorField) -> Result<VectorField> {
    check_vector(u)?;
    Ok(leray_raw(u))
}

pub fn dealias(f: &ScalarField) -> Result<ScalarField> {
    f.check_finite()?;
    Ok(dealias_raw(f))
}

pub fn dealias_vector(u: &VectorField) -> Result<VectorField> {
    check_vector(u)?;
    Ok(VectorField { x: dealias_raw(&u.x), y: dealias_raw(&u.y) })
}

pub fn laplacian(f: &ScalarField) -> Result<ScalarField> {
    f.check_finite()?;
    let mut c = coeffs(f);
    scale_coeffs(f.grid, &mut c, |kx, ky| -(kx * kx + ky * ky));
    Ok(real(f.grid, &c))
}

/// Solve `Delta g = f` for zero-mean `f`, returning the zero-mean solution.
pub fn inverse_laplacian_zero_mean(f: &ScalarField) -> Result<ScalarField> {
    f.check_finite()?;
    let m = f.mean();
    if m.abs() > 1e-10 {
        return Err(Error::NonZeroMean(m));
    }
    let mut c = coeffs(f);
    inv_laplacian_coeffs(f.grid, &mut c);
    Ok(real(f.grid, &c))
}

/// Pointwise product followed by dealiasing.
pub fn dealiased_product(a: &ScalarField, b: &ScalarField) -> Result<ScalarField> {
    a.grid.check_same(&b.grid)?;
    a.check_finite()?;
    b.check_finite()?;
    Ok(dealias_raw(&a.mul(b)))
}

/// Dealiased transport term `u . grad f`.
pub fn advect(u: &VectorField, f: &ScalarField) -> Result<ScalarField> {
    check_vector(u)?;
    f.check_finite()?;
    u.grid().check_same(&f.grid)?;
    Ok(advect_raw(u, f))
}

/// Dealiased `(u . grad) v`, component by component.
pub fn advect_vector(u: &VectorField, v: &VectorField) -> Result<VectorField> {
    Ok(VectorField { x: advect(u, &v.x)?, y: advect(u, &v.y)? })
}

/// Apply a radial Fourier multiplier `m(|k|)`.
pub fn apply_radial_multiplier(f: &ScalarField, m: impl Fn(f64) -> f64) -> Result<ScalarField> {
    f.check_finite()?;
    let mut c = coeffs(f);
    scale_coeffs(f.grid, &mut c, |kx, ky| m(kx.hypot(ky)));
    Ok(real(f.grid, &c))
}

/// `(sum_k (1 + |k|^2)^s |c_k|^2)^{1/2}`.
pub fn sobolev_norm(f: &ScalarField, s: f64) -> Result<f64> {
    let sp = to_spectral(f)?;
    Ok(sp.modes().map(|(kx, ky, i)| {
        let k2 = (kx * kx + ky * ky) as f64;
        (1.0 + k2).powf(s) * sp.coeffs[i].norm_sqr()
    }).sum::<f64>().sqrt())
}

pub fn sobolev_norm_vector(u: &VectorField, s: f64) -> Result<f64> {
    Ok(sobolev_norm(&u.x, s)?.hypot(sobolev_norm(&u.y, s)?))
}

/// Trigonometric interpolation onto another grid. Modes at or beyond either
/// Nyquist frequency are dropped.
pub fn interpolate(f: &ScalarField, target: GridSpec) -> Result<ScalarField> {
    let src = to_spectral(f)?;
    let limit = (f.grid.n().min(target.n()) / 2) as i32;
    let mut out = SpectralScalar::zeros(target);
    let n = target.n();
    for iy in 0..n {
        let ky = target.wavenumber(iy);
        for ix in 0..n {
            let kx = target.wavenumber(ix);
            if kx.abs() < limit && ky.abs() < limit {
                out.coeffs[iy * n + ix] = src.coeff(kx, ky);
            }
        }
    }
    Ok(from_spectral(&out))
}

pub fn interpolate_vector(u: &VectorField, target: GridSpec) -> Result<VectorField> {
    Ok(VectorField { x: interpolate(&u.x, target)?, y: interpolate(&u.y, target)? })
}

/// Grid maximum of the Frobenius norm of `grad u`.
pub fn grad_linf(u: &VectorField) -> f64 {
    let gx = gradient_raw(&u.x);
    let gy = gradient_raw(&u.y);
    (0..u.x.values.len()).fold(0.0, |m, i| {
        let s = gx.x.values[i].powi(2) + gx.y.values[i].powi(2) + gy.x.values[i].powi(2) + gy.y.values[i].powi(2);
        m.max(s.sqrt())
    })
}
