//! Fourier representation of periodic fields on the `n x n` torus grid.

mod extrema;
pub(crate) mod fft;
mod ops;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use extrema::{sup_norm, trig_extrema};
pub use ops::*;

/// Side length of the periodic box.
pub const LENGTH: f64 = 2.0 * PI;

pub const DEFAULT_DEALIAS_FRACTION: f64 = 2.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n: usize,
    dealias_fraction: f64,
}

impl GridSpec {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_dealias(n, DEFAULT_DEALIAS_FRACTION)
    }

    pub fn with_dealias(n: usize, dealias_fraction: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("n must be a power of two and at least 8, got {n}")));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) || dealias_fraction * (n as f64) / 2.0 < 2.0 {
            return Err(Error::InvalidGrid(format!(
                "dealias fraction must lie in (0, 1] and keep at least |k| = 2, got {dealias_fraction}"
            )));
        }
        Ok(Self { n, dealias_fraction })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of grid points, `n^2`.
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    pub fn spacing(&self) -> f64 {
        LENGTH / self.n as f64
    }

    /// Modes with `max(|kx|, |ky|)` above this value are removed by [`dealias`].
    pub fn dealias_radius(&self) -> f64 {
        self.dealias_fraction * self.n as f64 / 2.0
    }

    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    /// Signed wavenumber stored at index `i`; the upper half holds negative frequencies.
    pub fn wavenumber(&self, i: usize) -> i32 {
        let n = self.n as i32;
        let i = i as i32;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Index holding wavenumber `k`, if it is representable.
    pub fn index_of(&self, k: i32) -> Option<usize> {
        let n = self.n as i32;
        if k >= -n / 2 && k < n / 2 {
            Some(k.rem_euclid(n) as usize)
        } else {
            None
        }
    }

    /// Wavenumber used for first derivatives. The Nyquist mode has none.
    pub fn derivative_wavenumber(&self, i: usize) -> f64 {
        if i == self.n / 2 {
            0.0
        } else {
            self.wavenumber(i) as f64
        }
    }

    pub fn is_retained(&self, kx: i32, ky: i32) -> bool {
        let r = self.dealias_radius();
        (kx.abs() as f64) <= r && (ky.abs() as f64) <= r
    }

    /// Largest Euclidean wavenumber among retained modes.
    pub fn max_retained_wavenumber(&self) -> f64 {
        let kmax = self.dealias_radius().floor().min((self.n / 2 - 1) as f64);
        kmax * std::f64::consts::SQRT_2
    }

    pub(crate) fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(self.n, other.n));
        }
        Ok(())
    }
}

/// Real field sampled at `x = (i, j) * 2pi/n`, stored row-major with `x` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        Self { grid, values: vec![c; grid.len()] }
    }

    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let mut values = Vec::with_capacity(grid.len());
        for iy in 0..n {
            let y = grid.coord(iy);
            for ix in 0..n {
                values.push(f(grid.coord(ix), y));
            }
        }
        Self { grid, values }
    }

    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.grid.n() + ix]
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(index) => Err(Error::NonFinite { index, value: self.values[index] }),
            None => Ok(()),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self { grid: self.grid, values }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn add(&self, other: &ScalarField) -> Self {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    /// Pointwise product, not dealiased.
    pub fn mul(&self, other: &ScalarField) -> Self {
        self.zip_map(other, |a, b| a * b)
    }

    pub fn axpy(&mut self, c: f64, other: &ScalarField) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// `L^2` norm for the normalized measure `dx / (2pi)^2`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() / self.values.len() as f64).sqrt()
    }

    /// Grid maximum of `|f|`.
    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.linf_norm();
        }
        let s: f64 = self.values.iter().map(|v| v.abs().powf(p)).sum();
        (s / self.values.len() as f64).powf(1.0 / p)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub x: ScalarField,
    pub y: ScalarField,
}

impl VectorField {
    pub fn new(x: ScalarField, y: ScalarField) -> Result<Self> {
        x.grid.check_same(&y.grid)?;
        Ok(Self { x, y })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { x: ScalarField::zeros(grid), y: ScalarField::zeros(grid) }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        Self {
            x: ScalarField::from_fn(grid, |x, y| f(x, y).0),
            y: ScalarField::from_fn(grid, |x, y| f(x, y).1),
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.x.grid
    }

    pub fn check_finite(&self) -> Result<()> {
        self.x.check_finite()?;
        self.y.check_finite().map_err(|e| match e {
            Error::NonFinite { index, value } => {
                Error::NonFinite { index: index + self.x.values.len(), value }
            }
            e => e,
        })
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> ScalarField {
        self.x.zip_map(&self.y, |a, b| a.hypot(b))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { x: self.x.scale(c), y: self.y.scale(c) }
    }

    pub fn add(&self, o: &VectorField) -> Self {
        Self { x: self.x.add(&o.x), y: self.y.add(&o.y) }
    }

    pub fn sub(&self, o: &VectorField) -> Self {
        Self { x: self.x.sub(&o.x), y: self.y.sub(&o.y) }
    }

    pub fn axpy(&mut self, c: f64, o: &VectorField) {
        self.x.axpy(c, &o.x);
        self.y.axpy(c, &o.y);
    }

    /// Multiply both components pointwise by a scalar field.
    pub fn mul_scalar(&self, s: &ScalarField) -> Self {
        Self { x: self.x.mul(s), y: self.y.mul(s) }
    }

    pub fn dot(&self, o: &VectorField) -> ScalarField {
        let n = self.x.values.len();
        let values = (0..n)
            .map(|i| self.x.values[i] * o.x.values[i] + self.y.values[i] * o.y.values[i])
            .collect();
        ScalarField { grid: self.grid(), values }
    }

    pub fn mean(&self) -> [f64; 2] {
        [self.x.mean(), self.y.mean()]
    }

    pub fn l2_norm(&self) -> f64 {
        self.x.l2_norm().hypot(self.y.l2_norm())
    }

    /// Grid maximum of the Euclidean magnitude.
    pub fn linf_norm(&self) -> f64 {
        self.x.values.iter().zip(&self.y.values).fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }
}

/// Normalized Fourier coefficients, `f(x) = sum_k c_k exp(i k.x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralScalar {
    pub grid: GridSpec,
    pub coeffs: Vec<Complex64>,
}

impl SpectralScalar {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, coeffs: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// Coefficient of `exp(i (kx x + ky y))`, zero when not representable.
    pub fn coeff(&self, kx: i32, ky: i32) -> Complex64 {
        match (self.grid.index_of(kx), self.grid.index_of(ky)) {
            (Some(ix), Some(iy)) => self.coeffs[iy * self.grid.n() + ix],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// `sqrt(sum |c_k|^2)`, equal to the grid `L^2` norm.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Iterate `(kx, ky, index)` over the lattice.
    pub fn modes(&self) -> impl Iterator<Item = (i32, i32, usize)> + '_ {
        let g = self.grid;
        let n = g.n();
        (0..n).flat_map(move |iy| (0..n).map(move |ix| (g.wavenumber(ix), g.wavenumber(iy), iy * n + ix)))
    }
}
