#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rossby_core::spectral::{dealias, GridSpec, ScalarField, VectorField};

pub fn grid(n: usize) -> GridSpec {
    GridSpec::new(n).unwrap()
}

pub fn white_noise(g: GridSpec, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    ScalarField::from_values(g, values).unwrap()
}

pub fn dealiased_noise(g: GridSpec, seed: u64) -> ScalarField {
    dealias(&white_noise(g, seed)).unwrap()
}

pub fn dealiased_noise_vector(g: GridSpec, seed: u64) -> VectorField {
    VectorField { x: dealiased_noise(g, seed), y: dealiased_noise(g, seed ^ 0x9e37_79b9) }
}

/// Smooth field built from a few low modes with random amplitudes.
pub fn smooth_field(g: GridSpec, seed: u64, kmax: i32) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::new();
    for kx in -kmax..=kmax {
        for ky in 0..=kmax {
            if ky == 0 && kx <= 0 {
                continue;
            }
            terms.push((kx as f64, ky as f64, rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        }
    }
    ScalarField::from_fn(g, |x, y| {
        terms.iter().map(|&(kx, ky, a, b)| a * (kx * x + ky * y).cos() + b * (kx * x + ky * y).sin()).sum()
    })
}

pub fn max_abs_diff(a: &ScalarField, b: &ScalarField) -> f64 {
    a.values.iter().zip(&b.values).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Velocity from vorticity on the torus, `u = grad^perp Delta^{-1} omega`.
pub fn velocity_of(w: &ScalarField) -> VectorField {
    let psi = rossby_core::spectral::inverse_laplacian_zero_mean(w).unwrap();
    rossby_core::spectral::perp_gradient(&psi).unwrap()
}

fn euler_vorticity_rate(w: &ScalarField) -> ScalarField {
    let u = velocity_of(w);
    rossby_core::spectral::advect(&u, w).unwrap().scale(-1.0)
}

/// Homogeneous 2D Euler in vorticity form, SSP-RK3 with a fixed step.
pub fn euler_vorticity_step(w: &ScalarField, dt: f64) -> ScalarField {
    let mut w1 = w.clone();
    w1.axpy(dt, &euler_vorticity_rate(w));
    let w1 = dealias(&w1).unwrap();
    let mut s = w1.clone();
    s.axpy(dt, &euler_vorticity_rate(&w1));
    let w2 = dealias(&w.scale(0.75).add(&s.scale(0.25))).unwrap();
    let mut s = w2.clone();
    s.axpy(dt, &euler_vorticity_rate(&w2));
    dealias(&w.scale(1.0 / 3.0).add(&s.scale(2.0 / 3.0))).unwrap()
}
