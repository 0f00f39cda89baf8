mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rossby_core::spectral::*;
use rossby_core::Error;
use std::f64::consts::PI;

fn direct_dft(f: &ScalarField) -> Vec<Complex64> {
    let n = f.grid.n();
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for ky in 0..n {
        for kx in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for iy in 0..n {
                for ix in 0..n {
                    let th = -2.0 * PI * ((kx * ix + ky * iy) as f64) / n as f64;
                    acc += f.get(ix, iy) * Complex64::from_polar(1.0, th);
                }
            }
            out[ky * n + kx] = acc / (n * n) as f64;
        }
    }
    out
}

#[test]
fn transform_matches_direct_sum() {
    for n in [8usize, 16, 32] {
        let g = grid(n);
        let f = white_noise(g, n as u64);
        let s = to_spectral(&f).unwrap();
        let d = direct_dft(&f);
        let err = s.coeffs.iter().zip(&d).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        assert!(err < 1e-14, "n={n} err={err}");
    }
}

#[test]
fn cosine_has_two_half_coefficients() {
    let g = grid(64);
    let f = ScalarField::from_fn(g, |x, _| (3.0 * x).cos());
    let s = to_spectral(&f).unwrap();
    assert!((s.coeff(3, 0) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    assert!((s.coeff(-3, 0) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    let rest: f64 = s.modes().filter(|&(kx, ky, _)| !(ky == 0 && kx.abs() == 3)).map(|(_, _, i)| s.coeffs[i].norm()).sum();
    assert!(rest < 1e-13);
}

#[test]
fn constant_field_is_mean_mode_only() {
    let g = grid(16);
    let s = to_spectral(&ScalarField::constant(g, 2.5)).unwrap();
    assert!((s.coeff(0, 0).re - 2.5).abs() < 1e-15);
    assert!(s.coeffs.iter().skip(1).all(|c| c.norm() < 1e-15));
}

#[test]
fn non_finite_input_names_index() {
    let g = grid(8);
    let mut f = ScalarField::zeros(g);
    f.values[13] = f64::NAN;
    match to_spectral(&f) {
        Err(Error::NonFinite { index, .. }) => assert_eq!(index, 13),
        other => panic!("unexpected {other:?}"),
    }
    assert!(gradient(&f).is_err());
}

#[test]
fn invalid_grids_rejected() {
    assert!(GridSpec::new(7).is_err());
    assert!(GridSpec::new(4).is_err());
    assert!(matches!(GridSpec::new(100), Err(Error::InvalidGrid(m)) if m.contains("power of two")));
    assert!(GridSpec::with_dealias(8, 0.4).is_err());
    assert!(GridSpec::with_dealias(16, 0.0).is_err());
    assert!(GridSpec::with_dealias(16, 1.5).is_err());
}

#[test]
fn analytic_derivatives() {
    let g = grid(32);
    let f = ScalarField::from_fn(g, |x, y| (2.0 * x).sin() * (3.0 * y).cos());
    let gr = gradient(&f).unwrap();
    let ex = ScalarField::from_fn(g, |x, y| 2.0 * (2.0 * x).cos() * (3.0 * y).cos());
    let ey = ScalarField::from_fn(g, |x, y| -3.0 * (2.0 * x).sin() * (3.0 * y).sin());
    assert!(max_abs_diff(&gr.x, &ex) < 1e-12);
    assert!(max_abs_diff(&gr.y, &ey) < 1e-12);
    let lap = laplacian(&f).unwrap();
    assert!(max_abs_diff(&lap, &f.scale(-13.0)) < 1e-12);
}

#[test]
fn gradient_of_cosine() {
    let g = grid(16);
    let gr = gradient(&ScalarField::from_fn(g, |x, _| (2.0 * x).cos())).unwrap();
    assert!(max_abs_diff(&gr.x, &ScalarField::from_fn(g, |x, _| -2.0 * (2.0 * x).sin())) < 1e-13);
    assert!(gr.y.linf_norm() < 1e-13);
}

#[test]
fn dealias_threshold_arithmetic() {
    let g = grid(64);
    let f = ScalarField::from_fn(g, |x, _| (31.0 * x).cos());
    let r = dealias(&f).unwrap().linf_norm();
    assert!(r < 1e-12, "{r}");
    let h = ScalarField::from_fn(g, |x, _| (21.0 * x).cos());
    assert!(max_abs_diff(&dealias(&h).unwrap(), &h) < 1e-13);
    let mean_shift = dealias(&white_noise(g, 2)).unwrap().mean() - white_noise(g, 2).mean();
    assert!(mean_shift.abs() < 1e-15);
}

#[test]
fn inverse_laplacian_examples() {
    let g = grid(16);
    let r = inverse_laplacian_zero_mean(&ScalarField::from_fn(g, |x, _| -x.cos())).unwrap();
    assert!(max_abs_diff(&r, &ScalarField::from_fn(g, |x, _| x.cos())) < 1e-15);
    assert!(inverse_laplacian_zero_mean(&ScalarField::zeros(g)).unwrap().linf_norm() == 0.0);
    assert!(inverse_laplacian_zero_mean(&ScalarField::constant(g, 1.0)).is_err());
}

#[test]
fn curl_of_rotating_field() {
    let g = grid(16);
    let u = VectorField::from_fn(g, |x, y| (-(y.sin()), x.sin()));
    let w = curl2(&u).unwrap();
    let e = ScalarField::from_fn(g, |x, y| x.cos() + y.cos());
    assert!(max_abs_diff(&w, &e) < 1e-13);
}

#[test]
fn leray_removes_gradient_and_keeps_mean() {
    let g = grid(32);
    let phi = smooth_field(g, 3, 5);
    let psi = smooth_field(g, 4, 5);
    let grad = gradient(&phi).unwrap();
    let rot = perp_gradient(&psi).unwrap();
    let mean = VectorField::from_fn(g, |_, _| (0.3, -0.2));
    let u = grad.add(&rot).add(&mean);
    let p = leray_project(&u).unwrap();
    let expect = rot.add(&mean);
    assert!(max_abs_diff(&p.x, &expect.x) < 1e-12);
    assert!(max_abs_diff(&p.y, &expect.y) < 1e-12);
    assert!(leray_project(&grad).unwrap().linf_norm() < 1e-12);
    let pm = leray_project(&mean).unwrap();
    assert!((pm.x.mean() - 0.3).abs() < 1e-14 && (pm.y.mean() + 0.2).abs() < 1e-14);
}

#[test]
fn dealias_removes_high_modes() {
    let g = grid(32);
    let f = ScalarField::from_fn(g, |x, y| (3.0 * x).cos() + (12.0 * y).sin() + (5.0 * x + 11.0 * y).cos());
    let d = dealias(&f).unwrap();
    let e = ScalarField::from_fn(g, |x, _| (3.0 * x).cos());
    assert!(max_abs_diff(&d, &e) < 1e-13);
}

#[test]
fn inverse_laplacian_inverts() {
    let g = grid(32);
    let f = ScalarField::from_fn(g, |x, y| (x + 2.0 * y).sin() + (4.0 * x).cos());
    let u = inverse_laplacian_zero_mean(&f).unwrap();
    let e = ScalarField::from_fn(g, |x, y| -(x + 2.0 * y).sin() / 5.0 - (4.0 * x).cos() / 16.0);
    assert!(max_abs_diff(&u, &e) < 1e-14);
    assert!(u.mean().abs() < 1e-15);
    let shifted = f.map(|v| v + 1e-6);
    assert!(matches!(inverse_laplacian_zero_mean(&shifted), Err(Error::NonZeroMean(_))));
}

#[test]
fn refined_sup_beats_grid_max() {
    let g = grid(16);
    let x0 = 0.123;
    let f = ScalarField::from_fn(g, |x, y| (x - x0).cos() * (2.0 * (y - 0.31)).cos());
    let s = sup_norm(&f);
    assert!(f.linf_norm() < 1.0 - 1e-4);
    assert!((s - 1.0).abs() < 1e-12, "sup {s}");
    let (lo, hi) = trig_extrema(&f.map(|v| 0.5 * v + 0.1));
    assert!((lo + 0.4).abs() < 1e-12 && (hi - 0.6).abs() < 1e-12);
}

#[test]
fn interpolation_is_exact_for_band_limited_fields() {
    let c = grid(16);
    let f = grid(64);
    let a = smooth_field(c, 9, 4);
    let b = smooth_field(f, 9, 4);
    let up = interpolate(&a, f).unwrap();
    assert!(max_abs_diff(&up, &b) < 1e-12);
    let down = interpolate(&b, c).unwrap();
    assert!(max_abs_diff(&down, &a) < 1e-12);
}

#[test]
fn grid_mismatch_rejected() {
    let u = VectorField { x: ScalarField::zeros(grid(8)), y: ScalarField::zeros(grid(16)) };
    assert!(matches!(divergence(&u), Err(Error::GridMismatch(8, 16))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn round_trip_and_parseval(seed in any::<u64>(), e in 3usize..7) {
        let g = grid(1 << e);
        let f = white_noise(g, seed);
        let s = to_spectral(&f).unwrap();
        let back = from_spectral(&s);
        prop_assert!(max_abs_diff(&f, &back) < 1e-13);
        prop_assert!((f.l2_norm() - s.l2_norm()).abs() < 1e-13 * (1.0 + f.l2_norm()));
    }

    #[test]
    fn leray_idempotent_and_divergence_free(seed in any::<u64>()) {
        let g = grid(32);
        let u = VectorField { x: white_noise(g, seed), y: white_noise(g, seed.wrapping_add(1)) };
        let p = leray_project(&u).unwrap();
        let pp = leray_project(&p).unwrap();
        prop_assert!(max_abs_diff(&p.x, &pp.x) < 1e-13 && max_abs_diff(&p.y, &pp.y) < 1e-13);
        prop_assert!(divergence(&p).unwrap().l2_norm() < 1e-12);
        let w0 = curl2(&u).unwrap();
        let w1 = curl2(&p).unwrap();
        prop_assert!(max_abs_diff(&w0, &w1) < 1e-11);
    }

    #[test]
    fn vector_identities(seed in any::<u64>()) {
        let g = grid(32);
        let f = white_noise(g, seed);
        prop_assert!(curl2(&gradient(&f).unwrap()).unwrap().linf_norm() < 1e-11);
        prop_assert!(divergence(&perp_gradient(&f).unwrap()).unwrap().linf_norm() < 1e-11);
    }

    #[test]
    fn perp_identities(seed in any::<u64>()) {
        let g = grid(32);
        let u = VectorField { x: white_noise(g, seed), y: white_noise(g, !seed) };
        let p = perp(&u);
        prop_assert!((p.l2_norm() - u.l2_norm()).abs() < 1e-14);
        let pp = perp(&p);
        prop_assert!(pp.x.values.iter().zip(&u.x.values).all(|(a, b)| *a == -*b));
        prop_assert!(pp.y.values.iter().zip(&u.y.values).all(|(a, b)| *a == -*b));
        let d = curl2(&p).unwrap().sub(&divergence(&u).unwrap());
        prop_assert!(d.linf_norm() < 1e-12 * (1.0 + divergence(&u).unwrap().linf_norm()));
        let w = perp_gradient(&white_noise(g, seed ^ 5)).unwrap();
        let w0 = w.sub(&VectorField::from_fn(g, |_, _| (w.x.mean(), w.y.mean())));
        prop_assert!(leray_project(&perp(&w0)).unwrap().l2_norm() < 1e-10 * w0.l2_norm());
    }

    #[test]
    fn dealias_idempotent(seed in any::<u64>()) {
        let g = grid(64);
        let d = dealias(&white_noise(g, seed)).unwrap();
        prop_assert!(max_abs_diff(&d, &dealias(&d).unwrap()) < 1e-14);
    }

    #[test]
    fn inverse_laplacian_right_inverse(seed in any::<u64>()) {
        let g = grid(32);
        let f = white_noise(g, seed);
        let f = f.map(|v| v).sub(&ScalarField::constant(g, f.mean()));
        let u = inverse_laplacian_zero_mean(&f).unwrap();
        let lap = laplacian(&u).unwrap();
        prop_assert!(max_abs_diff(&lap, &f) < 1e-11);
    }

    #[test]
    fn refined_sup_bounds_grid_max(seed in any::<u64>()) {
        let g = grid(16);
        let f = smooth_field(g, seed, 3);
        let s = sup_norm(&f);
        prop_assert!(s >= f.linf_norm() - 1e-15);
        let fine = interpolate(&f, grid(1024)).unwrap();
        prop_assert!(s >= fine.linf_norm() - 1e-12);
        prop_assert!(s <= fine.linf_norm() * (1.0 + 2e-3));
    }
}
