use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::FftPlanner;

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

fn fft2_inplace(data: &mut [Complex64], n: usize, inverse: bool) {
    let fft = {
        let mut p = planner().lock().unwrap_or_else(|e| e.into_inner());
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    };
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    fft.process_with_scratch(data, &mut scratch);
    transpose(data, n);
    fft.process_with_scratch(data, &mut scratch);
    transpose(data, n);
}

/// Normalized forward transform: `f(x) = sum_k c_k exp(i k.x)`.
pub(crate) fn forward(values: &[f64], n: usize) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2_inplace(&mut data, n, false);
    let scale = 1.0 / (n * n) as f64;
    for c in data.iter_mut() {
        *c *= scale;
    }
    data
}

/// Inverse of [`forward`], keeping the real part.
pub(crate) fn inverse(coeffs: &[Complex64], n: usize) -> Vec<f64> {
    let mut data = coeffs.to_vec();
    fft2_inplace(&mut data, n, true);
    data.into_iter().map(|c| c.re).collect()
}
