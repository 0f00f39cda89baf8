//! Relative-entropy distance between two primitive solutions and its Gronwall envelope.

use super::{integrate_primitive, make_initial_data, DataSpec, PrimitiveState};
use crate::error::{Error, Result};
use crate::solver::SolverParams;
use crate::spectral::{gradient_raw, interpolate, interpolate_vector, GridSpec, ScalarField, VectorField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityRecord {
    pub t: f64,
    /// `||sqrt(rho2) (u1 - u2)||^2 + ||R1 - R2||^2`.
    pub entropy: f64,
    /// `A(t)`, the time integral of [`stability_a_rate`].
    pub a_accum: f64,
}

fn check_pair(s1: &PrimitiveState, s2: &PrimitiveState) -> Result<()> {
    s1.grid().check_same(&s2.grid())?;
    if s1.epsilon != s2.epsilon {
        return Err(Error::InvalidArgument(format!("epsilon mismatch: {} vs {}", s1.epsilon, s2.epsilon)));
    }
    Ok(())
}

/// Entropy distance at the time of `s1`; `a_accum` is left at zero.
pub fn stability_distance(s1: &PrimitiveState, s2: &PrimitiveState) -> Result<StabilityRecord> {
    check_pair(s1, s2)?;
    let rho2 = s2.density();
    let du = s1.u.sub(&s2.u);
    let kinetic = rho2.mul(&du.dot(&du)).mean();
    let dr = s1.fluctuation().sub(&s2.fluctuation());
    Ok(StabilityRecord { t: s1.t, entropy: kinetic + dr.l2_norm().powi(2), a_accum: 0.0 })
}

fn weighted_linf(v: &VectorField, w: &ScalarField) -> f64 {
    (0..w.values.len()).fold(0.0, |m, i| m.max(v.x.values[i].hypot(v.y.values[i]) * w.values[i]))
}

/// `||grad R1 / sqrt(rho2)|| + ||grad Pi1 / (rho1 sqrt(rho2))|| + ||grad u1||` in `L^inf`.
pub fn stability_a_rate(s1: &PrimitiveState, s2: &PrimitiveState) -> Result<f64> {
    check_pair(s1, s2)?;
    let rho1 = s1.density();
    let w2 = s2.density().map(|r| 1.0 / r.sqrt());
    let gr = gradient_raw(&s1.fluctuation());
    let gp = gradient_raw(&s1.pi);
    let w12 = w2.zip_map(&rho1, |w, r| w / r);
    Ok(weighted_linf(&gr, &w2) + weighted_linf(&gp, &w12) + crate::spectral::grad_linf(&s1.u))
}

/// Entropy history with `A(t)` accumulated by the trapezoid rule.
pub fn stability_history(first: &[PrimitiveState], second: &[PrimitiveState]) -> Result<Vec<StabilityRecord>> {
    if first.len() != second.len() || first.is_empty() {
        return Err(Error::InvalidArgument("trajectories must have the same nonzero length".into()));
    }
    let mut out = Vec::with_capacity(first.len());
    let mut acc = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for (s1, s2) in first.iter().zip(second) {
        if (s1.t - s2.t).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("time mismatch: {} vs {}", s1.t, s2.t)));
        }
        let rate = stability_a_rate(s1, s2)?;
        if let Some((t0, r0)) = prev {
            acc += 0.5 * (s1.t - t0) * (rate + r0);
        }
        prev = Some((s1.t, rate));
        let mut rec = stability_distance(s1, s2)?;
        rec.a_accum = acc;
        out.push(rec);
    }
    Ok(out)
}

/// `entropy(0) exp(C A(t))`.
pub fn gronwall_envelope(history: &[StabilityRecord], c: f64) -> Vec<f64> {
    let e0 = history.first().map_or(0.0, |r| r.entropy);
    history.iter().map(|r| e0 * (c * r.a_accum).exp()).collect()
}

/// Smallest `C >= 0` for which the envelope dominates the history.
pub fn fit_gronwall_constant(history: &[StabilityRecord]) -> f64 {
    let e0 = match history.first() {
        Some(r) if r.entropy > 0.0 => r.entropy,
        _ => return f64::INFINITY,
    };
    history
        .iter()
        .skip(1)
        .map(|r| {
            if r.entropy <= e0 {
                0.0
            } else if r.a_accum > 0.0 {
                (r.entropy / e0).ln() / r.a_accum
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct TwinReport {
    pub history: Vec<StabilityRecord>,
    pub fitted_c: f64,
    pub envelope: Vec<f64>,
}

/// Evolve the same datum at two resolutions, each mollified at its own level,
/// and compare them on the fine grid.
pub fn run_stability_twin(
    coarse: GridSpec,
    fine: GridSpec,
    spec: &DataSpec,
    eps: f64,
    params: &SolverParams,
    output_times: &[f64],
) -> Result<TwinReport> {
    let d_fine = make_initial_data(fine, spec, eps)?;
    let d_coarse = make_initial_data(coarse, spec, eps)?;
    let t_fine = integrate_primitive(&d_fine, params, output_times)?;
    let t_coarse = integrate_primitive(&d_coarse, params, output_times)?;
    if t_fine.blowup.is_some() || t_coarse.blowup.is_some() {
        return Err(Error::Numerical("blow-up proxy fired during the twin run".into()));
    }
    let lifted = t_coarse
        .states()
        .map(|s| {
            Ok(PrimitiveState {
                t: s.t,
                epsilon: s.epsilon,
                a: interpolate(&s.a, fine)?,
                u: interpolate_vector(&s.u, fine)?,
                pi: interpolate(&s.pi, fine)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let first: Vec<PrimitiveState> = t_fine.states().cloned().collect();
    let history = stability_history(&first, &lifted)?;
    let fitted_c = fit_gronwall_constant(&history);
    let envelope = gronwall_envelope(&history, fitted_c);
    Ok(TwinReport { history, fitted_c, envelope })
}
