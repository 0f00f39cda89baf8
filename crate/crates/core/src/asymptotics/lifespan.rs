use crate::besov::{besov_norm, besov_norm_vector};
use crate::error::{Error, Result};
use crate::primitive::{integrate_primitive, make_initial_data, make_qh_initial_data, DataSpec};
use crate::qh::integrate_qh;
use crate::solver::SolverParams;
use crate::spectral::{gradient, GridSpec, ScalarField, VectorField};

/// `(C / u0) log(log(C u0 / r0 + 1) + 1)`.
pub fn lower_bound_qh(u0_norm: f64, r0_norm: f64, c: f64) -> f64 {
    c / u0_norm * ((c * u0_norm / r0_norm + 1.0).ln() + 1.0).ln()
}

/// `(C / E0) log(log(C E0 / max(B, eps B E0) + 1) + 1)` with `B = A0 + eps A0^(lambda + 1)`.
pub fn lower_bound_primitive(e0: f64, a0: f64, epsilon: f64, c: f64, lambda: f64) -> f64 {
    let b = a0 + epsilon * a0.powf(lambda + 1.0);
    let denom = b.max(epsilon * b * e0);
    c / e0 * ((c * e0 / denom + 1.0).ln() + 1.0).ln()
}

#[derive(Debug, Clone)]
pub struct LifespanConfig {
    pub grid: GridSpec,
    pub data: DataSpec,
    pub params: SolverParams,
    pub horizon: f64,
    pub c: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LifespanReport {
    pub delta: f64,
    /// `None` for the quasi-homogeneous system.
    pub epsilon: Option<f64>,
    /// Blow-up proxy time, or the horizon when `censored`.
    pub t_measured: f64,
    pub censored: bool,
    pub t_lower_qh: f64,
    pub t_lower_primitive: f64,
    pub constants_used: (f64, f64),
}

fn velocity_norm(u: &VectorField) -> Result<f64> {
    Ok(u.l2_norm() + besov_norm_vector(u, 1.0, f64::INFINITY, 1.0)?)
}

fn grad_besov(a: &ScalarField) -> Result<f64> {
    besov_norm_vector(&gradient(a)?, 0.0, f64::INFINITY, 1.0)
}

/// Integrates until `||grad u||_inf` passes the blow-up threshold or the horizon is reached.
pub fn lifespan_measure(cfg: &LifespanConfig, delta: f64, epsilon: Option<f64>) -> Result<LifespanReport> {
    if !(cfg.c > 0.0 && cfg.lambda >= 1.0) {
        return Err(Error::InvalidArgument(format!("need C > 0 and lambda >= 1, got {} and {}", cfg.c, cfg.lambda)));
    }
    if !(cfg.horizon > 0.0 && cfg.horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon must be positive, got {}", cfg.horizon)));
    }
    let spec = DataSpec { delta, ..cfg.data.clone() };
    let (blowup, u0, r0, a0, eps) = match epsilon {
        None => {
            let s = make_qh_initial_data(cfg.grid, &spec)?;
            let tr = integrate_qh(&s, &cfg.params, &[cfg.horizon])?;
            (tr.blowup, s.u, s.r.clone(), s.r.scale(-1.0), 0.0)
        }
        Some(eps) => {
            let s = make_initial_data(cfg.grid, &spec, eps)?;
            let tr = integrate_primitive(&s, &cfg.params, &[cfg.horizon])?;
            (tr.blowup, s.u.clone(), s.fluctuation(), s.a, eps)
        }
    };
    let e0 = velocity_norm(&u0)?;
    let r0_norm = besov_norm(&r0, 1.0, f64::INFINITY, 1.0)?;
    Ok(LifespanReport {
        delta,
        epsilon,
        t_measured: blowup.unwrap_or(cfg.horizon),
        censored: blowup.is_none(),
        t_lower_qh: lower_bound_qh(e0, r0_norm, cfg.c),
        t_lower_primitive: lower_bound_primitive(e0, grad_besov(&a0)?, eps, cfg.c, cfg.lambda),
        constants_used: (cfg.c, cfg.lambda),
    })
}

pub fn lifespan_schedule(cfg: &LifespanConfig, deltas: &[f64], epsilon: Option<f64>) -> Result<Vec<LifespanReport>> {
    deltas.iter().map(|&d| lifespan_measure(cfg, d, epsilon)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LifespanShape {
    pub uncensored: usize,
    /// Monotone along decreasing `delta`, using uncensored pairs and censored-dominates-uncensored ordering.
    pub monotone: bool,
    /// Pearson correlation of uncensored `t_measured` against `log log(1/delta)`.
    pub correlation: Option<f64>,
}

pub fn lifespan_shape(reports: &[LifespanReport]) -> LifespanShape {
    let mut sorted: Vec<&LifespanReport> = reports.iter().collect();
    sorted.sort_by(|a, b| b.delta.total_cmp(&a.delta));
    let monotone = sorted.windows(2).all(|w| {
        let (big, small) = (w[0], w[1]);
        match (big.censored, small.censored) {
            (false, false) => small.t_measured >= big.t_measured,
            (true, false) => false,
            _ => true,
        }
    });
    let pts: Vec<(f64, f64)> = sorted
        .iter()
        .filter(|r| !r.censored)
        .map(|r| ((1.0 / r.delta).ln().ln(), r.t_measured))
        .filter(|(x, _)| x.is_finite())
        .collect();
    LifespanShape { uncensored: sorted.iter().filter(|r| !r.censored).count(), monotone, correlation: pearson(&pts) }
}

fn pearson(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}
