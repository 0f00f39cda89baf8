use std::thread;

use crate::error::{Error, Result};
use crate::primitive::{integrate_primitive, make_initial_data, make_qh_initial_data, DataSpec, PrimitiveState};
use crate::qh::{integrate_qh, QhState};
use crate::solver::{SolverParams, Trajectory};
use crate::spectral::{curl2, leray_project, sup_norm, GridSpec, ScalarField, VectorField};

#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Strictly decreasing Rossby numbers.
    pub eps_list: Vec<f64>,
    pub delta: f64,
    pub horizon: f64,
    pub seed: u64,
    pub resolution: GridSpec,
    /// Output times in `(0, horizon]`; the horizon is appended when missing.
    pub output_times: Vec<f64>,
    /// Remaining data parameters; `delta` and `seed` above take precedence.
    pub data: DataSpec,
    pub params: SolverParams,
}

impl SweepConfig {
    fn validate(&self) -> Result<()> {
        if self.eps_list.is_empty() {
            return Err(Error::InvalidArgument("eps_list is empty".into()));
        }
        if !self.eps_list.windows(2).all(|w| w[1] < w[0]) {
            return Err(Error::InvalidArgument(format!("eps_list must be strictly decreasing, got {:?}", self.eps_list)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidArgument(format!("horizon must be positive, got {}", self.horizon)));
        }
        if self.output_times.iter().any(|&t| t > self.horizon) {
            return Err(Error::InvalidArgument("output times exceed the horizon".into()));
        }
        Ok(())
    }

    fn times(&self) -> Vec<f64> {
        let mut t = self.output_times.clone();
        if t.last().is_none_or(|&l| l < self.horizon) {
            t.push(self.horizon);
        }
        t
    }

    fn spec(&self) -> DataSpec {
        DataSpec { delta: self.delta, seed: self.seed, ..self.data.clone() }
    }
}

#[derive(Debug, Clone)]
pub struct SweepMember {
    pub epsilon: f64,
    pub trajectory: Trajectory<PrimitiveState>,
    /// `||u_eps - u_qh|| + ||R_eps - R||` in `L^2` at each stored frame.
    pub errors: Vec<f64>,
    /// `||rho_eps - 1||_inf / eps` at each stored frame.
    pub rho_dev_over_eps: Vec<f64>,
    pub blown_up: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    /// Frame times, starting at 0.
    pub times: Vec<f64>,
    pub members: Vec<SweepMember>,
    pub qh: Trajectory<QhState>,
    /// Refined sup of the initial fluctuation of each member.
    pub r0_sup: Vec<f64>,
}

impl SweepResult {
    /// Errors at the horizon, `None` for members that did not reach it.
    pub fn final_errors(&self) -> Vec<Option<f64>> {
        let n = self.times.len();
        self.members.iter().map(|m| if m.errors.len() == n { m.errors.last().copied() } else { None }).collect()
    }

    pub fn strictly_decreasing(&self) -> bool {
        let e = self.final_errors();
        e.iter().all(|x| x.is_some()) && e.windows(2).all(|w| w[1].unwrap() < w[0].unwrap())
    }

    /// Least-squares slope of `log err(eps, T)` against `log eps` over members with positive error.
    pub fn empirical_order(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .members
            .iter()
            .zip(self.final_errors())
            .filter_map(|(m, e)| e.filter(|&e| e > 0.0).map(|e| (m.epsilon.ln(), e.ln())))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        Some(sxy / sxx)
    }

    pub fn gamma_traces(&self) -> Result<Vec<GammaTrace>> {
        self.members.iter().map(|m| GammaTrace::from_states(m.epsilon, m.trajectory.states())).collect()
    }
}

fn member_errors(states: &[&PrimitiveState], qh: &[&QhState]) -> Result<Vec<f64>> {
    states
        .iter()
        .zip(qh)
        .map(|(s, q)| {
            if (s.t - q.t).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!("frame times differ: {} vs {}", s.t, q.t)));
            }
            Ok(s.u.sub(&q.u).l2_norm() + s.fluctuation().sub(&q.r).l2_norm())
        })
        .collect()
}

/// Runs every member and the limit system from the same profiles, one thread each.
pub fn run_eps_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let times = cfg.times();
    let spec = cfg.spec();
    let g = cfg.resolution;
    let (qh, runs) = thread::scope(|scope| {
        let qh = scope.spawn(|| integrate_qh(&make_qh_initial_data(g, &spec)?, &cfg.params, &times));
        let runs: Vec<_> = cfg
            .eps_list
            .iter()
            .map(|&eps| {
                let (spec, times) = (&spec, &times);
                scope.spawn(move || -> Result<(PrimitiveState, Trajectory<PrimitiveState>)> {
                    let d = make_initial_data(g, spec, eps)?;
                    let tr = integrate_primitive(&d, &cfg.params, times)?;
                    Ok((d, tr))
                })
            })
            .collect();
        let runs: Vec<_> = runs.into_iter().map(|h| h.join().expect("sweep member panicked")).collect();
        (qh.join().expect("limit run panicked"), runs)
    });
    let qh = qh?;
    if qh.blowup.is_some() {
        return Err(Error::Numerical(format!("limit system blew up at t = {:?}", qh.blowup)));
    }
    let qh_states: Vec<&QhState> = qh.states().collect();
    let mut members = Vec::new();
    let mut r0_sup = Vec::new();
    for (&eps, run) in cfg.eps_list.iter().zip(runs) {
        let (d, tr) = run?;
        let states: Vec<&PrimitiveState> = tr.states().collect();
        let n = states.len().min(qh_states.len());
        let errors = member_errors(&states[..n], &qh_states[..n])?;
        let rho_dev_over_eps = states.iter().map(|s| sup_norm(&s.density().map(|r| r - 1.0)) / eps).collect();
        r0_sup.push(sup_norm(&d.fluctuation()));
        members.push(SweepMember { epsilon: eps, blown_up: tr.blowup, errors, rho_dev_over_eps, trajectory: tr });
    }
    Ok(SweepResult { times: qh_states.iter().map(|s| s.t).collect(), members, qh, r0_sup })
}

/// `gamma = curl(rho u)` and `omega = curl u` along one trajectory.
#[derive(Debug, Clone)]
pub struct GammaTrace {
    pub epsilon: f64,
    pub times: Vec<f64>,
    pub gamma: Vec<ScalarField>,
    pub omega: Vec<ScalarField>,
    /// `sup ||gamma(t + tau) - gamma(t)||_{L^2} / tau` over consecutive frames.
    pub lip_gamma: f64,
    /// The same quantity for the gradient part of `rho u`.
    pub lip_gradient_part: f64,
}

fn lipschitz(times: &[f64], dist: impl Fn(usize) -> f64) -> f64 {
    (1..times.len()).map(|i| dist(i) / (times[i] - times[i - 1])).fold(0.0, f64::max)
}

impl GammaTrace {
    pub fn from_states<'a>(epsilon: f64, states: impl Iterator<Item = &'a PrimitiveState>) -> Result<Self> {
        let mut times = Vec::new();
        let mut gamma = Vec::new();
        let mut omega = Vec::new();
        let mut grad_part: Vec<VectorField> = Vec::new();
        for s in states {
            let v = s.momentum();
            let m = v.mean();
            let v0 = VectorField { x: v.x.map(|x| x - m[0]), y: v.y.map(|y| y - m[1]) };
            grad_part.push(v0.sub(&leray_project(&v0)?));
            times.push(s.t);
            gamma.push(curl2(&v)?);
            omega.push(curl2(&s.u)?);
        }
        let lip_gamma = lipschitz(&times, |i| gamma[i].sub(&gamma[i - 1]).l2_norm());
        let lip_gradient_part = lipschitz(&times, |i| grad_part[i].sub(&grad_part[i - 1]).l2_norm());
        Ok(GammaTrace { epsilon, times, gamma, omega, lip_gamma, lip_gradient_part })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaReport {
    pub lip_gamma: Vec<f64>,
    /// Largest over smallest `lip_gamma`.
    pub lip_band_ratio: f64,
    pub lip_gradient_part: Vec<f64>,
    /// `max_t ||gamma - omega||_{L^2} / eps` for each member.
    pub k_values: Vec<f64>,
    /// Sweep-wide constant: the largest entry of `k_values`.
    pub k: f64,
    pub k_band_ratio: f64,
    /// `||gamma_eps(T) - omega_qh(T)||_{L^2}`.
    pub final_distance: Vec<f64>,
    pub final_decreasing: bool,
}

fn band(v: &[f64]) -> f64 {
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    if hi == lo {
        1.0
    } else {
        hi / lo
    }
}

pub fn gamma_compactness(traces: &[GammaTrace], qh_final: &QhState) -> Result<GammaReport> {
    let first = traces.first().ok_or_else(|| Error::InvalidArgument("no traces".into()))?;
    for t in traces {
        let same = t.times.len() == first.times.len() && t.times.iter().zip(&first.times).all(|(a, b)| (a - b).abs() <= 1e-12);
        if !same {
            return Err(Error::InvalidArgument(format!("trace for eps = {} has a different time grid", t.epsilon)));
        }
    }
    if (first.times.last().copied().unwrap_or(f64::NAN) - qh_final.t).abs() > 1e-12 {
        return Err(Error::InvalidArgument("limit state is not at the final trace time".into()));
    }
    let w_qh = curl2(&qh_final.u)?;
    let lip_gamma: Vec<f64> = traces.iter().map(|t| t.lip_gamma).collect();
    let k_values: Vec<f64> = traces
        .iter()
        .map(|t| t.gamma.iter().zip(&t.omega).map(|(g, w)| g.sub(w).l2_norm()).fold(0.0, f64::max) / t.epsilon)
        .collect();
    let final_distance: Vec<f64> = traces.iter().map(|t| t.gamma.last().unwrap().sub(&w_qh).l2_norm()).collect();
    Ok(GammaReport {
        lip_band_ratio: band(&lip_gamma),
        lip_gamma,
        lip_gradient_part: traces.iter().map(|t| t.lip_gradient_part).collect(),
        k: k_values.iter().copied().fold(0.0, f64::max),
        k_band_ratio: band(&k_values),
        k_values,
        final_decreasing: final_distance.windows(2).all(|w| w[1] < w[0]),
        final_distance,
    })
}
