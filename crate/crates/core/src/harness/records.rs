use std::path::Path;

use crate::besov::{besov_norm, besov_norm_vector};
use crate::error::{Error, Result};
use crate::primitive::{conserved_quantities, PrimitiveState};
use crate::qh::QhState;
use crate::solver::Frame;
use crate::spectral::{curl2, divergence, gradient, sup_norm, ScalarField, VectorField};

/// One CSV row of run diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// `int rho |u|^2`.
    pub energy: f64,
    pub linf_r: f64,
    pub l2_div_u: f64,
    pub besov_b0inf1_omega: f64,
    /// `||u||_{L^2} + ||omega||_{B^0_{inf,1}}`.
    pub e_qh: f64,
    /// `||grad a||_{B^0_{inf,1}}`.
    pub a_eps: f64,
    /// `||curl(rho u)||_{L^2}`.
    pub gamma_l2: f64,
    pub pressure_iters: usize,
    pub wall_time_ms: f64,
}

pub const DIAGNOSTICS_HEADER: [&str; 10] = [
    "t",
    "energy",
    "linf_R",
    "l2_div_u",
    "besov_b0inf1_omega",
    "E_qh",
    "A_eps",
    "gamma_l2",
    "pressure_iters",
    "wall_time_ms",
];

fn common(t: f64, u: &VectorField, a: &ScalarField, momentum: &VectorField) -> Result<DiagnosticsRecord> {
    let w = curl2(u)?;
    let b0 = besov_norm(&w, 0.0, f64::INFINITY, 1.0)?;
    Ok(DiagnosticsRecord {
        t,
        energy: 0.0,
        linf_r: 0.0,
        l2_div_u: divergence(u)?.l2_norm(),
        besov_b0inf1_omega: b0,
        e_qh: u.l2_norm() + b0,
        a_eps: besov_norm_vector(&gradient(a)?, 0.0, f64::INFINITY, 1.0)?,
        gamma_l2: curl2(momentum)?.l2_norm(),
        pressure_iters: 0,
        wall_time_ms: 0.0,
    })
}

pub fn primitive_diagnostics(frame: &Frame<PrimitiveState>, timing: bool) -> Result<DiagnosticsRecord> {
    let s = &frame.state;
    let c = conserved_quantities(s);
    Ok(DiagnosticsRecord {
        energy: c.energy,
        linf_r: c.linf_r,
        pressure_iters: frame.pressure_iters,
        wall_time_ms: if timing { frame.wall_time_ms } else { 0.0 },
        ..common(s.t, &s.u, &s.a, &s.momentum())?
    })
}

/// The limit system has unit density, so `a = -R` and `gamma = omega`.
pub fn qh_diagnostics(frame: &Frame<QhState>, timing: bool) -> Result<DiagnosticsRecord> {
    let s = &frame.state;
    Ok(DiagnosticsRecord {
        energy: s.u.l2_norm().powi(2),
        linf_r: sup_norm(&s.r),
        pressure_iters: frame.pressure_iters,
        wall_time_ms: if timing { frame.wall_time_ms } else { 0.0 },
        ..common(s.t, &s.u, &s.r.scale(-1.0), &s.u)?
    })
}

/// Seventeen significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        other => Error::Numerical(format!("csv: {other:?}")),
    }
}

pub fn write_csv(records: &[DiagnosticsRecord], path: &Path) -> Result<()> {
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.t),
                fmt_f64(r.energy),
                fmt_f64(r.linf_r),
                fmt_f64(r.l2_div_u),
                fmt_f64(r.besov_b0inf1_omega),
                fmt_f64(r.e_qh),
                fmt_f64(r.a_eps),
                fmt_f64(r.gamma_l2),
                r.pressure_iters.to_string(),
                fmt_f64(r.wall_time_ms),
            ]
        })
        .collect();
    write_table(path, &DIAGNOSTICS_HEADER, &rows)
}
