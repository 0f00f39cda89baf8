use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::config::{serialize_config, LifespanSystem, Mode, RunConfig};
use super::records::{fmt_f64, primitive_diagnostics, qh_diagnostics, write_csv, write_table};
use super::snapshot::{write_snapshot, Snapshot};
use crate::asymptotics::{
    gamma_compactness, lifespan_schedule, lifespan_shape, run_eps_sweep, LifespanConfig, SweepConfig,
};
use crate::besov::{besov_norm, besov_norm_vector, decompose, LpFamily};
use crate::error::Result;
use crate::primitive::{
    integrate_primitive, make_initial_data, make_qh_initial_data, picard_construct, run_stability_twin, PrimitiveState,
};
use crate::qh::{integrate_qh, QhState};
use crate::solver::{SolverParams, TimeStep, Trajectory};
use crate::spectral::{curl2, sup_norm};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Completed,
    /// The blow-up proxy fired at this time; outputs up to it were written.
    BlowUp(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub outcome: Outcome,
    /// Paths relative to the output directory.
    pub outputs: Vec<PathBuf>,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        match self.outcome {
            Outcome::Completed => 0,
            Outcome::BlowUp(_) => 4,
        }
    }
}

struct Output {
    root: PathBuf,
    files: Vec<PathBuf>,
    notes: Vec<(String, String)>,
    blowup: Option<f64>,
}

impl Output {
    fn path(&mut self, rel: impl AsRef<Path>) -> Result<PathBuf> {
        let rel = rel.as_ref().to_path_buf();
        let full = self.root.join(&rel);
        if let Some(dir) = full.parent() {
            fs::create_dir_all(dir)?;
        }
        self.files.push(rel);
        Ok(full)
    }

    fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_string(), value.to_string()));
    }

    fn blowup(&mut self, t: Option<f64>) {
        if let Some(t) = t {
            self.blowup = Some(self.blowup.map_or(t, |b: f64| b.min(t)));
        }
    }
}

pub fn config_hash(config: &RunConfig) -> String {
    hex::encode(Sha256::digest(serialize_config(config).as_bytes()))
}

/// Runs `config.mode`, writing everything below `config.out_dir` together with a MANIFEST.
pub fn run(config: &RunConfig) -> Result<RunSummary> {
    fs::create_dir_all(&config.out_dir)?;
    let mut out = Output { root: config.out_dir.clone(), files: Vec::new(), notes: Vec::new(), blowup: None };
    let cfg_path = out.path("config.txt")?;
    fs::write(cfg_path, serialize_config(config))?;
    match config.mode {
        Mode::RunPrimitive => run_primitive(config, &mut out, Path::new(""))?,
        Mode::RunQh => run_qh(config, &mut out)?,
        Mode::SweepEps => sweep_eps(config, &mut out)?,
        Mode::SweepDelta => sweep_delta(config, &mut out)?,
        Mode::Picard => picard(config, &mut out)?,
        Mode::Besov => besov(config, &mut out)?,
        Mode::StabilityTwin => stability_twin(config, &mut out)?,
    }
    write_manifest(config, &out)?;
    let outcome = out.blowup.map_or(Outcome::Completed, Outcome::BlowUp);
    Ok(RunSummary { outcome, outputs: out.files })
}

fn write_manifest(config: &RunConfig, out: &Output) -> Result<()> {
    let mut m = String::new();
    let _ = writeln!(m, "config_sha256 = {}", config_hash(config));
    let _ = writeln!(m, "seed = {}", config.data.seed);
    let _ = writeln!(m, "mode = {}", config.mode.as_str());
    let _ = writeln!(m, "rossby_core_version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(m, "snapshot_format = RSBL 1");
    let files: Vec<String> = out.files.iter().map(|p| p.display().to_string()).collect();
    let _ = writeln!(m, "outputs = {}", files.join(", "));
    for (k, v) in &out.notes {
        let _ = writeln!(m, "{k} = {v}");
    }
    if let Some(t) = out.blowup {
        let _ = writeln!(m, "event = blowup at t = {}", fmt_f64(t));
    }
    fs::write(out.root.join("MANIFEST"), m)?;
    Ok(())
}

fn write_primitive(config: &RunConfig, out: &mut Output, dir: &Path, tr: &Trajectory<PrimitiveState>) -> Result<()> {
    let recs = tr.frames.iter().map(|f| primitive_diagnostics(f, config.timing)).collect::<Result<Vec<_>>>()?;
    write_csv(&recs, &out.path(dir.join("diagnostics.csv"))?)?;
    write_snapshot(&Snapshot::Primitive(tr.last().clone()), &out.path(dir.join("final.bin"))?)?;
    out.blowup(tr.blowup);
    Ok(())
}

fn write_qh(config: &RunConfig, out: &mut Output, dir: &Path, tr: &Trajectory<QhState>) -> Result<()> {
    let recs = tr.frames.iter().map(|f| qh_diagnostics(f, config.timing)).collect::<Result<Vec<_>>>()?;
    write_csv(&recs, &out.path(dir.join("diagnostics.csv"))?)?;
    write_snapshot(&Snapshot::Qh(tr.last().clone()), &out.path(dir.join("final.bin"))?)?;
    out.blowup(tr.blowup);
    Ok(())
}

fn run_primitive(config: &RunConfig, out: &mut Output, dir: &Path) -> Result<()> {
    let d = make_initial_data(config.grid, &config.data, config.epsilon)?;
    let tr = integrate_primitive(&d, &config.solver, &config.output_times())?;
    out.note("steps", tr.steps);
    write_primitive(config, out, dir, &tr)
}

fn run_qh(config: &RunConfig, out: &mut Output) -> Result<()> {
    let d = make_qh_initial_data(config.grid, &config.data)?;
    let tr = integrate_qh(&d, &config.solver, &config.output_times())?;
    out.note("steps", tr.steps);
    write_qh(config, out, Path::new(""), &tr)
}

fn sweep_eps(config: &RunConfig, out: &mut Output) -> Result<()> {
    let cfg = SweepConfig {
        eps_list: config.eps_list.clone(),
        delta: config.data.delta,
        horizon: config.horizon,
        seed: config.data.seed,
        resolution: config.grid,
        output_times: config.output_times(),
        data: config.data.clone(),
        params: config.solver.clone(),
    };
    let res = run_eps_sweep(&cfg)?;
    write_qh(config, out, Path::new("qh"), &res.qh)?;
    let mut rows = Vec::new();
    for m in &res.members {
        write_primitive(config, out, Path::new(&format!("eps_{:?}", m.epsilon)), &m.trajectory)?;
        for ((s, e), dev) in m.trajectory.states().zip(&m.errors).zip(&m.rho_dev_over_eps) {
            rows.push(vec![fmt_f64(m.epsilon), fmt_f64(s.t), fmt_f64(*e), fmt_f64(*dev)]);
        }
        if let Some(t) = m.blown_up {
            out.note(&format!("blowup_eps_{:?}", m.epsilon), fmt_f64(t));
        }
    }
    write_table(&out.path("errors.csv")?, &["epsilon", "t", "error", "rho_dev_over_eps"], &rows)?;
    out.note("strictly_decreasing", res.strictly_decreasing());
    out.note("empirical_order", res.empirical_order().map_or("none".into(), fmt_f64));
    if res.members.iter().all(|m| m.blown_up.is_none()) {
        let rep = gamma_compactness(&res.gamma_traces()?, res.qh.last())?;
        let rows: Vec<Vec<String>> = res
            .members
            .iter()
            .enumerate()
            .map(|(i, m)| {
                vec![
                    fmt_f64(m.epsilon),
                    fmt_f64(rep.lip_gamma[i]),
                    fmt_f64(rep.lip_gradient_part[i]),
                    fmt_f64(rep.k_values[i]),
                    fmt_f64(rep.final_distance[i]),
                ]
            })
            .collect();
        write_table(
            &out.path("gamma.csv")?,
            &["epsilon", "lip_gamma", "lip_gradient_part", "k_value", "final_distance"],
            &rows,
        )?;
        out.note("lip_band_ratio", fmt_f64(rep.lip_band_ratio));
        out.note("k", fmt_f64(rep.k));
    }
    Ok(())
}

fn sweep_delta(config: &RunConfig, out: &mut Output) -> Result<()> {
    let cfg = LifespanConfig {
        grid: config.grid,
        data: config.data.clone(),
        params: config.solver.clone(),
        horizon: config.horizon,
        c: config.c,
        lambda: config.lambda,
    };
    let eps = (config.lifespan_system == LifespanSystem::Primitive).then_some(config.epsilon);
    let reports = lifespan_schedule(&cfg, &config.delta_list, eps)?;
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.delta),
                r.epsilon.map(fmt_f64).unwrap_or_default(),
                fmt_f64(r.t_measured),
                r.censored.to_string(),
                fmt_f64(r.t_lower_qh),
                fmt_f64(r.t_lower_primitive),
                fmt_f64(r.constants_used.0),
                fmt_f64(r.constants_used.1),
            ]
        })
        .collect();
    let header = ["delta", "epsilon", "t_measured", "censored", "t_lower_qh", "t_lower_primitive", "C", "lambda"];
    write_table(&out.path("lifespan.csv")?, &header, &rows)?;
    let shape = lifespan_shape(&reports);
    out.note("uncensored", shape.uncensored);
    out.note("monotone", shape.monotone);
    out.note("correlation_loglog", shape.correlation.map_or("none".into(), fmt_f64));
    Ok(())
}

fn picard(config: &RunConfig, out: &mut Output) -> Result<()> {
    let d = make_initial_data(config.grid, &config.data, config.epsilon)?;
    let res = picard_construct(&d, config.horizon, config.picard_steps, config.picard_iters, &config.solver)?;
    let rows: Vec<Vec<String>> = res
        .report
        .d
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let ratio = if i == 0 { None } else { res.report.ratios[i - 1] };
            vec![(i + 1).to_string(), fmt_f64(*d), ratio.map(fmt_f64).unwrap_or_default()]
        })
        .collect();
    write_table(&out.path("picard.csv")?, &["iteration", "d", "ratio"], &rows)?;
    let fixed = SolverParams { time_step: TimeStep::Fixed(config.horizon / config.picard_steps as f64), ..config.solver.clone() };
    let direct = integrate_primitive(&d, &fixed, &res.times[1..])?;
    let last = res.iterates.last().expect("at least one iterate");
    let gap = direct
        .states()
        .zip(last)
        .map(|(p, q)| p.a.sub(&q.a).l2_norm() + p.u.sub(&q.u).l2_norm())
        .fold(0.0, f64::max);
    out.note("direct_distance", fmt_f64(gap));
    out.note("noise_floor", fmt_f64(res.report.noise_floor));
    out.note("diverging", res.report.diverging);
    let final_state = last.last().expect("nonempty time grid").clone();
    write_snapshot(&Snapshot::Primitive(final_state), &out.path("final.bin")?)
}

fn besov(config: &RunConfig, out: &mut Output) -> Result<()> {
    let d = make_initial_data(config.grid, &config.data, config.epsilon)?;
    let w = curl2(&d.u)?;
    let lp = LpFamily::new(config.grid);
    let (da, dw) = (decompose(&d.a)?, decompose(&w)?);
    let rows: Vec<Vec<String>> = lp
        .blocks()
        .zip(da.iter().zip(&dw))
        .map(|(j, (a, w))| vec![j.to_string(), fmt_f64(sup_norm(a)), fmt_f64(sup_norm(w)), fmt_f64(w.l2_norm())])
        .collect();
    write_table(&out.path("besov.csv")?, &["j", "linf_block_a", "linf_block_omega", "l2_block_omega"], &rows)?;
    out.note("j_max", lp.j_max);
    out.note("besov_b0inf1_omega", fmt_f64(besov_norm(&w, 0.0, f64::INFINITY, 1.0)?));
    out.note("besov_b1inf1_u", fmt_f64(besov_norm_vector(&d.u, 1.0, f64::INFINITY, 1.0)?));
    out.note("besov_b1inf1_a", fmt_f64(besov_norm(&d.a, 1.0, f64::INFINITY, 1.0)?));
    write_snapshot(&Snapshot::Primitive(d), &out.path("initial.bin")?)
}

fn stability_twin(config: &RunConfig, out: &mut Output) -> Result<()> {
    let fine = config.fine_grid()?;
    let rep = run_stability_twin(config.grid, fine, &config.data, config.epsilon, &config.solver, &config.output_times())?;
    let rows: Vec<Vec<String>> = rep
        .history
        .iter()
        .zip(&rep.envelope)
        .map(|(h, e)| vec![fmt_f64(h.t), fmt_f64(h.entropy), fmt_f64(h.a_accum), fmt_f64(*e)])
        .collect();
    write_table(&out.path("stability.csv")?, &["t", "entropy", "a_accum", "envelope"], &rows)?;
    out.note("fine_n", fine.n());
    out.note("fitted_C", fmt_f64(rep.fitted_c));
    Ok(())
}
