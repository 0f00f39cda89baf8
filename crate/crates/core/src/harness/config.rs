use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::primitive::{DataKind, DataSpec, FourierMode};
use crate::solver::{SolverParams, TimeStep};
use crate::spectral::{GridSpec, DEFAULT_DEALIAS_FRACTION};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    RunPrimitive,
    RunQh,
    SweepEps,
    SweepDelta,
    Picard,
    Besov,
    StabilityTwin,
}

impl Mode {
    pub const ALL: [Mode; 7] =
        [Mode::RunPrimitive, Mode::RunQh, Mode::SweepEps, Mode::SweepDelta, Mode::Picard, Mode::Besov, Mode::StabilityTwin];

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::RunPrimitive => "run-primitive",
            Mode::RunQh => "run-qh",
            Mode::SweepEps => "sweep-eps",
            Mode::SweepDelta => "sweep-delta",
            Mode::Picard => "picard",
            Mode::Besov => "besov",
            Mode::StabilityTwin => "stability-twin",
        }
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Mode::ALL.into_iter().find(|m| m.as_str() == s).ok_or_else(|| format!("unknown mode `{s}`"))
    }
}

/// Which system a lifespan sweep integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LifespanSystem {
    Qh,
    Primitive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub grid: GridSpec,
    pub solver: SolverParams,
    pub data: DataSpec,
    pub epsilon: f64,
    /// Strictly decreasing Rossby numbers for `sweep-eps`.
    pub eps_list: Vec<f64>,
    pub delta_list: Vec<f64>,
    pub lifespan_system: LifespanSystem,
    pub horizon: f64,
    pub output_interval: f64,
    /// Explicit output times; when absent, multiples of `output_interval` up to the horizon.
    pub output_times: Option<Vec<f64>>,
    pub picard_iters: usize,
    pub picard_steps: usize,
    /// Fine grid of `stability-twin`; twice `n` when absent.
    pub twin_fine_n: Option<usize>,
    /// Record wall-clock times in the CSV output, which makes it nondeterministic.
    pub timing: bool,
    pub out_dir: PathBuf,
    pub c: f64,
    pub lambda: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: Mode::RunPrimitive,
            grid: GridSpec::new(128).expect("valid default grid"),
            solver: SolverParams::default(),
            data: DataSpec::default(),
            epsilon: 0.1,
            eps_list: vec![0.2, 0.1, 0.05, 0.025],
            delta_list: vec![0.4, 0.2, 0.1, 0.05],
            lifespan_system: LifespanSystem::Qh,
            horizon: 1.0,
            output_interval: 0.1,
            output_times: None,
            picard_iters: 8,
            picard_steps: 16,
            twin_fine_n: None,
            timing: false,
            out_dir: PathBuf::from("out"),
            c: 1.0,
            lambda: 1.0,
        }
    }
}

impl RunConfig {
    pub fn output_times(&self) -> Vec<f64> {
        let mut t = match &self.output_times {
            Some(t) => t.clone(),
            None => {
                let k = (self.horizon / self.output_interval * (1.0 + 1e-12)).floor() as usize;
                (1..=k).map(|i| i as f64 * self.output_interval).collect()
            }
        };
        t.retain(|&x| x < self.horizon * (1.0 - 1e-12));
        t.push(self.horizon);
        t
    }

    pub fn fine_grid(&self) -> Result<GridSpec> {
        GridSpec::with_dealias(self.twin_fine_n.unwrap_or(2 * self.grid.n()), self.grid.dealias_fraction())
    }
}

const KEYS: &[(&str, &str)] = &[
    ("grid", "n"),
    ("grid", "dealias_fraction"),
    ("solver", "cfl"),
    ("solver", "dt"),
    ("solver", "pressure_tol"),
    ("solver", "pressure_max_iter"),
    ("solver", "blowup_threshold"),
    ("solver", "rho_min"),
    ("solver", "rho_max"),
    ("data", "kind"),
    ("data", "delta"),
    ("data", "epsilon"),
    ("data", "eps_list"),
    ("data", "delta_list"),
    ("data", "seed"),
    ("data", "alpha"),
    ("data", "n_mollify"),
    ("data", "band"),
    ("data", "sobolev_s"),
    ("data", "psi_modes"),
    ("data", "r_modes"),
    ("run", "mode"),
    ("run", "horizon"),
    ("run", "output_interval"),
    ("run", "output_times"),
    ("run", "picard_iters"),
    ("run", "picard_steps"),
    ("run", "twin_fine_n"),
    ("run", "lifespan_system"),
    ("run", "timing"),
    ("run", "out_dir"),
    ("run", "C"),
    ("run", "lambda"),
];

fn section_of(key: &str) -> Option<&'static str> {
    KEYS.iter().find(|(_, k)| *k == key).map(|(s, _)| *s)
}

/// Raw `key = value` pairs with the line each came from; line 0 marks command-line overrides.
#[derive(Debug, Default, Clone)]
pub struct ConfigBuilder {
    values: HashMap<String, (String, usize)>,
}

impl ConfigBuilder {
    pub fn parse(text: &str) -> Result<Self> {
        let mut b = ConfigBuilder::default();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| Error::config(line, format!("malformed section header `{body}`")))?
                    .trim();
                if !KEYS.iter().any(|(s, _)| *s == name) {
                    return Err(Error::config(line, format!("unknown section [{name}]")));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) =
                body.split_once('=').ok_or_else(|| Error::config(line, format!("expected `key = value`, got `{body}`")))?;
            let key = key.trim();
            if let (Some(s), Some(want)) = (&section, section_of(key)) {
                if s != want {
                    return Err(Error::config(line, format!("key `{key}` belongs in section [{want}], not [{s}]")));
                }
            }
            if b.values.contains_key(key) {
                return Err(Error::config(line, format!("duplicate key `{key}`")));
            }
            b.insert(key, value.trim(), line)?;
        }
        Ok(b)
    }

    fn insert(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        if section_of(key).is_none() {
            return Err(Error::config(line, format!("unknown key `{key}`")));
        }
        self.values.insert(key.to_string(), (value.to_string(), line));
        Ok(())
    }

    /// Applies a `key=value` override, replacing any value from the file.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| Error::config(0, format!("override `{assignment}` is not of the form key=value")))?;
        self.insert(k.trim(), v.trim(), 0)
    }

    pub fn build(&self) -> Result<RunConfig> {
        Reader { b: self }.build()
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    ConfigBuilder::parse(text)?.build()
}

struct Reader<'a> {
    b: &'a ConfigBuilder,
}

fn parse_list<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, String> {
    s.split(',').map(|x| x.trim().parse::<T>().map_err(|_| format!("bad list entry `{}`", x.trim()))).collect()
}

fn parse_modes(s: &str) -> std::result::Result<Vec<FourierMode>, String> {
    s.split(';')
        .filter(|m| !m.trim().is_empty())
        .map(|m| {
            let p: Vec<&str> = m.split(',').map(str::trim).collect();
            if p.len() != 3 {
                return Err(format!("mode `{}` must be `kx, ky, amp`", m.trim()));
            }
            let bad = || format!("bad mode `{}`", m.trim());
            Ok(FourierMode {
                kx: p[0].parse().map_err(|_| bad())?,
                ky: p[1].parse().map_err(|_| bad())?,
                amp: p[2].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

impl Reader<'_> {
    fn line(&self, key: &str) -> usize {
        self.b.values.get(key).map_or(0, |v| v.1)
    }

    fn get<T>(&self, key: &str, default: T, parse: impl Fn(&str) -> std::result::Result<T, String>) -> Result<T>
    where
        T: std::fmt::Debug,
    {
        match self.b.values.get(key) {
            Some((v, line)) => parse(v).map_err(|m| Error::config(*line, format!("{key}: {m}"))),
            None => {
                log::info!("default {key} = {default:?}");
                Ok(default)
            }
        }
    }

    fn num<T: FromStr + std::fmt::Debug>(&self, key: &str, default: T) -> Result<T> {
        self.get(key, default, |s| s.parse::<T>().map_err(|_| format!("cannot parse `{s}`")))
    }

    fn opt<T: FromStr + std::fmt::Debug>(&self, key: &str) -> Result<Option<T>> {
        self.get(key, None, |s| {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse::<T>().map(Some).map_err(|_| format!("cannot parse `{s}`"))
            }
        })
    }

    fn check(&self, key: &str, ok: bool, msg: impl Into<String>) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(Error::config(self.line(key), format!("{key}: {}", msg.into())))
        }
    }

    fn build(&self) -> Result<RunConfig> {
        let d = RunConfig::default();
        let n: usize = self.num("n", d.grid.n())?;
        self.check("n", n.is_power_of_two() && n >= 8, format!("n must be a power of two and at least 8, got {n}"))?;
        let frac: f64 = self.num("dealias_fraction", DEFAULT_DEALIAS_FRACTION)?;
        let grid = GridSpec::with_dealias(n, frac).map_err(|e| Error::config(self.line("dealias_fraction"), e.to_string()))?;

        let cfl: f64 = self.num("cfl", 0.5)?;
        self.check("cfl", cfl > 0.0 && cfl.is_finite(), "must be positive")?;
        let dt: Option<f64> = self.opt("dt")?;
        if let Some(dt) = dt {
            self.check("dt", dt > 0.0 && dt.is_finite(), "must be positive")?;
        }
        let ds = &d.solver;
        let solver = SolverParams {
            time_step: dt.map_or(TimeStep::Cfl(cfl), TimeStep::Fixed),
            pressure_tol: self.num("pressure_tol", ds.pressure_tol)?,
            pressure_max_iter: self.num("pressure_max_iter", ds.pressure_max_iter)?,
            blowup_threshold: self.num("blowup_threshold", ds.blowup_threshold)?,
            density_bounds: (self.num("rho_min", ds.density_bounds.0)?, self.num("rho_max", ds.density_bounds.1)?),
        };
        self.check("pressure_tol", solver.pressure_tol > 0.0 && solver.pressure_tol < 1e-6, "must lie in (0, 1e-6)")?;
        self.check("pressure_max_iter", solver.pressure_max_iter > 0, "must be positive")?;
        self.check("blowup_threshold", solver.blowup_threshold > 0.0, "must be positive")?;
        let (lo, hi) = solver.density_bounds;
        self.check("rho_min", lo > 0.0 && lo < 1.0, "must lie in (0, 1)")?;
        self.check("rho_max", hi > 1.0 && hi.is_finite(), "must exceed 1")?;

        let dd = &d.data;
        let data = DataSpec {
            kind: self.get("kind", dd.kind, |s| s.parse::<DataKind>().map_err(|e| e.to_string()))?,
            delta: self.num("delta", dd.delta)?,
            seed: self.num("seed", dd.seed)?,
            alpha: self.num("alpha", dd.alpha)?,
            n_mollify: self.opt("n_mollify")?,
            band: self.num("band", dd.band)?,
            sobolev_s: self.num("sobolev_s", dd.sobolev_s)?,
            psi_modes: self.get("psi_modes", dd.psi_modes.clone(), parse_modes)?,
            r_modes: self.get("r_modes", dd.r_modes.clone(), parse_modes)?,
            density_bounds: solver.density_bounds,
        };
        self.check("delta", data.delta >= 0.0 && data.delta.is_finite(), "must be nonnegative")?;
        self.check("band", data.band >= 1, "must be at least 1")?;
        self.check("alpha", data.alpha >= 0.0 && data.alpha.is_finite(), "must be nonnegative")?;
        data.validate().map_err(|e| Error::config(self.line("kind"), e.to_string()))?;

        let epsilon: f64 = self.num("epsilon", d.epsilon)?;
        self.check("epsilon", epsilon > 0.0 && epsilon <= 1.0, "must lie in (0, 1]")?;
        let eps_list: Vec<f64> = self.get("eps_list", d.eps_list.clone(), parse_list)?;
        self.check(
            "eps_list",
            !eps_list.is_empty() && eps_list.iter().all(|&e| e > 0.0 && e <= 1.0) && eps_list.windows(2).all(|w| w[1] < w[0]),
            "must be strictly decreasing values in (0, 1]",
        )?;
        let delta_list: Vec<f64> = self.get("delta_list", d.delta_list.clone(), parse_list)?;
        self.check("delta_list", !delta_list.is_empty() && delta_list.iter().all(|&x| x > 0.0), "must be positive values")?;
        let lifespan_system = self.get("lifespan_system", d.lifespan_system, |s| match s {
            "qh" => Ok(LifespanSystem::Qh),
            "primitive" => Ok(LifespanSystem::Primitive),
            _ => Err(format!("expected `qh` or `primitive`, got `{s}`")),
        })?;

        let mode = self.get("mode", d.mode, |s| s.parse())?;
        let horizon: f64 = self.num("horizon", d.horizon)?;
        self.check("horizon", horizon > 0.0 && horizon.is_finite(), "must be positive")?;
        let output_interval: f64 = self.num("output_interval", d.output_interval)?;
        self.check("output_interval", output_interval > 0.0 && output_interval.is_finite(), "must be positive")?;
        let output_times: Option<Vec<f64>> =
            self.get("output_times", None, |s| if s.is_empty() { Ok(None) } else { parse_list(s).map(Some) })?;
        if let Some(t) = &output_times {
            self.check(
                "output_times",
                t.iter().all(|&x| x > 0.0 && x <= horizon) && t.windows(2).all(|w| w[1] > w[0]),
                "must be increasing values in (0, horizon]",
            )?;
        }
        let picard_iters: usize = self.num("picard_iters", d.picard_iters)?;
        self.check("picard_iters", picard_iters >= 1, "must be at least 1")?;
        let picard_steps: usize = self.num("picard_steps", d.picard_steps)?;
        self.check("picard_steps", picard_steps >= 3, "must be at least 3")?;
        let twin_fine_n: Option<usize> = self.opt("twin_fine_n")?;
        if let Some(f) = twin_fine_n {
            self.check("twin_fine_n", f.is_power_of_two() && f > n, "must be a power of two larger than n")?;
        }
        let timing = self.get("timing", d.timing, |s| s.parse::<bool>().map_err(|_| format!("expected true or false, got `{s}`")))?;
        let out_dir = self.get("out_dir", d.out_dir.clone(), |s| Ok(PathBuf::from(s)))?;
        let c: f64 = self.num("C", d.c)?;
        self.check("C", c > 0.0 && c.is_finite(), "must be positive")?;
        let lambda: f64 = self.num("lambda", d.lambda)?;
        self.check("lambda", lambda >= 1.0 && lambda.is_finite(), "must be at least 1")?;

        Ok(RunConfig {
            mode,
            grid,
            solver,
            data,
            epsilon,
            eps_list,
            delta_list,
            lifespan_system,
            horizon,
            output_interval,
            output_times,
            picard_iters,
            picard_steps,
            twin_fine_n,
            timing,
            out_dir,
            c,
            lambda,
        })
    }
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
}

fn modes(v: &[FourierMode]) -> String {
    v.iter().map(|m| format!("{}, {}, {:?}", m.kx, m.ky, m.amp)).collect::<Vec<_>>().join("; ")
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes every key explicitly, so the text reparses to the same configuration.
pub fn serialize_config(c: &RunConfig) -> String {
    let (cfl, dt) = match c.solver.time_step {
        TimeStep::Cfl(x) => (x, None),
        TimeStep::Fixed(x) => (0.5, Some(x)),
    };
    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(w, "[grid]\nn = {}\ndealias_fraction = {:?}\n", c.grid.n(), c.grid.dealias_fraction());
    let _ = writeln!(
        w,
        "[solver]\ncfl = {cfl:?}\ndt = {}\npressure_tol = {:?}\npressure_max_iter = {}\nblowup_threshold = {:?}\nrho_min = {:?}\nrho_max = {:?}\n",
        opt(dt.map(|x| format!("{x:?}"))),
        c.solver.pressure_tol,
        c.solver.pressure_max_iter,
        c.solver.blowup_threshold,
        c.solver.density_bounds.0,
        c.solver.density_bounds.1,
    );
    let d = &c.data;
    let _ = writeln!(
        w,
        "[data]\nkind = {}\ndelta = {:?}\nepsilon = {:?}\neps_list = {}\ndelta_list = {}\nseed = {}\nalpha = {:?}\nn_mollify = {}\nband = {}\nsobolev_s = {:?}\npsi_modes = {}\nr_modes = {}\n",
        d.kind.as_str(),
        d.delta,
        c.epsilon,
        list(&c.eps_list),
        list(&c.delta_list),
        d.seed,
        d.alpha,
        opt(d.n_mollify),
        d.band,
        d.sobolev_s,
        modes(&d.psi_modes),
        modes(&d.r_modes),
    );
    let _ = writeln!(
        w,
        "[run]\nmode = {}\nhorizon = {:?}\noutput_interval = {:?}\noutput_times = {}\npicard_iters = {}\npicard_steps = {}\ntwin_fine_n = {}\nlifespan_system = {}\ntiming = {}\nout_dir = {}\nC = {:?}\nlambda = {:?}",
        c.mode.as_str(),
        c.horizon,
        c.output_interval,
        c.output_times.as_deref().map(list).unwrap_or_default(),
        c.picard_iters,
        c.picard_steps,
        opt(c.twin_fine_n),
        match c.lifespan_system {
            LifespanSystem::Qh => "qh",
            LifespanSystem::Primitive => "primitive",
        },
        c.timing,
        c.out_dir.display(),
        c.c,
        c.lambda,
    );
    s
}
