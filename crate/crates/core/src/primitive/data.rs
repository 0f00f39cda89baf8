//! Initial data: random band-limited stream functions and density profiles.

use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{solve_pressure, PrimitiveState};
use crate::besov::{low_cutoff, low_cutoff_vector, LpFamily};
use crate::error::{Error, Result};
use crate::qh::{qh_pressure, QhState};
use crate::solver::{project_and_dealias, SolverParams};
use crate::spectral::{dealias_raw, from_spectral, perp_gradient, sobolev_norm_vector, sup_norm, GridSpec, ScalarField, SpectralScalar, VectorField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataKind {
    /// `R = delta (P0 + eps P1)` with an `eps`-independent velocity.
    IllPreparedDefault,
    /// User-listed cosine modes for the stream function and the fluctuation.
    CustomModes,
    /// `rho - 1 = eps^{1 + alpha} delta P0`.
    CorollaryAlpha,
}

impl DataKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DataKind::IllPreparedDefault => "ill_prepared_default",
            DataKind::CustomModes => "custom_modes",
            DataKind::CorollaryAlpha => "corollary_alpha",
        }
    }
}

impl FromStr for DataKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ill_prepared_default" => Ok(DataKind::IllPreparedDefault),
            "custom_modes" => Ok(DataKind::CustomModes),
            "corollary_alpha" => Ok(DataKind::CorollaryAlpha),
            _ => Err(format!("unknown data kind `{s}`")),
        }
    }
}

/// `amp * cos(kx x + ky y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierMode {
    pub kx: i32,
    pub ky: i32,
    pub amp: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataSpec {
    pub kind: DataKind,
    pub delta: f64,
    pub seed: u64,
    pub alpha: f64,
    /// Level of the `S_j` mollifier; `None` means `j_max - 1`.
    pub n_mollify: Option<i32>,
    /// Random modes satisfy `1 <= max(|kx|, |ky|) <= band`.
    pub band: i32,
    /// Sobolev index used to normalize `u0`.
    pub sobolev_s: f64,
    pub psi_modes: Vec<FourierMode>,
    pub r_modes: Vec<FourierMode>,
    pub density_bounds: (f64, f64),
}

impl Default for DataSpec {
    fn default() -> Self {
        Self {
            kind: DataKind::IllPreparedDefault,
            delta: 0.1,
            seed: 1,
            alpha: 1.0,
            n_mollify: None,
            band: 4,
            sobolev_s: 2.0,
            psi_modes: Vec::new(),
            r_modes: Vec::new(),
            density_bounds: SolverParams::default().density_bounds,
        }
    }
}

impl DataSpec {
    pub fn mollify_level(&self, grid: GridSpec) -> i32 {
        self.n_mollify.unwrap_or_else(|| LpFamily::new(grid).j_max - 1)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return bad(format!("delta must be non-negative, got {}", self.delta));
        }
        if self.band < 1 {
            return bad(format!("band must be at least 1, got {}", self.band));
        }
        if matches!(self.n_mollify, Some(j) if j < 0) {
            return bad("n_mollify must be non-negative".into());
        }
        if !(self.alpha >= 0.0) {
            return bad(format!("alpha must be non-negative, got {}", self.alpha));
        }
        Ok(())
    }
}

/// Unnormalized random real field with Gaussian coefficients decaying like `exp(-|k|^2 / band^2)`.
fn random_band(grid: GridSpec, seed: u64, stream: u64, band: i32) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut s = SpectralScalar::zeros(grid);
    let n = grid.n();
    let half = (n / 2) as i32;
    for ky in 0..=band {
        for kx in -band..=band {
            if ky == 0 && kx <= 0 {
                continue;
            }
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            if kx.abs() >= half || ky >= half {
                continue;
            }
            let w = (-((kx * kx + ky * ky) as f64) / (band * band) as f64).exp();
            let c = Complex64::new(re, im) * (0.5 * w);
            let at = |k: i32| k.rem_euclid(n as i32) as usize;
            s.coeffs[at(ky) * n + at(kx)] += c;
            s.coeffs[at(-ky) * n + at(-kx)] += c.conj();
        }
    }
    from_spectral(&s)
}

fn cosine_modes(grid: GridSpec, modes: &[FourierMode]) -> ScalarField {
    ScalarField::from_fn(grid, |x, y| modes.iter().map(|m| m.amp * (m.kx as f64 * x + m.ky as f64 * y).cos()).sum())
}

fn unit_sup(f: ScalarField) -> ScalarField {
    let s = sup_norm(&f);
    if s > 0.0 {
        f.scale(1.0 / s)
    } else {
        f
    }
}

fn unit_velocity(psi: &ScalarField, s: f64) -> Result<VectorField> {
    let u = perp_gradient(psi)?;
    let h = sobolev_norm_vector(&u, s)?;
    Ok(if h > 0.0 { u.scale(1.0 / h) } else { u })
}

/// The ingredients of the data family, before mollification.
#[derive(Debug, Clone)]
pub struct Profiles {
    pub r0: ScalarField,
    pub r1: ScalarField,
    pub u0: VectorField,
}

pub fn profiles(grid: GridSpec, spec: &DataSpec) -> Result<Profiles> {
    spec.validate()?;
    let zero_s = ScalarField::zeros(grid);
    Ok(match spec.kind {
        DataKind::CustomModes => Profiles {
            r0: cosine_modes(grid, &spec.r_modes),
            r1: zero_s,
            u0: perp_gradient(&cosine_modes(grid, &spec.psi_modes))?,
        },
        DataKind::IllPreparedDefault | DataKind::CorollaryAlpha => {
            let u0 = unit_velocity(&random_band(grid, spec.seed, 0, spec.band), spec.sobolev_s)?;
            let r0 = unit_sup(random_band(grid, spec.seed, 2, spec.band));
            let r1 = if spec.kind == DataKind::CorollaryAlpha { zero_s } else { unit_sup(random_band(grid, spec.seed, 3, spec.band)) };
            Profiles { r0, r1, u0 }
        }
    })
}

/// `(R_{0,eps}, u_{0,eps})` before mollification.
pub fn initial_fluctuation(grid: GridSpec, spec: &DataSpec, eps: f64) -> Result<(ScalarField, VectorField)> {
    let p = profiles(grid, spec)?;
    let scale = if spec.kind == DataKind::CorollaryAlpha { eps.powf(spec.alpha) } else { 1.0 };
    let r = p.r0.add(&p.r1.scale(eps)).scale(spec.delta * scale);
    Ok((r, p.u0))
}

fn density_check(r: &ScalarField, eps: f64, bounds: (f64, f64)) -> Result<()> {
    let min = 1.0 + eps * r.min();
    let max = 1.0 + eps * r.max();
    if !(min >= bounds.0 && max <= bounds.1) {
        return Err(Error::DensityBounds { min, max, lo: bounds.0, hi: bounds.1 });
    }
    Ok(())
}

/// Mollified primitive data `(S_n a_{0,eps}, S_n u_{0,eps})` with its pressure.
pub fn make_initial_data(grid: GridSpec, spec: &DataSpec, eps: f64) -> Result<PrimitiveState> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1], got {eps}")));
    }
    let (r, u) = initial_fluctuation(grid, spec, eps)?;
    density_check(&r, eps, spec.density_bounds)?;
    let a = r.map(|r| -r / (1.0 + eps * r));
    let level = spec.mollify_level(grid);
    let a = dealias_raw(&low_cutoff(&a, level)?);
    let u = project_and_dealias(&low_cutoff_vector(&u, level)?);
    let pi = solve_pressure(&a, &u, eps, &SolverParams::default())?.pi;
    let state = PrimitiveState { t: 0.0, epsilon: eps, a, u, pi };
    state.check_density(spec.density_bounds)?;
    Ok(state)
}

/// The limit datum: `R = lim R_{0,eps}` and `u = u0`, mollified like the primitive data.
pub fn make_qh_initial_data(grid: GridSpec, spec: &DataSpec) -> Result<QhState> {
    let p = profiles(grid, spec)?;
    let r = if spec.kind == DataKind::CorollaryAlpha && spec.alpha > 0.0 {
        ScalarField::zeros(grid)
    } else {
        p.r0.scale(spec.delta)
    };
    let level = spec.mollify_level(grid);
    let r = dealias_raw(&low_cutoff(&r, level)?);
    let u = project_and_dealias(&low_cutoff_vector(&p.u0, level)?);
    let pi = qh_pressure(&r, &u)?;
    Ok(QhState { t: 0.0, r, u, pi })
}
