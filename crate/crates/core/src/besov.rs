//! Littlewood-Paley blocks, Besov norms and the Bony decomposition.
//!
//! Blocks follow `Delta_j = phi(2^-j D)` for `j >= 0` with
//! `phi(xi) = chi(xi) - chi(2 xi)`, and `Delta_{-1} = chi(2D)`, so that
//! `S_j = sum_{k <= j-1} Delta_k = chi(2^{1-j} D)` and the blocks sum to one.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{fft, GridSpec, ScalarField, VectorField};

fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

/// Radial low-pass profile: one on `|xi| <= 1`, zero on `|xi| >= 2`.
pub fn chi(r: f64) -> f64 {
    1.0 - smooth_step(r - 1.0)
}

/// Annular profile `chi(xi) - chi(2 xi)`, supported in `1/2 <= |xi| <= 2`.
pub fn phi(r: f64) -> f64 {
    chi(r) - chi(2.0 * r)
}

/// Multiplier of block `j` at radius `r`.
pub fn block_weight(j: i32, r: f64) -> f64 {
    if j < -1 {
        0.0
    } else if j == -1 {
        chi(2.0 * r)
    } else {
        phi(r / 2f64.powi(j))
    }
}

/// Multiplier of `S_j`; zero for `j <= -1`.
pub fn low_weight(j: i32, r: f64) -> f64 {
    if j < 0 {
        0.0
    } else {
        chi(2f64.powi(1 - j) * r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpFamily {
    pub grid: GridSpec,
    /// Highest block that can be nonzero on a dealiased field.
    pub j_max: i32,
    /// Highest block that can be nonzero on any field of the grid.
    pub j_top: i32,
}

fn covering_level(r: f64) -> i32 {
    let mut j = 0;
    while 2f64.powi(j) < r {
        j += 1;
    }
    j
}

impl LpFamily {
    pub fn new(grid: GridSpec) -> Self {
        let j_max = covering_level(grid.max_retained_wavenumber());
        let j_top = covering_level(grid.n() as f64 / 2.0 * std::f64::consts::SQRT_2).max(j_max);
        Self { grid, j_max, j_top }
    }

    pub fn blocks(&self) -> std::ops::RangeInclusive<i32> {
        -1..=self.j_top
    }
}

fn weighted(grid: GridSpec, c: &[Complex64], w: impl Fn(f64) -> f64) -> Option<Vec<Complex64>> {
    let n = grid.n();
    let mut out = vec![Complex64::new(0.0, 0.0); c.len()];
    let mut any = false;
    for iy in 0..n {
        let ky = grid.wavenumber(iy) as f64;
        for ix in 0..n {
            let idx = iy * n + ix;
            if c[idx] == Complex64::new(0.0, 0.0) {
                continue;
            }
            let m = w((grid.wavenumber(ix) as f64).hypot(ky));
            if m != 0.0 {
                out[idx] = c[idx] * m;
                any = true;
            }
        }
    }
    any.then_some(out)
}

fn real_or_zero(grid: GridSpec, c: Option<Vec<Complex64>>) -> ScalarField {
    match c {
        Some(c) => ScalarField { grid, values: fft::inverse(&c, grid.n()) },
        None => ScalarField::zeros(grid),
    }
}

pub fn dyadic_block(f: &ScalarField, j: i32) -> Result<ScalarField> {
    if j < -1 {
        return Err(Error::InvalidArgument(format!("block index must be >= -1, got {j}")));
    }
    f.check_finite()?;
    let c = fft::forward(&f.values, f.grid.n());
    Ok(real_or_zero(f.grid, weighted(f.grid, &c, |r| block_weight(j, r))))
}

/// `S_j f`, the sum of all blocks below `j`.
pub fn low_cutoff(f: &ScalarField, j: i32) -> Result<ScalarField> {
    if j < 0 {
        return Err(Error::InvalidArgument(format!("cutoff index must be >= 0, got {j}")));
    }
    f.check_finite()?;
    let c = fft::forward(&f.values, f.grid.n());
    Ok(real_or_zero(f.grid, weighted(f.grid, &c, |r| low_weight(j, r))))
}

pub fn low_cutoff_vector(u: &VectorField, j: i32) -> Result<VectorField> {
    Ok(VectorField { x: low_cutoff(&u.x, j)?, y: low_cutoff(&u.y, j)? })
}

/// All blocks `Delta_{-1} .. Delta_{j_top}` of `f`.
pub fn decompose(f: &ScalarField) -> Result<Vec<ScalarField>> {
    f.check_finite()?;
    let fam = LpFamily::new(f.grid);
    let c = fft::forward(&f.values, f.grid.n());
    Ok(fam.blocks().map(|j| real_or_zero(f.grid, weighted(f.grid, &c, |r| block_weight(j, r)))).collect())
}

fn check_exponents(p: f64, r: f64) -> Result<()> {
    if !(p >= 1.0) || !(r >= 1.0) {
        return Err(Error::InvalidArgument(format!("Besov exponents need p, r >= 1, got p={p}, r={r}")));
    }
    Ok(())
}

fn combine(terms: impl Iterator<Item = f64>, r: f64) -> f64 {
    if r.is_infinite() {
        terms.fold(0.0, f64::max)
    } else {
        terms.map(|t| t.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

fn scalar_lp(f: &ScalarField, p: f64) -> f64 {
    f.lp_norm(p)
}

fn vector_lp(u: &VectorField, p: f64) -> f64 {
    u.magnitude().lp_norm(p)
}

/// `(sum_j (2^{js} ||Delta_j f||_{L^p})^r)^{1/r}`.
pub fn besov_norm(f: &ScalarField, s: f64, p: f64, r: f64) -> Result<f64> {
    check_exponents(p, r)?;
    let blocks = decompose(f)?;
    Ok(combine(
        blocks.iter().enumerate().map(|(i, b)| 2f64.powf(s * (i as f64 - 1.0)) * scalar_lp(b, p)),
        r,
    ))
}

/// Besov norm of a vector field, with `L^p` taken of the pointwise magnitude.
pub fn besov_norm_vector(u: &VectorField, s: f64, p: f64, r: f64) -> Result<f64> {
    check_exponents(p, r)?;
    let bx = decompose(&u.x)?;
    let by = decompose(&u.y)?;
    Ok(combine(
        bx.into_iter().zip(by).enumerate().map(|(i, (x, y))| {
            2f64.powf(s * (i as f64 - 1.0)) * vector_lp(&VectorField { x, y }, p)
        }),
        r,
    ))
}

/// Pointwise Frobenius norm of all order-`k` partial derivatives.
pub fn derivative_tensor_magnitude(f: &ScalarField, k: u32) -> Result<ScalarField> {
    f.check_finite()?;
    let g = f.grid;
    let n = g.n();
    let c = fft::forward(&f.values, n);
    let mut acc = vec![0.0; g.len()];
    for pattern in 0..(1u32 << k) {
        let nx = pattern.count_ones() as i32;
        let ny = k as i32 - nx;
        let mut d = c.clone();
        for iy in 0..n {
            let ky = g.derivative_wavenumber(iy);
            for ix in 0..n {
                let kx = g.derivative_wavenumber(ix);
                let m = Complex64::new(0.0, kx).powi(nx) * Complex64::new(0.0, ky).powi(ny);
                d[iy * n + ix] *= m;
            }
        }
        for (a, v) in acc.iter_mut().zip(fft::inverse(&d, n)) {
            *a += v * v;
        }
    }
    Ok(ScalarField { grid: g, values: acc.into_iter().map(f64::sqrt).collect() })
}

/// `||grad^k f||_{L^p} / (2^{jk} ||f||_{L^p})` for `f` supported in the annulus of block `j`.
pub fn bernstein_ratio(f: &ScalarField, j: i32, k: u32, p: f64) -> Result<f64> {
    if j < 0 {
        return Err(Error::InvalidArgument("Bernstein ratio needs an annular block, j >= 0".into()));
    }
    f.check_finite()?;
    let g = f.grid;
    let n = g.n();
    let c = fft::forward(&f.values, n);
    let (lo, hi) = (2f64.powi(j - 1), 2f64.powi(j + 1));
    let mut outside = 0.0;
    let mut total = 0.0;
    for iy in 0..n {
        for ix in 0..n {
            let e = c[iy * n + ix].norm_sqr();
            let r = (g.wavenumber(ix) as f64).hypot(g.wavenumber(iy) as f64);
            total += e;
            if r < lo - 1e-12 || r > hi + 1e-12 {
                outside += e;
            }
        }
    }
    if total == 0.0 || outside > 1e-8 * total {
        return Err(Error::InvalidArgument(format!("field is not localized in block {j}")));
    }
    let num = derivative_tensor_magnitude(f, k)?.lp_norm(p);
    Ok(num / (2f64.powi(j * k as i32) * f.lp_norm(p)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernsteinReport {
    /// `||grad f||_{L^p} / (2^j ||f||_{L^p})`.
    pub derivative_ratio: f64,
    /// `||f||_{L^q} / (2^{2j(1/p - 1/q)} ||f||_{L^p})`.
    pub integrability_ratio: f64,
    pub budget: f64,
    pub within_budget: bool,
}

/// Measure both Bernstein ratios on a field localized in block `j` and flag
/// any that leave `[1/budget, budget]` (the integrability ratio is only
/// bounded above).
pub fn bernstein_check(f: &ScalarField, j: i32, p: f64, q: f64, budget: f64) -> Result<BernsteinReport> {
    if q < p {
        return Err(Error::InvalidArgument(format!("need q >= p, got p={p}, q={q}")));
    }
    let derivative_ratio = bernstein_ratio(f, j, 1, p)?;
    let inv = |e: f64| if e.is_infinite() { 0.0 } else { 1.0 / e };
    let integrability_ratio = f.lp_norm(q) / (2f64.powf(2.0 * j as f64 * (inv(p) - inv(q))) * f.lp_norm(p));
    let within_budget = derivative_ratio <= budget && derivative_ratio >= 1.0 / budget && integrability_ratio <= budget;
    Ok(BernsteinReport { derivative_ratio, integrability_ratio, budget, within_budget })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovIndex {
    pub s: f64,
    pub p: f64,
    pub r: f64,
}

impl BesovIndex {
    pub fn new(s: f64, p: f64, r: f64) -> Self {
        Self { s, p, r }
    }

    /// Whether `B^s_{p,r}` embeds in the Lipschitz class: `s > 1 + 2/p`, or equality with `r = 1`.
    pub fn embeds_in_lipschitz(&self) -> bool {
        let edge = 1.0 + if self.p.is_infinite() { 0.0 } else { 2.0 / self.p };
        self.s > edge || (self.s == edge && self.r == 1.0)
    }

    pub fn norm(&self, f: &ScalarField) -> Result<f64> {
        besov_norm(f, self.s, self.p, self.r)
    }
}

#[derive(Debug, Clone)]
pub struct BonyParts {
    /// `T_u v = sum_j S_{j-1} u Delta_j v`.
    pub para_uv: ScalarField,
    /// `T_v u`.
    pub para_vu: ScalarField,
    /// `R(u, v) = sum_{|j - k| <= 1} Delta_j u Delta_k v`.
    pub remainder: ScalarField,
}

impl BonyParts {
    pub fn sum(&self) -> ScalarField {
        self.para_uv.add(&self.para_vu).add(&self.remainder)
    }
}

/// Split the dealiased product `uv` into two paraproducts and a remainder.
pub fn bony_decompose(u: &ScalarField, v: &ScalarField) -> Result<BonyParts> {
    u.grid.check_same(&v.grid)?;
    let bu = decompose(u)?;
    let bv = decompose(v)?;
    let g = u.grid;
    let m = bu.len();
    let para = |a: &[ScalarField], b: &[ScalarField]| {
        let mut acc = ScalarField::zeros(g);
        let mut low = ScalarField::zeros(g);
        // index i holds block i - 1; S_{j-1} a = sum of blocks below j - 1
        for i in 0..m {
            if i >= 2 {
                low = low.add(&a[i - 2]);
            }
            acc = acc.add(&low.mul(&b[i]));
        }
        crate::spectral::dealias_raw(&acc)
    };
    let para_uv = para(&bu, &bv);
    let para_vu = para(&bv, &bu);
    let mut rem = ScalarField::zeros(g);
    for i in 0..m {
        for k in i.saturating_sub(1)..(i + 2).min(m) {
            rem = rem.add(&bu[i].mul(&bv[k]));
        }
    }
    Ok(BonyParts { para_uv, para_vu, remainder: crate::spectral::dealias_raw(&rem) })
}
