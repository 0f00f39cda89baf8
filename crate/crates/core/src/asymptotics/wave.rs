use crate::error::{Error, Result};
use crate::primitive::PrimitiveState;
use crate::spectral::{divergence, gradient, perp, ScalarField, VectorField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveResidual {
    /// `||eps d_t R + div V||`, with `V = rho u`.
    pub r_mass: f64,
    /// `||d_t R + div(R u)||`.
    pub r_mass_o1: f64,
    /// `||eps d_t V + grad Pi + u^perp - eps f||`, `f = -div(rho u (x) u) - R u^perp`.
    pub r_mom: f64,
}

fn stencil(h0: f64, h1: f64) -> [f64; 3] {
    [-h1 / (h0 * (h0 + h1)), (h1 - h0) / (h0 * h1), h0 / (h1 * (h0 + h1))]
}

fn combine(c: [f64; 3], f: [&ScalarField; 3]) -> ScalarField {
    let values = (0..f[0].values.len())
        .map(|i| c[0] * f[0].values[i] + c[1] * f[1].values[i] + c[2] * f[2].values[i])
        .collect();
    ScalarField { grid: f[0].grid, values }
}

/// Residuals of the wave form at `frames[index]`, with time derivatives from its two neighbours.
pub fn wave_residual(frames: &[PrimitiveState], index: usize) -> Result<WaveResidual> {
    if index == 0 || index + 1 >= frames.len() {
        return Err(Error::InvalidArgument(format!(
            "frame {index} needs a neighbour on each side, have {} frames",
            frames.len()
        )));
    }
    let (prev, cur, next) = (&frames[index - 1], &frames[index], &frames[index + 1]);
    let (h0, h1) = (cur.t - prev.t, next.t - cur.t);
    if !(h0 > 0.0 && h1 > 0.0) {
        return Err(Error::InvalidArgument("frames must have increasing times".into()));
    }
    if prev.epsilon != cur.epsilon || next.epsilon != cur.epsilon {
        return Err(Error::InvalidArgument("frames have different epsilon".into()));
    }
    let eps = cur.epsilon;
    let c = stencil(h0, h1);
    let rs = [prev.fluctuation(), cur.fluctuation(), next.fluctuation()];
    let vs = [prev.momentum(), cur.momentum(), next.momentum()];
    let dr = combine(c, [&rs[0], &rs[1], &rs[2]]);
    let dv = VectorField { x: combine(c, [&vs[0].x, &vs[1].x, &vs[2].x]), y: combine(c, [&vs[0].y, &vs[1].y, &vs[2].y]) };
    let (r, v, u) = (&rs[1], &vs[1], &cur.u);
    let r_mass = dr.scale(eps).add(&divergence(v)?).l2_norm();
    let ru = VectorField { x: r.mul(&u.x), y: r.mul(&u.y) };
    let r_mass_o1 = dr.add(&divergence(&ru)?).l2_norm();
    let flux_div = |w: &ScalarField| divergence(&VectorField { x: w.mul(&u.x), y: w.mul(&u.y) });
    let up = perp(u);
    let fx = flux_div(&v.x)?.scale(-1.0).sub(&r.mul(&up.x));
    let fy = flux_div(&v.y)?.scale(-1.0).sub(&r.mul(&up.y));
    let gp = gradient(&cur.pi)?;
    let mx = dv.x.scale(eps).add(&gp.x).add(&up.x).sub(&fx.scale(eps));
    let my = dv.y.scale(eps).add(&gp.y).add(&up.y).sub(&fy.scale(eps));
    Ok(WaveResidual { r_mass, r_mass_o1, r_mom: VectorField { x: mx, y: my }.l2_norm() })
}
