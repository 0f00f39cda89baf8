use super::{fft, ScalarField};

struct Mode {
    kx: f64,
    ky: f64,
    re: f64,
    im: f64,
}

fn modes_of(f: &ScalarField) -> Vec<Mode> {
    let g = f.grid;
    let n = g.n();
    let c = fft::forward(&f.values, n);
    let cmax = c.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let cut = cmax * 1e-17;
    let mut out = Vec::new();
    for iy in 0..n {
        for ix in 0..n {
            let z = c[iy * n + ix];
            if z.norm() > cut {
                out.push(Mode { kx: g.wavenumber(ix) as f64, ky: g.wavenumber(iy) as f64, re: z.re, im: z.im });
            }
        }
    }
    out
}

/// Value, gradient and Hessian of the trigonometric interpolant, scaled by `sign`.
fn eval(modes: &[Mode], x: f64, y: f64, sign: f64) -> (f64, [f64; 2], [f64; 3]) {
    let (mut v, mut gx, mut gy, mut hxx, mut hxy, mut hyy) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for m in modes {
        let (s, c) = (m.kx * x + m.ky * y).sin_cos();
        let val = m.re * c - m.im * s;
        let d1 = -m.re * s - m.im * c;
        v += val;
        gx += m.kx * d1;
        gy += m.ky * d1;
        hxx -= m.kx * m.kx * val;
        hxy -= m.kx * m.ky * val;
        hyy -= m.ky * m.ky * val;
    }
    (sign * v, [sign * gx, sign * gy], [sign * hxx, sign * hxy, sign * hyy])
}

fn refine_max(modes: &[Mode], x0: f64, y0: f64, h: f64, sign: f64) -> f64 {
    let (mut x, mut y) = (x0, y0);
    let (mut best, mut g, mut hess) = eval(modes, x, y, sign);
    for _ in 0..40 {
        let [hxx, hxy, hyy] = hess;
        let det = hxx * hyy - hxy * hxy;
        let (mut dx, mut dy) = if hxx < 0.0 && det > 0.0 {
            (-(hyy * g[0] - hxy * g[1]) / det, -(-hxy * g[0] + hxx * g[1]) / det)
        } else {
            let gn = g[0].hypot(g[1]);
            if gn == 0.0 {
                break;
            }
            (0.25 * h * g[0] / gn, 0.25 * h * g[1] / gn)
        };
        let len = dx.hypot(dy);
        if len > 0.5 * h {
            dx *= 0.5 * h / len;
            dy *= 0.5 * h / len;
        }
        let (v, g2, h2) = eval(modes, x + dx, y + dy, sign);
        if v < best {
            break;
        }
        x += dx;
        y += dy;
        let improved = v - best;
        best = v;
        g = g2;
        hess = h2;
        if dx.hypot(dy) < 1e-14 || improved <= 1e-17 * best.abs() {
            break;
        }
    }
    best
}

fn extremum(f: &ScalarField, modes: &[Mode], sign: f64) -> f64 {
    let g = f.grid;
    let n = g.n();
    let at = |ix: usize, iy: usize| sign * f.values[(iy % n) * n + (ix % n)];
    let mut cands: Vec<(f64, usize, usize)> = Vec::new();
    for iy in 0..n {
        for ix in 0..n {
            let v = at(ix, iy);
            let mut is_max = true;
            'nb: for dy in [n - 1, 0, 1] {
                for dx in [n - 1, 0, 1] {
                    if (dx, dy) != (0, 0) && at(ix + dx, iy + dy) > v {
                        is_max = false;
                        break 'nb;
                    }
                }
            }
            if is_max {
                cands.push((v, ix, iy));
            }
        }
    }
    cands.sort_by(|a, b| b.0.total_cmp(&a.0));
    cands.truncate(8);
    let h = g.spacing();
    cands
        .iter()
        .map(|&(_, ix, iy)| refine_max(modes, g.coord(ix), g.coord(iy), h, sign))
        .fold(f64::NEG_INFINITY, f64::max)
        * sign
}

/// Minimum and maximum of the trigonometric interpolant of `f`, located by
/// Newton refinement of the grid extrema.
pub fn trig_extrema(f: &ScalarField) -> (f64, f64) {
    let modes = modes_of(f);
    if modes.is_empty() {
        return (0.0, 0.0);
    }
    let lo = extremum(f, &modes, -1.0).min(f.min());
    let hi = extremum(f, &modes, 1.0).max(f.max());
    (lo, hi)
}

/// `sup |f|` of the trigonometric interpolant.
pub fn sup_norm(f: &ScalarField) -> f64 {
    let (lo, hi) = trig_extrema(f);
    lo.abs().max(hi.abs())
}
