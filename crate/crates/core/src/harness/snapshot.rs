use std::path::Path;

use crate::error::{Error, Result};
use crate::primitive::PrimitiveState;
use crate::qh::QhState;
use crate::spectral::{GridSpec, ScalarField, VectorField};

const MAGIC: &[u8; 4] = b"RSBL";
const VERSION: u8 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Snapshot {
    Primitive(PrimitiveState),
    Qh(QhState),
}

impl From<PrimitiveState> for Snapshot {
    fn from(s: PrimitiveState) -> Self {
        Snapshot::Primitive(s)
    }
}

impl From<QhState> for Snapshot {
    fn from(s: QhState) -> Self {
        Snapshot::Qh(s)
    }
}

/// Little-endian layout: magic, version, `u32 n`, `f64 t`, `f64 epsilon` (NaN for the limit system),
/// a flag byte, then the scalar, `u_x`, `u_y` and `Pi` planes, each row-major with `x` fastest.
pub fn encode_snapshot(snap: &Snapshot) -> Vec<u8> {
    let (t, eps, flag, scalar, u, pi) = match snap {
        Snapshot::Primitive(s) => (s.t, s.epsilon, 0u8, &s.a, &s.u, &s.pi),
        Snapshot::Qh(s) => (s.t, f64::NAN, 1u8, &s.r, &s.u, &s.pi),
    };
    let n = scalar.grid.n();
    let mut out = Vec::with_capacity(26 + 32 * n * n);
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&t.to_le_bytes());
    out.extend_from_slice(&eps.to_le_bytes());
    out.push(flag);
    for f in [scalar, &u.x, &u.y, pi] {
        for v in &f.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, k: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < k {
            return Err(Error::Snapshot { offset: self.bytes.len(), msg: format!("truncated while reading {what}") });
        }
        let s = &self.bytes[self.pos..self.pos + k];
        self.pos += k;
        Ok(s)
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().expect("eight bytes")))
    }

    fn field(&mut self, grid: GridSpec, what: &str) -> Result<ScalarField> {
        let mut values = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            let at = self.pos;
            let v = self.f64(what)?;
            if !v.is_finite() {
                return Err(Error::Snapshot { offset: at, msg: format!("non-finite value in {what}") });
            }
            values.push(v);
        }
        ScalarField::from_values(grid, values)
    }
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<Snapshot> {
    let mut c = Cursor { bytes, pos: 0 };
    if c.take(4, "magic")? != MAGIC {
        return Err(Error::Snapshot { offset: 0, msg: "bad magic bytes".into() });
    }
    let v = c.take(1, "version")?[0];
    if v != VERSION {
        return Err(Error::Snapshot { offset: 4, msg: format!("unsupported version {v}") });
    }
    let n = u32::from_le_bytes(c.take(4, "grid size")?.try_into().expect("four bytes")) as usize;
    let grid = GridSpec::new(n).map_err(|e| Error::Snapshot { offset: 5, msg: e.to_string() })?;
    let t = c.f64("time")?;
    if !t.is_finite() {
        return Err(Error::Snapshot { offset: 9, msg: "non-finite time".into() });
    }
    let eps = c.f64("epsilon")?;
    let flag = c.take(1, "flag")?[0];
    let scalar = c.field(grid, "scalar field")?;
    let u = VectorField { x: c.field(grid, "u_x")?, y: c.field(grid, "u_y")? };
    let pi = c.field(grid, "pressure")?;
    if c.pos != bytes.len() {
        return Err(Error::Snapshot { offset: c.pos, msg: format!("{} trailing bytes", bytes.len() - c.pos) });
    }
    match flag {
        0 if eps.is_finite() => Ok(Snapshot::Primitive(PrimitiveState { t, epsilon: eps, a: scalar, u, pi })),
        0 => Err(Error::Snapshot { offset: 17, msg: "primitive snapshot without a finite epsilon".into() }),
        1 => Ok(Snapshot::Qh(QhState { t, r: scalar, u, pi })),
        f => Err(Error::Snapshot { offset: 25, msg: format!("unknown state flag {f}") }),
    }
}

pub fn write_snapshot(snap: &Snapshot, path: &Path) -> Result<()> {
    std::fs::write(path, encode_snapshot(snap))?;
    Ok(())
}

/// Fields come back on a grid with the default dealiasing fraction.
pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    decode_snapshot(&std::fs::read(path)?)
}
