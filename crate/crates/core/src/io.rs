//! File formats: VFLD binary fields, PGM masks, density CSV and JSON reports.
//!
//! VFLD layout (little endian):
//!
//! ```text
//! b"VFLD"  u32 nx  u32 ny  f64 dx  f64 dy  u32 ncomp
//! ncomp × nx·ny × (f64 re, f64 im)   row-major, component after component
//! ```

use crate::dirac::DensityCurves;
use crate::error::{Result, VortexError};
use crate::grid::{ComplexField, GridSpec};
use crate::holography::HologramMask;
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::io::{Read, Write};

pub const VFLD_MAGIC: &[u8; 4] = b"VFLD";
pub const MAX_COMPONENTS: u32 = 16;

pub fn write_vfld<W: Write>(mut w: W, components: &[ComplexField]) -> Result<()> {
    let Some(first) = components.first() else {
        return Err(VortexError::InvalidParameter(
            "no components to write".into(),
        ));
    };
    let g = *first.grid();
    for c in components {
        g.ensure_matches(c.grid())?;
    }
    let mut buf = Vec::with_capacity(32 + components.len() * g.len() * 16);
    buf.extend_from_slice(VFLD_MAGIC);
    buf.extend_from_slice(&(g.nx as u32).to_le_bytes());
    buf.extend_from_slice(&(g.ny as u32).to_le_bytes());
    buf.extend_from_slice(&g.dx.to_le_bytes());
    buf.extend_from_slice(&g.dy.to_le_bytes());
    buf.extend_from_slice(&(components.len() as u32).to_le_bytes());
    for c in components {
        for v in c.values() {
            buf.extend_from_slice(&v.re.to_le_bytes());
            buf.extend_from_slice(&v.im.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

fn format_err(msg: impl Into<String>) -> VortexError {
    VortexError::Format(msg.into())
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.data.len());
        let end = end.ok_or_else(|| format_err("truncated VFLD data"))?;
        let s = &self.data[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn read_vfld<R: Read>(mut r: R) -> Result<Vec<ComplexField>> {
    let mut data = Vec::new();
    r.read_to_end(&mut data)?;
    let mut cur = Cursor {
        data: &data,
        pos: 0,
    };
    if cur.take(4)? != VFLD_MAGIC {
        return Err(format_err("missing VFLD magic"));
    }
    let nx = cur.u32()? as usize;
    let ny = cur.u32()? as usize;
    let dx = cur.f64()?;
    let dy = cur.f64()?;
    let ncomp = cur.u32()?;
    if ncomp == 0 || ncomp > MAX_COMPONENTS {
        return Err(format_err(format!("component count {ncomp} out of range")));
    }
    let grid = GridSpec::new(nx, ny, dx, dy).map_err(|e| format_err(e.to_string()))?;
    let expected = (ncomp as usize)
        .checked_mul(grid.len())
        .and_then(|v| v.checked_mul(16))
        .ok_or_else(|| format_err("VFLD size overflows"))?;
    if data.len() - cur.pos != expected {
        return Err(format_err(format!(
            "expected {expected} payload bytes, found {}",
            data.len() - cur.pos
        )));
    }
    let mut out = Vec::with_capacity(ncomp as usize);
    for _ in 0..ncomp {
        let mut values = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            values.push(C64::new(cur.f64()?, cur.f64()?));
        }
        out.push(ComplexField::new(grid, values).map_err(|e| format_err(e.to_string()))?);
    }
    Ok(out)
}

/// Binary greyscale PGM (P5). Binary masks map 1 to 255; graded masks are
/// scaled by their maximum.
pub fn write_pgm<W: Write>(mut w: W, mask: &HologramMask) -> Result<()> {
    let g = mask.grid();
    let t = mask.transmission();
    let max = t.iter().copied().fold(0.0, f64::max);
    let scale = if max > 0.0 { 255.0 / max } else { 0.0 };
    let mut buf = format!("P5\n{} {}\n255\n", g.nx, g.ny).into_bytes();
    buf.extend(
        t.iter()
            .map(|v| (v * scale).round().clamp(0.0, 255.0) as u8),
    );
    w.write_all(&buf)?;
    Ok(())
}

/// Reads a P5 PGM into `(width, height, pixels)`.
pub fn read_pgm<R: Read>(mut r: R) -> Result<(usize, usize, Vec<u8>)> {
    let mut data = Vec::new();
    r.read_to_end(&mut data)?;
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < data.len() && data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < data.len() && data[pos] == b'#' {
            while pos < data.len() && data[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < data.len() && !data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(format_err("truncated PGM header"));
        }
        fields.push(String::from_utf8_lossy(&data[start..pos]).into_owned());
    }
    pos += 1;
    if fields[0] != "P5" || fields[3] != "255" {
        return Err(format_err("only 8-bit binary PGM (P5) is supported"));
    }
    let parse = |s: &str| s.parse::<usize>().map_err(|_| format_err("bad PGM size"));
    let (w, h) = (parse(&fields[1])?, parse(&fields[2])?);
    let pixels = data.get(pos..).unwrap_or_default();
    if pixels.len() != w * h {
        return Err(format_err("PGM pixel count does not match header"));
    }
    Ok((w, h, pixels.to_vec()))
}

pub fn write_density_csv<W: Write>(mut w: W, curves: &DensityCurves) -> Result<()> {
    let mut s = String::from("r_pm,rho_full,rho_first_term\n");
    for i in 0..curves.r_pm.len() {
        s.push_str(&format!(
            "{:e},{:e},{:e}\n",
            curves.r_pm[i], curves.rho_full[i], curves.rho_first_term[i]
        ));
    }
    w.write_all(s.as_bytes())?;
    Ok(())
}

pub fn write_json<W: Write, T: Serialize>(mut w: W, value: &T) -> Result<()> {
    let s = serde_json::to_string_pretty(value).map_err(|e| format_err(e.to_string()))?;
    w.write_all(s.as_bytes())?;
    w.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holography::synthesize_scalar_mask;

    #[test]
    fn vfld_roundtrip_is_bit_exact() {
        let g = GridSpec::new(16, 32, 0.25, 0.5).unwrap();
        let a = ComplexField::from_fn(g, |x, y| C64::new(x.sin(), y * 1e-300));
        let b = ComplexField::from_fn(g, |x, y| C64::new(-x * y, f64::MIN_POSITIVE));
        let mut buf = Vec::new();
        write_vfld(&mut buf, &[a.clone(), b.clone()]).unwrap();
        assert_eq!(buf.len(), 32 + 2 * g.len() * 16);
        let back = read_vfld(&buf[..]).unwrap();
        assert_eq!(back, vec![a, b]);
    }

    #[test]
    fn vfld_rejects_garbage() {
        assert!(matches!(
            read_vfld(&b"NOPE"[..]),
            Err(VortexError::Format(_))
        ));
        let g = GridSpec::square(16, 1.0).unwrap();
        let mut buf = Vec::new();
        write_vfld(&mut buf, &[ComplexField::zeros(g)]).unwrap();
        buf.pop();
        assert!(matches!(read_vfld(&buf[..]), Err(VortexError::Format(_))));
        let mut nan = Vec::new();
        write_vfld(&mut nan, &[ComplexField::zeros(g)]).unwrap();
        let at = nan.len() - 8;
        nan[at..].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(matches!(read_vfld(&nan[..]), Err(VortexError::Format(_))));
    }

    #[test]
    fn pgm_roundtrip() {
        let g = GridSpec::square(64, 1.0).unwrap();
        let m = synthesize_scalar_mask(1, 0.5, 20.0, &g, true).unwrap();
        let mut buf = Vec::new();
        write_pgm(&mut buf, &m).unwrap();
        let (w, h, px) = read_pgm(&buf[..]).unwrap();
        assert_eq!((w, h), (64, 64));
        for (p, t) in px.iter().zip(m.transmission()) {
            assert_eq!(*p as f64, t * 255.0);
        }
    }

    #[test]
    fn csv_header_and_rows() {
        let c = DensityCurves {
            r_pm: vec![0.0, 1.0],
            rho_full: vec![1.0, 2.0],
            rho_first_term: vec![0.5, 1.5],
        };
        let mut buf = Vec::new();
        write_density_csv(&mut buf, &c).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines[0], "r_pm,rho_full,rho_first_term");
        assert_eq!(lines.len(), 3);
        let v: Vec<f64> = lines[2].split(',').map(|t| t.parse().unwrap()).collect();
        assert_eq!(v, vec![1.0, 2.0, 1.5]);
    }
}
