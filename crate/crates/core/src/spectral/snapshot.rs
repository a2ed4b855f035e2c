//! `ZKF1` binary field snapshots.
//!
//! Layout, all little-endian:
//!
//! | bytes        | content                                        |
//! |--------------|------------------------------------------------|
//! | 4            | magic `ZKF1`                                   |
//! | 4            | `u32` modes per axis `M`                       |
//! | 8            | `f64` box length `L`                           |
//! | 8            | `f64` time `t`                                 |
//! | 1            | `u8` representation (0 physical, 1 spectral)   |
//! | `16 M^2`     | `(re, im)` pairs of `f64`, row-major            |
//!
//! Rows run over the x index and columns over the y index. Spectral data uses
//! the zero-frequency-first order on both axes (see [`GridSpec`]).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::field::{Field2D, Representation};
use super::grid::GridSpec;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"ZKF1";

pub fn write_field<W: Write>(mut w: W, field: &Field2D, t: f64) -> Result<()> {
    let g = field.grid();
    w.write_all(MAGIC)?;
    w.write_all(&(g.modes() as u32).to_le_bytes())?;
    w.write_all(&g.length().to_le_bytes())?;
    w.write_all(&t.to_le_bytes())?;
    w.write_all(&[field.representation().tag()])?;
    for z in field.data() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_field<R: Read>(mut r: R) -> Result<(Field2D, f64)> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Snapshot(format!("bad magic {magic:?}")));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4)?;
    let modes = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b8)?;
    let length = f64::from_le_bytes(b8);
    r.read_exact(&mut b8)?;
    let t = f64::from_le_bytes(b8);
    let mut tag = [0u8; 1];
    r.read_exact(&mut tag)?;
    let repr = Representation::from_tag(tag[0])
        .ok_or_else(|| Error::Snapshot(format!("unknown representation tag {}", tag[0])))?;
    let grid = GridSpec::new(modes, length).map_err(|e| Error::Snapshot(e.to_string()))?;
    let mut data = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        r.read_exact(&mut b8)?;
        let re = f64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let im = f64::from_le_bytes(b8);
        data.push(Complex64::new(re, im));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Snapshot("trailing bytes after field data".into()));
    }
    Ok((Field2D::from_parts(grid, data, repr)?, t))
}

pub fn save(path: impl AsRef<Path>, field: &Field2D, t: f64) -> Result<()> {
    write_field(BufWriter::new(File::create(path)?), field, t)
}

pub fn load(path: impl AsRef<Path>) -> Result<(Field2D, f64)> {
    read_field(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_is_fixed() {
        let g = GridSpec::new(8, 2.5).unwrap();
        let f = Field2D::constant(g, Complex64::new(1.5, -2.0));
        let mut buf = Vec::new();
        write_field(&mut buf, &f, 0.25).unwrap();
        assert_eq!(buf.len(), 4 + 4 + 8 + 8 + 1 + 16 * 64);
        assert_eq!(&buf[0..4], b"ZKF1");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 8);
        assert_eq!(f64::from_le_bytes(buf[8..16].try_into().unwrap()), 2.5);
        assert_eq!(f64::from_le_bytes(buf[16..24].try_into().unwrap()), 0.25);
        assert_eq!(buf[24], 0);
        assert_eq!(f64::from_le_bytes(buf[25..33].try_into().unwrap()), 1.5);
        assert_eq!(f64::from_le_bytes(buf[33..41].try_into().unwrap()), -2.0);
    }

    #[test]
    fn rejects_corrupt_input() {
        let g = GridSpec::new(8, 1.0).unwrap();
        let f = Field2D::zeros(g, Representation::Spectral);
        let mut buf = Vec::new();
        write_field(&mut buf, &f, 0.0).unwrap();

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(read_field(&bad[..]).is_err());

        let mut bad = buf.clone();
        bad[24] = 7;
        assert!(read_field(&bad[..]).is_err());

        assert!(read_field(&buf[..buf.len() - 1]).is_err());

        let mut bad = buf.clone();
        bad.push(0);
        assert!(read_field(&bad[..]).is_err());

        let (back, t) = read_field(&buf[..]).unwrap();
        assert_eq!(back, f);
        assert_eq!(t, 0.0);
    }
}
