//! The PQF1 binary field format.
//!
//! Layout: one ASCII header line `PQF1 N L kind\n` with
//! `kind in {scalar, vector}`, followed by little-endian 64-bit float
//! pairs `(re, im)` in x-fastest node order; vector fields store three
//! consecutive scalar blocks.

use super::{FieldError, Grid, ScalarField, VectorField};
use num_complex::Complex64;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

/// A decoded PQF1 stream.
#[derive(Debug, Clone)]
pub enum Pqf1Payload {
    Scalar(ScalarField),
    Vector(VectorField),
}

fn write_block<W: Write>(w: &mut W, vals: &[Complex64]) -> std::io::Result<()> {
    for z in vals {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

fn read_block<R: Read>(r: &mut R, count: usize) -> Result<Vec<Complex64>, FieldError> {
    let mut buf = vec![0u8; count * 16];
    r.read_exact(&mut buf)?;
    let mut vals = Vec::with_capacity(count);
    for chunk in buf.chunks_exact(16) {
        let re = f64::from_le_bytes(chunk[0..8].try_into().unwrap());
        let im = f64::from_le_bytes(chunk[8..16].try_into().unwrap());
        vals.push(Complex64::new(re, im));
    }
    Ok(vals)
}

pub fn write_pqf1(path: &Path, payload: &Pqf1Payload) -> Result<(), FieldError> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    match payload {
        Pqf1Payload::Scalar(u) => {
            // `{}` formatting of f64 round-trips exactly
            writeln!(w, "PQF1 {} {} scalar", u.grid().n(), u.grid().len())?;
            write_block(&mut w, u.values())?;
        }
        Pqf1Payload::Vector(v) => {
            writeln!(w, "PQF1 {} {} vector", v.grid().n(), v.grid().len())?;
            for d in 0..3 {
                write_block(&mut w, v.comp(d))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_pqf1(path: &Path) -> Result<Pqf1Payload, FieldError> {
    let file = std::fs::File::open(path)?;
    let mut r = BufReader::new(file);
    let mut header = String::new();
    r.read_line(&mut header)?;
    let parts: Vec<&str> = header.trim_end_matches('\n').split(' ').collect();
    if parts.len() != 4 || parts[0] != "PQF1" {
        return Err(FieldError::BadFormat(format!("bad header {header:?}")));
    }
    let n: usize = parts[1]
        .parse()
        .map_err(|_| FieldError::BadFormat(format!("bad N {:?}", parts[1])))?;
    let len: f64 = parts[2]
        .parse()
        .map_err(|_| FieldError::BadFormat(format!("bad L {:?}", parts[2])))?;
    let grid = Grid::new(n, len)?;
    match parts[3] {
        "scalar" => {
            let vals = read_block(&mut r, grid.node_count())?;
            Ok(Pqf1Payload::Scalar(ScalarField::new(grid, vals)?))
        }
        "vector" => {
            let cx = read_block(&mut r, grid.node_count())?;
            let cy = read_block(&mut r, grid.node_count())?;
            let cz = read_block(&mut r, grid.node_count())?;
            Ok(Pqf1Payload::Vector(VectorField::new(grid, [cx, cy, cz])?))
        }
        kind => Err(FieldError::BadFormat(format!("unknown kind {kind:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_kind_errors() {
        let dir = std::env::temp_dir().join(format!("pqf1-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.pqf");
        std::fs::write(&path, b"PQXX 8 1.0 scalar\n").unwrap();
        assert!(matches!(read_pqf1(&path), Err(FieldError::BadFormat(_))));
        std::fs::write(&path, b"PQF1 8 1.0 tensor\n").unwrap();
        assert!(matches!(read_pqf1(&path), Err(FieldError::BadFormat(_))));
        std::fs::remove_dir_all(&dir).ok();
    }
}
