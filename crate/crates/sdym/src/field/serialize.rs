//! Binary and CSV serialization of sampled fields.
//!
//! Binary layout (all integers and floats little-endian):
//!
//! ```text
//! magic   : 8 bytes  "SDYMFLD1"
//! n       : u32      points per axis
//! margin  : u32
//! rows    : u32      matrix dimensions (1x1 for a scalar)
//! cols    : u32
//! bounds  : 8 x f64  chart box [min,max] per axis
//! excl    : u8       0 = none, 1 = rho-min (followed by f64 rho2_min)
//! data    : rows*cols*n^4 x (f64 re, f64 im), entry-major then row-major
//!           over grid points (axis 4 fastest)
//! ```

use super::grid::{ChartBox, Exclusion, Grid, GridSpec};
use super::sampled::SampledScalar;
use super::{C, FieldError, MatrixField, Result, ScalarField};
use std::io::{Read, Write};
use std::sync::Arc;

const MAGIC: &[u8; 8] = b"SDYMFLD1";

pub fn write_matrix<W: Write>(w: &mut W, m: &MatrixField, grid: &Arc<Grid>) -> Result<()> {
    let sampled: Vec<SampledScalar> = m
        .entries()
        .iter()
        .map(|e| e.sample(grid, 0))
        .collect::<Result<_>>()?;
    let margin = sampled.iter().map(|s| s.margin).max().unwrap_or(0);
    w.write_all(MAGIC)?;
    w.write_all(&(grid.n as u32).to_le_bytes())?;
    w.write_all(&(margin as u32).to_le_bytes())?;
    w.write_all(&(m.rows as u32).to_le_bytes())?;
    w.write_all(&(m.cols as u32).to_le_bytes())?;
    for k in 0..4 {
        for b in 0..2 {
            w.write_all(&grid.chart.bounds[k][b].to_le_bytes())?;
        }
    }
    match grid.chart.exclusion {
        Exclusion::None => w.write_all(&[0u8])?,
        Exclusion::RhoMin(r2) => {
            w.write_all(&[1u8])?;
            w.write_all(&r2.to_le_bytes())?;
        }
    }
    for s in &sampled {
        for v in s.vals.iter() {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_matrix<R: Read>(r: &mut R) -> Result<(MatrixField, Arc<Grid>)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(FieldError::Format("bad magic".into()));
    }
    let mut u32buf = [0u8; 4];
    let mut read_u32 = |r: &mut R| -> Result<u32> {
        r.read_exact(&mut u32buf)?;
        Ok(u32::from_le_bytes(u32buf))
    };
    let n = read_u32(r)? as usize;
    let margin = read_u32(r)? as usize;
    let rows = read_u32(r)? as usize;
    let cols = read_u32(r)? as usize;
    let mut f64buf = [0u8; 8];
    let mut read_f64 = |r: &mut R| -> Result<f64> {
        r.read_exact(&mut f64buf)?;
        Ok(f64::from_le_bytes(f64buf))
    };
    let mut bounds = [[0.0; 2]; 4];
    for k in 0..4 {
        for b in 0..2 {
            bounds[k][b] = read_f64(r)?;
        }
    }
    let mut tag = [0u8; 1];
    r.read_exact(&mut tag)?;
    let exclusion = match tag[0] {
        0 => Exclusion::None,
        1 => Exclusion::RhoMin(read_f64(r)?),
        t => return Err(FieldError::Format(format!("bad exclusion tag {t}"))),
    };
    let chart = ChartBox { bounds, exclusion };
    let grid = Grid::new(chart, GridSpec::new(n))?;
    let len = grid.len();
    let mut entries = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        let mut vals = Vec::with_capacity(len);
        for _ in 0..len {
            let re = read_f64(r)?;
            let im = read_f64(r)?;
            vals.push(C::new(re, im));
        }
        entries.push(ScalarField::Sampled(SampledScalar {
            grid: grid.clone(),
            vals: Arc::new(vals),
            margin,
        }));
    }
    Ok((MatrixField::from_entries(rows, cols, entries), grid))
}

/// CSV export: one line per interior grid point,
/// `x1,x2,x3,x4,re(e00),im(e00),re(e01),...`.
pub fn write_csv<W: Write>(w: &mut W, m: &MatrixField, grid: &Arc<Grid>) -> Result<()> {
    let sampled: Vec<SampledScalar> = m
        .entries()
        .iter()
        .map(|e| e.sample(grid, 0))
        .collect::<Result<_>>()?;
    let margin = sampled.iter().map(|s| s.margin).max().unwrap_or(0);
    write!(w, "x1,x2,x3,x4")?;
    for r in 0..m.rows {
        for c in 0..m.cols {
            write!(w, ",re_{r}{c},im_{r}{c}")?;
        }
    }
    writeln!(w)?;
    for fl in grid.interior_indices(margin) {
        let p = grid.point(grid.unflat(fl));
        write!(w, "{:?},{:?},{:?},{:?}", p.x[0], p.x[1], p.x[2], p.x[3])?;
        for s in &sampled {
            let v = s.at(fl);
            write!(w, ",{:?},{:?}", v.re, v.im)?;
        }
        writeln!(w)?;
    }
    Ok(())
}
