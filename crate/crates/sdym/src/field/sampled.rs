//! Grid-sampled complex scalar fields with fourth-order central stencils.

use super::grid::{Grid, Point};
use super::{C, FieldError, Result};
use crate::expr::Var;
use rayon::prelude::*;
use std::sync::Arc;

/// A complex scalar sampled on a full grid. `margin` counts boundary cells
/// whose values are not trusted (each stencil application grows it by 2).
#[derive(Clone)]
pub struct SampledScalar {
    pub grid: Arc<Grid>,
    pub vals: Arc<Vec<C>>,
    pub margin: usize,
}

/// Fourth-order central first-derivative stencil coefficients for offsets
/// `[-2, -1, +1, +2]` (divide by h).
pub const STENCIL4: [(isize, f64); 4] = [
    (-2, 1.0 / 12.0),
    (-1, -8.0 / 12.0),
    (1, 8.0 / 12.0),
    (2, -1.0 / 12.0),
];

impl SampledScalar {
    pub fn from_fn(
        grid: Arc<Grid>,
        margin: usize,
        f: impl Fn(&Point) -> Result<C> + Sync,
    ) -> Result<SampledScalar> {
        let vals: Vec<Result<C>> = (0..grid.len())
            .into_par_iter()
            .map(|fl| f(&grid.point(grid.unflat(fl))))
            .collect();
        let mut out = Vec::with_capacity(vals.len());
        for (fl, v) in vals.into_iter().enumerate() {
            match v {
                Ok(v) => out.push(v),
                Err(e) => {
                    // Values outside the interior margin may be singular; they
                    // are never read, so store NaN there instead of failing.
                    if grid.is_interior(grid.unflat(fl), margin) {
                        return Err(e);
                    }
                    out.push(C::new(f64::NAN, f64::NAN));
                }
            }
        }
        Ok(SampledScalar {
            grid,
            vals: Arc::new(out),
            margin,
        })
    }

    pub fn constant(grid: Arc<Grid>, v: C) -> SampledScalar {
        SampledScalar {
            vals: Arc::new(vec![v; grid.len()]),
            grid,
            margin: 0,
        }
    }

    pub fn same_grid(&self, other: &SampledScalar) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    /// Value at a grid point by flat index.
    pub fn at(&self, flat: usize) -> C {
        self.vals[flat]
    }

    /// Axis-direction derivative (real coordinate x_{axis+1}), fourth order.
    pub fn d_axis(&self, axis: usize) -> SampledScalar {
        let n = self.grid.n;
        let stride = self.grid.stride(axis);
        let h = self.grid.h[axis];
        let src = &self.vals;
        let grid = self.grid.clone();
        let vals: Vec<C> = (0..grid.len())
            .into_par_iter()
            .map(|fl| {
                let idx = grid.unflat(fl);
                if idx[axis] < 2 || idx[axis] + 2 >= n {
                    return C::new(f64::NAN, f64::NAN);
                }
                let mut acc = C::new(0.0, 0.0);
                for (off, coef) in STENCIL4 {
                    let j = (fl as isize + off * stride as isize) as usize;
                    acc += coef * src[j];
                }
                acc / h
            })
            .collect();
        SampledScalar {
            grid,
            vals: Arc::new(vals),
            margin: self.margin + 2,
        }
    }

    /// Wirtinger derivative via the real-axis stencils.
    pub fn derive(&self, v: Var) -> SampledScalar {
        let i = C::new(0.0, 1.0);
        let (a, b, sign) = match v {
            Var::Z => (0, 1, -1.0),
            Var::Zt => (0, 1, 1.0),
            Var::W => (2, 3, -1.0),
            Var::Wt => (2, 3, 1.0),
        };
        let da = self.d_axis(a);
        let db = self.d_axis(b);
        let vals: Vec<C> = da
            .vals
            .par_iter()
            .zip(db.vals.par_iter())
            .map(|(x, y)| 0.5 * (x + sign * i * y))
            .collect();
        SampledScalar {
            grid: self.grid.clone(),
            vals: Arc::new(vals),
            margin: self.margin + 2,
        }
    }

    pub fn map(&self, f: impl Fn(C) -> C + Sync) -> SampledScalar {
        SampledScalar {
            grid: self.grid.clone(),
            vals: Arc::new(self.vals.par_iter().map(|v| f(*v)).collect()),
            margin: self.margin,
        }
    }

    pub fn zip(
        &self,
        other: &SampledScalar,
        f: impl Fn(C, C) -> C + Sync,
    ) -> Result<SampledScalar> {
        if !self.same_grid(other) {
            return Err(FieldError::GridMismatch);
        }
        Ok(SampledScalar {
            grid: self.grid.clone(),
            vals: Arc::new(
                self.vals
                    .par_iter()
                    .zip(other.vals.par_iter())
                    .map(|(a, b)| f(*a, *b))
                    .collect(),
            ),
            margin: self.margin.max(other.margin),
        })
    }

    /// Maximum modulus over interior points.
    pub fn max_norm(&self) -> Result<f64> {
        let idx = self.grid.interior_indices(self.margin);
        if idx.is_empty() {
            return Err(FieldError::EmptyInterior(self.margin));
        }
        Ok(idx
            .par_iter()
            .map(|&f| self.vals[f].norm())
            .reduce(|| 0.0, f64::max))
    }
}
