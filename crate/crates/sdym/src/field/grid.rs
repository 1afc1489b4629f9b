//! Points, chart boxes and uniform grids on the real slice.

use super::{C, FieldError, Result};
use crate::expr::VarVals;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// A point of the real slice, in real coordinates `(x1, x2, x3, x4)` with
/// `z = x1 + i x2`, `w = x3 + i x4`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: [f64; 4],
}

impl Point {
    pub fn new(x: [f64; 4]) -> Point {
        Point { x }
    }

    pub fn z(&self) -> C {
        C::new(self.x[0], self.x[1])
    }

    pub fn w(&self) -> C {
        C::new(self.x[2], self.x[3])
    }

    /// Values of `(z, w, zt, wt)` at this real point.
    pub fn vals(&self) -> VarVals {
        let z = self.z();
        let w = self.w();
        [z, w, z.conj(), w.conj()]
    }

    pub fn rho2(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum()
    }
}

/// Region excluded from a chart (beyond the box bounds).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
pub enum Exclusion {
    #[default]
    None,
    /// Exclude points with `rho^2 = |z|^2 + |w|^2 < rho2_min` (charts for
    /// metrics singular at the origin).
    RhoMin(f64),
}

/// An axis-aligned box in real coordinates with an optional excluded region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartBox {
    /// `[min, max]` per axis.
    pub bounds: [[f64; 2]; 4],
    pub exclusion: Exclusion,
}

impl ChartBox {
    pub fn cube(min: f64, max: f64) -> ChartBox {
        ChartBox {
            bounds: [[min, max]; 4],
            exclusion: Exclusion::None,
        }
    }

    pub fn with_rho_min(mut self, rho2_min: f64) -> ChartBox {
        self.exclusion = Exclusion::RhoMin(rho2_min);
        self
    }

    pub fn contains(&self, p: &Point) -> bool {
        for k in 0..4 {
            if p.x[k] < self.bounds[k][0] || p.x[k] > self.bounds[k][1] {
                return false;
            }
        }
        match self.exclusion {
            Exclusion::None => true,
            Exclusion::RhoMin(r2) => p.rho2() >= r2,
        }
    }

    pub fn center(&self) -> Point {
        let mut x = [0.0; 4];
        for k in 0..4 {
            x[k] = 0.5 * (self.bounds[k][0] + self.bounds[k][1]);
        }
        Point::new(x)
    }

    pub fn widths(&self) -> [f64; 4] {
        let mut w = [0.0; 4];
        for k in 0..4 {
            w[k] = self.bounds[k][1] - self.bounds[k][0];
        }
        w
    }
}

/// Grid resolution and interior margin. `n` points per axis (odd so the
/// chart center is a grid point); stencils of half-width 2 eat two cells of
/// margin per derivative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub margin: usize,
}

impl GridSpec {
    pub fn new(n: usize) -> GridSpec {
        GridSpec { n, margin: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 9 {
            return Err(FieldError::BadGrid(format!(
                "grid needs n >= 9 points per axis, got {}",
                self.n
            )));
        }
        if self.n % 2 == 0 {
            return Err(FieldError::BadGrid(format!("grid n must be odd, got {}", self.n)));
        }
        Ok(())
    }
}

/// A uniform grid over a chart box. Values indexed by `(i1, i2, i3, i4)`
/// flattened row-major (axis 4 fastest).
#[derive(Debug, PartialEq)]
pub struct Grid {
    pub chart: ChartBox,
    pub n: usize,
    pub h: [f64; 4],
}

impl Grid {
    pub fn new(chart: ChartBox, spec: GridSpec) -> Result<Arc<Grid>> {
        spec.validate()?;
        let mut h = [0.0; 4];
        for k in 0..4 {
            h[k] = (chart.bounds[k][1] - chart.bounds[k][0]) / (spec.n - 1) as f64;
        }
        Ok(Arc::new(Grid { chart, n: spec.n, h }))
    }

    pub fn len(&self) -> usize {
        self.n.pow(4)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, idx: [usize; 4]) -> Point {
        let mut x = [0.0; 4];
        for k in 0..4 {
            x[k] = self.chart.bounds[k][0] + self.h[k] * idx[k] as f64;
        }
        Point::new(x)
    }

    pub fn flat(&self, idx: [usize; 4]) -> usize {
        ((idx[0] * self.n + idx[1]) * self.n + idx[2]) * self.n + idx[3]
    }

    pub fn unflat(&self, mut f: usize) -> [usize; 4] {
        let n = self.n;
        let i4 = f % n;
        f /= n;
        let i3 = f % n;
        f /= n;
        let i2 = f % n;
        f /= n;
        [f, i2, i3, i4]
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.n.pow(3 - axis as u32)
    }

    /// Max grid spacing (used in `h^4` tolerances).
    pub fn h_max(&self) -> f64 {
        self.h.iter().cloned().fold(0.0, f64::max)
    }

    pub fn is_interior(&self, idx: [usize; 4], margin: usize) -> bool {
        idx.iter().all(|&i| i >= margin && i + margin < self.n)
    }

    /// Flattened indices of the interior (margin-respecting) points.
    pub fn interior_indices(&self, margin: usize) -> Vec<usize> {
        let n = self.n;
        if 2 * margin >= n {
            return Vec::new();
        }
        let mut out = Vec::new();
        for i1 in margin..n - margin {
            for i2 in margin..n - margin {
                for i3 in margin..n - margin {
                    for i4 in margin..n - margin {
                        out.push(self.flat([i1, i2, i3, i4]));
                    }
                }
            }
        }
        out
    }

    pub fn interior_points(&self, margin: usize) -> Vec<Point> {
        self.interior_indices(margin)
            .into_iter()
            .map(|f| self.point(self.unflat(f)))
            .collect()
    }

    pub fn all_points(&self) -> Vec<Point> {
        (0..self.len()).map(|f| self.point(self.unflat(f))).collect()
    }
}

/// A sparse evaluation lattice for analytic pipelines: `m` points per axis
/// across the chart box interior (no stencil needed, so no margin).
pub fn sample_lattice(chart: &ChartBox, m: usize) -> Vec<Point> {
    let mut pts = Vec::new();
    let mut x = [0.0; 4];
    let frac = |k: usize, i: usize| {
        let t = (i as f64 + 0.5) / m as f64;
        chart.bounds[k][0] + t * (chart.bounds[k][1] - chart.bounds[k][0])
    };
    for i1 in 0..m {
        x[0] = frac(0, i1);
        for i2 in 0..m {
            x[1] = frac(1, i2);
            for i3 in 0..m {
                x[2] = frac(2, i3);
                for i4 in 0..m {
                    x[3] = frac(3, i4);
                    let p = Point::new(x);
                    if chart.contains(&p) {
                        pts.push(p);
                    }
                }
            }
        }
    }
    pts
}
