//! Dense matrix-valued fields (entries are [`ScalarField`]s).

use super::grid::{Grid, Point};
use super::scalar::ScalarField;
use super::{C, FieldError, Result};
use crate::expr::{Expr, Var};
use nalgebra::DMatrix;
use std::sync::Arc;

#[derive(Clone)]
pub struct MatrixField {
    pub rows: usize,
    pub cols: usize,
    data: Vec<ScalarField>,
}

impl MatrixField {
    pub fn from_entries(rows: usize, cols: usize, data: Vec<ScalarField>) -> MatrixField {
        assert_eq!(data.len(), rows * cols);
        MatrixField { rows, cols, data }
    }

    pub fn from_exprs(rows: usize, cols: usize, data: Vec<Expr>) -> MatrixField {
        MatrixField::from_entries(
            rows,
            cols,
            data.into_iter().map(ScalarField::Analytic).collect(),
        )
    }

    pub fn zeros(rows: usize, cols: usize) -> MatrixField {
        MatrixField::from_entries(rows, cols, vec![ScalarField::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> MatrixField {
        let mut m = MatrixField::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = ScalarField::one();
        }
        m
    }

    pub fn scalar(f: ScalarField) -> MatrixField {
        MatrixField::from_entries(1, 1, vec![f])
    }

    pub fn at(&self, r: usize, c: usize) -> &ScalarField {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut ScalarField {
        &mut self.data[r * self.cols + c]
    }

    pub fn entries(&self) -> &[ScalarField] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> MatrixField {
        MatrixField::from_entries(self.rows, self.cols, self.data.iter().map(f).collect())
    }

    pub fn try_map(
        &self,
        f: impl Fn(&ScalarField) -> Result<ScalarField>,
    ) -> Result<MatrixField> {
        let data: Result<Vec<_>> = self.data.iter().map(f).collect();
        Ok(MatrixField::from_entries(self.rows, self.cols, data?))
    }

    pub fn transpose(&self) -> MatrixField {
        let mut data = Vec::with_capacity(self.rows * self.cols);
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.at(r, c).clone());
            }
        }
        MatrixField::from_entries(self.cols, self.rows, data)
    }

    pub fn add(&self, rhs: &MatrixField) -> Result<MatrixField> {
        self.zip(rhs, |a, b| a.add(b))
    }

    pub fn sub(&self, rhs: &MatrixField) -> Result<MatrixField> {
        self.zip(rhs, |a, b| a.sub(b))
    }

    fn zip(
        &self,
        rhs: &MatrixField,
        f: impl Fn(&ScalarField, &ScalarField) -> Result<ScalarField>,
    ) -> Result<MatrixField> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(FieldError::Dim(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let data: Result<Vec<_>> = self
            .data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(MatrixField::from_entries(self.rows, self.cols, data?))
    }

    pub fn matmul(&self, rhs: &MatrixField) -> Result<MatrixField> {
        if self.cols != rhs.rows {
            return Err(FieldError::Dim(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut data = Vec::with_capacity(self.rows * rhs.cols);
        for r in 0..self.rows {
            for c in 0..rhs.cols {
                let mut acc = ScalarField::zero();
                for k in 0..self.cols {
                    acc = acc.add(&self.at(r, k).mul(rhs.at(k, c))?)?;
                }
                data.push(acc);
            }
        }
        Ok(MatrixField::from_entries(self.rows, rhs.cols, data))
    }

    pub fn commutator(&self, rhs: &MatrixField) -> Result<MatrixField> {
        self.matmul(rhs)?.sub(&rhs.matmul(self)?)
    }

    pub fn scale_field(&self, s: &ScalarField) -> Result<MatrixField> {
        self.try_map(|e| s.mul(e))
    }

    pub fn neg(&self) -> MatrixField {
        self.map(|e| e.neg())
    }

    pub fn trace(&self) -> Result<ScalarField> {
        let mut acc = ScalarField::zero();
        for i in 0..self.rows.min(self.cols) {
            acc = acc.add(self.at(i, i))?;
        }
        Ok(acc)
    }

    pub fn derive(&self, v: Var) -> Result<MatrixField> {
        self.try_map(|e| e.derive(v))
    }

    pub fn conj(&self) -> MatrixField {
        self.map(|e| e.conj())
    }

    pub fn all_analytic(&self) -> bool {
        self.data.iter().all(|e| matches!(e, ScalarField::Analytic(_)))
    }

    pub fn eval_at(&self, p: &Point) -> Result<DMatrix<C>> {
        let mut cache = std::collections::HashMap::new();
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m[(r, c)] = self.at(r, c).eval_cached(p, &mut cache)?;
            }
        }
        Ok(m)
    }

    /// Pointwise inverse. Symbolic (adjugate/determinant) when all entries
    /// are analytic and `n <= 4`; otherwise pointwise LU on the given grid.
    pub fn inverse(&self, grid: Option<&Arc<Grid>>) -> Result<MatrixField> {
        if !self.is_square() {
            return Err(FieldError::Dim("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        if self.all_analytic() && n <= 4 {
            let exprs: Vec<Expr> = self
                .data
                .iter()
                .map(|e| e.as_expr().unwrap().clone())
                .collect();
            let det = det_expr(&exprs, n);
            let mut data = Vec::with_capacity(n * n);
            for r in 0..n {
                for c in 0..n {
                    // adj(M)[r][c] = (-1)^{r+c} * minor(c, r)
                    let m = minor_expr(&exprs, n, c, r);
                    let signed = if (r + c) % 2 == 0 { m } else { m.neg() };
                    data.push(ScalarField::Analytic(signed.div(&det)));
                }
            }
            return Ok(MatrixField::from_entries(n, n, data));
        }
        // Sampled path: find (or require) a grid, sample everything, invert
        // pointwise.
        let grid = match grid {
            Some(g) => g.clone(),
            None => self
                .data
                .iter()
                .find_map(|e| match e {
                    ScalarField::Sampled(s) => Some(s.grid.clone()),
                    _ => None,
                })
                .ok_or_else(|| {
                    FieldError::Other(
                        "matrix inverse needs a grid (symbolic path supports n <= 4)".into(),
                    )
                })?,
        };
        let mut margin = 0usize;
        let mut sampled = Vec::with_capacity(n * n);
        for e in &self.data {
            let s = e.sample(&grid, margin)?;
            margin = margin.max(s.margin);
            sampled.push(s);
        }
        use rayon::prelude::*;
        let len = grid.len();
        let inv_pts: Vec<Result<Vec<C>>> = (0..len)
            .into_par_iter()
            .map(|fl| {
                let idx = grid.unflat(fl);
                let mut m = DMatrix::<C>::zeros(n, n);
                for r in 0..n {
                    for c in 0..n {
                        m[(r, c)] = sampled[r * n + c].at(fl);
                    }
                }
                if m.iter().any(|v| v.re.is_nan() || v.im.is_nan()) {
                    return Ok(vec![C::new(f64::NAN, f64::NAN); n * n]);
                }
                match m.clone().try_inverse() {
                    Some(inv) => {
                        let mut out = Vec::with_capacity(n * n);
                        for r in 0..n {
                            for c in 0..n {
                                out.push(inv[(r, c)]);
                            }
                        }
                        Ok(out)
                    }
                    None => {
                        if grid.is_interior(idx, margin) {
                            Err(FieldError::SingularMatrix(grid.point(idx).x))
                        } else {
                            Ok(vec![C::new(f64::NAN, f64::NAN); n * n])
                        }
                    }
                }
            })
            .collect();
        let mut entry_vals: Vec<Vec<C>> = vec![Vec::with_capacity(len); n * n];
        for pt in inv_pts {
            let pt = pt?;
            for (k, v) in pt.into_iter().enumerate() {
                entry_vals[k].push(v);
            }
        }
        let data = entry_vals
            .into_iter()
            .map(|vals| {
                ScalarField::Sampled(super::sampled::SampledScalar {
                    grid: grid.clone(),
                    vals: Arc::new(vals),
                    margin,
                })
            })
            .collect();
        Ok(MatrixField::from_entries(n, n, data))
    }

    /// Sample every entry onto a grid.
    pub fn sample(&self, grid: &Arc<Grid>, margin: usize) -> Result<MatrixField> {
        self.try_map(|e| Ok(ScalarField::Sampled(e.sample(grid, margin)?)))
    }

    /// Max over entries of the entry max-norm.
    pub fn max_norm(&self, points: &[Point]) -> Result<f64> {
        let mut m: f64 = 0.0;
        for e in &self.data {
            m = m.max(e.max_norm(points)?);
        }
        Ok(m)
    }
}

fn minor_expr(entries: &[Expr], n: usize, skip_r: usize, skip_c: usize) -> Expr {
    let sub: Vec<Expr> = (0..n)
        .filter(|r| *r != skip_r)
        .flat_map(|r| {
            (0..n)
                .filter(|c| *c != skip_c)
                .map(move |c| entries[r * n + c].clone())
        })
        .collect();
    det_expr(&sub, n - 1)
}

pub(crate) fn det_expr(entries: &[Expr], n: usize) -> Expr {
    match n {
        0 => Expr::one(),
        1 => entries[0].clone(),
        2 => entries[0]
            .mul(&entries[3])
            .sub(&entries[1].mul(&entries[2])),
        _ => {
            let mut acc = Expr::zero();
            for c in 0..n {
                let term = entries[c].mul(&minor_expr(entries, n, 0, c));
                acc = if c % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}
