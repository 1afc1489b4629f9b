//! Scalar fields: analytic (symbolic), closure-backed (pointwise exact with
//! optional stored first derivatives) and grid-sampled backends behind one
//! interface.

use super::grid::{Grid, Point};
use super::sampled::SampledScalar;
use super::{C, FieldError, Result};
use crate::expr::{Expr, Var};
use std::collections::HashMap;
use std::sync::Arc;

pub type ClosureFn = dyn Fn(&Point) -> Result<C> + Send + Sync;

/// Pointwise-exact field given by a closure, with optional stored first
/// Wirtinger derivatives (order `z, w, zt, wt`). Produced by solvers whose
/// output is known pointwise together with its gradient (e.g. the auxiliary
/// scalar integration).
#[derive(Clone)]
pub struct ClosureField {
    pub f: Arc<ClosureFn>,
    pub d: Option<Arc<[ScalarField; 4]>>,
}

#[derive(Clone)]
pub enum ScalarField {
    Analytic(Expr),
    Closure(ClosureField),
    Sampled(SampledScalar),
}

impl From<Expr> for ScalarField {
    fn from(e: Expr) -> Self {
        ScalarField::Analytic(e)
    }
}

impl From<SampledScalar> for ScalarField {
    fn from(s: SampledScalar) -> Self {
        ScalarField::Sampled(s)
    }
}

impl ScalarField {
    pub fn zero() -> ScalarField {
        ScalarField::Analytic(Expr::zero())
    }

    pub fn one() -> ScalarField {
        ScalarField::Analytic(Expr::one())
    }

    pub fn constant(v: C) -> ScalarField {
        ScalarField::Analytic(Expr::lit(v))
    }

    pub fn closure(
        f: impl Fn(&Point) -> Result<C> + Send + Sync + 'static,
        d: Option<[ScalarField; 4]>,
    ) -> ScalarField {
        ScalarField::Closure(ClosureField {
            f: Arc::new(f),
            d: d.map(Arc::new),
        })
    }

    pub fn is_analytic_zero(&self) -> bool {
        matches!(self, ScalarField::Analytic(e) if e.is_zero())
    }

    pub fn as_expr(&self) -> Option<&Expr> {
        match self {
            ScalarField::Analytic(e) => Some(e),
            _ => None,
        }
    }

    pub fn eval(&self, p: &Point) -> Result<C> {
        match self {
            ScalarField::Analytic(e) => Ok(e.eval(&p.vals())?),
            ScalarField::Closure(c) => (c.f)(p),
            ScalarField::Sampled(s) => {
                // Nearest grid point; sampled fields are meant to be read on
                // their own grid.
                let g = &s.grid;
                let mut idx = [0usize; 4];
                for k in 0..4 {
                    let t = (p.x[k] - g.chart.bounds[k][0]) / g.h[k];
                    let i = t.round();
                    if (t - i).abs() > 1e-9 || i < 0.0 || i as usize >= g.n {
                        return Err(FieldError::Other(format!(
                            "point {:?} is not a grid point of the sampled field",
                            p.x
                        )));
                    }
                    idx[k] = i as usize;
                }
                Ok(s.at(g.flat(idx)))
            }
        }
    }

    /// Evaluate with an expression-node cache (cuts repeated work when many
    /// analytic fields share subtrees at one point).
    pub fn eval_cached(
        &self,
        p: &Point,
        cache: &mut HashMap<*const crate::expr::Node, C>,
    ) -> Result<C> {
        match self {
            ScalarField::Analytic(e) => Ok(e.eval_cached(&p.vals(), cache)?),
            _ => self.eval(p),
        }
    }

    /// Wirtinger derivative. Exact for analytic fields; stored closures for
    /// closure fields (error if absent); fourth-order stencil for sampled.
    pub fn derive(&self, v: Var) -> Result<ScalarField> {
        match self {
            ScalarField::Analytic(e) => Ok(ScalarField::Analytic(e.diff(v))),
            ScalarField::Closure(c) => match &c.d {
                Some(d) => Ok(d[v.index()].clone()),
                None => Err(FieldError::NoDerivative),
            },
            ScalarField::Sampled(s) => Ok(ScalarField::Sampled(s.derive(v))),
        }
    }

    /// Conjugate field: structural for analytic, pointwise for others (valid
    /// on the real slice).
    pub fn conj(&self) -> ScalarField {
        match self {
            ScalarField::Analytic(e) => ScalarField::Analytic(e.conj()),
            ScalarField::Closure(c) => {
                let f = c.f.clone();
                ScalarField::closure(move |p| Ok(f(p)?.conj()), None)
            }
            ScalarField::Sampled(s) => ScalarField::Sampled(s.map(|v| v.conj())),
        }
    }

    /// Sample onto a grid (no-op if already sampled on the same grid).
    pub fn sample(&self, grid: &Arc<Grid>, margin: usize) -> Result<SampledScalar> {
        match self {
            ScalarField::Sampled(s) => {
                if Arc::ptr_eq(&s.grid, grid) || *s.grid == **grid {
                    Ok(s.clone())
                } else {
                    Err(FieldError::GridMismatch)
                }
            }
            _ => SampledScalar::from_fn(grid.clone(), margin, |p| self.eval(p)),
        }
    }

    fn binop(
        &self,
        rhs: &ScalarField,
        op: BinOp,
    ) -> Result<ScalarField> {
        use ScalarField::*;
        match (self, rhs) {
            (Analytic(a), Analytic(b)) => Ok(Analytic(op.expr(a, b))),
            (Sampled(a), Sampled(b)) => Ok(Sampled(a.zip(b, |x, y| op.num(x, y))?)),
            (Sampled(a), b) => {
                let sb = b.sample(&a.grid, a.margin)?;
                Ok(Sampled(a.zip(&sb, |x, y| op.num(x, y))?))
            }
            (a, Sampled(b)) => {
                let sa = a.sample(&b.grid, b.margin)?;
                Ok(Sampled(sa.zip(b, |x, y| op.num(x, y))?))
            }
            (a, b) => {
                let (fa, fb) = (a.clone(), b.clone());
                let d = match (a.deriv_set(), b.deriv_set()) {
                    (Some(da), Some(db)) => {
                        let mut out: Vec<ScalarField> = Vec::with_capacity(4);
                        for k in 0..4 {
                            out.push(op.diff(a, b, &da[k], &db[k])?);
                        }
                        Some([
                            out[0].clone(),
                            out[1].clone(),
                            out[2].clone(),
                            out[3].clone(),
                        ])
                    }
                    _ => None,
                };
                Ok(ScalarField::closure(
                    move |p| Ok(op.num(fa.eval(p)?, fb.eval(p)?)),
                    d,
                ))
            }
        }
    }

    /// First derivatives in all four directions if available without
    /// stencils.
    fn deriv_set(&self) -> Option<[ScalarField; 4]> {
        match self {
            ScalarField::Analytic(e) => Some([
                ScalarField::Analytic(e.diff(Var::Z)),
                ScalarField::Analytic(e.diff(Var::W)),
                ScalarField::Analytic(e.diff(Var::Zt)),
                ScalarField::Analytic(e.diff(Var::Wt)),
            ]),
            ScalarField::Closure(c) => c.d.as_deref().cloned(),
            ScalarField::Sampled(_) => None,
        }
    }

    pub fn add(&self, rhs: &ScalarField) -> Result<ScalarField> {
        self.binop(rhs, BinOp::Add)
    }

    pub fn sub(&self, rhs: &ScalarField) -> Result<ScalarField> {
        self.binop(rhs, BinOp::Sub)
    }

    pub fn mul(&self, rhs: &ScalarField) -> Result<ScalarField> {
        if self.is_analytic_zero() || rhs.is_analytic_zero() {
            return Ok(ScalarField::zero());
        }
        self.binop(rhs, BinOp::Mul)
    }

    pub fn div(&self, rhs: &ScalarField) -> Result<ScalarField> {
        self.binop(rhs, BinOp::Div)
    }

    pub fn neg(&self) -> ScalarField {
        match self {
            ScalarField::Analytic(e) => ScalarField::Analytic(e.neg()),
            ScalarField::Closure(c) => {
                let f = c.f.clone();
                let d = c
                    .d
                    .as_ref()
                    .map(|d| Arc::new([d[0].neg(), d[1].neg(), d[2].neg(), d[3].neg()]));
                ScalarField::Closure(ClosureField {
                    f: Arc::new(move |p| Ok(-f(p)?)),
                    d,
                })
            }
            ScalarField::Sampled(s) => ScalarField::Sampled(s.map(|v| -v)),
        }
    }

    pub fn scale(&self, k: C) -> Result<ScalarField> {
        ScalarField::constant(k).mul(self)
    }

    /// Maximum modulus over the given points (analytic/closure) or over the
    /// sampled interior (points argument ignored for sampled fields).
    pub fn max_norm(&self, points: &[Point]) -> Result<f64> {
        match self {
            ScalarField::Sampled(s) => s.max_norm(),
            _ => {
                use rayon::prelude::*;
                let norms: Result<Vec<f64>> = points
                    .par_iter()
                    .map(|p| Ok(self.eval(p)?.norm()))
                    .collect();
                Ok(norms?.into_iter().fold(0.0, f64::max))
            }
        }
    }
}

#[derive(Clone, Copy)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn expr(self, a: &Expr, b: &Expr) -> Expr {
        match self {
            BinOp::Add => a.add(b),
            BinOp::Sub => a.sub(b),
            BinOp::Mul => a.mul(b),
            BinOp::Div => a.div(b),
        }
    }

    fn num(self, a: C, b: C) -> C {
        match self {
            BinOp::Add => a + b,
            BinOp::Sub => a - b,
            BinOp::Mul => a * b,
            BinOp::Div => a / b,
        }
    }

    /// Derivative of `a op b` given operand derivatives (first order only).
    fn diff(
        self,
        a: &ScalarField,
        b: &ScalarField,
        da: &ScalarField,
        db: &ScalarField,
    ) -> Result<ScalarField> {
        match self {
            BinOp::Add => da.add(db),
            BinOp::Sub => da.sub(db),
            BinOp::Mul => da.mul(b)?.add(&a.mul(db)?),
            BinOp::Div => {
                // (a/b)' = a'/b - a b'/b^2
                let t1 = da.div(b)?;
                let t2 = a.mul(db)?.div(&b.mul(b)?)?;
                t1.sub(&t2)
            }
        }
    }
}
