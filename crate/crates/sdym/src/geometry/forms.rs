//! Differential forms in the double-null coordinate basis.
//!
//! One-forms carry components in the basis {dz, dw, dz̃, dw̃}, two-forms in
//! {dz∧dw, dz∧dz̃, dz∧dw̃, dw∧dz̃, dw∧dw̃, dz̃∧dw̃} and three-forms in
//! {dz∧dw∧dz̃, dz∧dw∧dw̃, dz∧dz̃∧dw̃, dw∧dz̃∧dw̃}. Exterior derivative and
//! wedge close on these representations; the Hodge star is evaluated
//! pointwise through the real coordinates (x1..x4).

use crate::expr::Var;
use crate::field::{C, FieldError, Point, Result, ScalarField};
use nalgebra::{Matrix4, Matrix6, Vector6};
use std::sync::OnceLock;

/// Index pairs (a, b) with a < b for the six two-form basis elements, in
/// coordinate order z, w, z̃, w̃.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Index triples for the four three-form basis elements.
pub const TRIPLES: [(usize, usize, usize); 4] = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)];

/// Position of the ordered pair (a, b), a < b, in `PAIRS`.
pub fn pair_index(a: usize, b: usize) -> usize {
    PAIRS
        .iter()
        .position(|&p| p == (a, b))
        .expect("pair_index: a < b required")
}

fn im() -> C {
    C::new(0.0, 1.0)
}

/// Real-coordinate coefficients of the complex coordinate differentials:
/// dz = dx1 + i dx2, dw = dx3 + i dx4 and their conjugates.
pub fn diff_real_components(a: usize) -> [C; 4] {
    let i = im();
    match a {
        0 => [C::new(1.0, 0.0), i, C::new(0.0, 0.0), C::new(0.0, 0.0)],
        1 => [C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0), i],
        2 => [C::new(1.0, 0.0), -i, C::new(0.0, 0.0), C::new(0.0, 0.0)],
        3 => [C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0), -i],
        _ => unreachable!(),
    }
}

#[derive(Clone)]
pub struct OneForm {
    pub comps: [ScalarField; 4],
}

#[derive(Clone)]
pub struct TwoForm {
    pub comps: [ScalarField; 6],
}

#[derive(Clone)]
pub struct ThreeForm {
    pub comps: [ScalarField; 4],
}

impl OneForm {
    pub fn zero() -> OneForm {
        OneForm {
            comps: std::array::from_fn(|_| ScalarField::zero()),
        }
    }

    pub fn eval_at(&self, p: &Point) -> Result<[C; 4]> {
        let mut out = [C::new(0.0, 0.0); 4];
        for (k, c) in self.comps.iter().enumerate() {
            out[k] = c.eval(p)?;
        }
        Ok(out)
    }

    /// Exterior derivative: (dα)_{ab} = ∂_a α_b − ∂_b α_a.
    pub fn d(&self) -> Result<TwoForm> {
        let mut comps = Vec::with_capacity(6);
        for &(a, b) in &PAIRS {
            let da = self.comps[b].derive(Var::ALL[a])?;
            let db = self.comps[a].derive(Var::ALL[b])?;
            comps.push(da.sub(&db)?);
        }
        Ok(TwoForm {
            comps: comps.try_into().map_err(|_| FieldError::Other("d".into()))?,
        })
    }

    /// Wedge with a two-form:
    /// (α∧ω)_{abc} = α_a ω_{bc} − α_b ω_{ac} + α_c ω_{ab}.
    pub fn wedge2(&self, om: &TwoForm) -> Result<ThreeForm> {
        let mut comps = Vec::with_capacity(4);
        for &(a, b, c) in &TRIPLES {
            let t1 = self.comps[a].mul(&om.comps[pair_index(b, c)])?;
            let t2 = self.comps[b].mul(&om.comps[pair_index(a, c)])?;
            let t3 = self.comps[c].mul(&om.comps[pair_index(a, b)])?;
            comps.push(t1.sub(&t2)?.add(&t3)?);
        }
        Ok(ThreeForm {
            comps: comps.try_into().map_err(|_| FieldError::Other("wedge".into()))?,
        })
    }

    pub fn max_norm(&self, points: &[Point]) -> Result<f64> {
        let mut worst = 0.0f64;
        for c in &self.comps {
            worst = worst.max(c.max_norm(points)?);
        }
        Ok(worst)
    }
}

impl TwoForm {
    pub fn zero() -> TwoForm {
        TwoForm {
            comps: std::array::from_fn(|_| ScalarField::zero()),
        }
    }

    pub fn from_comps(comps: [ScalarField; 6]) -> TwoForm {
        TwoForm { comps }
    }

    pub fn eval_at(&self, p: &Point) -> Result<[C; 6]> {
        let mut out = [C::new(0.0, 0.0); 6];
        for (k, c) in self.comps.iter().enumerate() {
            out[k] = c.eval(p)?;
        }
        Ok(out)
    }

    /// Exterior derivative:
    /// (dω)_{abc} = ∂_a ω_{bc} − ∂_b ω_{ac} + ∂_c ω_{ab}.
    pub fn d(&self) -> Result<ThreeForm> {
        let mut comps = Vec::with_capacity(4);
        for &(a, b, c) in &TRIPLES {
            let t1 = self.comps[pair_index(b, c)].derive(Var::ALL[a])?;
            let t2 = self.comps[pair_index(a, c)].derive(Var::ALL[b])?;
            let t3 = self.comps[pair_index(a, b)].derive(Var::ALL[c])?;
            comps.push(t1.sub(&t2)?.add(&t3)?);
        }
        Ok(ThreeForm {
            comps: comps.try_into().map_err(|_| FieldError::Other("d".into()))?,
        })
    }

    pub fn add(&self, rhs: &TwoForm) -> Result<TwoForm> {
        let mut comps = Vec::with_capacity(6);
        for k in 0..6 {
            comps.push(self.comps[k].add(&rhs.comps[k])?);
        }
        Ok(TwoForm {
            comps: comps.try_into().map_err(|_| FieldError::Other("add".into()))?,
        })
    }

    pub fn sub(&self, rhs: &TwoForm) -> Result<TwoForm> {
        let mut comps = Vec::with_capacity(6);
        for k in 0..6 {
            comps.push(self.comps[k].sub(&rhs.comps[k])?);
        }
        Ok(TwoForm {
            comps: comps.try_into().map_err(|_| FieldError::Other("sub".into()))?,
        })
    }

    pub fn scale(&self, k: C) -> Result<TwoForm> {
        let mut comps = Vec::with_capacity(6);
        for c in &self.comps {
            comps.push(c.scale(k)?);
        }
        Ok(TwoForm {
            comps: comps.try_into().map_err(|_| FieldError::Other("scale".into()))?,
        })
    }

    pub fn scale_field(&self, s: &ScalarField) -> Result<TwoForm> {
        let mut comps = Vec::with_capacity(6);
        for c in &self.comps {
            comps.push(c.mul(s)?);
        }
        Ok(TwoForm {
            comps: comps.try_into().map_err(|_| FieldError::Other("scale".into()))?,
        })
    }

    pub fn max_norm(&self, points: &[Point]) -> Result<f64> {
        let mut worst = 0.0f64;
        for c in &self.comps {
            worst = worst.max(c.max_norm(points)?);
        }
        Ok(worst)
    }
}

impl ThreeForm {
    pub fn eval_at(&self, p: &Point) -> Result<[C; 4]> {
        let mut out = [C::new(0.0, 0.0); 4];
        for (k, c) in self.comps.iter().enumerate() {
            out[k] = c.eval(p)?;
        }
        Ok(out)
    }

    pub fn max_norm(&self, points: &[Point]) -> Result<f64> {
        let mut worst = 0.0f64;
        for c in &self.comps {
            worst = worst.max(c.max_norm(points)?);
        }
        Ok(worst)
    }
}

/// Expand complex-basis two-form components into the antisymmetric matrix of
/// real-coordinate components Ω_{ij}.
pub fn complex_pairs_to_real(vals: &[C; 6]) -> Matrix4<C> {
    let mut om = Matrix4::zeros();
    for (q, &(a, b)) in PAIRS.iter().enumerate() {
        let ea = diff_real_components(a);
        let eb = diff_real_components(b);
        for i in 0..4 {
            for j in 0..4 {
                om[(i, j)] += vals[q] * (ea[i] * eb[j] - ea[j] * eb[i]);
            }
        }
    }
    om
}

fn pair_basis_change() -> &'static Matrix6<C> {
    static CELL: OnceLock<Matrix6<C>> = OnceLock::new();
    CELL.get_or_init(|| {
        // Column q: real-pair components of the q-th complex basis two-form.
        let mut t = Matrix6::zeros();
        for (q, &(a, b)) in PAIRS.iter().enumerate() {
            let ea = diff_real_components(a);
            let eb = diff_real_components(b);
            for (p, &(i, j)) in PAIRS.iter().enumerate() {
                t[(p, q)] = ea[i] * eb[j] - ea[j] * eb[i];
            }
        }
        t.try_inverse().expect("pair basis change is invertible")
    })
}

/// Recover complex-basis components from a real antisymmetric matrix.
pub fn real_to_complex_pairs(om: &Matrix4<C>) -> [C; 6] {
    let mut v = Vector6::zeros();
    for (p, &(i, j)) in PAIRS.iter().enumerate() {
        v[p] = om[(i, j)];
    }
    let out = pair_basis_change() * v;
    std::array::from_fn(|k| out[k])
}

fn levi_civita(i: usize, j: usize, k: usize, l: usize) -> f64 {
    let idx = [i, j, k, l];
    let mut sign = 1.0;
    let mut a = idx;
    for p in 0..4 {
        for q in (p + 1)..4 {
            if a[p] == a[q] {
                return 0.0;
            }
            if a[p] > a[q] {
                a.swap(p, q);
                sign = -sign;
            }
        }
    }
    sign
}

/// Pointwise Hodge star on real-coordinate two-form components:
/// (*Ω)_{ij} = σ·(√det G / 2)·ε_{ijkl} G^{km} G^{ln} Ω_{mn}.
pub fn star_real(ginv: &Matrix4<f64>, sqrt_det: f64, sigma: f64, om: &Matrix4<C>) -> Matrix4<C> {
    // Raise indices first.
    let mut up = Matrix4::<C>::zeros();
    for k in 0..4 {
        for l in 0..4 {
            let mut acc = C::new(0.0, 0.0);
            for m in 0..4 {
                for n in 0..4 {
                    acc += om[(m, n)] * (ginv[(k, m)] * ginv[(l, n)]);
                }
            }
            up[(k, l)] = acc;
        }
    }
    let mut out = Matrix4::<C>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = C::new(0.0, 0.0);
            for k in 0..4 {
                for l in 0..4 {
                    let e = levi_civita(i, j, k, l);
                    if e != 0.0 {
                        acc += up[(k, l)] * e;
                    }
                }
            }
            out[(i, j)] = acc * (sigma * 0.5 * sqrt_det);
        }
    }
    out
}
