//! Hermitian metrics in double-null coordinates, differential forms, the
//! Hodge star, conformal-Kähler detectors and curvature diagnostics.
//!
//! A Hermitian metric is stored through its four mixed components g_{zz̃},
//! g_{zw̃}, g_{wz̃}, g_{ww̃}; all unmixed components vanish in this basis.
//! On the real slice the component matrix is a positive-definite Hermitian
//! 2×2 block. The flat metric has g_{zz̃} = g_{ww̃} = 1, giving the real
//! metric G = 2·I₄ (|dz|² + |dw|² with z = x1 + i x2, w = x3 + i x4).

pub mod conformal;
pub mod curvature;
pub mod forms;
#[cfg(test)]
mod tests;

pub use conformal::{lee_form, solve_s, validate_s, AuxScalarS, ConformalData, SValidation};
pub use curvature::{curvature_diagnostics, CurvatureDiagnostics, PointDiagnostics};
pub use forms::{OneForm, ThreeForm, TwoForm};

use crate::expr::{Expr, Var};
use crate::field::{sample_lattice, C, ChartBox, FieldError, MatrixField, Point, Result, ScalarField};
use nalgebra::{Matrix2, Matrix4};
use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

fn im() -> C {
    C::new(0.0, 1.0)
}

/// Positions of the mixed components in [`HermitianMetric::comps`].
pub const ZZT: usize = 0;
pub const ZWT: usize = 1;
pub const WZT: usize = 2;
pub const WWT: usize = 3;

#[derive(Clone)]
pub struct HermitianMetric {
    comps: [ScalarField; 4],
    pub chart: ChartBox,
    orientation: Arc<OnceLock<f64>>,
}

impl HermitianMetric {
    /// Build a metric from its four mixed components, verifying Hermiticity,
    /// realness of the diagonal components and positive definiteness on a
    /// coarse sample lattice over the chart.
    pub fn new(
        g_zzt: ScalarField,
        g_zwt: ScalarField,
        g_wzt: ScalarField,
        g_wwt: ScalarField,
        chart: ChartBox,
    ) -> Result<HermitianMetric> {
        let m = HermitianMetric {
            comps: [g_zzt, g_zwt, g_wzt, g_wwt],
            chart,
            orientation: Arc::new(OnceLock::new()),
        };
        m.check_pointwise()?;
        Ok(m)
    }

    /// g_{ab̃} = ∂_a ∂_b̃ K for a Kähler potential K.
    pub fn from_kahler_potential(k: &Expr, chart: ChartBox) -> Result<HermitianMetric> {
        let g = |a: Var, b: Var| ScalarField::Analytic(k.diff(a).diff(b));
        HermitianMetric::new(
            g(Var::Z, Var::Zt),
            g(Var::Z, Var::Wt),
            g(Var::W, Var::Zt),
            g(Var::W, Var::Wt),
            chart,
        )
    }

    pub fn flat(chart: ChartBox) -> HermitianMetric {
        HermitianMetric::new(
            ScalarField::one(),
            ScalarField::zero(),
            ScalarField::zero(),
            ScalarField::one(),
            chart,
        )
        .expect("flat metric is valid")
    }

    fn check_pointwise(&self) -> Result<()> {
        for p in sample_lattice(&self.chart, 4) {
            let b = self.block_at(&p)?;
            let herm = (b[(1, 0)] - b[(0, 1)].conj()).norm();
            if herm > 1e-10 {
                return Err(FieldError::Other(format!(
                    "metric not Hermitian at {:?}: |g_wz̃ - conj(g_zw̃)| = {herm:.3e}",
                    p.x
                )));
            }
            if b[(0, 0)].im.abs() > 1e-10 || b[(1, 1)].im.abs() > 1e-10 {
                return Err(FieldError::Other(format!(
                    "metric diagonal not real at {:?}",
                    p.x
                )));
            }
            let tr = b[(0, 0)].re + b[(1, 1)].re;
            let det = (b[(0, 0)] * b[(1, 1)] - b[(0, 1)] * b[(1, 0)]).re;
            if tr <= 0.0 || det <= 0.0 {
                return Err(FieldError::Other(format!(
                    "metric not positive definite at {:?} (tr {tr:.3e}, det {det:.3e})",
                    p.x
                )));
            }
        }
        Ok(())
    }

    pub fn g_zzt(&self) -> &ScalarField {
        &self.comps[ZZT]
    }
    pub fn g_zwt(&self) -> &ScalarField {
        &self.comps[ZWT]
    }
    pub fn g_wzt(&self) -> &ScalarField {
        &self.comps[WZT]
    }
    pub fn g_wwt(&self) -> &ScalarField {
        &self.comps[WWT]
    }

    pub fn comp(&self, k: usize) -> &ScalarField {
        &self.comps[k]
    }

    /// Determinant of the mixed 2×2 block g_{zz̃}g_{ww̃} − g_{zw̃}g_{wz̃}.
    pub fn det2(&self) -> Result<ScalarField> {
        self.comps[ZZT]
            .mul(&self.comps[WWT])?
            .sub(&self.comps[ZWT].mul(&self.comps[WZT])?)
    }

    /// Mixed block [[g_zz̃, g_zw̃], [g_wz̃, g_ww̃]] at a point.
    pub fn block_at(&self, p: &Point) -> Result<Matrix2<C>> {
        let mut cache = HashMap::new();
        Ok(Matrix2::new(
            self.comps[ZZT].eval_cached(p, &mut cache)?,
            self.comps[ZWT].eval_cached(p, &mut cache)?,
            self.comps[WZT].eval_cached(p, &mut cache)?,
            self.comps[WWT].eval_cached(p, &mut cache)?,
        ))
    }

    /// Real-coordinate metric G(∂_{x_i}, ∂_{x_j}) at a point, obtained from
    /// the mixed components by bilinearity (∂_{x1} = ∂_z + ∂_z̃, etc.).
    pub fn real_metric_at(&self, p: &Point) -> Result<Matrix4<f64>> {
        let b = self.block_at(p)?;
        let gzz = b[(0, 0)].re;
        let gww = b[(1, 1)].re;
        let re = b[(0, 1)].re + b[(1, 0)].re;
        let gwz_m_gzw = b[(1, 0)] - b[(0, 1)];
        let g14 = (im() * gwz_m_gzw).re;
        let mut g = Matrix4::zeros();
        g[(0, 0)] = 2.0 * gzz;
        g[(1, 1)] = 2.0 * gzz;
        g[(2, 2)] = 2.0 * gww;
        g[(3, 3)] = 2.0 * gww;
        g[(0, 2)] = re;
        g[(2, 0)] = re;
        g[(1, 3)] = re;
        g[(3, 1)] = re;
        g[(0, 3)] = g14;
        g[(3, 0)] = g14;
        g[(1, 2)] = -g14;
        g[(2, 1)] = -g14;
        Ok(g)
    }

    /// The real metric as a 4×4 symmetric matrix field.
    pub fn to_real_metric(&self) -> Result<MatrixField> {
        let i = im();
        let two = C::new(2.0, 0.0);
        let g11 = self.comps[ZZT].scale(two)?;
        let g33 = self.comps[WWT].scale(two)?;
        let g13 = self.comps[ZWT].add(&self.comps[WZT])?;
        let g14 = self.comps[WZT].sub(&self.comps[ZWT])?.scale(i)?;
        let g23 = g14.neg();
        let z = ScalarField::zero;
        let data = vec![
            g11.clone(), z(), g13.clone(), g14.clone(),
            z(), g11, g23.clone(), g13.clone(),
            g13.clone(), g23, g33.clone(), z(),
            g14, g13, z(), g33,
        ];
        Ok(MatrixField::from_entries(4, 4, data))
    }

    /// Orientation sign σ of the volume form, fixed by requiring the
    /// fundamental form to be anti-self-dual (*κ = −κ). Evaluated once at
    /// the chart center.
    pub fn orientation(&self) -> Result<f64> {
        if let Some(&s) = self.orientation.get() {
            return Ok(s);
        }
        let p = self.chart.center();
        let kappa = fundamental_form(self);
        let vals = kappa.eval_at(&p)?;
        let om = forms::complex_pairs_to_real(&vals);
        let g = self.real_metric_at(&p)?;
        let det = g.determinant();
        let ginv = g
            .try_inverse()
            .ok_or_else(|| FieldError::SingularMatrix(p.x))?;
        let star = forms::star_real(&ginv, det.sqrt(), 1.0, &om);
        // κ is real; the Frobenius pairing decides the eigenvalue sign.
        let mut t = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                t += (star[(i, j)] * om[(i, j)].conj()).re;
            }
        }
        let sigma = if t > 0.0 { -1.0 } else { 1.0 };
        let _ = self.orientation.set(sigma);
        Ok(sigma)
    }
}

/// Fundamental two-form κ = i(g_{zz̃} dz∧dz̃ + g_{zw̃} dz∧dw̃
/// + g_{wz̃} dw∧dz̃ + g_{ww̃} dw∧dw̃).
pub fn fundamental_form(g: &HermitianMetric) -> TwoForm {
    let i = im();
    let sc = |f: &ScalarField| f.scale(i).expect("scale");
    TwoForm::from_comps([
        ScalarField::zero(),
        sc(g.g_zzt()),
        sc(g.g_zwt()),
        sc(g.g_wzt()),
        sc(g.g_wwt()),
        ScalarField::zero(),
    ])
}

/// Pointwise Hodge star of a two-form, with the orientation fixed so that
/// the fundamental form is anti-self-dual. *∘* = identity.
pub fn hodge_star(g: &HermitianMetric, om: &TwoForm) -> Result<TwoForm> {
    let sigma = g.orientation()?;
    let g = g.clone();
    let om = om.clone();
    let core: Arc<dyn Fn(&Point) -> Result<[C; 6]> + Send + Sync> = Arc::new(move |p: &Point| {
        let vals = om.eval_at(p)?;
        let re_om = forms::complex_pairs_to_real(&vals);
        let gr = g.real_metric_at(p)?;
        let det = gr.determinant();
        if det <= 0.0 {
            return Err(FieldError::SingularMatrix(p.x));
        }
        let ginv = gr
            .try_inverse()
            .ok_or_else(|| FieldError::SingularMatrix(p.x))?;
        let star = forms::star_real(&ginv, det.sqrt(), sigma, &re_om);
        Ok(forms::real_to_complex_pairs(&star))
    });
    let comps: [ScalarField; 6] = std::array::from_fn(|k| {
        let core = core.clone();
        ScalarField::closure(move |p| Ok(core(p)?[k]), None)
    });
    Ok(TwoForm::from_comps(comps))
}

/// Inner product of two-forms at a point: ⟨α, β⟩ = ½ α_{ij} G^{ik} G^{jl} β_{kl}
/// on real-coordinate components.
pub fn two_form_inner(ginv: &Matrix4<f64>, a: &Matrix4<C>, b: &Matrix4<C>) -> C {
    let mut acc = C::new(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    acc += a[(i, j)] * b[(k, l)] * (ginv[(i, k)] * ginv[(j, l)]);
                }
            }
        }
    }
    acc * 0.5
}
