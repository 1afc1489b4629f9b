//! Conformal-Kähler detectors: the Lee form f (dκ = −2 f∧κ), recovery of the
//! conformal factor φ by line integration, and the auxiliary scalar s whose
//! first-order conditions make the divergence-form Yang operator reproduce
//! the F_κ combination.

use super::forms::{pair_index, OneForm, TRIPLES};
use super::{fundamental_form, HermitianMetric, WWT, WZT, ZWT, ZZT};
use crate::expr::Var;
use crate::field::{sample_lattice, C, FieldError, MatrixField, Point, Result, ScalarField};
use std::sync::Arc;

/// Lee form, conformal factor and the residuals certifying them.
pub struct ConformalData {
    pub f: OneForm,
    /// Max residual of the linear system dκ = −2 f∧κ over the sample lattice.
    pub solve_residual: f64,
    /// Max norm of df over the sample lattice.
    pub closedness_residual: f64,
    pub conformally_kahler: bool,
    /// Conformal factor with φ = 1 at the chart center; absent when f is not
    /// closed to tolerance.
    pub phi: Option<ScalarField>,
}

/// Residual fields of the first-order conditions on s, with their mirrored
/// (conjugate) pair, and the max norm over the sample lattice.
pub struct SValidation {
    pub c1: ScalarField,
    pub c2: ScalarField,
    pub c1_mirror: ScalarField,
    pub c2_mirror: ScalarField,
    pub max_residual: f64,
}

/// The auxiliary scalar recovered by [`solve_s`].
pub struct AuxScalarS {
    pub s: ScalarField,
    pub s_mirror: ScalarField,
    /// Cross-derivative compatibility residual of the first-order system.
    pub compat_residual: f64,
    pub validation: SValidation,
}

/// 5-point Gauss–Legendre nodes and weights on [-1, 1].
const GL5: [(f64, f64); 5] = [
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.0, 0.568_888_888_888_888_9),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

const PANELS: usize = 8;

/// Integrate a complex-basis one-form (components f_z, f_w, f_z̃, f_w̃) along
/// the straight segment from `from` to `to` on the real slice, by composite
/// Gauss–Legendre quadrature.
pub fn integrate_one_form(
    f: &dyn Fn(&Point) -> Result<[C; 4]>,
    from: [f64; 4],
    to: [f64; 4],
) -> Result<C> {
    let i = C::new(0.0, 1.0);
    let dx: [f64; 4] = std::array::from_fn(|k| to[k] - from[k]);
    let mut acc = C::new(0.0, 0.0);
    for panel in 0..PANELS {
        let a = panel as f64 / PANELS as f64;
        let b = (panel + 1) as f64 / PANELS as f64;
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        for &(xi, wgt) in &GL5 {
            let t = mid + half * xi;
            let p = Point::new(std::array::from_fn(|k| from[k] + t * dx[k]));
            let v = f(&p)?;
            // Pull back onto the real path: dz = dx1 + i dx2 etc.
            let comp_x = [
                v[0] + v[2],
                i * (v[0] - v[2]),
                v[1] + v[3],
                i * (v[1] - v[3]),
            ];
            let mut integrand = C::new(0.0, 0.0);
            for k in 0..4 {
                integrand += comp_x[k] * dx[k];
            }
            acc += integrand * (wgt * half);
        }
    }
    Ok(acc)
}

/// Fourth-order finite-difference Wirtinger derivative by point evaluation,
/// for fields that do not carry exact derivatives.
pub fn fd_derive_at(f: &ScalarField, v: Var, p: &Point, h: f64) -> Result<C> {
    let (ax_re, ax_im) = match v {
        Var::Z => (0, 1),
        Var::W => (2, 3),
        Var::Zt => (0, 1),
        Var::Wt => (2, 3),
    };
    let stencil = [(-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)];
    let axis_d = |axis: usize| -> Result<C> {
        let mut acc = C::new(0.0, 0.0);
        for &(o, c) in &stencil {
            let mut x = p.x;
            x[axis] += o * h;
            acc += f.eval(&Point::new(x))? * c;
        }
        Ok(acc / h)
    };
    let dre = axis_d(ax_re)?;
    let dim = axis_d(ax_im)?;
    let i = C::new(0.0, 1.0);
    Ok(match v {
        Var::Z | Var::W => (dre - i * dim) * 0.5,
        Var::Zt | Var::Wt => (dre + i * dim) * 0.5,
    })
}

/// Solve dκ = −2 f∧κ for the Lee form and recover the conformal factor.
pub fn lee_form(g: &HermitianMetric) -> Result<ConformalData> {
    let kappa = fundamental_form(g);
    let dkappa = kappa.d()?;

    // Linear system per point: for each three-form basis element (a, b, c),
    //   (dκ)_{abc} = −2 (f_a κ_{bc} − f_b κ_{ac} + f_c κ_{ab}).
    // Assemble the 4×4 coefficient matrix as a field and invert it; for a
    // nondegenerate κ the map f ↦ f∧κ is an isomorphism.
    let mut mdata = Vec::with_capacity(16);
    for &(a, b, c) in &TRIPLES {
        let mut row = vec![ScalarField::zero(); 4];
        row[a] = kappa.comps[pair_index(b, c)].scale(C::new(-2.0, 0.0))?;
        row[b] = kappa.comps[pair_index(a, c)].scale(C::new(2.0, 0.0))?;
        row[c] = kappa.comps[pair_index(a, b)].scale(C::new(-2.0, 0.0))?;
        mdata.extend(row);
    }
    let m = MatrixField::from_entries(4, 4, mdata);
    let rhs = MatrixField::from_entries(4, 1, dkappa.comps.to_vec());
    let f_col = m.inverse(None)?.matmul(&rhs)?;
    let f = OneForm {
        comps: std::array::from_fn(|k| f_col.at(k, 0).clone()),
    };

    let lattice = sample_lattice(&g.chart, 4);

    // Residual of the solve itself (detects non-Hermitian input).
    let mut solve_residual = 0.0f64;
    for p in &lattice {
        let mv = m.eval_at(p)?;
        let fv = f_col.eval_at(p)?;
        let rv = rhs.eval_at(p)?;
        let r = &mv * &fv - rv;
        solve_residual = solve_residual.max(r.norm());
    }

    // Closedness of f: exact exterior derivative when f is analytic, finite
    // differences otherwise.
    let all_analytic = f.comps.iter().all(|c| c.as_expr().is_some());
    let mut closedness = 0.0f64;
    if all_analytic {
        let df = f.d()?;
        closedness = df.max_norm(&lattice)?;
    } else {
        let h = 1e-3;
        for p in &lattice {
            for (qa, &va) in Var::ALL.iter().enumerate() {
                for qb in (qa + 1)..4 {
                    let vb = Var::ALL[qb];
                    let d1 = fd_derive_at(&f.comps[qb], va, p, h)?;
                    let d2 = fd_derive_at(&f.comps[qa], vb, p, h)?;
                    closedness = closedness.max((d1 - d2).norm());
                }
            }
        }
    }

    let conformally_kahler = closedness <= crate::tol::ANALYTIC;
    let phi = if conformally_kahler {
        let f_cl = f.clone();
        let base = g.chart.center().x;
        let eval_f = move |p: &Point| f_cl.eval_at(p);
        let phi_fn = move |p: &Point| -> Result<C> {
            // dκ = −2 f∧κ with f = d log φ⁻¹, i.e. log φ = ∫ f.
            let log_phi = integrate_one_form(&eval_f, base, p.x)?;
            Ok(log_phi.exp())
        };
        Some(ScalarField::closure(phi_fn, None))
    } else {
        None
    };

    Ok(ConformalData {
        f,
        solve_residual,
        closedness_residual: closedness,
        conformally_kahler,
        phi,
    })
}

/// First-order conditions on s:
///   C₁ = ∂_z(s·g_{wz̃}) − ∂_w(s·g_{zz̃}),
///   C₂ = ∂_w(s·g_{zw̃}) − ∂_z(s·g_{ww̃}),
/// plus the mirrored pair with s̃ = conj(s) and barred derivatives. These
/// vanish exactly when the divergence-form Yang operator built from (g, s)
/// reproduces the F_κ combination for arbitrary gauge fields.
pub fn validate_s(g: &HermitianMetric, s: &ScalarField) -> Result<SValidation> {
    let st = s.conj();
    let d = |f: &ScalarField, v: Var| f.derive(v);
    let c1 = d(&s.mul(g.comp(WZT))?, Var::Z)?.sub(&d(&s.mul(g.comp(ZZT))?, Var::W)?)?;
    let c2 = d(&s.mul(g.comp(ZWT))?, Var::W)?.sub(&d(&s.mul(g.comp(WWT))?, Var::Z)?)?;
    let c1m = d(&st.mul(g.comp(ZWT))?, Var::Zt)?.sub(&d(&st.mul(g.comp(ZZT))?, Var::Wt)?)?;
    let c2m = d(&st.mul(g.comp(WZT))?, Var::Wt)?.sub(&d(&st.mul(g.comp(WWT))?, Var::Zt)?)?;
    let lattice = sample_lattice(&g.chart, 4);
    let mut max_residual = 0.0f64;
    for f in [&c1, &c2, &c1m, &c2m] {
        max_residual = max_residual.max(f.max_norm(&lattice)?);
    }
    Ok(SValidation {
        c1,
        c2,
        c1_mirror: c1m,
        c2_mirror: c2m,
        max_residual,
    })
}

/// Recover s from the first-order conditions C₁ = C₂ = 0, normalized to
/// s = 1 at the chart center. The conditions give a 2×2 linear system for
/// (∂_z log s, ∂_w log s); log s is then recovered by line integration
/// (using that s is real on the real slice, so ∂_z̃ log s = conj(∂_z log s)).
pub fn solve_s(g: &HermitianMetric) -> Result<AuxScalarS> {
    // Right-hand sides: g_wz̃ u_z − g_zz̃ u_w = ∂_w g_zz̃ − ∂_z g_wz̃,
    //                   −g_ww̃ u_z + g_zw̃ u_w = ∂_z g_ww̃ − ∂_w g_zw̃.
    let b1 = g.comp(ZZT).derive(Var::W)?.sub(&g.comp(WZT).derive(Var::Z)?)?;
    let b2 = g.comp(WWT).derive(Var::Z)?.sub(&g.comp(ZWT).derive(Var::W)?)?;
    let gzz = g.comp(ZZT).clone();
    let gzw = g.comp(ZWT).clone();
    let gwz = g.comp(WZT).clone();
    let gww = g.comp(WWT).clone();

    let grad = Arc::new(move |p: &Point| -> Result<(C, C)> {
        let a11 = gwz.eval(p)?;
        let a12 = -gzz.eval(p)?;
        let a21 = -gww.eval(p)?;
        let a22 = gzw.eval(p)?;
        let det = a11 * a22 - a12 * a21;
        if det.norm() < 1e-14 {
            return Err(FieldError::SingularMatrix(p.x));
        }
        let r1 = b1.eval(p)?;
        let r2 = b2.eval(p)?;
        let uz = (r1 * a22 - a12 * r2) / det;
        let uw = (a11 * r2 - r1 * a21) / det;
        Ok((uz, uw))
    });

    let base = g.chart.center().x;
    let grad_c = grad.clone();
    let log_s = move |p: &Point| -> Result<C> {
        let grad_c = grad_c.clone();
        let one_form = move |q: &Point| -> Result<[C; 4]> {
            let (uz, uw) = grad_c(q)?;
            Ok([uz, uw, uz.conj(), uw.conj()])
        };
        integrate_one_form(&one_form, base, p.x)
    };
    let log_s = Arc::new(log_s);

    let s_plain = {
        let log_s = log_s.clone();
        ScalarField::closure(move |p| Ok(log_s(p)?.exp()), None)
    };
    // Stored exact first derivatives: ∂ s = (∂ log s)·s.
    let mk_deriv = |pick: fn(C, C) -> C| {
        let grad = grad.clone();
        let s_inner = s_plain.clone();
        ScalarField::closure(
            move |p| {
                let (uz, uw) = grad(p)?;
                Ok(pick(uz, uw) * s_inner.eval(p)?)
            },
            None,
        )
    };
    let d = [
        mk_deriv(|uz, _| uz),
        mk_deriv(|_, uw| uw),
        mk_deriv(|uz, _| uz.conj()),
        mk_deriv(|_, uw| uw.conj()),
    ];
    let s = {
        let log_s = log_s.clone();
        ScalarField::closure(move |p| Ok(log_s(p)?.exp()), Some(d))
    };
    let s_mirror = {
        let log_s = log_s.clone();
        let dm = [
            mk_deriv(|uz, _| uz.conj()),
            mk_deriv(|_, uw| uw.conj()),
            mk_deriv(|uz, _| uz),
            mk_deriv(|_, uw| uw),
        ];
        ScalarField::closure(move |p| Ok(log_s(p)?.exp().conj()), Some(dm))
    };

    // Cross-derivative compatibility ∂_w u_z − ∂_z u_w via finite differences.
    let lattice = sample_lattice(&g.chart, 3);
    let h = 1e-3;
    let uz_field = {
        let grad = grad.clone();
        ScalarField::closure(move |p| Ok(grad(p)?.0), None)
    };
    let uw_field = {
        let grad = grad.clone();
        ScalarField::closure(move |p| Ok(grad(p)?.1), None)
    };
    let mut compat = 0.0f64;
    for p in &lattice {
        let d1 = fd_derive_at(&uz_field, Var::W, p, h)?;
        let d2 = fd_derive_at(&uw_field, Var::Z, p, h)?;
        compat = compat.max((d1 - d2).norm());
    }

    let validation = validate_s_with_mirror(g, &s, &s_mirror)?;
    Ok(AuxScalarS {
        s,
        s_mirror,
        compat_residual: compat,
        validation,
    })
}

/// Like [`validate_s`] but with an explicitly supplied mirror field (needed
/// when s is a closure whose structural conjugate would lose derivatives).
pub fn validate_s_with_mirror(
    g: &HermitianMetric,
    s: &ScalarField,
    s_mirror: &ScalarField,
) -> Result<SValidation> {
    let d = |f: &ScalarField, v: Var| f.derive(v);
    let c1 = d(&s.mul(g.comp(WZT))?, Var::Z)?.sub(&d(&s.mul(g.comp(ZZT))?, Var::W)?)?;
    let c2 = d(&s.mul(g.comp(ZWT))?, Var::W)?.sub(&d(&s.mul(g.comp(WWT))?, Var::Z)?)?;
    let c1m =
        d(&s_mirror.mul(g.comp(ZWT))?, Var::Zt)?.sub(&d(&s_mirror.mul(g.comp(ZZT))?, Var::Wt)?)?;
    let c2m =
        d(&s_mirror.mul(g.comp(WZT))?, Var::Wt)?.sub(&d(&s_mirror.mul(g.comp(WWT))?, Var::Zt)?)?;
    let lattice = sample_lattice(&g.chart, 4);
    let mut max_residual = 0.0f64;
    for f in [&c1, &c2, &c1m, &c2m] {
        max_residual = max_residual.max(f.max_norm(&lattice)?);
    }
    Ok(SValidation {
        c1,
        c2,
        c1_mirror: c1m,
        c2_mirror: c2m,
        max_residual,
    })
}
