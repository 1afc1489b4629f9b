use super::conformal::{lee_form, solve_s, validate_s};
use super::curvature::curvature_diagnostics;
use super::forms::{OneForm, TwoForm};
use super::{fundamental_form, hodge_star, HermitianMetric};
use crate::expr::{parse, Expr};
use crate::field::{sample_lattice, C, ChartBox, Point, ScalarField};

fn flat() -> HermitianMetric {
    HermitianMetric::flat(ChartBox::cube(-1.0, 1.0))
}

/// e^{2u}·flat with u = 0.1·ρ².
fn conformal_flat() -> HermitianMetric {
    let e2u = parse("exp(0.2*(z*zt + w*wt))").unwrap();
    HermitianMetric::new(
        ScalarField::Analytic(e2u.clone()),
        ScalarField::zero(),
        ScalarField::zero(),
        ScalarField::Analytic(e2u),
        ChartBox::cube(-1.0, 1.0),
    )
    .unwrap()
}

/// Ricci-flat Kähler metric on an annulus chart (potential
/// √(ρ⁴+1) + log ρ² − log(1 + √(ρ⁴+1))).
fn eguchi_hanson() -> HermitianMetric {
    let k = parse("sqrt((z*zt + w*wt)^2 + 1) + log(z*zt + w*wt) - log(1 + sqrt((z*zt + w*wt)^2 + 1))")
        .unwrap();
    HermitianMetric::from_kahler_potential(&k, ChartBox::cube(0.4, 1.2)).unwrap()
}

/// Scalar-flat Kähler metric (potential ρ² + log ρ²).
fn burns() -> HermitianMetric {
    let k = parse("z*zt + w*wt + log(z*zt + w*wt)").unwrap();
    HermitianMetric::from_kahler_potential(&k, ChartBox::cube(0.4, 1.2)).unwrap()
}

/// Einstein, non-half-flat Kähler metric (potential log(1 + ρ²)).
fn fubini_study() -> HermitianMetric {
    let k = parse("log(1 + z*zt + w*wt)").unwrap();
    HermitianMetric::from_kahler_potential(&k, ChartBox::cube(-0.7, 0.7)).unwrap()
}

fn all_metrics() -> Vec<(&'static str, HermitianMetric)> {
    vec![
        ("flat", flat()),
        ("conformal_flat", conformal_flat()),
        ("eguchi_hanson", eguchi_hanson()),
        ("burns", burns()),
        ("fubini_study", fubini_study()),
    ]
}

#[test]
fn flat_fundamental_form_components() {
    let k = fundamental_form(&flat());
    let p = Point::new([0.3, -0.2, 0.1, 0.4]);
    let v = k.eval_at(&p).unwrap();
    let i = C::new(0.0, 1.0);
    assert_eq!(v[0], C::new(0.0, 0.0));
    assert_eq!(v[1], i); // dz∧dz̃
    assert_eq!(v[4], i); // dw∧dw̃
    assert_eq!(v[5], C::new(0.0, 0.0));
}

#[test]
fn kahler_metrics_have_closed_fundamental_form() {
    for (name, g) in [
        ("flat", flat()),
        ("eguchi_hanson", eguchi_hanson()),
        ("burns", burns()),
        ("fubini_study", fubini_study()),
    ] {
        let dk = fundamental_form(&g).d().unwrap();
        let pts = sample_lattice(&g.chart, 4);
        let n = dk.max_norm(&pts).unwrap();
        assert!(n <= 1e-9, "{name}: |dκ| = {n:.3e}");
    }
}

#[test]
fn flat_real_metric_is_twice_identity() {
    let g = flat().to_real_metric().unwrap();
    let p = Point::new([0.1, 0.2, 0.3, 0.4]);
    let m = g.eval_at(&p).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let want = if i == j { 2.0 } else { 0.0 };
            assert!((m[(i, j)] - C::new(want, 0.0)).norm() <= 1e-12);
        }
    }
}

#[test]
fn fubini_study_real_metric_at_origin() {
    let m = fubini_study()
        .real_metric_at(&Point::new([0.0; 4]))
        .unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let want = if i == j { 2.0 } else { 0.0 };
            assert!((m[(i, j)] - want).abs() <= 1e-12, "G[{i}{j}] = {}", m[(i, j)]);
        }
    }
}

#[test]
fn conformal_scaling_of_real_metric() {
    let g = conformal_flat().to_real_metric().unwrap();
    let p = Point::new([0.5, 0.0, 0.0, 0.0]);
    let scale = (0.2f64 * 0.25).exp() * 2.0;
    let m = g.eval_at(&p).unwrap();
    for i in 0..4 {
        let d = (m[(i, i)] - C::new(scale, 0.0)).norm();
        assert!(d <= 1e-12, "diagonal {i}: {d:.3e}");
    }
}

#[test]
fn star_eigenforms_on_all_metrics() {
    // {dz∧dw, κ, dz̃∧dw̃} are eigenvalue −1 forms of the star for every
    // Hermitian metric under the orientation fixed by *κ = −κ.
    for (name, g) in all_metrics() {
        let mut dzdw = TwoForm::zero();
        dzdw.comps[0] = ScalarField::one();
        let mut dztdwt = TwoForm::zero();
        dztdwt.comps[5] = ScalarField::one();
        let kappa = fundamental_form(&g);
        let pts = sample_lattice(&g.chart, 3);
        for om in [&dzdw, &kappa, &dztdwt] {
            let s = hodge_star(&g, om).unwrap();
            let diff = s.add(om).unwrap();
            let n = diff.max_norm(&pts).unwrap();
            assert!(n <= 1e-9, "{name}: |*ω + ω| = {n:.3e}");
        }
    }
}

#[test]
fn star_squares_to_identity() {
    let om = TwoForm::from_comps([
        ScalarField::Analytic(parse("z + 2*w").unwrap()),
        ScalarField::Analytic(parse("exp(0.3*zt)").unwrap()),
        ScalarField::Analytic(parse("1 - w*wt").unwrap()),
        ScalarField::Analytic(parse("0.5*zt*w").unwrap()),
        ScalarField::Analytic(parse("z*z").unwrap()),
        ScalarField::Analytic(parse("wt").unwrap()),
    ]);
    for (name, g) in all_metrics() {
        let ss = hodge_star(&g, &hodge_star(&g, &om).unwrap()).unwrap();
        let pts = sample_lattice(&g.chart, 3);
        let n = ss.sub(&om).unwrap().max_norm(&pts).unwrap();
        assert!(n <= 1e-10, "{name}: |*²ω − ω| = {n:.3e}");
    }
}

#[test]
fn self_dual_form_on_flat_background() {
    // (i/2)(dz∧dz̃ − dw∧dw̃) is dx1∧dx2 − dx3∧dx4, self-dual under the
    // orientation that makes κ anti-self-dual.
    let half_i = C::new(0.0, 0.5);
    let mut om = TwoForm::zero();
    om.comps[1] = ScalarField::constant(half_i);
    om.comps[4] = ScalarField::constant(-half_i);
    let g = flat();
    let s = hodge_star(&g, &om).unwrap();
    let pts = sample_lattice(&g.chart, 2);
    let n = s.sub(&om).unwrap().max_norm(&pts).unwrap();
    assert!(n <= 1e-10, "|*ω − ω| = {n:.3e}");
}

#[test]
fn exterior_derivative_squares_to_zero() {
    let alpha = OneForm {
        comps: [
            ScalarField::Analytic(parse("z*z*wt").unwrap()),
            ScalarField::Analytic(parse("exp(0.2*z) * zt").unwrap()),
            ScalarField::Analytic(parse("w + zt*zt").unwrap()),
            ScalarField::Analytic(parse("z*w*zt*wt").unwrap()),
        ],
    };
    let dd = alpha.d().unwrap().d().unwrap();
    let pts = sample_lattice(&ChartBox::cube(-1.0, 1.0), 4);
    let n = dd.max_norm(&pts).unwrap();
    assert!(n <= 1e-10, "|ddα| = {n:.3e}");
}

#[test]
fn lee_form_vanishes_on_kahler_metrics() {
    for (name, g) in [("flat", flat()), ("eguchi_hanson", eguchi_hanson())] {
        let data = lee_form(&g).unwrap();
        let pts = sample_lattice(&g.chart, 4);
        let n = data.f.max_norm(&pts).unwrap();
        assert!(n <= 1e-9, "{name}: |f| = {n:.3e}");
        assert!(data.conformally_kahler);
        let phi = data.phi.unwrap();
        for p in &pts {
            let v = phi.eval(p).unwrap();
            assert!((v - C::new(1.0, 0.0)).norm() <= 1e-9, "{name}: φ = {v}");
        }
    }
}

#[test]
fn lee_form_of_conformally_rescaled_flat() {
    // ĝ = e^{2u}·flat with u = 0.1ρ² has f = −du and φ = e^{−u}.
    let g = conformal_flat();
    let data = lee_form(&g).unwrap();
    assert!(data.solve_residual <= 1e-9, "solve {}", data.solve_residual);
    assert!(
        data.closedness_residual <= 1e-9,
        "closedness {}",
        data.closedness_residual
    );
    let u = parse("0.1*(z*zt + w*wt)").unwrap();
    let pts = sample_lattice(&g.chart, 4);
    for p in &pts {
        let fz = data.f.comps[0].eval(p).unwrap();
        let want = -u.diff(crate::expr::Var::Z).eval(&p.vals()).unwrap();
        assert!((fz - want).norm() <= 1e-9, "f_z = {fz} want {want}");
    }
    let phi = data.phi.as_ref().unwrap();
    for p in &pts {
        let got = phi.eval(p).unwrap();
        let want = (-u.eval(&p.vals()).unwrap()).exp();
        assert!((got - want).norm() <= 1e-8, "φ = {got} want {want}");
    }
}

#[test]
fn validate_s_flat() {
    let g = flat();
    let ok = validate_s(&g, &ScalarField::one()).unwrap();
    assert!(ok.max_residual <= 1e-12);
    // s = z violates the second condition: C₂ = −∂_z(z·g_ww̃) = −1.
    let bad = validate_s(&g, &ScalarField::Analytic(Expr::z())).unwrap();
    assert!(
        (bad.max_residual - 1.0).abs() <= 1e-12,
        "max {}",
        bad.max_residual
    );
}

#[test]
fn validate_s_conformal_flat_catalog_value() {
    // s = e^{−2u} satisfies both conditions for ĝ = e^{2u}·flat.
    let g = conformal_flat();
    let s = ScalarField::Analytic(parse("exp(-0.2*(z*zt + w*wt))").unwrap());
    let ok = validate_s(&g, &s).unwrap();
    assert!(ok.max_residual <= 1e-10, "max {}", ok.max_residual);
}

#[test]
fn solve_s_recovers_conformal_flat_value() {
    let g = conformal_flat();
    let got = solve_s(&g).unwrap();
    assert!(got.compat_residual <= 1e-8, "compat {}", got.compat_residual);
    assert!(
        got.validation.max_residual <= 1e-8,
        "validation {}",
        got.validation.max_residual
    );
    let want = parse("exp(-0.2*(z*zt + w*wt))").unwrap();
    for p in sample_lattice(&g.chart, 3) {
        let a = got.s.eval(&p).unwrap();
        let b = want.eval(&p.vals()).unwrap();
        assert!((a - b).norm() <= 1e-8, "s = {a} want {b}");
    }
}

#[test]
fn solve_s_on_kahler_metrics_gives_unity() {
    for (name, g) in [("burns", burns()), ("eguchi_hanson", eguchi_hanson())] {
        let got = solve_s(&g).unwrap();
        assert!(
            got.validation.max_residual <= 1e-8,
            "{name}: validation {}",
            got.validation.max_residual
        );
        for p in sample_lattice(&g.chart, 3) {
            let v = got.s.eval(&p).unwrap();
            assert!((v - C::new(1.0, 0.0)).norm() <= 1e-10, "{name}: s = {v}");
        }
    }
}

#[test]
fn curvature_of_flat_space_vanishes() {
    let d = curvature_diagnostics(&flat(), 3).unwrap();
    assert!(d.max_w_minus() <= 1e-10);
    assert!(d.max_ricci_tracefree() <= 1e-10);
    let (lo, hi) = d.scalar_range();
    assert!(lo.abs() <= 1e-10 && hi.abs() <= 1e-10);
}

#[test]
fn eguchi_hanson_is_ricci_flat_and_half_flat() {
    let d = curvature_diagnostics(&eguchi_hanson(), 3).unwrap();
    assert!(d.max_ricci_tracefree() <= 1e-8, "ric {}", d.max_ricci_tracefree());
    let (lo, hi) = d.scalar_range();
    assert!(lo.abs() <= 1e-8 && hi.abs() <= 1e-8, "scalar [{lo}, {hi}]");
    assert!(d.max_w_minus() <= 1e-8, "W⁻ {}", d.max_w_minus());
}

#[test]
fn burns_is_scalar_flat_but_not_einstein() {
    let d = curvature_diagnostics(&burns(), 3).unwrap();
    let (lo, hi) = d.scalar_range();
    assert!(lo.abs() <= 1e-8 && hi.abs() <= 1e-8, "scalar [{lo}, {hi}]");
    assert!(d.max_ricci_tracefree() > 1e-3, "ric {}", d.max_ricci_tracefree());
    assert!(d.max_w_minus() <= 1e-8, "W⁻ {}", d.max_w_minus());
    assert!(d.max_type_d_gap() <= 1e-8, "gap {}", d.max_type_d_gap());
}

#[test]
fn fubini_study_is_einstein_but_not_half_flat() {
    let d = curvature_diagnostics(&fubini_study(), 3).unwrap();
    assert!(d.max_ricci_tracefree() <= 1e-8, "ric {}", d.max_ricci_tracefree());
    let (lo, hi) = d.scalar_range();
    assert!(hi - lo <= 1e-8, "scalar not constant: [{lo}, {hi}]");
    assert!(lo > 0.0, "scalar {lo}");
    assert!(d.max_type_d_gap() <= 1e-8, "gap {}", d.max_type_d_gap());
    assert!(d.min_abs_psi2() > 1e-2, "ψ₂ {}", d.min_abs_psi2());
}
