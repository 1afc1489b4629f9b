use super::*;
use crate::expr::{parse, Var};
use std::sync::Arc;

fn unit_grid(n: usize) -> Arc<Grid> {
    Grid::new(ChartBox::cube(-1.0, 1.0), GridSpec::new(n)).unwrap()
}

#[test]
fn grid_spec_rejects_small_or_even() {
    assert!(GridSpec::new(7).validate().is_err());
    assert!(GridSpec::new(10).validate().is_err());
    assert!(GridSpec::new(9).validate().is_ok());
}

#[test]
fn sampled_derivative_matches_exact() {
    let grid = unit_grid(17);
    let f = ScalarField::Analytic(parse("exp(z*zt)").unwrap());
    let s = f.sample(&grid, 0).unwrap();
    let dz_exact = f.derive(Var::Z).unwrap();
    let dz_grid = ScalarField::Sampled(s.derive(Var::Z));
    let diff = dz_grid.sub(&dz_exact).unwrap();
    let err = diff.max_norm(&[]).unwrap();
    let h: f64 = grid.h_max();
    // Derivative scale of exp(z*zt) on the unit box is of order e^2.
    let tol = crate::tol::sampled(h, (2.0f64).exp());
    assert!(err < tol, "err {err} vs tol {tol}");
}

#[test]
fn richardson_refinement_improves_by_fourth_order() {
    // Error of the grid d/dz of exp(z*zt) should drop by about 16x from a
    // 17-point to a 33-point grid; require at least 12x.
    let f = ScalarField::Analytic(parse("exp(z*zt)").unwrap());
    let dz_exact = f.derive(Var::Z).unwrap();
    // Measure the error over the same physical region on both grids so the
    // boundary layer (where the derivative scale is largest) does not pollute
    // the finer grid's figure.
    let err_at = |n: usize| {
        let grid = unit_grid(n);
        let s = f.sample(&grid, 0).unwrap();
        let dz = s.derive(Var::Z);
        let mut worst = 0.0f64;
        for fl in dz.grid.interior_indices(dz.margin) {
            let p = dz.grid.point(dz.grid.unflat(fl));
            if p.x.iter().any(|v| v.abs() > 0.75 + 1e-12) {
                continue;
            }
            let exact = dz_exact.eval(&p).unwrap();
            worst = worst.max((dz.vals[fl] - exact).norm());
        }
        worst
    };
    let e17 = err_at(17);
    let e33 = err_at(33);
    assert!(
        e17 / e33 >= 12.0,
        "refinement factor {} below 12 (e17 {e17}, e33 {e33})",
        e17 / e33
    );
}

#[test]
fn matrix_inverse_identity_residual() {
    // Symbolic 2x2 inverse of a generic analytic matrix.
    let m = MatrixField::from_exprs(
        2,
        2,
        vec![
            parse("1 + z*zt").unwrap(),
            parse("w").unwrap(),
            parse("zt*wt").unwrap(),
            parse("2 + w*wt").unwrap(),
        ],
    );
    let inv = m.inverse(None).unwrap();
    let prod = m.matmul(&inv).unwrap();
    let pts = sample_lattice(&ChartBox::cube(-0.8, 0.8), 3);
    let resid = prod
        .sub(&MatrixField::identity(2))
        .unwrap()
        .max_norm(&pts)
        .unwrap();
    assert!(resid < 1e-12, "resid {resid}");
}

#[test]
fn sampled_matrix_inverse_identity_residual() {
    let grid = unit_grid(9);
    let m = MatrixField::from_exprs(
        2,
        2,
        vec![
            parse("2 + z*zt").unwrap(),
            parse("0.3*w").unwrap(),
            parse("0.3*wt").unwrap(),
            parse("2 - 0.1*w*wt").unwrap(),
        ],
    )
    .sample(&grid, 0)
    .unwrap();
    let inv = m.inverse(Some(&grid)).unwrap();
    let prod = m.matmul(&inv).unwrap();
    let resid = prod
        .sub(&MatrixField::identity(2))
        .unwrap()
        .max_norm(&[])
        .unwrap();
    assert!(resid < 1e-12, "resid {resid}");
}

#[test]
fn closure_field_derivatives_flow_through_products() {
    // Closure field with stored derivatives: s = exp(z*zt) wrapped opaquely.
    let e = parse("exp(z*zt)").unwrap();
    let ec = e.clone();
    let d: [ScalarField; 4] = [
        ScalarField::Analytic(e.diff(Var::Z)),
        ScalarField::Analytic(e.diff(Var::W)),
        ScalarField::Analytic(e.diff(Var::Zt)),
        ScalarField::Analytic(e.diff(Var::Wt)),
    ];
    let s = ScalarField::closure(move |p| Ok(ec.eval(&p.vals())?), Some(d));
    let g = ScalarField::Analytic(parse("z + w*wt").unwrap());
    let prod = s.mul(&g).unwrap();
    let dz = prod.derive(Var::Z).unwrap();
    let expect = ScalarField::Analytic(
        parse("exp(z*zt)*zt*(z + w*wt) + exp(z*zt)").unwrap(),
    );
    let pts = sample_lattice(&ChartBox::cube(-0.5, 0.5), 3);
    let err = dz.sub(&expect).unwrap().max_norm(&pts).unwrap();
    assert!(err < 1e-12, "err {err}");
}

#[test]
fn binary_roundtrip_and_csv() {
    let grid = unit_grid(9);
    let m = MatrixField::from_exprs(
        1,
        2,
        vec![parse("z*w").unwrap(), parse("exp(0.1*z*zt)").unwrap()],
    );
    let mut buf = Vec::new();
    serialize::write_matrix(&mut buf, &m, &grid).unwrap();
    let (back, grid2) = serialize::read_matrix(&mut buf.as_slice()).unwrap();
    assert_eq!(grid.n, grid2.n);
    let diff = back.sub(&m.sample(&grid2, 0).unwrap()).unwrap();
    assert!(diff.max_norm(&[]).unwrap() == 0.0, "binary roundtrip must be exact");

    let mut csv = Vec::new();
    serialize::write_csv(&mut csv, &m, &grid).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("x1,x2,x3,x4,re_00,im_00,re_01,im_01"));
    assert_eq!(text.lines().count(), 1 + 9usize.pow(4));
}

#[test]
fn det_sum_is_thread_count_independent() {
    let vals: Vec<f64> = (0..100_000).map(|i| (i as f64 * 0.37).sin() * 1e-3).collect();
    let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let pool8 = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
    let s1 = pool1.install(|| det_sum(&vals));
    let s8 = pool8.install(|| det_sum(&vals));
    assert_eq!(s1.to_bits(), s8.to_bits());
}
