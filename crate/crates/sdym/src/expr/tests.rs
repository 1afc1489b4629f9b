use super::*;
use crate::expr::parse;
use proptest::prelude::*;

fn vals(z: C, w: C) -> VarVals {
    [z, w, z.conj(), w.conj()]
}

/// Finite-difference oracle for Wirtinger derivatives on the real slice:
/// fourth-order central differences along x1..x4, combined as
/// d/dz = (d/dx1 - i d/dx2)/2 etc.
fn fd_wirtinger(e: &Expr, v: Var, z: C, w: C) -> C {
    let h = 1e-4;
    let f = |x: [f64; 4]| {
        let zz = C::new(x[0], x[1]);
        let ww = C::new(x[2], x[3]);
        e.eval(&[zz, ww, zz.conj(), ww.conj()]).unwrap()
    };
    let x0 = [z.re, z.im, w.re, w.im];
    let axis = |k: usize| {
        let mut xp = x0;
        let mut xpp = x0;
        let mut xm = x0;
        let mut xmm = x0;
        xp[k] += h;
        xpp[k] += 2.0 * h;
        xm[k] -= h;
        xmm[k] -= 2.0 * h;
        (-f(xpp) + 8.0 * f(xp) - 8.0 * f(xm) + f(xmm)) / (12.0 * h)
    };
    let i = C::new(0.0, 1.0);
    match v {
        Var::Z => (axis(0) - i * axis(1)) / 2.0,
        Var::Zt => (axis(0) + i * axis(1)) / 2.0,
        Var::W => (axis(2) - i * axis(3)) / 2.0,
        Var::Wt => (axis(2) + i * axis(3)) / 2.0,
    }
}

#[test]
fn derivative_of_z2zt_frozen_value() {
    // d/dz (z^2 * zt) = 2 z zt; at z = 1+i (zt = 1-i) this is 4.
    let e = parse("z^2*zt").unwrap();
    let d = e.diff(Var::Z);
    let z = C::new(1.0, 1.0);
    let got = d.eval(&vals(z, C::new(0.0, 0.0))).unwrap();
    assert!((got - C::new(4.0, 0.0)).norm() < 1e-12, "got {got}");
}

#[test]
fn derivatives_match_fd_oracle() {
    let cases = [
        "z^2*zt + w*wt",
        "exp(z*zt - w*wt)",
        "log(1 + z*zt + w*wt)",
        "sqrt(1 + z*zt)",
        "(z + w)/(2 + z*zt)",
        "conj(z^2*w)",
        "exp(z)*exp(zt) - z^3/(1+w*wt)",
    ];
    let z = C::new(0.3, -0.2);
    let w = C::new(-0.1, 0.4);
    for src in cases {
        let e = parse(src).unwrap();
        for v in Var::ALL {
            let sym = e.diff(v).eval(&vals(z, w)).unwrap();
            let fd = fd_wirtinger(&e, v, z, w);
            assert!(
                (sym - fd).norm() < 1e-9,
                "{src} d/d{}: sym {sym} vs fd {fd}",
                v.name()
            );
        }
    }
}

#[test]
fn variables_are_mutually_independent() {
    let e = parse("z*zt").unwrap();
    assert!(e.diff(Var::Z).diff(Var::Z).is_zero());
    let dzt = e.diff(Var::Zt);
    assert_eq!(dzt.eval(&vals(C::new(2.0, 1.0), C::new(0.0, 0.0))).unwrap(), C::new(2.0, 1.0));
    assert!(e.diff(Var::W).is_zero());
}

#[test]
fn conj_swaps_variables() {
    let e = parse("conj(z*w + i)").unwrap();
    let expect = parse("zt*wt - i").unwrap();
    let p = vals(C::new(0.7, 0.3), C::new(-0.2, 0.9));
    assert!((e.eval(&p).unwrap() - expect.eval(&p).unwrap()).norm() < 1e-15);
}

#[test]
fn syntax_error_reports_byte_offset() {
    let e = parse("z +* w").unwrap_err();
    assert_eq!(e.offset, 3);
    assert!(parse("exp(z").is_err());
    assert!(parse("z^w").is_err(), "non-integer exponent must be rejected");
    assert!(parse("foo(z)").is_err(), "unknown function");
}

#[test]
fn singular_evaluation_is_reported() {
    let e = parse("1/(z - 1)").unwrap();
    let err = e.eval(&vals(C::new(1.0, 0.0), C::new(0.0, 0.0))).unwrap_err();
    assert!(matches!(err, EvalError::Singular { .. }));
    let e = parse("log(z)").unwrap();
    assert!(e.eval(&vals(C::new(0.0, 0.0), C::new(0.0, 0.0))).is_err());
    assert!(e.eval(&vals(C::new(-1.0, 0.0), C::new(0.0, 0.0))).is_err());
    let e = parse("sqrt(z)").unwrap();
    assert!(e.eval(&[C::new(-2.0, 0.0); 4]).is_err());
}

#[test]
fn unbound_parameter_is_reported() {
    let e = parse("a*z").unwrap();
    assert_eq!(
        e.eval(&vals(C::new(1.0, 0.0), C::new(0.0, 0.0))),
        Err(EvalError::UnboundParam("a".into()))
    );
    let mut params = Params::new();
    params.insert("a".into(), 2.5);
    let bound = e.bind_params(&params);
    assert_eq!(bound.eval(&vals(C::new(2.0, 0.0), C::new(0.0, 0.0))).unwrap(), C::new(5.0, 0.0));
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-2.0..2.0f64).prop_map(Expr::real),
        Just(Expr::z()),
        Just(Expr::w()),
        Just(Expr::zt()),
        Just(Expr::wt()),
        Just(Expr::i()),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.sub(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(&b)),
            (inner.clone(), 1..4i32).prop_map(|(a, n)| a.pow(n)),
            inner.clone().prop_map(|a| a.neg()),
            inner.clone().prop_map(|a| a.mul(&Expr::real(0.1)).exp()),
        ]
    })
}

proptest! {
    /// Round trip: printing then reparsing reproduces the same tree.
    #[test]
    fn print_parse_roundtrip(e in arb_expr()) {
        let printed = e.to_string();
        let back = parse(&printed).unwrap();
        prop_assert_eq!(back, e);
    }

    /// Product rule checked against the finite-difference oracle.
    #[test]
    fn product_rule_holds(a in arb_expr(), b in arb_expr()) {
        let prod = a.mul(&b);
        let z = C::new(0.23, -0.31);
        let w = C::new(0.17, 0.11);
        let p = vals(z, w);
        for v in Var::ALL {
            let lhs = prod.diff(v).eval(&p).unwrap();
            let rhs = a.diff(v).eval(&p).unwrap() * b.eval(&p).unwrap()
                + a.eval(&p).unwrap() * b.diff(v).eval(&p).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-8 * (1.0 + lhs.norm() + rhs.norm()));
        }
    }

    /// Structural conjugation agrees with numeric conjugation on the real slice.
    #[test]
    fn conj_matches_numeric_conj(e in arb_expr()) {
        let z = C::new(0.4, 0.2);
        let w = C::new(-0.3, 0.6);
        let p = vals(z, w);
        let lhs = e.conj().eval(&p).unwrap();
        let rhs = e.eval(&p).unwrap().conj();
        prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
    }
}
