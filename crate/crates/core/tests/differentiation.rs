mod common;

use common::{fd_gradient, gallery_structures, rel_err, FD_STEP};
use poisson_lab::expr::{parse_expr, Expr, Func};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

#[test]
fn gallery_component_jets_match_central_differences() {
    for (s, _) in gallery_structures() {
        let points = s.sample_points(100, 0xd1ff);
        assert!(!points.is_empty(), "{}", s.name);
        for (label, e) in s.components() {
            for p in &points {
                let jet = e.eval_jet(p).unwrap();
                let fd = fd_gradient(|x| e.eval::<f64>(x).unwrap(), p, FD_STEP);
                for (k, (a, b)) in jet.partials().iter().zip(&fd).enumerate() {
                    assert!(
                        rel_err(*a, *b) < 1e-6,
                        "{} {label} d{k} at {p:?}: jet {a} fd {b}",
                        s.name
                    );
                }
            }
        }
    }
}

fn coords() -> Vec<String> {
    ["x", "y", "z"].iter().map(|s| s.to_string()).collect()
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0usize..3).prop_map(Expr::coord),
        (-3.0f64..3.0).prop_map(|c| Expr::constant((c * 8.0).round() / 8.0)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            inner.clone().prop_map(Expr::neg),
            inner.clone().prop_map(|a| Expr::call(Func::Sin, a)),
            inner.clone().prop_map(|a| Expr::call(Func::Cos, a)),
            inner.clone().prop_map(|a| Expr::pow(a, 2.0)),
            inner.clone().prop_map(|a| Expr::pow(a, 3.0)),
            inner
                .clone()
                .prop_map(|a| Expr::div(a, Expr::add(Expr::constant(2.0), Expr::mul(Expr::coord(0), Expr::coord(0))))),
            inner.prop_map(|a| Expr::call(Func::Exp, Expr::call(Func::Sin, a))),
        ]
    })
}

fn arb_point() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.5f64..1.5, 3)
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 256,
        rng_seed: RngSeed::Fixed(0x5eed),
        ..ProptestConfig::default()
    })]

    #[test]
    fn jets_match_finite_differences(e in arb_expr(), p in arb_point()) {
        let jet = e.eval_jet(&p).unwrap();
        let fd = fd_gradient(|x| e.eval::<f64>(x).unwrap(), &p, FD_STEP);
        for (a, b) in jet.partials().iter().zip(&fd) {
            prop_assert!(rel_err(*a, *b) < 1e-6, "{e}: jet {a} fd {b}");
        }
    }

    #[test]
    fn symbolic_derivative_agrees_with_jet(e in arb_expr(), p in arb_point()) {
        let jet = e.eval_jet(&p).unwrap();
        for k in 0..3 {
            let d = e.derivative(k).eval::<f64>(&p).unwrap();
            prop_assert!(rel_err(d, jet.d(k)) < 1e-12, "{e} d{k}: {d} vs {}", jet.d(k));
        }
    }

    #[test]
    fn source_round_trip_preserves_values(e in arb_expr(), p in arb_point()) {
        let src = e.to_source(&coords());
        let back = parse_expr(&src, &coords()).unwrap();
        let a = e.eval::<f64>(&p).unwrap();
        let b = back.eval::<f64>(&p).unwrap();
        prop_assert!(rel_err(a, b) < 1e-13, "{src}: {a} vs {b}");
    }
}

#[test]
fn parser_precedence() {
    let c = coords();
    let e = parse_expr("-x^2 + 2*y*z", &c).unwrap();
    assert_eq!(e.eval::<f64>(&[3.0, 1.0, 2.0]).unwrap(), -5.0);
    let e = parse_expr("2^3^2", &c).unwrap();
    assert_eq!(e.eval::<f64>(&[0.0; 3]).unwrap(), 512.0);
    assert!(parse_expr("2 x", &c).is_err());
    assert!(parse_expr("w + 1", &c).is_err());
}
