mod common;

use common::{fd_gradient, rel_err, FD_STEP};
use poisson_lab::expr::{parse_expr, Expr, Jet};
use poisson_lab::fields::{
    hamiltonian_field, jacobiator, koszul_bracket, lie_bracket, lie_derivative_covector, lie_derivative_pi, Local,
};
use poisson_lab::{gallery, load_structure, LoadOptions, Structure};

fn field(src: &[&str]) -> Vec<Expr> {
    let c: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    src.iter().map(|s| parse_expr(s, &c).unwrap()).collect()
}

fn jets(f: &[Expr], p: &[f64]) -> Vec<Jet> {
    f.iter().map(|e| e.eval_jet(p).unwrap()).collect()
}

fn vals(f: &[Expr], p: &[f64]) -> Vec<f64> {
    f.iter().map(|e| e.eval::<f64>(p).unwrap()).collect()
}

/// `∂_l` of component `i` of a pointwise vector-valued function.
fn fd_jacobian(f: &dyn Fn(&[f64]) -> Vec<f64>, p: &[f64]) -> Vec<Vec<f64>> {
    let n = f(p).len();
    (0..n)
        .map(|i| fd_gradient(|x| f(x)[i], p, FD_STEP))
        .collect()
}

fn pi_at(s: &Structure, p: &[f64]) -> Vec<Vec<f64>> {
    let l = Local::new(s, p).unwrap();
    (0..p.len()).map(|i| l.pi_values().row(i)).collect()
}

fn sharp_at(s: &Structure, p: &[f64], a: &[f64]) -> Vec<f64> {
    let pi = pi_at(s, p);
    (0..p.len()).map(|j| (0..p.len()).map(|i| a[i] * pi[i][j]).sum()).collect()
}

const X: [&str; 3] = ["sin(y) + x*z", "x^2 - z", "cos(x*y)"];
const Y: [&str; 3] = ["y*z", "exp(x/3)", "x - y^2"];
const A: [&str; 3] = ["z^2 + 1", "sin(x + z)", "x*y"];
const B: [&str; 3] = ["cos(z)", "x^3/5", "y + z*x"];

fn test_points() -> Vec<Vec<f64>> {
    gallery::structure("so3_euclid").unwrap().sample_points(20, 91)
}

fn assert_close(a: &[f64], b: &[f64], what: &str) {
    for (x, y) in a.iter().zip(b) {
        assert!(rel_err(*x, *y) < 1e-6, "{what}: {a:?} vs {b:?}");
    }
}

#[test]
fn lie_bracket_of_vector_fields() {
    let (x, y) = (field(&X), field(&Y));
    for p in test_points() {
        let dx = fd_jacobian(&|q| vals(&x, q), &p);
        let dy = fd_jacobian(&|q| vals(&y, q), &p);
        let (xv, yv) = (vals(&x, &p), vals(&y, &p));
        let oracle: Vec<f64> = (0..3)
            .map(|i| (0..3).map(|l| xv[l] * dy[i][l] - yv[l] * dx[i][l]).sum())
            .collect();
        assert_close(&lie_bracket(&jets(&x, &p), &jets(&y, &p)), &oracle, "[X,Y]");
    }
}

#[test]
fn lie_derivative_of_a_covector_field() {
    let (x, b) = (field(&X), field(&B));
    for p in test_points() {
        // L_X β = i_X dβ + d(β(X))
        let db = fd_jacobian(&|q| vals(&b, q), &p);
        let xv = vals(&x, &p);
        let dpair = fd_gradient(|q| vals(&b, q).iter().zip(vals(&x, q)).map(|(u, v)| u * v).sum(), &p, FD_STEP);
        let oracle: Vec<f64> = (0..3)
            .map(|i| (0..3).map(|k| xv[k] * (db[i][k] - db[k][i])).sum::<f64>() + dpair[i])
            .collect();
        assert_close(&lie_derivative_covector(&jets(&x, &p), &jets(&b, &p)), &oracle, "L_X beta");
    }
}

#[test]
fn koszul_bracket_from_its_definition() {
    let (a, b) = (field(&A), field(&B));
    for id in ["so3_euclid", "sl2_lorentz", "so3_rescaled"] {
        let s = gallery::structure(id).unwrap();
        for p in s.sample_points(15, 5) {
            // [α,β] = L_{π♯α}β − L_{π♯β}α − d(π(α,β)), each Lie derivative via Cartan
            let lie = |u: &[Expr], w: &[Expr]| -> Vec<f64> {
                let xu = |q: &[f64]| sharp_at(&s, q, &vals(u, q));
                let dw = fd_jacobian(&|q| vals(w, q), &p);
                let xv = xu(&p);
                let dpair = fd_gradient(|q| vals(w, q).iter().zip(xu(q)).map(|(m, n)| m * n).sum(), &p, FD_STEP);
                (0..3)
                    .map(|i| (0..3).map(|k| xv[k] * (dw[i][k] - dw[k][i])).sum::<f64>() + dpair[i])
                    .collect()
            };
            let pab = |q: &[f64]| {
                let av = vals(&a, q);
                let xb = sharp_at(&s, q, &vals(&b, q));
                av.iter().zip(xb).map(|(m, n)| -m * n).sum::<f64>()
            };
            // π(α, β) = α(π♯β)·(−1)
            let dp = fd_gradient(pab, &p, FD_STEP);
            let (la, lb) = (lie(&a, &b), lie(&b, &a));
            let oracle: Vec<f64> = (0..3).map(|i| la[i] - lb[i] - dp[i]).collect();
            let local = Local::new(&s, &p).unwrap();
            assert_close(&koszul_bracket(&local, &jets(&a, &p), &jets(&b, &p)), &oracle, id);
        }
    }
}

#[test]
fn lie_derivative_of_the_bivector() {
    let x = field(&X);
    for id in ["so3_euclid", "so3_rescaled"] {
        let s = gallery::structure(id).unwrap();
        for p in s.sample_points(15, 6) {
            // (L_X π)(α, β) = X(π(α,β)) − π(L_X α, β) − π(α, L_X β) on coordinate forms
            let pi = pi_at(&s, &p);
            let dx = fd_jacobian(&|q| vals(&x, q), &p);
            let xv = vals(&x, &p);
            let local = Local::new(&s, &p).unwrap();
            let lie = lie_derivative_pi(&local, &jets(&x, &p));
            for i in 0..3 {
                for j in 0..3 {
                    let dpij = fd_gradient(|q| pi_at(&s, q)[i][j], &p, FD_STEP);
                    // L_X dx^i = d(X^i)
                    let oracle = (0..3).map(|l| xv[l] * dpij[l]).sum::<f64>()
                        - (0..3).map(|l| dx[i][l] * pi[l][j]).sum::<f64>()
                        - (0..3).map(|l| pi[i][l] * dx[j][l]).sum::<f64>();
                    assert!(rel_err(lie[(i, j)], oracle) < 1e-6, "{id} ({i},{j})");
                }
            }
        }
    }
}

#[test]
fn jacobiator_vanishes_exactly_on_poisson_structures() {
    for id in ["so3_euclid", "so3_rescaled", "sl2_lorentz", "sl2_reg_conformal_rescaled"] {
        let s = gallery::structure(id).unwrap();
        for p in s.sample_points(25, 2) {
            assert!(jacobiator(&Local::new(&s, &p).unwrap()) < 1e-12, "{id}");
        }
    }
    let s = gallery::structure("nonpoisson_demo").unwrap();
    let worst = s
        .sample_points(25, 2)
        .iter()
        .map(|p| jacobiator(&Local::new(&s, p).unwrap()))
        .fold(0.0, f64::max);
    assert!(worst > 1e-3);
}

#[test]
fn jacobiator_against_nested_brackets() {
    // {f,g} = π(df, dg); the cyclic sum of {x_a,{x_b,x_c}} via finite differences
    let s = gallery::structure("nonpoisson_demo").unwrap();
    let n = s.dim;
    for p in s.sample_points(10, 4) {
        let pi = pi_at(&s, &p);
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let term = |a: usize, b: usize, c: usize| {
                        let d = fd_gradient(|q| pi_at(&s, q)[b][c], &p, FD_STEP);
                        (0..n).map(|l| pi[a][l] * d[l]).sum::<f64>()
                    };
                    worst = worst.max((term(a, b, c) + term(b, c, a) + term(c, a, b)).abs());
                }
            }
        }
        let j = jacobiator(&Local::new(&s, &p).unwrap());
        assert!(rel_err(j, worst) < 1e-6, "{j} vs {worst}");
    }
}

#[test]
fn hamiltonian_field_is_anchor_of_differential() {
    let s = gallery::structure("sl2_lorentz").unwrap();
    let c: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let f = parse_expr("x*y - sin(z)", &c).unwrap();
    for p in s.sample_points(20, 8) {
        let df = fd_gradient(|q| f.eval::<f64>(q).unwrap(), &p, FD_STEP);
        let oracle = sharp_at(&s, &p, &df);
        assert_close(&hamiltonian_field(&s, &f, &p).unwrap(), &oracle, "X_f");
    }
}

#[test]
fn non_poisson_files_need_the_override() {
    let text = gallery::get("nonpoisson_demo").unwrap().text;
    assert!(load_structure(&text, LoadOptions::default()).is_err());
    assert!(load_structure(&text, LoadOptions { allow_non_poisson: true }).is_ok());
}
