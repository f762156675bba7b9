mod common;

use poisson_lab::connections::{contravariant_christoffels, nabla_pi};
use poisson_lab::fields::Local;
use poisson_lab::identities::{
    closed_form_symmetry, gradient_lie_derivative, identity_suite, j_pi_bridge, nijenhuis_bridge, omega_pi_bridge,
    IDENTITIES,
};
use poisson_lab::{gallery, Jet, Status};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_form(rng: &mut ChaCha8Rng, n: usize) -> Vec<Jet> {
    (0..n)
        .map(|_| {
            let d: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            Jet::from_parts(rng.random_range(-1.0..1.0), &d)
        })
        .collect()
}

#[test]
fn suite_passes_on_every_poisson_structure() {
    for (s, poisson) in common::gallery_structures() {
        if !poisson {
            continue;
        }
        let r = identity_suite(&s, 25, 17).unwrap();
        assert_eq!(r.records.len(), IDENTITIES.len());
        let failed: Vec<_> = r
            .records
            .iter()
            .filter(|rec| rec.status == Status::Fail)
            .map(|rec| (rec.name.clone(), rec.max_defect))
            .collect();
        assert!(failed.is_empty(), "{}: {failed:?}", s.name);
        assert!(r.passed());
        for always in ["anchor_lie_commutator", "contravariant_metricity", "contravariant_torsion", "j_pi_bridge"] {
            assert!(r.record(always).unwrap().evaluated > 0, "{}/{always}", s.name);
        }
    }
}

#[test]
fn nonpoisson_structure_breaks_the_kernel_identity() {
    let s = gallery::structure("nonpoisson_demo").unwrap();
    let r = identity_suite(&s, 25, 17).unwrap();
    assert_eq!(r.record("kernel_anchor_symmetry").unwrap().status, Status::Fail);
    assert!(!r.passed());
    // identities that do not use the Jacobi identity survive
    for name in ["koszul_antisymmetry", "contravariant_metricity", "contravariant_torsion", "covariant_metricity"] {
        assert_eq!(r.record(name).unwrap().status, Status::Pass, "{name}");
    }
}

#[test]
fn gradient_identity_needs_the_minus_sign() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut plus_worst = 0.0f64;
    for id in ["so3_euclid", "sl2_reg_conformal", "symplectic_r2_conformal"] {
        let s = gallery::structure(id).unwrap();
        for p in s.sample_points(10, 1) {
            let local = Local::new(&s, &p).unwrap();
            let gamma = contravariant_christoffels(&local);
            let alpha = random_form(&mut rng, local.dim());
            assert!(gradient_lie_derivative(&local, &gamma, &alpha, -1.0) < 1e-9, "{id}");
            plus_worst = plus_worst.max(gradient_lie_derivative(&local, &gamma, &alpha, 1.0));
        }
    }
    assert!(plus_worst > 1e-3);
}

#[test]
fn bridges_hold_on_almost_kahler_poisson_examples() {
    for id in ["kahler_r4", "symplectic_r2_conformal", "so3_reg_conformal", "sl2_reg_conformal_dual"] {
        let s = gallery::structure(id).unwrap();
        for p in s.sample_points(15, 2) {
            let local = Local::new(&s, &p).unwrap();
            let gamma = contravariant_christoffels(&local);
            assert!(j_pi_bridge(&local, &gamma).unwrap() < 1e-9, "{id}");
            assert!(nijenhuis_bridge(&local, &gamma).unwrap() < 1e-9, "{id}");
        }
    }
}

#[test]
fn omega_and_pi_parallelism_coincide_in_two_dimensions() {
    for id in ["symplectic_r2_conformal", "symplectic_r2_killing", "euclid_rn_rs:2,1,2"] {
        let s = gallery::structure(id).unwrap();
        for p in s.sample_points(20, 3) {
            let local = Local::new(&s, &p).unwrap();
            assert!(omega_pi_bridge(&local).unwrap() < 1e-9, "{id}");
        }
    }
}

#[test]
fn closed_forms_are_symmetric_under_parallel_pi() {
    let s = gallery::structure("so3_rescaled").unwrap();
    for p in s.sample_points(10, 8) {
        let local = Local::new(&s, &p).unwrap();
        let gamma = contravariant_christoffels(&local);
        if nabla_pi(&local, &gamma).max_abs() < 1e-9 {
            assert!(closed_form_symmetry(&local, &gamma) < 1e-9);
        }
    }
}

#[test]
fn suite_is_reproducible() {
    let s = gallery::structure("so3_times_plane").unwrap();
    let a = identity_suite(&s, 10, 5).unwrap();
    let b = identity_suite(&s, 10, 5).unwrap();
    assert_eq!(serde_json::to_value(&a).unwrap(), serde_json::to_value(&b).unwrap());
}
