mod common;

use poisson_lab::classify::transversal_verdicts;
use poisson_lab::fields::Local;
use poisson_lab::foliation::EPS_RANK;
use poisson_lab::gallery::{self, EntryKind};
use poisson_lab::{classify, CheckId, ClassifyOptions, Expect, Status};

fn opts(samples: usize, seed: u64) -> ClassifyOptions {
    ClassifyOptions { samples, seed, ..ClassifyOptions::default() }
}

#[test]
fn gallery_expectations_hold() {
    let mut mismatches = Vec::new();
    for id in common::structure_ids() {
        let entry = gallery::get(&id).unwrap();
        let EntryKind::Structure(s) = &entry.kind else { unreachable!() };
        let report = classify(s, &opts(100, 11)).unwrap();
        for (check, expect) in &entry.expected {
            let rec = report.check(*check).unwrap();
            let ok = match expect {
                Expect::Pass => rec.status == Status::Pass,
                Expect::Fail => rec.status == Status::Fail,
                Expect::Measure => true,
            };
            if !ok {
                mismatches.push(format!("{id}/{check}: expected {expect:?}, got {:?} ({:?})", rec.status, rec.max_defect));
            }
        }
    }
    assert!(mismatches.is_empty(), "{mismatches:#?}");
}

#[test]
fn reports_are_deterministic() {
    let s = gallery::structure("so3_reg_conformal").unwrap();
    let a = classify(&s, &opts(40, 3)).unwrap();
    let b = classify(&s, &opts(40, 3)).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let c = classify(&s, &opts(40, 4)).unwrap();
    assert_ne!(a.check(CheckId::RiemannPoisson).unwrap().worst_point, c.check(CheckId::RiemannPoisson).unwrap().worst_point);
}

#[test]
fn flat_kahler_poisson_passes_everything_tightly() {
    for id in ["euclid_rn_rs:3,1,2", "euclid_rn_rs:5,2,4", "kahler_r4"] {
        let s = gallery::structure(id).unwrap();
        let r = classify(&s, &ClassifyOptions { samples: 50, seed: 1, tol: 1e-10, ..Default::default() }).unwrap();
        for c in [CheckId::Jacobi, CheckId::AlmostKp, CheckId::RiemannPoisson, CheckId::KahlerPoisson, CheckId::DivFree] {
            assert!(r.check(c).unwrap().passed(), "{id}/{c}");
        }
    }
}

#[test]
fn rescaling_makes_so3_killing() {
    let s = gallery::structure("so3_rescaled").unwrap();
    let r = classify(&s, &opts(100, 2)).unwrap();
    assert!(r.check(CheckId::DivFree).unwrap().max_defect.unwrap() < 1e-10);
    assert!(r.check(CheckId::CasimirInvariance).unwrap().max_defect.unwrap() < 1e-8);
    let s = gallery::structure("so3_euclid").unwrap();
    let r = classify(&s, &opts(100, 2)).unwrap();
    assert!(r.check(CheckId::CasimirInvariance).unwrap().max_defect.unwrap() > 1e-2);
}

#[test]
fn divergence_routes_agree() {
    for (s, poisson) in common::gallery_structures() {
        if !poisson {
            continue;
        }
        let r = classify(&s, &opts(20, 5)).unwrap();
        if let Some(c) = r.check(CheckId::DivFree).unwrap().crosscheck {
            assert!(c < 1e-9, "{}: {c:e}", s.name);
        }
    }
}

#[test]
fn kahler_poisson_is_skipped_without_almost_kp() {
    let s = gallery::structure("so3_times_plane").unwrap();
    let r = classify(&s, &opts(10, 0)).unwrap();
    let k = r.check(CheckId::KahlerPoisson).unwrap();
    assert_eq!(k.status, Status::Skipped);
    assert!(k.skip_reason.is_some());
}

#[test]
fn transversal_conditions_agree_pointwise() {
    for (s, poisson) in common::gallery_structures() {
        if !poisson {
            continue;
        }
        let base = Local::new(&s, &s.base).unwrap();
        let rank = base.rank(EPS_RANK);
        for p in s.sample_points(30, 9) {
            let Ok(local) = Local::new(&s, &p) else { continue };
            if local.rank(EPS_RANK) != rank {
                continue;
            }
            let (strong, inv) = transversal_verdicts(&local, rank, 1e-9).unwrap();
            assert_eq!(strong, inv, "{} at {p:?}", s.name);
        }
    }
}

#[test]
fn zero_bivector_is_trivially_parallel() {
    let s = gallery::structure("zero_pi_curved").unwrap();
    let r = classify(&s, &opts(20, 0)).unwrap();
    assert_eq!(r.rank, 0);
    assert!(r.check(CheckId::RiemannPoisson).unwrap().passed());
}
