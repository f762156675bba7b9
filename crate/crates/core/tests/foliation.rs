use poisson_lab::classify::mean_curvature;
use poisson_lab::connections::covariant_christoffels;
use poisson_lab::fields::Local;
use poisson_lab::foliation::{
    interpolate, leaf_frame, leaf_frame_jet, leaf_metric, leaf_symplectic, preimage, trace_leaf, Leg, EPS_RANK,
};
use poisson_lab::{gallery, Error};

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[test]
fn so3_flow_is_a_rotation() {
    let s = gallery::structure("so3_euclid").unwrap();
    let trace = trace_leaf(&s, &[0.0, 0.0, 1.0], &[Leg { coord: 0, duration: 10.0 }], 1e-3).unwrap();
    assert_eq!(trace.left_box_at, None);
    for (t, p) in trace.times.iter().zip(&trace.points) {
        let exact = [0.0, t.sin(), t.cos()];
        for (a, b) in p.iter().zip(exact) {
            assert!((a - b).abs() < 1e-6, "t={t}: {p:?}");
        }
    }
    assert!(trace.max_drift[0] < 1e-8);
    // between grid points
    for t in [0.12345, 3.3333, 9.87654] {
        let p = interpolate(&s, &trace, t).unwrap();
        assert!((p[1] - f64::sin(t)).abs() < 1e-6 && (p[2] - f64::cos(t)).abs() < 1e-6);
    }
}

#[test]
fn so3_flow_returns_after_a_full_turn() {
    let s = gallery::structure("so3_euclid").unwrap();
    let tau = std::f64::consts::TAU;
    let trace = trace_leaf(&s, &[0.0, 0.0, 1.0], &[Leg { coord: 0, duration: tau }], 1e-3).unwrap();
    let end = trace.points.last().unwrap();
    assert!((trace.times.last().unwrap() - tau).abs() < 1e-12);
    assert!(end[1].abs() < 1e-4 && (end[2] - 1.0).abs() < 1e-4);
}

#[test]
fn sl2_flow_follows_the_hyperbola() {
    let s = gallery::structure("sl2_lorentz").unwrap();
    let trace = trace_leaf(&s, &[1.0, 0.0, 0.0], &[Leg { coord: 1, duration: 5.0 }], 1e-3).unwrap();
    assert_eq!(trace.left_box_at, None);
    // ẋ = z, ż = x: x = cosh t, z = sinh t
    for (t, p) in trace.times.iter().zip(&trace.points) {
        assert!((p[0] - t.cosh()).abs() < 1e-6 * t.cosh());
        assert!((p[2] - t.sinh()).abs() < 1e-6 * t.cosh());
        assert_eq!(p[1], 0.0);
    }
    assert!(trace.max_drift[0] < 1e-8, "{:e}", trace.max_drift[0]);
}

#[test]
fn multi_leg_schedule_stays_on_the_sphere() {
    let s = gallery::structure("so3_euclid").unwrap();
    let legs = [
        Leg { coord: 0, duration: 1.0 },
        Leg { coord: 1, duration: 0.7 },
        Leg { coord: 2, duration: 2.0 },
    ];
    let trace = trace_leaf(&s, &[0.6, 0.0, 0.8], &legs, 1e-3).unwrap();
    assert!((trace.times.last().unwrap() - 3.7).abs() < 1e-12);
    assert!(trace.max_drift[0] < 1e-8);
}

#[test]
fn leaving_the_box_truncates_the_path() {
    let s = gallery::structure("sl2_lorentz").unwrap();
    let trace = trace_leaf(&s, &[1.0, 0.0, 0.0], &[Leg { coord: 1, duration: 8.0 }], 1e-2).unwrap();
    let t = trace.left_box_at.expect("cosh 8 exceeds the box");
    assert!((t - 100f64.acosh()).abs() < 0.02, "{t}");
    assert!(matches!(
        trace_leaf(&s, &[500.0, 0.0, 0.0], &[], 1e-3),
        Err(Error::LeftValidityBox { .. })
    ));
}

#[test]
fn sphere_leaf_form_and_metric() {
    let s = gallery::structure("so3_euclid").unwrap();
    for p in s.sample_points(30, 3) {
        let local = Local::new(&s, &p).unwrap();
        let frame = leaf_frame(&local, EPS_RANK).unwrap();
        assert_eq!(frame.rank(), 2);
        let r2 = dot(&p, &p);
        let x = cross(&p, &[0.3, -1.0, 0.5]);
        let y = cross(&p, &[1.0, 0.2, -0.4]);
        let w = leaf_symplectic(&local, &frame, &x, &y).unwrap();
        assert!((w - dot(&p, &cross(&x, &y)) / r2).abs() < 1e-12 * (1.0 + w.abs()));
        let g = leaf_metric(&local, &frame, &x, &y).unwrap();
        assert!((g - dot(&x, &y) / r2).abs() < 1e-12 * (1.0 + g.abs()));
        // the radial direction is not tangent
        assert!(matches!(preimage(&local, &frame, &p), Err(Error::NotLeafTangent { .. })));
    }
}

#[test]
fn frames_are_orthonormal_and_adapted() {
    for id in ["so3_reg_conformal", "sl2_lorentz", "product_r5", "so3_times_plane"] {
        let s = gallery::structure(id).unwrap();
        for p in s.sample_points(20, 5) {
            let local = Local::new(&s, &p).unwrap();
            let f = leaf_frame(&local, EPS_RANK).unwrap();
            let all: Vec<(&Vec<f64>, f64)> = f
                .tangent
                .iter()
                .zip(f.tangent_signs.iter().copied())
                .chain(f.normal.iter().zip(f.normal_signs.iter().copied()))
                .collect();
            for (i, (u, su)) in all.iter().enumerate() {
                for (j, (v, _)) in all.iter().enumerate() {
                    let expect = if i == j { *su } else { 0.0 };
                    assert!((local.pair_vectors(u, v) - expect).abs() < 1e-10, "{id}");
                }
            }
            // tangent vectors lie in the image of π♯
            for e in &f.tangent {
                assert!(preimage(&local, &f, e).is_ok());
            }
        }
    }
}

#[test]
fn mean_curvature_of_round_spheres_and_flat_planes() {
    let s = gallery::structure("so3_euclid").unwrap();
    for p in [[0.0, 0.0, 1.0], [0.6, 0.0, 0.8], [0.48, -0.6, 0.64]] {
        let local = Local::new(&s, &p).unwrap();
        let frame = leaf_frame_jet(&local, 2, None).unwrap();
        let h = mean_curvature(&local, &frame, &covariant_christoffels(&local)).unwrap();
        let norm = dot(&h, &h).sqrt();
        assert!((norm - 2.0).abs() < 1e-6, "{norm}");
        // points to the centre
        assert!(dot(&h, &p) < 0.0);
    }
    let s = gallery::structure("euclid_rn_rs:5,2,4").unwrap();
    for p in s.sample_points(10, 1) {
        let local = Local::new(&s, &p).unwrap();
        let frame = leaf_frame_jet(&local, 2, None).unwrap();
        let h = mean_curvature(&local, &frame, &covariant_christoffels(&local)).unwrap();
        assert!(dot(&h, &h).sqrt() < 1e-6);
    }
}

#[test]
fn csv_has_one_row_per_step() {
    let s = gallery::structure("so3_euclid").unwrap();
    let trace = trace_leaf(&s, &[0.0, 0.0, 1.0], &[Leg { coord: 0, duration: 0.01 }], 1e-3).unwrap();
    let csv = trace.to_csv(&s.coords);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,x,y,z,drift1");
    assert_eq!(lines.len(), trace.times.len() + 1);
}
