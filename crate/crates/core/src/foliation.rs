//! Leafwise geometry: adapted frames, the leaf metric and symplectic form,
//! and leaf tracing by Hamiltonian flows.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::expr::{Jet, Scalar};
use crate::fields::Local;
use crate::linalg::{Mat, Orthonormal};
use crate::structure::{PiSpec, Structure};

/// Relative singular-value threshold below which π♯ is treated as degenerate.
pub const EPS_RANK: f64 = 1e-10;

/// Orthonormal frame adapted to the symplectic foliation at a point.
///
/// `tangent` spans the image of π♯, `normal` completes it to a basis of the
/// tangent space, orthogonally for the metric. Built over any scalar; over
/// jets the frame vectors come with their first derivatives.
#[derive(Clone, Debug)]
pub struct LeafFrame<S> {
    pub tangent: Vec<Vec<S>>,
    pub tangent_signs: Vec<f64>,
    pub normal: Vec<Vec<S>>,
    pub normal_signs: Vec<f64>,
    /// Coframe index `i` whose `π♯dx^i` seeded each tangent vector.
    pub pivots: Vec<usize>,
}

impl<S: Scalar> LeafFrame<S> {
    /// Build from π and the metric with a known rank; `forced` overrides the
    /// greedy pivot order of the tangent part.
    pub fn build(
        pi: &Mat<S>,
        gcov: &Mat<S>,
        rank: usize,
        forced: Option<&[usize]>,
    ) -> Result<LeafFrame<S>> {
        let n = pi.rows();
        let images: Vec<Vec<S>> = (0..n).map(|i| pi.row(i)).collect();
        let rank_drop = || Error::RankDrop {
            point: Vec::new(),
        };
        let tangent = Orthonormal::default()
            .extend(gcov, &images, rank, forced, 1e-20)
            .ok_or_else(rank_drop)?;
        let units: Vec<Vec<S>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|k| if k == i { S::one() } else { S::zero() })
                    .collect()
            })
            .collect();
        let full = tangent
            .clone()
            .extend(gcov, &units, n - rank, None, 1e-14)
            .ok_or(Error::SingularG { point: Vec::new() })?;
        Ok(LeafFrame {
            tangent: full.vectors[..rank].to_vec(),
            tangent_signs: full.signs[..rank].to_vec(),
            normal: full.vectors[rank..].to_vec(),
            normal_signs: full.signs[rank..].to_vec(),
            pivots: tangent.pivots,
        })
    }

    pub fn rank(&self) -> usize {
        self.tangent.len()
    }

    /// Whether the metric restricted to the leaf is definite.
    pub fn leaf_definite(&self) -> bool {
        self.tangent_signs.windows(2).all(|w| w[0] == w[1])
    }
}

fn with_point<T>(r: Result<T>, p: &[f64]) -> Result<T> {
    r.map_err(|e| match e {
        Error::RankDrop { .. } => Error::RankDrop { point: p.to_vec() },
        Error::SingularG { .. } => Error::SingularG { point: p.to_vec() },
        other => other,
    })
}

pub fn leaf_frame(local: &Local, eps_rank: f64) -> Result<LeafFrame<f64>> {
    let rank = local.rank(eps_rank);
    leaf_frame_with(local, rank, None)
}

pub fn leaf_frame_with(local: &Local, rank: usize, forced: Option<&[usize]>) -> Result<LeafFrame<f64>> {
    with_point(
        LeafFrame::build(local.pi_values(), local.gcov_values(), rank, forced),
        &local.point,
    )
}

/// The same frame over jets, so its vectors carry first derivatives.
pub fn leaf_frame_jet(local: &Local, rank: usize, forced: Option<&[usize]>) -> Result<LeafFrame<Jet>> {
    with_point(LeafFrame::build(&local.pi, &local.gcov, rank, forced), &local.point)
}

/// Complement covector `β ∈ (Ker π♯)⊥` with `π♯β = x`, by least squares over
/// the frame-generated complement basis.
pub fn preimage(local: &Local, frame: &LeafFrame<f64>, x: &[f64]) -> Result<Vec<f64>> {
    let n = local.dim();
    let r = frame.rank();
    if r == 0 {
        let residual = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        return if residual <= 1e-12 {
            Ok(vec![0.0; n])
        } else {
            Err(Error::NotLeafTangent { residual })
        };
    }
    let basis: Vec<Vec<f64>> = frame.tangent.iter().map(|e| local.lower(e)).collect();
    let images: Vec<Vec<f64>> = basis.iter().map(|b| local.sharp(b)).collect();
    let m = Mat::from_columns(n, &images).to_nalgebra();
    let rhs = DVector::from_column_slice(x);
    let svd = m.clone().svd(true, true);
    let coef = svd
        .solve(&rhs, EPS_RANK * svd.singular_values.max())
        .map_err(|e| Error::Invalid(e.to_string()))?;
    let residual = (&m * &coef - &rhs).amax();
    let scale = 1.0 + rhs.amax();
    if residual > 1e-8 * scale {
        return Err(Error::NotLeafTangent { residual });
    }
    let mut beta = vec![0.0; n];
    for (c, b) in coef.iter().zip(&basis) {
        for (bi, v) in beta.iter_mut().zip(b) {
            *bi += c * v;
        }
    }
    Ok(beta)
}

/// Leaf metric `⟨(π_F♯)⁻¹X, (π_F♯)⁻¹Y⟩` with the cometric.
pub fn leaf_metric(local: &Local, frame: &LeafFrame<f64>, x: &[f64], y: &[f64]) -> Result<f64> {
    let b = preimage(local, frame, x)?;
    let c = preimage(local, frame, y)?;
    Ok(local.pair(&b, &c))
}

/// Leaf symplectic form `ω_F(π♯β, π♯γ) = π(β, γ)`.
pub fn leaf_symplectic(local: &Local, frame: &LeafFrame<f64>, x: &[f64], y: &[f64]) -> Result<f64> {
    let b = preimage(local, frame, x)?;
    let c = preimage(local, frame, y)?;
    Ok(local.pi_pair(&b, &c))
}

/// Tangent-level `J' := −♯∘J∘♭`.
pub fn tangent_j(local: &Local, v: &[f64]) -> Result<Vec<f64>> {
    let j = local.j_values().ok_or(Error::MissingJ)?;
    let jv = j.mul_vec(&local.lower(v));
    Ok(local.raise(&jv).iter().map(|x| -x).collect())
}

/// One leg of a Hamiltonian schedule: flow of `X_{x_coord}` for `duration`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Leg {
    pub coord: usize,
    pub duration: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeafTrace {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    /// Per row, `C(x(t)) − C(x(0))` for each declared Casimir.
    pub drift: Vec<Vec<f64>>,
    pub max_drift: Vec<f64>,
    pub schedule: Vec<Leg>,
    pub step: f64,
    pub method: &'static str,
    /// Time at which the path left the validity box, if it did.
    pub left_box_at: Option<f64>,
}

impl LeafTrace {
    pub fn to_csv(&self, coords: &[String]) -> String {
        let mut out = String::from("t");
        for c in coords {
            out.push(',');
            out.push_str(c);
        }
        for k in 0..self.max_drift.len() {
            out.push_str(&format!(",drift{}", k + 1));
        }
        out.push('\n');
        for ((t, p), d) in self.times.iter().zip(&self.points).zip(&self.drift) {
            out.push_str(&format!("{t:?}"));
            for x in p.iter().chain(d) {
                out.push_str(&format!(",{x:?}"));
            }
            out.push('\n');
        }
        out
    }
}

/// `X_{x_i}(x)`, the `i`-th row of π.
fn coordinate_field(s: &Structure, i: usize, x: &[f64]) -> Result<Vec<f64>> {
    match &s.pi {
        PiSpec::Components(m) => (0..s.dim)
            .map(|j| Ok(m[i * s.dim + j].eval(x)?))
            .collect(),
        PiSpec::NegInverseOmega => Ok(Local::new(s, x)?.pi_values().row(i)),
    }
}

/// Integrate the schedule from `p0` with the classical fourth-order
/// Runge–Kutta scheme at fixed step `h` (the last step of each leg is
/// shortened to land on its end time). Stops early, keeping the partial
/// path, if the trajectory leaves the structure's domain.
pub fn trace_leaf(s: &Structure, p0: &[f64], schedule: &[Leg], h: f64) -> Result<LeafTrace> {
    if !(h > 0.0) {
        return Err(Error::Invalid(format!("step must be positive, got {h}")));
    }
    if !s.in_domain(p0) {
        return Err(Error::LeftValidityBox { time: 0.0 });
    }
    for leg in schedule {
        if leg.coord >= s.dim || !(leg.duration >= 0.0) {
            return Err(Error::Invalid(format!("bad schedule leg {leg:?}")));
        }
    }
    let casimir0: Vec<f64> = s
        .casimirs
        .iter()
        .map(|c| c.eval(p0))
        .collect::<Result<_, _>>()?;
    let drift_at = |x: &[f64]| -> Result<Vec<f64>> {
        s.casimirs
            .iter()
            .zip(&casimir0)
            .map(|(c, c0)| Ok(c.eval(x)? - c0))
            .collect()
    };
    let mut trace = LeafTrace {
        times: vec![0.0],
        points: vec![p0.to_vec()],
        drift: vec![vec![0.0; casimir0.len()]],
        max_drift: vec![0.0; casimir0.len()],
        schedule: schedule.to_vec(),
        step: h,
        method: "rk4",
        left_box_at: None,
    };
    let mut x = p0.to_vec();
    let mut t = 0.0;
    for leg in schedule {
        let steps = (leg.duration / h - 1e-9).ceil().max(0.0) as usize;
        let mut done = 0.0;
        for k in 0..steps {
            let dt = if k + 1 == steps { leg.duration - done } else { h };
            let f = |y: &[f64]| coordinate_field(s, leg.coord, y);
            let axpy = |y: &[f64], a: f64, v: &[f64]| -> Vec<f64> {
                y.iter().zip(v).map(|(yi, vi)| yi + a * vi).collect()
            };
            let k1 = f(&x)?;
            let k2 = f(&axpy(&x, 0.5 * dt, &k1))?;
            let k3 = f(&axpy(&x, 0.5 * dt, &k2))?;
            let k4 = f(&axpy(&x, dt, &k3))?;
            let next: Vec<f64> = (0..x.len())
                .map(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                .collect();
            done += dt;
            let t_next = t + done;
            if !s.in_domain(&next) {
                trace.left_box_at = Some(t_next);
                return Ok(trace);
            }
            let d = drift_at(&next)?;
            for (m, v) in trace.max_drift.iter_mut().zip(&d) {
                *m = m.max(v.abs());
            }
            trace.times.push(t_next);
            trace.points.push(next.clone());
            trace.drift.push(d);
            x = next;
        }
        t += leg.duration;
    }
    Ok(trace)
}

/// Point on the path at time `t`, by cubic Hermite interpolation between
/// the bracketing samples (using the flow field for slopes).
pub fn interpolate(s: &Structure, trace: &LeafTrace, t: f64) -> Result<Vec<f64>> {
    let idx = trace.times.partition_point(|&x| x < t);
    if idx == 0 {
        return Ok(trace.points[0].clone());
    }
    if idx >= trace.times.len() {
        return Ok(trace.points.last().cloned().unwrap_or_default());
    }
    let (t0, t1) = (trace.times[idx - 1], trace.times[idx]);
    let (p0, p1) = (&trace.points[idx - 1], &trace.points[idx]);
    // the leg active on this interval
    let mut acc = 0.0;
    let mut coord = trace.schedule.first().map_or(0, |l| l.coord);
    for leg in &trace.schedule {
        coord = leg.coord;
        acc += leg.duration;
        if t1 <= acc + 1e-12 {
            break;
        }
    }
    let m0 = coordinate_field(s, coord, p0)?;
    let m1 = coordinate_field(s, coord, p1)?;
    let hh = t1 - t0;
    let u = (t - t0) / hh;
    let (h00, h10, h01, h11) = (
        2.0 * u.powi(3) - 3.0 * u * u + 1.0,
        u.powi(3) - 2.0 * u * u + u,
        -2.0 * u.powi(3) + 3.0 * u * u,
        u.powi(3) - u * u,
    );
    Ok((0..p0.len())
        .map(|i| h00 * p0[i] + h10 * hh * m0[i] + h01 * p1[i] + h11 * hh * m1[i])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    #[test]
    fn pole_frame_of_so3() {
        let s = gallery::structure("so3_euclid").unwrap();
        let local = Local::new(&s, &[0.0, 0.0, 1.0]).unwrap();
        let f = leaf_frame(&local, EPS_RANK).unwrap();
        assert_eq!(f.rank(), 2);
        assert!(f.normal[0][2].abs() > 1.0 - 1e-15);
        for e in &f.tangent {
            assert!(e[2].abs() < 1e-15);
        }
    }

    #[test]
    fn zero_bivector_has_empty_tangent_frame() {
        let s = gallery::structure("zero_pi_curved").unwrap();
        let local = Local::new(&s, &s.base).unwrap();
        let f = leaf_frame(&local, EPS_RANK).unwrap();
        assert_eq!(f.rank(), 0);
        assert_eq!(f.normal.len(), s.dim);
    }

    #[test]
    fn flat_leaf_trace_is_a_straight_segment() {
        let s = gallery::structure("euclid_rn_rs").unwrap();
        let p0 = vec![0.0; 3];
        let tr = trace_leaf(&s, &p0, &[Leg { coord: 0, duration: 1.0 }], 0.1).unwrap();
        let end = tr.points.last().unwrap();
        assert_eq!(tr.times.len(), 11);
        assert!((end[1] - 1.0).abs() < 1e-15 && end[0] == 0.0 && end[2] == 0.0);
    }
}
