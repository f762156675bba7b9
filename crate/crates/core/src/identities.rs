//! Sampled identity suites relating brackets, Lie derivatives and the two
//! Levi-Civita connections.
//!
//! Each identity yields a nonnegative defect per point; a suite reports the
//! worst value per identity. Identities that only hold under a hypothesis
//! (π parallel, π invertible, J present) are evaluated only where the
//! hypothesis holds at the point and skipped elsewhere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{strong_transversal_defect, involutivity_defect, bracket_lie_identity_defect, Status};
use crate::connections::{
    contravariant_christoffels, covariant_christoffels, covariant_nabla_pi, div_pi, f_structure_defect,
    nabla_j, nabla_omega, nabla_pi, nijenhuis, nijenhuis_from_nabla_j, ContravariantSymbols,
};
use crate::error::Result;
use crate::expr::{Expr, Func, Jet};
use crate::fields::{differential_jet, koszul_bracket, lie_bracket, lie_derivative_covector, lie_derivative_pi, Local};
use crate::foliation::{leaf_frame_jet, EPS_RANK};
use crate::linalg::{dot, max_abs, values};
use crate::structure::Structure;

pub const IDENTITY_TOL: f64 = 1e-9;

/// Identities in evaluation order.
pub const IDENTITIES: [&str; 17] = [
    "anchor_lie_commutator",
    "bracket_lie_expansion",
    "koszul_antisymmetry",
    "anchor_leibniz",
    "contravariant_metricity",
    "contravariant_torsion",
    "covariant_metricity",
    "div_crosscheck",
    "j_pi_bridge",
    "nijenhuis_bridge",
    "omega_pi_bridge",
    "kernel_anchor_symmetry",
    "kernel_parallel",
    "gradient_lie_derivative",
    "closed_form_symmetry",
    "frame_bracket_identity",
    "transversal_agreement",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityRecord {
    pub name: String,
    pub status: Status,
    pub max_defect: Option<f64>,
    pub worst_point: Option<Vec<f64>>,
    pub tolerance: f64,
    pub evaluated: usize,
    pub skipped_points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub structure: String,
    pub seed: u64,
    pub samples: usize,
    pub points: usize,
    pub error_points: usize,
    pub records: Vec<IdentityRecord>,
}

impl IdentityReport {
    pub fn record(&self, name: &str) -> Option<&IdentityRecord> {
        self.records.iter().find(|r| r.name == name)
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.status != Status::Fail)
    }
}

fn random_jets(rng: &mut ChaCha8Rng, n: usize) -> Vec<Jet> {
    (0..n)
        .map(|_| {
            let partials: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            Jet::from_parts(rng.random_range(-1.0..1.0), &partials)
        })
        .collect()
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    (0..n).map(|k| if k == i { 1.0 } else { 0.0 }).collect()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `β(L_X(π♯α) − π♯(L_X α)) − (L_X π)(α, β)` for random first-order fields.
pub fn anchor_lie_commutator(local: &Local, x: &[Jet], alpha: &[Jet], beta: &[f64]) -> f64 {
    let lhs = sub(
        &lie_bracket(x, &local.sharp_jet(alpha)),
        &local.sharp(&lie_derivative_covector(x, alpha)),
    );
    (dot(beta, &lhs) - lie_derivative_pi(local, x).form(&values(alpha), beta)).abs()
}

/// `[α, β]_π(X) − (π♯α(β(X)) − π♯β(α(X)) + (L_X π)(α, β))`.
pub fn bracket_lie_expansion(local: &Local, alpha: &[Jet], beta: &[Jet], x: &[Jet]) -> f64 {
    let xv = values(x);
    let lhs = dot(&koszul_bracket(local, alpha, beta), &xv);
    let bx = dot(beta, x);
    let ax = dot(alpha, x);
    let xa = local.sharp(&values(alpha));
    let xb = local.sharp(&values(beta));
    let rhs = dot(&xa, bx.partials()) - dot(&xb, ax.partials())
        + lie_derivative_pi(local, x).form(&values(alpha), &values(beta));
    (lhs - rhs).abs()
}

/// Metricity and torsion of `∇•` on the coordinate coframe.
pub fn contravariant_axioms(local: &Local, gamma: &ContravariantSymbols) -> (f64, f64) {
    let n = local.dim();
    let pi = local.pi_values();
    let g = local.g_values();
    let mut metric = 0.0f64;
    let mut torsion = 0.0f64;
    for i in 0..n {
        let ei = unit(n, i);
        for j in 0..n {
            let nij = gamma.nabla(local, &ei, &local.coordinate_form(j));
            let nji = gamma.nabla(local, &unit(n, j), &local.coordinate_form(i));
            let br = koszul_bracket(local, &local.coordinate_form(i), &local.coordinate_form(j));
            torsion = torsion.max(max_abs(&sub(&sub(&nij, &nji), &br)));
            for k in 0..n {
                let nik = gamma.nabla(local, &ei, &local.coordinate_form(k));
                let lhs: f64 = (0..n).map(|l| pi[(i, l)] * local.g[(j, k)].d(l)).sum();
                let rhs = local.pair(&nij, &unit(n, k)) + local.pair(&unit(n, j), &nik);
                metric = metric.max((lhs - rhs).abs());
            }
        }
    }
    let _ = g;
    (metric, torsion)
}

/// `∂_k g_{ij} − Γ^l_{ki} g_{lj} − Γ^l_{kj} g_{il}`.
pub fn covariant_metricity(local: &Local) -> f64 {
    let n = local.dim();
    let gamma = covariant_christoffels(local);
    let g = local.gcov_values();
    let mut worst = 0.0f64;
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let v = local.gcov[(i, j)].d(k)
                    - (0..n)
                        .map(|l| gamma.0.get(l, k, i) * g[(l, j)] + gamma.0.get(l, k, j) * g[(i, l)])
                        .sum::<f64>();
                worst = worst.max(v.abs());
            }
        }
    }
    worst
}

/// `max |⟨γ, (∇•J)(α, β)⟩ − (∇•π)(α, γ, β)|` over the coordinate coframe.
pub fn j_pi_bridge(local: &Local, gamma: &ContravariantSymbols) -> Result<f64> {
    let n = local.dim();
    let nj = nabla_j(local, gamma)?;
    let np = nabla_pi(local, gamma);
    let g = local.g_values();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let lhs: f64 = (0..n).map(|m| g[(k, m)] * nj.get(i, j, m)).sum();
                worst = worst.max((lhs - np.get(i, k, j)).abs());
            }
        }
    }
    Ok(worst)
}

/// Nijenhuis tensor from brackets against its expression through `∇•J`.
pub fn nijenhuis_bridge(local: &Local, gamma: &ContravariantSymbols) -> Result<f64> {
    let n = local.dim();
    let nt = nijenhuis(local)?;
    let nj = nabla_j(local, gamma)?;
    let j = local.j_values().expect("nabla_j succeeded");
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let direct: Vec<f64> = (0..n).map(|k| nt.get(a, b, k)).collect();
            let rebuilt = nijenhuis_from_nabla_j(&nj, &j, &unit(n, a), &unit(n, b));
            worst = worst.max(max_abs(&sub(&direct, &rebuilt)));
        }
    }
    Ok(worst)
}

/// `(∇_{π♯α}π)(β, γ) + (∇ω)(π♯α, π♯β, π♯γ)` over the coframe.
pub fn omega_pi_bridge(local: &Local) -> Result<f64> {
    let n = local.dim();
    let cov = covariant_christoffels(local);
    let np = covariant_nabla_pi(local, &cov);
    let nw = nabla_omega(local, &cov)?;
    let pi = local.pi_values();
    let mut worst = 0.0f64;
    for a in 0..n {
        let x = pi.row(a);
        for b in 0..n {
            for c in 0..n {
                let lhs: f64 = (0..n).map(|k| x[k] * np.get(k, b, c)).sum();
                let rhs = nw.contract(&x, &pi.row(b), &pi.row(c));
                worst = worst.max((lhs + rhs).abs());
            }
        }
    }
    Ok(worst)
}

/// Kernel covector fields `♭N` of the jet frame.
fn kernel_fields(local: &Local, rank: usize) -> Result<Vec<Vec<Jet>>> {
    let frame = leaf_frame_jet(local, rank, None)?;
    Ok(frame.normal.iter().map(|v| local.lower_jet(v)).collect())
}

/// `π♯(∇^α β − ∇^β α)` for kernel fields `α` and coordinate `β`.
pub fn kernel_anchor_symmetry(local: &Local, gamma: &ContravariantSymbols, kernel: &[Vec<Jet>]) -> f64 {
    let n = local.dim();
    let mut worst = 0.0f64;
    for alpha in kernel {
        let av = values(alpha);
        for b in 0..n {
            let beta = local.coordinate_form(b);
            let d = sub(&gamma.nabla(local, &av, &beta), &gamma.nabla(local, &unit(n, b), alpha));
            worst = worst.max(max_abs(&local.sharp(&d)));
        }
    }
    worst
}

/// `max |∇^α dx^b|` for kernel covectors `α`.
pub fn kernel_parallel(local: &Local, gamma: &ContravariantSymbols, kernel: &[Vec<Jet>]) -> f64 {
    let n = local.dim();
    kernel
        .iter()
        .flat_map(|alpha| {
            let av = values(alpha);
            (0..n).map(move |b| max_abs(&gamma.nabla(local, &av, &local.coordinate_form(b))))
        })
        .fold(0.0, f64::max)
}

/// `(L_{α♯}π)(β, γ) − (⟨∇^γ α, β⟩ + sign·⟨∇^β α, γ⟩)` for a random field `α`.
pub fn gradient_lie_derivative(local: &Local, gamma: &ContravariantSymbols, alpha: &[Jet], sign: f64) -> f64 {
    let n = local.dim();
    let lie = lie_derivative_pi(local, &local.raise_jet(alpha));
    let mut worst = 0.0f64;
    for b in 0..n {
        let nb = gamma.nabla(local, &unit(n, b), alpha);
        for c in 0..n {
            let nc = gamma.nabla(local, &unit(n, c), alpha);
            let rhs = local.pair(&nc, &unit(n, b)) + sign * local.pair(&nb, &unit(n, c));
            worst = worst.max((lie[(b, c)] - rhs).abs());
        }
    }
    worst
}

/// `π(∇^β df, γ) − π(∇^γ df, β)` over the coframe and `f` a coordinate.
pub fn closed_form_symmetry(local: &Local, gamma: &ContravariantSymbols) -> f64 {
    let n = local.dim();
    let mut worst = 0.0f64;
    for f in 0..n {
        let df = local.coordinate_form(f);
        for b in 0..n {
            let nb = gamma.nabla(local, &unit(n, b), &df);
            for c in 0..n {
                let nc = gamma.nabla(local, &unit(n, c), &df);
                let v = local.pi_pair(&nb, &unit(n, c)) - local.pi_pair(&nc, &unit(n, b));
                worst = worst.max(v.abs());
            }
        }
    }
    worst
}

fn leibniz_defect(local: &Local) -> Result<f64> {
    let n = local.dim();
    let p = &local.point;
    let f = Expr::add(Expr::call(Func::Sin, Expr::coord(0)), Expr::coord(n - 1));
    let g = Expr::mul(Expr::coord(n / 2), Expr::call(Func::Cos, Expr::coord(0)));
    let fg = Expr::mul(f.clone(), g.clone());
    let lhs = local.sharp(&values(&differential_jet(&fg, p)?));
    let fv = f.eval::<f64>(p)?;
    let gv = g.eval::<f64>(p)?;
    let xf = local.sharp(&values(&differential_jet(&f, p)?));
    let xg = local.sharp(&values(&differential_jet(&g, p)?));
    Ok((0..n)
        .map(|k| (lhs[k] - fv * xg[k] - gv * xf[k]).abs())
        .fold(0.0, f64::max))
}

fn point_identities(s: &Structure, p: &[f64], rank: usize, seed: u64, index: usize) -> Result<Vec<(&'static str, Option<f64>)>> {
    let mut local = Local::new(s, p)?;
    let n = local.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let gamma = contravariant_christoffels(&local);
    let mut out: Vec<(&'static str, Option<f64>)> = Vec::new();

    let x = random_jets(&mut rng, n);
    let alpha = random_jets(&mut rng, n);
    let beta = random_jets(&mut rng, n);
    out.push(("anchor_lie_commutator", Some(anchor_lie_commutator(&local, &x, &alpha, &values(&beta)))));
    out.push(("bracket_lie_expansion", Some(bracket_lie_expansion(&local, &alpha, &beta, &x))));
    let ab = koszul_bracket(&local, &alpha, &beta);
    let ba = koszul_bracket(&local, &beta, &alpha);
    out.push((
        "koszul_antisymmetry",
        Some(ab.iter().zip(&ba).fold(0.0f64, |m, (a, b)| m.max((a + b).abs()))),
    ));
    out.push(("anchor_leibniz", Some(leibniz_defect(&local)?)));
    let (metric, torsion) = contravariant_axioms(&local, &gamma);
    out.push(("contravariant_metricity", Some(metric)));
    out.push(("contravariant_torsion", Some(torsion)));
    out.push(("covariant_metricity", Some(covariant_metricity(&local))));
    out.push(("div_crosscheck", Some(div_pi(&local, &gamma)?.discrepancy())));

    if local.j.is_none() {
        local.j = Some(local.canonical_j());
    }
    out.push(("j_pi_bridge", Some(j_pi_bridge(&local, &gamma)?)));
    let fdef = f_structure_defect(&local.j_values().expect("set above"));
    out.push((
        "nijenhuis_bridge",
        if fdef < crate::classify::F_STRUCTURE_TOL { Some(nijenhuis_bridge(&local, &gamma)?) } else { None },
    ));
    out.push(("omega_pi_bridge", if rank == n { Some(omega_pi_bridge(&local)?) } else { None }));

    let parallel = nabla_pi(&local, &gamma).max_abs() < IDENTITY_TOL;
    let kernel = kernel_fields(&local, rank)?;
    let has_kernel = !kernel.is_empty();
    out.push((
        "kernel_anchor_symmetry",
        has_kernel.then(|| kernel_anchor_symmetry(&local, &gamma, &kernel)),
    ));
    out.push((
        "kernel_parallel",
        (has_kernel && parallel).then(|| kernel_parallel(&local, &gamma, &kernel)),
    ));
    let a2 = random_jets(&mut rng, n);
    out.push(("gradient_lie_derivative", Some(gradient_lie_derivative(&local, &gamma, &a2, -1.0))));
    out.push(("closed_form_symmetry", parallel.then(|| closed_form_symmetry(&local, &gamma))));

    let frame = leaf_frame_jet(&local, rank, None)?;
    out.push(("frame_bracket_identity", Some(bracket_lie_identity_defect(&local, &frame))));
    let st = strong_transversal_defect(&local, &frame) < IDENTITY_TOL;
    let inv = involutivity_defect(&local, &frame) < IDENTITY_TOL;
    out.push(("transversal_agreement", Some(if st == inv { 0.0 } else { 1.0 })));
    Ok(out)
}

/// Run every identity at `samples` seeded points (plus the base point).
pub fn identity_suite(s: &Structure, samples: usize, seed: u64) -> Result<IdentityReport> {
    let base = Local::new(s, &s.base)?;
    let rank = base.rank(EPS_RANK);
    let mut points = vec![s.base.clone()];
    points.extend(s.sample_points(samples, seed));
    let results: Vec<Option<Vec<(&'static str, Option<f64>)>>> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let local = Local::new(s, p).ok()?;
            if local.rank(EPS_RANK) != rank {
                return None;
            }
            point_identities(s, p, rank, seed, i).ok()
        })
        .collect();

    let mut records: Vec<IdentityRecord> = IDENTITIES
        .iter()
        .map(|name| IdentityRecord {
            name: name.to_string(),
            status: Status::Skipped,
            max_defect: None,
            worst_point: None,
            tolerance: IDENTITY_TOL,
            evaluated: 0,
            skipped_points: 0,
        })
        .collect();
    let mut error_points = 0;
    for (p, r) in points.iter().zip(results) {
        let Some(values) = r else {
            error_points += 1;
            continue;
        };
        for (name, v) in values {
            let rec = records.iter_mut().find(|r| r.name == name).expect("listed identity");
            match v {
                Some(v) => {
                    rec.evaluated += 1;
                    if rec.max_defect.is_none_or(|cur| v > cur || v.is_nan()) {
                        rec.max_defect = Some(v);
                        rec.worst_point = Some(p.clone());
                    }
                }
                None => rec.skipped_points += 1,
            }
        }
    }
    for rec in &mut records {
        rec.status = match rec.max_defect {
            None => Status::Skipped,
            Some(v) if v < rec.tolerance => Status::Pass,
            Some(_) => Status::Fail,
        };
    }
    Ok(IdentityReport {
        structure: s.name.clone(),
        seed,
        samples,
        points: points.len(),
        error_points,
        records,
    })
}
