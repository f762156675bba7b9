//! Sampled classification of a structure by its defect tensors.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connections::{
    contravariant_christoffels, covariant_christoffels, div_pi, f_structure_defect, nabla_j,
    nabla_omega, nabla_pi, nijenhuis, CovariantSymbols,
};
use crate::error::{Error, Result};
use crate::expr::Jet;
use crate::fields::{differential_jet, koszul_bracket, lie_bracket, lie_derivative_pi, Local};
use crate::foliation::{leaf_frame_jet, LeafFrame, EPS_RANK};
use crate::linalg::{dot, values};
use crate::structure::Structure;

/// Threshold on `|J³ + J|` above which a J field is not treated as an
/// f-structure.
pub const F_STRUCTURE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckId {
    Jacobi,
    AlmostKp,
    RiemannPoisson,
    KahlerPoisson,
    DivFree,
    CasimirInvariance,
    KillingPoisson,
    Involutivity,
    StrongTransversal,
    Nijenhuis,
    NablaOmega,
    MeanCurvature,
    BundleLike,
}

impl CheckId {
    pub const ALL: [CheckId; 13] = [
        CheckId::Jacobi,
        CheckId::AlmostKp,
        CheckId::RiemannPoisson,
        CheckId::KahlerPoisson,
        CheckId::DivFree,
        CheckId::CasimirInvariance,
        CheckId::KillingPoisson,
        CheckId::Involutivity,
        CheckId::StrongTransversal,
        CheckId::Nijenhuis,
        CheckId::NablaOmega,
        CheckId::MeanCurvature,
        CheckId::BundleLike,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckId::Jacobi => "jacobi",
            CheckId::AlmostKp => "almost_kp",
            CheckId::RiemannPoisson => "riemann_poisson",
            CheckId::KahlerPoisson => "kahler_poisson",
            CheckId::DivFree => "div_free",
            CheckId::CasimirInvariance => "casimir_invariance",
            CheckId::KillingPoisson => "killing_poisson",
            CheckId::Involutivity => "involutivity",
            CheckId::StrongTransversal => "strong_transversal",
            CheckId::Nijenhuis => "nijenhuis",
            CheckId::NablaOmega => "nabla_omega",
            CheckId::MeanCurvature => "mean_curvature",
            CheckId::BundleLike => "bundle_like",
        }
    }

    pub fn from_name(s: &str) -> Option<CheckId> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Expected outcome of a check on a gallery entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    Pass,
    Fail,
    /// Reported, never asserted.
    Measure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: CheckId,
    pub status: Status,
    pub max_defect: Option<f64>,
    pub worst_point: Option<Vec<f64>>,
    pub tolerance: f64,
    /// Points at which the check produced a value.
    pub evaluated: usize,
    /// Points skipped for this check (evaluation errors, indefinite leaves...).
    pub skipped_points: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub skip_reason: Option<String>,
    /// Largest disagreement between two independent computations, where the
    /// check has one.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub crosscheck: Option<f64>,
}

impl CheckRecord {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    pub structure: String,
    pub seed: u64,
    pub samples: usize,
    /// Points actually drawn from the domain.
    pub points: usize,
    /// Rank of π at the base point.
    pub rank: usize,
    /// Points dropped because the rank there differs from the base rank.
    pub rank_skipped: usize,
    /// Points dropped because the structure could not be evaluated there.
    pub error_points: usize,
    pub checks: Vec<CheckRecord>,
}

impl DefectReport {
    pub fn check(&self, id: CheckId) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.id == id)
    }
}

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub eps_rank: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            samples: 200,
            seed: 0,
            tol: 1e-9,
            eps_rank: EPS_RANK,
        }
    }
}

#[derive(Clone, Debug)]
enum Outcome {
    Value(f64),
    Skip(String),
}

struct PointResult {
    point: Vec<f64>,
    outcomes: Vec<(CheckId, Outcome)>,
    div_crosscheck: Option<f64>,
}

fn complement_and_kernel(local: &Local, frame: &LeafFrame<Jet>) -> (Vec<Vec<Jet>>, Vec<Vec<Jet>>) {
    let comp = frame.tangent.iter().map(|e| local.lower_jet(e)).collect();
    let ker = frame.normal.iter().map(|v| local.lower_jet(v)).collect();
    (comp, ker)
}

/// Largest norm of the `Ker π♯` part of `[α_a, α_b]_π` over pairs of
/// complement frame covectors.
pub fn involutivity_defect(local: &Local, frame: &LeafFrame<Jet>) -> f64 {
    let (comp, _) = complement_and_kernel(local, frame);
    let normals: Vec<Vec<f64>> = frame.normal.iter().map(|v| values(v)).collect();
    let mut worst = 0.0f64;
    for a in 0..comp.len() {
        for b in a + 1..comp.len() {
            let theta = koszul_bracket(local, &comp[a], &comp[b]);
            let norm = normals
                .iter()
                .map(|nv| dot(&theta, nv).powi(2))
                .sum::<f64>()
                .sqrt();
            worst = worst.max(norm);
        }
    }
    worst
}

/// Largest component of `L_N π` over the unit normal frame fields.
pub fn strong_transversal_defect(local: &Local, frame: &LeafFrame<Jet>) -> f64 {
    frame
        .normal
        .iter()
        .map(|nv| lie_derivative_pi(local, nv).max_abs())
        .fold(0.0, f64::max)
}

/// `max |⟨[α, β]_π, γ⟩ − (L_{γ♯}π)(α, β)|` over complement frame covectors
/// `α, β` and kernel frame covectors `γ`.
pub fn bracket_lie_identity_defect(local: &Local, frame: &LeafFrame<Jet>) -> f64 {
    let (comp, ker) = complement_and_kernel(local, frame);
    let mut worst = 0.0f64;
    for (gamma, nv) in ker.iter().zip(&frame.normal) {
        let lie = lie_derivative_pi(local, nv);
        let g = values(gamma);
        for a in 0..comp.len() {
            for b in 0..comp.len() {
                let theta = koszul_bracket(local, &comp[a], &comp[b]);
                let lhs = local.pair(&theta, &g);
                let rhs = lie.form(&values(&comp[a]), &values(&comp[b]));
                worst = worst.max((lhs - rhs).abs());
            }
        }
    }
    worst
}

/// `H = Σ_a ε_a pr⊥(∇_{E_a} E_a)` over the leaf frame.
pub fn mean_curvature(
    local: &Local,
    frame: &LeafFrame<Jet>,
    gamma: &CovariantSymbols,
) -> Result<Vec<f64>> {
    if !frame.leaf_definite() {
        return Err(Error::IndefiniteRestriction);
    }
    let n = local.dim();
    let gcov = local.gcov_values();
    let mut h = vec![0.0; n];
    for (e, &sign) in frame.tangent.iter().zip(&frame.tangent_signs) {
        let ev = values(e);
        let acc: Vec<f64> = (0..n)
            .map(|k| {
                let mut v = 0.0;
                for i in 0..n {
                    v += ev[i] * e[k].d(i);
                    for j in 0..n {
                        v += gamma.0.get(k, i, j) * ev[i] * ev[j];
                    }
                }
                v
            })
            .collect();
        for (nv, &ns) in frame.normal.iter().zip(&frame.normal_signs) {
            let nv = values(nv);
            let c = gcov.form(&acc, &nv) * ns;
            for k in 0..n {
                h[k] += sign * c * nv[k];
            }
        }
    }
    Ok(h)
}

/// `max |(L_{X_f} g⊥)(N_a, N_b)|` over coordinate Hamiltonian fields `X_f`
/// and unit normal frame fields `N_a`.
pub fn bundle_like_defect(local: &Local, frame: &LeafFrame<Jet>) -> Result<f64> {
    let n = local.dim();
    let gcov = local.gcov_values();
    let mut worst = 0.0f64;
    for f in 0..n {
        let x = local.sharp_jet(&local.coordinate_form(f));
        let brackets: Vec<Vec<f64>> = frame.normal.iter().map(|nv| lie_bracket(&x, nv)).collect();
        for a in 0..frame.normal.len() {
            for b in a..frame.normal.len() {
                let na = values(&frame.normal[a]);
                let nb = values(&frame.normal[b]);
                let v = -gcov.form(&brackets[a], &nb) - gcov.form(&na, &brackets[b]);
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn evaluate_point(s: &Structure, p: &[f64], rank: usize, eps_rank: f64) -> Result<Option<PointResult>> {
    let mut local = Local::new(s, p)?;
    if local.rank(eps_rank) != rank {
        return Ok(None);
    }
    if local.j.is_none() {
        local.j = Some(local.canonical_j());
    }
    let n = local.dim();
    let jv = local.j_values().expect("J was just set");
    let gamma = contravariant_christoffels(&local);
    let cov = covariant_christoffels(&local);
    let mut out = Vec::new();
    let mut put = |id, o| out.push((id, o));

    put(CheckId::Jacobi, Outcome::Value(crate::fields::jacobiator(&local)));

    let compat = local.g_values().matmul(&jv).sub(local.pi_values()).max_abs();
    let fdef = f_structure_defect(&jv);
    put(CheckId::AlmostKp, Outcome::Value(compat.max(fdef)));
    put(CheckId::RiemannPoisson, Outcome::Value(nabla_pi(&local, &gamma).max_abs()));
    put(
        CheckId::KahlerPoisson,
        if fdef > F_STRUCTURE_TOL {
            Outcome::Skip(format!("not-f-structure (|J^3+J| = {fdef:e})"))
        } else {
            Outcome::Value(nabla_j(&local, &gamma)?.max_abs())
        },
    );
    let div = div_pi(&local, &gamma)?;
    put(CheckId::DivFree, Outcome::Value(max_norm(&div.coordinate)));
    let div_crosscheck = Some(div.discrepancy());

    if s.casimirs.is_empty() {
        put(CheckId::CasimirInvariance, Outcome::Skip("no-casimirs-declared".into()));
    } else {
        let mut worst = 0.0f64;
        for c in &s.casimirs {
            let grad = local.raise_jet(&differential_jet(c, p)?);
            worst = worst.max(lie_derivative_pi(&local, &grad).max_abs());
        }
        put(CheckId::CasimirInvariance, Outcome::Value(worst));
    }

    let frame = leaf_frame_jet(&local, rank, None)?;
    put(CheckId::Involutivity, Outcome::Value(involutivity_defect(&local, &frame)));
    put(CheckId::StrongTransversal, Outcome::Value(strong_transversal_defect(&local, &frame)));
    put(CheckId::Nijenhuis, Outcome::Value(nijenhuis(&local)?.max_abs()));
    put(
        CheckId::NablaOmega,
        if rank < n {
            Outcome::Skip("pi-degenerate".into())
        } else {
            Outcome::Value(nabla_omega(&local, &cov)?.max_abs())
        },
    );
    put(
        CheckId::MeanCurvature,
        match mean_curvature(&local, &frame, &cov) {
            Ok(h) => Outcome::Value(local.pair_vectors(&h, &h).abs().sqrt()),
            Err(Error::IndefiniteRestriction) => Outcome::Skip("indefinite-leaf-metric".into()),
            Err(e) => return Err(e),
        },
    );
    put(CheckId::BundleLike, Outcome::Value(bundle_like_defect(&local, &frame)?));

    Ok(Some(PointResult {
        point: p.to_vec(),
        outcomes: out,
        div_crosscheck,
    }))
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Running maximum with deterministic tie-breaking.
#[derive(Clone, Debug, Default)]
struct Worst {
    value: Option<f64>,
    point: Option<Vec<f64>>,
    evaluated: usize,
    skipped: usize,
    reason: Option<String>,
}

impl Worst {
    fn push(&mut self, v: f64, p: &[f64]) {
        self.evaluated += 1;
        // NaN counts as the worst possible value and sticks once seen.
        let better = match self.value {
            None => true,
            Some(cur) if cur.is_nan() => false,
            Some(cur) => {
                v.is_nan()
                    || v > cur
                    || (v == cur && lex_cmp(p, self.point.as_deref().unwrap_or(&[])) == Ordering::Less)
            }
        };
        if better {
            self.value = Some(v);
            self.point = Some(p.to_vec());
        }
    }

    fn record(self, id: CheckId, tol: f64) -> CheckRecord {
        let status = match self.value {
            None => Status::Skipped,
            Some(v) if v < tol => Status::Pass,
            Some(_) => Status::Fail,
        };
        CheckRecord {
            id,
            status,
            max_defect: self.value,
            worst_point: self.point,
            tolerance: tol,
            evaluated: self.evaluated,
            skipped_points: self.skipped,
            skip_reason: if status == Status::Skipped {
                self.reason.or(Some("no-points".into()))
            } else {
                None
            },
            crosscheck: None,
        }
    }
}

/// Evaluate every check at `samples` seeded points of the structure's domain.
pub fn classify(s: &Structure, opts: &ClassifyOptions) -> Result<DefectReport> {
    let base = Local::new(s, &s.base)?;
    let rank = base.rank(opts.eps_rank);
    let points = s.sample_points(opts.samples, opts.seed);
    let results: Vec<Result<Option<PointResult>>> = points
        .par_iter()
        .map(|p| evaluate_point(s, p, rank, opts.eps_rank))
        .collect();

    let mut worst: Vec<(CheckId, Worst)> = CheckId::ALL.iter().map(|&c| (c, Worst::default())).collect();
    let mut rank_skipped = 0;
    let mut error_points = 0;
    let mut cross = Worst::default();
    for r in results {
        let pr = match r {
            Ok(Some(pr)) => pr,
            Ok(None) => {
                rank_skipped += 1;
                continue;
            }
            Err(_) => {
                error_points += 1;
                continue;
            }
        };
        for (id, o) in pr.outcomes {
            let w = &mut worst.iter_mut().find(|(c, _)| *c == id).expect("known check").1;
            match o {
                Outcome::Value(v) => w.push(v, &pr.point),
                Outcome::Skip(reason) => {
                    w.skipped += 1;
                    w.reason.get_or_insert(reason);
                }
            }
        }
        if let Some(c) = pr.div_crosscheck {
            cross.push(c, &pr.point);
        }
    }

    let mut checks: Vec<CheckRecord> = Vec::new();
    for (id, w) in worst {
        let mut rec = w.record(id, opts.tol);
        if id == CheckId::DivFree {
            rec.crosscheck = cross.value;
        }
        checks.push(rec);
    }
    // Dependent verdicts.
    let status = |checks: &[CheckRecord], id| checks.iter().find(|c| c.id == id).map(|c| c.status);
    if status(&checks, CheckId::AlmostKp) == Some(Status::Fail) {
        let k = checks.iter_mut().find(|c| c.id == CheckId::KahlerPoisson).expect("present");
        k.status = Status::Skipped;
        k.skip_reason = Some("requires almost_kp".into());
    }
    let cas = checks.iter().find(|c| c.id == CheckId::CasimirInvariance).cloned().expect("present");
    let div = checks.iter().find(|c| c.id == CheckId::DivFree).cloned().expect("present");
    let killing = checks.iter_mut().find(|c| c.id == CheckId::KillingPoisson).expect("present");
    *killing = match (cas.max_defect, div.max_defect) {
        (Some(a), Some(b)) => {
            let (v, p) = if a >= b { (a, cas.worst_point.clone()) } else { (b, div.worst_point.clone()) };
            CheckRecord {
                id: CheckId::KillingPoisson,
                status: if cas.passed() && div.passed() { Status::Pass } else { Status::Fail },
                max_defect: Some(v),
                worst_point: p,
                tolerance: opts.tol,
                evaluated: cas.evaluated.min(div.evaluated),
                skipped_points: cas.skipped_points.max(div.skipped_points),
                skip_reason: None,
                crosscheck: None,
            }
        }
        _ => CheckRecord {
            id: CheckId::KillingPoisson,
            status: Status::Skipped,
            max_defect: None,
            worst_point: None,
            tolerance: opts.tol,
            evaluated: 0,
            skipped_points: 0,
            skip_reason: cas.skip_reason.clone().or(div.skip_reason.clone()),
            crosscheck: None,
        },
    };

    Ok(DefectReport {
        structure: s.name.clone(),
        seed: opts.seed,
        samples: opts.samples,
        points: points.len(),
        rank,
        rank_skipped,
        error_points,
        checks,
    })
}

/// Pointwise verdict pair used to compare the two transversal conditions.
pub fn transversal_verdicts(local: &Local, rank: usize, tol: f64) -> Result<(bool, bool)> {
    let frame = leaf_frame_jet(local, rank, None)?;
    Ok((
        strong_transversal_defect(local, &frame) < tol,
        involutivity_defect(local, &frame) < tol,
    ))
}

/// Gradient field `∇f = ♯df` with first derivatives.
pub fn gradient_jet(local: &Local, f: &crate::expr::Expr) -> Result<Vec<Jet>> {
    Ok(local.raise_jet(&differential_jet(f, &local.point)?))
}

/// Hamiltonian field of a coordinate function.
pub fn coordinate_hamiltonian(local: &Local, k: usize) -> Vec<Jet> {
    local.sharp_jet(&local.coordinate_form(k))
}
