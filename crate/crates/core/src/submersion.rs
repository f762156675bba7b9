//! Structure-preserving surjective submersions `t: P → M`.
//!
//! Text format:
//!
//! ```text
//! name = r4_to_r3
//! source = euclid_rn_rs:4,1,2      # a gallery id, or an embedded block:
//! begin target
//! name = plane_in_r3
//! dim = 3
//! ...
//! end target
//! map 1 = x1                       # target index or name = expression in source coordinates
//! map 2 = x2
//! map 3 = x3
//! ```

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connections::{contravariant_christoffels, nabla_pi};
use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr, Jet};
use crate::fields::Local;
use crate::linalg::{dot, Mat};
use crate::linear::kernel_splitting;
use crate::structure::{
    logical_lines, split_assignment, JSpec, LoadOptions, PiSpec, Structure, VALIDATION_POINTS,
    VALIDATION_SEED,
};
use crate::{classify::Status, foliation::EPS_RANK};

#[derive(Clone, Debug)]
pub struct SubmersionSpec {
    pub name: String,
    pub p: Structure,
    pub m: Structure,
    /// `t^a` as expressions in the coordinates of `P`.
    pub map: Vec<Expr>,
    /// Derivatives `∂_i t^a`, indexed `[a][i]`.
    pub dmap: Vec<Vec<Expr>>,
}

fn format_err(line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        line,
        message: message.into(),
    }
}

impl SubmersionSpec {
    pub fn new(name: &str, p: Structure, m: Structure, map: Vec<Expr>) -> Result<SubmersionSpec> {
        if map.len() != m.dim {
            return Err(Error::DimensionMismatch {
                expected: m.dim,
                got: map.len(),
            });
        }
        if m.dim > p.dim {
            return Err(Error::Invalid(format!(
                "target dimension {} exceeds source dimension {}",
                m.dim, p.dim
            )));
        }
        let dmap = map
            .iter()
            .map(|t| (0..p.dim).map(|i| t.derivative(i)).collect())
            .collect();
        Ok(SubmersionSpec {
            name: name.to_string(),
            p,
            m,
            map,
            dmap,
        })
    }

    /// Parse the text format; `resolve` turns a gallery reference into a
    /// structure.
    pub fn parse(text: &str, resolve: &dyn Fn(&str) -> Result<Structure>) -> Result<SubmersionSpec> {
        let lines = logical_lines(text);
        let mut name = None;
        let mut source = None;
        let mut target = None;
        let mut maps: Vec<(usize, String, String)> = Vec::new();
        let mut i = 0;
        while i < lines.len() {
            let (line, ref t) = lines[i];
            if let Some(which) = t.strip_prefix("begin ") {
                let which = which.trim();
                let end = format!("end {which}");
                let close = lines[i + 1..]
                    .iter()
                    .position(|(_, l)| *l == end)
                    .ok_or_else(|| format_err(line, format!("`begin {which}` without `{end}`")))?;
                let block = Structure::from_lines(&lines[i + 1..i + 1 + close])?;
                let slot = match which {
                    "source" => &mut source,
                    "target" => &mut target,
                    other => return Err(format_err(line, format!("unknown block `{other}`"))),
                };
                if slot.replace(block).is_some() {
                    return Err(format_err(line, format!("duplicate `{which}`")));
                }
                i += close + 2;
                continue;
            }
            let (lhs, rhs) = split_assignment(line, t)?;
            let words: Vec<&str> = lhs.split(' ').collect();
            match words.as_slice() {
                ["name"] => name = Some(rhs),
                ["source"] | ["target"] => {
                    let s = resolve(&rhs).map_err(|e| format_err(line, e.to_string()))?;
                    let slot = if words[0] == "source" { &mut source } else { &mut target };
                    if slot.replace(s).is_some() {
                        return Err(format_err(line, format!("duplicate `{}`", words[0])));
                    }
                }
                ["map", a] => maps.push((line, a.to_string(), rhs)),
                _ => return Err(format_err(line, format!("unknown key `{lhs}`"))),
            }
            i += 1;
        }
        let p = source.ok_or_else(|| format_err(0, "missing source"))?;
        let m = target.ok_or_else(|| format_err(0, "missing target"))?;
        let mut map: Vec<Option<Expr>> = vec![None; m.dim];
        for (line, a, src) in maps {
            let idx = match a.parse::<usize>() {
                Ok(k) if (1..=m.dim).contains(&k) => k - 1,
                Ok(k) => return Err(format_err(line, format!("map index {k} out of range"))),
                Err(_) => m
                    .coords
                    .iter()
                    .position(|c| *c == a)
                    .ok_or_else(|| format_err(line, format!("unknown target coordinate `{a}`")))?,
            };
            let e = parse_expr(&src, &p.coords).map_err(|source| Error::Parse { line, source })?;
            if map[idx].replace(e).is_some() {
                return Err(format_err(line, format!("duplicate map component {}", idx + 1)));
            }
        }
        let map = map
            .into_iter()
            .enumerate()
            .map(|(a, e)| e.ok_or_else(|| format_err(0, format!("missing `map {}`", a + 1))))
            .collect::<Result<Vec<_>>>()?;
        SubmersionSpec::new(name.as_deref().unwrap_or("submersion"), p, m, map)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("name = {}\n", self.name);
        for (which, s) in [("source", &self.p), ("target", &self.m)] {
            out.push_str(&format!("begin {which}\n{}end {which}\n", s.to_text()));
        }
        for (a, e) in self.map.iter().enumerate() {
            out.push_str(&format!("map {} = {}\n", a + 1, e.to_source(&self.p.coords)));
        }
        out
    }

    /// Validate both structures and the rank of `dt` at the source base
    /// point and the validation samples.
    pub fn validate(&self, opts: LoadOptions) -> Result<()> {
        self.p.validate(opts)?;
        self.m.validate(opts)?;
        let mut points = vec![self.p.base.clone()];
        points.extend(self.p.sample_points(VALIDATION_POINTS, VALIDATION_SEED));
        for p in points {
            self.check_rank(&p)?;
        }
        Ok(())
    }

    pub fn image(&self, p: &[f64]) -> Result<Vec<f64>> {
        Ok(self.map.iter().map(|t| t.eval::<f64>(p)).collect::<Result<_, _>>()?)
    }

    /// `Dt[(a, i)] = ∂_i t^a`.
    pub fn jacobian(&self, p: &[f64]) -> Result<Mat<f64>> {
        let rows = self
            .map
            .iter()
            .map(|t| Ok(t.eval_jet(p)?.partials().to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Mat::from_rows(&rows))
    }

    /// Pulled-back coordinate coframe `t*dy^a` as covector fields on `P`.
    pub fn pullback_coframe(&self, p: &[f64]) -> Result<Vec<Vec<Jet>>> {
        self.dmap
            .iter()
            .map(|row| row.iter().map(|e| Ok(e.eval_jet(p)?)).collect())
            .collect()
    }

    fn check_rank(&self, p: &[f64]) -> Result<Mat<f64>> {
        let dt = self.jacobian(p)?;
        if dt.rank(1e-10) < self.m.dim {
            return Err(Error::RankDeficient { point: p.to_vec() });
        }
        Ok(dt)
    }
}

/// Build `M × ℝ` with `ω̃ = t*ω + t*η ∧ ds`, `π_P = −ω̃⁻¹` and the product
/// cometric, together with the projection onto `M`.
pub fn cosymplectic_lift(m: &Structure) -> Result<SubmersionSpec> {
    let n = m.dim;
    let omega = m
        .omega
        .as_ref()
        .ok_or_else(|| Error::Invalid(format!("`{}` declares no omega", m.name)))?;
    let eta = m
        .eta
        .as_ref()
        .ok_or_else(|| Error::Invalid(format!("`{}` declares no eta", m.name)))?;
    let mut points = vec![m.base.clone()];
    points.extend(m.sample_points(VALIDATION_POINTS, VALIDATION_SEED));
    for p in &points {
        let (d_omega, d_eta) = closedness_defects(m, p)?;
        if d_omega > 1e-9 {
            return Err(Error::NotClosed {
                form: "omega".into(),
                defect: d_omega,
            });
        }
        if d_eta > 1e-9 {
            return Err(Error::NotClosed {
                form: "eta".into(),
                defect: d_eta,
            });
        }
    }

    let np = n + 1;
    let zero = Expr::constant(0.0);
    let mut w = vec![zero.clone(); np * np];
    let mut g = vec![zero.clone(); np * np];
    for i in 0..n {
        for j in 0..n {
            w[i * np + j] = omega[i * n + j].clone();
            g[i * np + j] = m.cometric[i * n + j].clone();
        }
        w[i * np + n] = eta[i].clone();
        w[n * np + i] = Expr::neg(eta[i].clone());
    }
    g[n * np + n] = Expr::constant(1.0);

    let base_omega: Vec<f64> = w
        .iter()
        .map(|e| e.eval::<f64>(&[m.base.clone(), vec![0.0]].concat()))
        .collect::<Result<_, _>>()?;
    let wm = Mat::from_fn(np, np, |i, j| base_omega[i * np + j]);
    if wm.det().abs() < 1e-12 * wm.max_abs().max(1.0).powi(np as i32) {
        return Err(Error::DegenerateCosymplectic);
    }

    let mut s = "s".to_string();
    while m.coords.contains(&s) {
        s.push('_');
    }
    let p = Structure {
        name: format!("{}_lift", m.name),
        dim: np,
        coords: m.coords.iter().cloned().chain(std::iter::once(s)).collect(),
        signature: (m.signature.0 + 1, m.signature.1),
        pi: PiSpec::NegInverseOmega,
        cometric: g,
        j: Some(JSpec::Canonical),
        casimirs: Vec::new(),
        base: m.base.iter().copied().chain(std::iter::once(0.0)).collect(),
        bbox: m.bbox.iter().copied().chain(std::iter::once((-2.0, 2.0))).collect(),
        exclude: m.exclude.clone(),
        omega: Some(w),
        eta: None,
    };
    let map = (0..n).map(Expr::coord).collect();
    SubmersionSpec::new(&format!("{}_lift", m.name), p, m.clone(), map)
}

/// `(max |dω|, max |dη|)` at `p` from jets of the components.
pub fn closedness_defects(m: &Structure, p: &[f64]) -> Result<(f64, f64)> {
    let n = m.dim;
    let mut d_omega = 0.0f64;
    let mut d_eta = 0.0f64;
    if let Some(w) = &m.omega {
        let jets: Vec<Jet> = w.iter().map(|e| e.eval_jet(p)).collect::<Result<_, _>>()?;
        let w = |i: usize, j: usize| &jets[i * n + j];
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let v = w(j, k).d(i) + w(k, i).d(j) + w(i, j).d(k);
                    d_omega = d_omega.max(v.abs());
                }
            }
        }
    }
    if let Some(eta) = &m.eta {
        let jets: Vec<Jet> = eta.iter().map(|e| e.eval_jet(p)).collect::<Result<_, _>>()?;
        for i in 0..n {
            for j in i + 1..n {
                d_eta = d_eta.max((jets[j].d(i) - jets[i].d(j)).abs());
            }
        }
    }
    Ok((d_omega, d_eta))
}

/// Defects of the three conditions on `J_M = ♯_M ∘ ω♯` and of `‖η‖ = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosymplecticConditions {
    /// `Im J_M ⊂ Ker η`.
    pub image_in_kernel: f64,
    /// `J_M(♯η) = 0`.
    pub kills_reeb: f64,
    /// `(J_M² + Id)X = η(X) ♯η`.
    pub square: f64,
    /// `|⟨η, η⟩ − 1|`.
    pub eta_norm: f64,
}

impl CosymplecticConditions {
    pub fn max(&self) -> f64 {
        self.image_in_kernel.max(self.kills_reeb).max(self.square)
    }
}

/// `J_M X = ♯(i_X ω)` as a matrix on vectors.
pub fn cosymplectic_j(m: &Structure, p: &[f64]) -> Result<Mat<f64>> {
    let n = m.dim;
    let omega = m.omega.as_ref().ok_or(Error::DegenerateCosymplectic)?;
    let w = Mat::from_fn(n, n, |i, j| omega[i * n + j].eval::<f64>(p).unwrap_or(f64::NAN));
    let local = Local::new(m, p)?;
    // (i_X ω)_j = X^i ω_{ij}
    Ok(local.g_values().matmul(&w.transpose()))
}

pub fn cosymplectic_conditions(m: &Structure, p: &[f64]) -> Result<CosymplecticConditions> {
    let n = m.dim;
    let eta_e = m.eta.as_ref().ok_or(Error::DegenerateCosymplectic)?;
    let eta: Vec<f64> = eta_e.iter().map(|e| e.eval::<f64>(p)).collect::<Result<_, _>>()?;
    let local = Local::new(m, p)?;
    let j = cosymplectic_j(m, p)?;
    if !j.max_abs().is_finite() {
        return Err(Error::Invalid("omega is not finite here".into()));
    }
    let reeb = local.raise(&eta);
    let mut c = CosymplecticConditions {
        image_in_kernel: 0.0,
        kills_reeb: j.mul_vec(&reeb).iter().fold(0.0, |m, x| m.max(x.abs())),
        square: 0.0,
        eta_norm: (local.pair(&eta, &eta) - 1.0).abs(),
    };
    let j2 = j.matmul(&j);
    for i in 0..n {
        let x: Vec<f64> = (0..n).map(|k| if k == i { 1.0 } else { 0.0 }).collect();
        c.image_in_kernel = c.image_in_kernel.max(dot(&eta, &j.mul_vec(&x)).abs());
        let lhs = j2.mul_vec(&x);
        for k in 0..n {
            let v = lhs[k] + x[k] - eta[i] * reeb[k];
            c.square = c.square.max(v.abs());
        }
    }
    Ok(c)
}

/// `J_M = ♭_M · dt · J'_P · ♯_P · dt*` with the tangent-level
/// `J'_P = −♯_P J_P ♭_P`, as a matrix on covectors of `M`.
pub fn induced_j(sub: &SubmersionSpec, p: &[f64]) -> Result<Mat<f64>> {
    let lp = Local::new(&sub.p, p)?;
    let jp = lp.j_values().ok_or(Error::MissingJ)?;
    let dt = sub.check_rank(p)?;
    let lm = Local::new(&sub.m, &sub.image(p)?)?;
    let tangent = lp.g_values().matmul(&jp).matmul(lp.gcov_values()).scale(-1.0);
    Ok(lm
        .gcov_values()
        .matmul(&dt)
        .matmul(&tangent)
        .matmul(lp.g_values())
        .matmul(&dt.transpose())
        .scale(-1.0))
}

/// Basis of `Ker dt` at a point.
fn vertical_basis(dt: &Mat<f64>, n_p: usize) -> Vec<Vec<f64>> {
    let a = dt.to_nalgebra();
    // Kernel from the SVD of the square matrix DtᵀDt.
    let ata: DMatrix<f64> = a.transpose() * &a;
    let svd = ata.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let scale = svd.singular_values.max().max(1e-300);
    (0..n_p)
        .filter(|&k| svd.singular_values[k] <= 1e-12 * scale)
        .map(|k| vt.row(k).iter().copied().collect())
        .collect()
}

/// Pointwise defects of a submersion, by name; `None` marks a slot that
/// does not apply (missing J, no kernel).
pub fn point_defects(sub: &SubmersionSpec, p: &[f64]) -> Result<Vec<(&'static str, Option<f64>)>> {
    let dt = sub.check_rank(p)?;
    let q = sub.image(p)?;
    let mut lp = Local::new(&sub.p, p)?;
    let mut lm = Local::new(&sub.m, &q)?;
    let nm = sub.m.dim;
    let np = sub.p.dim;
    let coframe = sub.pullback_coframe(p)?;
    let rows: Vec<Vec<f64>> = (0..nm).map(|a| dt.row(a)).collect();
    let mut out = Vec::new();

    let mut poisson = 0.0f64;
    let mut riem = 0.0f64;
    for a in 0..nm {
        for b in a..nm {
            if a < b {
                let v = lp.pi_pair(&rows[a], &rows[b]) - lm.pi_values()[(a, b)];
                poisson = poisson.max(v.abs());
            }
            let v = lp.pair(&rows[a], &rows[b]) - lm.g_values()[(a, b)];
            riem = riem.max(v.abs());
        }
    }
    out.push(("poisson_map", Some(poisson)));
    out.push(("riemannian_submersion", Some(riem)));

    // ⟨∇^{t*α} t*β, t*γ⟩_P and π_P(∇^{t*α} t*β, t*γ) against M.
    let gp = contravariant_christoffels(&lp);
    let gm = contravariant_christoffels(&lm);
    let mut eq42 = 0.0f64;
    let mut eq43 = 0.0f64;
    for a in 0..nm {
        let ea: Vec<f64> = (0..nm).map(|k| if k == a { 1.0 } else { 0.0 }).collect();
        for b in 0..nm {
            let np_ab = gp.nabla(&lp, &rows[a], &coframe[b]);
            let nm_ab = gm.nabla(&lm, &ea, &lm.coordinate_form(b));
            for c in 0..nm {
                let ec: Vec<f64> = (0..nm).map(|k| if k == c { 1.0 } else { 0.0 }).collect();
                eq42 = eq42.max((lp.pair(&np_ab, &rows[c]) - lm.pair(&nm_ab, &ec)).abs());
                eq43 = eq43.max((lp.pi_pair(&np_ab, &rows[c]) - lm.pi_pair(&nm_ab, &ec)).abs());
            }
        }
    }
    out.push(("pullback_metric", Some(eq42)));
    out.push(("pullback_poisson", Some(eq43)));

    let split = kernel_splitting(lm.pi_values(), lm.g_values(), EPS_RANK)?;
    let containment = split
        .kernel_basis
        .iter()
        .map(|gamma| {
            let pulled = dt.vec_mul(gamma);
            lp.sharp(&pulled).iter().fold(0.0f64, |m, x| m.max(x.abs()))
        })
        .fold(0.0, f64::max);
    out.push(("kernel_containment", Some(containment)));

    // dt(∇(y^a ∘ t)) = ∇y^a
    let mut grad = 0.0f64;
    for a in 0..nm {
        let pushed = dt.mul_vec(&lp.raise(&rows[a]));
        let target = lm.g_values().column(a);
        for k in 0..nm {
            grad = grad.max((pushed[k] - target[k]).abs());
        }
    }
    out.push(("gradient_related", Some(grad)));

    let vertical = vertical_basis(&dt, np);
    let horizontal = vertical
        .iter()
        .flat_map(|z| rows.iter().map(|r| lp.pair_vectors(&lp.raise(r), z).abs()).collect::<Vec<_>>())
        .fold(0.0, f64::max);
    out.push(("horizontal_lift", Some(horizontal)));

    if lp.j.is_none() {
        lp.j = Some(lp.canonical_j());
    }
    if lm.j.is_none() {
        lm.j = Some(lm.canonical_j());
    }
    let jp = lp.j_values().expect("set above");
    let jm = lm.j_values().expect("set above");
    let mut eq41 = 0.0f64;
    for a in 0..nm {
        for b in 0..nm {
            let lhs = lp.pair(&rows[a], &jp.mul_vec(&rows[b]));
            let rhs = lp.pair(&rows[a], &dt.vec_mul(&jm.column(b)));
            eq41 = eq41.max((lhs - rhs).abs());
        }
    }
    let declared = sub.p.j.is_some() && sub.m.j.is_some();
    out.push(("j_pullback", declared.then_some(eq41)));

    let induced = if sub.p.j.is_some() { Some(induced_j(sub, p)?) } else { None };
    out.push((
        "induced_j_compat",
        induced
            .as_ref()
            .map(|j| lm.pi_values().sub(&lm.g_values().matmul(j)).max_abs()),
    ));
    out.push((
        "induced_j_f_structure",
        induced.as_ref().map(crate::connections::f_structure_defect),
    ));
    let round_trip = induced.as_ref().map(|j| {
        (0..nm)
            .map(|a| {
                let lhs = jp.mul_vec(&rows[a]);
                let rhs = dt.vec_mul(&j.column(a));
                lhs.iter().zip(&rhs).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
            })
            .fold(0.0, f64::max)
    });
    out.push(("induced_j_round_trip", round_trip));

    let tangent = lp.g_values().matmul(&jp).matmul(lp.gcov_values()).scale(-1.0);
    let vinv = (!vertical.is_empty()).then(|| {
        vertical
            .iter()
            .map(|z| dt.mul_vec(&tangent.mul_vec(z)).iter().fold(0.0f64, |m, x| m.max(x.abs())))
            .fold(0.0, f64::max)
    });
    out.push(("vertical_invariance", vinv));

    out.push(("source_riemann_poisson", Some(nabla_pi(&lp, &gp).max_abs())));
    out.push(("target_riemann_poisson", Some(nabla_pi(&lm, &gm).max_abs())));
    Ok(out)
}

/// How a submersion check enters the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Asserted,
    Measured,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubmersionCheck {
    pub name: String,
    pub role: Role,
    pub status: Status,
    pub max_defect: Option<f64>,
    pub worst_point: Option<Vec<f64>>,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubmersionReport {
    pub name: String,
    pub seed: u64,
    pub samples: usize,
    pub points: usize,
    pub error_points: usize,
    pub checks: Vec<SubmersionCheck>,
    /// `J_P` preserves basic forms at every sample (round trip below tolerance).
    pub basic: Option<bool>,
    /// Riemann–Poisson transport: `P` passes implies `M` passes.
    pub transport: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cosymplectic: Option<CosymplecticConditions>,
}

impl SubmersionReport {
    pub fn check(&self, name: &str) -> Option<&SubmersionCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// All asserted checks pass and the transport implication holds.
    pub fn passed(&self) -> bool {
        self.checks
            .iter()
            .all(|c| c.role == Role::Measured || c.status != Status::Fail)
            && self.transport != Some(false)
            && self.cosymplectic.is_none_or(|c| c.max() < 1e-10)
    }
}

const ASSERTED: [&str; 7] = [
    "poisson_map",
    "riemannian_submersion",
    "pullback_metric",
    "pullback_poisson",
    "gradient_related",
    "horizontal_lift",
    "j_pullback",
];

/// Evaluate every defect at `samples` seeded points of `P`.
pub fn submersion_report(sub: &SubmersionSpec, samples: usize, seed: u64, tol: f64) -> Result<SubmersionReport> {
    let mut points = vec![sub.p.base.clone()];
    points.extend(sub.p.sample_points(samples, seed));
    let results: Vec<Result<Vec<(&'static str, Option<f64>)>>> =
        points.par_iter().map(|p| point_defects(sub, p)).collect();

    let mut names: Vec<&'static str> = Vec::new();
    let mut worst: Vec<(Option<f64>, Option<Vec<f64>>)> = Vec::new();
    let mut error_points = 0;
    for (p, r) in points.iter().zip(results) {
        let Ok(values) = r else {
            error_points += 1;
            continue;
        };
        for (name, v) in values {
            let idx = match names.iter().position(|n| *n == name) {
                Some(i) => i,
                None => {
                    names.push(name);
                    worst.push((None, None));
                    names.len() - 1
                }
            };
            if let Some(v) = v {
                let slot = &mut worst[idx];
                if slot.0.is_none_or(|cur| v > cur || v.is_nan()) {
                    *slot = (Some(v), Some(p.clone()));
                }
            }
        }
    }
    if names.is_empty() {
        return Err(Error::RankDeficient {
            point: sub.p.base.clone(),
        });
    }
    let get = |name: &str| names.iter().position(|n| *n == name).and_then(|i| worst[i].0);
    let basic = get("induced_j_round_trip").map(|v| v < 1e-8);
    let mut checks = Vec::new();
    for (name, (v, point)) in names.iter().zip(worst.iter().cloned()) {
        let asserted = ASSERTED.contains(name) || (*name == "induced_j_compat" && basic == Some(true));
        let status = match v {
            None => Status::Skipped,
            Some(x) if x < tol => Status::Pass,
            Some(_) => Status::Fail,
        };
        checks.push(SubmersionCheck {
            name: name.to_string(),
            role: if asserted { Role::Asserted } else { Role::Measured },
            status,
            max_defect: v,
            worst_point: point,
            tolerance: tol,
        });
    }
    let transport = match (get("source_riemann_poisson"), get("target_riemann_poisson")) {
        (Some(a), Some(b)) => Some(!(a < tol) || b < tol),
        _ => None,
    };
    let cosymplectic = if sub.m.omega.is_some() && sub.m.eta.is_some() {
        let mut worst: Option<CosymplecticConditions> = None;
        for p in &points {
            let c = cosymplectic_conditions(&sub.m, &sub.image(p)?)?;
            worst = Some(match worst {
                None => c,
                Some(w) => CosymplecticConditions {
                    image_in_kernel: w.image_in_kernel.max(c.image_in_kernel),
                    kills_reeb: w.kills_reeb.max(c.kills_reeb),
                    square: w.square.max(c.square),
                    eta_norm: w.eta_norm.max(c.eta_norm),
                },
            });
        }
        worst
    } else {
        None
    };
    Ok(SubmersionReport {
        name: sub.name.clone(),
        seed,
        samples,
        points: points.len(),
        error_points,
        checks,
        basic,
        transport,
        cosymplectic,
    })
}
