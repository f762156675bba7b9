//! Built-in structures and submersions with expected classifications.
//!
//! Every entry is stored in the text formats of [`crate::structure`] and
//! [`crate::submersion`], so exporting an entry is the same as printing its
//! source.

use crate::classify::{CheckId, Expect};
use crate::error::{Error, Result};
use crate::fields::Local;
use crate::linalg::Mat;
use crate::structure::{LoadOptions, Structure};
use crate::submersion::{cosymplectic_lift, SubmersionSpec};

#[derive(Clone, Debug)]
pub enum EntryKind {
    Structure(Structure),
    Submersion(SubmersionSpec),
}

#[derive(Clone, Debug)]
pub struct GalleryEntry {
    pub id: String,
    pub summary: String,
    pub kind: EntryKind,
    /// Checks with a declared outcome; unlisted checks are not asserted.
    pub expected: Vec<(CheckId, Expect)>,
    /// Loading needs `allow_non_poisson`.
    pub requires_override: bool,
    pub text: String,
}

impl GalleryEntry {
    pub fn expectation(&self, id: CheckId) -> Option<Expect> {
        self.expected.iter().find(|(c, _)| *c == id).map(|(_, e)| *e)
    }

    pub fn load_options(&self) -> LoadOptions {
        LoadOptions {
            allow_non_poisson: self.requires_override,
        }
    }
}

const IDS: [&str; 27] = [
    "euclid_rn_rs",
    "so3_euclid",
    "so3_rescaled",
    "so3_reg_conformal",
    "so3_reg_conformal_dual",
    "so3_reg_conformal_rescaled",
    "so3_reg_conformal_rescaled_dual",
    "sl2_lorentz",
    "sl2_reg_conformal",
    "sl2_reg_conformal_dual",
    "sl2_reg_conformal_rescaled",
    "sl2_reg_conformal_rescaled_dual",
    "symplectic_r2_conformal",
    "symplectic_r2_killing",
    "symplectic_r2_conformal_cubed",
    "kahler_r4",
    "so3_times_plane",
    "product_r5",
    "cosymplectic_r3_base",
    "nonpoisson_demo",
    "zero_pi_curved",
    "product_proj",
    "product_so3",
    "r4_to_r3",
    "cosymplectic_r3",
    "translation_quotient",
    "scaling_line",
];

/// Ids of every entry, in a fixed order.
pub fn list() -> Vec<String> {
    IDS.iter().map(|s| s.to_string()).collect()
}

fn identity_metric(n: usize) -> String {
    (1..=n).map(|i| format!("metric {i} {i} = 1\n")).collect()
}

fn cube(n: usize, half: f64) -> String {
    vec![format!("[-{half}, {half}]"); n].join(" x ")
}

fn euclid_text(n: usize, r: usize, s: usize) -> String {
    let coords: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let mut t = format!(
        "name = euclid_rn_rs:{n},{r},{s}\ndim = {n}\ncoords = {}\npi {r} {s} = 1\n{}J = canonical\n",
        coords.join(", "),
        identity_metric(n)
    );
    for i in (1..=n).filter(|&i| i != r && i != s) {
        t.push_str(&format!("casimir = x{i}\n"));
    }
    t.push_str(&format!("base = {}\nbox = {}\n", vec!["0"; n].join(", "), cube(n, 2.0)));
    t
}

const R: &str = "sqrt(x^2 + y^2 + z^2)";
const Q: &str = "x^2 + y^2 - z^2";

fn so3_text(name: &str, factor: &str, cometric_factor: &str, j: bool) -> String {
    let f = |e: &str| if factor.is_empty() { e.to_string() } else { format!("({e}) * {factor}") };
    let m = if cometric_factor.is_empty() { "1".to_string() } else { cometric_factor.to_string() };
    format!(
        "name = {name}\ndim = 3\ncoords = x, y, z\n\
         pi x y = {}\npi z x = {}\npi y z = {}\n\
         metric 1 1 = {m}\nmetric 2 2 = {m}\nmetric 3 3 = {m}\n{}\
         casimir = x^2 + y^2 + z^2\nbase = 0, 0, 1\nbox = {}\n\
         exclude = x^2 + y^2 + z^2 - 0.01 <= 0\n",
        f("z"),
        f("y"),
        f("x"),
        if j { "J = canonical\n" } else { "" },
        cube(3, 2.0),
    )
}

fn sl2_text(name: &str, factor: &str, cometric_factor: &str, half: f64) -> String {
    let f = |e: &str| if factor.is_empty() { e.to_string() } else { format!("({e}) * {factor}") };
    let m = if cometric_factor.is_empty() { "1".to_string() } else { cometric_factor.to_string() };
    format!(
        "name = {name}\ndim = 3\ncoords = x, y, z\nsignature = 2, 1\n\
         pi x y = {}\npi z x = {}\npi y z = {}\n\
         metric 1 1 = {m}\nmetric 2 2 = {m}\nmetric 3 3 = -({m})\nJ = canonical\n\
         casimir = {Q}\nbase = 1, 0, 0\nbox = {}\n\
         exclude = abs({Q}) - 0.1 <= 0\n",
        f("-z"),
        f("y"),
        f("x"),
        cube(3, half),
    )
}

fn plane_text(name: &str, pi: &str, cometric: &str) -> String {
    format!(
        "name = {name}\ndim = 2\ncoords = x, y\npi 1 2 = {pi}\n\
         metric 1 1 = {cometric}\nmetric 2 2 = {cometric}\nJ = canonical\n\
         base = 0, 0\nbox = {}\n",
        cube(2, 2.0)
    )
}

const KAHLER_R4: &str = "name = kahler_r4
dim = 4
coords = x1, x2, x3, x4
pi 1 2 = 1
pi 3 4 = 1
metric 1 1 = 1
metric 2 2 = 1
metric 3 3 = 1
metric 4 4 = 1
J = canonical
base = 0, 0, 0, 0
box = [-2, 2] x [-2, 2] x [-2, 2] x [-2, 2]
";

const SO3_TIMES_PLANE: &str = "name = so3_times_plane
dim = 5
coords = x, y, z, u, v
pi x y = z
pi z x = y
pi y z = x
pi u v = 1
metric 1 1 = 1
metric 2 2 = 1
metric 3 3 = 1
metric 4 4 = 1
metric 5 5 = 1
casimir = x^2 + y^2 + z^2
base = 0, 0, 1, 0, 0
box = [-2, 2] x [-2, 2] x [-2, 2] x [-2, 2] x [-2, 2]
exclude = x^2 + y^2 + z^2 - 0.01 <= 0
";

const PRODUCT_R5: &str = "name = product_r5
dim = 5
coords = x1, x2, x3, y1, y2
pi x1 x2 = 1
pi y1 y2 = 1
metric 1 1 = 1
metric 2 2 = 1
metric 3 3 = 1
metric 4 4 = 1
metric 5 5 = 1
J = canonical
casimir = x3
base = 0, 0, 0, 0, 0
box = [-2, 2] x [-2, 2] x [-2, 2] x [-2, 2] x [-2, 2]
";

const COSYMPLECTIC_R3: &str = "name = cosymplectic_r3_base
dim = 3
coords = x, y, z
pi 1 2 = 1
metric 1 1 = 1
metric 2 2 = 1
metric 3 3 = 1
J = canonical
omega 1 2 = 1
eta 3 = 1
casimir = z
base = 0, 0, 0
box = [-2, 2] x [-2, 2] x [-2, 2]
";

const NONPOISSON: &str = "name = nonpoisson_demo
dim = 3
coords = x, y, z
pi x y = 1
pi x z = x
metric 1 1 = 1
metric 2 2 = 1
metric 3 3 = 1
base = 1, 0, 0
box = [-2, 2] x [-2, 2] x [-2, 2]
";

const ZERO_PI_CURVED: &str = "name = zero_pi_curved
dim = 2
coords = x, y
metric 1 1 = exp(-(x^2 + y^2))
metric 2 2 = exp(-(x^2 + y^2))
J = canonical
casimir = x
casimir = y
base = 0, 0
box = [-2, 2] x [-2, 2]
";

const SCALING_LINE: &str = "name = scaling_line
begin source
name = line
dim = 1
coords = x
metric 1 1 = 1
base = 0
box = [-2, 2]
end source
begin target
name = line_target
dim = 1
coords = y
metric 1 1 = 1
base = 0
box = [-4, 4]
end target
map 1 = 2*x
";

fn table(pass: &str, fail: &str, measure: &str) -> Vec<(CheckId, Expect)> {
    let mut out = Vec::new();
    for (list, e) in [(pass, Expect::Pass), (fail, Expect::Fail), (measure, Expect::Measure)] {
        for name in list.split_whitespace() {
            out.push((CheckId::from_name(name).expect("known check name"), e));
        }
    }
    out
}

const ALL_FLAT: &str = "jacobi almost_kp riemann_poisson kahler_poisson div_free nijenhuis \
                        involutivity strong_transversal mean_curvature bundle_like";

fn parse_euclid_params(id: &str) -> Result<Option<(usize, usize, usize)>> {
    let Some(rest) = id.strip_prefix("euclid_rn_rs") else {
        return Ok(None);
    };
    if rest.is_empty() {
        return Ok(Some((3, 1, 2)));
    }
    let bad = || Error::UnknownEntry(id.to_string());
    let params = rest.strip_prefix(':').ok_or_else(bad)?;
    let v: Vec<usize> = params
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    match v[..] {
        [n, r, s] if (2..=crate::expr::MAX_DIM).contains(&n) && r >= 1 && s >= 1 && r <= n && s <= n && r != s => {
            Ok(Some((n, r, s)))
        }
        _ => Err(bad()),
    }
}

fn structure_entry(id: &str, summary: &str, text: String, expected: Vec<(CheckId, Expect)>) -> Result<GalleryEntry> {
    let s = Structure::parse(&text)?;
    Ok(GalleryEntry {
        id: id.to_string(),
        summary: summary.to_string(),
        requires_override: false,
        kind: EntryKind::Structure(s),
        expected,
        text,
    })
}

fn submersion_entry(id: &str, summary: &str, text: String) -> Result<GalleryEntry> {
    let sub = SubmersionSpec::parse(&text, &structure)?;
    Ok(GalleryEntry {
        id: id.to_string(),
        summary: summary.to_string(),
        requires_override: false,
        kind: EntryKind::Submersion(sub),
        expected: Vec::new(),
        text,
    })
}

fn projection_text(name: &str, source: &str, target: &str, coords: &[&str]) -> String {
    let mut t = format!("name = {name}\nsource = {source}\ntarget = {target}\n");
    for (a, c) in coords.iter().enumerate() {
        t.push_str(&format!("map {} = {c}\n", a + 1));
    }
    t
}

/// Look up an entry. `euclid_rn_rs` accepts parameters as
/// `euclid_rn_rs:n,r,s`.
pub fn get(id: &str) -> Result<GalleryEntry> {
    if let Some((n, r, s)) = parse_euclid_params(id)? {
        let mut pass = ALL_FLAT.to_string();
        if n > 2 {
            pass.push_str(" casimir_invariance killing_poisson");
        } else {
            pass.push_str(" nabla_omega");
        }
        let mut e = structure_entry(
            id,
            "Constant bivector on Euclidean space: a flat Kähler–Poisson structure",
            euclid_text(n, r, s),
            table(&pass, "", ""),
        )?;
        e.id = if id == "euclid_rn_rs" { id.to_string() } else { format!("euclid_rn_rs:{n},{r},{s}") };
        return Ok(e);
    }
    let so3_measure = "almost_kp kahler_poisson nijenhuis bundle_like";
    let contested = "riemann_poisson kahler_poisson div_free casimir_invariance killing_poisson \
                     almost_kp nijenhuis involutivity strong_transversal mean_curvature bundle_like";
    match id {
        "so3_euclid" => structure_entry(
            id,
            "Lie–Poisson structure of so(3)* with the Euclidean metric; leaves are spheres",
            so3_text(id, "", "", false),
            table(
                "jacobi div_free",
                "riemann_poisson casimir_invariance killing_poisson involutivity strong_transversal mean_curvature",
                so3_measure,
            ),
        ),
        "so3_rescaled" => structure_entry(
            id,
            "so(3)* bivector multiplied by the radius: transversally invariant and divergence free",
            so3_text(id, R, "", false),
            table(
                "jacobi div_free casimir_invariance killing_poisson strong_transversal involutivity bundle_like",
                "",
                "riemann_poisson mean_curvature almost_kp kahler_poisson nijenhuis",
            ),
        ),
        "so3_reg_conformal" => structure_entry(
            id,
            "Regular part of so(3)* with metric r^-1 times Euclidean (cometric r times Euclidean)",
            so3_text(id, "", R, true),
            table("jacobi", "", contested),
        ),
        "so3_reg_conformal_dual" => structure_entry(
            id,
            "Regular part of so(3)* with cometric r^-1 times Euclidean",
            so3_text(id, "", &format!("1/{R}"), true),
            table("jacobi", "", contested),
        ),
        "so3_reg_conformal_rescaled" => structure_entry(
            id,
            "Radius-rescaled so(3)* bivector with cometric r times Euclidean",
            so3_text(id, R, R, true),
            table("jacobi", "", contested),
        ),
        "so3_reg_conformal_rescaled_dual" => structure_entry(
            id,
            "Radius-rescaled so(3)* bivector with cometric r^-1 times Euclidean",
            so3_text(id, R, &format!("1/{R}"), true),
            table("jacobi", "", contested),
        ),
        "sl2_lorentz" => structure_entry(
            id,
            "Lie–Poisson structure of sl(2)* with the Lorentzian metric dx²+dy²−dz²",
            sl2_text(id, "", "", 100.0),
            table(
                "jacobi div_free",
                "riemann_poisson casimir_invariance killing_poisson",
                "almost_kp kahler_poisson nijenhuis involutivity strong_transversal mean_curvature bundle_like",
            ),
        ),
        "sl2_reg_conformal" | "sl2_reg_conformal_dual" | "sl2_reg_conformal_rescaled" | "sl2_reg_conformal_rescaled_dual" => {
            let rho = format!("sqrt(abs({Q}))");
            let (factor, cometric, summary) = match id {
                "sl2_reg_conformal" => ("", rho.clone(), "Regular part of sl(2)* with metric rho^-1 times Lorentzian"),
                "sl2_reg_conformal_dual" => ("", format!("1/{rho}"), "Regular part of sl(2)* with cometric rho^-1 times Lorentzian"),
                "sl2_reg_conformal_rescaled" => (rho.as_str(), rho.clone(), "rho-rescaled sl(2)* bivector with cometric rho times Lorentzian"),
                _ => (rho.as_str(), format!("1/{rho}"), "rho-rescaled sl(2)* bivector with cometric rho^-1 times Lorentzian"),
            };
            structure_entry(id, summary, sl2_text(id, factor, &cometric, 2.0), table("jacobi", "", contested))
        }
        "symplectic_r2_conformal" => structure_entry(
            id,
            "Symplectic plane with the conformal metric e^x times Euclidean",
            plane_text(id, "1", "exp(-x)"),
            table(
                "jacobi",
                "riemann_poisson div_free nabla_omega almost_kp",
                "nijenhuis mean_curvature bundle_like",
            ),
        ),
        "symplectic_r2_killing" => structure_entry(
            id,
            "Symplectic plane, metric e^x times Euclidean, bivector rescaled by e^-x",
            plane_text(id, "exp(-x)", "exp(-x)"),
            table("jacobi div_free almost_kp", "", "riemann_poisson kahler_poisson nabla_omega nijenhuis"),
        ),
        "symplectic_r2_conformal_cubed" => structure_entry(
            id,
            "Symplectic plane with metric e^(3x) times Euclidean (conformal factor |rho|^2)",
            plane_text(id, "1", "exp(-3*x)"),
            table("jacobi", "", "div_free riemann_poisson nabla_omega"),
        ),
        "kahler_r4" => structure_entry(
            id,
            "Canonical Kähler structure of R^4",
            KAHLER_R4.to_string(),
            table(&format!("{ALL_FLAT} nabla_omega"), "", ""),
        ),
        "so3_times_plane" => structure_entry(
            id,
            "Product of so(3)* and the symplectic plane, Euclidean metric",
            SO3_TIMES_PLANE.to_string(),
            table("jacobi div_free", "riemann_poisson casimir_invariance", ""),
        ),
        "product_r5" => structure_entry(
            id,
            "Product of two symplectic planes and a line",
            PRODUCT_R5.to_string(),
            table(ALL_FLAT, "", ""),
        ),
        "cosymplectic_r3_base" => structure_entry(
            id,
            "R^3 with omega = dx∧dy, eta = dz and its Poisson bivector",
            COSYMPLECTIC_R3.to_string(),
            table(ALL_FLAT, "", ""),
        ),
        "nonpoisson_demo" => {
            let mut e = structure_entry(
                id,
                "A bivector failing the Jacobi identity (needs the override flag)",
                NONPOISSON.to_string(),
                table("", "jacobi", ""),
            )?;
            e.requires_override = true;
            Ok(e)
        }
        "zero_pi_curved" => structure_entry(
            id,
            "Zero bivector on a curved conformally flat plane: trivially Kähler–Poisson",
            ZERO_PI_CURVED.to_string(),
            table(
                "jacobi almost_kp riemann_poisson kahler_poisson div_free casimir_invariance killing_poisson \
                 involutivity strong_transversal nijenhuis mean_curvature bundle_like",
                "",
                "",
            ),
        ),
        "product_proj" => submersion_entry(
            id,
            "Projection of a product Poisson manifold onto its first factor",
            projection_text(id, "product_r5", "euclid_rn_rs:3,1,2", &["x1", "x2", "x3"]),
        ),
        "product_so3" => submersion_entry(
            id,
            "Projection of so(3)* x R^2 onto so(3)*",
            projection_text(id, "so3_times_plane", "so3_euclid", &["x", "y", "z"]),
        ),
        "r4_to_r3" => submersion_entry(
            id,
            "Projection of Kähler R^4 onto R^3 with the bivector d1∧d2",
            projection_text(id, "kahler_r4", "euclid_rn_rs:3,1,2", &["x1", "x2", "x3"]),
        ),
        "cosymplectic_r3" => {
            let m = structure("cosymplectic_r3_base")?;
            let mut sub = cosymplectic_lift(&m)?;
            sub.name = id.to_string();
            Ok(GalleryEntry {
                id: id.to_string(),
                summary: "Symplectic lift M x R of cosymplectic R^3 and its projection".into(),
                requires_override: false,
                text: sub.to_text(),
                kind: EntryKind::Submersion(sub),
                expected: Vec::new(),
            })
        }
        "translation_quotient" => submersion_entry(
            id,
            "Quotient of R^5 by translations along x3, x5 (coordinate chart of the quotient)",
            projection_text(id, "euclid_rn_rs:5,1,2", "euclid_rn_rs:3,1,2", &["x1", "x2", "x4"]),
        ),
        "scaling_line" => submersion_entry(id, "The map x -> 2x between Euclidean lines", SCALING_LINE.to_string()),
        _ => Err(Error::UnknownEntry(id.to_string())),
    }
}

/// The structure of a structure entry, parsed but not validated.
pub fn structure(id: &str) -> Result<Structure> {
    match get(id)?.kind {
        EntryKind::Structure(s) => Ok(s),
        EntryKind::Submersion(_) => Err(Error::Invalid(format!("`{id}` is a submersion, not a structure"))),
    }
}

pub fn submersion(id: &str) -> Result<SubmersionSpec> {
    match get(id)?.kind {
        EntryKind::Submersion(s) => Ok(s),
        EntryKind::Structure(_) => Err(Error::Invalid(format!("`{id}` is a structure, not a submersion"))),
    }
}

/// Every structure in the gallery, including both sides of each
/// submersion, keyed by name and without duplicates.
pub fn all_structures() -> Result<Vec<Structure>> {
    let mut out: Vec<Structure> = Vec::new();
    let mut push = |s: Structure| {
        if !out.iter().any(|o| o.name == s.name) {
            out.push(s);
        }
    };
    for id in IDS {
        match get(id)?.kind {
            EntryKind::Structure(s) => push(s),
            EntryKind::Submersion(sub) => {
                push(sub.p);
                push(sub.m);
            }
        }
    }
    for extra in ["euclid_rn_rs:2,1,2", "euclid_rn_rs:5,2,4", "euclid_rn_rs:4,1,3"] {
        push(structure(extra)?);
    }
    Ok(out)
}

/// The endomorphism written out for the regular so(3)* and sl(2)* examples,
/// reading `∂_a ∧ dx^b` as `∂_a ⊗ dx^b`, as a matrix `J_i^k` on covectors.
/// Gallery entries carry the canonical `J = G⁻¹Π` instead.
pub fn written_j(id: &str, p: &[f64]) -> Option<Mat<f64>> {
    let sign = if id.starts_with("so3_reg_conformal") {
        1.0
    } else if id.starts_with("sl2_reg_conformal") {
        -1.0
    } else {
        return None;
    };
    let (x, y, z) = (p[0], p[1], p[2]);
    let mut j = Mat::zeros(3, 3);
    j[(1, 0)] = sign * z;
    j[(0, 2)] = -sign * y;
    j[(2, 1)] = sign * x;
    Some(j)
}

/// `(max |J − J_written|, max |Π − G·J_written|)` at `p` for the entries
/// that have a written endomorphism.
pub fn written_j_deviation(id: &str, p: &[f64]) -> Result<Option<(f64, f64)>> {
    let Some(jw) = written_j(id, p) else {
        return Ok(None);
    };
    let s = structure(id)?;
    let local = Local::new(&s, p)?;
    let j = local.j_values().ok_or(Error::MissingJ)?;
    let compat = local.pi_values().sub(&local.g_values().matmul(&jw)).max_abs();
    Ok(Some((j.sub(&jw).max_abs(), compat)))
}
