//! Structures on a single chart and their text format.
//!
//! ```text
//! name = so3_euclid
//! dim = 3
//! coords = x, y, z
//! pi 1 2 = z            # upper triangle; indices are 1-based or coordinate names
//! pi z x = y
//! pi y z = x
//! metric 1 1 = 1        # cometric g^{ij}, upper triangle
//! metric 2 2 = 1
//! metric 3 3 = 1
//! casimir = x^2 + y^2 + z^2
//! base = 0, 0, 1
//! box = [-2, 2] x [-2, 2] x [-2, 2]
//! exclude = x^2 + y^2 + z^2 - 0.01 <= 0
//! ```
//!
//! Optional lines: `signature = r, s`, `J i j = <expr>` or `J = canonical`,
//! `omega i j = <expr>`, `eta i = <expr>` and `pi = neg_inverse_omega`
//! (which takes π as −ω⁻¹ pointwise instead of from `pi` lines).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr, MAX_DIM};
use crate::fields;

/// Seed of the pseudorandom validation points drawn at load time.
pub const VALIDATION_SEED: u64 = 0x5eed_0f_10ad;
pub const VALIDATION_POINTS: usize = 32;

#[derive(Clone, Debug, PartialEq)]
pub enum PiSpec {
    /// Full skew matrix of component expressions.
    Components(Vec<Expr>),
    /// π := −ω⁻¹ computed pointwise from the declared `omega`.
    NegInverseOmega,
}

#[derive(Clone, Debug, PartialEq)]
pub enum JSpec {
    /// Full matrix of `J_i^j` expressions, row `i`, column `j`.
    Explicit(Vec<Expr>),
    /// `J_i^l = g_{ij} π^{jl}`.
    Canonical,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Structure {
    pub name: String,
    pub dim: usize,
    pub coords: Vec<String>,
    pub signature: (usize, usize),
    pub pi: PiSpec,
    /// Full symmetric matrix of cometric expressions.
    pub cometric: Vec<Expr>,
    pub j: Option<JSpec>,
    pub casimirs: Vec<Expr>,
    pub base: Vec<f64>,
    pub bbox: Vec<(f64, f64)>,
    pub exclude: Vec<Expr>,
    pub omega: Option<Vec<Expr>>,
    pub eta: Option<Vec<Expr>>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct LoadOptions {
    pub allow_non_poisson: bool,
}

/// Parse and validate a structure file.
pub fn load_structure(text: &str, opts: LoadOptions) -> Result<Structure> {
    let s = Structure::parse(text)?;
    s.validate(opts)?;
    Ok(s)
}

impl Structure {
    pub fn pi_expr(&self, i: usize, j: usize) -> Option<&Expr> {
        match &self.pi {
            PiSpec::Components(m) => Some(&m[i * self.dim + j]),
            PiSpec::NegInverseOmega => None,
        }
    }

    pub fn cometric_expr(&self, i: usize, j: usize) -> &Expr {
        &self.cometric[i * self.dim + j]
    }

    /// Every expression the structure is built from, labelled.
    pub fn components(&self) -> Vec<(String, &Expr)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i..n {
                if let Some(e) = self.pi_expr(i, j) {
                    if i != j {
                        out.push((format!("pi {} {}", i + 1, j + 1), e));
                    }
                }
                out.push((format!("metric {} {}", i + 1, j + 1), self.cometric_expr(i, j)));
            }
        }
        if let Some(JSpec::Explicit(m)) = &self.j {
            for i in 0..n {
                for j in 0..n {
                    out.push((format!("J {} {}", i + 1, j + 1), &m[i * n + j]));
                }
            }
        }
        if let Some(w) = &self.omega {
            for i in 0..n {
                for j in i + 1..n {
                    out.push((format!("omega {} {}", i + 1, j + 1), &w[i * n + j]));
                }
            }
        }
        if let Some(eta) = &self.eta {
            for (i, e) in eta.iter().enumerate() {
                out.push((format!("eta {}", i + 1), e));
            }
        }
        for (k, c) in self.casimirs.iter().enumerate() {
            out.push((format!("casimir {}", k + 1), c));
        }
        out
    }

    /// Inside the validity box and off every excluded locus.
    pub fn in_domain(&self, p: &[f64]) -> bool {
        if p.len() != self.dim {
            return false;
        }
        let inside = p
            .iter()
            .zip(&self.bbox)
            .all(|(x, (lo, hi))| *x >= *lo && *x <= *hi);
        inside
            && self
                .exclude
                .iter()
                .all(|e| matches!(e.eval(p), Ok(v) if v > 0.0))
    }

    /// Deterministic uniform samples from the validity box, rejecting
    /// excluded points. May return fewer than `count` points if the domain
    /// is nearly empty.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while out.len() < count && attempts < 1000 * (count + 1) {
            attempts += 1;
            let p: Vec<f64> = self
                .bbox
                .iter()
                .map(|&(lo, hi)| if hi > lo { rng.random_range(lo..hi) } else { lo })
                .collect();
            if self.in_domain(&p) {
                out.push(p);
            }
        }
        out
    }

    pub fn validate(&self, opts: LoadOptions) -> Result<()> {
        let mut points = vec![self.base.clone()];
        points.extend(self.sample_points(VALIDATION_POINTS, VALIDATION_SEED));
        if !self.in_domain(&self.base) {
            return Err(Error::Validation {
                check: "base_in_domain".into(),
                point: self.base.clone(),
                defect: f64::NAN,
            });
        }
        if matches!(self.pi, PiSpec::NegInverseOmega) && self.omega.is_none() {
            return Err(Error::Invalid("`pi = neg_inverse_omega` needs omega lines".into()));
        }

        let local = fields::Local::new(self, &self.base)?;
        let (r, s) = local.signature();
        if (r, s) != self.signature {
            return Err(Error::Validation {
                check: format!("signature (declared {:?}, found {:?})", self.signature, (r, s)),
                point: self.base.clone(),
                defect: f64::NAN,
            });
        }

        let mut worst: BTreeMap<&str, (f64, Vec<f64>)> = BTreeMap::new();
        let mut record = |check: &'static str, defect: f64, p: &[f64]| {
            let e = worst.entry(check).or_insert((0.0, p.to_vec()));
            if defect > e.0 || defect.is_nan() {
                *e = (defect, p.to_vec());
            }
        };
        for p in &points {
            let local = fields::Local::new(self, p)?;
            let scale = 1.0 + local.pi_values().max_abs();
            record("jacobi", fields::jacobiator(&local) / (scale * scale), p);
            for c in &self.casimirs {
                let df = c.eval_jet(p)?;
                let v = local.sharp(df.partials());
                let grad = 1.0 + df.partials().iter().fold(0.0f64, |m, x| m.max(x.abs()));
                let defect = v.iter().fold(0.0f64, |m, x| m.max(x.abs())) / (scale * grad);
                record("casimir", defect, p);
            }
        }
        for (check, (defect, point)) in worst {
            if check == "jacobi" && opts.allow_non_poisson {
                continue;
            }
            if !(defect < 1e-9) {
                return Err(Error::Validation {
                    check: check.to_string(),
                    point,
                    defect,
                });
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Structure> {
        let lines = logical_lines(text);
        Self::from_lines(&lines)
    }

    pub(crate) fn from_lines(lines: &[(usize, String)]) -> Result<Structure> {
        let mut name = None;
        let mut dim = None;
        let mut coords: Option<Vec<String>> = None;
        let mut rest = Vec::new();
        for (line, text) in lines {
            let (lhs, rhs) = split_assignment(*line, text)?;
            match lhs.as_str() {
                "name" => name = Some(rhs.to_string()),
                "dim" => {
                    let d: usize = rhs.parse().map_err(|_| Error::Format {
                        line: *line,
                        message: format!("dim must be a positive integer, got `{rhs}`"),
                    })?;
                    if d == 0 || d > MAX_DIM {
                        return Err(Error::Format {
                            line: *line,
                            message: format!("dim must be between 1 and {MAX_DIM}"),
                        });
                    }
                    dim = Some(d);
                }
                "coords" => {
                    let names: Vec<String> = rhs.split(',').map(|s| s.trim().to_string()).collect();
                    for nm in &names {
                        let ok = nm.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
                            && nm.chars().all(|c| c.is_alphanumeric() || c == '_');
                        if !ok {
                            return Err(Error::Format {
                                line: *line,
                                message: format!("bad coordinate name `{nm}`"),
                            });
                        }
                    }
                    coords = Some(names);
                }
                _ => rest.push((*line, lhs, rhs)),
            }
        }
        let missing = |what: &str| Error::Format {
            line: 0,
            message: format!("missing `{what}`"),
        };
        let name = name.ok_or_else(|| missing("name"))?;
        let n = dim.ok_or_else(|| missing("dim"))?;
        let coords = coords.ok_or_else(|| missing("coords"))?;
        if coords.len() != n {
            return Err(Error::Format {
                line: 0,
                message: format!("{} coordinates declared for dim {n}", coords.len()),
            });
        }

        let zero = || vec![Expr::Const(0.0); n * n];
        let mut pi = zero();
        let mut pi_seen = BTreeMap::new();
        let mut pi_from_omega = false;
        let mut metric = zero();
        let mut metric_seen = BTreeMap::new();
        let mut j_explicit: Option<Vec<Expr>> = None;
        let mut j_canonical = false;
        let mut omega: Option<Vec<Expr>> = None;
        let mut eta: Option<Vec<Expr>> = None;
        let mut casimirs = Vec::new();
        let mut base = None;
        let mut bbox = None;
        let mut exclude = Vec::new();
        let mut signature = (n, 0);

        for (line, lhs, rhs) in rest {
            let expr = |src: &str| {
                parse_expr(src, &coords).map_err(|source| Error::Parse { line, source })
            };
            let fmt_err = |message: String| Error::Format { line, message };
            let words: Vec<&str> = lhs.split_whitespace().collect();
            let index = |w: &str| -> Result<usize> {
                if let Ok(k) = w.parse::<usize>() {
                    if (1..=n).contains(&k) {
                        return Ok(k - 1);
                    }
                    return Err(fmt_err(format!("index {k} out of range 1..={n}")));
                }
                coords
                    .iter()
                    .position(|c| c == w)
                    .ok_or_else(|| fmt_err(format!("unknown index `{w}`")))
            };
            match words.as_slice() {
                ["pi"] if rhs == "neg_inverse_omega" => pi_from_omega = true,
                ["pi", a, b] => {
                    let (i, j) = (index(a)?, index(b)?);
                    if i == j {
                        return Err(fmt_err("diagonal pi entries are zero by skewness".into()));
                    }
                    let (lo, hi, e) = if i < j {
                        (i, j, expr(&rhs)?)
                    } else {
                        (j, i, Expr::neg(expr(&rhs)?))
                    };
                    if pi_seen.insert((lo, hi), line).is_some() {
                        return Err(fmt_err(format!("pi {} {} given twice", lo + 1, hi + 1)));
                    }
                    pi[lo * n + hi] = e.clone();
                    pi[hi * n + lo] = Expr::neg(e);
                }
                ["metric", a, b] => {
                    let (i, j) = (index(a)?, index(b)?);
                    let (lo, hi) = (i.min(j), i.max(j));
                    if metric_seen.insert((lo, hi), line).is_some() {
                        return Err(fmt_err(format!("metric {} {} given twice", lo + 1, hi + 1)));
                    }
                    let e = expr(&rhs)?;
                    metric[lo * n + hi] = e.clone();
                    metric[hi * n + lo] = e;
                }
                ["J"] if rhs == "canonical" => j_canonical = true,
                ["J", a, b] => {
                    let (i, j) = (index(a)?, index(b)?);
                    j_explicit.get_or_insert_with(zero)[i * n + j] = expr(&rhs)?;
                }
                ["omega", a, b] => {
                    let (i, j) = (index(a)?, index(b)?);
                    if i == j {
                        return Err(fmt_err("diagonal omega entries are zero by skewness".into()));
                    }
                    let e = expr(&rhs)?;
                    let w = omega.get_or_insert_with(zero);
                    let (e, lo, hi) = if i < j { (e, i, j) } else { (Expr::neg(e), j, i) };
                    w[lo * n + hi] = e.clone();
                    w[hi * n + lo] = Expr::neg(e);
                }
                ["eta", a] => {
                    let i = index(a)?;
                    eta.get_or_insert_with(|| vec![Expr::Const(0.0); n])[i] = expr(&rhs)?;
                }
                ["casimir"] => casimirs.push(expr(&rhs)?),
                ["base"] => {
                    let p = parse_numbers(&rhs).map_err(fmt_err)?;
                    if p.len() != n {
                        return Err(fmt_err(format!("base has {} entries, dim is {n}", p.len())));
                    }
                    base = Some(p);
                }
                ["box"] => {
                    let b = parse_box(&rhs).map_err(fmt_err)?;
                    if b.len() != n {
                        return Err(fmt_err(format!("box has {} intervals, dim is {n}", b.len())));
                    }
                    bbox = Some(b);
                }
                ["exclude"] => {
                    let body = match rhs.rsplit_once("<=") {
                        Some((body, zero)) if constant(zero) == Ok(0.0) => body,
                        _ => return Err(fmt_err("exclude must read `<expr> <= 0`".into())),
                    };
                    exclude.push(expr(body.trim())?);
                }
                ["signature"] => {
                    let v = parse_numbers(&rhs).map_err(fmt_err)?;
                    match v.as_slice() {
                        [r, s] if r.fract() == 0.0 && s.fract() == 0.0 && r + s == n as f64 && *r >= 0.0 && *s >= 0.0 => {
                            signature = (*r as usize, *s as usize)
                        }
                        _ => return Err(fmt_err(format!("signature must be two counts summing to {n}"))),
                    }
                }
                _ => return Err(fmt_err(format!("unrecognised entry `{lhs}`"))),
            }
        }

        let pi = if pi_from_omega {
            if !pi_seen.is_empty() {
                return Err(Error::Format {
                    line: 0,
                    message: "pi lines conflict with `pi = neg_inverse_omega`".into(),
                });
            }
            if omega.is_none() {
                return Err(missing("omega (needed by pi = neg_inverse_omega)"));
            }
            PiSpec::NegInverseOmega
        } else {
            PiSpec::Components(pi)
        };
        let j = match (j_explicit, j_canonical) {
            (Some(_), true) => {
                return Err(Error::Format {
                    line: 0,
                    message: "J given both explicitly and as canonical".into(),
                })
            }
            (Some(m), false) => Some(JSpec::Explicit(m)),
            (None, true) => Some(JSpec::Canonical),
            (None, false) => None,
        };
        Ok(Structure {
            name,
            dim: n,
            coords,
            signature,
            pi,
            cometric: metric,
            j,
            casimirs,
            base: base.ok_or_else(|| missing("base"))?,
            bbox: bbox.ok_or_else(|| missing("box"))?,
            exclude,
            omega,
            eta,
        })
    }

    /// Render in the structure-file format; `parse` of the result gives back
    /// an equal structure.
    pub fn to_text(&self) -> String {
        let n = self.dim;
        let c = &self.coords;
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(format!("name = {}", self.name));
        line(format!("dim = {n}"));
        line(format!("coords = {}", c.join(", ")));
        line(format!("signature = {}, {}", self.signature.0, self.signature.1));
        match &self.pi {
            PiSpec::Components(m) => {
                for i in 0..n {
                    for j in i + 1..n {
                        let e = &m[i * n + j];
                        if !e.is_zero() {
                            line(format!("pi {} {} = {}", i + 1, j + 1, e.to_source(c)));
                        }
                    }
                }
            }
            PiSpec::NegInverseOmega => line("pi = neg_inverse_omega".into()),
        }
        for i in 0..n {
            for j in i..n {
                let e = self.cometric_expr(i, j);
                if !e.is_zero() {
                    line(format!("metric {} {} = {}", i + 1, j + 1, e.to_source(c)));
                }
            }
        }
        match &self.j {
            Some(JSpec::Canonical) => line("J = canonical".into()),
            Some(JSpec::Explicit(m)) => {
                let mut any = false;
                for i in 0..n {
                    for j in 0..n {
                        let e = &m[i * n + j];
                        if !e.is_zero() {
                            any = true;
                            line(format!("J {} {} = {}", i + 1, j + 1, e.to_source(c)));
                        }
                    }
                }
                if !any {
                    line("J 1 1 = 0.0".into());
                }
            }
            None => {}
        }
        if let Some(w) = &self.omega {
            let mut any = false;
            for i in 0..n {
                for j in i + 1..n {
                    let e = &w[i * n + j];
                    if !e.is_zero() {
                        any = true;
                        line(format!("omega {} {} = {}", i + 1, j + 1, e.to_source(c)));
                    }
                }
            }
            if !any {
                line("omega 1 2 = 0.0".into());
            }
        }
        if let Some(eta) = &self.eta {
            for (i, e) in eta.iter().enumerate() {
                line(format!("eta {} = {}", i + 1, e.to_source(c)));
            }
        }
        for cas in &self.casimirs {
            line(format!("casimir = {}", cas.to_source(c)));
        }
        line(format!(
            "base = {}",
            self.base.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
        ));
        line(format!(
            "box = {}",
            self.bbox
                .iter()
                .map(|(lo, hi)| format!("[{lo:?}, {hi:?}]"))
                .collect::<Vec<_>>()
                .join(" x ")
        ));
        for e in &self.exclude {
            line(format!("exclude = {} <= 0", e.to_source(c)));
        }
        out
    }
}

/// Strip comments and blank lines, keeping 1-based line numbers.
pub(crate) fn logical_lines(text: &str) -> Vec<(usize, String)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let l = l.split('#').next().unwrap_or("").trim();
            (!l.is_empty()).then(|| (i + 1, l.to_string()))
        })
        .collect()
}

pub(crate) fn split_assignment(line: usize, text: &str) -> Result<(String, String)> {
    let (lhs, rhs) = text.split_once('=').ok_or_else(|| Error::Format {
        line,
        message: format!("expected `key = value`, got `{text}`"),
    })?;
    let lhs = lhs.split_whitespace().collect::<Vec<_>>().join(" ");
    Ok((lhs, rhs.trim().to_string()))
}

fn constant(src: &str) -> Result<f64, String> {
    let e = parse_expr(src.trim(), &[]).map_err(|e| e.to_string())?;
    e.eval::<f64>(&[]).map_err(|e| e.to_string())
}

pub(crate) fn parse_numbers(src: &str) -> Result<Vec<f64>, String> {
    let s = src.trim();
    let s = s
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .unwrap_or(s);
    s.split(',').map(constant).collect()
}

fn parse_box(src: &str) -> Result<Vec<(f64, f64)>, String> {
    let mut out = Vec::new();
    let mut rest = src.trim();
    while !rest.is_empty() {
        let open = rest
            .strip_prefix('[')
            .ok_or_else(|| format!("expected `[` in box near `{rest}`"))?;
        let close = open.find(']').ok_or("unclosed `[` in box")?;
        let (lo, hi) = open[..close]
            .split_once(',')
            .ok_or("box interval needs `lo, hi`")?;
        let (lo, hi) = (constant(lo)?, constant(hi)?);
        if !(lo <= hi) {
            return Err(format!("empty box interval [{lo}, {hi}]"));
        }
        out.push((lo, hi));
        rest = open[close + 1..].trim_start();
        if let Some(r) = rest.strip_prefix('x').or_else(|| rest.strip_prefix('×')) {
            rest = r.trim_start();
        } else if !rest.is_empty() {
            return Err(format!("expected `x` between box intervals near `{rest}`"));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SO3: &str = "
        name = so3
        dim = 3
        coords = x, y, z
        pi x y = z
        pi z x = y   # stored as pi 1 3 = -y
        pi 2 3 = x
        metric 1 1 = 1
        metric 2 2 = 1
        metric 3 3 = 1
        casimir = x^2 + y^2 + z^2
        base = 0, 0, 1
        box = [-2, 2] x [-2, 2] x [-2, 2]
        exclude = x^2 + y^2 + z^2 - 0.01 <= 0
    ";

    #[test]
    fn lower_triangle_entries_are_negated() {
        let s = Structure::parse(SO3).unwrap();
        assert_eq!(s.pi_expr(0, 2).unwrap().eval(&[1.0, 2.0, 3.0]).unwrap(), -2.0);
        assert_eq!(s.pi_expr(2, 0).unwrap().eval(&[1.0, 2.0, 3.0]).unwrap(), 2.0);
        s.validate(LoadOptions::default()).unwrap();
    }

    #[test]
    fn export_round_trips() {
        let s = Structure::parse(SO3).unwrap();
        let again = Structure::parse(&s.to_text()).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn sampler_respects_exclusion_and_is_deterministic() {
        let s = Structure::parse(SO3).unwrap();
        let a = s.sample_points(200, 7);
        let b = s.sample_points(200, 7);
        assert_eq!(a, b);
        assert_eq!(a.len(), 200);
        for p in &a {
            assert!(p.iter().map(|x| x * x).sum::<f64>() > 0.01);
            assert!(p.iter().all(|x| x.abs() <= 2.0));
        }
        assert_ne!(a, s.sample_points(200, 8));
    }

    #[test]
    fn format_errors_carry_line_numbers() {
        let bad = SO3.replace("pi 2 3 = x", "pi 2 3 = x +");
        match Structure::parse(&bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("{other:?}"),
        }
        let bad = SO3.replace("dim = 3", "dim = 4");
        assert!(matches!(Structure::parse(&bad), Err(Error::Format { .. })));
        let bad = SO3.replace("metric 3 3 = 1", "metric 3 3 = 1\nmetric 3 3 = 2");
        assert!(matches!(Structure::parse(&bad), Err(Error::Format { .. })));
    }

    #[test]
    fn wrong_casimir_is_rejected() {
        let bad = SO3.replace("x^2 + y^2 + z^2\n", "x^2 + y^2 - z^2\n");
        let s = Structure::parse(&bad).unwrap();
        match s.validate(LoadOptions::default()) {
            Err(Error::Validation { check, .. }) => assert_eq!(check, "casimir"),
            other => panic!("{other:?}"),
        }
    }
}
