//! Pointwise field data and the first-order operators built on it:
//! anchor map, Hamiltonian fields, jacobiator, Koszul bracket and Lie
//! derivatives.
//!
//! Fields are passed around as jets of their components at the point, so
//! every operator here needs only values and first partials.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::expr::{Expr, Jet};
use crate::linalg::{dot, Mat};
use crate::structure::{JSpec, PiSpec, Structure};

/// Jets of π, the cometric, the metric and J at one point.
#[derive(Clone, Debug)]
pub struct Local {
    pub point: Vec<f64>,
    pub pi: Mat<Jet>,
    /// Cometric `g^{ij}`.
    pub g: Mat<Jet>,
    /// Metric `g_{ij}`, the inverse of the cometric.
    pub gcov: Mat<Jet>,
    pub j: Option<Mat<Jet>>,
    pi0: Mat<f64>,
    g0: Mat<f64>,
    gcov0: Mat<f64>,
}

fn eval_matrix(n: usize, exprs: &[Expr], p: &[f64]) -> Result<Mat<Jet>> {
    let mut m = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = exprs[i * n + j].eval_jet(p)?;
        }
    }
    Ok(m)
}

impl Local {
    pub fn new(s: &Structure, p: &[f64]) -> Result<Local> {
        let n = s.dim;
        if p.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.len(),
            });
        }
        let pi = match &s.pi {
            PiSpec::Components(m) => eval_matrix(n, m, p)?,
            PiSpec::NegInverseOmega => {
                let omega = eval_matrix(n, s.omega.as_deref().unwrap_or(&[]), p)?;
                omega
                    .inverse()
                    .ok_or(Error::DegeneratePi { point: p.to_vec() })?
                    .scale(Jet::constant(-1.0))
            }
        };
        let g = eval_matrix(n, &s.cometric, p)?;
        let j = match &s.j {
            Some(JSpec::Explicit(m)) => Some(eval_matrix(n, m, p)?),
            _ => None,
        };
        let mut local = Local::from_jets(p, pi, g, j)?;
        if matches!(s.j, Some(JSpec::Canonical)) {
            local.j = Some(local.canonical_j());
        }
        Ok(local)
    }

    pub fn from_jets(p: &[f64], pi: Mat<Jet>, g: Mat<Jet>, j: Option<Mat<Jet>>) -> Result<Local> {
        let gcov = g.inverse().ok_or(Error::SingularG { point: p.to_vec() })?;
        Ok(Local {
            point: p.to_vec(),
            pi0: pi.values(),
            g0: g.values(),
            gcov0: gcov.values(),
            pi,
            g,
            gcov,
            j,
        })
    }

    pub fn dim(&self) -> usize {
        self.point.len()
    }

    pub fn pi_values(&self) -> &Mat<f64> {
        &self.pi0
    }

    pub fn g_values(&self) -> &Mat<f64> {
        &self.g0
    }

    pub fn gcov_values(&self) -> &Mat<f64> {
        &self.gcov0
    }

    pub fn j_values(&self) -> Option<Mat<f64>> {
        self.j.as_ref().map(Mat::values)
    }

    /// `J_i^l = g_{ij} π^{jl}`, i.e. `J = −♭∘π♯` on covectors.
    pub fn canonical_j(&self) -> Mat<Jet> {
        self.gcov.matmul(&self.pi)
    }

    /// Counts of positive and negative eigenvalues of the cometric.
    pub fn signature(&self) -> (usize, usize) {
        let eig = SymmetricEigen::new(self.g0.to_nalgebra());
        let pos = eig.eigenvalues.iter().filter(|&&l| l > 0.0).count();
        (pos, self.dim() - pos)
    }

    pub fn rank(&self, eps_rank: f64) -> usize {
        self.pi0.rank(eps_rank)
    }

    /// `(π♯α)^j = α_i π^{ij}`.
    pub fn sharp(&self, alpha: &[f64]) -> Vec<f64> {
        self.pi0.vec_mul(alpha)
    }

    pub fn sharp_jet(&self, alpha: &[Jet]) -> Vec<Jet> {
        self.pi.vec_mul(alpha)
    }

    /// `π(α, β) = α_i π^{ij} β_j`.
    pub fn pi_pair(&self, alpha: &[f64], beta: &[f64]) -> f64 {
        self.pi0.form(alpha, beta)
    }

    /// Cometric pairing `⟨α, β⟩`.
    pub fn pair(&self, alpha: &[f64], beta: &[f64]) -> f64 {
        self.g0.form(alpha, beta)
    }

    /// Metric pairing of vectors.
    pub fn pair_vectors(&self, u: &[f64], v: &[f64]) -> f64 {
        self.gcov0.form(u, v)
    }

    /// `♯`: covector to vector.
    pub fn raise(&self, alpha: &[f64]) -> Vec<f64> {
        self.g0.mul_vec(alpha)
    }

    pub fn raise_jet(&self, alpha: &[Jet]) -> Vec<Jet> {
        self.g.mul_vec(alpha)
    }

    /// `♭`: vector to covector.
    pub fn lower(&self, v: &[f64]) -> Vec<f64> {
        self.gcov0.mul_vec(v)
    }

    pub fn lower_jet(&self, v: &[Jet]) -> Vec<Jet> {
        self.gcov.mul_vec(v)
    }

    /// A covector with constant components, as a field.
    pub fn constant_field(&self, v: &[f64]) -> Vec<Jet> {
        let n = self.dim();
        v.iter().map(|&x| Jet::from_parts(x, &vec![0.0; n])).collect()
    }

    /// The coordinate differential `dx^i`.
    pub fn coordinate_form(&self, i: usize) -> Vec<Jet> {
        let mut v = vec![0.0; self.dim()];
        v[i] = 1.0;
        self.constant_field(&v)
    }
}

/// Jets of `df` (first and second derivatives of `f`).
pub fn differential_jet(f: &Expr, p: &[f64]) -> Result<Vec<Jet>> {
    (0..p.len())
        .map(|k| Ok(f.derivative(k).eval_jet(p)?))
        .collect()
}

/// `X_f = π♯(df)` at `p`.
pub fn hamiltonian_field(s: &Structure, f: &Expr, p: &[f64]) -> Result<Vec<f64>> {
    let local = Local::new(s, p)?;
    let df = f.eval_jet(p)?;
    Ok(local.sharp(df.partials()))
}

/// `X_f` as a field, including its first derivatives.
pub fn hamiltonian_field_jet(local: &Local, f: &Expr) -> Result<Vec<Jet>> {
    let df = differential_jet(f, &local.point)?;
    Ok(local.sharp_jet(&df))
}

/// Largest cyclic sum `π^{il}∂_lπ^{jk} + π^{jl}∂_lπ^{ki} + π^{kl}∂_lπ^{ij}`
/// over `i < j < k`.
pub fn jacobiator(local: &Local) -> f64 {
    let n = local.dim();
    let pi = &local.pi;
    let term = |i: usize, j: usize, k: usize| -> f64 {
        (0..n).map(|l| pi[(i, l)].value() * pi[(j, k)].d(l)).sum()
    };
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let c = term(i, j, k) + term(j, k, i) + term(k, i, j);
                worst = worst.max(c.abs());
            }
        }
    }
    worst
}

/// `(L_X β)_i = X^l ∂_l β_i + β_l ∂_i X^l`.
pub fn lie_derivative_covector(x: &[Jet], beta: &[Jet]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|l| x[l].value() * beta[i].d(l) + beta[l].value() * x[l].d(i))
                .sum()
        })
        .collect()
}

/// `[X, Y]^i = X^l ∂_l Y^i − Y^l ∂_l X^i`.
pub fn lie_bracket(x: &[Jet], y: &[Jet]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|l| x[l].value() * y[i].d(l) - y[l].value() * x[i].d(l))
                .sum()
        })
        .collect()
}

/// `[α, β]_π = L_{π♯α}β − L_{π♯β}α − d(π(α, β))`.
pub fn koszul_bracket(local: &Local, alpha: &[Jet], beta: &[Jet]) -> Vec<f64> {
    let xa = local.sharp_jet(alpha);
    let xb = local.sharp_jet(beta);
    let la = lie_derivative_covector(&xa, beta);
    let lb = lie_derivative_covector(&xb, alpha);
    let pab = dot(&xa, beta);
    (0..local.dim())
        .map(|i| la[i] - lb[i] - pab.d(i))
        .collect()
}

/// `(L_X π)^{ij} = X^l ∂_l π^{ij} − π^{lj} ∂_l X^i − π^{il} ∂_l X^j`.
pub fn lie_derivative_pi(local: &Local, x: &[Jet]) -> Mat<f64> {
    let n = local.dim();
    let pi = &local.pi;
    Mat::from_fn(n, n, |i, j| {
        (0..n)
            .map(|l| {
                x[l].value() * pi[(i, j)].d(l)
                    - pi[(l, j)].value() * x[i].d(l)
                    - pi[(i, l)].value() * x[j].d(l)
            })
            .sum()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    #[test]
    fn so3_anchor_at_pole() {
        let s = gallery::structure("so3_euclid").unwrap();
        let local = Local::new(&s, &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(local.sharp(&[1.0, 0.0, 0.0]), vec![0.0, 1.0, 0.0]);
        assert_eq!(local.sharp(&[0.0, 0.0, 1.0]), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn nonpoisson_jacobiator_is_one() {
        let s = gallery::structure("nonpoisson_demo").unwrap();
        for p in s.sample_points(10, 3) {
            let local = Local::new(&s, &p).unwrap();
            assert!((jacobiator(&local) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn euler_field_scales_linear_bivector() {
        let s = gallery::structure("so3_euclid").unwrap();
        let p = [0.3, -1.1, 0.8];
        let local = Local::new(&s, &p).unwrap();
        let euler: Vec<Jet> = Jet::point(&p);
        let l = lie_derivative_pi(&local, &euler);
        let pi = local.pi_values();
        assert!(l.add(pi).max_abs() < 1e-15);
    }

    #[test]
    fn koszul_of_coordinates_is_differential_of_bracket() {
        let s = gallery::structure("so3_euclid").unwrap();
        let p = [0.3, -1.1, 0.8];
        let local = Local::new(&s, &p).unwrap();
        let b = koszul_bracket(&local, &local.coordinate_form(0), &local.coordinate_form(1));
        assert_eq!(b, vec![0.0, 0.0, 1.0]);
    }
}
