//! Covariant and contravariant Levi-Civita connections and the derivative
//! tensors built from them.
//!
//! Three-index arrays are stored densely; the index meaning is documented on
//! each constructor.

use crate::error::{Error, Result};
use crate::expr::Jet;
use crate::fields::Local;
use crate::linalg::{Mat, Orthonormal};

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Tensor3 {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    t.data[(i * n + j) * n + k] = f(i, j, k);
                }
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.n + j) * self.n + k]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `Σ a_i b_j c_k T_{ijk}`.
    pub fn contract(&self, a: &[f64], b: &[f64], c: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let ab = a[i] * b[j];
                if ab == 0.0 {
                    continue;
                }
                for k in 0..n {
                    acc += ab * c[k] * self.get(i, j, k);
                }
            }
        }
        acc
    }

    /// `Σ a_i b_j T_{ij·}`.
    pub fn contract2(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|k| {
                let mut acc = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        acc += a[i] * b[j] * self.get(i, j, k);
                    }
                }
                acc
            })
            .collect()
    }
}

/// `Γ^k_{ij}` of the metric, stored as `get(k, i, j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CovariantSymbols(pub Tensor3);

/// `Γ^{ij}_k` with `∇^{dx^i} dx^j = Γ^{ij}_k dx^k`, stored as `get(i, j, k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContravariantSymbols(pub Tensor3);

pub fn covariant_christoffels(local: &Local) -> CovariantSymbols {
    let n = local.dim();
    let g = local.g_values();
    let dg = |a: usize, b: usize, k: usize| local.gcov[(a, b)].d(k);
    CovariantSymbols(Tensor3::from_fn(n, |k, i, j| {
        0.5 * (0..n)
            .map(|l| g[(k, l)] * (dg(j, l, i) + dg(i, l, j) - dg(i, j, l)))
            .sum::<f64>()
    }))
}

pub fn contravariant_christoffels(local: &Local) -> ContravariantSymbols {
    let n = local.dim();
    let pi = local.pi_values();
    let g = local.g_values();
    let gcov = local.gcov_values();
    let dpi = |a: usize, b: usize, l: usize| local.pi[(a, b)].d(l);
    let dg = |a: usize, b: usize, l: usize| local.g[(a, b)].d(l);
    // A^{ijk} = 2⟨∇^{dx^i} dx^j, dx^k⟩
    let a = Tensor3::from_fn(n, |i, j, k| {
        (0..n)
            .map(|l| {
                pi[(i, l)] * dg(j, k, l) + pi[(j, l)] * dg(i, k, l) - pi[(k, l)] * dg(i, j, l)
                    + g[(l, k)] * dpi(i, j, l)
                    - g[(l, j)] * dpi(i, k, l)
                    - g[(l, i)] * dpi(j, k, l)
            })
            .sum()
    });
    ContravariantSymbols(Tensor3::from_fn(n, |i, j, m| {
        0.5 * (0..n).map(|k| gcov[(m, k)] * a.get(i, j, k)).sum::<f64>()
    }))
}

impl ContravariantSymbols {
    /// `(∇^α β)_m = α_i (π^{il} ∂_l β_m + β_j Γ^{ij}_m)`.
    pub fn nabla(&self, local: &Local, alpha: &[f64], beta: &[Jet]) -> Vec<f64> {
        let n = local.dim();
        let x = local.sharp(alpha);
        let b: Vec<f64> = beta.iter().map(|v| v.value()).collect();
        let gamma = self.0.contract2(alpha, &b);
        (0..n)
            .map(|m| (0..n).map(|l| x[l] * beta[m].d(l)).sum::<f64>() + gamma[m])
            .collect()
    }
}

/// `(∇•π)^{i,jk} = π^{il}∂_lπ^{jk} − Γ^{ij}_m π^{mk} − Γ^{ik}_m π^{jm}`:
/// the value of `(∇•π)(dx^i, dx^j, dx^k)`.
pub fn nabla_pi(local: &Local, gamma: &ContravariantSymbols) -> Tensor3 {
    let n = local.dim();
    let pi = local.pi_values();
    let g = &gamma.0;
    Tensor3::from_fn(n, |i, j, k| {
        (0..n)
            .map(|l| {
                pi[(i, l)] * local.pi[(j, k)].d(l) - g.get(i, j, l) * pi[(l, k)]
                    - g.get(i, k, l) * pi[(j, l)]
            })
            .sum()
    })
}

/// `max |J³ + J|` for `J` acting on covectors.
pub fn f_structure_defect(j: &Mat<f64>) -> f64 {
    let j3 = j.matmul(j).matmul(j);
    j3.add(j).max_abs()
}

/// `(∇•J)(dx^i, dx^j)_k = π^{il}∂_l J_k^j + Γ^{im}_k J_m^j − Γ^{ij}_m J_k^m`.
pub fn nabla_j(local: &Local, gamma: &ContravariantSymbols) -> Result<Tensor3> {
    let j = local.j.as_ref().ok_or(Error::MissingJ)?;
    let n = local.dim();
    let pi = local.pi_values();
    let g = &gamma.0;
    Ok(Tensor3::from_fn(n, |i, jj, k| {
        (0..n)
            .map(|l| {
                pi[(i, l)] * j[(k, jj)].d(l) + g.get(i, l, k) * j[(l, jj)].value()
                    - g.get(i, jj, l) * j[(k, l)].value()
            })
            .sum()
    }))
}

/// `J` applied to a covector value.
pub fn apply_j(j: &Mat<f64>, alpha: &[f64]) -> Vec<f64> {
    j.mul_vec(alpha)
}

/// Contravariant Nijenhuis tensor on the coordinate coframe,
/// `get(a, b, k) = N_J(dx^a, dx^b)_k`, from Koszul brackets.
pub fn nijenhuis(local: &Local) -> Result<Tensor3> {
    let j = local.j.as_ref().ok_or(Error::MissingJ)?;
    let jv = j.values();
    let n = local.dim();
    let dx: Vec<Vec<Jet>> = (0..n).map(|i| local.coordinate_form(i)).collect();
    let jdx: Vec<Vec<Jet>> = (0..n).map(|i| j.column(i)).collect();
    let bracket = |a: &[Jet], b: &[Jet]| crate::fields::koszul_bracket(local, a, b);
    let mut out = Tensor3::zeros(n);
    for a in 0..n {
        for b in 0..n {
            let t1 = bracket(&jdx[a], &jdx[b]);
            let t2 = apply_j(&jv, &apply_j(&jv, &bracket(&dx[a], &dx[b])));
            let inner: Vec<f64> = bracket(&dx[a], &jdx[b])
                .iter()
                .zip(bracket(&jdx[a], &dx[b]))
                .map(|(x, y)| x + y)
                .collect();
            let t3 = apply_j(&jv, &inner);
            for k in 0..n {
                out.data[(a * n + b) * n + k] = t1[k] + t2[k] - t3[k];
            }
        }
    }
    Ok(out)
}

/// `N_J(α, β)` rebuilt from `∇•J`:
/// `∇•J(Jα, β) − ∇•J(Jβ, α) − J(∇•J(α, β) − ∇•J(β, α))`.
pub fn nijenhuis_from_nabla_j(nj: &Tensor3, j: &Mat<f64>, alpha: &[f64], beta: &[f64]) -> Vec<f64> {
    let ja = apply_j(j, alpha);
    let jb = apply_j(j, beta);
    let t1 = nj.contract2(&ja, beta);
    let t2 = nj.contract2(&jb, alpha);
    let inner: Vec<f64> = nj
        .contract2(alpha, beta)
        .iter()
        .zip(nj.contract2(beta, alpha))
        .map(|(x, y)| x - y)
        .collect();
    let t3 = apply_j(j, &inner);
    (0..alpha.len()).map(|k| t1[k] - t2[k] - t3[k]).collect()
}

/// `ω := −π⁻¹` as jets; fails where π is degenerate.
pub fn omega_jets(local: &Local) -> Result<Mat<Jet>> {
    if local.rank(1e-10) < local.dim() {
        return Err(Error::DegeneratePi {
            point: local.point.clone(),
        });
    }
    let inv = local.pi.inverse().ok_or(Error::DegeneratePi {
        point: local.point.clone(),
    })?;
    Ok(inv.scale(Jet::constant(-1.0)))
}

/// `(∇_k ω)_{ij}`, stored as `get(k, i, j)`.
pub fn nabla_omega(local: &Local, gamma: &CovariantSymbols) -> Result<Tensor3> {
    let omega = omega_jets(local)?;
    let n = local.dim();
    let g = &gamma.0;
    Ok(Tensor3::from_fn(n, |k, i, j| {
        omega[(i, j)].d(k)
            - (0..n)
                .map(|l| g.get(l, k, i) * omega[(l, j)].value() + g.get(l, k, j) * omega[(i, l)].value())
                .sum::<f64>()
    }))
}

/// Covariant derivative of the bivector, `(∇_k π)^{ij}` stored as `get(k, i, j)`.
pub fn covariant_nabla_pi(local: &Local, gamma: &CovariantSymbols) -> Tensor3 {
    let n = local.dim();
    let pi = local.pi_values();
    let g = &gamma.0;
    Tensor3::from_fn(n, |k, i, j| {
        local.pi[(i, j)].d(k)
            + (0..n)
                .map(|l| g.get(i, k, l) * pi[(l, j)] + g.get(j, k, l) * pi[(i, l)])
                .sum::<f64>()
    })
}

/// Divergence of π computed two ways.
#[derive(Clone, Debug, PartialEq)]
pub struct DivPi {
    /// `(1/√|g|) ∂_j(√|g| π^{ij})`, so that `(div π)(f) = div X_f`.
    pub coordinate: Vec<f64>,
    /// Negated orthonormal-coframe trace `−Σ_a ε_a ⟨∇^{α_a} dx^j, α_a⟩`.
    pub frame: Vec<f64>,
}

impl DivPi {
    pub fn discrepancy(&self) -> f64 {
        self.coordinate
            .iter()
            .zip(&self.frame)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

pub fn div_pi(local: &Local, gamma: &ContravariantSymbols) -> Result<DivPi> {
    let n = local.dim();
    let pi = local.pi_values();
    let g = local.g_values();
    // ∂_j ln √|det g_cov| = ½ tr(g ∂_j g_cov)
    let dlog: Vec<f64> = (0..n)
        .map(|j| {
            let mut acc = 0.0;
            for a in 0..n {
                for b in 0..n {
                    acc += g[(a, b)] * local.gcov[(b, a)].d(j);
                }
            }
            0.5 * acc
        })
        .collect();
    let coordinate: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| local.pi[(i, j)].d(j) + pi[(i, j)] * dlog[j])
                .sum()
        })
        .collect();

    let unit: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|k| if k == i { 1.0 } else { 0.0 }).collect())
        .collect();
    let coframe = Orthonormal::default()
        .extend(g, &unit, n, None, 1e-14)
        .ok_or(Error::SingularG {
            point: local.point.clone(),
        })?;
    let frame: Vec<f64> = (0..n)
        .map(|j| {
            let dxj = local.coordinate_form(j);
            -coframe
                .vectors
                .iter()
                .zip(&coframe.signs)
                .map(|(a, s)| s * local.pair(&gamma.nabla(local, a, &dxj), a))
                .sum::<f64>()
        })
        .collect();
    Ok(DivPi { coordinate, frame })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    #[test]
    fn flat_structures_have_vanishing_symbols() {
        let s = gallery::structure("euclid_rn_rs").unwrap();
        let local = Local::new(&s, &[0.3, 0.2, -0.1]).unwrap();
        assert_eq!(contravariant_christoffels(&local).0.max_abs(), 0.0);
        assert_eq!(covariant_christoffels(&local).0.max_abs(), 0.0);
    }

    #[test]
    fn so3_euclid_nabla_pi_closed_form() {
        // π^{jk} = ε_{jkm} x_m with δ gives Γ^{ij}_m = ½ε_{ijm} and
        // (∇•π)(dx^i, dx^j, dx^k) = ½(δ_{ik} x_j − δ_{ij} x_k).
        let s = gallery::structure("so3_euclid").unwrap();
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        for p in s.sample_points(50, 11) {
            let local = Local::new(&s, &p).unwrap();
            let gamma = contravariant_christoffels(&local);
            let np = nabla_pi(&local, &gamma);
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        let expect = 0.5 * (delta(i, k) * p[j] - delta(i, j) * p[k]);
                        assert!((np.get(i, j, k) - expect).abs() < 1e-13);
                    }
                }
            }
            let d = div_pi(&local, &gamma).unwrap();
            assert!(d.discrepancy() < 1e-13);
            assert!(d.coordinate.iter().all(|v| v.abs() < 1e-13));
        }
    }
}
