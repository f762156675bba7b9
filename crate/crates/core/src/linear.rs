//! Linear algebra of compatible triples `(π, ⟨,⟩, J)` on a single vector
//! space.
//!
//! Covectors are column vectors of components. `Pi[(i,j)] = π^{ij}`,
//! `G[(i,j)] = g^{ij}` and `J[(i,k)] = J_i^k` with `(Jα)_i = J_i^k α_k`, so
//! compatibility `π(α, β) = ⟨α, Jβ⟩` reads `Π = G·J`.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::foliation::LeafFrame;
use crate::linalg::Mat;

#[derive(Clone, Debug)]
pub struct LinearTriple {
    pub pi: Mat<f64>,
    pub g: Mat<f64>,
    pub j: Option<Mat<f64>>,
    /// Ratio of extreme singular values of `G`.
    pub condition: f64,
}

fn scale_of(m: &Mat<f64>) -> f64 {
    m.max_abs().max(1.0)
}

impl LinearTriple {
    pub fn new(pi: Mat<f64>, g: Mat<f64>, j: Option<Mat<f64>>) -> Result<LinearTriple> {
        let n = pi.rows();
        for m in std::iter::once(&g).chain(j.as_ref()) {
            if m.rows() != n || m.cols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: m.rows(),
                });
            }
        }
        let skew = pi.add(&pi.transpose()).max_abs();
        if skew > 1e-12 * scale_of(&pi) {
            return Err(Error::Invalid(format!("Pi is not skew-symmetric (defect {skew:e})")));
        }
        let asym = g.sub(&g.transpose()).max_abs();
        if asym > 1e-12 * scale_of(&g) {
            return Err(Error::Invalid(format!("G is not symmetric (defect {asym:e})")));
        }
        let sv = g.singular_values();
        let smallest = sv.last().copied().unwrap_or(0.0);
        if smallest <= 1e-14 * sv.first().copied().unwrap_or(0.0) || smallest == 0.0 {
            return Err(Error::SingularG { point: Vec::new() });
        }
        Ok(LinearTriple {
            condition: sv[0] / smallest,
            pi,
            g,
            j,
        })
    }

    pub fn dim(&self) -> usize {
        self.pi.rows()
    }
}

/// `max_{ij} |π^{ij} − g^{ik} J_k^j|`.
pub fn compat_defect(t: &LinearTriple) -> Result<f64> {
    let j = t.j.as_ref().ok_or(Error::MissingJ)?;
    Ok(t.pi.sub(&t.g.matmul(j)).max_abs())
}

/// The endomorphism `A` of covectors with `π(α, β) = ⟨α, Aβ⟩`.
pub fn canonical_endomorphism(pi: &Mat<f64>, g: &Mat<f64>) -> Result<Mat<f64>> {
    let gcov = g.inverse().ok_or(Error::SingularG { point: Vec::new() })?;
    Ok(gcov.matmul(pi))
}

/// `T*V = Ker π♯ ⊕ (Ker π♯)⊥` with bases orthonormal for `G`.
#[derive(Clone, Debug)]
pub struct Splitting {
    pub kernel_basis: Vec<Vec<f64>>,
    pub kernel_signs: Vec<f64>,
    pub complement_basis: Vec<Vec<f64>>,
    pub complement_signs: Vec<f64>,
    pub rank: usize,
}

/// Complement covectors are `♭` of an orthonormal frame of `Im π♯`, kernel
/// covectors `♭` of its orthogonal complement; both inherit the frame's
/// deterministic pivoting.
pub fn kernel_splitting(pi: &Mat<f64>, g: &Mat<f64>, eps_rank: f64) -> Result<Splitting> {
    let gcov = g.inverse().ok_or(Error::SingularG { point: Vec::new() })?;
    let rank = pi.rank(eps_rank);
    let frame = LeafFrame::build(pi, &gcov, rank, None)?;
    Ok(Splitting {
        kernel_basis: frame.normal.iter().map(|v| gcov.mul_vec(v)).collect(),
        kernel_signs: frame.normal_signs,
        complement_basis: frame.tangent.iter().map(|v| gcov.mul_vec(v)).collect(),
        complement_signs: frame.tangent_signs,
        rank,
    })
}

/// Columns of the basis as a matrix.
fn basis_matrix(n: usize, basis: &[Vec<f64>]) -> Mat<f64> {
    Mat::from_columns(n, basis)
}

/// Polar construction: returns `(J, G_A)` with `J = 0 ⊕ J₁`, `A₁ = |A₁|J₁`
/// on the complement, and `G_A = G|_{Ker} ⊕ ⟨·, |A₁|·⟩|_{complement}`.
pub fn polar_f_structure(pi: &Mat<f64>, g: &Mat<f64>, eps_rank: f64) -> Result<(Mat<f64>, Mat<f64>)> {
    let n = pi.rows();
    let split = kernel_splitting(pi, g, eps_rank)?;
    if split.complement_signs.iter().any(|&s| s < 0.0) {
        return Err(Error::IndefiniteRestriction);
    }
    let r = split.rank;
    let c = basis_matrix(n, &split.complement_basis);
    let k = basis_matrix(n, &split.kernel_basis);
    // A₁ in the orthonormal complement basis: ⟨c_a, A c_b⟩ = c_aᵀ Π c_b.
    let a1 = c.transpose().matmul(pi).matmul(&c);
    let minus_sq = a1.matmul(&a1).scale(-1.0);
    let sym = Mat::from_fn(r, r, |i, j| 0.5 * (minus_sq[(i, j)] + minus_sq[(j, i)]));
    let eig = if r > 0 {
        SymmetricEigen::new(sym.to_nalgebra())
    } else {
        SymmetricEigen {
            eigenvectors: nalgebra::DMatrix::zeros(0, 0),
            eigenvalues: nalgebra::DVector::zeros(0),
        }
    };
    let mut abs_a = Mat::zeros(r, r);
    let mut abs_inv = Mat::zeros(r, r);
    for (idx, &lambda) in eig.eigenvalues.iter().enumerate() {
        let root = lambda.max(0.0).sqrt();
        if root == 0.0 {
            return Err(Error::DegeneratePi { point: Vec::new() });
        }
        let v = eig.eigenvectors.column(idx);
        for i in 0..r {
            for j in 0..r {
                abs_a[(i, j)] += root * v[i] * v[j];
                abs_inv[(i, j)] += v[i] * v[j] / root;
            }
        }
    }
    let j1 = abs_inv.matmul(&a1);
    let coeff = c.transpose().matmul(g);
    let j = c.matmul(&j1).matmul(&coeff);
    let ga_comp = coeff.transpose().matmul(&abs_a).matmul(&coeff);
    let signs = Mat::from_fn(split.kernel_basis.len(), split.kernel_basis.len(), |i, j| {
        if i == j {
            split.kernel_signs[i]
        } else {
            0.0
        }
    });
    let kcoeff = k.transpose().matmul(g);
    let ga_ker = kcoeff.transpose().matmul(&signs).matmul(&kcoeff);
    let ga = ga_comp.add(&ga_ker);
    Ok((j, Mat::from_fn(n, n, |i, j| 0.5 * (ga[(i, j)] + ga[(j, i)]))))
}

/// Cometric with `leaf_block` on the complement, `transverse_block` on the
/// kernel and vanishing cross terms, in ambient components.
///
/// Blocks are indexed by the splitting's bases: the result pairs
/// `complement_basis[a]` with `complement_basis[b]` to `leaf_block[(a,b)]`.
pub fn assemble_block_cometric(
    leaf_block: &Mat<f64>,
    transverse_block: &Mat<f64>,
    split: &Splitting,
) -> Result<Mat<f64>> {
    let r = split.complement_basis.len();
    let m = split.kernel_basis.len();
    for (block, size) in [(leaf_block, r), (transverse_block, m)] {
        if block.rows() != size || block.cols() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                got: block.rows(),
            });
        }
    }
    let n = r + m;
    let mut cols = split.complement_basis.clone();
    cols.extend(split.kernel_basis.iter().cloned());
    let b = basis_matrix(n, &cols);
    let mut block = Mat::zeros(n, n);
    for i in 0..r {
        for j in 0..r {
            block[(i, j)] = leaf_block[(i, j)];
        }
    }
    for i in 0..m {
        for j in 0..m {
            block[(r + i, r + j)] = transverse_block[(i, j)];
        }
    }
    let binv = b.inverse().ok_or(Error::SingularG { point: Vec::new() })?;
    Ok(binv.transpose().matmul(&block).matmul(&binv))
}

/// For invertible `Π`: the vector endomorphism `J_V` with
/// `ω(X, Y) = ⟨X, J_V Y⟩`, `ω = −Π⁻¹`.
pub fn symplectic_j(pi: &Mat<f64>, g: &Mat<f64>) -> Result<Mat<f64>> {
    let omega = pi
        .inverse()
        .ok_or(Error::DegeneratePi { point: Vec::new() })?
        .scale(-1.0);
    Ok(g.matmul(&omega))
}

/// Defect of `J_* ∘ ♭ ∘ J_V = −♭`, where `J_*` is the canonical compatible
/// map on covectors and `J_V` is [`symplectic_j`].
pub fn symplectic_bridge_defect(pi: &Mat<f64>, g: &Mat<f64>) -> Result<f64> {
    let jv = symplectic_j(pi, g)?;
    let jc = canonical_endomorphism(pi, g)?;
    let flat = g.inverse().ok_or(Error::SingularG { point: Vec::new() })?;
    Ok(jc.matmul(&flat).matmul(&jv).add(&flat).max_abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Mat<f64> {
        Mat::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn canonical_pair_is_compatible() {
        let p = m(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let t = LinearTriple::new(p.clone(), Mat::identity(2), Some(p)).unwrap();
        assert_eq!(compat_defect(&t).unwrap(), 0.0);
    }

    #[test]
    fn missing_j() {
        let t = LinearTriple::new(Mat::zeros(2, 2), Mat::identity(2), None).unwrap();
        assert!(matches!(compat_defect(&t), Err(Error::MissingJ)));
    }

    #[test]
    fn rejects_non_skew_and_singular() {
        let p = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(LinearTriple::new(p, Mat::identity(2), None).is_err());
        let g = m(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert!(matches!(
            LinearTriple::new(Mat::zeros(2, 2), g, None),
            Err(Error::SingularG { .. })
        ));
    }

    #[test]
    fn polar_of_scaled_plane() {
        let p = m(&[&[0.0, 2.0], &[-2.0, 0.0]]);
        let (j, ga) = polar_f_structure(&p, &Mat::identity(2), 1e-10).unwrap();
        assert!(j.sub(&m(&[&[0.0, 1.0], &[-1.0, 0.0]])).max_abs() < 1e-14);
        assert!(ga.sub(&Mat::identity(2).scale(2.0)).max_abs() < 1e-14);
    }

    #[test]
    fn polar_of_zero() {
        let g = m(&[&[2.0, 0.5], &[0.5, 1.0]]);
        let (j, ga) = polar_f_structure(&Mat::zeros(2, 2), &g, 1e-10).unwrap();
        assert_eq!(j.max_abs(), 0.0);
        assert!(ga.sub(&g).max_abs() < 1e-14);
    }

    #[test]
    fn so3_pole_splitting_and_block() {
        let p = m(&[&[0.0, 1.0, 0.0], &[-1.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
        let s = kernel_splitting(&p, &Mat::identity(3), 1e-10).unwrap();
        assert_eq!(s.rank, 2);
        assert!((s.kernel_basis[0][2].abs() - 1.0).abs() < 1e-15);
        let gm = assemble_block_cometric(&Mat::identity(2), &m(&[&[2.0]]), &s).unwrap();
        assert!(gm.sub(&m(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 2.0]])).max_abs() < 1e-14);
        let (j, ga) = polar_f_structure(&p, &Mat::identity(3), 1e-10).unwrap();
        assert!(j.sub(&p).max_abs() < 1e-14);
        assert!(ga.sub(&Mat::identity(3)).max_abs() < 1e-14);
    }

    #[test]
    fn indefinite_leaf_refused() {
        let p = m(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let g = m(&[&[1.0, 0.0], &[0.0, -1.0]]);
        assert!(matches!(
            polar_f_structure(&p, &g, 1e-10),
            Err(Error::IndefiniteRestriction)
        ));
    }

    #[test]
    fn block_dimension_checked() {
        let s = kernel_splitting(&Mat::zeros(2, 2), &Mat::identity(2), 1e-10).unwrap();
        assert!(matches!(
            assemble_block_cometric(&Mat::identity(1), &Mat::identity(2), &s),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
