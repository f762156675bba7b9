//! Small dense matrices over a generic [`Scalar`].
//!
//! Everything here is written once and runs over `f64` or [`Jet`]; running a
//! construction over jets differentiates it. Decompositions that are only
//! needed on values (SVD, symmetric eigensolves) go through nalgebra.

use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;

use crate::expr::{Jet, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, cols: &[Vec<S>]) -> Self {
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> Vec<S> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(S) -> T) -> Mat<T> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn values(&self) -> Mat<f64> {
        self.map(|x| x.value())
    }

    pub fn matmul(&self, rhs: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        Self::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = S::zero();
            for k in 0..self.cols {
                acc += self[(i, k)] * rhs[(k, j)];
            }
            acc
        })
    }

    /// `M v`, contracting the second index.
    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for k in 0..self.cols {
                    acc += self[(i, k)] * v[k];
                }
                acc
            })
            .collect()
    }

    /// `vᵀ M`, contracting the first index.
    pub fn vec_mul(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.rows, v.len());
        (0..self.cols)
            .map(|j| {
                let mut acc = S::zero();
                for k in 0..self.rows {
                    acc += v[k] * self[(k, j)];
                }
                acc
            })
            .collect()
    }

    /// `uᵀ M v`.
    pub fn form(&self, u: &[S], v: &[S]) -> S {
        dot(u, &self.mul_vec(v))
    }

    pub fn add(&self, rhs: &Mat<S>) -> Mat<S> {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + rhs[(i, j)])
    }

    pub fn sub(&self, rhs: &Mat<S>) -> Mat<S> {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - rhs[(i, j)])
    }

    pub fn scale(&self, c: S) -> Mat<S> {
        self.map(|x| x * c)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.value().abs()))
    }

    /// Gauss–Jordan inverse with partial pivoting on values. `None` when a
    /// pivot falls below `1e-13` relative to the largest entry.
    pub fn inverse(&self) -> Option<Mat<S>> {
        assert!(self.is_square());
        let n = self.rows;
        let scale = self.max_abs();
        if scale == 0.0 {
            return if n == 0 { Some(self.clone()) } else { None };
        }
        let mut a = self.clone();
        let mut inv = Mat::identity(n);
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if a[(r, col)].value().abs() > a[(piv, col)].value().abs() {
                    piv = r;
                }
            }
            if a[(piv, col)].value().abs() <= 1e-13 * scale {
                return None;
            }
            a.swap_rows(col, piv);
            inv.swap_rows(col, piv);
            let d = a[(col, col)];
            for j in 0..n {
                a[(col, j)] = a[(col, j)] / d;
                inv[(col, j)] = inv[(col, j)] / d;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f.value() == 0.0 && !S::DIFFERENTIATED {
                    continue;
                }
                for j in 0..n {
                    let t = a[(col, j)];
                    a[(r, j)] -= f * t;
                    let t = inv[(col, j)];
                    inv[(r, j)] -= f * t;
                }
            }
        }
        Some(inv)
    }

    /// Determinant by elimination with partial pivoting on values.
    pub fn det(&self) -> S {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = S::one();
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if a[(r, col)].value().abs() > a[(piv, col)].value().abs() {
                    piv = r;
                }
            }
            if a[(piv, col)].value() == 0.0 {
                return S::zero();
            }
            if piv != col {
                a.swap_rows(col, piv);
                det = -det;
            }
            let d = a[(col, col)];
            det *= d;
            for r in col + 1..n {
                let f = a[(r, col)] / d;
                for j in col..n {
                    let t = a[(col, j)];
                    a[(r, j)] -= f * t;
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<S> Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

impl Mat<f64> {
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        if self.rows == 0 || self.cols == 0 {
            return Vec::new();
        }
        let mut s: Vec<f64> = self.to_nalgebra().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Number of singular values above `eps_rank` times the largest one.
    pub fn rank(&self, eps_rank: f64) -> usize {
        let s = self.singular_values();
        match s.first() {
            Some(&top) if top > 0.0 => s.iter().filter(|&&x| x > eps_rank * top).count(),
            _ => 0,
        }
    }

    pub fn lift(&self) -> Mat<Jet> {
        self.map(Jet::constant)
    }
}

pub fn dot<S: Scalar>(u: &[S], v: &[S]) -> S {
    let mut acc = S::zero();
    for (a, b) in u.iter().zip(v) {
        acc += *a * *b;
    }
    acc
}

pub fn values(v: &[Jet]) -> Vec<f64> {
    v.iter().map(|x| x.value()).collect()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Orthonormal family with respect to a possibly indefinite symmetric form.
#[derive(Clone, Debug)]
pub struct Orthonormal<S> {
    pub vectors: Vec<Vec<S>>,
    /// `⟨e_a, e_a⟩ = ±1`.
    pub signs: Vec<f64>,
    /// Candidate index chosen at each step (indices refer to the candidate
    /// list of the `extend` call that added the vector).
    pub pivots: Vec<usize>,
}

impl<S> Default for Orthonormal<S> {
    fn default() -> Self {
        Orthonormal {
            vectors: Vec::new(),
            signs: Vec::new(),
            pivots: Vec::new(),
        }
    }
}

impl<S: Scalar> Orthonormal<S> {
    /// `v − Σ ε_a ⟨v, e_a⟩ e_a`.
    pub fn residual(&self, metric: &Mat<S>, v: &[S]) -> Vec<S> {
        let mut r = v.to_vec();
        for (e, &sign) in self.vectors.iter().zip(&self.signs) {
            let c = metric.form(v, e).scale(sign);
            for (ri, ei) in r.iter_mut().zip(e) {
                *ri -= c * *ei;
            }
        }
        r
    }

    /// Append `count` vectors by Gram–Schmidt over `candidates`, each step
    /// taking the candidate whose residual has the largest `|⟨r, r⟩|`
    /// (decided on values, so jets follow the same pivots as plain numbers).
    /// `forced` fixes the pivot order instead. Returns `None` when every
    /// remaining residual is below `rel_tol` relative to the candidates.
    pub fn extend(
        mut self,
        metric: &Mat<S>,
        candidates: &[Vec<S>],
        count: usize,
        forced: Option<&[usize]>,
        rel_tol: f64,
    ) -> Option<Self> {
        let scale = candidates
            .iter()
            .map(|v| metric.form(v, v).value().abs())
            .fold(0.0f64, f64::max)
            .max(f64::MIN_POSITIVE);
        let first = self.pivots.len();
        for step in 0..count {
            let choice = match forced {
                Some(order) => {
                    let i = *order.get(step)?;
                    let r = self.residual(metric, &candidates[i]);
                    let nn = metric.form(&r, &r);
                    (i, r, nn)
                }
                None => {
                    let mut best: Option<(usize, Vec<S>, S)> = None;
                    for (i, v) in candidates.iter().enumerate() {
                        if self.pivots[first..].contains(&i) {
                            continue;
                        }
                        let r = self.residual(metric, v);
                        let nn = metric.form(&r, &r);
                        if best
                            .as_ref()
                            .is_none_or(|b| nn.value().abs() > b.2.value().abs())
                        {
                            best = Some((i, r, nn));
                        }
                    }
                    best?
                }
            };
            let (i, r, nn) = choice;
            if nn.value().abs() <= rel_tol * scale {
                return None;
            }
            let sign = nn.value().signum();
            let norm = nn.scale(sign).sqrt();
            self.vectors.push(r.iter().map(|&x| x / norm).collect());
            self.signs.push(sign);
            self.pivots.push(i);
        }
        Some(self)
    }
}
