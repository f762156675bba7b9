#![allow(dead_code)]

use poisson_lab::gallery::{self, EntryKind};
use poisson_lab::Structure;

pub const FD_STEP: f64 = 1e-5;

/// Central differences of `f` at `p` in every coordinate direction.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, p: &[f64], h: f64) -> Vec<f64> {
    (0..p.len())
        .map(|k| {
            let mut plus = p.to_vec();
            let mut minus = p.to_vec();
            plus[k] += h;
            minus[k] -= h;
            (f(&plus) - f(&minus)) / (2.0 * h)
        })
        .collect()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Gallery structures paired with whether they are Poisson.
pub fn gallery_structures() -> Vec<(Structure, bool)> {
    poisson_lab::gallery::all_structures()
        .unwrap()
        .into_iter()
        .map(|s| {
            let poisson = s.name != "nonpoisson_demo";
            (s, poisson)
        })
        .collect()
}

pub fn structure_ids() -> Vec<String> {
    gallery::list()
        .into_iter()
        .filter(|id| matches!(gallery::get(id).unwrap().kind, EntryKind::Structure(_)))
        .collect()
}

/// Inverse of a small dense matrix stored row-major.
pub fn invert(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    let a = nalgebra::DMatrix::from_fn(n, n, |i, j| m[i][j]);
    let inv = a.try_inverse().expect("invertible");
    (0..n).map(|i| (0..n).map(|j| inv[(i, j)]).collect()).collect()
}
