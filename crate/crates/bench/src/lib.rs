//! Fixtures shared by the benchmarks.

use poisson_lab::{gallery, Structure};

/// Gallery structures of increasing dimension, each with a point inside
/// its domain.
pub fn fixtures() -> Vec<(Structure, Vec<f64>)> {
    ["euclid_rn_rs:3,1,2", "so3_reg_conformal", "sl2_reg_conformal", "kahler_r4", "so3_times_plane"]
        .into_iter()
        .map(|id| {
            let s = gallery::structure(id).expect("gallery entry");
            let p = s.sample_points(1, 1).pop().unwrap_or_else(|| s.base.clone());
            (s, p)
        })
        .collect()
}
