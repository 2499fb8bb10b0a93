//! Numerical kernel shared by the samplers and analyzers.

mod linalg;
mod rng;
mod spectral;
mod special;

pub use linalg::{cholesky_solve, Cholesky, Matrix};
pub use rng::{stream_id, Rng};
pub use spectral::{periodogram, search_grid, Periodogram};
pub use special::{f_cdf, f_sf, f_sf_frac, ln_gamma, normal_ppf, reg_incomplete_beta};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("matrix is not positive definite (after jitter retry)")]
    NotPositiveDefinite,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Arithmetic mean; 0 for an empty slice.
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Population variance (divides by n).
pub fn variance(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

/// Linear-interpolated quantile of sorted data, `q` in `[0, 1]`.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let pos = q.clamp(0.0, 1.0) * (n - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            let frac = pos - lo as f64;
            sorted[lo] + frac * (sorted[hi] - sorted[lo])
        }
    }
}
