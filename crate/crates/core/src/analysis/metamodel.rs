//! Gaussian-process (Kriging) meta-model with a squared-exponential kernel.
//!
//! Inputs and targets are standardized per column before fitting. The
//! length scale (shared across dimensions) and signal variance are picked
//! from a fixed grid by maximum log marginal likelihood; ties keep the
//! first grid point in enumeration order (length scale outer).

use serde::Serialize;

use super::AnalysisError;
use crate::config::FactorSpec;
use crate::sampling::unit_to_real;
use crate::statlib::{Cholesky, Matrix, StatError};

#[derive(Debug, Clone, PartialEq)]
pub struct GpConfig {
    pub length_scale_grid: Vec<f64>,
    pub signal_variance_grid: Vec<f64>,
    pub nugget: f64,
}

impl Default for GpConfig {
    fn default() -> Self {
        Self {
            length_scale_grid: vec![0.1, 0.2, 0.5, 1.0, 2.0, 5.0],
            signal_variance_grid: vec![0.5, 1.0, 2.0],
            nugget: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GpModel {
    /// Standardized training inputs, `n x k`.
    pub train_inputs: Vec<Vec<f64>>,
    /// Standardized training targets.
    pub train_targets: Vec<f64>,
    pub length_scales: Vec<f64>,
    pub signal_variance: f64,
    pub nugget: f64,
    pub log_marginal_likelihood: f64,
    pub input_mean: Vec<f64>,
    pub input_scale: Vec<f64>,
    pub target_mean: f64,
    pub target_scale: f64,
    chol: Cholesky,
    weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GpPrediction {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

fn standardize_columns(cols: impl Iterator<Item = Vec<f64>>) -> (Vec<f64>, Vec<f64>) {
    cols.map(|c| {
        let m = c.iter().sum::<f64>() / c.len() as f64;
        let sd = (c.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / c.len() as f64).sqrt();
        (m, if sd > 0.0 { sd } else { 1.0 })
    })
    .unzip()
}

/// Training sets above this size are thinned before fitting.
pub const MAX_TRAINING_POINTS: usize = 512;

/// Indices of at most `max` rows spread evenly over `0..n`, first row included.
pub fn training_subset(n: usize, max: usize) -> Vec<usize> {
    if n <= max {
        return (0..n).collect();
    }
    (0..max).map(|i| i * n / max).collect()
}

fn sq_exp(a: &[f64], b: &[f64], ls: &[f64], s2: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).zip(ls).map(|((x, y), l)| (x - y) * (x - y) / (l * l)).sum();
    s2 * (-0.5 * d2).exp()
}

pub fn fit_metamodel(inputs: &[Vec<f64>], targets: &[f64], config: &GpConfig) -> Result<GpModel, AnalysisError> {
    let n = inputs.len();
    if n < 2 {
        return Err(AnalysisError::InvalidInput(format!("meta-model needs at least 2 samples, got {n}")));
    }
    if targets.len() != n {
        return Err(StatError::DimensionMismatch(format!("{n} inputs but {} targets", targets.len())).into());
    }
    let k = inputs[0].len();
    if k == 0 || inputs.iter().any(|r| r.len() != k) {
        return Err(StatError::DimensionMismatch("ragged or empty input rows".into()).into());
    }
    if inputs.iter().flatten().chain(targets).any(|x| !x.is_finite()) {
        return Err(AnalysisError::InvalidInput("non-finite training data".into()));
    }
    let (input_mean, input_scale) = standardize_columns((0..k).map(|d| inputs.iter().map(|r| r[d]).collect()));
    let (tm, ts) = standardize_columns(std::iter::once(targets.to_vec()));
    let (target_mean, target_scale) = (tm[0], ts[0]);
    let x: Vec<Vec<f64>> = inputs
        .iter()
        .map(|r| r.iter().zip(&input_mean).zip(&input_scale).map(|((v, m), s)| (v - m) / s).collect())
        .collect();
    let y: Vec<f64> = targets.iter().map(|t| (t - target_mean) / target_scale).collect();

    let mut best: Option<(f64, f64, f64, Cholesky, Vec<f64>)> = None;
    for &ell in &config.length_scale_grid {
        let ls = vec![ell; k];
        for &s2 in &config.signal_variance_grid {
            let mut kmat = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let v = sq_exp(&x[i], &x[j], &ls, s2);
                    kmat[(i, j)] = v;
                    kmat[(j, i)] = v;
                }
                kmat[(i, i)] += config.nugget;
            }
            let Ok(ch) = Cholesky::new(&kmat) else { continue };
            let w = ch.solve_vec(&y);
            let fit: f64 = y.iter().zip(&w).map(|(a, b)| a * b).sum();
            let lml = -0.5 * fit - 0.5 * ch.ln_det() - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln();
            if !lml.is_finite() {
                continue;
            }
            if best.as_ref().is_none_or(|b| lml > b.0) {
                best = Some((lml, ell, s2, ch, w));
            }
        }
    }
    let (lml, ell, s2, chol, weights) = best.ok_or(StatError::NotPositiveDefinite)?;
    Ok(GpModel {
        train_inputs: x,
        train_targets: y,
        length_scales: vec![ell; k],
        signal_variance: s2,
        nugget: config.nugget,
        log_marginal_likelihood: lml,
        input_mean,
        input_scale,
        target_mean,
        target_scale,
        chol,
        weights,
    })
}

/// Posterior mean and standard deviation in original units.
pub fn predict_metamodel(m: &GpModel, query: &[Vec<f64>]) -> Result<GpPrediction, AnalysisError> {
    let k = m.input_mean.len();
    let mut mean = Vec::with_capacity(query.len());
    let mut std = Vec::with_capacity(query.len());
    for q in query {
        if q.len() != k {
            return Err(StatError::DimensionMismatch(format!("query has {} columns, model {k}", q.len())).into());
        }
        let z: Vec<f64> = q.iter().zip(&m.input_mean).zip(&m.input_scale).map(|((v, mu), s)| (v - mu) / s).collect();
        let mut kstar: Vec<f64> =
            m.train_inputs.iter().map(|t| sq_exp(&z, t, &m.length_scales, m.signal_variance)).collect();
        let mu: f64 = kstar.iter().zip(&m.weights).map(|(a, b)| a * b).sum();
        m.chol.forward(&mut kstar);
        let explained: f64 = kstar.iter().map(|v| v * v).sum();
        let var = (m.signal_variance - explained).max(0.0);
        mean.push(m.target_mean + m.target_scale * mu);
        std.push(m.target_scale * var.sqrt());
    }
    Ok(GpPrediction { mean, std })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfacePoint {
    pub x_i: f64,
    pub x_j: f64,
    pub mean: f64,
    pub std: f64,
}

fn interval_axis(f: &FactorSpec, resolution: usize) -> Result<Vec<f64>, AnalysisError> {
    match f.domain {
        crate::config::FactorDomain::Interval { lo, hi } => {
            let steps = (resolution - 1) as f64;
            Ok((0..resolution).map(|a| if a + 1 == resolution { hi } else { lo + (hi - lo) * a as f64 / steps }).collect())
        }
        _ => Err(AnalysisError::NonIntervalFactor(f.name())),
    }
}

fn pinned(factors: &[FactorSpec], fixed: Option<&[f64]>) -> Result<Vec<f64>, AnalysisError> {
    match fixed {
        Some(v) if v.len() != factors.len() => Err(AnalysisError::InvalidInput(format!(
            "{} fixed values for {} factors",
            v.len(),
            factors.len()
        ))),
        Some(v) => Ok(v.to_vec()),
        None => Ok(factors.iter().map(|f| unit_to_real(0.5, &f.domain)).collect()),
    }
}

/// `resolution^2` points over factors `fi` (outer) and `fj` (inner); the
/// other factors sit at `fixed` or at their domain midpoints.
pub fn surface_grid(
    m: &GpModel,
    factors: &[FactorSpec],
    fi: usize,
    fj: usize,
    resolution: usize,
    fixed: Option<&[f64]>,
) -> Result<Vec<SurfacePoint>, AnalysisError> {
    if resolution < 2 {
        return Err(AnalysisError::InvalidInput("grid resolution must be at least 2".into()));
    }
    if fi == fj || fi >= factors.len() || fj >= factors.len() {
        return Err(AnalysisError::InvalidInput(format!("invalid factor pair ({fi}, {fj})")));
    }
    let (ax_i, ax_j) = (interval_axis(&factors[fi], resolution)?, interval_axis(&factors[fj], resolution)?);
    let base = pinned(factors, fixed)?;
    let mut query = Vec::with_capacity(resolution * resolution);
    for &a in &ax_i {
        for &b in &ax_j {
            let mut q = base.clone();
            q[fi] = a;
            q[fj] = b;
            query.push(q);
        }
    }
    let pred = predict_metamodel(m, &query)?;
    Ok(query
        .iter()
        .zip(pred.mean.iter().zip(&pred.std))
        .map(|(q, (&mean, &std))| SurfacePoint { x_i: q[fi], x_j: q[fj], mean, std })
        .collect())
}

/// One-factor response curve; `x_j` is NaN in every point.
pub fn response_curve(
    m: &GpModel,
    factors: &[FactorSpec],
    fi: usize,
    resolution: usize,
    fixed: Option<&[f64]>,
) -> Result<Vec<SurfacePoint>, AnalysisError> {
    if resolution < 2 {
        return Err(AnalysisError::InvalidInput("grid resolution must be at least 2".into()));
    }
    let f = factors
        .get(fi)
        .ok_or_else(|| AnalysisError::InvalidInput(format!("invalid factor index {fi}")))?;
    let axis = interval_axis(f, resolution)?;
    let base = pinned(factors, fixed)?;
    let query: Vec<Vec<f64>> = axis
        .iter()
        .map(|&a| {
            let mut q = base.clone();
            q[fi] = a;
            q
        })
        .collect();
    let pred = predict_metamodel(m, &query)?;
    Ok(axis
        .iter()
        .zip(pred.mean.iter().zip(&pred.std))
        .map(|(&x, (&mean, &std))| SurfacePoint { x_i: x, x_j: f64::NAN, mean, std })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::fixtures::unit_factors;
    use crate::config::FactorDomain;
    use crate::sampling::lhs_points;

    fn fit(x: &[Vec<f64>], y: &[f64]) -> GpModel {
        fit_metamodel(x, y, &GpConfig::default()).unwrap()
    }

    #[test]
    fn training_subset_is_even_and_bounded() {
        assert_eq!(training_subset(5, 10), vec![0, 1, 2, 3, 4]);
        assert_eq!(training_subset(10, 4), vec![0, 2, 5, 7]);
        let idx = training_subset(5120, MAX_TRAINING_POINTS);
        assert_eq!(idx.len(), MAX_TRAINING_POINTS);
        assert!(idx.windows(2).all(|w| w[0] < w[1]) && *idx.last().unwrap() < 5120);
    }

    #[test]
    fn needs_two_points() {
        assert!(matches!(
            fit_metamodel(&[vec![0.0]], &[1.0], &GpConfig::default()),
            Err(AnalysisError::InvalidInput(_))
        ));
    }

    #[test]
    fn two_points_are_interpolated() {
        let x = vec![vec![0.2, 1.0], vec![0.9, -3.0]];
        let m = fit(&x, &[5.0, -1.0]);
        let p = predict_metamodel(&m, &x).unwrap();
        assert!((p.mean[0] - 5.0).abs() < 1e-6 && (p.mean[1] + 1.0).abs() < 1e-6, "{p:?}");
    }

    #[test]
    fn constant_targets() {
        let x = lhs_points(2, 10, 3);
        let m = fit(&x, &[2.5; 10]);
        let p = predict_metamodel(&m, &[vec![0.3, 0.3], vec![9.0, -4.0]]).unwrap();
        assert!(p.mean.iter().all(|v| (v - 2.5).abs() < 1e-6));
    }

    #[test]
    fn prior_far_from_data() {
        let x = lhs_points(1, 8, 1);
        let y: Vec<f64> = x.iter().map(|r| (6.0 * r[0]).sin()).collect();
        let m = fit(&x, &y);
        let far = m.input_mean[0] + 50.0 * m.length_scales[0] * m.input_scale[0];
        let p = predict_metamodel(&m, &[vec![far]]).unwrap();
        assert!((p.mean[0] - m.target_mean).abs() < 1e-9);
        assert!((p.std[0] - m.target_scale * m.signal_variance.sqrt()).abs() < 1e-9);
        let at = predict_metamodel(&m, &x[..1]).unwrap();
        assert!(at.std[0] < 1e-3 * m.target_scale);
    }

    #[test]
    fn two_point_closed_form() {
        // Oracle: posterior mean k*^T K^-1 y with a hand-inverted 2x2 K.
        let x = vec![vec![0.0], vec![1.0]];
        let y = [1.0, 3.0];
        let m = fit(&x, &y);
        let (s2, l, nu) = (m.signal_variance, m.length_scales[0], m.nugget);
        let z = |v: f64| (v - m.input_mean[0]) / m.input_scale[0];
        let yz: Vec<f64> = y.iter().map(|t| (t - m.target_mean) / m.target_scale).collect();
        let kern = |a: f64, b: f64| s2 * (-(a - b).powi(2) / (2.0 * l * l)).exp();
        let (a, b, c) = (s2 + nu, kern(z(0.0), z(1.0)), s2 + nu);
        let det = a * c - b * b;
        let w = [(c * yz[0] - b * yz[1]) / det, (a * yz[1] - b * yz[0]) / det];
        for q in [0.25, 0.5, 0.8] {
            let mu = kern(z(q), z(0.0)) * w[0] + kern(z(q), z(1.0)) * w[1];
            let expect = m.target_mean + m.target_scale * mu;
            let got = predict_metamodel(&m, &[vec![q]]).unwrap().mean[0];
            assert!((got - expect).abs() < 1e-9, "{got} vs {expect}");
        }
        let flat = fit(&x, &[4.0, 4.0]);
        let mid = predict_metamodel(&flat, &[vec![0.5]]).unwrap().mean[0];
        assert!((mid - 4.0).abs() < 1e-3);
    }

    #[test]
    fn surface_corners_and_monotonicity() {
        let factors = unit_factors(2);
        let x = lhs_points(2, 30, 7);
        let y: Vec<f64> = x.iter().map(|r| r[0]).collect();
        let m = fit(&x, &y);
        let corners = surface_grid(&m, &factors, 0, 1, 2, None).unwrap();
        let xy: Vec<(f64, f64)> = corners.iter().map(|p| (p.x_i, p.x_j)).collect();
        assert_eq!(xy, vec![(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]);

        let res = 11;
        let g = surface_grid(&m, &factors, 0, 1, res, None).unwrap();
        for j in 0..res {
            for i in 1..res {
                let (prev, cur) = (g[(i - 1) * res + j].mean, g[i * res + j].mean);
                assert!(cur >= prev - 1e-3, "column {j}: {prev} -> {cur}");
            }
        }
    }

    #[test]
    fn surface_requires_intervals() {
        let mut factors = unit_factors(2);
        factors[1].domain = FactorDomain::Discrete { values: vec![1.into(), 2.into()] };
        let x = lhs_points(2, 6, 1);
        let m = fit(&x, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert!(matches!(surface_grid(&m, &factors, 0, 1, 3, None), Err(AnalysisError::NonIntervalFactor(_))));
        assert!(response_curve(&m, &factors, 0, 3, None).is_ok());
        assert!(matches!(predict_metamodel(&m, &[vec![1.0]]), Err(AnalysisError::Numeric(_))));
    }
}
