//! Extended FAST indices from search-curve periodograms.

use serde::Serialize;

use super::AnalysisError;
use crate::config::DoeType;
use crate::ingest::RunResults;
use crate::sampling::EfastCurve;
use crate::statlib::periodogram;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfastIndexResult {
    pub factor: String,
    pub target_metric: String,
    #[serde(rename = "S1")]
    pub s1: f64,
    #[serde(rename = "ST")]
    pub st: f64,
}

/// Indices per (factor, metric), factor-major; `harmonics` is the
/// interference order `M` used for both driver and complementary sums.
pub fn efast_indices(rr: &RunResults, harmonics: usize) -> Result<Vec<EfastIndexResult>, AnalysisError> {
    let fail = |why: String| AnalysisError::NotAnEfastDesign(why);
    if rr.doe_type != DoeType::Fast {
        return Err(fail(format!("design type is {}", rr.doe_type)));
    }
    let meta = &rr.design_meta;
    if meta.get("layout").and_then(|v| v.as_str()) != Some("efast") {
        return Err(fail("no efast layout recorded".into()));
    }
    let n = meta
        .get("n_per_curve")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| fail("n_per_curve missing".into()))? as usize;
    let omega_max = meta
        .get("omega_max")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| fail("omega_max missing".into()))? as usize;
    let curves: Vec<EfastCurve> = meta
        .get("curves")
        .cloned()
        .and_then(|v| serde_json::from_value(v).ok())
        .ok_or_else(|| fail("curves missing".into()))?;
    let k = rr.factor_names.len();
    if curves.len() != k || curves.iter().enumerate().any(|(i, c)| c.driver != i) {
        return Err(fail(format!("expected {k} curves in driver order")));
    }
    if harmonics == 0 || harmonics * omega_max > (n - 1) / 2 {
        return Err(AnalysisError::InvalidInput(format!(
            "{harmonics} harmonics of frequency {omega_max} exceed the resolvable band of {n} points"
        )));
    }
    let rows = rr.averaged_by_sample();
    if rows.len() != k * n || rows.iter().enumerate().any(|(i, r)| r.sample_index != i) {
        return Err(fail(format!("expected {} design rows, got {}", k * n, rows.len())));
    }
    let comp_cutoff = (omega_max / (2 * harmonics)) * harmonics;

    let mut out = Vec::with_capacity(k * rr.metric_names.len());
    for (i, factor) in rr.factor_names.iter().enumerate() {
        let curve = &rows[i * n..(i + 1) * n];
        for (m, metric) in rr.metric_names.iter().enumerate() {
            let signal: Vec<f64> = curve.iter().map(|r| r.metrics[m]).collect();
            let spread = signal.iter().fold(0.0f64, |acc, v| acc.max((v - signal[0]).abs()));
            let pg = periodogram(&signal);
            let total = pg.total_power();
            if spread == 0.0 || !(total > 0.0) {
                return Err(AnalysisError::ZeroVariance(metric.clone()));
            }
            let driver: f64 = (1..=harmonics).map(|p| pg.power(p * curves[i].frequencies[i])).sum();
            let complementary: f64 = (1..=comp_cutoff).map(|w| pg.power(w)).sum();
            out.push(EfastIndexResult {
                factor: factor.clone(),
                target_metric: metric.clone(),
                s1: driver / total,
                st: 1.0 - complementary / total,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::fixtures::{results_from_design, unit_factors};
    use crate::sampling::efast_design;

    fn run(n: usize, k: usize, model: impl Fn(&[f64]) -> Vec<f64>) -> RunResults {
        let (rows, meta) = efast_design(n, k, 4, None).unwrap();
        results_from_design(DoeType::Fast, unit_factors(k), &rows, meta, &["y"], model)
    }

    #[test]
    fn identity_in_driver() {
        let res = efast_indices(&run(513, 3, |x| vec![x[0]]), 4).unwrap();
        assert!(res[0].s1 >= 0.95, "{:?}", res[0]);
        assert!(res[1].s1 < 0.05 && res[2].s1 < 0.05);
    }

    #[test]
    fn additive_model() {
        let res = efast_indices(&run(1025, 3, |x| vec![x[0] + x[1] + x[2]]), 4).unwrap();
        for r in &res {
            assert!((r.s1 - 1.0 / 3.0).abs() < 0.05, "{r:?}");
            assert!(r.st >= r.s1 - 1e-9);
        }
    }

    #[test]
    fn constant_model_has_no_variance() {
        assert!(matches!(efast_indices(&run(65, 2, |_| vec![1.0]), 4), Err(AnalysisError::ZeroVariance(_))));
    }

    #[test]
    fn rejects_other_designs() {
        let mut rr = run(65, 2, |x| vec![x[0]]);
        rr.design_meta.remove("curves");
        assert!(matches!(efast_indices(&rr, 4), Err(AnalysisError::NotAnEfastDesign(_))));
        let mut rr = run(65, 2, |x| vec![x[0]]);
        rr.doe_type = DoeType::Lhs;
        assert!(matches!(efast_indices(&rr, 4), Err(AnalysisError::NotAnEfastDesign(_))));
    }
}
