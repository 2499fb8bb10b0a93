//! One-at-a-time effects around the baseline run.

use serde::Serialize;

use super::AnalysisError;
use crate::config::DoeType;
use crate::ingest::RunResults;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OatEffect {
    pub factor: String,
    pub target_metric: String,
    pub effect_low: f64,
    pub effect_high: f64,
    pub span: f64,
}

/// Effects per metric, each metric's block sorted by descending span.
pub fn oat_effects(rr: &RunResults) -> Result<Vec<OatEffect>, AnalysisError> {
    if rr.doe_type != DoeType::Oat {
        return Err(AnalysisError::NotAnOatDesign(format!("design type is {}", rr.doe_type)));
    }
    if rr.design_meta.get("baseline_row").and_then(|v| v.as_u64()) != Some(0) {
        return Err(AnalysisError::NotAnOatDesign("no baseline row recorded".into()));
    }
    let k = rr.factor_names.len();
    let rows = rr.averaged_by_sample();
    let expected = 2 * k + 1;
    if rows.len() != expected || rows.iter().enumerate().any(|(i, r)| r.sample_index != i) {
        return Err(AnalysisError::NotAnOatDesign(format!(
            "expected design rows 0..{expected}, got {} rows",
            rows.len()
        )));
    }
    let mut out = Vec::with_capacity(k * rr.metric_names.len());
    for (m, metric) in rr.metric_names.iter().enumerate() {
        let base = rows[0].metrics[m];
        let mut block: Vec<OatEffect> = rr
            .factor_names
            .iter()
            .enumerate()
            .map(|(i, factor)| {
                let low = rows[2 * i + 1].metrics[m];
                let high = rows[2 * i + 2].metrics[m];
                OatEffect {
                    factor: factor.clone(),
                    target_metric: metric.clone(),
                    effect_low: low - base,
                    effect_high: high - base,
                    span: (high - low).abs(),
                }
            })
            .collect();
        block.sort_by(|a, b| b.span.total_cmp(&a.span));
        out.extend(block);
    }
    Ok(out)
}
