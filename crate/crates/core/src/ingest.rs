//! Results ingestion: read experiment outputs, join them onto recipes and
//! drop reset runs.
//!
//! JSON results are an array of
//! `{"run_id": ..., "factors": {"entity.param": v}, "metrics": {"name": v}}`
//! objects; rows may carry `"is_reset": true`, in which case metrics may be
//! empty. CSV results have a `run_id` column, factor columns prefixed `f.`,
//! metric columns prefixed `m.` and an optional `is_reset` column.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::config::{DoeType, FactorDomain, FactorSpec};
use crate::recipes::{factor_value, RecipeError, RecipeSet};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed results (row {row}): {reason}")]
    MalformedResults { row: usize, reason: String },
    #[error("target metric `{0}` is absent from every result row")]
    UnknownMetric(String),
    #[error("{} non-reset run(s) have no results: {}", .0.len(), preview(.0))]
    MissingRuns(Vec<String>),
    #[error(transparent)]
    Recipe(#[from] RecipeError),
}

fn preview(ids: &[String]) -> String {
    let head: Vec<&str> = ids.iter().take(10).map(String::as_str).collect();
    if ids.len() > 10 {
        format!("{}, ...", head.join(", "))
    } else {
        head.join(", ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResultsFormat {
    Json,
    Csv,
}

impl ResultsFormat {
    /// `.csv` means CSV, anything else JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => ResultsFormat::Csv,
            _ => ResultsFormat::Json,
        }
    }
}

/// One results-file row as written by the experiment process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRow {
    pub run_id: String,
    #[serde(default)]
    pub factors: Map<String, Value>,
    #[serde(default)]
    pub metrics: IndexMap<String, f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub is_reset: bool,
}

pub fn read_results(
    path: &Path,
    format: ResultsFormat,
    target_metrics: &[String],
) -> Result<Vec<RawRow>, IngestError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| IngestError::Io { path: path.display().to_string(), source })?;
    match format {
        ResultsFormat::Json => parse_results_json(&text, target_metrics),
        ResultsFormat::Csv => parse_results_csv(&text, target_metrics),
    }
}

pub fn parse_results_json(text: &str, target_metrics: &[String]) -> Result<Vec<RawRow>, IngestError> {
    let values: Vec<Value> = serde_json::from_str(text).map_err(|e| IngestError::MalformedResults {
        row: 0,
        reason: format!("expected a JSON array of run objects: {e}"),
    })?;
    let rows = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            serde_json::from_value::<RawRow>(v)
                .map_err(|e| IngestError::MalformedResults { row: i, reason: e.to_string() })
        })
        .collect::<Result<Vec<_>, _>>()?;
    check_completeness(&rows, target_metrics)?;
    Ok(rows)
}

pub fn parse_results_csv(text: &str, target_metrics: &[String]) -> Result<Vec<RawRow>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| IngestError::MalformedResults { row: 0, reason: e.to_string() })?
        .clone();
    let run_col = headers
        .iter()
        .position(|h| h == "run_id")
        .ok_or(IngestError::MalformedResults { row: 0, reason: "missing run_id column".into() })?;
    let reset_col = headers.iter().position(|h| h == "is_reset");
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row_no = i + 1;
        let rec = rec.map_err(|e| IngestError::MalformedResults { row: row_no, reason: e.to_string() })?;
        let is_reset = match reset_col.map(|c| rec.get(c).unwrap_or("")) {
            None | Some("") | Some("false") | Some("0") => false,
            Some("true") | Some("1") => true,
            Some(other) => {
                return Err(IngestError::MalformedResults {
                    row: row_no,
                    reason: format!("is_reset must be true/false, got `{other}`"),
                })
            }
        };
        let mut row = RawRow {
            run_id: rec.get(run_col).unwrap_or("").to_string(),
            factors: Map::new(),
            metrics: IndexMap::new(),
            is_reset,
        };
        if row.run_id.is_empty() {
            return Err(IngestError::MalformedResults { row: row_no, reason: "empty run_id".into() });
        }
        for (h, cell) in headers.iter().zip(rec.iter()) {
            if let Some(name) = h.strip_prefix("f.") {
                if cell.is_empty() {
                    continue;
                }
                let v = match cell.parse::<f64>() {
                    Ok(x) if x.is_finite() => serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number),
                    _ => Value::from(cell),
                };
                row.factors.insert(name.to_string(), v);
            } else if let Some(name) = h.strip_prefix("m.") {
                if cell.is_empty() {
                    continue;
                }
                let x: f64 = cell.parse().map_err(|_| IngestError::MalformedResults {
                    row: row_no,
                    reason: format!("metric {name}: `{cell}` is not a number"),
                })?;
                row.metrics.insert(name.to_string(), x);
            }
        }
        rows.push(row);
    }
    check_completeness(&rows, target_metrics)?;
    Ok(rows)
}

fn check_completeness(rows: &[RawRow], target_metrics: &[String]) -> Result<(), IngestError> {
    for m in target_metrics {
        if !rows.iter().any(|r| r.metrics.contains_key(m)) {
            return Err(IngestError::UnknownMetric(m.clone()));
        }
    }
    for (i, r) in rows.iter().enumerate() {
        if r.is_reset {
            continue;
        }
        for m in target_metrics {
            match r.metrics.get(m) {
                None => {
                    return Err(IngestError::MalformedResults {
                        row: i,
                        reason: format!("run {} is missing metric {m}", r.run_id),
                    })
                }
                Some(x) if !x.is_finite() => {
                    return Err(IngestError::MalformedResults {
                        row: i,
                        reason: format!("run {}: metric {m} is not finite", r.run_id),
                    })
                }
                _ => {}
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub run_id: String,
    pub sample_index: usize,
    pub replicate: u64,
    /// In `factor_names` order; discrete factors hold the value's index.
    pub factors: Vec<f64>,
    /// In `metric_names` order.
    pub metrics: Vec<f64>,
}

/// Analyzer-ready table: one complete row per non-reset run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResults {
    pub doe_type: DoeType,
    pub factor_names: Vec<String>,
    pub factors: Vec<FactorSpec>,
    pub metric_names: Vec<String>,
    pub design_meta: Map<String, Value>,
    pub rows: Vec<RunRow>,
}

impl RunResults {
    pub fn metric_index(&self, name: &str) -> Option<usize> {
        self.metric_names.iter().position(|m| m == name)
    }

    pub fn factor_index(&self, name: &str) -> Option<usize> {
        self.factor_names.iter().position(|f| f == name)
    }

    pub fn metric_column(&self, m: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.metrics[m]).collect()
    }

    /// Replicates averaged per design row, ordered by sample index.
    pub fn averaged_by_sample(&self) -> Vec<RunRow> {
        let mut out: Vec<RunRow> = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        for r in &self.rows {
            match out.last_mut() {
                Some(last) if last.sample_index == r.sample_index => {
                    for (acc, v) in last.metrics.iter_mut().zip(&r.metrics) {
                        *acc += v;
                    }
                    *counts.last_mut().expect("count per row") += 1;
                }
                _ => {
                    out.push(RunRow { replicate: 0, ..r.clone() });
                    counts.push(1);
                }
            }
        }
        for (row, c) in out.iter_mut().zip(counts) {
            if c > 1 {
                for v in &mut row.metrics {
                    *v /= c as f64;
                }
            }
        }
        out
    }
}

/// Numeric value of a recipe factor; discrete non-numeric values map to
/// their position in the set.
pub fn factor_numeric(v: &Value, domain: &FactorDomain) -> Option<f64> {
    if let FactorDomain::Discrete { values } = domain {
        if !values.iter().all(Value::is_number) {
            return values.iter().position(|x| crate::config::scalar_eq(x, v)).map(|i| i as f64);
        }
    }
    v.as_f64()
}

/// Join raw rows onto recipes; returns the table and any warnings.
pub fn join_and_filter(
    raw: &[RawRow],
    rs: &RecipeSet,
) -> Result<(RunResults, Vec<String>), IngestError> {
    let mut warnings = Vec::new();
    let mut by_id: HashMap<&str, &RawRow> = HashMap::with_capacity(raw.len());
    for (i, r) in raw.iter().enumerate() {
        if by_id.insert(r.run_id.as_str(), r).is_some() {
            return Err(IngestError::MalformedResults {
                row: i,
                reason: format!("duplicate run_id {}", r.run_id),
            });
        }
    }
    let known: HashSet<&str> = rs.recipes.iter().map(|r| r.run_id.as_str()).collect();
    let unknown: Vec<&str> = raw
        .iter()
        .map(|r| r.run_id.as_str())
        .filter(|id| !known.contains(id))
        .collect();
    if !unknown.is_empty() {
        warnings.push(format!(
            "{} result row(s) match no recipe and were dropped (first: {})",
            unknown.len(),
            unknown[0]
        ));
    }

    let specs = rs.factor_specs()?;
    let missing: Vec<String> = rs
        .non_reset()
        .filter(|r| !by_id.contains_key(r.run_id.as_str()))
        .map(|r| r.run_id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(IngestError::MissingRuns(missing));
    }

    let matched: Vec<(&crate::recipes::Recipe, &RawRow)> = rs
        .non_reset()
        .map(|r| (r, by_id[r.run_id.as_str()]))
        .collect();

    let mut metric_names = rs.target_metrics.clone();
    if let Some((_, first)) = matched.first() {
        for name in first.metrics.keys() {
            if metric_names.contains(name) {
                continue;
            }
            if matched.iter().all(|(_, raw)| raw.metrics.contains_key(name)) {
                metric_names.push(name.clone());
            } else {
                warnings.push(format!("extra metric {name} is not reported for every run; dropped"));
            }
        }
    }

    let mut conflicts = 0usize;
    let mut rows = Vec::with_capacity(matched.len());
    for (recipe, raw) in matched {
        let mut factors = Vec::with_capacity(specs.len());
        for spec in &specs {
            let v = factor_value(&recipe.parameters, spec).ok_or_else(|| {
                RecipeError::MalformedRecipeFile(format!(
                    "run {} has no value for factor {}",
                    recipe.run_id,
                    spec.name()
                ))
            })?;
            let x = factor_numeric(v, &spec.domain).ok_or_else(|| {
                RecipeError::MalformedRecipeFile(format!(
                    "run {}: factor {} value {v} is not usable",
                    recipe.run_id,
                    spec.name()
                ))
            })?;
            if let Some(reported) = raw.factors.get(&spec.name()) {
                let differs = match (reported.as_f64(), v.as_f64()) {
                    (Some(a), Some(b)) => (a - b).abs() > 1e-9 * a.abs().max(b.abs()).max(1e-300),
                    _ => !crate::config::scalar_eq(reported, v),
                };
                if differs {
                    conflicts += 1;
                }
            }
            factors.push(x);
        }
        let metrics = metric_names
            .iter()
            .map(|m| raw.metrics[m])
            .collect::<Vec<f64>>();
        rows.push(RunRow {
            run_id: recipe.run_id.clone(),
            sample_index: recipe.sample_index as usize,
            replicate: recipe.replicate,
            factors,
            metrics,
        });
    }
    if conflicts > 0 {
        warnings.push(format!(
            "{conflicts} reported factor value(s) differ from the recipes; recipe values were used"
        ));
    }
    rows.sort_by_key(|r| (r.sample_index, r.replicate));

    Ok((
        RunResults {
            doe_type: rs.doe_type,
            factor_names: rs.factor_names.clone(),
            factors: specs,
            metric_names,
            design_meta: rs.design_meta.clone(),
            rows,
        },
        warnings,
    ))
}

/// Serialize rows in the JSON results layout.
pub fn results_to_json(rows: &[RawRow]) -> String {
    serde_json::to_string_pretty(rows).expect("results serialize")
}
