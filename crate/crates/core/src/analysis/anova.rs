//! One-way ANOVA screening and Wilks' MANOVA.

use serde::Serialize;

use super::AnalysisError;
use crate::ingest::RunResults;
use crate::statlib::{f_sf, f_sf_frac, Cholesky, Matrix};

/// Most distinct levels a factor may take in screening.
pub const MAX_SCREEN_LEVELS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OneWayAnova {
    pub f: f64,
    pub p: f64,
    pub d1: u32,
    pub d2: u32,
}

impl OneWayAnova {
    pub fn significant(&self, alpha: f64) -> bool {
        self.p < alpha
    }
}

pub fn anova_one_way(groups: &[Vec<f64>]) -> Result<OneWayAnova, AnalysisError> {
    let g = groups.len();
    if g < 2 {
        return Err(AnalysisError::DegenerateGroups(format!("need at least 2 groups, got {g}")));
    }
    if let Some(i) = groups.iter().position(|gr| gr.len() < 2) {
        return Err(AnalysisError::DegenerateGroups(format!("group {i} has fewer than 2 observations")));
    }
    let n: usize = groups.iter().map(Vec::len).sum();
    let grand = groups.iter().flatten().sum::<f64>() / n as f64;
    let mut ssb = 0.0;
    let mut ssw = 0.0;
    for gr in groups {
        let m = gr.iter().sum::<f64>() / gr.len() as f64;
        ssb += gr.len() as f64 * (m - grand) * (m - grand);
        ssw += gr.iter().map(|x| (x - m) * (x - m)).sum::<f64>();
    }
    if ssw <= 0.0 {
        return Err(AnalysisError::DegenerateGroups("zero within-group variance".into()));
    }
    let d1 = (g - 1) as u32;
    let d2 = (n - g) as u32;
    let f = (ssb / f64::from(d1)) / (ssw / f64::from(d2));
    let p = f_sf(f, d1, d2)?;
    Ok(OneWayAnova { f, p, d1, d2 })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnovaRow {
    pub factor: String,
    pub target_metric: String,
    #[serde(rename = "F")]
    pub f: f64,
    pub p: f64,
    pub d1: u32,
    pub d2: u32,
    pub significant: bool,
}

/// Distinct levels of factor `fi` and the row indices at each level.
fn level_groups(rr: &RunResults, fi: usize) -> Result<Vec<(f64, Vec<usize>)>, AnalysisError> {
    let mut levels: Vec<(f64, Vec<usize>)> = Vec::new();
    for (r, row) in rr.rows.iter().enumerate() {
        let x = row.factors[fi];
        match levels.iter_mut().find(|(v, _)| *v == x) {
            Some((_, idx)) => idx.push(r),
            None => {
                if levels.len() == MAX_SCREEN_LEVELS {
                    return Err(AnalysisError::TooManyLevels(rr.factor_names[fi].clone()));
                }
                levels.push((x, vec![r]));
            }
        }
    }
    levels.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(levels)
}

/// One row per (factor, metric), grouping runs by the factor's level.
pub fn anova_screen(rr: &RunResults, alpha: f64) -> Result<Vec<AnovaRow>, AnalysisError> {
    let mut out = Vec::new();
    for (fi, fname) in rr.factor_names.iter().enumerate() {
        let levels = level_groups(rr, fi)?;
        for (mi, mname) in rr.metric_names.iter().enumerate() {
            let groups: Vec<Vec<f64>> = levels
                .iter()
                .map(|(_, idx)| idx.iter().map(|&r| rr.rows[r].metrics[mi]).collect())
                .collect();
            let res = anova_one_way(&groups)
                .map_err(|e| match e {
                    AnalysisError::DegenerateGroups(why) => {
                        AnalysisError::DegenerateGroups(format!("{fname} / {mname}: {why}"))
                    }
                    other => other,
                })?;
            out.push(AnovaRow {
                factor: fname.clone(),
                target_metric: mname.clone(),
                f: res.f,
                p: res.p,
                d1: res.d1,
                d2: res.d2,
                significant: res.significant(alpha),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManovaResult {
    pub factor: String,
    pub wilks_lambda: f64,
    #[serde(rename = "F_approx")]
    pub f_approx: f64,
    pub df1: f64,
    pub df2: f64,
    pub p: f64,
    pub significant: bool,
    /// Metrics entering the test after dropping linearly dependent ones.
    pub metrics_used: Vec<String>,
}

fn sscp(rows: &[&[f64]], center: &[f64]) -> Matrix {
    let p = center.len();
    let mut m = Matrix::zeros(p, p);
    for y in rows {
        for a in 0..p {
            let da = y[a] - center[a];
            for b in 0..p {
                m[(a, b)] += da * (y[b] - center[b]);
            }
        }
    }
    m
}

fn submatrix(m: &Matrix, keep: &[usize]) -> Matrix {
    let mut out = Matrix::zeros(keep.len(), keep.len());
    for (i, &a) in keep.iter().enumerate() {
        for (j, &b) in keep.iter().enumerate() {
            out[(i, j)] = m[(a, b)];
        }
    }
    out
}

/// Greedy selection of metrics whose total variation is not explained by
/// earlier kept metrics.
fn independent_metrics(total: &Matrix) -> Vec<usize> {
    let mut keep: Vec<usize> = Vec::new();
    for j in 0..total.rows() {
        let tjj = total[(j, j)];
        if tjj <= 0.0 {
            continue;
        }
        let residual = if keep.is_empty() {
            tjj
        } else {
            let sub = submatrix(total, &keep);
            let cross: Vec<f64> = keep.iter().map(|&a| total[(a, j)]).collect();
            match Cholesky::new(&sub) {
                Ok(ch) => {
                    let sol = ch.solve_vec(&cross);
                    tjj - cross.iter().zip(&sol).map(|(c, s)| c * s).sum::<f64>()
                }
                Err(_) => 0.0,
            }
        };
        if residual > 1e-9 * tjj {
            keep.push(j);
        }
    }
    keep
}

/// Wilks' lambda test of `factor` on the metric vector, with Rao's F.
pub fn manova(rr: &RunResults, factor: &str, alpha: f64) -> Result<ManovaResult, AnalysisError> {
    let fi = rr
        .factor_index(factor)
        .ok_or_else(|| AnalysisError::InvalidInput(format!("unknown factor {factor}")))?;
    if rr.metric_names.len() < 2 {
        return Err(AnalysisError::InvalidInput("MANOVA needs at least two metrics".into()));
    }
    let levels = level_groups(rr, fi)?;
    let g = levels.len();
    if g < 2 {
        return Err(AnalysisError::DegenerateGroups(format!("{factor} takes a single level")));
    }
    let n = rr.rows.len();
    let all: Vec<&[f64]> = rr.rows.iter().map(|r| r.metrics.as_slice()).collect();
    let p_all = rr.metric_names.len();
    let grand: Vec<f64> = (0..p_all).map(|m| all.iter().map(|y| y[m]).sum::<f64>() / n as f64).collect();
    let total = sscp(&all, &grand);
    let keep = independent_metrics(&total);
    if keep.is_empty() {
        return Err(AnalysisError::ZeroVariance("all metrics".into()));
    }
    let p = keep.len();
    if n <= g + p {
        return Err(AnalysisError::SingularCovariance(format!(
            "need more than {} runs for {p} metrics and {g} levels, got {n}",
            g + p
        )));
    }
    let mut within = Matrix::zeros(p_all, p_all);
    for (_, idx) in &levels {
        let rows: Vec<&[f64]> = idx.iter().map(|&r| all[r]).collect();
        let center: Vec<f64> =
            (0..p_all).map(|m| rows.iter().map(|y| y[m]).sum::<f64>() / rows.len() as f64).collect();
        let s = sscp(&rows, &center);
        for a in 0..p_all {
            for b in 0..p_all {
                within[(a, b)] += s[(a, b)];
            }
        }
    }
    let w = submatrix(&within, &keep);
    let t = submatrix(&total, &keep);
    let det_t = t.determinant();
    if !(det_t > 0.0) {
        return Err(AnalysisError::SingularCovariance("total cross-product matrix is singular".into()));
    }
    let lambda = (w.determinant() / det_t).clamp(0.0, 1.0);

    let pf = p as f64;
    let q = (g - 1) as f64;
    let denom = pf * pf + q * q - 5.0;
    let tt = if denom > 0.0 { ((pf * pf * q * q - 4.0) / denom).sqrt() } else { 1.0 };
    let wdf = n as f64 - 1.0 - (pf + q + 1.0) / 2.0;
    let df1 = pf * q;
    let df2 = wdf * tt - (pf * q - 2.0) / 2.0;
    if !(df2 > 0.0) {
        return Err(AnalysisError::SingularCovariance(format!("non-positive denominator df {df2}")));
    }
    let root = lambda.powf(1.0 / tt);
    let (f_approx, pval) = if root <= 0.0 {
        (f64::INFINITY, 0.0)
    } else {
        let f = (1.0 - root) / root * df2 / df1;
        (f, f_sf_frac(f.max(0.0), df1, df2)?)
    };
    Ok(ManovaResult {
        factor: factor.to_string(),
        wilks_lambda: lambda,
        f_approx,
        df1,
        df2,
        p: pval,
        significant: pval < alpha,
        metrics_used: keep.iter().map(|&m| rr.metric_names[m].clone()).collect(),
    })
}
