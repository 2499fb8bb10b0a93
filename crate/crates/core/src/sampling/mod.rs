//! Unit-hypercube designs for every DoE type, and their mapping onto
//! factor domains.

mod designs;
mod joe_kuo;
mod sobol;

use serde_json::{Map, Value};

use crate::config::{
    Distribution, DoeType, FactorDomain, FactorSpec, ScenarioConfig, EFAST_HARMONICS,
};
use crate::statlib::{normal_ppf, Rng};

pub use designs::{
    efast_design, extreme_points, lhs_points, oat_design, random_unit, saltelli_design,
    EfastCurve, SaltelliBlock, MAX_EXTREME_FACTORS,
};
pub use sobol::{sobol_points, SobolSequence, MAX_SOBOL_DIM};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SamplingError {
    #[error("Sobol sequences support dimensions 1..={MAX_SOBOL_DIM}, got {0}")]
    DimensionUnsupported(usize),
    #[error("too many factors for extreme-point enumeration: {0} (limit {MAX_EXTREME_FACTORS})")]
    TooManyFactors(usize),
    #[error("sample size too small: eFAST needs at least {minimum} points per curve, got {got}")]
    SampleSizeTooSmall { minimum: usize, got: usize },
    #[error("invalid design request: {0}")]
    InvalidRequest(String),
}

/// Ordered sample points plus the structure needed to analyse them.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    pub design_type: DoeType,
    pub factor_names: Vec<String>,
    /// `n x k`, entries in `[0, 1]`.
    pub rows: Vec<Vec<f64>>,
    pub base_samples: u64,
    pub meta: Map<String, Value>,
}

impl DesignMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_factors(&self) -> usize {
        self.factor_names.len()
    }

    /// CSV with the factor names as header.
    pub fn to_csv(&self) -> String {
        let mut out = self.factor_names.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// Normal quantiles are evaluated at `u` clamped to this margin.
pub const NORMAL_TAIL_CLAMP: f64 = 1e-12;

/// Inverse-CDF value of one unit coordinate in a numeric domain.
///
/// Discrete sets return the index of the selected value.
pub fn unit_to_real(u: f64, domain: &FactorDomain) -> f64 {
    match domain {
        FactorDomain::Interval { lo, hi } => lo + u * (hi - lo),
        FactorDomain::Discrete { values } => discrete_index(u, values.len()) as f64,
        FactorDomain::Distribution(d) => match *d {
            Distribution::Uniform { lo, hi } => lo + u * (hi - lo),
            Distribution::Normal { mean, std } => {
                let p = u.clamp(NORMAL_TAIL_CLAMP, 1.0 - NORMAL_TAIL_CLAMP);
                mean + std * normal_ppf(p).unwrap_or(0.0)
            }
            Distribution::Triangular { lo, mode, hi } => {
                let u = u.clamp(0.0, 1.0);
                let width = hi - lo;
                let split = (mode - lo) / width;
                if u < split {
                    lo + (u * width * (mode - lo)).sqrt()
                } else {
                    hi - ((1.0 - u) * width * (hi - mode)).sqrt()
                }
            }
        },
    }
}

fn discrete_index(u: f64, m: usize) -> usize {
    ((u * m as f64).floor().max(0.0) as usize).min(m - 1)
}

fn real_value(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// One unit coordinate scaled into its factor's domain.
pub fn scale_value(u: f64, domain: &FactorDomain) -> Value {
    match domain {
        FactorDomain::Discrete { values } => values[discrete_index(u, values.len())].clone(),
        other => real_value(unit_to_real(u, other)),
    }
}

/// Scale every row of a unit design; columns follow `factors` order.
pub fn scale_to_domain(
    unit: &DesignMatrix,
    factors: &[FactorSpec],
) -> Result<Vec<Vec<Value>>, SamplingError> {
    if unit.n_factors() != factors.len() {
        return Err(SamplingError::InvalidRequest(format!(
            "design has {} columns but {} factors were given",
            unit.n_factors(),
            factors.len()
        )));
    }
    Ok(unit
        .rows
        .iter()
        .map(|row| row.iter().zip(factors).map(|(&u, f)| scale_value(u, &f.domain)).collect())
        .collect())
}

/// Seeded independent draws, directly in factor units.
pub fn random_design(factors: &[FactorSpec], n: usize, seed: u64) -> Vec<Vec<Value>> {
    random_unit(factors.len(), n, seed)
        .iter()
        .map(|row| row.iter().zip(factors).map(|(&u, f)| scale_value(u, &f.domain)).collect())
        .collect()
}

/// Unit design for a scenario, dispatched on its DoE type.
pub fn design_for(cfg: &ScenarioConfig) -> Result<DesignMatrix, SamplingError> {
    let k = cfg.variations.len();
    if k == 0 {
        return Err(SamplingError::InvalidRequest("no factors to vary".into()));
    }
    let n = usize::try_from(cfg.samples)
        .map_err(|_| SamplingError::InvalidRequest("sample count too large".into()))?;
    let names = cfg.factor_names();
    let mut meta = Map::new();
    let (rows, base) = match cfg.doe_type {
        DoeType::ExtremePoints => (extreme_points(k)?, cfg.samples),
        DoeType::Sobol => (sobol_points(k, 0, n)?, cfg.samples),
        DoeType::Lhs => (lhs_points(k, n, cfg.seed), cfg.samples),
        DoeType::Oat => {
            meta.insert("baseline_row".into(), Value::from(0));
            (oat_design(k), cfg.samples)
        }
        DoeType::SobolIndices => {
            let (rows, layout) = saltelli_design(n, k, false)?;
            meta.extend(layout);
            (rows, cfg.samples)
        }
        DoeType::Fast => {
            let (rows, layout) = efast_design(n, k, EFAST_HARMONICS, None)?;
            meta.extend(layout);
            (rows, cfg.samples)
        }
        DoeType::DistributionAndDiscrete => (random_unit(k, n, cfg.seed), cfg.samples),
    };
    Ok(DesignMatrix { design_type: cfg.doe_type, factor_names: names, rows, base_samples: base, meta })
}

/// Seeded uniform phase shifts in `[0, 2pi)` for resampled eFAST curves.
pub(crate) fn efast_phases(seed: u64, curve: usize, k: usize) -> Vec<f64> {
    let mut rng = Rng::substream(seed, curve as u64);
    (0..k).map(|_| rng.next_f64() * std::f64::consts::TAU).collect()
}
