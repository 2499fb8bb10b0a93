//! Built-in experiment models for desk-scale campaigns.
//!
//! # Recipe mapping
//!
//! * `ishigami`: factors `0..3` in recipe order, each mapped from its domain
//!   to `[-pi, pi]`; absent inputs sit at 0, extra factors are ignored.
//! * `g_function`: every factor mapped to `[0, 1]`, with
//!   `a = (0, 1, 4.5, 9, 99, 99, ...)`.
//! * `linear`: `sum_i (i + 1) * u_i` over factors mapped to `[0, 1]`.
//! * `toy_hess`: parameters named `rf`, `cf`, `a_sc`, `a_li` (any entity,
//!   optional `p_max_hess`), profile seed `1 + __nuisance.__replicate`.
//!
//! Single-output models write their value under every target metric;
//! `toy_hess` writes `Losses_hess` and `Degradation_li`. Reset recipes are
//! echoed with `is_reset: true` and no metrics.
//!
//! Domains map to the unit interval as `(x - lo) / (hi - lo)` for intervals
//! and uniform or triangular distributions (the latter through their CDF),
//! and `index / (len - 1)` for discrete sets. Normal factors are rejected.

use std::f64::consts::PI;

use indexmap::IndexMap;
use serde_json::{Map, Value};

use crate::config::{Distribution, FactorDomain, FactorSpec};
use crate::ingest::{factor_numeric, RawRow};
use crate::recipes::{factor_value, Recipe, RecipeError, RecipeSet, NUISANCE_ENTITY, REPLICATE_PARAM};
use crate::statlib::Rng;

pub const DEFAULT_HORIZON: usize = 360;

#[derive(Debug, thiserror::Error)]
pub enum ToyModelError {
    #[error("parameter {param} = {value} outside [{lo}, {hi}]")]
    ParamOutOfRange { param: &'static str, value: f64, lo: f64, hi: f64 },
    #[error("recipe {run_id} cannot drive the model: {reason}")]
    UnmappableRecipe { run_id: String, reason: String },
    #[error(transparent)]
    Recipe(#[from] RecipeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToyModel {
    Ishigami,
    GFunction,
    ToyHess,
    Linear,
}

impl ToyModel {
    pub const ALL: [ToyModel; 4] = [ToyModel::Ishigami, ToyModel::GFunction, ToyModel::ToyHess, ToyModel::Linear];

    pub fn as_str(self) -> &'static str {
        match self {
            ToyModel::Ishigami => "ishigami",
            ToyModel::GFunction => "g_function",
            ToyModel::ToyHess => "toy_hess",
            ToyModel::Linear => "linear",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        ToyModel::ALL.into_iter().find(|m| m.as_str() == s)
    }
}

pub const ISHIGAMI_A: f64 = 7.0;
pub const ISHIGAMI_B: f64 = 0.1;

pub fn ishigami(x: [f64; 3], a: f64, b: f64) -> f64 {
    x[0].sin() + a * x[1].sin().powi(2) + b * x[2].powi(4) * x[0].sin()
}

/// Analytic first-order and total indices of the Ishigami function.
pub fn ishigami_indices(a: f64, b: f64) -> ([f64; 3], [f64; 3]) {
    let pi4 = PI.powi(4);
    let pi8 = PI.powi(8);
    let v1 = 0.5 * (1.0 + b * pi4 / 5.0).powi(2);
    let v2 = a * a / 8.0;
    let v13 = b * b * pi8 * (1.0 / 18.0 - 1.0 / 50.0);
    let v = v1 + v2 + v13;
    ([v1 / v, v2 / v, 0.0], [(v1 + v13) / v, v2 / v, v13 / v])
}

pub fn g_function(x: &[f64], a: &[f64]) -> f64 {
    x.iter().zip(a).map(|(&xi, &ai)| ((4.0 * xi - 2.0).abs() + ai) / (1.0 + ai)).product()
}

pub fn g_function_coefficients(k: usize) -> Vec<f64> {
    const HEAD: [f64; 4] = [0.0, 1.0, 4.5, 9.0];
    (0..k).map(|i| HEAD.get(i).copied().unwrap_or(99.0)).collect()
}

pub fn linear(u: &[f64]) -> f64 {
    u.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v).sum()
}

/// Parameters of the hybrid storage surrogate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyHessParams {
    /// SOC restoration factor.
    pub rf: f64,
    /// VRB share of the non-SC power request.
    pub cf: f64,
    /// SC share of total power capacity.
    pub a_sc: f64,
    /// Li share of total power capacity.
    pub a_li: f64,
    /// Total power capacity, kW.
    pub p_max_hess: f64,
    /// Frequency-profile realization; 0 is the all-zero profile.
    pub replicate_seed: u64,
}

pub const P_MAX_HESS: f64 = 22.5;

impl ToyHessParams {
    pub fn new(rf: f64, cf: f64, a_sc: f64, a_li: f64, replicate_seed: u64) -> Self {
        Self { rf, cf, a_sc, a_li, p_max_hess: P_MAX_HESS, replicate_seed }
    }

    pub fn validate(&self) -> Result<(), ToyModelError> {
        let check = |param: &'static str, value: f64, lo: f64, hi: f64| {
            if value >= lo && value <= hi {
                Ok(())
            } else {
                Err(ToyModelError::ParamOutOfRange { param, value, lo, hi })
            }
        };
        check("rf", self.rf, 2.0, 4.0)?;
        check("cf", self.cf, 0.3, 0.7)?;
        check("a_sc", self.a_sc, 0.1, 0.45)?;
        check("a_li", self.a_li, 0.1, 0.45)?;
        if !(self.p_max_hess > 0.0 && self.p_max_hess.is_finite()) {
            return Err(ToyModelError::ParamOutOfRange {
                param: "p_max_hess",
                value: self.p_max_hess,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        Ok(())
    }

    /// Rated power `[SC, Li, VRB]` in kW; VRB takes what is left so the sum
    /// is `p_max_hess`.
    pub fn capacities(&self) -> [f64; 3] {
        let sc = self.p_max_hess * self.a_sc;
        let li = self.p_max_hess * self.a_li;
        [sc, li, self.p_max_hess - (sc + li)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessOutput {
    /// Conversion losses, kWh.
    pub losses_hess: f64,
    /// Depth-of-discharge weighted Li throughput, in full-cycle equivalents.
    pub degradation_li: f64,
}

// Step length: 10 s.
const DT_H: f64 = 10.0 / 3600.0;
// Frequency deviation that calls for full power, Hz.
const FULL_POWER_DEVIATION: f64 = 0.2;
const PROFILE_MEMORY: f64 = 0.9;
const PROFILE_NOISE: f64 = 0.03;
// Storage duration at rated power, h: [SC, Li, VRB].
const DURATION_H: [f64; 3] = [0.02, 1.0, 4.0];
// Quadratic conversion-loss coefficients: loss = c * P^2 / P_rated.
const LOSS_COEF: [f64; 3] = [0.01, 0.03, 0.15];
// Restoration power per unit SOC error and unit rf, as a share of rating.
const RESTORE_GAIN: f64 = 0.05;

/// Requested power (kW, positive = discharge) driven by a seeded AR(1)
/// frequency deviation.
pub fn hess_request_profile(seed: u64, horizon: usize, p_max: f64) -> Vec<f64> {
    if seed == 0 {
        return vec![0.0; horizon];
    }
    let mut rng = Rng::new(seed);
    let mut f = 0.0;
    (0..horizon)
        .map(|_| {
            f = PROFILE_MEMORY * f + PROFILE_NOISE * rng.normal();
            (-f / FULL_POWER_DEVIATION * p_max).clamp(-p_max, p_max)
        })
        .collect()
}

pub fn toy_hess(p: &ToyHessParams, horizon: usize) -> Result<HessOutput, ToyModelError> {
    p.validate()?;
    let rated = p.capacities();
    let energy: Vec<f64> = rated.iter().zip(DURATION_H).map(|(r, h)| r * h).collect();
    let request = hess_request_profile(p.replicate_seed, horizon, p.p_max_hess);
    let mut soc = [0.5f64; 3];
    let mut losses = 0.0;
    let mut degradation = 0.0;
    let mut prev = 0.0;
    for &req in &request {
        let hf = req - prev;
        prev = req;
        let sc_cmd = hf.clamp(-rated[0], rated[0]);
        let rest = req - sc_cmd;
        let vrb_cmd = (p.cf * rest).clamp(-rated[2], rated[2]);
        let li_cmd = (rest - vrb_cmd).clamp(-rated[1], rated[1]);
        let cmd = [sc_cmd, li_cmd, vrb_cmd];
        for i in 0..3 {
            let restore = p.rf * RESTORE_GAIN * (soc[i] - 0.5) * rated[i];
            // Keep SOC inside [0, 1] over this step.
            let max_dis = soc[i] * energy[i] / DT_H;
            let max_chg = (1.0 - soc[i]) * energy[i] / DT_H;
            let power = (cmd[i] + restore).clamp(-rated[i], rated[i]).clamp(-max_chg, max_dis);
            soc[i] -= power * DT_H / energy[i];
            losses += LOSS_COEF[i] * power * power / rated[i] * DT_H;
            if i == 1 {
                let dod = 2.0 * (soc[1] - 0.5).abs();
                degradation += power.abs() * DT_H / energy[1] * (1.0 + dod);
            }
        }
    }
    Ok(HessOutput { losses_hess: losses, degradation_li: degradation })
}

/// Position of a factor value inside its domain, in `[0, 1]`.
pub fn unit_position(x: f64, domain: &FactorDomain) -> Option<f64> {
    let u = match domain {
        FactorDomain::Interval { lo, hi } | FactorDomain::Distribution(Distribution::Uniform { lo, hi }) => {
            (x - lo) / (hi - lo)
        }
        FactorDomain::Distribution(Distribution::Triangular { lo, mode, hi }) => {
            if x <= *mode {
                if mode > lo { (x - lo).powi(2) / ((hi - lo) * (mode - lo)) } else { 0.0 }
            } else if hi > mode {
                1.0 - (hi - x).powi(2) / ((hi - lo) * (hi - mode))
            } else {
                1.0
            }
        }
        FactorDomain::Discrete { values } => {
            if values.len() < 2 {
                0.5
            } else {
                x / (values.len() - 1) as f64
            }
        }
        FactorDomain::Distribution(Distribution::Normal { .. }) => return None,
    };
    Some(u.clamp(0.0, 1.0))
}

fn unmappable(r: &Recipe, reason: impl Into<String>) -> ToyModelError {
    ToyModelError::UnmappableRecipe { run_id: r.run_id.clone(), reason: reason.into() }
}

fn unit_inputs(r: &Recipe, specs: &[FactorSpec]) -> Result<Vec<f64>, ToyModelError> {
    specs
        .iter()
        .map(|s| {
            let v = factor_value(&r.parameters, s).ok_or_else(|| unmappable(r, format!("no value for {}", s.name())))?;
            let x = factor_numeric(v, &s.domain).ok_or_else(|| unmappable(r, format!("{} = {v} is not numeric", s.name())))?;
            unit_position(x, &s.domain)
                .ok_or_else(|| unmappable(r, format!("{} has a normal domain with no bounded unit mapping", s.name())))
        })
        .collect()
}

fn named_param(r: &Recipe, name: &str) -> Option<f64> {
    r.parameters
        .iter()
        .filter(|(entity, _)| entity.as_str() != NUISANCE_ENTITY)
        .find_map(|(_, params)| params.get(name))
        .and_then(Value::as_f64)
}

fn hess_params(r: &Recipe) -> Result<ToyHessParams, ToyModelError> {
    let get = |name: &str| named_param(r, name).ok_or_else(|| unmappable(r, format!("missing numeric parameter {name}")));
    let replicate = r
        .parameters
        .get(NUISANCE_ENTITY)
        .and_then(|p| p.get(REPLICATE_PARAM))
        .and_then(Value::as_u64)
        .unwrap_or(r.replicate);
    let mut p = ToyHessParams::new(get("rf")?, get("cf")?, get("a_sc")?, get("a_li")?, 1 + replicate);
    if let Some(pm) = named_param(r, "p_max_hess") {
        p.p_max_hess = pm;
    }
    Ok(p)
}

fn evaluate(
    model: ToyModel,
    r: &Recipe,
    specs: &[FactorSpec],
    targets: &[String],
    horizon: usize,
) -> Result<IndexMap<String, f64>, ToyModelError> {
    let single = |y: f64| targets.iter().map(|t| (t.clone(), y)).collect::<IndexMap<_, _>>();
    match model {
        ToyModel::Ishigami => {
            let u = unit_inputs(r, specs)?;
            let mut x = [0.0; 3];
            for (xi, ui) in x.iter_mut().zip(&u) {
                *xi = -PI + 2.0 * PI * ui;
            }
            Ok(single(ishigami(x, ISHIGAMI_A, ISHIGAMI_B)))
        }
        ToyModel::GFunction => {
            let u = unit_inputs(r, specs)?;
            Ok(single(g_function(&u, &g_function_coefficients(u.len()))))
        }
        ToyModel::Linear => Ok(single(linear(&unit_inputs(r, specs)?))),
        ToyModel::ToyHess => {
            let out = toy_hess(&hess_params(r)?, horizon)?;
            let mut m = IndexMap::new();
            m.insert("Losses_hess".to_string(), out.losses_hess);
            m.insert("Degradation_li".to_string(), out.degradation_li);
            if let Some(t) = targets.iter().find(|t| !m.contains_key(t.as_str())) {
                return Err(unmappable(r, format!("toy_hess does not produce metric {t}")));
            }
            Ok(m)
        }
    }
}

/// Run every recipe through `model`; one result row per recipe, in order.
pub fn run_experiment(rs: &RecipeSet, model: ToyModel, horizon: usize) -> Result<Vec<RawRow>, ToyModelError> {
    let specs = rs.factor_specs()?;
    rs.recipes
        .iter()
        .map(|r| {
            if r.is_reset {
                return Ok(RawRow { run_id: r.run_id.clone(), factors: Map::new(), metrics: IndexMap::new(), is_reset: true });
            }
            let factors: Map<String, Value> = specs
                .iter()
                .filter_map(|s| factor_value(&r.parameters, s).map(|v| (s.name(), v.clone())))
                .collect();
            let metrics = evaluate(model, r, &specs, &rs.target_metrics, horizon)?;
            Ok(RawRow { run_id: r.run_id.clone(), factors, metrics, is_reset: false })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_scenario_config;
    use crate::ingest::join_and_filter;
    use crate::recipes::{generate_recipes, insert_reset_blocks};

    #[test]
    fn ishigami_anchors() {
        assert_eq!(ishigami([0.0; 3], 7.0, 0.1), 0.0);
        assert!((ishigami([PI / 2.0, PI / 2.0, 0.0], 7.0, 0.1) - 8.0).abs() < 1e-12);
        assert!((ishigami([PI / 2.0, 0.0, PI / 2.0], 7.0, 0.1) - 1.608_806_1).abs() < 1e-6);
    }

    #[test]
    fn ishigami_analytic_indices() {
        let (s1, st) = ishigami_indices(7.0, 0.1);
        for (got, want) in s1.iter().zip([0.3139, 0.4424, 0.0]) {
            assert!((got - want).abs() < 5e-5, "{s1:?}");
        }
        for (got, want) in st.iter().zip([0.5576, 0.4424, 0.2437]) {
            assert!((got - want).abs() < 5e-5, "{st:?}");
        }
    }

    #[test]
    fn g_function_anchors() {
        assert_eq!(g_function(&[0.5, 0.5], &[0.0, 0.0]), 0.0);
        assert_eq!(g_function(&[0.0], &[0.0]), 2.0);
        assert!((g_function(&[0.0, 0.9], &[1e12, 0.0]) - 1.6).abs() < 1e-9);
    }

    #[test]
    fn sentinel_profile_is_silent() {
        let out = toy_hess(&ToyHessParams::new(3.0, 0.5, 0.2, 0.3, 0), DEFAULT_HORIZON).unwrap();
        assert_eq!(out, HessOutput { losses_hess: 0.0, degradation_li: 0.0 });
    }

    #[test]
    fn toy_hess_is_deterministic() {
        let p = ToyHessParams::new(2.5, 0.4, 0.3, 0.2, 7);
        let a = toy_hess(&p, DEFAULT_HORIZON).unwrap();
        assert_eq!(a, toy_hess(&p, DEFAULT_HORIZON).unwrap());
        assert!(a.losses_hess > 0.0 && a.degradation_li > 0.0);
    }

    #[test]
    fn losses_rise_with_vrb_share() {
        for seed in 1..=5 {
            let l: Vec<f64> = [0.3, 0.5, 0.7]
                .iter()
                .map(|&cf| toy_hess(&ToyHessParams::new(3.0, cf, 0.2, 0.3, seed), DEFAULT_HORIZON).unwrap().losses_hess)
                .collect();
            assert!(l[0] < l[1] && l[1] < l[2], "seed {seed}: {l:?}");
        }
    }

    #[test]
    fn out_of_range_parameters() {
        assert!(matches!(
            toy_hess(&ToyHessParams::new(5.0, 0.5, 0.2, 0.2, 1), 10),
            Err(ToyModelError::ParamOutOfRange { param: "rf", .. })
        ));
        assert!(matches!(
            toy_hess(&ToyHessParams::new(3.0, 0.5, 0.5, 0.2, 1), 10),
            Err(ToyModelError::ParamOutOfRange { param: "a_sc", .. })
        ));
    }

    #[test]
    fn campaign_with_resets_closes_the_loop() {
        let doc = r#"{"samples":5,"doe_type":"LHS","basic_conf":{"scenario_name":"t"},
            "entities_parameters":{"e":{"x1":0,"x2":0,"x3":0}},
            "variations_dict":{"e":{"x1":[0,1],"x2":[0,1],"x3":[0,1]}},"target_metrics":["y"]}"#;
        let rs = insert_reset_blocks(generate_recipes(&parse_scenario_config(doc).unwrap()).unwrap(), 2, &Default::default());
        let rows = run_experiment(&rs, ToyModel::Ishigami, 0).unwrap();
        assert_eq!(rows.len(), 8);
        let (rr, warn) = join_and_filter(&rows, &rs).unwrap();
        assert_eq!(rr.rows.len(), 5);
        assert!(warn.is_empty(), "{warn:?}");
    }

    #[test]
    fn hess_recipes_need_named_parameters() {
        let doc = r#"{"samples":4,"doe_type":"LHS","basic_conf":{"scenario_name":"t"},
            "entities_parameters":{"hess":{"rf":3,"cf":0.5,"a_sc":0.2}},
            "variations_dict":{"hess":{"cf":[0.3,0.7]}},"target_metrics":["Losses_hess"]}"#;
        let rs = generate_recipes(&parse_scenario_config(doc).unwrap()).unwrap();
        assert!(matches!(run_experiment(&rs, ToyModel::ToyHess, 10), Err(ToyModelError::UnmappableRecipe { .. })));
    }
}
