#![allow(dead_code)]

use std::f64::consts::PI;

use doelab::ingest::{join_and_filter, RawRow};
use doelab::recipes::factor_value;
use doelab::{generate_recipes, parse_scenario_config, RunResults};
use indexmap::IndexMap;
use serde_json::{json, Value};

/// Scenario document with `k` factors `m.x1..` on `[lo, hi]` and metric `y`.
pub fn scenario(doe_type: &str, samples: u64, k: usize, lo: f64, hi: f64, seed: u64) -> String {
    let params: serde_json::Map<String, Value> = (1..=k).map(|i| (format!("x{i}"), json!(0))).collect();
    let vars: serde_json::Map<String, Value> = (1..=k).map(|i| (format!("x{i}"), json!([lo, hi]))).collect();
    json!({
        "samples": samples,
        "doe_type": doe_type,
        "seed": seed,
        "basic_conf": { "scenario_name": "test" },
        "entities_parameters": { "m": params },
        "variations_dict": { "m": vars },
        "target_metrics": ["y"]
    })
    .to_string()
}

/// Generate recipes for `doc`, evaluate `model` on each factor row and join.
pub fn campaign(doc: &str, model: impl Fn(&[f64]) -> f64) -> RunResults {
    let cfg = parse_scenario_config(doc).expect("config parses");
    let rs = generate_recipes(&cfg).expect("recipes");
    let specs = rs.factor_specs().unwrap();
    let raw: Vec<RawRow> = rs
        .recipes
        .iter()
        .map(|r| {
            let x: Vec<f64> = specs
                .iter()
                .map(|f| factor_value(&r.parameters, f).and_then(Value::as_f64).unwrap())
                .collect();
            let mut metrics = IndexMap::new();
            metrics.insert("y".to_string(), model(&x));
            RawRow { run_id: r.run_id.clone(), factors: Default::default(), metrics, is_reset: false }
        })
        .collect();
    join_and_filter(&raw, &rs).expect("join").0
}

pub fn ishigami_fn(x: &[f64]) -> f64 {
    let (a, b) = (7.0, 0.1);
    x[0].sin() + a * x[1].sin().powi(2) + b * x[2].powi(4) * x[0].sin()
}

/// Closed-form Ishigami first-order and total indices on `[-pi, pi]^3`,
/// evaluated here independently of the library.
pub fn ishigami_oracle(a: f64, b: f64) -> ([f64; 3], [f64; 3]) {
    let pi4 = PI.powi(4);
    let pi8 = PI.powi(8);
    let v1 = 0.5 * (1.0 + b * pi4 / 5.0).powi(2);
    let v2 = a * a / 8.0;
    let v13 = 8.0 * b * b * pi8 / 225.0;
    let v = a * a / 8.0 + b * pi4 / 5.0 + b * b * pi8 / 18.0 + 0.5;
    ([v1 / v, v2 / v, 0.0], [(v1 + v13) / v, v2 / v, v13 / v])
}

/// Gamma at positive integers and half-integers.
pub fn gamma_half(x: f64) -> f64 {
    let (mut acc, mut z) = (1.0, x);
    while z > 1.0 {
        z -= 1.0;
        acc *= z;
    }
    if (z - 0.5).abs() < 1e-12 {
        acc * PI.sqrt()
    } else {
        acc
    }
}

/// CDF of F(d1, d2) at `x` by composite Simpson on the substitution
/// x = t^2, which removes the integrable singularity at zero for d1 = 1.
pub fn f_cdf_by_quadrature(x: f64, d1: f64, d2: f64) -> f64 {
    let beta = gamma_half(d1 / 2.0) * gamma_half(d2 / 2.0) / gamma_half((d1 + d2) / 2.0);
    let coef = 2.0 * (d1 / d2).powf(d1 / 2.0) / beta;
    let g = |t: f64| coef * t.powf(d1 - 1.0) * (1.0 + d1 * t * t / d2).powf(-(d1 + d2) / 2.0);
    let n = 20_000;
    let h = x.sqrt() / n as f64;
    let mut s = g(0.0) + g(x.sqrt());
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * g(i as f64 * h);
    }
    s * h / 3.0
}

/// Kolmogorov-Smirnov distance of a sample from Uniform(0, 1).
pub fn ks_uniform(mut p: Vec<f64>) -> f64 {
    p.sort_by(f64::total_cmp);
    let n = p.len() as f64;
    p.iter()
        .enumerate()
        .map(|(i, &x)| ((i as f64 + 1.0) / n - x).max(x - i as f64 / n))
        .fold(0.0, f64::max)
}

/// Results table for unit-cube design rows evaluated by `model`, with
/// factors `x1..` on `[0, 1]`.
pub fn results_from_rows(
    doe: doelab::DoeType,
    meta: serde_json::Map<String, Value>,
    rows: &[Vec<f64>],
    metric_names: &[&str],
    model: impl Fn(&[f64]) -> Vec<f64>,
) -> RunResults {
    use doelab::ingest::RunRow;
    use doelab::{FactorDomain, FactorSpec};
    let k = rows.first().map_or(0, Vec::len);
    let factors: Vec<FactorSpec> = (1..=k)
        .map(|i| FactorSpec::new("m", format!("x{i}"), FactorDomain::Interval { lo: 0.0, hi: 1.0 }))
        .collect();
    RunResults {
        doe_type: doe,
        factor_names: factors.iter().map(FactorSpec::name).collect(),
        factors,
        metric_names: metric_names.iter().map(|s| s.to_string()).collect(),
        design_meta: meta,
        rows: rows
            .iter()
            .enumerate()
            .map(|(i, x)| RunRow {
                run_id: format!("r{i}"),
                sample_index: i,
                replicate: 0,
                factors: x.clone(),
                metrics: model(x),
            })
            .collect(),
    }
}
