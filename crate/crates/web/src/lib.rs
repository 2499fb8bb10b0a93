//! Browser bindings for the doelab demo page.
//!
//! Every export returns a JSON string so the page can stay framework-free.
//! The `*_json` functions hold the logic and are callable natively.

use doelab::analysis::{efast_indices, fit_metamodel, sobol_indices, surface_grid, GpConfig};
use doelab::config::EFAST_HARMONICS;
use doelab::ingest::join_and_filter;
use doelab::sampling::{efast_design, lhs_points, random_unit, sobol_points};
use doelab::toymodels::{ishigami, ishigami_indices, run_experiment, ToyModel, DEFAULT_HORIZON};
use doelab::{generate_recipes, parse_scenario_config, FactorDomain, FactorSpec};
use serde_json::{json, Value};
use std::f64::consts::PI;
use wasm_bindgen::prelude::*;

const ISHIGAMI_A: f64 = 7.0;
const ISHIGAMI_B: f64 = 0.1;
const BOOTSTRAP_DRAWS: usize = 100;

fn to_js(r: Result<Value, String>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

/// First two coordinates of `n` points from the named design.
pub fn design_points_json(kind: &str, n: usize, seed: u64) -> Result<Value, String> {
    if n == 0 || n > 4096 {
        return Err(format!("point count must be in 1..=4096, got {n}"));
    }
    let rows = match kind {
        "sobol" => sobol_points(2, 0, n).map_err(|e| e.to_string())?,
        "lhs" => lhs_points(2, n, seed),
        "random" => random_unit(2, n, seed),
        "efast" => {
            let per_curve = if n.is_multiple_of(2) { n + 1 } else { n };
            let (rows, _) = efast_design(per_curve, 2, EFAST_HARMONICS, None).map_err(|e| e.to_string())?;
            rows.into_iter().take(per_curve).collect()
        }
        other => return Err(format!("unknown design kind '{other}'")),
    };
    Ok(json!({ "kind": kind, "points": rows }))
}

#[wasm_bindgen]
pub fn design_points(kind: &str, n: u32, seed: u32) -> Result<String, JsValue> {
    to_js(design_points_json(kind, n as usize, seed as u64))
}

fn ishigami_config(doe_type: &str, samples: usize, seed: u64) -> String {
    json!({
        "samples": samples,
        "doe_type": doe_type,
        "seed": seed,
        "basic_conf": { "scenario_name": "ishigami" },
        "entities_parameters": { "ishigami": { "x1": 0, "x2": 0, "x3": 0 } },
        "variations_dict": { "ishigami": { "x1": [-PI, PI], "x2": [-PI, PI], "x3": [-PI, PI] } },
        "target_metrics": ["y"]
    })
    .to_string()
}

/// Runs a full Ishigami campaign and returns estimated next to analytic indices.
/// `method` is `sobol` (Saltelli base samples) or `efast` (points per curve).
pub fn ishigami_sensitivity_json(method: &str, samples: usize, seed: u64) -> Result<Value, String> {
    let doe_type = match method {
        "sobol" => "sobol_indices",
        "efast" => "fast",
        other => return Err(format!("unknown method '{other}'")),
    };
    let cfg = parse_scenario_config(&ishigami_config(doe_type, samples, seed)).map_err(|e| e.to_string())?;
    let recipes = generate_recipes(&cfg).map_err(|e| e.to_string())?;
    let raw = run_experiment(&recipes, ToyModel::Ishigami, DEFAULT_HORIZON).map_err(|e| e.to_string())?;
    let (results, _) = join_and_filter(&raw, &recipes).map_err(|e| e.to_string())?;

    let (s1, st, s1_conf, st_conf) = if method == "sobol" {
        let a = sobol_indices(&results, BOOTSTRAP_DRAWS, seed).map_err(|e| e.to_string())?;
        let pick = |f: fn(&doelab::analysis::SobolIndexResult) -> f64| a.indices.iter().map(f).collect::<Vec<_>>();
        (pick(|r| r.s1), pick(|r| r.st), Some(pick(|r| r.s1_conf)), Some(pick(|r| r.st_conf)))
    } else {
        let a = efast_indices(&results, EFAST_HARMONICS).map_err(|e| e.to_string())?;
        (a.iter().map(|r| r.s1).collect(), a.iter().map(|r| r.st).collect(), None, None)
    };
    let (exact_s1, exact_st) = ishigami_indices(ISHIGAMI_A, ISHIGAMI_B);
    Ok(json!({
        "method": method,
        "runs": results.rows.len(),
        "factors": ["x1", "x2", "x3"],
        "S1": s1,
        "ST": st,
        "S1_conf": s1_conf,
        "ST_conf": st_conf,
        "analytic_S1": exact_s1,
        "analytic_ST": exact_st,
    }))
}

#[wasm_bindgen]
pub fn ishigami_sensitivity(method: &str, samples: u32, seed: u32) -> Result<String, JsValue> {
    to_js(ishigami_sensitivity_json(method, samples as usize, seed as u64))
}

/// Fits a GP to Ishigami over (x1, x2) with x3 = 0 and returns the predicted
/// surface next to the true function on a `res x res` grid.
pub fn ishigami_surface_json(n_train: usize, res: usize, seed: u64) -> Result<Value, String> {
    if !(2..=256).contains(&n_train) || !(2..=64).contains(&res) {
        return Err("training size must be in 2..=256 and resolution in 2..=64".into());
    }
    let to_real = |u: f64| -PI + 2.0 * PI * u;
    let inputs: Vec<Vec<f64>> =
        lhs_points(2, n_train, seed).into_iter().map(|u| vec![to_real(u[0]), to_real(u[1])]).collect();
    let targets: Vec<f64> = inputs.iter().map(|x| ishigami([x[0], x[1], 0.0], ISHIGAMI_A, ISHIGAMI_B)).collect();
    let model = fit_metamodel(&inputs, &targets, &GpConfig::default()).map_err(|e| e.to_string())?;
    let factors: Vec<FactorSpec> = ["x1", "x2"]
        .iter()
        .map(|p| FactorSpec::new("ishigami", *p, FactorDomain::Interval { lo: -PI, hi: PI }))
        .collect();
    let grid = surface_grid(&model, &factors, 0, 1, res, None).map_err(|e| e.to_string())?;
    let truth: Vec<f64> = grid.iter().map(|p| ishigami([p.x_i, p.x_j, 0.0], ISHIGAMI_A, ISHIGAMI_B)).collect();
    Ok(json!({
        "res": res,
        "lo": -PI,
        "hi": PI,
        "train": inputs,
        "mean": grid.iter().map(|p| p.mean).collect::<Vec<_>>(),
        "std": grid.iter().map(|p| p.std).collect::<Vec<_>>(),
        "truth": truth,
        "length_scales": model.length_scales,
        "signal_variance": model.signal_variance,
    }))
}

#[wasm_bindgen]
pub fn ishigami_surface(n_train: u32, res: u32, seed: u32) -> Result<String, JsValue> {
    to_js(ishigami_surface_json(n_train as usize, res as usize, seed as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn floats(v: &Value) -> Vec<f64> {
        v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
    }

    #[test]
    fn design_points_are_two_dimensional_and_in_range() {
        for kind in ["sobol", "lhs", "random", "efast"] {
            let v = design_points_json(kind, 64, 3).unwrap();
            let pts = v["points"].as_array().unwrap();
            assert!(pts.len() >= 64, "{kind}");
            for p in pts {
                let p = floats(p);
                assert_eq!(p.len(), 2);
                assert!(p.iter().all(|x| (0.0..=1.0).contains(x)));
            }
        }
        assert!(design_points_json("grid", 8, 0).is_err());
        assert!(design_points_json("lhs", 0, 0).is_err());
    }

    #[test]
    fn sobol_demo_tracks_analytic_indices() {
        let v = ishigami_sensitivity_json("sobol", 1024, 7).unwrap();
        for (est, exact) in floats(&v["S1"]).iter().zip(floats(&v["analytic_S1"])) {
            assert!((est - exact).abs() < 0.08, "{est} vs {exact}");
        }
        assert_eq!(floats(&v["S1_conf"]).len(), 3);
    }

    #[test]
    fn efast_demo_tracks_analytic_indices() {
        let v = ishigami_sensitivity_json("efast", 1025, 0).unwrap();
        for (est, exact) in floats(&v["S1"]).iter().zip(floats(&v["analytic_S1"])) {
            assert!((est - exact).abs() < 0.08, "{est} vs {exact}");
        }
        assert!(v["S1_conf"].is_null());
        assert!(ishigami_sensitivity_json("efast", 64, 0).is_err());
    }

    #[test]
    fn surface_has_requested_shape() {
        let v = ishigami_surface_json(40, 12, 1).unwrap();
        assert_eq!(floats(&v["mean"]).len(), 144);
        assert!(floats(&v["std"]).iter().all(|s| *s >= 0.0));
        assert_eq!(v["train"].as_array().unwrap().len(), 40);
        assert!(ishigami_surface_json(1, 12, 1).is_err());
    }
}
