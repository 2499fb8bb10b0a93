//! Recipe generation: defaults merged with sampled factor values, plus
//! reset blocking and nuisance replication, and the recipe file format.
//!
//! The file is the only contract with the external experiment process:
//!
//! ```json
//! { "format_version": 1, "scenario_name": "test_1", "doe_type": "sobol", "seed": 0,
//!   "factor_names": ["storage_tank.INNER_DIAMETER"],
//!   "target_metrics": ["electricity_balance_mwh"],
//!   "design_meta": { "factor_domains": {...}, ... },
//!   "recipes": [ { "run_id": "test_1_0000", "sample_index": 0, "replicate": 0,
//!                  "is_reset": false, "parameters": {...}, "basic_conf": {...} } ] }
//! ```

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::config::{
    validate_config, ConfigError, DoeType, FactorDomain, FactorSpec, Issue, ParamTable,
    ScenarioConfig,
};
use crate::sampling::{design_for, scale_to_domain, scale_value, SamplingError};

pub const RECIPE_FORMAT_VERSION: u32 = 1;

/// Entity holding injected nuisance selectors in recipe parameters.
pub const NUISANCE_ENTITY: &str = "__nuisance";
/// Replicate selector parameter name.
pub const REPLICATE_PARAM: &str = "__replicate";

#[derive(Debug, thiserror::Error)]
pub enum RecipeError {
    #[error("configuration has errors: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Validation(Vec<Issue>),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed recipe file: {0}")]
    MalformedRecipeFile(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recipe {
    pub run_id: String,
    /// Design row, or -1 for reset runs.
    pub sample_index: i64,
    pub replicate: u64,
    pub is_reset: bool,
    pub parameters: ParamTable,
    pub basic_conf: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecipeSet {
    pub format_version: u32,
    pub scenario_name: String,
    pub doe_type: DoeType,
    pub seed: u64,
    pub factor_names: Vec<String>,
    pub target_metrics: Vec<String>,
    pub design_meta: Map<String, Value>,
    pub recipes: Vec<Recipe>,
}

impl RecipeSet {
    pub fn non_reset(&self) -> impl Iterator<Item = &Recipe> {
        self.recipes.iter().filter(|r| !r.is_reset)
    }

    pub fn reset_count(&self) -> usize {
        self.recipes.iter().filter(|r| r.is_reset).count()
    }

    /// Factor specs recovered from `design_meta.factor_domains`.
    pub fn factor_specs(&self) -> Result<Vec<FactorSpec>, RecipeError> {
        let doms = self
            .design_meta
            .get("factor_domains")
            .and_then(Value::as_object)
            .ok_or_else(|| {
                RecipeError::MalformedRecipeFile("design_meta.factor_domains missing".into())
            })?;
        self.factor_names
            .iter()
            .map(|name| {
                let v = doms.get(name).ok_or_else(|| {
                    RecipeError::MalformedRecipeFile(format!("no domain recorded for factor {name}"))
                })?;
                let domain = FactorDomain::from_json(name, v).map_err(config_to_malformed)?;
                let (entity, param) = split_factor_name(name, &self.recipes).ok_or_else(|| {
                    RecipeError::MalformedRecipeFile(format!("cannot locate factor {name} in parameters"))
                })?;
                Ok(FactorSpec::new(entity, param, domain))
            })
            .collect()
    }

    /// Number of base design rows before blocking and replication.
    pub fn design_rows(&self) -> usize {
        self.design_meta
            .get("design_rows")
            .and_then(Value::as_u64)
            .map_or_else(
                || {
                    self.non_reset()
                        .map(|r| r.sample_index)
                        .max()
                        .map_or(0, |m| m as usize + 1)
                },
                |n| n as usize,
            )
    }

    /// Reassign `run_id`s from position: `<scenario>_<zero-padded index>`.
    pub fn renumber(&mut self) {
        let total = self.recipes.len();
        let width = total.saturating_sub(1).to_string().len().max(4);
        for (i, r) in self.recipes.iter_mut().enumerate() {
            r.run_id = format!("{}_{:0width$}", self.scenario_name, i, width = width);
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("recipe set serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self, RecipeError> {
        let rs: RecipeSet = serde_json::from_str(text)
            .map_err(|e| RecipeError::MalformedRecipeFile(e.to_string()))?;
        if rs.format_version != RECIPE_FORMAT_VERSION {
            return Err(RecipeError::MalformedRecipeFile(format!(
                "unsupported format_version {} (expected {RECIPE_FORMAT_VERSION})",
                rs.format_version
            )));
        }
        let mut seen = HashSet::with_capacity(rs.recipes.len());
        for r in &rs.recipes {
            if !seen.insert(r.run_id.as_str()) {
                return Err(RecipeError::MalformedRecipeFile(format!(
                    "duplicate run_id {}",
                    r.run_id
                )));
            }
            if r.is_reset != (r.sample_index < 0) {
                return Err(RecipeError::MalformedRecipeFile(format!(
                    "run {}: reset runs must have sample_index -1 and real runs a row index",
                    r.run_id
                )));
            }
        }
        Ok(rs)
    }
}

fn config_to_malformed(e: ConfigError) -> RecipeError {
    RecipeError::MalformedRecipeFile(e.to_string())
}

/// Find the `entity.param` split of a dotted factor name that exists in the
/// recipe parameters (entity names may themselves contain dots).
fn split_factor_name(name: &str, recipes: &[Recipe]) -> Option<(String, String)> {
    let first = recipes.iter().find(|r| !r.is_reset).or_else(|| recipes.first());
    let candidates: Vec<(&str, &str)> = name
        .match_indices('.')
        .map(|(i, _)| (&name[..i], &name[i + 1..]))
        .collect();
    if let Some(r) = first {
        for (e, p) in &candidates {
            if r.parameters.get(*e).is_some_and(|m| m.contains_key(*p)) {
                return Some((e.to_string(), p.to_string()));
            }
        }
    }
    candidates.first().map(|(e, p)| (e.to_string(), p.to_string()))
}

/// Look up a factor value in a parameter table.
pub fn factor_value<'a>(params: &'a ParamTable, factor: &FactorSpec) -> Option<&'a Value> {
    params.get(&factor.entity).and_then(|m| m.get(&factor.param))
}

fn overlay(base: &mut ParamTable, top: &ParamTable) {
    for (entity, params) in top {
        let slot = base.entry(entity.clone()).or_default();
        for (k, v) in params {
            slot.insert(k.clone(), v.clone());
        }
    }
}

/// Parameter table used by reset runs: defaults, factors at their domain
/// centre, then the configured reset overlay.
pub fn reset_parameter_table(cfg: &ScenarioConfig) -> ParamTable {
    let mut params = cfg.entities_parameters.clone();
    for f in &cfg.variations {
        let known = params.get(&f.entity).is_some_and(|m| m.contains_key(&f.param));
        if !known {
            params
                .entry(f.entity.clone())
                .or_default()
                .insert(f.param.clone(), scale_value(0.5, &f.domain));
        }
    }
    if let Some(b) = &cfg.blocking {
        overlay(&mut params, &b.reset_parameters);
    }
    params
}

/// Build the full recipe set for a validated configuration.
pub fn generate_recipes(cfg: &ScenarioConfig) -> Result<RecipeSet, RecipeError> {
    let report = validate_config(cfg);
    if report.has_errors() {
        return Err(RecipeError::Validation(report.errors().cloned().collect()));
    }
    let design = design_for(cfg)?;
    let scaled = scale_to_domain(&design, &cfg.variations)?;

    let mut meta = design.meta.clone();
    meta.insert("base_samples".into(), Value::from(design.base_samples));
    meta.insert("design_rows".into(), Value::from(design.n_rows()));
    meta.insert(
        "factor_domains".into(),
        Value::Object(
            cfg.variations
                .iter()
                .map(|f| (f.name(), f.domain.to_json()))
                .collect(),
        ),
    );
    if let Some(r) = cfg.replication {
        meta.insert("n_pp".into(), Value::from(r.n_pp));
    }
    if let Some(b) = &cfg.blocking {
        meta.insert("n_r".into(), Value::from(b.n_r));
    }

    let recipes = scaled
        .into_iter()
        .enumerate()
        .map(|(j, row)| {
            let mut params = cfg.entities_parameters.clone();
            for (f, v) in cfg.variations.iter().zip(row) {
                params.entry(f.entity.clone()).or_default().insert(f.param.clone(), v);
            }
            Recipe {
                run_id: String::new(),
                sample_index: j as i64,
                replicate: 0,
                is_reset: false,
                parameters: params,
                basic_conf: cfg.basic_conf.clone(),
            }
        })
        .collect();

    let mut rs = RecipeSet {
        format_version: RECIPE_FORMAT_VERSION,
        scenario_name: cfg.scenario_name().to_string(),
        doe_type: cfg.doe_type,
        seed: cfg.seed,
        factor_names: cfg.factor_names(),
        target_metrics: cfg.target_metrics.clone(),
        design_meta: meta,
        recipes,
    };
    // Blocking precedes replication: (rows + ceil(rows / n_R)) * n_PP runs.
    if let Some(b) = &cfg.blocking {
        rs = insert_reset_blocks(rs, b.n_r, &reset_parameter_table(cfg));
    }
    if let Some(r) = cfg.replication {
        rs = apply_replication(rs, r.n_pp);
    }
    rs.renumber();
    Ok(rs)
}

/// Repeat every recipe `n_pp` times, replicates of one recipe contiguous.
///
/// For `n_pp > 1` each non-reset copy carries `__nuisance.__replicate = r` so the
/// external process can pick its nuisance realization.
pub fn apply_replication(mut rs: RecipeSet, n_pp: u64) -> RecipeSet {
    assert!(n_pp >= 1, "n_pp must be at least 1");
    if n_pp == 1 {
        for r in &mut rs.recipes {
            r.replicate = 0;
        }
        return rs;
    }
    let mut out = Vec::with_capacity(rs.recipes.len() * n_pp as usize);
    for recipe in rs.recipes {
        for rep in 0..n_pp {
            let mut r = recipe.clone();
            r.replicate = rep;
            if !r.is_reset {
                r.parameters
                    .entry(NUISANCE_ENTITY.to_string())
                    .or_default()
                    .insert(REPLICATE_PARAM.to_string(), Value::from(rep));
            }
            out.push(r);
        }
    }
    rs.recipes = out;
    rs.renumber();
    rs
}

/// Insert a reset run before every `n_r`-th non-reset run (ordinal 0, n_r, ...).
pub fn insert_reset_blocks(mut rs: RecipeSet, n_r: u64, reset_parameters: &ParamTable) -> RecipeSet {
    assert!(n_r >= 1, "n_r must be at least 1");
    let basic_conf = rs.recipes.first().map(|r| r.basic_conf.clone()).unwrap_or_default();
    let mut out = Vec::with_capacity(rs.recipes.len() + rs.recipes.len() / n_r as usize + 1);
    let mut ordinal = 0u64;
    for recipe in rs.recipes {
        if !recipe.is_reset {
            if ordinal.is_multiple_of(n_r) {
                out.push(Recipe {
                    run_id: String::new(),
                    sample_index: -1,
                    replicate: recipe.replicate,
                    is_reset: true,
                    parameters: reset_parameters.clone(),
                    basic_conf: basic_conf.clone(),
                });
            }
            ordinal += 1;
        }
        out.push(recipe);
    }
    rs.recipes = out;
    rs.renumber();
    rs
}

pub fn write_recipes(rs: &RecipeSet, path: &Path) -> Result<(), RecipeError> {
    std::fs::write(path, rs.to_json_string())
        .map_err(|source| RecipeError::Io { path: path.display().to_string(), source })
}

pub fn read_recipes(path: &Path) -> Result<RecipeSet, RecipeError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| RecipeError::Io { path: path.display().to_string(), source })?;
    RecipeSet::from_json_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{parse_scenario_config, Blocking, Replication};

    const FIG2: &str = include_str!("../scenarios/fig2_sobol.json");

    fn small_set(n: usize) -> RecipeSet {
        let doc = format!(
            r#"{{"samples":{n},"doe_type":"LHS","basic_conf":{{"scenario_name":"s"}},
            "entities_parameters":{{"e":{{"p":1,"q":"x"}}}},"variations_dict":{{"e":{{"p":[0,1]}}}},
            "target_metrics":["m"]}}"#
        );
        generate_recipes(&parse_scenario_config(&doc).unwrap()).unwrap()
    }

    #[test]
    fn reference_config_recipes() {
        let cfg = parse_scenario_config(FIG2).unwrap();
        let rs = generate_recipes(&cfg).unwrap();
        assert_eq!(rs.recipes.len(), 64);
        assert_eq!(rs.recipes[0].run_id, "test_1_0000");
        assert_eq!(rs.recipes[63].run_id, "test_1_0063");
        for r in &rs.recipes {
            let tank = &r.parameters["storage_tank"];
            assert_eq!(tank["INNER_HEIGHT"], 7.9);
            assert_eq!(tank["INSULATION_THICKNESS"], 0.1);
            let d = tank["INNER_DIAMETER"].as_f64().unwrap();
            assert!((1.0..=8.0).contains(&d));
            assert_eq!(r.basic_conf["end"], 604800);
        }
    }

    #[test]
    fn extreme_points_single_factor() {
        let mut cfg = parse_scenario_config(FIG2).unwrap();
        cfg.doe_type = DoeType::ExtremePoints;
        let rs = generate_recipes(&cfg).unwrap();
        let d: Vec<f64> = rs
            .recipes
            .iter()
            .map(|r| r.parameters["storage_tank"]["INNER_DIAMETER"].as_f64().unwrap())
            .collect();
        assert_eq!(d, vec![1.0, 8.0]);
    }

    #[test]
    fn replication_counts_and_order() {
        let rs = apply_replication(small_set(10), 5);
        assert_eq!(rs.recipes.len(), 50);
        assert_eq!(rs.recipes[0].sample_index, rs.recipes[4].sample_index);
        assert_eq!(rs.recipes[4].replicate, 4);
        assert_eq!(rs.recipes[3].parameters[NUISANCE_ENTITY][REPLICATE_PARAM], 3);

        let base = small_set(10);
        let same = apply_replication(base.clone(), 1);
        assert_eq!(same, base);
    }

    #[test]
    fn reset_block_counts() {
        let table = ParamTable::new();
        let rs = insert_reset_blocks(small_set(5), 2, &table);
        assert_eq!(rs.recipes.len(), 8);
        assert_eq!(rs.reset_count(), 3);
        let pattern: Vec<bool> = rs.recipes.iter().map(|r| r.is_reset).collect();
        assert_eq!(pattern, [true, false, false, true, false, false, true, false]);
        assert!(rs.recipes.iter().filter(|r| r.is_reset).all(|r| r.sample_index == -1));

        let one = insert_reset_blocks(small_set(5), 9, &table);
        assert_eq!(one.reset_count(), 1);
        assert!(one.recipes[0].is_reset);
    }

    #[test]
    fn saltelli_campaign_counts() {
        let doc = r#"{"samples":512,"doe_type":"sobol_indices","basic_conf":{"scenario_name":"hess"},
            "entities_parameters":{"hess":{"p_max_hess":22.5}},
            "variations_dict":{"hess":{"a_sc":[0.1,0.45],"a_li":[0.1,0.45],"rf":[2,4],"cf":[0.3,0.7]}},
            "target_metrics":["Losses_hess","Degradation_li"],
            "replication":{"n_pp":5},"blocking":{"n_r":2,"reset_parameters":{"hess":{"soc_init":0.5}}}}"#;
        let cfg = parse_scenario_config(doc).unwrap();
        assert_eq!(cfg.replication, Some(Replication { n_pp: 5 }));
        assert!(matches!(cfg.blocking, Some(Blocking { n_r: 2, .. })));
        let rs = generate_recipes(&cfg).unwrap();
        assert_eq!(rs.design_rows(), 3072);
        assert_eq!(rs.recipes.len(), 23040);
        assert_eq!(rs.reset_count(), 1536 * 5);
        assert_eq!(rs.recipes[0].run_id, "hess_00000");
        let reset = rs.recipes.iter().find(|r| r.is_reset).unwrap();
        assert_eq!(reset.parameters["hess"]["soc_init"], 0.5);
        assert_eq!(reset.parameters["hess"]["p_max_hess"], 22.5);
        assert!(reset.parameters["hess"].contains_key("cf"));
    }

    #[test]
    fn validation_errors_propagate() {
        let mut cfg = parse_scenario_config(FIG2).unwrap();
        cfg.doe_type = DoeType::Fast;
        assert!(matches!(generate_recipes(&cfg), Err(RecipeError::Validation(_))));
    }

    #[test]
    fn file_round_trip_and_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("recipes.json");
        let rs = insert_reset_blocks(small_set(5), 2, &ParamTable::new());
        write_recipes(&rs, &path).unwrap();
        assert_eq!(read_recipes(&path).unwrap(), rs);

        let mut dup = rs.clone();
        dup.recipes[1].run_id = dup.recipes[0].run_id.clone();
        std::fs::write(&path, dup.to_json_string()).unwrap();
        assert!(matches!(read_recipes(&path), Err(RecipeError::MalformedRecipeFile(_))));
        assert!(matches!(
            read_recipes(&dir.path().join("missing.json")),
            Err(RecipeError::Io { .. })
        ));
    }

    #[test]
    fn factor_specs_recovered() {
        let rs = generate_recipes(&parse_scenario_config(FIG2).unwrap()).unwrap();
        let specs = rs.factor_specs().unwrap();
        assert_eq!(specs.len(), 1);
        assert_eq!(specs[0].entity, "storage_tank");
        assert_eq!(specs[0].domain, FactorDomain::Interval { lo: 1.0, hi: 8.0 });
    }
}
