//! Design-of-experiments and sensitivity-analysis toolbox.
//!
//! The pipeline has three stages:
//!
//! 1. [`config`] + [`sampling`] + [`recipes`]: a scenario file becomes a
//!    recipe file holding one complete parameterization per run.
//! 2. An external process (or one of the [`toymodels`]) executes the runs
//!    and writes a results file.
//! 3. [`ingest`] joins results back onto recipes and [`analysis`] computes
//!    factor effects with the analyzer paired to the design type.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod cli;
pub mod config;
pub mod ingest;
pub mod recipes;
pub mod report;
pub mod sampling;
pub mod statlib;
pub mod toymodels;

pub use config::{parse_scenario_config, validate_config, DoeType, FactorDomain, FactorSpec, ScenarioConfig};
pub use ingest::RunResults;
pub use recipes::{generate_recipes, Recipe, RecipeSet};
pub use sampling::DesignMatrix;
