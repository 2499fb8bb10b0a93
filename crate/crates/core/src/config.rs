//! Scenario configuration: the JSON document that drives sampling.
//!
//! The layout follows the classic toolbox file:
//!
//! ```json
//! { "samples": 64,
//!   "doe_type": "sobol",
//!   "basic_conf": { "scenario_name": "test_1", "end": 604800, "step_size": 60 },
//!   "entities_parameters": { "storage_tank": { "INNER_HEIGHT": 7.9 } },
//!   "variations_dict": { "storage_tank": { "INNER_DIAMETER": [1, 8] } },
//!   "target_metrics": ["electricity_balance_mwh"] }
//! ```
//!
//! Optional top-level keys `seed`, `replication` (`{"n_pp": 5}`) and
//! `blocking` (`{"n_r": 2, "reset_parameters": {...}}`) add reproducible
//! seeding and nuisance handling.
//!
//! Variation values: a two-element numeric array is an interval,
//! `{"discrete": [...]}` a discrete set, and
//! `{"distribution": {"type": "normal", "mean": m, "std": s}}` (also
//! `uniform` with `lo`/`hi`, `triangular` with `lo`/`mode`/`hi`) a
//! probability distribution.

use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Ordered `entity -> parameter -> scalar` table.
pub type ParamTable = IndexMap<String, IndexMap<String, Value>>;

/// Harmonics used by the eFAST sampler and analyzer.
pub const EFAST_HARMONICS: usize = 4;

/// Smallest meaningful Saltelli base sample.
pub const SOBOL_INDICES_MIN_SAMPLES: u64 = 1000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("malformed JSON: {0}")]
    MalformedJson(String),
    #[error("schema violation at `{path}`: {reason}")]
    SchemaViolation { path: String, reason: String },
}

fn violation(path: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::SchemaViolation { path: path.into(), reason: reason.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DoeType {
    #[serde(rename = "extreme_points")]
    ExtremePoints,
    #[serde(rename = "sobol")]
    Sobol,
    #[serde(rename = "LHS")]
    Lhs,
    #[serde(rename = "OAT")]
    Oat,
    #[serde(rename = "sobol_indices")]
    SobolIndices,
    #[serde(rename = "fast")]
    Fast,
    #[serde(rename = "distribution_and_discrete")]
    DistributionAndDiscrete,
}

impl DoeType {
    pub const ALL: [DoeType; 7] = [
        DoeType::ExtremePoints,
        DoeType::Sobol,
        DoeType::Lhs,
        DoeType::Oat,
        DoeType::SobolIndices,
        DoeType::Fast,
        DoeType::DistributionAndDiscrete,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DoeType::ExtremePoints => "extreme_points",
            DoeType::Sobol => "sobol",
            DoeType::Lhs => "LHS",
            DoeType::Oat => "OAT",
            DoeType::SobolIndices => "sobol_indices",
            DoeType::Fast => "fast",
            DoeType::DistributionAndDiscrete => "distribution_and_discrete",
        }
    }

    /// Case-sensitive lookup.
    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|d| d.as_str() == s)
    }
}

impl fmt::Display for DoeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    Uniform { lo: f64, hi: f64 },
    Normal { mean: f64, std: f64 },
    Triangular { lo: f64, mode: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum FactorDomain {
    Interval { lo: f64, hi: f64 },
    Discrete { values: Vec<Value> },
    Distribution(Distribution),
}

impl FactorDomain {
    /// JSON form as written in `variations_dict`.
    pub fn to_json(&self) -> Value {
        match self {
            FactorDomain::Interval { lo, hi } => Value::Array(vec![num(*lo), num(*hi)]),
            FactorDomain::Discrete { values } => {
                serde_json::json!({ "discrete": values })
            }
            FactorDomain::Distribution(d) => {
                let inner = match d {
                    Distribution::Uniform { lo, hi } => {
                        serde_json::json!({"type": "uniform", "lo": lo, "hi": hi})
                    }
                    Distribution::Normal { mean, std } => {
                        serde_json::json!({"type": "normal", "mean": mean, "std": std})
                    }
                    Distribution::Triangular { lo, mode, hi } => {
                        serde_json::json!({"type": "triangular", "lo": lo, "mode": mode, "hi": hi})
                    }
                };
                serde_json::json!({ "distribution": inner })
            }
        }
    }

    /// Parse a variation value; `path` is used in error messages.
    pub fn from_json(path: &str, v: &Value) -> Result<Self, ConfigError> {
        match v {
            Value::Array(items) => {
                if items.len() != 2 {
                    return Err(violation(
                        path,
                        "interval must be a two-element numeric array [lo, hi]",
                    ));
                }
                let lo = finite(path, &items[0])?;
                let hi = finite(path, &items[1])?;
                if !(lo < hi) {
                    return Err(violation(path, "interval requires lo < hi"));
                }
                Ok(FactorDomain::Interval { lo, hi })
            }
            Value::Object(obj) if obj.len() == 1 && obj.contains_key("discrete") => {
                let Value::Array(values) = &obj["discrete"] else {
                    return Err(violation(format!("{path}.discrete"), "expected an array"));
                };
                if values.is_empty() {
                    return Err(violation(
                        format!("{path}.discrete"),
                        "discrete set must not be empty",
                    ));
                }
                for (i, val) in values.iter().enumerate() {
                    if !is_scalar(val) {
                        return Err(violation(
                            format!("{path}.discrete[{i}]"),
                            "discrete values must be scalars",
                        ));
                    }
                    if values[..i].iter().any(|prev| scalar_eq(prev, val)) {
                        return Err(violation(
                            format!("{path}.discrete[{i}]"),
                            "duplicate value in discrete set",
                        ));
                    }
                }
                Ok(FactorDomain::Discrete { values: values.clone() })
            }
            Value::Object(obj) if obj.len() == 1 && obj.contains_key("distribution") => {
                let dpath = format!("{path}.distribution");
                let Value::Object(d) = &obj["distribution"] else {
                    return Err(violation(dpath, "expected an object"));
                };
                let kind = d
                    .get("type")
                    .and_then(Value::as_str)
                    .ok_or_else(|| violation(format!("{dpath}.type"), "missing distribution type"))?;
                let field = |name: &str| -> Result<f64, ConfigError> {
                    let p = format!("{dpath}.{name}");
                    d.get(name)
                        .ok_or_else(|| violation(&p, "missing field"))
                        .and_then(|v| finite(&p, v))
                };
                let allowed: &[&str] = match kind {
                    "uniform" => &["type", "lo", "hi"],
                    "normal" => &["type", "mean", "std"],
                    "triangular" => &["type", "lo", "mode", "hi"],
                    other => {
                        return Err(violation(
                            format!("{dpath}.type"),
                            format!("unknown distribution `{other}` (expected uniform, normal, triangular)"),
                        ))
                    }
                };
                if let Some(extra) = d.keys().find(|k| !allowed.contains(&k.as_str())) {
                    return Err(violation(format!("{dpath}.{extra}"), "unknown field"));
                }
                let dist = match kind {
                    "uniform" => {
                        let (lo, hi) = (field("lo")?, field("hi")?);
                        if !(lo < hi) {
                            return Err(violation(dpath, "uniform requires lo < hi"));
                        }
                        Distribution::Uniform { lo, hi }
                    }
                    "normal" => {
                        let (mean, std) = (field("mean")?, field("std")?);
                        if !(std > 0.0) {
                            return Err(violation(dpath, "normal requires std > 0"));
                        }
                        Distribution::Normal { mean, std }
                    }
                    _ => {
                        let (lo, mode, hi) = (field("lo")?, field("mode")?, field("hi")?);
                        if !(lo < hi && lo <= mode && mode <= hi) {
                            return Err(violation(
                                dpath,
                                "triangular requires lo <= mode <= hi and lo < hi",
                            ));
                        }
                        Distribution::Triangular { lo, mode, hi }
                    }
                };
                Ok(FactorDomain::Distribution(dist))
            }
            _ => Err(violation(
                path,
                "expected [lo, hi], {\"discrete\": [...]} or {\"distribution\": {...}}",
            )),
        }
    }

    pub fn is_interval(&self) -> bool {
        matches!(self, FactorDomain::Interval { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorSpec {
    pub entity: String,
    pub param: String,
    pub domain: FactorDomain,
}

impl FactorSpec {
    pub fn new(entity: impl Into<String>, param: impl Into<String>, domain: FactorDomain) -> Self {
        Self { entity: entity.into(), param: param.into(), domain }
    }

    /// Dotted `entity.param` name.
    pub fn name(&self) -> String {
        format!("{}.{}", self.entity, self.param)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Replication {
    pub n_pp: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Blocking {
    pub n_r: u64,
    pub reset_parameters: ParamTable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub samples: u64,
    pub doe_type: DoeType,
    pub basic_conf: Map<String, Value>,
    pub entities_parameters: ParamTable,
    pub variations: Vec<FactorSpec>,
    pub target_metrics: Vec<String>,
    pub seed: u64,
    pub replication: Option<Replication>,
    pub blocking: Option<Blocking>,
}

impl ScenarioConfig {
    pub fn scenario_name(&self) -> &str {
        self.basic_conf
            .get("scenario_name")
            .and_then(Value::as_str)
            .unwrap_or_default()
    }

    pub fn factor_names(&self) -> Vec<String> {
        self.variations.iter().map(FactorSpec::name).collect()
    }

    /// Serialize back to the scenario file layout.
    pub fn to_json(&self) -> Value {
        let mut root = Map::new();
        root.insert("samples".into(), Value::from(self.samples));
        root.insert("doe_type".into(), Value::from(self.doe_type.as_str()));
        root.insert("basic_conf".into(), Value::Object(self.basic_conf.clone()));
        root.insert("entities_parameters".into(), table_to_json(&self.entities_parameters));
        let mut vars: IndexMap<&str, Map<String, Value>> = IndexMap::new();
        for f in &self.variations {
            vars.entry(f.entity.as_str())
                .or_default()
                .insert(f.param.clone(), f.domain.to_json());
        }
        root.insert(
            "variations_dict".into(),
            Value::Object(
                vars.into_iter()
                    .map(|(e, m)| (e.to_string(), Value::Object(m)))
                    .collect(),
            ),
        );
        root.insert("target_metrics".into(), serde_json::json!(self.target_metrics));
        root.insert("seed".into(), Value::from(self.seed));
        if let Some(r) = self.replication {
            root.insert("replication".into(), serde_json::json!({ "n_pp": r.n_pp }));
        }
        if let Some(b) = &self.blocking {
            root.insert(
                "blocking".into(),
                serde_json::json!({
                    "n_r": b.n_r,
                    "reset_parameters": table_to_json(&b.reset_parameters),
                }),
            );
        }
        Value::Object(root)
    }
}

pub(crate) fn table_to_json(t: &ParamTable) -> Value {
    Value::Object(
        t.iter()
            .map(|(e, params)| {
                let inner: Map<String, Value> =
                    params.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
                (e.clone(), Value::Object(inner))
            })
            .collect(),
    )
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn finite(path: &str, v: &Value) -> Result<f64, ConfigError> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(violation(path, "expected a finite number")),
    }
}

pub(crate) fn is_scalar(v: &Value) -> bool {
    matches!(v, Value::Number(_) | Value::String(_) | Value::Bool(_))
}

/// Scalar equality that treats `1` and `1.0` as the same value.
pub(crate) fn scalar_eq(a: &Value, b: &Value) -> bool {
    match (a.as_f64(), b.as_f64()) {
        (Some(x), Some(y)) => x == y,
        _ => a == b,
    }
}

/// Drop commas that directly precede `}` or `]`, outside strings.
pub fn strip_trailing_commas(doc: &str) -> String {
    let chars: Vec<char> = doc.chars().collect();
    let mut out = String::with_capacity(doc.len());
    let mut in_string = false;
    let mut escaped = false;
    for (i, &c) in chars.iter().enumerate() {
        if in_string {
            out.push(c);
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                in_string = false;
            }
            continue;
        }
        match c {
            '"' => {
                in_string = true;
                out.push(c);
            }
            ',' => {
                let next = chars[i + 1..].iter().find(|ch| !ch.is_whitespace());
                if !matches!(next, Some('}') | Some(']')) {
                    out.push(c);
                }
            }
            _ => out.push(c),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JsonMode {
    /// Tolerates trailing commas.
    #[default]
    Lenient,
    Strict,
}

/// Parse a scenario document in lenient mode.
pub fn parse_scenario_config(document: &str) -> Result<ScenarioConfig, ConfigError> {
    parse_scenario_config_with(document, JsonMode::Lenient)
}

pub fn parse_scenario_config_with(
    document: &str,
    mode: JsonMode,
) -> Result<ScenarioConfig, ConfigError> {
    let value: Value = match mode {
        JsonMode::Strict => serde_json::from_str(document),
        JsonMode::Lenient => serde_json::from_str(&strip_trailing_commas(document)),
    }
    .map_err(|e| ConfigError::MalformedJson(e.to_string()))?;
    from_value(&value)
}

const TOP_KEYS: [&str; 9] = [
    "samples",
    "doe_type",
    "basic_conf",
    "entities_parameters",
    "variations_dict",
    "target_metrics",
    "seed",
    "replication",
    "blocking",
];

/// Build a config from an already-parsed JSON value.
pub fn from_value(value: &Value) -> Result<ScenarioConfig, ConfigError> {
    let Value::Object(root) = value else {
        return Err(violation("$", "document must be a JSON object"));
    };
    if let Some(unknown) = root.keys().find(|k| !TOP_KEYS.contains(&k.as_str())) {
        return Err(violation(
            unknown.as_str(),
            "unknown top-level key (extra metadata belongs under basic_conf)",
        ));
    }

    let samples = match root.get("samples") {
        None => return Err(violation("samples", "missing required key")),
        Some(v) => match v.as_u64() {
            Some(n) if n >= 1 => n,
            _ => return Err(violation("samples", "must be a positive integer")),
        },
    };

    let doe_type = match root.get("doe_type") {
        None => return Err(violation("doe_type", "missing required key")),
        Some(Value::String(s)) => DoeType::parse(s).ok_or_else(|| {
            violation(
                "doe_type",
                format!(
                    "unknown doe_type `{s}` (expected one of: {})",
                    DoeType::ALL.map(DoeType::as_str).join(", ")
                ),
            )
        })?,
        Some(_) => return Err(violation("doe_type", "must be a string")),
    };

    let basic_conf = match root.get("basic_conf") {
        None => return Err(violation("basic_conf", "missing required key")),
        Some(Value::Object(m)) => m.clone(),
        Some(_) => return Err(violation("basic_conf", "must be an object")),
    };
    match basic_conf.get("scenario_name") {
        Some(Value::String(s)) if !s.is_empty() => {}
        Some(Value::String(_)) => {
            return Err(violation("basic_conf.scenario_name", "must not be empty"))
        }
        Some(_) => return Err(violation("basic_conf.scenario_name", "must be a string")),
        None => return Err(violation("basic_conf.scenario_name", "missing required key")),
    }
    for key in ["end", "step_size"] {
        if let Some(v) = basic_conf.get(key) {
            if v.as_i64().is_none() {
                return Err(violation(format!("basic_conf.{key}"), "must be an integer (seconds)"));
            }
        }
    }
    if let Some(v) = basic_conf.get("folder_temp_files") {
        if !v.is_string() {
            return Err(violation("basic_conf.folder_temp_files", "must be a path string"));
        }
    }

    let entities_parameters = match root.get("entities_parameters") {
        None => ParamTable::new(),
        Some(v) => parse_table("entities_parameters", v)?,
    };

    let mut variations = Vec::new();
    match root.get("variations_dict") {
        None => return Err(violation("variations_dict", "missing required key")),
        Some(Value::Object(ents)) => {
            for (entity, params) in ents {
                let epath = format!("variations_dict.{entity}");
                let Value::Object(params) = params else {
                    return Err(violation(epath, "must be an object of parameter variations"));
                };
                for (param, dom) in params {
                    let ppath = format!("{epath}.{param}");
                    let domain = FactorDomain::from_json(&ppath, dom)?;
                    let spec = FactorSpec::new(entity.clone(), param.clone(), domain);
                    if variations.iter().any(|f: &FactorSpec| f.name() == spec.name()) {
                        return Err(violation(ppath, "duplicate factor name"));
                    }
                    variations.push(spec);
                }
            }
        }
        Some(_) => return Err(violation("variations_dict", "must be an object")),
    }

    let target_metrics = match root.get("target_metrics") {
        None => return Err(violation("target_metrics", "missing required key")),
        Some(Value::Array(items)) => {
            let mut out: Vec<String> = Vec::with_capacity(items.len());
            for (i, it) in items.iter().enumerate() {
                match it.as_str() {
                    Some(s) if !s.is_empty() => {
                        if out.iter().any(|m| m == s) {
                            return Err(violation(
                                format!("target_metrics[{i}]"),
                                "duplicate metric name",
                            ));
                        }
                        out.push(s.to_string());
                    }
                    _ => {
                        return Err(violation(
                            format!("target_metrics[{i}]"),
                            "must be a nonempty string",
                        ))
                    }
                }
            }
            if out.is_empty() {
                return Err(violation("target_metrics", "must not be empty"));
            }
            out
        }
        Some(_) => return Err(violation("target_metrics", "must be an array of strings")),
    };

    let seed = match root.get("seed") {
        None => 0,
        Some(v) => v
            .as_u64()
            .ok_or_else(|| violation("seed", "must be an unsigned 64-bit integer"))?,
    };

    let replication = match root.get("replication") {
        None => None,
        Some(Value::Object(m)) => {
            if let Some(k) = m.keys().find(|k| k.as_str() != "n_pp") {
                return Err(violation(format!("replication.{k}"), "unknown key"));
            }
            let n_pp = m
                .get("n_pp")
                .and_then(Value::as_u64)
                .filter(|&n| n >= 1)
                .ok_or_else(|| violation("replication.n_pp", "must be a positive integer"))?;
            Some(Replication { n_pp })
        }
        Some(_) => return Err(violation("replication", "must be an object")),
    };

    let blocking = match root.get("blocking") {
        None => None,
        Some(Value::Object(m)) => {
            if let Some(k) = m.keys().find(|k| !matches!(k.as_str(), "n_r" | "reset_parameters")) {
                return Err(violation(format!("blocking.{k}"), "unknown key"));
            }
            let n_r = m
                .get("n_r")
                .and_then(Value::as_u64)
                .filter(|&n| n >= 1)
                .ok_or_else(|| violation("blocking.n_r", "must be a positive integer"))?;
            let reset_parameters = match m.get("reset_parameters") {
                None => ParamTable::new(),
                Some(v) => parse_table("blocking.reset_parameters", v)?,
            };
            Some(Blocking { n_r, reset_parameters })
        }
        Some(_) => return Err(violation("blocking", "must be an object")),
    };

    Ok(ScenarioConfig {
        samples,
        doe_type,
        basic_conf,
        entities_parameters,
        variations,
        target_metrics,
        seed,
        replication,
        blocking,
    })
}

fn parse_table(path: &str, v: &Value) -> Result<ParamTable, ConfigError> {
    let Value::Object(ents) = v else {
        return Err(violation(path, "must be an object of entities"));
    };
    let mut out = ParamTable::new();
    for (entity, params) in ents {
        let epath = format!("{path}.{entity}");
        let Value::Object(params) = params else {
            return Err(violation(epath, "must be an object of parameters"));
        };
        let mut inner = IndexMap::new();
        for (param, val) in params {
            if !is_scalar(val) {
                return Err(violation(format!("{epath}.{param}"), "default must be a scalar"));
            }
            inner.insert(param.clone(), val.clone());
        }
        out.insert(entity.clone(), inner);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warn,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Issue {
    pub severity: Severity,
    pub path: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warn => "warning",
            Severity::Error => "error",
        };
        write!(f, "{sev}: {}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.errors().next().is_some()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Warn)
    }

    fn warn(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.issues.push(Issue { severity: Severity::Warn, path: path.into(), message: message.into() });
    }

    fn error(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.issues.push(Issue { severity: Severity::Error, path: path.into(), message: message.into() });
    }
}

/// Smallest valid eFAST curve length for `m` harmonics: `4 m^2 + 1`.
pub fn efast_min_samples(harmonics: usize) -> u64 {
    4 * (harmonics as u64).pow(2) + 1
}

/// Checks that need the whole config; problems are reported, never raised.
pub fn validate_config(cfg: &ScenarioConfig) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let k = cfg.variations.len();

    if k == 0 {
        rep.error("variations_dict", "no factors to vary");
    }
    for f in &cfg.variations {
        let known = cfg
            .entities_parameters
            .get(&f.entity)
            .is_some_and(|p| p.contains_key(&f.param));
        if !known {
            rep.warn(
                format!("variations_dict.{}.{}", f.entity, f.param),
                "variation-only factor (no default in entities_parameters)",
            );
        }
    }

    match cfg.doe_type {
        DoeType::ExtremePoints => {
            if k > crate::sampling::MAX_EXTREME_FACTORS {
                rep.error(
                    "variations_dict",
                    format!(
                        "extreme_points enumerates 2^k corners; k = {k} exceeds the limit of {}",
                        crate::sampling::MAX_EXTREME_FACTORS
                    ),
                );
            }
        }
        DoeType::Sobol | DoeType::Lhs => {
            if cfg.doe_type == DoeType::Sobol && k > crate::sampling::MAX_SOBOL_DIM {
                rep.error(
                    "variations_dict",
                    format!("sobol sequences support at most {} factors", crate::sampling::MAX_SOBOL_DIM),
                );
            }
        }
        DoeType::Oat | DoeType::DistributionAndDiscrete => {}
        DoeType::SobolIndices => {
            if cfg.samples < SOBOL_INDICES_MIN_SAMPLES {
                rep.warn(
                    "samples",
                    format!(
                        "sample size should be at least {SOBOL_INDICES_MIN_SAMPLES} for meaningful Sobol indices (got {})",
                        cfg.samples
                    ),
                );
            }
            if !cfg.samples.is_power_of_two() {
                rep.warn("samples", "Saltelli base sample is best chosen as a power of two");
            }
            if 2 * k > crate::sampling::MAX_SOBOL_DIM {
                rep.error(
                    "variations_dict",
                    format!(
                        "sobol_indices needs a {}-dimensional Sobol sequence; at most {} factors supported",
                        2 * k,
                        crate::sampling::MAX_SOBOL_DIM / 2
                    ),
                );
            }
        }
        DoeType::Fast => {
            let min = efast_min_samples(EFAST_HARMONICS);
            if cfg.samples < min {
                rep.error(
                    "samples",
                    format!(
                        "eFAST with M={EFAST_HARMONICS} needs at least {min} samples per curve (got {})",
                        cfg.samples
                    ),
                );
            }
            if cfg.samples.is_multiple_of(2) {
                rep.error("samples", "eFAST samples per curve must be odd");
            }
            if k < 2 {
                rep.error("variations_dict", "eFAST needs at least two factors");
            }
        }
    }

    if matches!(cfg.doe_type, DoeType::ExtremePoints | DoeType::Oat) {
        for f in &cfg.variations {
            if matches!(f.domain, FactorDomain::Distribution(Distribution::Normal { .. })) {
                rep.warn(
                    format!("variations_dict.{}.{}", f.entity, f.param),
                    "normal distribution has no finite extremes; quantiles 1e-12 / 1-1e-12 are used",
                );
            }
        }
    }

    if let Some(b) = &cfg.blocking {
        for (entity, params) in &b.reset_parameters {
            for param in params.keys() {
                let known = cfg
                    .entities_parameters
                    .get(entity)
                    .is_some_and(|p| p.contains_key(param))
                    || cfg.variations.iter().any(|f| &f.entity == entity && &f.param == param);
                if !known {
                    rep.warn(
                        format!("blocking.reset_parameters.{entity}.{param}"),
                        "reset parameter is neither a default nor a factor",
                    );
                }
            }
        }
    }

    rep
}
