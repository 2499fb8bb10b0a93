//! Command-line front end.
//!
//! Exit codes: 0 ok, 1 usage, 2 validation, 3 i/o, 4 numeric failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{
    anova_screen, efast_indices, fit_metamodel, manova, oat_effects, response_curve, sobol_indices,
    surface_grid, training_subset, AnalysisError, Analyzer, GpConfig, DEFAULT_ALPHA, MAX_TRAINING_POINTS,
};
use crate::config::{
    parse_scenario_config_with, strip_trailing_commas, validate_config, ConfigError, DoeType, JsonMode,
    ScenarioConfig, EFAST_HARMONICS,
};
use crate::ingest::{join_and_filter, read_results, results_to_json, IngestError, ResultsFormat, RunResults};
use crate::recipes::{generate_recipes, read_recipes, write_recipes, RecipeError, RecipeSet};
use crate::report::{bar_chart_svg, heatmap_svg, surface_csv, to_csv, BarSeries};
use crate::sampling::{design_for, SamplingError};
use crate::toymodels::{run_experiment, ToyModel, ToyModelError, DEFAULT_HORIZON};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

pub const SEED_ENV: &str = "DOELAB_SEED";

pub const OAT_CAVEAT: &str =
    "OAT effects ignore interactions between factors; use them for initial screening only, the results should not be overrated.";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutcome {
    pub exit_code: i32,
    pub artifacts_written: Vec<PathBuf>,
    pub summary: String,
}

impl CommandOutcome {
    fn fail(exit_code: i32, summary: impl Into<String>) -> Self {
        Self { exit_code, artifacts_written: Vec::new(), summary: summary.into() }
    }
}

#[derive(Parser, Debug)]
#[command(name = "doelab", version, about = "Design of experiments and sensitivity analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate the recipe file for a scenario.
    Sample {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Reject trailing commas and other lenient syntax.
        #[arg(long)]
        strict_json: bool,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run recipes through a built-in model.
    RunDemo {
        #[arg(long)]
        recipes: PathBuf,
        /// ishigami | g_function | toy_hess | linear
        #[arg(long)]
        model: String,
        #[arg(long)]
        out: PathBuf,
        /// Time steps per toy_hess run.
        #[arg(long, default_value_t = DEFAULT_HORIZON)]
        horizon: usize,
    },
    /// Join results onto recipes and run the paired analyzer.
    Analyze {
        #[arg(long)]
        recipes: PathBuf,
        #[arg(long)]
        results: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        /// Bootstrap resamples for confidence intervals.
        #[arg(long, default_value_t = 100)]
        boot: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// anova | metamodel | oat | sobol | efast
        #[arg(long)]
        force_analyzer: Option<String>,
        /// Also write SVG charts.
        #[arg(long)]
        svg: bool,
        /// Grid resolution for meta-model surfaces.
        #[arg(long, default_value_t = 21)]
        res: usize,
    },
    /// Meta-model surface over two factors for one metric.
    Surface {
        #[arg(long)]
        recipes: PathBuf,
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        fx: String,
        #[arg(long)]
        fy: String,
        #[arg(long)]
        metric: String,
        #[arg(long, default_value_t = 21)]
        res: usize,
        /// Grid CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Optional heat-map SVG path.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Write the unit-hypercube design of a scenario as CSV.
    DumpDesign {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        strict_json: bool,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(m: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: m.into() }
    }
    fn validation(m: impl Into<String>) -> Self {
        Self { code: EXIT_VALIDATION, message: m.into() }
    }
    fn io(path: &Path, e: std::io::Error) -> Self {
        Self { code: EXIT_IO, message: format!("i/o error on {}: {e}", path.display()) }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::validation(e.to_string())
    }
}

impl From<SamplingError> for Failure {
    fn from(e: SamplingError) -> Self {
        Failure::validation(e.to_string())
    }
}

impl From<RecipeError> for Failure {
    fn from(e: RecipeError) -> Self {
        let code = if matches!(e, RecipeError::Io { .. }) { EXIT_IO } else { EXIT_VALIDATION };
        Failure { code, message: e.to_string() }
    }
}

impl From<IngestError> for Failure {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Io { .. } => Failure { code: EXIT_IO, message: e.to_string() },
            IngestError::Recipe(r) => r.into(),
            other => Failure::validation(other.to_string()),
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        let code = match e {
            AnalysisError::DegenerateGroups(_)
            | AnalysisError::SingularCovariance(_)
            | AnalysisError::ZeroVariance(_)
            | AnalysisError::Numeric(_) => EXIT_NUMERIC,
            _ => EXIT_VALIDATION,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<ToyModelError> for Failure {
    fn from(e: ToyModelError) -> Self {
        match e {
            ToyModelError::Recipe(r) => r.into(),
            other => Failure::validation(other.to_string()),
        }
    }
}

/// Parse `args` (program name first) and execute the command.
pub fn run<I, T>(args: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return CommandOutcome::fail(code, e.render().to_string());
        }
    };
    let mut artifacts = Vec::new();
    let result = match cli.command {
        Command::Sample { config, out, strict_json, seed } => cmd_sample(&config, &out, strict_json, seed, &mut artifacts),
        Command::RunDemo { recipes, model, out, horizon } => cmd_run_demo(&recipes, &model, &out, horizon, &mut artifacts),
        Command::Analyze { recipes, results, out, alpha, boot, seed, force_analyzer, svg, res } => {
            let opts = AnalyzeOptions { alpha, boot, seed, force_analyzer, svg, res };
            cmd_analyze(&recipes, &results, &out, &opts, &mut artifacts)
        }
        Command::Surface { recipes, results, fx, fy, metric, res, out, svg } => {
            cmd_surface(&recipes, &results, &fx, &fy, &metric, res, &out, svg.as_deref(), &mut artifacts)
        }
        Command::DumpDesign { config, out, strict_json } => cmd_dump_design(&config, out.as_deref(), strict_json, &mut artifacts),
    };
    match result {
        Ok(summary) => CommandOutcome { exit_code: EXIT_OK, artifacts_written: artifacts, summary },
        Err(f) => CommandOutcome { exit_code: f.code, artifacts_written: artifacts, summary: format!("error: {}", f.message) },
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn write_text(path: &Path, text: &str, artifacts: &mut Vec<PathBuf>) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Failure::io(path, e))?;
    artifacts.push(path.to_path_buf());
    Ok(())
}

fn env_seed() -> Result<Option<u64>, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::usage(format!("{SEED_ENV} must be an unsigned integer, got `{s}`"))),
        Err(_) => Ok(None),
    }
}

fn load_config(path: &Path, strict: bool, seed: Option<u64>) -> Result<ScenarioConfig, Failure> {
    let doc = read_text(path)?;
    let mode = if strict { JsonMode::Strict } else { JsonMode::Lenient };
    let mut cfg = parse_scenario_config_with(&doc, mode)?;
    let has_seed = serde_json::from_str::<Value>(&strip_trailing_commas(&doc))
        .ok()
        .is_some_and(|v| v.get("seed").is_some());
    match seed {
        Some(s) => cfg.seed = s,
        None if !has_seed => {
            if let Some(s) = env_seed()? {
                cfg.seed = s;
            }
        }
        None => {}
    }
    Ok(cfg)
}

fn validated(cfg: &ScenarioConfig) -> Result<Vec<String>, Failure> {
    let report = validate_config(cfg);
    if report.has_errors() {
        let msgs: Vec<String> = report.errors().map(ToString::to_string).collect();
        return Err(Failure::validation(msgs.join("\n")));
    }
    Ok(report.warnings().map(ToString::to_string).collect())
}

fn cmd_sample(
    config: &Path,
    out: &Path,
    strict: bool,
    seed: Option<u64>,
    artifacts: &mut Vec<PathBuf>,
) -> Result<String, Failure> {
    let cfg = load_config(config, strict, seed)?;
    let mut lines = validated(&cfg)?;
    let rs = generate_recipes(&cfg)?;
    write_recipes(&rs, out)?;
    artifacts.push(out.to_path_buf());
    lines.push(format!(
        "{}: {} design, {} factor(s), {} design rows, {} recipes ({} reset) written to {}",
        rs.scenario_name,
        rs.doe_type,
        rs.factor_names.len(),
        rs.design_rows(),
        rs.recipes.len(),
        rs.reset_count(),
        out.display()
    ));
    Ok(lines.join("\n"))
}

fn cmd_dump_design(config: &Path, out: Option<&Path>, strict: bool, artifacts: &mut Vec<PathBuf>) -> Result<String, Failure> {
    let cfg = load_config(config, strict, None)?;
    validated(&cfg)?;
    let design = design_for(&cfg)?;
    let csv = design.to_csv();
    match out {
        Some(p) => {
            write_text(p, &csv, artifacts)?;
            Ok(format!("{} design rows written to {}", design.n_rows(), p.display()))
        }
        None => Ok(csv.trim_end().to_string()),
    }
}

fn cmd_run_demo(
    recipes: &Path,
    model: &str,
    out: &Path,
    horizon: usize,
    artifacts: &mut Vec<PathBuf>,
) -> Result<String, Failure> {
    let model = ToyModel::parse(model).ok_or_else(|| {
        let names: Vec<&str> = ToyModel::ALL.iter().map(|m| m.as_str()).collect();
        Failure::usage(format!("unknown model `{model}`; expected one of {}", names.join(", ")))
    })?;
    let rs = read_recipes(recipes)?;
    let rows = run_experiment(&rs, model, horizon)?;
    write_text(out, &results_to_json(&rows), artifacts)?;
    Ok(format!("{} result rows from {} written to {}", rows.len(), model.as_str(), out.display()))
}

fn load_results(recipes: &Path, results: &Path) -> Result<(RecipeSet, RunResults, Vec<String>), Failure> {
    let rs = read_recipes(recipes)?;
    let raw = read_results(results, ResultsFormat::from_path(results), &rs.target_metrics)?;
    let (rr, warnings) = join_and_filter(&raw, &rs)?;
    Ok((rs, rr, warnings.into_iter().map(|w| format!("warning: {w}")).collect()))
}

struct AnalyzeOptions {
    alpha: f64,
    boot: usize,
    seed: Option<u64>,
    force_analyzer: Option<String>,
    svg: bool,
    res: usize,
}

#[derive(Serialize)]
struct ManovaCsvRow<'a> {
    factor: &'a str,
    wilks_lambda: f64,
    #[serde(rename = "F_approx")]
    f_approx: f64,
    df1: f64,
    df2: f64,
    p: f64,
    significant: bool,
    metrics_used: String,
}

#[derive(Serialize)]
struct HyperRow<'a> {
    target_metric: &'a str,
    n_train: usize,
    length_scale: f64,
    signal_variance: f64,
    nugget: f64,
    log_marginal_likelihood: f64,
}

/// Replicate-averaged rows, thinned to the meta-model training limit.
fn gp_training_rows(rr: &RunResults, notes: &mut Vec<String>) -> Vec<crate::ingest::RunRow> {
    let avg = rr.averaged_by_sample();
    if avg.len() <= MAX_TRAINING_POINTS {
        return avg;
    }
    notes.push(format!(
        "warning: meta-model trained on {MAX_TRAINING_POINTS} of {} design points spread evenly over the design",
        avg.len()
    ));
    training_subset(avg.len(), MAX_TRAINING_POINTS).into_iter().map(|i| avg[i].clone()).collect()
}

fn file_stem(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.' { c } else { '_' }).collect()
}

fn cmd_analyze(
    recipes: &Path,
    results: &Path,
    out: &Path,
    opts: &AnalyzeOptions,
    artifacts: &mut Vec<PathBuf>,
) -> Result<String, Failure> {
    if !(opts.alpha > 0.0 && opts.alpha < 1.0) {
        return Err(Failure::usage(format!("--alpha must lie in (0, 1), got {}", opts.alpha)));
    }
    let analyzer = match &opts.force_analyzer {
        Some(name) => Analyzer::parse(name).ok_or_else(|| {
            let names: Vec<&str> = Analyzer::ALL.iter().map(|a| a.as_str()).collect();
            Failure::usage(format!("unknown analyzer `{name}`; expected one of {}", names.join(", ")))
        })?,
        None => {
            // Checked before reading results so the message does not depend on them.
            let rs = read_recipes(recipes)?;
            Analyzer::for_design(rs.doe_type).ok_or_else(|| {
                Failure::validation(format!("no analyzer implemented for doe_type {}", rs.doe_type))
            })?
        }
    };
    let (rs, rr, mut notes) = load_results(recipes, results)?;
    let seed = match opts.seed {
        Some(s) => s,
        None => env_seed()?.unwrap_or(rs.seed),
    };
    let mut outputs: Vec<String> = Vec::new();
    let mut emit = |name: String, text: &str, artifacts: &mut Vec<PathBuf>| -> Result<(), Failure> {
        write_text(&out.join(&name), text, artifacts)?;
        outputs.push(name);
        Ok(())
    };
    let mut caveat = None;
    let details: Value = match analyzer {
        Analyzer::Anova => {
            let rows = anova_screen(&rr, opts.alpha)?;
            emit("anova.csv".into(), &to_csv(&rows), artifacts)?;
            let mut manovas = Vec::new();
            if rr.metric_names.len() >= 2 {
                for f in &rr.factor_names {
                    manovas.push(manova(&rr, f, opts.alpha)?);
                }
                let flat: Vec<ManovaCsvRow> = manovas
                    .iter()
                    .map(|m| ManovaCsvRow {
                        factor: &m.factor,
                        wilks_lambda: m.wilks_lambda,
                        f_approx: m.f_approx,
                        df1: m.df1,
                        df2: m.df2,
                        p: m.p,
                        significant: m.significant,
                        metrics_used: m.metrics_used.join(";"),
                    })
                    .collect();
                emit("manova.csv".into(), &to_csv(&flat), artifacts)?;
            }
            json!({"alpha": opts.alpha, "anova": rows, "manova": manovas})
        }
        Analyzer::Oat => {
            let eff = oat_effects(&rr)?;
            emit("oat_effects.csv".into(), &to_csv(&eff), artifacts)?;
            if opts.svg {
                for metric in &rr.metric_names {
                    let block: Vec<_> = eff.iter().filter(|e| &e.target_metric == metric).collect();
                    let labels: Vec<String> = block.iter().map(|e| e.factor.clone()).collect();
                    let svg = bar_chart_svg(
                        &format!("OAT effects on {metric}"),
                        &labels,
                        &[
                            BarSeries { name: "low", values: block.iter().map(|e| e.effect_low).collect(), errors: None },
                            BarSeries { name: "high", values: block.iter().map(|e| e.effect_high).collect(), errors: None },
                        ],
                    );
                    emit(format!("oat_{}.svg", file_stem(metric)), &svg, artifacts)?;
                }
            }
            caveat = Some(OAT_CAVEAT);
            json!({"effects": eff})
        }
        Analyzer::SobolIndices => {
            let res = sobol_indices(&rr, opts.boot, seed)?;
            emit("sobol_indices.csv".into(), &to_csv(&res.indices), artifacts)?;
            if opts.svg {
                for metric in &rr.metric_names {
                    let block: Vec<_> = res.indices.iter().filter(|r| &r.target_metric == metric).collect();
                    let labels: Vec<String> = block.iter().map(|r| r.factor.clone()).collect();
                    let svg = bar_chart_svg(
                        &format!("Sobol indices for {metric}"),
                        &labels,
                        &[
                            BarSeries {
                                name: "S1",
                                values: block.iter().map(|r| r.s1).collect(),
                                errors: Some(block.iter().map(|r| r.s1_conf).collect()),
                            },
                            BarSeries {
                                name: "ST",
                                values: block.iter().map(|r| r.st).collect(),
                                errors: Some(block.iter().map(|r| r.st_conf).collect()),
                            },
                        ],
                    );
                    emit(format!("sobol_{}.svg", file_stem(metric)), &svg, artifacts)?;
                }
            }
            notes.extend(res.warnings.iter().map(|w| format!("warning: {w}")));
            json!({"n_boot": opts.boot, "seed": seed, "indices": res.indices})
        }
        Analyzer::Efast => {
            let res = efast_indices(&rr, EFAST_HARMONICS)?;
            emit("efast_indices.csv".into(), &to_csv(&res), artifacts)?;
            if opts.svg {
                for metric in &rr.metric_names {
                    let block: Vec<_> = res.iter().filter(|r| &r.target_metric == metric).collect();
                    let labels: Vec<String> = block.iter().map(|r| r.factor.clone()).collect();
                    let svg = bar_chart_svg(
                        &format!("eFAST indices for {metric}"),
                        &labels,
                        &[
                            BarSeries { name: "S1", values: block.iter().map(|r| r.s1).collect(), errors: None },
                            BarSeries { name: "ST", values: block.iter().map(|r| r.st).collect(), errors: None },
                        ],
                    );
                    emit(format!("efast_{}.svg", file_stem(metric)), &svg, artifacts)?;
                }
            }
            json!({"harmonics": EFAST_HARMONICS, "indices": res})
        }
        Analyzer::MetaModel => {
            if opts.res < 2 {
                return Err(Failure::usage("--res must be at least 2"));
            }
            let avg = gp_training_rows(&rr, &mut notes);
            let inputs: Vec<Vec<f64>> = avg.iter().map(|r| r.factors.clone()).collect();
            let intervals: Vec<usize> = (0..rr.factors.len()).filter(|&i| rr.factors[i].domain.is_interval()).collect();
            let mut hyper = Vec::new();
            for (m, metric) in rr.metric_names.iter().enumerate() {
                let targets: Vec<f64> = avg.iter().map(|r| r.metrics[m]).collect();
                let model = fit_metamodel(&inputs, &targets, &GpConfig::default())?;
                hyper.push(HyperRow {
                    target_metric: metric,
                    n_train: inputs.len(),
                    length_scale: model.length_scales[0],
                    signal_variance: model.signal_variance,
                    nugget: model.nugget,
                    log_marginal_likelihood: model.log_marginal_likelihood,
                });
                let stem = file_stem(metric);
                match intervals.as_slice() {
                    [fi, fj, ..] => {
                        let grid = surface_grid(&model, &rr.factors, *fi, *fj, opts.res, None)?;
                        let (nx, ny) = (&rr.factor_names[*fi], &rr.factor_names[*fj]);
                        emit(format!("surface_{stem}.csv"), &surface_csv(nx, Some(ny), &grid), artifacts)?;
                        if opts.svg {
                            let svg = heatmap_svg(&format!("{metric} meta-model mean"), nx, ny, &grid, opts.res);
                            emit(format!("surface_{stem}.svg"), &svg, artifacts)?;
                        }
                    }
                    [fi] => {
                        let curve = response_curve(&model, &rr.factors, *fi, opts.res, None)?;
                        emit(format!("curve_{stem}.csv"), &surface_csv(&rr.factor_names[*fi], None, &curve), artifacts)?;
                    }
                    [] => notes.push("warning: no interval factors; surface export skipped".into()),
                }
            }
            emit("metamodel_hyperparameters.csv".into(), &to_csv(&hyper), artifacts)?;
            json!({"hyperparameters": hyper})
        }
    };

    let mut summary = json!({
        "scenario_name": rs.scenario_name,
        "doe_type": rs.doe_type.as_str(),
        "analyzer": analyzer.as_str(),
        "runs_analyzed": rr.rows.len(),
        "factors": rr.factor_names,
        "metrics": rr.metric_names,
        "warnings": notes,
        "outputs": outputs,
        "results": details,
    });
    if let Some(c) = caveat {
        summary["caveat"] = Value::from(c);
    }
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
    write_text(&out.join("summary.json"), &text, artifacts)?;

    let mut lines = notes;
    if let Some(c) = caveat {
        lines.push(format!("note: {c}"));
    }
    lines.push(format!(
        "{} analysis of {} runs ({} design) written to {}",
        analyzer,
        rr.rows.len(),
        rs.doe_type,
        out.display()
    ));
    Ok(lines.join("\n"))
}

#[allow(clippy::too_many_arguments)]
fn cmd_surface(
    recipes: &Path,
    results: &Path,
    fx: &str,
    fy: &str,
    metric: &str,
    res: usize,
    out: &Path,
    svg: Option<&Path>,
    artifacts: &mut Vec<PathBuf>,
) -> Result<String, Failure> {
    if fx == fy {
        return Err(Failure::usage("--fx and --fy must name different factors"));
    }
    if res < 2 {
        return Err(Failure::usage("--res must be at least 2"));
    }
    let (_, rr, mut notes) = load_results(recipes, results)?;
    let lookup = |name: &str| rr.factor_index(name).ok_or_else(|| Failure::usage(format!("unknown factor `{name}`")));
    let (fi, fj) = (lookup(fx)?, lookup(fy)?);
    let m = rr.metric_index(metric).ok_or_else(|| Failure::usage(format!("unknown metric `{metric}`")))?;
    let avg = gp_training_rows(&rr, &mut notes);
    let inputs: Vec<Vec<f64>> = avg.iter().map(|r| r.factors.clone()).collect();
    let targets: Vec<f64> = avg.iter().map(|r| r.metrics[m]).collect();
    let model = fit_metamodel(&inputs, &targets, &GpConfig::default())?;
    let grid = surface_grid(&model, &rr.factors, fi, fj, res, None)?;
    write_text(out, &surface_csv(fx, Some(fy), &grid), artifacts)?;
    if let Some(p) = svg {
        write_text(p, &heatmap_svg(&format!("{metric} meta-model mean"), fx, fy, &grid, res), artifacts)?;
    }
    let mut lines = notes;
    lines.push(format!("{}-point surface of {metric} over ({fx}, {fy}) written to {}", grid.len(), out.display()));
    Ok(lines.join("\n"))
}

/// Table I analyzer name for a design type, or `None` where not implemented.
pub fn analyzer_for(doe: DoeType) -> Option<&'static str> {
    Analyzer::for_design(doe).map(Analyzer::as_str)
}
