//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fail.

mod common;

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::time::Instant;

use doelab::analysis::{
    anova_one_way, efast_indices, fit_metamodel, predict_metamodel, sobol_indices, GpConfig, Analyzer,
};
use doelab::cli::{analyzer_for, run};
use doelab::config::EFAST_HARMONICS;
use doelab::ingest::join_and_filter;
use doelab::sampling::{extreme_points, lhs_points, oat_design, random_unit, saltelli_design, sobol_points};
use doelab::statlib::{f_cdf, Rng};
use doelab::toymodels::{run_experiment, ToyModel, DEFAULT_HORIZON};
use doelab::{generate_recipes, parse_scenario_config, DoeType};

const BOOT: usize = 100;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn scenario_text(name: &str) -> String {
    fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)).unwrap()
}

fn ishigami_campaign(file: &str) -> doelab::RunResults {
    let cfg = parse_scenario_config(&scenario_text(file)).unwrap();
    let rs = generate_recipes(&cfg).unwrap();
    let raw = run_experiment(&rs, ToyModel::Ishigami, DEFAULT_HORIZON).unwrap();
    join_and_filter(&raw, &rs).unwrap().0
}

fn fmt3(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("({})", parts.join(", "))
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn saltelli_counts() -> Outcome {
    let (rows, _) = saltelli_design(512, 4, false).unwrap();
    let cfg = parse_scenario_config(&scenario_text("hess_sobol_indices.json")).unwrap();
    let rs = generate_recipes(&cfg).unwrap();
    let raw = run_experiment(&rs, ToyModel::ToyHess, DEFAULT_HORIZON).unwrap();
    let (rr, _) = join_and_filter(&raw, &rs).unwrap();
    let ok = rows.len() == 3072 && rs.recipes.len() == 23040 && rr.rows.len() == 15360;
    outcome(ok, format!("design rows {}, recipes {}, analyzable rows {}", rows.len(), rs.recipes.len(), rr.rows.len()))
}

fn sobol_oracle() -> Outcome {
    let rr = ishigami_campaign("ishigami_sobol_indices.json");
    let res = sobol_indices(&rr, BOOT, 0).unwrap();
    let s1: Vec<f64> = res.indices.iter().map(|r| r.s1).collect();
    let st: Vec<f64> = res.indices.iter().map(|r| r.st).collect();
    let (o1, ot) = common::ishigami_oracle(7.0, 0.1);
    let (d1, dt) = (max_dev(&s1, &o1), max_dev(&st, &ot));
    outcome(d1 <= 0.05 && dt <= 0.05, format!("S1 {} |dS1| {d1:.4}; ST {} |dST| {dt:.4}", fmt3(&s1), fmt3(&st)))
}

fn efast_oracle() -> Outcome {
    let fast = efast_indices(&ishigami_campaign("ishigami_fast.json"), EFAST_HARMONICS).unwrap();
    let s1: Vec<f64> = fast.iter().map(|r| r.s1).collect();
    let sobol = sobol_indices(&ishigami_campaign("ishigami_sobol_indices.json"), BOOT, 0).unwrap();
    let s1_sobol: Vec<f64> = sobol.indices.iter().map(|r| r.s1).collect();
    let (o1, _) = common::ishigami_oracle(7.0, 0.1);
    let (d, cross) = (max_dev(&s1, &o1), max_dev(&s1, &s1_sobol));
    outcome(d <= 0.07 && cross <= 0.1, format!("S1 {} |dS1| {d:.4}; max |eFAST - Sobol| {cross:.4}", fmt3(&s1)))
}

fn g_function_ordering() -> Outcome {
    let a = [0.0, 1.0, 4.5, 9.0];
    let rr = common::campaign(&common::scenario("sobol_indices", 1024, 4, 0.0, 1.0, 0), |x| {
        x.iter().zip(&a).map(|(xi, ai)| ((4.0 * xi - 2.0).abs() + ai) / (1.0 + ai)).product()
    });
    let st: Vec<f64> = sobol_indices(&rr, BOOT, 0).unwrap().indices.iter().map(|r| r.st).collect();
    let margin = st.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
    outcome(margin >= 0.02, format!("ST {} smallest adjacent margin {margin:.4}", fmt3(&st)))
}

fn anova_exactness() -> Outcome {
    let res = anova_one_way(&[vec![1.0, 2.0, 3.0], vec![2.0, 3.0, 4.0]]).unwrap();
    let oracle = 1.0 - common::f_cdf_by_quadrature(1.5, 1.0, 4.0);
    let median_err = [1, 2, 5, 10].iter().map(|&d| (f_cdf(1.0, d, d).unwrap() - 0.5).abs()).fold(0.0, f64::max);
    let ok = res.f == 1.5 && (res.p - 0.288).abs() <= 1e-3 && (res.p - oracle).abs() <= 1e-6 && median_err <= 1e-10;
    outcome(ok, format!("F {} p {:.6} (quadrature {oracle:.6}); max |F(d,d) cdf(1) - 0.5| {median_err:.1e}", res.f, res.p))
}

fn null_calibration() -> Outcome {
    let mut rng = Rng::new(20_240_601);
    let p: Vec<f64> = (0..1000)
        .map(|_| {
            let groups: Vec<Vec<f64>> = (0..4).map(|_| (0..10).map(|_| rng.normal()).collect()).collect();
            anova_one_way(&groups).unwrap().p
        })
        .collect();
    let rate = p.iter().filter(|&&v| v < 0.05).count() as f64 / 1000.0;
    let ks = common::ks_uniform(p);
    outcome((0.01..=0.09).contains(&rate) && ks < 0.06, format!("rejection rate {rate:.3}, KS {ks:.4}"))
}

fn lhs_stratified(dim: usize, n: usize) -> bool {
    let pts = lhs_points(dim, n, 1);
    (0..dim).all(|d| {
        let mut s: Vec<usize> = pts.iter().map(|p| ((p[d] * n as f64) as usize).min(n - 1)).collect();
        s.sort_unstable();
        s == (0..n).collect::<Vec<_>>()
    })
}

fn sampler_properties() -> Outcome {
    let lhs = lhs_stratified(2, 4) && lhs_stratified(5, 100);
    let sobol = (1..=8).all(|d| {
        let full = sobol_points(d, 0, 4096).unwrap();
        [1usize, 7, 64, 1000, 2048].iter().all(|&n| {
            sobol_points(d, 0, n).unwrap()[..] == full[..n] && sobol_points(d, n as u64, 4096 - n).unwrap()[..] == full[n..]
        })
    });
    let extreme = (1..=10).all(|k| extreme_points(k).unwrap().len() == 1 << k);
    let oat = (1..=12).all(|k| oat_design(k).len() == 2 * k + 1);
    outcome(lhs && sobol && extreme && oat, format!("LHS strata {lhs}, Sobol prefix {sobol}, extreme 2^k {extreme}, OAT 2k+1 {oat}"))
}

fn gp_metamodel() -> Outcome {
    let to_cube = |u: &[f64]| -> Vec<f64> { u.iter().map(|v| -PI + 2.0 * PI * v).collect() };
    let train: Vec<Vec<f64>> = sobol_points(3, 0, 64).unwrap().iter().map(|u| to_cube(u)).collect();
    let y: Vec<f64> = train.iter().map(|x| common::ishigami_fn(x)).collect();
    let model = fit_metamodel(&train, &y, &GpConfig::default()).unwrap();

    let at_train = predict_metamodel(&model, &train).unwrap();
    let interp = max_dev(&at_train.mean, &y);

    let query: Vec<Vec<f64>> = random_unit(3, 2000, 11).iter().map(|u| to_cube(u)).collect();
    let prior_var = model.target_scale * model.target_scale * model.signal_variance;
    let worst = predict_metamodel(&model, &query).unwrap().std.iter().map(|s| s * s - prior_var).fold(f64::MIN, f64::max);

    let test: Vec<Vec<f64>> = random_unit(3, 100, 2024).iter().map(|u| to_cube(u)).collect();
    let truth: Vec<f64> = test.iter().map(|x| common::ishigami_fn(x)).collect();
    let pred = predict_metamodel(&model, &test).unwrap();
    let rmse = (pred.mean.iter().zip(&truth).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / 100.0).sqrt();
    let mean = truth.iter().sum::<f64>() / 100.0;
    let sd = (truth.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / 99.0).sqrt();
    let ok = interp <= 1e-6 && worst <= 1e-9 && rmse <= 0.2 * sd;
    outcome(
        ok,
        format!(
            "interpolation error {interp:.2e}; max posterior - prior variance {worst:.2e}; RMSE {rmse:.3} vs 0.2 * std {:.3} (ratio {:.3})",
            0.2 * sd,
            rmse / sd
        ),
    )
}

fn end_to_end() -> Outcome {
    let dir = tempfile::TempDir::new().unwrap();
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/fig2_sobol.json");
    let (recipes, results) = (dir.path().join("recipes.json"), dir.path().join("results.json"));
    let s = |p: &Path| p.to_str().unwrap().to_string();
    let mut codes = vec![
        run(["doelab", "sample", "--config", &s(&config), "--out", &s(&recipes)]).exit_code,
        run(["doelab", "run-demo", "--recipes", &s(&recipes), "--model", "ishigami", "--out", &s(&results)]).exit_code,
    ];
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let o = run(["doelab", "analyze", "--recipes", &s(&recipes), "--results", &s(&results), "--out", &s(&out), "--seed", "5"]);
        codes.push(o.exit_code);
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(&out)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
            })
            .collect();
        files.sort();
        outputs.push(files);
    }
    let identical = outputs[0] == outputs[1] && !outputs[0].is_empty();
    outcome(
        codes.iter().all(|&c| c == 0) && identical,
        format!("exit codes {codes:?}; {} output files byte-identical across runs: {identical}", outputs[0].len()),
    )
}

fn table_one() -> Outcome {
    let expected = [
        (DoeType::ExtremePoints, Some(Analyzer::Anova)),
        (DoeType::Sobol, Some(Analyzer::MetaModel)),
        (DoeType::Lhs, Some(Analyzer::MetaModel)),
        (DoeType::Oat, Some(Analyzer::Oat)),
        (DoeType::SobolIndices, Some(Analyzer::SobolIndices)),
        (DoeType::Fast, Some(Analyzer::Efast)),
        (DoeType::DistributionAndDiscrete, None),
    ];
    let mapping = expected.iter().all(|(d, a)| Analyzer::for_design(*d) == *a && analyzer_for(*d) == a.map(Analyzer::as_str));

    let dir = tempfile::TempDir::new().unwrap();
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/mixed_domains.json");
    let recipes = dir.path().join("r.json");
    let s = |p: &Path| p.to_str().unwrap().to_string();
    run(["doelab", "sample", "--config", &s(&config), "--out", &s(&recipes)]);
    let o = run([
        "doelab", "analyze", "--recipes", &s(&recipes), "--results", &s(&dir.path().join("missing.json")), "--out", &s(dir.path()),
    ]);
    let refused = o.exit_code == 2 && o.summary.contains("no analyzer implemented");
    outcome(mapping && refused, format!("dispatch table matches: {mapping}; distribution_and_discrete exit {} ({})", o.exit_code, o.summary.trim()))
}

type Criterion = (&'static str, f64, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 Saltelli and campaign counts", 5.0, saltelli_counts),
        ("2 Sobol indices vs Ishigami oracle", 10.0, sobol_oracle),
        ("3 eFAST vs oracle and Sobol", 10.0, efast_oracle),
        ("4 g-function ST ordering", f64::INFINITY, g_function_ordering),
        ("5 ANOVA exactness", f64::INFINITY, anova_exactness),
        ("6 ANOVA null calibration", f64::INFINITY, null_calibration),
        ("7 sampler properties", f64::INFINITY, sampler_properties),
        ("8 GP meta-model", f64::INFINITY, gp_metamodel),
        ("9 end-to-end pipeline", 10.0, end_to_end),
        ("10 design-to-analyzer dispatch", f64::INFINITY, table_one),
    ];
    let mut failed = 0;
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let out = check();
        let secs = start.elapsed().as_secs_f64();
        let ok = out.ok && secs < budget;
        failed += usize::from(!ok);
        let limit = if budget.is_finite() { format!(" (limit {budget} s)") } else { String::new() };
        println!("{} criterion {name}: {} [{secs:.2} s{limit}]", if ok { "PASS" } else { "FAIL" }, out.detail);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
