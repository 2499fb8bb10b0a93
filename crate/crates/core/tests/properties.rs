mod common;

use doelab::analysis::{fit_metamodel, predict_metamodel, GpConfig};
use doelab::config::{from_value, Distribution};
use doelab::ingest::{join_and_filter, RawRow};
use doelab::sampling::{efast_design, lhs_points, saltelli_design, sobol_points, unit_to_real};
use doelab::statlib::{f_cdf, reg_incomplete_beta};
use doelab::toymodels::{run_experiment, toy_hess, ToyHessParams, ToyModel};
use doelab::{generate_recipes, parse_scenario_config, FactorDomain};
use proptest::prelude::*;
use serde_json::{json, Value};

fn interval() -> impl Strategy<Value = (f64, f64)> {
    (-1e3..1e3f64, 1e-3..1e3f64).prop_map(|(lo, w)| (lo, lo + w))
}

fn domain() -> impl Strategy<Value = Value> {
    prop_oneof![
        interval().prop_map(|(lo, hi)| json!([lo, hi])),
        prop::collection::btree_set(-50i64..50, 1..5).prop_map(|v| json!({ "discrete": v })),
        (-10.0..10.0f64, 0.1..5.0f64)
            .prop_map(|(m, s)| json!({ "distribution": { "type": "normal", "mean": m, "std": s } })),
        (interval(), 0.0..1.0f64).prop_map(|((lo, hi), t)| {
            json!({ "distribution": { "type": "triangular", "lo": lo, "mode": lo + t * (hi - lo), "hi": hi } })
        }),
    ]
}

fn document() -> impl Strategy<Value = Value> {
    (
        prop::sample::select(vec!["sobol", "LHS", "extreme_points", "OAT", "distribution_and_discrete"]),
        1u64..200,
        prop::collection::vec(domain(), 1..5),
        any::<u32>(),
        prop::option::of(1u64..6),
        prop::option::of(1u64..4),
    )
        .prop_map(|(doe, samples, domains, seed, n_pp, n_r)| {
            let params: serde_json::Map<String, Value> =
                (0..domains.len()).map(|i| (format!("p{i}"), json!(1.5))).collect();
            let vars: serde_json::Map<String, Value> =
                domains.into_iter().enumerate().map(|(i, d)| (format!("p{i}"), d)).collect();
            let mut doc = json!({
                "samples": samples,
                "doe_type": doe,
                "seed": seed,
                "basic_conf": { "scenario_name": "prop", "step_size": 60 },
                "entities_parameters": { "unit": params, "other": { "flag": true } },
                "variations_dict": { "unit": vars },
                "target_metrics": ["a", "b"]
            });
            if let Some(n) = n_pp {
                doc["replication"] = json!({ "n_pp": n });
            }
            if let Some(n) = n_r {
                doc["blocking"] = json!({ "n_r": n, "reset_parameters": { "other": { "flag": false } } });
            }
            doc
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_round_trips(doc in document()) {
        let cfg = from_value(&doc).unwrap();
        let again = parse_scenario_config(&cfg.to_json().to_string()).unwrap();
        prop_assert_eq!(cfg, again);
    }

    #[test]
    fn parse_never_panics(doc in any::<Vec<u8>>()) {
        let text = String::from_utf8_lossy(&doc);
        let _ = parse_scenario_config(&text);
    }

    #[test]
    fn parse_is_total_over_json_shapes(
        samples in prop_oneof![Just(json!(-1)), Just(json!("x")), Just(json!(3.5)), Just(json!(8))],
        vars in prop_oneof![Just(json!([])), Just(json!({"e": {"p": [1]}})), Just(json!({"e": {"p": {"discrete": []}}}))],
    ) {
        let doc = json!({ "samples": samples, "doe_type": "sobol", "variations_dict": vars, "target_metrics": ["y"] });
        let _ = from_value(&doc);
    }

    #[test]
    fn recipe_count_law(samples in 1u64..120, n_pp in 1u64..6, n_r in prop::option::of(1u64..5)) {
        let mut doc: Value = serde_json::from_str(&common::scenario("LHS", samples, 2, 0.0, 1.0, 3)).unwrap();
        doc["replication"] = json!({ "n_pp": n_pp });
        if let Some(n) = n_r {
            doc["blocking"] = json!({ "n_r": n, "reset_parameters": { "m": { "x1": 0.5 } } });
        }
        let rs = generate_recipes(&from_value(&doc).unwrap()).unwrap();
        let rows = samples;
        let expected = match n_r {
            Some(n) => (rows + rows.div_ceil(n)) * n_pp,
            None => rows * n_pp,
        };
        prop_assert_eq!(rs.recipes.len() as u64, expected);
        prop_assert_eq!(rs.non_reset().count() as u64, rows * n_pp);
    }

    #[test]
    fn join_ignores_row_order(samples in 2u64..40, n_r in 1u64..4, seed in any::<u64>()) {
        let mut doc: Value = serde_json::from_str(&common::scenario("LHS", samples, 3, -1.0, 1.0, 5)).unwrap();
        doc["blocking"] = json!({ "n_r": n_r, "reset_parameters": { "m": { "x1": 0 } } });
        let rs = generate_recipes(&from_value(&doc).unwrap()).unwrap();
        let mut raw: Vec<RawRow> = run_experiment(&rs, ToyModel::Linear, 10).unwrap();
        let (first, _) = join_and_filter(&raw, &rs).unwrap();
        let mut rng = doelab::statlib::Rng::new(seed);
        rng.shuffle(&mut raw);
        let (second, _) = join_and_filter(&raw, &rs).unwrap();
        prop_assert_eq!(&first, &second);
        prop_assert_eq!(first.rows.len() as u64, samples);
    }

    #[test]
    fn sobol_sequence_extends(dim in 1usize..9, n in 1usize..300, extra in 1usize..300) {
        let long = sobol_points(dim, 0, n + extra).unwrap();
        prop_assert_eq!(&sobol_points(dim, 0, n).unwrap()[..], &long[..n]);
        prop_assert_eq!(&sobol_points(dim, n as u64, extra).unwrap()[..], &long[n..]);
    }

    #[test]
    fn lhs_has_one_point_per_stratum(dim in 1usize..8, n in 1usize..200, seed in any::<u64>()) {
        let pts = lhs_points(dim, n, seed);
        prop_assert_eq!(pts.len(), n);
        for d in 0..dim {
            let mut strata: Vec<usize> = pts.iter().map(|p| ((p[d] * n as f64) as usize).min(n - 1)).collect();
            strata.sort_unstable();
            prop_assert_eq!(strata, (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn saltelli_row_count(n in 1usize..64, k in 1usize..10, second in any::<bool>()) {
        let (rows, _) = saltelli_design(n, k, second).unwrap();
        prop_assert_eq!(rows.len(), if second { n * (2 * k + 2) } else { n * (k + 2) });
    }

    #[test]
    fn efast_points_stay_in_unit_cube(half in 32usize..200, k in 2usize..6) {
        let (rows, _) = efast_design(2 * half + 1, k, 4, None).unwrap();
        prop_assert!(rows.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn scaling_is_monotone(u in 0.0..1.0f64, du in 0.0..1.0f64, (lo, hi) in interval(), m in -5.0..5.0f64, s in 0.01..3.0f64, t in 0.0..1.0f64) {
        let v = (u + du).min(1.0);
        let domains = [
            FactorDomain::Interval { lo, hi },
            FactorDomain::Distribution(Distribution::Normal { mean: m, std: s }),
            FactorDomain::Distribution(Distribution::Triangular { lo, mode: lo + t * (hi - lo), hi }),
            FactorDomain::Distribution(Distribution::Uniform { lo, hi }),
        ];
        for d in &domains {
            prop_assert!(unit_to_real(u, d) <= unit_to_real(v, d), "{:?} at {} and {}", d, u, v);
        }
    }

    #[test]
    fn toy_hess_capacities_sum_exactly(rf in 2.0..4.0f64, cf in 0.3..0.7f64, a_sc in 0.1..0.45f64, a_li in 0.1..0.45f64) {
        let p = ToyHessParams::new(rf, cf, a_sc, a_li, 1);
        let c = p.capacities();
        prop_assert_eq!(c[0] + c[1] + c[2], p.p_max_hess);
        prop_assert!(c.iter().all(|&x| x > 0.0));
        let out = toy_hess(&p, 50).unwrap();
        prop_assert!(out.losses_hess >= 0.0 && out.degradation_li >= 0.0);
    }

    #[test]
    fn f_cdf_is_monotone(x in 0.0..20.0f64, dx in 0.0..5.0f64, d1 in 1u32..30, d2 in 1u32..60) {
        prop_assert!(f_cdf(x, d1, d2).unwrap() <= f_cdf(x + dx, d1, d2).unwrap() + 1e-14);
    }

    #[test]
    fn incomplete_beta_is_monotone(x in 0.0..1.0f64, dx in 0.0..1.0f64, a in 0.1..20.0f64, b in 0.1..20.0f64) {
        let y = (x + dx).min(1.0);
        prop_assert!(reg_incomplete_beta(a, b, x).unwrap() <= reg_incomplete_beta(a, b, y).unwrap() + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gp_posterior_variance_below_prior(
        n in 2usize..20,
        seed in any::<u64>(),
        query in prop::collection::vec(prop::collection::vec(-3.0..3.0f64, 2), 1..20),
    ) {
        let x = lhs_points(2, n, seed);
        let y: Vec<f64> = x.iter().map(|p| (4.0 * p[0]).sin() + p[1] * p[1]).collect();
        let m = fit_metamodel(&x, &y, &GpConfig::default()).unwrap();
        let prior_std = m.target_scale * m.signal_variance.sqrt();
        let pred = predict_metamodel(&m, &query).unwrap();
        for s in pred.std {
            prop_assert!(s >= 0.0);
            prop_assert!(s * s <= prior_std * prior_std + 1e-9, "{} > {}", s, prior_std);
        }
    }
}
