use jeffmix::experiments::*;
use jeffmix::fisher::{IntegratorConfig, Scenario};
use jeffmix::mcmc::{
    BlockAcceptance, ChainTrace, DataSummary, DiagnosticsReport, Draw, McmcConfig, PriorMode,
};
use jeffmix::mixture::{simulate, ComponentFamily, MixtureParams};
use proptest::prelude::*;

fn trace_of(draws: Vec<MixtureParams>) -> ChainTrace {
    ChainTrace {
        k: draws[0].k(),
        family: ComponentFamily::Gaussian,
        prior_mode: PriorMode::Hierarchical,
        seed: 0,
        data: DataSummary {
            n: 50,
            mean: 0.0,
            sd: 2.0,
            min: -5.0,
            max: 5.0,
        },
        draws: draws
            .into_iter()
            .map(|params| Draw {
                params,
                hyper: None,
                log_posterior: 0.0,
            })
            .collect(),
        acceptance: BlockAcceptance::default(),
        scale_history: Vec::new(),
        report: DiagnosticsReport::default(),
    }
}

fn mix(w: &[f64], m: &[f64], s: &[f64]) -> MixtureParams {
    MixtureParams::gaussian(w, m, s).unwrap()
}

fn short_mcmc(iterations: usize, burn_in: usize) -> McmcConfig {
    McmcConfig {
        iterations,
        burn_in,
        ..McmcConfig::default()
    }
}

#[test]
fn single_draw_band_collapses() {
    let t = trace_of(vec![mix(&[0.3, 0.7], &[-1.0, 2.0], &[1.0, 0.5])]);
    let grid = linear_grid(-6.0, 6.0, 121);
    let p = predictive_density(&t, &grid).unwrap();
    for i in 0..grid.len() {
        assert_eq!(p.lower[i], p.mean[i]);
        assert_eq!(p.upper[i], p.mean[i]);
    }
    assert_eq!(p.median_band_width(), 0.0);
}

#[test]
fn predictive_mean_integrates_to_one() {
    let draws: Vec<MixtureParams> = (0..40)
        .map(|i| {
            let p = 0.2 + 0.015 * i as f64;
            mix(&[p, 1.0 - p], &[-2.0 + 0.01 * i as f64, 2.0], &[0.8, 1.2])
        })
        .collect();
    let t = trace_of(draws);
    let p = predictive_density(&t, &data_grid(&t, 400)).unwrap();
    assert!((p.mass() - 1.0).abs() < 0.01, "{}", p.mass());
    for i in 0..p.grid.len() {
        assert!(p.lower[i] >= 0.0);
        assert!(p.lower[i] <= p.mean[i] && p.mean[i] <= p.upper[i]);
    }
}

#[test]
fn empty_trace_is_rejected() {
    let mut t = trace_of(vec![mix(&[1.0], &[0.0], &[1.0])]);
    t.draws.clear();
    assert!(predictive_density(&t, &[0.0, 1.0]).is_err());
    assert!(PosteriorSummary::from_trace(&t).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn summary_ignores_labels(
        raw in prop::collection::vec(
            (prop::collection::vec(0.05f64..1.0, 3),
             prop::collection::vec(-5.0f64..5.0, 3),
             prop::collection::vec(0.2f64..3.0, 3)),
            1..20),
        shift in 0usize..3,
    ) {
        let draws: Vec<MixtureParams> = raw
            .iter()
            .map(|(w, m, s)| {
                let z: f64 = w.iter().sum();
                let w: Vec<f64> = w.iter().map(|v| v / z).collect();
                mix(&w, m, s)
            })
            .collect();
        let permuted: Vec<MixtureParams> = draws
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let r = (i + shift) % 3;
                let perm: Vec<usize> = (0..3).map(|l| (l + r) % 3).collect();
                p.permuted(&perm)
            })
            .collect();
        let a = PosteriorSummary::from_trace(&trace_of(draws)).unwrap();
        let b = PosteriorSummary::from_trace(&trace_of(permuted)).unwrap();
        prop_assert_eq!(&a, &b);
        let w = a.mean_weights();
        prop_assert!(w.iter().sum::<f64>() <= 1.0 + 1e-9);
        prop_assert!(w.windows(2).all(|p| p[0] >= p[1]));
    }
}

#[test]
fn tail_row_folds_small_components() {
    let draws = vec![mix(
        &[0.6, 0.35, 0.03, 0.015, 0.005],
        &[0.0, 5.0, 10.0, 15.0, 20.0],
        &[1.0; 5],
    )];
    let s = PosteriorSummary::from_trace(&trace_of(draws)).unwrap();
    assert_eq!(s.detected(), 3);
    assert_eq!(s.displayed().len(), 4);
    let t = s.tail().unwrap();
    assert_eq!(t.components, 1);
    assert!((t.weight - 0.005).abs() < 1e-12);
}

#[test]
fn shape_study_matches_expected_asymmetries() {
    let curves = weights_prior_shape_study(&ShapeConfig::default()).unwrap();
    let by = |label: &str| curves.iter().find(|c| c.label == label).unwrap();
    let sym = by("N(-10,1) vs N(10,1)");
    assert!(sym.max_reflection_error() < 0.01, "{}", sym.max_reflection_error());
    for c in &curves {
        let mass: f64 = c.density.iter().sum::<f64>() / c.grid.len() as f64;
        assert!((mass - 1.0).abs() < 1e-9);
    }
    assert!(by("N(-10,1) vs t1(10,1)").mass_above_half() > 0.5);
    let a1 = by("N(-10,1) vs t1(10,1)").asymmetry();
    let a5 = by("N(-10,1) vs t5(10,1)").asymmetry();
    let a30 = by("N(-10,1) vs t30(10,1)").asymmetry();
    assert!(a1 > a5 && a5 > a30, "{a1} {a5} {a30}");
}

#[test]
fn benchmark_riemann_settles_and_mc_sd_shrinks() {
    let cfg = BenchmarkConfig {
        replications: 40,
        mc_samples: vec![500, 1500],
        ..BenchmarkConfig::default()
    };
    let t = integrator_benchmark(&cfg, 11).unwrap();
    for r in &t.riemann {
        if let jeffmix::fisher::Method::Riemann { points } = r.method {
            if points >= 550 {
                assert!(r.values.iter().all(|v| *v == r.values[0]));
                assert!(r.max_abs_error < 1e-3, "{points}: {}", r.max_abs_error);
            }
        }
    }
    assert!(t.mc_sd(1500).unwrap() <= t.mc_sd(500).unwrap());
}

#[test]
fn mc_variability_shrinks_with_component_scale() {
    let sds: Vec<f64> = [1.0, 0.3, 0.05]
        .iter()
        .map(|&s| {
            let cfg = BenchmarkConfig {
                model: mix(&[0.5, 0.5], &[-1.0, 2.0], &[s, s]),
                scenario: Scenario::weights_only(2),
                mc_samples: vec![500],
                riemann_points: vec![],
                replications: 40,
                reference_rel_tol: 1e-10,
            };
            integrator_benchmark(&cfg, 5).unwrap().mc_sd(500).unwrap()
        })
        .collect();
    assert!(sds[0] > sds[1] && sds[1] > sds[2], "{sds:?}");
}

#[test]
fn study_reruns_are_byte_identical() {
    let cfg = StudyConfig {
        kind: StudyKind::OverfitNull,
        sample_sizes: vec![30],
        replications: 2,
        mcmc: short_mcmc(600, 200),
        seed: 9,
        ..StudyConfig::default()
    };
    let a = run_study(&cfg).unwrap();
    let b = run_study(&cfg).unwrap();
    assert_eq!(
        to_json(a.kind().name(), &a).unwrap(),
        to_json(b.kind().name(), &b).unwrap()
    );
    assert_eq!(to_csv(&a.long_rows()).unwrap(), to_csv(&b.long_rows()).unwrap());
    let StudyResult::OverfitNull(t) = a else {
        panic!("wrong study")
    };
    assert_eq!(t.cells.len(), 2);
    assert_eq!(t.failures(), 0);
}

#[test]
fn overfit_k_records_all_weights_and_predictives() {
    let cfg = StudyConfig {
        kind: StudyKind::OverfitK,
        sample_sizes: vec![80],
        replications: 1,
        ks: vec![2, 3],
        mcmc: short_mcmc(600, 200),
        grid_points: 50,
        ..StudyConfig::default()
    };
    let t = overfit_k_study(&cfg).unwrap();
    for c in &t.cells {
        assert_eq!(c.weights.len(), c.k);
        let p = c.predictive.as_ref().unwrap();
        assert_eq!(p.grid.len(), 50);
        assert!(c.l1_to_truth.unwrap() < 2.0);
    }
    // the same data set is shared across k
    assert_eq!(t.cells[0].data_seed, t.cells[1].data_seed);
}

#[test]
fn config_rejects_unknown_fields_and_bad_values() {
    let err = serde_json::from_str::<StudyConfig>(r#"{"replicates": 3}"#).unwrap_err();
    assert!(err.to_string().contains("replicates"));
    let cfg: StudyConfig = serde_json::from_str(r#"{"replications": 0}"#).unwrap();
    assert!(cfg.validate().is_err());
    let cfg: StudyConfig = serde_json::from_str(r#"{"sample_sizes": [0]}"#).unwrap();
    assert!(cfg.validate().is_err());
    let cfg: StudyConfig = serde_json::from_str(r#"{"schema_version": 2}"#).unwrap();
    assert!(cfg.validate().is_err());
    assert!(StudyConfig::default().validate().is_ok());
    assert_eq!("improperness".parse::<StudyKind>().unwrap(), StudyKind::Improperness);
    assert!("nope".parse::<StudyKind>().is_err());
}

#[test]
fn artifacts_land_in_the_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let rows = vec![LongRow::new("demo", "weight", 0.25)];
    let a = write_artifacts(dir.path(), "demo", "demo", &vec![1.0], &rows, Some("<svg/>")).unwrap();
    assert!(a.json.exists() && a.csv.exists() && a.svg.unwrap().exists());
}

#[test]
fn identical_specs_give_unit_bayes_factor() {
    let truth = mix(&[0.5, 0.5], &[-2.0, 2.0], &[1.0, 1.0]);
    let data = simulate(60, &truth, 4).unwrap();
    let cfg = BridgeConfig {
        mcmc: short_mcmc(6000, 2000),
        ..BridgeConfig::default()
    };
    let spec = ModelSpec {
        k: 2,
        family: ComponentFamily::Gaussian,
    };
    let bf = bayes_factor(&data, spec, spec, &cfg, 3).unwrap();
    assert!(
        bf.log_bf.abs() < 4.0 * bf.se_log_bf + 0.15,
        "log BF {} se {}",
        bf.log_bf,
        bf.se_log_bf
    );
}

#[test]
fn gumbel_data_favour_gumbel_components() {
    let truth = MixtureParams::new(
        vec![0.6, 0.4],
        vec![0.0, 6.0],
        vec![1.0, 1.0],
        ComponentFamily::Gumbel,
    )
    .unwrap();
    let data = simulate(200, &truth, 8).unwrap();
    let cfg = BridgeConfig {
        mcmc: McmcConfig {
            integrator: IntegratorConfig::default(),
            ..short_mcmc(6000, 2000)
        },
        ..BridgeConfig::default()
    };
    let g = ModelSpec {
        k: 2,
        family: ComponentFamily::Gumbel,
    };
    let n = ModelSpec {
        k: 2,
        family: ComponentFamily::Gaussian,
    };
    let bf = bayes_factor(&data, g, n, &cfg, 5).unwrap();
    assert!(bf.bf > 1.0, "BF {} (log {} ± {})", bf.bf, bf.log_bf, bf.se_log_bf);
}
