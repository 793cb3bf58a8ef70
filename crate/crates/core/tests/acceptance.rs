//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured values (run with `--nocapture` to see
//! them). Tolerances are pinned in code; nothing is calibrated here.

use std::collections::BTreeSet;

use rand::Rng;

use inar_core::bench::{
    export_trace, ingest_trace, replay, run_bandwidth_sweep, run_comparison_trace,
    run_quintile_analysis, write_trace,
};
use inar_core::calibration::{
    estimate_accuracy, fit_coefficients, validate_monotonic_constraints, CalibrationRecord,
    FitOptions, ModelOutcome, CALREC_SCHEMA,
};
use inar_core::features::{
    analyze_text, complexity_quintile, descriptor_from_axes, extract_from_luma, FeatureConfig,
    FusionWeights, LumaImage, Quintile, TextConfig,
};
use inar_core::pool::{
    candidates, Configuration, ModelProfile, NetworkState, PoolConfig, Precision, Strengths, Tier,
};
use inar_core::reference::{self, reference_bundle, reference_context, EVAL_N};
use inar_core::rng::stream;
use inar_core::router::{
    decide, pareto_frontier, predict_quality, estimate_cost, CostModelParams, DecisionReason,
    QualityModelParams, RouterParams, ScoredCandidate,
};
use inar_core::sim::workload::generate_workload;
use inar_core::sim::{
    integrate_energy, simulate, synthetic, ExecutionRecord, PowerTrace, SimOptions, TruthConfig,
};
use inar_core::strategies::{Strategy, StrategyKind};

fn edge_profile() -> ModelProfile {
    ModelProfile {
        id: "probe".into(),
        params_b: 2.0,
        tier: Tier::Edge,
        precision: Precision::Int8,
        strengths: Strengths { blur: 0.6, detail: 1.0, reasoning: 1.0 },
        accuracy: 0.7,
        r_cal: 336,
        base_latency: 2.0,
        gpu_latency_mean_ms: 682.0,
        gpu_latency_p95_ms: 990.0,
        supported_resolutions: vec![224, 336, 448, 672],
    }
}

fn config(resolution: u32, placement: Tier) -> Configuration {
    Configuration {
        model_id: "probe".into(),
        precision: if placement == Tier::Edge { Precision::Int8 } else { Precision::Fp16 },
        resolution,
        placement,
    }
}

#[test]
fn acceptance_01_formula_fidelity() {
    // Quality: a=0.7, r=672 vs r_cal=336, blur need 0.8 vs strength 0.6,
    // d=0.4 -> 0.7 + 0.07 - 0.04 - 0.12 = 0.61.
    let mut descriptor = descriptor_from_axes(
        [1.0, 1.0, 1.0, 0.0],
        [0.0; 6],
        [1.0 / 6.0; 6],
        FusionWeights::default(),
    )
    .unwrap();
    descriptor.d = 0.4;
    descriptor.needs.blur = 0.8;
    descriptor.needs.detail = 0.0;
    descriptor.needs.reasoning = 0.0;
    let q = predict_quality(
        &config(672, Tier::Edge),
        &descriptor,
        &edge_profile(),
        &QualityModelParams::default(),
    );
    assert!((q - 0.61).abs() < 1e-9, "q_hat {q}");

    // Cost, edge: 2*0.65*1 + 0.3*(2*0.65) = 1.69.
    let cost_params = CostModelParams::default();
    let network = NetworkState::new(100.0);
    let c_edge = estimate_cost(&config(336, Tier::Edge), &edge_profile(), &network, &cost_params);
    assert!((c_edge - 1.69).abs() < 1e-9, "edge cost {c_edge}");

    // Cost, cloud: 8*1*1 + 0.3*0.1 + 0.5*1*(100/100) = 8.53.
    let mut cloud = edge_profile();
    cloud.params_b = 8.0;
    cloud.base_latency = 8.0;
    cloud.tier = Tier::Cloud;
    cloud.precision = Precision::Fp16;
    let c_cloud = estimate_cost(&config(336, Tier::Cloud), &cloud, &network, &cost_params);
    assert!((c_cloud - 8.53).abs() < 1e-9, "cloud cost {c_cloud}");

    println!("ACCEPTANCE 01 PASS: q_hat={q:.9}, c_edge={c_edge:.9}, c_cloud={c_cloud:.9}");
}

fn scored(c: f64, q: f64, tag: u32) -> ScoredCandidate {
    ScoredCandidate {
        config: Configuration {
            model_id: format!("m{tag}"),
            precision: Precision::Int8,
            resolution: 224 + (tag % 4) * 112,
            placement: if tag % 3 == 0 { Tier::Cloud } else { Tier::Edge },
        },
        q_hat: q,
        c_hat: c,
    }
}

fn brute_force_skyline(points: &[(f64, f64)]) -> BTreeSet<(u64, u64)> {
    let distinct: BTreeSet<(u64, u64)> =
        points.iter().map(|(c, q)| (c.to_bits(), q.to_bits())).collect();
    distinct
        .iter()
        .filter(|(cb, qb)| {
            let (c, q) = (f64::from_bits(*cb), f64::from_bits(*qb));
            !points.iter().any(|(oc, oq)| {
                (*oc <= c && *oq >= q) && (*oc < c || *oq > q)
            })
        })
        .copied()
        .collect()
}

#[test]
fn acceptance_02_pareto_equals_brute_force_skyline() {
    let mut rng = stream(&[0xACCE, 2]);
    for case in 0..1000u32 {
        let n = rng.random_range(1..=64);
        let mut points: Vec<(f64, f64)> = Vec::with_capacity(n);
        for _ in 0..n {
            // Coarse grid provokes exact ties in both coordinates.
            let c = f64::from(rng.random_range(0..40u32)) / 4.0;
            let q = f64::from(rng.random_range(0..20u32)) / 20.0;
            points.push((c, q));
        }
        let cands: Vec<ScoredCandidate> = points
            .iter()
            .enumerate()
            .map(|(i, (c, q))| scored(*c, *q, i as u32))
            .collect();
        let frontier = pareto_frontier(&cands).unwrap();
        for pair in frontier.windows(2) {
            assert!(pair[0].c_hat <= pair[1].c_hat, "case {case}: not cost-sorted");
            assert!(pair[0].q_hat < pair[1].q_hat, "case {case}: quality not strictly rising");
        }
        let got: BTreeSet<(u64, u64)> =
            frontier.iter().map(|s| (s.c_hat.to_bits(), s.q_hat.to_bits())).collect();
        let want = brute_force_skyline(&points);
        assert_eq!(got, want, "case {case}: frontier != skyline for {points:?}");
    }
    println!("ACCEPTANCE 02 PASS: 1000 random candidate sets match the brute-force skyline");
}

#[test]
fn acceptance_03_decision_rule_constants() {
    let net = NetworkState::new(100.0);
    let guard_net = NetworkState::new(10.0);
    let frontier = |qe: f64, qc: f64| {
        vec![
            ScoredCandidate { config: config(448, Tier::Edge), q_hat: qe, c_hat: 1.0 },
            ScoredCandidate { config: config(336, Tier::Cloud), q_hat: qc, c_hat: 8.0 },
        ]
    };

    // Guard forces edge regardless of qualities.
    let d = decide(&frontier(0.1, 0.99), &guard_net, 0.65, 0.03).unwrap();
    assert_eq!(d.chosen.config.placement, Tier::Edge);
    assert_eq!(d.reason, DecisionReason::BandwidthGuard);
    // 0.02 gain <= delta_min stays on edge.
    let d = decide(&frontier(0.60, 0.62), &net, 0.65, 0.03).unwrap();
    assert_eq!(d.chosen.config.placement, Tier::Edge);
    assert_eq!(d.reason, DecisionReason::CloudGainTooSmall);
    // 0.06 gain > delta_min offloads.
    let d = decide(&frontier(0.60, 0.66), &net, 0.65, 0.03).unwrap();
    assert_eq!(d.chosen.config.placement, Tier::Cloud);
    assert_eq!(d.reason, DecisionReason::CloudJustified);

    // Property checks over 1000 random instances.
    let mut rng = stream(&[0xACCE, 3]);
    for case in 0..1000u32 {
        let n = rng.random_range(2..=16);
        let cands: Vec<ScoredCandidate> = (0..n)
            .map(|i| scored(rng.random_range(0.0..10.0), rng.random_range(0.0..1.0), i))
            .collect();
        let has_edge = cands.iter().any(|c| c.config.placement == Tier::Edge);
        if !has_edge {
            continue;
        }
        let frontier = pareto_frontier(&cands).unwrap();
        let tau: f64 = rng.random_range(0.0..1.0);
        let d1: f64 = rng.random_range(0.0..0.2);
        let d2: f64 = d1 + rng.random_range(0.0..0.3);
        let dec1 = decide(&frontier, &net, tau, d1).unwrap();
        let dec2 = decide(&frontier, &net, tau, d2).unwrap();
        if dec1.chosen.config.placement == Tier::Edge {
            assert_eq!(
                dec2.chosen.config.placement,
                Tier::Edge,
                "case {case}: raising delta_min flipped edge to cloud"
            );
        }

        // Positive cost rescaling preserves membership and the decision.
        let k: f64 = rng.random_range(0.01..100.0);
        let rescaled: Vec<ScoredCandidate> = cands
            .iter()
            .map(|c| ScoredCandidate { c_hat: c.c_hat * k, ..c.clone() })
            .collect();
        let frontier_k = pareto_frontier(&rescaled).unwrap();
        let members = |f: &[ScoredCandidate]| -> Vec<String> {
            f.iter().map(|c| c.config.model_id.clone()).collect()
        };
        assert_eq!(members(&frontier), members(&frontier_k), "case {case}: membership changed");
        let dec_k = decide(&frontier_k, &net, tau, d1).unwrap();
        assert_eq!(
            dec1.chosen.config, dec_k.chosen.config,
            "case {case}: cost rescaling changed the decision"
        );
    }
    println!("ACCEPTANCE 03 PASS: rule examples exact; delta-min monotonicity and cost-scale invariance hold");
}

#[test]
fn acceptance_04_network_arithmetic() {
    let at15 = inar_core::sim::transfer_ms(250_000, 15.0);
    let at300 = inar_core::sim::transfer_ms(250_000, 300.0);
    assert!((at15 - 133.3).abs() <= 0.5, "transfer at 15 Mbps: {at15}");
    assert!((at300 - 6.7).abs() <= 0.5, "transfer at 300 Mbps: {at300}");

    let ctx = reference_context();
    let spec = inar_core::sim::WorkloadSpec::reference(4242, 200);
    let rows = run_bandwidth_sweep(
        &spec,
        &Strategy::new(StrategyKind::InarVl),
        &[5.0, 10.0, 14.9, 15.0, 300.0],
        &ctx,
        &SimOptions { seed: 1, disable_noise: true },
    )
    .unwrap();
    for row in &rows {
        if row.bw_mbps < 15.0 {
            assert_eq!(row.edge_frac, 1.0, "below-guard row at {} Mbps", row.bw_mbps);
        }
    }
    assert!((rows[3].transfer_ms - 133.3).abs() <= 0.5);
    assert!((rows[4].transfer_ms - 6.7).abs() <= 0.5);
    println!("ACCEPTANCE 04 PASS: transfer {at15:.1}/{at300:.1} ms; below-guard rows 100% edge");
}

fn reference_run(kind: StrategyKind) -> Vec<ExecutionRecord> {
    let ctx = reference_context();
    let requests = generate_workload(&reference::eval_workload()).unwrap();
    simulate(&requests, &Strategy::new(kind), &ctx, &SimOptions::new(reference::RUN_SEED)).unwrap()
}

fn mean_of(records: &[ExecutionRecord], f: impl Fn(&ExecutionRecord) -> f64) -> f64 {
    records.iter().map(f).sum::<f64>() / records.len() as f64
}

fn edge_fraction(records: &[ExecutionRecord]) -> f64 {
    records.iter().filter(|r| r.placement == Tier::Edge).count() as f64 / records.len() as f64
}

#[test]
fn acceptance_05_table4_blend_reproduction() {
    let records = reference_run(StrategyKind::InarVl);
    assert_eq!(records.len(), EVAL_N);
    let frac = edge_fraction(&records);
    assert!((frac - 0.36).abs() <= 0.02, "edge fraction {frac}");
    let lat = mean_of(&records, |r| r.latency_ms);
    let energy = mean_of(&records, |r| r.energy_j);
    assert!(
        (1826.0 * 0.95..=1826.0 * 1.05).contains(&lat),
        "router latency {lat} outside 1826 +/- 5%"
    );
    assert!(
        (19.2 * 0.95..=19.2 * 1.05).contains(&energy),
        "router energy {energy} outside 19.2 +/- 5%"
    );
    println!("ACCEPTANCE 05 PASS: edge {frac:.3}, latency {lat:.1} ms, energy {energy:.2} J");
}

#[test]
fn acceptance_06_baseline_tiers() {
    let edge = reference_run(StrategyKind::EdgeOnly);
    let lat_e = mean_of(&edge, |r| r.latency_ms);
    let energy_e = mean_of(&edge, |r| r.energy_j);
    assert!((824.0 * 0.95..=824.0 * 1.05).contains(&lat_e), "edge latency {lat_e}");
    assert!((7.4 * 0.95..=7.4 * 1.05).contains(&energy_e), "edge energy {energy_e}");

    let cloud = reference_run(StrategyKind::CloudOnly);
    let lat_c = mean_of(&cloud, |r| r.latency_ms);
    let energy_c = mean_of(&cloud, |r| r.energy_j);
    assert!((2408.0 * 0.95..=2408.0 * 1.05).contains(&lat_c), "cloud latency {lat_c}");
    assert!((26.0 * 0.95..=26.0 * 1.05).contains(&energy_c), "cloud energy {energy_c}");
    println!(
        "ACCEPTANCE 06 PASS: edge {lat_e:.1} ms/{energy_e:.2} J, cloud {lat_c:.1} ms/{energy_c:.2} J"
    );
}

#[test]
fn acceptance_07_quintile_behavior() {
    let records = reference_run(StrategyKind::InarVl);
    let rows = run_quintile_analysis(&records);
    assert_eq!(rows.len(), 5, "all five quintiles populated");
    assert_eq!(rows[0].quintile, Quintile::Q1);
    assert_eq!(rows[0].edge_frac, 1.0, "Q1 must stay fully on the edge");
    for pair in rows.windows(2) {
        assert!(
            pair[1].edge_frac <= pair[0].edge_frac + 1e-12,
            "edge fraction rose from {} to {}",
            pair[0].quintile,
            pair[1].quintile
        );
    }
    let fracs: Vec<String> = rows.iter().map(|r| format!("{:.2}", r.edge_frac)).collect();
    println!("ACCEPTANCE 07 PASS: Q1..Q5 edge fractions {fracs:?} (Q2 reported, not pinned)");
}

#[test]
fn acceptance_08_ablation_ordering() {
    let image = edge_fraction(&reference_run(StrategyKind::ImageOnly));
    let inar = edge_fraction(&reference_run(StrategyKind::InarVl));
    let text = edge_fraction(&reference_run(StrategyKind::TextOnly));
    assert!(
        image > inar && inar > text,
        "edge-fraction ordering violated: image {image:.3}, inar {inar:.3}, text {text:.3}"
    );

    let acc_cloud = mean_of(&reference_run(StrategyKind::CloudOnly), |r| r.correct);
    let acc_inar = mean_of(&reference_run(StrategyKind::InarVl), |r| r.correct);
    let acc_edge = mean_of(&reference_run(StrategyKind::EdgeOnly), |r| r.correct);
    assert!(
        acc_cloud >= acc_inar && acc_inar >= acc_edge,
        "accuracy ordering violated: cloud {acc_cloud:.4}, inar {acc_inar:.4}, edge {acc_edge:.4}"
    );
    println!(
        "ACCEPTANCE 08 PASS: edge fractions {image:.2} > {inar:.2} > {text:.2}; accuracy {acc_cloud:.3} >= {acc_inar:.3} >= {acc_edge:.3}"
    );
}

#[test]
fn acceptance_09_oracle_dominance() {
    let ctx = reference_context();
    let spec = inar_core::sim::WorkloadSpec::reference(909, 500);
    let requests = generate_workload(&spec).unwrap();
    let opts = SimOptions::new(17);

    // Simulated runs.
    let oracle_acc = mean_of(
        &simulate(&requests, &Strategy::new(StrategyKind::Oracle), &ctx, &opts).unwrap(),
        |r| r.correct,
    );
    for kind in StrategyKind::ALL {
        let acc = mean_of(
            &simulate(&requests, &Strategy::new(kind), &ctx, &opts).unwrap(),
            |r| r.correct,
        );
        assert!(oracle_acc >= acc, "simulated {kind}: {acc} beats oracle {oracle_acc}");
    }

    // Replayed trace.
    let trace = export_trace(&requests, &ctx, opts.seed).unwrap();
    let report = run_comparison_trace(
        &trace,
        &StrategyKind::ALL.map(Strategy::new),
        &ctx,
        opts.seed,
    )
    .unwrap();
    let oracle_row = report.rows.iter().find(|r| r.strategy == "Oracle").unwrap();
    for row in &report.rows {
        assert!(
            oracle_row.acc >= row.acc,
            "replayed {}: {} beats oracle {}",
            row.strategy,
            row.acc,
            oracle_row.acc
        );
    }
    println!("ACCEPTANCE 09 PASS: oracle dominates on simulated and replayed traces");
}

#[test]
fn acceptance_10_energy_integrator() {
    let uniform = |f: &dyn Fn(f64) -> f64| -> PowerTrace {
        PowerTrace {
            samples: (0..=20).map(|i| (i as f64 * 50.0, f(i as f64 * 50.0))).collect(),
            p_idle_w: 20.0,
        }
    };
    let rect = integrate_energy(&uniform(&|_| 50.0)).unwrap();
    assert!((rect - 30.0).abs() < 1e-9, "rectangle {rect}");
    let below = integrate_energy(&uniform(&|_| 12.0)).unwrap();
    assert!(below.abs() < 1e-9, "below idle {below}");
    let triangle = integrate_energy(&uniform(&|t| 20.0 + 40.0 * t / 1000.0)).unwrap();
    assert!((triangle - 20.0).abs() < 1e-9, "triangle {triangle}");

    let mut rng = stream(&[0xACCE, 10]);
    for _ in 0..2000 {
        let n = rng.random_range(2..64);
        let period = rng.random_range(1.0..100.0);
        let idle = rng.random_range(0.0..80.0);
        let trace = PowerTrace {
            samples: (0..n)
                .map(|i| (i as f64 * period, rng.random_range(0.0..250.0)))
                .collect(),
            p_idle_w: idle,
        };
        let j = integrate_energy(&trace).unwrap();
        assert!(j >= 0.0, "negative energy {j}");
    }
    println!("ACCEPTANCE 10 PASS: rectangle 30 J, below-idle 0 J, triangle 20 J; fuzz nonnegative");
}

/// Known-parameterization record generator for the recovery check: soft
/// scores computed directly from the quality predictor with a given
/// lambda_dr, on a resolution sweep so the coefficient is identified.
/// Independent of the fitter; it only shares the predictor under test.
fn recovery_records(pool: &PoolConfig, lambda_true: f64, seed: u64) -> Vec<CalibrationRecord> {
    let truth_quality = QualityModelParams { lambda_dr: lambda_true, ..Default::default() };
    let spec = inar_core::sim::WorkloadSpec::reference(seed, 1000);
    let requests = generate_workload(&spec).unwrap();
    requests
        .iter()
        .enumerate()
        .map(|(i, req)| {
            let desc = req
                .features
                .descriptor([1.0 / 6.0; 6], FusionWeights::default())
                .unwrap();
            let outcomes = pool
                .profiles
                .iter()
                .enumerate()
                .map(|(m, p)| {
                    let resolution = if p.tier == Tier::Edge {
                        p.supported_resolutions[(i + m) % p.supported_resolutions.len()]
                    } else {
                        p.r_cal
                    };
                    let cfg = Configuration {
                        model_id: p.id.clone(),
                        precision: p.precision,
                        resolution,
                        placement: p.tier,
                    };
                    let q = predict_quality(&cfg, &desc, p, &truth_quality).clamp(0.0, 1.0);
                    (p.id.clone(), ModelOutcome { resolution, score: q })
                })
                .collect();
            CalibrationRecord {
                schema: CALREC_SCHEMA.to_string(),
                id: req.id,
                features: req.features,
                outcomes,
            }
        })
        .collect()
}

#[test]
fn acceptance_11_calibration_recovery() {
    let pool = PoolConfig::reference();
    let lambda_true = 0.2;
    let records = recovery_records(&pool, lambda_true, 777);
    let fit = |records: &[CalibrationRecord]| {
        fit_coefficients(
            records,
            &pool,
            QualityModelParams::default(),
            [1.0 / 6.0; 6],
            FusionWeights::default(),
            &FitOptions::default(),
        )
        .unwrap()
    };
    let result = fit(&records);
    let rel = (result.quality.lambda_dr - lambda_true).abs() / lambda_true;
    assert!(
        rel <= 0.25,
        "lambda_dr {} vs true {lambda_true}: off by {:.0}%",
        result.quality.lambda_dr,
        rel * 100.0
    );
    validate_monotonic_constraints(&result.quality).unwrap();

    // Determinism: same records, same fit.
    let again = fit(&records);
    assert_eq!(result, again, "fit must be deterministic");

    // No resolution variation: the prior survives and is reported.
    let flat: Vec<CalibrationRecord> = records
        .iter()
        .map(|r| {
            let mut rec = r.clone();
            for (id, o) in rec.outcomes.iter_mut() {
                o.resolution = pool.profile(id).unwrap().r_cal;
            }
            rec
        })
        .collect();
    let prior = QualityModelParams::default();
    let flat_fit = fit_coefficients(
        &flat,
        &pool,
        prior,
        [1.0 / 6.0; 6],
        FusionWeights::default(),
        &FitOptions { fit_res_coeff: true, ..Default::default() },
    )
    .unwrap();
    assert_eq!(flat_fit.quality.lambda_dr, prior.lambda_dr);
    assert_eq!(flat_fit.quality.res_coeff, prior.res_coeff);
    assert!(flat_fit.unidentified.contains(&"lambda_dr".to_string()));
    assert!(flat_fit.unidentified.contains(&"res_coeff".to_string()));

    println!(
        "ACCEPTANCE 11 PASS: lambda_dr {} recovered within {:.0}% of {lambda_true}; constraints hold; deterministic",
        result.quality.lambda_dr,
        rel * 100.0
    );
}

#[test]
fn acceptance_12_feature_budget_and_ranges() {
    // Timing: median extraction over a 1-megapixel fixture.
    let fixture = synthetic::scene_image(1024, 1024, 12);
    let cfg = FeatureConfig::default();
    let mut timings: Vec<f64> = (0..11)
        .map(|_| extract_from_luma(&fixture, "What is the total?", &cfg).unwrap().elapsed_ms)
        .collect();
    timings.sort_by(f64::total_cmp);
    let median = timings[timings.len() / 2];
    assert!(median <= 30.0, "1 MP extraction median {median:.2} ms exceeds 30 ms");

    // Range fuzz: 10,000 random rasters and question strings.
    let mut rng = stream(&[0xACCE, 12]);
    let alphabet: Vec<char> =
        "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 ?!,.;:()[]-'\"\u{e9}\u{4e2d}\u{1f600}"
            .chars()
            .collect();
    for case in 0..10_000u32 {
        let w = rng.random_range(8..=40u32);
        let h = rng.random_range(8..=40u32).max((64 + w - 1) / w);
        let data: Vec<u8> = (0..w * h).map(|_| rng.random()).collect();
        let img = LumaImage::new(w, h, data).unwrap();
        let len = rng.random_range(0..=60usize);
        let question: String =
            (0..len).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect();
        let extraction = extract_from_luma(&img, &question, &cfg).unwrap();
        let d = extraction.descriptor;
        for (i, axis) in d.raw_axes().iter().enumerate() {
            assert!((0.0..=1.0).contains(axis), "case {case}: axis {i} = {axis}");
        }
        for v in [d.image.s_img, d.text.c_text, d.d, d.needs.blur, d.needs.detail, d.needs.reasoning]
        {
            assert!((0.0..=1.0).contains(&v), "case {case}: derived value {v}");
        }
    }
    println!("ACCEPTANCE 12 PASS: median 1 MP extraction {median:.2} ms; 10k-case fuzz in range");
}

#[test]
fn acceptance_13_replay_round_trip() {
    let ctx = reference_context();
    let spec = inar_core::sim::WorkloadSpec::reference(1313, 400);
    let requests = generate_workload(&spec).unwrap();
    let seed = 29;

    let trace = export_trace(&requests, &ctx, seed).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.jsonl");
    write_trace(&path, &trace).unwrap();
    let ingested = ingest_trace(&path, &ctx.pool).unwrap();

    let strategies: Vec<Strategy> = StrategyKind::ALL.map(Strategy::new).to_vec();
    let direct = run_comparison_trace(&trace, &strategies, &ctx, seed).unwrap();
    let round_tripped = run_comparison_trace(&ingested, &strategies, &ctx, seed).unwrap();
    let direct_csv = inar_core::bench::report_to_csv(&direct);
    let rt_csv = inar_core::bench::report_to_csv(&round_tripped);
    assert_eq!(direct_csv, rt_csv, "round-tripped aggregates differ");

    // The replayed run also matches the live simulation byte for byte.
    for strategy in &strategies {
        let live = simulate(&requests, strategy, &ctx, &SimOptions::new(seed)).unwrap();
        let replayed = replay(&ingested, strategy, &ctx, &SimOptions::new(seed)).unwrap();
        assert_eq!(
            serde_json::to_string(&live).unwrap(),
            serde_json::to_string(&replayed).unwrap(),
            "{} live vs replay",
            strategy.kind
        );
    }
    println!("ACCEPTANCE 13 PASS: export -> ingest -> re-score reproduces aggregates byte-for-byte");
}

#[test]
fn acceptance_quintile_cuts_split_reference_workload_evenly() {
    // Supporting check for the quintile machinery: the calibrated cut
    // points put 20% (+/-1 sample rounding) of the reference workload in
    // each bucket.
    let bundle = reference_bundle();
    let requests = generate_workload(&reference::eval_workload()).unwrap();
    let mut counts = [0usize; 5];
    for req in &requests {
        let d = req
            .features
            .descriptor(bundle.beta, FusionWeights::default())
            .unwrap()
            .d;
        counts[complexity_quintile(d, &bundle.quintile_boundaries).unwrap().index()] += 1;
    }
    for (i, c) in counts.iter().enumerate() {
        let frac = *c as f64 / requests.len() as f64;
        assert!((frac - 0.2).abs() <= 0.01, "quintile {} holds {frac}", i + 1);
    }
    println!("ACCEPTANCE EXTRA PASS: quintile cuts split the workload {counts:?}");
}

#[test]
fn acceptance_reference_accuracy_targets() {
    // Supporting check: per-model empirical accuracy over the reference
    // workload lands within 1.5 pp of the generator's configured targets.
    let truth = TruthConfig::reference();
    let pool = PoolConfig::reference();
    let requests = generate_workload(&reference::eval_workload()).unwrap();
    for profile in &pool.profiles {
        let acc = requests
            .iter()
            .map(|r| {
                inar_core::sim::true_outcome(
                    &truth,
                    &r.features,
                    &profile.id,
                    profile.r_cal,
                    profile.r_cal,
                    r.id,
                    reference::RUN_SEED,
                )
                .unwrap()
            })
            .sum::<f64>()
            / requests.len() as f64;
        let target = truth.models[&profile.id].target_accuracy;
        assert!(
            (acc - target).abs() <= 0.015,
            "{}: empirical {acc:.4} vs target {target:.3}",
            profile.id
        );
    }
    println!("ACCEPTANCE EXTRA PASS: per-model empirical accuracy within 1.5 pp of targets");
}

#[test]
fn acceptance_candidate_guard() {
    // Guard totality at the pool level: below the guard, enumeration has
    // no cloud candidates for any pool.
    let pool = PoolConfig::reference();
    let below = candidates(&pool, &NetworkState::new(14.999));
    assert!(below.iter().all(|c| c.placement == Tier::Edge));
    let above = candidates(&pool, &NetworkState::new(15.0));
    assert!(above.iter().any(|c| c.placement == Tier::Cloud));
    println!("ACCEPTANCE EXTRA PASS: bandwidth guard excludes cloud candidates below 15 Mbps");
}

#[test]
fn acceptance_route_examples_on_reference_pool() {
    // d = 0 stays on the edge; a maximally hard reasoning request at high
    // bandwidth offloads.
    let bundle = reference_bundle();
    let pool = bundle.apply_to_pool(&PoolConfig::reference());
    let params = bundle.router_params(&RouterParams::default());
    let net = NetworkState::new(100.0);

    let trivial = descriptor_from_axes(
        [1.0, 1.0, 1.0, 1.0],
        [0.0; 6],
        bundle.beta,
        FusionWeights::default(),
    )
    .unwrap();
    assert_eq!(trivial.d, 0.0);
    let d = inar_core::router::route(&trivial, &pool, &net, &params).unwrap();
    assert_eq!(d.chosen.config.placement, Tier::Edge, "d=0 must stay on edge");

    let hard = descriptor_from_axes(
        [0.0, 0.0, 0.0, 0.0],
        [1.0; 6],
        bundle.beta,
        FusionWeights::default(),
    )
    .unwrap();
    assert!(hard.d > 1.0 - 1e-9);
    let d = inar_core::router::route(&hard, &pool, &net, &params).unwrap();
    assert_eq!(d.chosen.config.placement, Tier::Cloud, "d=1 must offload");
    println!("ACCEPTANCE EXTRA PASS: d=0 routes edge, d=1 reasoning-heavy routes cloud");
}

#[test]
fn acceptance_text_axis_examples() {
    let t = analyze_text(
        "Why is the object on the left heavier than that one?",
        &TextConfig::default(),
    );
    assert!(t.axes[4] > 0.0 && t.axes[5] > 0.0);
    let uniform = inar_core::features::TextComplexity::from_axes([0.6; 6], [1.0 / 6.0; 6]);
    assert!((uniform.c_text - 0.6).abs() < 1e-12);
    let _ = estimate_accuracy(
        &recovery_records(&PoolConfig::reference(), 0.1, 3)[..10],
        "qwen3-vl-2b",
    )
    .unwrap();
    println!("ACCEPTANCE EXTRA PASS: text axis examples hold");
}
