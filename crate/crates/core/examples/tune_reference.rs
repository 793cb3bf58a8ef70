//! Maintenance tool: re-derive the pinned reference configuration.
//!
//! Solves the hidden-oracle base probabilities so per-model empirical
//! accuracy over the reference workload lands on the published targets,
//! runs the full calibration pipeline, and prints the resulting operating
//! point, edge fractions, quintile profile, and tier cost blends. Run it
//! after changing the reference workload, truth strengths, or pool
//! defaults, then copy the printed values into the shipped configs.

use inar_core::calibration::{calibrate, CalibrateOptions};
use inar_core::pool::{NetworkState, PoolConfig, Tier};
use inar_core::reference::{BANDWIDTH_MBPS, CAL_N, CAL_SEED, EVAL_N, EVAL_SEED, RUN_SEED};
use inar_core::sim::workload::generate_workload;
use inar_core::sim::{
    generate_calibration_records, outcome_probability, simulate, true_outcome, RecordProtocol,
    SimContext, SimOptions, TierCostModel, TruthConfig, WorkloadSpec,
};
use inar_core::strategies::{Strategy, StrategyKind};

const OUTCOME_SEED: u64 = RUN_SEED;

fn main() {
    let pool = PoolConfig::reference();
    let mut truth = TruthConfig::reference();
    let spec = WorkloadSpec::reference(EVAL_SEED, EVAL_N);
    let requests = generate_workload(&spec).unwrap();

    println!("== solving truth bases ==");
    for profile in &pool.profiles {
        let target = truth.models[&profile.id].target_accuracy;
        let mut lo = 0.3;
        let mut hi = 1.3;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            truth.models.get_mut(&profile.id).unwrap().base = mid;
            let mean_p: f64 = requests
                .iter()
                .map(|r| {
                    outcome_probability(&truth, &r.features, &profile.id, profile.r_cal, profile.r_cal)
                        .unwrap()
                })
                .sum::<f64>()
                / requests.len() as f64;
            if mean_p < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let base = 0.5 * (lo + hi);
        truth.models.get_mut(&profile.id).unwrap().base = base;
        let empirical: f64 = requests
            .iter()
            .map(|r| {
                true_outcome(
                    &truth,
                    &r.features,
                    &profile.id,
                    profile.r_cal,
                    profile.r_cal,
                    r.id,
                    OUTCOME_SEED,
                )
                .unwrap()
            })
            .sum::<f64>()
            / requests.len() as f64;
        println!("  {:<14} base {:.4}  target {:.3}  empirical {:.4}", profile.id, base, target, empirical);
    }

    println!("== calibration ==");
    let cal_spec = WorkloadSpec::reference(CAL_SEED, CAL_N);
    let records = generate_calibration_records(
        &cal_spec,
        &pool,
        &truth,
        CAL_SEED,
        RecordProtocol::ResolutionSweep,
    )
    .unwrap();
    let features: Vec<_> = requests.iter().map(|r| r.features).collect();
    let opts = CalibrateOptions {
        seed: CAL_SEED,
        timestamp: Some("reference".to_string()),
        network: NetworkState::new(BANDWIDTH_MBPS),
        ..Default::default()
    };
    let bundle = calibrate(&records, &pool, &features, &opts).unwrap();
    println!("  accuracy: {:?}", bundle.accuracy);
    println!("  beta: {:?}", bundle.beta);
    println!("  lambda_dr {:.3}  res_coeff {:.3}  kappa {:.3}", bundle.lambda_dr, bundle.res_coeff, bundle.kappa);
    println!("  tau_edge {:.6}", bundle.tau_edge);
    println!("  quintile cuts {:?}", bundle.quintile_boundaries);
    println!("  hash {}", bundle.content_hash);

    println!("== evaluation ==");
    let cost = TierCostModel::reference();
    let ctx = SimContext::new(&pool, &bundle, truth.clone(), cost, NetworkState::new(100.0));
    let opts = SimOptions::new(OUTCOME_SEED);
    for kind in StrategyKind::ALL {
        let records = simulate(&requests, &Strategy::new(kind), &ctx, &opts).unwrap();
        let n = records.len() as f64;
        let lat: f64 = records.iter().map(|r| r.latency_ms).sum::<f64>() / n;
        let energy: f64 = records.iter().map(|r| r.energy_j).sum::<f64>() / n;
        let acc: f64 = records.iter().map(|r| r.correct).sum::<f64>() / n;
        let edge = records.iter().filter(|r| r.placement == Tier::Edge).count() as f64 / n;
        println!(
            "  {:<10} lat {:>7.1}  energy {:>5.2}  acc {:.4}  edge {:.3}",
            kind.to_string(),
            lat,
            energy,
            acc,
            edge
        );
        if kind == StrategyKind::InarVl {
            for row in inar_core::bench::run_quintile_analysis(&records) {
                println!(
                    "    {} n {:>4} edge {:.3} acc {:.4}",
                    row.quintile, row.n, row.edge_frac, row.acc
                );
            }
            let mut by_model = std::collections::BTreeMap::new();
            for r in &records {
                *by_model.entry(r.model.clone()).or_insert(0usize) += 1;
            }
            println!("    model mix: {by_model:?}");
        }
        if kind == StrategyKind::EdgeOnly || kind == StrategyKind::CloudOnly {
            let mut by_model = std::collections::BTreeMap::new();
            for r in &records {
                *by_model.entry(r.model.clone()).or_insert(0usize) += 1;
            }
            println!("    model mix: {by_model:?}");
        }
    }

    if std::env::args().any(|a| a == "--write-configs") {
        let dir = std::path::Path::new("configs");
        std::fs::create_dir_all(dir).unwrap();
        std::fs::write(dir.join("pool.toml"), toml_doc(&pool)).unwrap();
        std::fs::write(dir.join("truth.toml"), toml_doc(&TruthConfig::reference())).unwrap();
        std::fs::write(dir.join("cost.toml"), toml_doc(&TierCostModel::reference())).unwrap();
        std::fs::write(dir.join("workload.toml"), toml_doc(&spec)).unwrap();
        let reference = inar_core::reference::reference_bundle();
        std::fs::write(dir.join("reference_bundle.json"), reference.to_json()).unwrap();
        println!("== wrote configs/ (bundle hash {}) ==", reference.content_hash);
    }
}

fn toml_doc<T: serde::Serialize>(value: &T) -> String {
    toml::to_string_pretty(value).unwrap()
}
