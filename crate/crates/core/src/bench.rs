//! Experiment runner and trace-replay harness.
//!
//! Strategy comparison reports (means ± standard deviations over seed
//! replicates), per-quintile routing analysis, the bandwidth sweep, and
//! ingestion of externally produced correctness traces. Reports serialize
//! to CSV with the published table's column names.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{FeatureVector, Quintile};
use crate::formats::{self, FormatError};
use crate::parallel::map_indexed;
use crate::pool::{NetworkState, Tier};
use crate::sim::run::EXEC_SCHEMA;
use crate::sim::workload::{generate_workload, replicate_seed, Request, WorkloadSpec};
use crate::sim::{
    simulate, simulate_energy, simulate_latency, transfer_ms, ExecutionRecord, SimContext,
    SimError, SimOptions,
};
use crate::strategies::{oracle_select, select, Strategy, StrategyKind};

pub const REPLAY_SCHEMA: &str = "replay/1";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("record {record} is missing model '{model}'")]
    PartialCoverage { record: u64, model: String },
    #[error("replay trace is empty")]
    EmptyTrace,
    #[error("score {score} out of [0,1] in record {record}")]
    BadScore { record: u64, score: f64 },
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Strategy(#[from] crate::strategies::StrategyError),
    #[error(transparent)]
    Feature(#[from] crate::features::FeatureError),
}

/// Measured per-model execution costs carried by a replay trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasuredCost {
    pub latency_ms: f64,
    pub energy_j: f64,
}

/// One replay-trace record: raw features plus a per-model outcome, with
/// optional measured costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayRecord {
    pub id: u64,
    pub features: FeatureVector,
    pub outcomes: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measured: Option<BTreeMap<String, MeasuredCost>>,
}

/// A validated replay trace covering the full pool on every record.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayTrace {
    pub records: Vec<ReplayRecord>,
}

impl ReplayTrace {
    pub fn validate(&self, pool: &crate::pool::PoolConfig) -> Result<(), BenchError> {
        if self.records.is_empty() {
            return Err(BenchError::EmptyTrace);
        }
        for rec in &self.records {
            for profile in &pool.profiles {
                match rec.outcomes.get(&profile.id) {
                    None => {
                        return Err(BenchError::PartialCoverage {
                            record: rec.id,
                            model: profile.id.clone(),
                        })
                    }
                    Some(score) if !(0.0..=1.0).contains(score) => {
                        return Err(BenchError::BadScore { record: rec.id, score: *score })
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

/// Read and validate a replay trace from a JSON Lines file.
pub fn ingest_trace(path: &Path, pool: &crate::pool::PoolConfig) -> Result<ReplayTrace, BenchError> {
    let records: Vec<ReplayRecord> = formats::read_jsonl(path, REPLAY_SCHEMA)?;
    let trace = ReplayTrace { records };
    trace.validate(pool)?;
    Ok(trace)
}

/// Export a simulated workload as a replay trace: for every request, the
/// hidden oracle's outcome for every pool model at its calibration
/// resolution, drawn from the same streams a simulation run would use.
pub fn export_trace(
    requests: &[Request],
    ctx: &SimContext,
    seed: u64,
) -> Result<ReplayTrace, BenchError> {
    let records: Vec<Result<ReplayRecord, SimError>> = map_indexed(requests.len(), |i| {
        let req = &requests[i];
        let mut outcomes = BTreeMap::new();
        for profile in &ctx.pool.profiles {
            let score = crate::sim::true_outcome(
                &ctx.truth,
                &req.features,
                &profile.id,
                profile.r_cal,
                profile.r_cal,
                req.id,
                seed,
            )?;
            outcomes.insert(profile.id.clone(), score);
        }
        Ok(ReplayRecord { id: req.id, features: req.features, outcomes, measured: None })
    });
    let records = records.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(ReplayTrace { records })
}

/// Re-score a replay trace under one strategy. Outcomes come from the
/// trace; latency and energy come from measured values when the trace
/// carries them, otherwise from the cost model with the same per-request
/// streams a simulation would use.
pub fn replay(
    trace: &ReplayTrace,
    strategy: &Strategy,
    ctx: &SimContext,
    opts: &SimOptions,
) -> Result<Vec<ExecutionRecord>, BenchError> {
    trace.validate(&ctx.pool)?;
    let results: Vec<Result<ExecutionRecord, BenchError>> =
        map_indexed(trace.records.len(), |i| {
            let rec = &trace.records[i];
            let canonical = rec.features.descriptor(ctx.beta, ctx.weights)?;
            let quintile = crate::features::complexity_quintile(canonical.d, &ctx.quintile_cuts)?;
            let (model, resolution, placement, reason, correct) =
                if strategy.kind == StrategyKind::Oracle {
                    let (model, score) = oracle_select(&rec.outcomes, &ctx.pool)?;
                    let profile = ctx.pool.profile(&model).expect("oracle picks pool models");
                    (model, profile.r_cal, profile.tier, "Oracle".to_string(), score)
                } else {
                    let decision = select(
                        strategy,
                        &rec.features,
                        &ctx.pool,
                        &ctx.network,
                        &ctx.params,
                        ctx.beta,
                        ctx.weights,
                    )?;
                    let chosen = decision.chosen.config;
                    let correct = *rec
                        .outcomes
                        .get(&chosen.model_id)
                        .expect("validated trace covers the pool");
                    (
                        chosen.model_id,
                        chosen.resolution,
                        chosen.placement,
                        decision.reason.to_string(),
                        correct,
                    )
                };
            let measured = rec.measured.as_ref().and_then(|m| m.get(&model));
            let (latency_ms, energy_j) = match measured {
                Some(m) => (m.latency_ms, m.energy_j),
                None => (
                    simulate_latency(
                        &model,
                        placement,
                        &ctx.cost,
                        ctx.network.bandwidth_mbps,
                        rec.id,
                        opts.seed,
                        !opts.disable_noise,
                    )?,
                    simulate_energy(placement, &ctx.cost, rec.id, opts.seed, !opts.disable_noise),
                ),
            };
            Ok(ExecutionRecord {
                id: rec.id,
                model,
                resolution,
                placement,
                reason,
                correct,
                latency_ms,
                energy_j,
                quintile,
                d: canonical.d,
            })
        });
    results.into_iter().collect()
}

/// Aggregates of one strategy's records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyRow {
    pub strategy: String,
    pub lat_ms: f64,
    pub lat_sd: f64,
    pub energy_j: f64,
    pub energy_sd: f64,
    pub acc: f64,
    pub acc_sd: f64,
    pub edge_pct: f64,
    pub n: usize,
    pub edge_count: usize,
    pub cloud_count: usize,
}

/// Per-quintile routing behavior; empty quintiles are reported as absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuintileRow {
    pub quintile: Quintile,
    pub n: usize,
    pub edge_frac: f64,
    pub acc: f64,
}

/// One bandwidth sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub bw_mbps: f64,
    pub lat_ms: f64,
    pub edge_frac: f64,
    pub acc: f64,
    /// Raw per-request image transfer term at this bandwidth.
    pub transfer_ms: f64,
}

/// The complete comparison report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub rows: Vec<StrategyRow>,
    pub quintiles: Vec<QuintileRow>,
    pub replicates: usize,
    pub n_requests: usize,
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}

struct ReplicateStats {
    lat: f64,
    energy: f64,
    acc: f64,
    edge_frac: f64,
    edge_count: usize,
    cloud_count: usize,
    n: usize,
}

fn records_stats(records: &[ExecutionRecord]) -> ReplicateStats {
    let n = records.len();
    let edge_count = records.iter().filter(|r| r.placement == Tier::Edge).count();
    ReplicateStats {
        lat: mean(&records.iter().map(|r| r.latency_ms).collect::<Vec<_>>()),
        energy: mean(&records.iter().map(|r| r.energy_j).collect::<Vec<_>>()),
        acc: mean(&records.iter().map(|r| r.correct).collect::<Vec<_>>()),
        edge_frac: edge_count as f64 / n.max(1) as f64,
        edge_count,
        cloud_count: n - edge_count,
        n,
    }
}

fn summarize(strategy: &Strategy, replicates: &[ReplicateStats]) -> StrategyRow {
    let lats: Vec<f64> = replicates.iter().map(|r| r.lat).collect();
    let energies: Vec<f64> = replicates.iter().map(|r| r.energy).collect();
    let accs: Vec<f64> = replicates.iter().map(|r| r.acc).collect();
    let edge_fracs: Vec<f64> = replicates.iter().map(|r| r.edge_frac).collect();
    StrategyRow {
        strategy: strategy.kind.to_string(),
        lat_ms: mean(&lats),
        lat_sd: std_dev(&lats),
        energy_j: mean(&energies),
        energy_sd: std_dev(&energies),
        acc: mean(&accs),
        acc_sd: std_dev(&accs),
        edge_pct: mean(&edge_fracs) * 100.0,
        n: replicates.first().map_or(0, |r| r.n),
        edge_count: replicates.iter().map(|r| r.edge_count).sum(),
        cloud_count: replicates.iter().map(|r| r.cloud_count).sum(),
    }
}

/// Run the strategy comparison over seed replicates of a workload spec.
/// The reported ± values are standard deviations over the replicate means;
/// quintile analysis comes from the first replicate of the focal (full
/// router) strategy.
pub fn run_comparison(
    spec: &WorkloadSpec,
    strategies: &[Strategy],
    ctx: &SimContext,
    replicates: usize,
    seed: u64,
) -> Result<RunReport, BenchError> {
    let replicates = replicates.max(1);
    let mut rows = Vec::new();
    let mut quintiles = Vec::new();
    for strategy in strategies {
        let mut stats = Vec::new();
        for rep in 0..replicates {
            let rep_seed = replicate_seed(seed, rep);
            let mut rep_spec = spec.clone();
            rep_spec.seed = replicate_seed(spec.seed, rep);
            let requests = generate_workload(&rep_spec)?;
            let opts = SimOptions { seed: rep_seed, disable_noise: false };
            let records = simulate(&requests, strategy, ctx, &opts)?;
            if rep == 0 && strategy.kind == StrategyKind::InarVl {
                quintiles = run_quintile_analysis(&records);
            }
            stats.push(records_stats(&records));
        }
        rows.push(summarize(strategy, &stats));
    }
    Ok(RunReport { rows, quintiles, replicates, n_requests: spec.n_requests })
}

/// Re-score a replay trace under every strategy (single pass; a trace is a
/// fixed sample, so no replicate spread is reported).
pub fn run_comparison_trace(
    trace: &ReplayTrace,
    strategies: &[Strategy],
    ctx: &SimContext,
    seed: u64,
) -> Result<RunReport, BenchError> {
    let mut rows = Vec::new();
    let mut quintiles = Vec::new();
    for strategy in strategies {
        let records = replay(trace, strategy, ctx, &SimOptions::new(seed))?;
        if strategy.kind == StrategyKind::InarVl {
            quintiles = run_quintile_analysis(&records);
        }
        rows.push(summarize(strategy, &[records_stats(&records)]));
    }
    Ok(RunReport { rows, quintiles, replicates: 1, n_requests: trace.records.len() })
}

/// Per-quintile edge fraction and accuracy; empty quintiles are omitted.
pub fn run_quintile_analysis(records: &[ExecutionRecord]) -> Vec<QuintileRow> {
    Quintile::ALL
        .into_iter()
        .filter_map(|q| {
            let members: Vec<&ExecutionRecord> =
                records.iter().filter(|r| r.quintile == q).collect();
            if members.is_empty() {
                return None;
            }
            let edge = members.iter().filter(|r| r.placement == Tier::Edge).count();
            Some(QuintileRow {
                quintile: q,
                n: members.len(),
                edge_frac: edge as f64 / members.len() as f64,
                acc: mean(&members.iter().map(|r| r.correct).collect::<Vec<_>>()),
            })
        })
        .collect()
}

/// Sweep bandwidth over one strategy and workload.
pub fn run_bandwidth_sweep(
    spec: &WorkloadSpec,
    strategy: &Strategy,
    bandwidths: &[f64],
    ctx: &SimContext,
    opts: &SimOptions,
) -> Result<Vec<SweepRow>, BenchError> {
    let requests = generate_workload(spec)?;
    let mut rows = Vec::new();
    for &bw in bandwidths {
        let mut point_ctx = ctx.clone();
        point_ctx.network = NetworkState { bandwidth_mbps: bw, ..ctx.network };
        let records = simulate(&requests, strategy, &point_ctx, opts)?;
        let stats = records_stats(&records);
        rows.push(SweepRow {
            bw_mbps: bw,
            lat_ms: stats.lat,
            edge_frac: stats.edge_frac,
            acc: stats.acc,
            transfer_ms: transfer_ms(ctx.cost.payload_bytes, bw),
        });
    }
    Ok(rows)
}

/// CSV with the published table's column names.
pub fn report_to_csv(report: &RunReport) -> String {
    let mut out = String::from("strategy,lat_ms,lat_sd,energy_j,energy_sd,acc,acc_sd,edge_pct,n\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{:.1},{:.1},{:.2},{:.2},{:.4},{:.4},{:.1},{}\n",
            row.strategy,
            row.lat_ms,
            row.lat_sd,
            row.energy_j,
            row.energy_sd,
            row.acc,
            row.acc_sd,
            row.edge_pct,
            row.n
        ));
    }
    out
}

pub fn quintiles_to_csv(rows: &[QuintileRow]) -> String {
    let mut out = String::from("quintile,n,edge_frac,acc\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{:.4},{:.4}\n",
            row.quintile, row.n, row.edge_frac, row.acc
        ));
    }
    out
}

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("bw_mbps,lat_ms,edge_frac,acc,transfer_ms\n");
    for row in rows {
        out.push_str(&format!(
            "{},{:.1},{:.4},{:.4},{:.1}\n",
            row.bw_mbps, row.lat_ms, row.edge_frac, row.acc, row.transfer_ms
        ));
    }
    out
}

/// Write execution records as an `exec/1` JSON Lines file.
pub fn write_records(path: &Path, records: &[ExecutionRecord]) -> Result<(), BenchError> {
    formats::write_jsonl(path, EXEC_SCHEMA, records.iter())?;
    Ok(())
}

/// Write a replay trace as a `replay/1` JSON Lines file.
pub fn write_trace(path: &Path, trace: &ReplayTrace) -> Result<(), BenchError> {
    formats::write_jsonl(path, REPLAY_SCHEMA, trace.records.iter())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::uncalibrated_bundle;
    use crate::pool::PoolConfig;
    use crate::sim::{TierCostModel, TruthConfig};

    fn context() -> SimContext {
        let pool = PoolConfig::reference();
        let bundle = uncalibrated_bundle(&pool);
        SimContext::new(
            &pool,
            &bundle,
            TruthConfig::reference(),
            TierCostModel::reference(),
            NetworkState::new(100.0),
        )
    }

    fn small_trace(ctx: &SimContext) -> ReplayTrace {
        let spec = WorkloadSpec::reference(17, 32);
        let requests = generate_workload(&spec).unwrap();
        export_trace(&requests, ctx, 23).unwrap()
    }

    #[test]
    fn trace_round_trips_through_jsonl() {
        let ctx = context();
        let trace = small_trace(&ctx);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.jsonl");
        write_trace(&path, &trace).unwrap();
        let back = ingest_trace(&path, &ctx.pool).unwrap();
        assert_eq!(back, trace);
        assert_eq!(back.records.len(), 32);
    }

    #[test]
    fn partial_coverage_names_the_record() {
        let ctx = context();
        let mut trace = small_trace(&ctx);
        trace.records[3].outcomes.remove("llava-ov-8b");
        let err = trace.validate(&ctx.pool).unwrap_err();
        match err {
            BenchError::PartialCoverage { record, model } => {
                assert_eq!(record, 3);
                assert_eq!(model, "llava-ov-8b");
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn replay_of_an_exported_simulation_matches_it_exactly() {
        let ctx = context();
        let spec = WorkloadSpec::reference(17, 64);
        let requests = generate_workload(&spec).unwrap();
        let seed = 23;
        let trace = export_trace(&requests, &ctx, seed).unwrap();
        for kind in StrategyKind::ALL {
            let strategy = Strategy::new(kind);
            let opts = SimOptions::new(seed);
            let live = simulate(&requests, &strategy, &ctx, &opts).unwrap();
            let replayed = replay(&trace, &strategy, &ctx, &opts).unwrap();
            assert_eq!(live, replayed, "{kind} diverged between live and replay");
        }
    }

    #[test]
    fn measured_costs_override_the_cost_model() {
        let ctx = context();
        let mut trace = small_trace(&ctx);
        for rec in &mut trace.records {
            let measured: BTreeMap<String, MeasuredCost> = ctx
                .pool
                .profiles
                .iter()
                .map(|p| (p.id.clone(), MeasuredCost { latency_ms: 111.0, energy_j: 2.5 }))
                .collect();
            rec.measured = Some(measured);
        }
        let records =
            replay(&trace, &Strategy::new(StrategyKind::EdgeOnly), &ctx, &SimOptions::new(1))
                .unwrap();
        assert!(records.iter().all(|r| r.latency_ms == 111.0 && r.energy_j == 2.5));
    }

    #[test]
    fn row_counts_are_conserved() {
        let ctx = context();
        let spec = WorkloadSpec::reference(5, 40);
        let strategies: Vec<Strategy> = StrategyKind::ALL.into_iter().map(Strategy::new).collect();
        let report = run_comparison(&spec, &strategies, &ctx, 2, 99).unwrap();
        for row in &report.rows {
            assert_eq!(row.edge_count + row.cloud_count, 40 * 2, "{}", row.strategy);
        }
    }

    #[test]
    fn all_edge_strategy_fills_every_quintile_with_edge() {
        let ctx = context();
        let spec = WorkloadSpec::reference(5, 200);
        let requests = generate_workload(&spec).unwrap();
        let records = simulate(
            &requests,
            &Strategy::new(StrategyKind::EdgeOnly),
            &ctx,
            &SimOptions::new(1),
        )
        .unwrap();
        for row in run_quintile_analysis(&records) {
            assert_eq!(row.edge_frac, 1.0, "{:?}", row.quintile);
        }
    }

    #[test]
    fn report_is_deterministic() {
        let ctx = context();
        let spec = WorkloadSpec::reference(5, 30);
        let strategies = vec![Strategy::new(StrategyKind::InarVl)];
        let a = run_comparison(&spec, &strategies, &ctx, 2, 4).unwrap();
        let b = run_comparison(&spec, &strategies, &ctx, 2, 4).unwrap();
        assert_eq!(report_to_csv(&a), report_to_csv(&b));
    }
}
