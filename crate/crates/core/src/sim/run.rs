//! End-to-end simulation driver.
//!
//! One execution record per request: the strategy's routing decision, the
//! hidden oracle's outcome for the chosen model, and simulated latency and
//! energy. Requests are independent; the parallel and sequential paths
//! produce identical record streams.

use serde::{Deserialize, Serialize};

use super::cost::{simulate_energy, simulate_latency, TierCostModel};
use super::truth::{true_outcome, TruthConfig};
use super::workload::Request;
use super::SimError;
use crate::calibration::CalibratedBundle;
use crate::features::{FusionWeights, Quintile};
use crate::parallel::{map_indexed, map_indexed_seq};
use crate::pool::{NetworkState, PoolConfig, Tier};
use crate::router::RouterParams;
use crate::strategies::{oracle_select, select, Strategy, StrategyKind};

pub const EXEC_SCHEMA: &str = "exec/1";

/// Everything a simulation run needs besides the workload and strategy.
#[derive(Debug, Clone)]
pub struct SimContext {
    /// Pool with the bundle's calibrated accuracies applied.
    pub pool: PoolConfig,
    pub params: RouterParams,
    pub beta: [f64; 6],
    pub weights: FusionWeights,
    pub quintile_cuts: [f64; 4],
    pub truth: TruthConfig,
    pub cost: TierCostModel,
    pub network: NetworkState,
}

impl SimContext {
    pub fn new(
        pool: &PoolConfig,
        bundle: &CalibratedBundle,
        truth: TruthConfig,
        cost: TierCostModel,
        network: NetworkState,
    ) -> Self {
        Self {
            pool: bundle.apply_to_pool(pool),
            params: bundle.router_params(&RouterParams::default()),
            beta: bundle.beta,
            weights: FusionWeights::default(),
            quintile_cuts: bundle.quintile_boundaries,
            truth,
            cost,
            network,
        }
    }
}

/// Seeding and noise switches of one run.
#[derive(Debug, Clone, Copy)]
pub struct SimOptions {
    pub seed: u64,
    /// Replace every stochastic draw by its mean (latency/energy) while
    /// keeping outcomes; used by analytic checks and sweeps.
    pub disable_noise: bool,
}

impl SimOptions {
    pub fn new(seed: u64) -> Self {
        Self { seed, disable_noise: false }
    }
}

/// Outcome of one simulated or replayed request.
///
/// `correct` is 0/1 for simulated runs; externally supplied replay traces
/// may carry soft scores in [0, 1], which pass through unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionRecord {
    pub id: u64,
    pub model: String,
    pub resolution: u32,
    pub placement: Tier,
    pub reason: String,
    pub correct: f64,
    pub latency_ms: f64,
    pub energy_j: f64,
    pub quintile: Quintile,
    pub d: f64,
}

fn run_one(
    request: &Request,
    strategy: &Strategy,
    ctx: &SimContext,
    opts: &SimOptions,
) -> Result<ExecutionRecord, SimError> {
    // Canonical complexity and quintile label, independent of any ablation
    // masking the strategy applies for its own decision.
    let canonical = request.features.descriptor(ctx.beta, ctx.weights)?;
    let quintile = crate::features::complexity_quintile(canonical.d, &ctx.quintile_cuts)?;

    let (model, resolution, placement, reason, correct) = if strategy.kind == StrategyKind::Oracle {
        let mut outcomes = std::collections::BTreeMap::new();
        for profile in &ctx.pool.profiles {
            let score = true_outcome(
                &ctx.truth,
                &request.features,
                &profile.id,
                profile.r_cal,
                profile.r_cal,
                request.id,
                opts.seed,
            )?;
            outcomes.insert(profile.id.clone(), score);
        }
        let (model, score) = oracle_select(&outcomes, &ctx.pool)?;
        let profile = ctx.pool.profile(&model).expect("oracle picks pool models");
        (model, profile.r_cal, profile.tier, "Oracle".to_string(), score)
    } else {
        let decision = select(
            strategy,
            &request.features,
            &ctx.pool,
            &ctx.network,
            &ctx.params,
            ctx.beta,
            ctx.weights,
        )?;
        let chosen = &decision.chosen.config;
        let profile = ctx
            .pool
            .profile(&chosen.model_id)
            .expect("decision references a pool model");
        let correct = true_outcome(
            &ctx.truth,
            &request.features,
            &chosen.model_id,
            profile.r_cal,
            chosen.resolution,
            request.id,
            opts.seed,
        )?;
        (
            chosen.model_id.clone(),
            chosen.resolution,
            chosen.placement,
            decision.reason.to_string(),
            correct,
        )
    };

    let latency_ms = simulate_latency(
        &model,
        placement,
        &ctx.cost,
        ctx.network.bandwidth_mbps,
        request.id,
        opts.seed,
        !opts.disable_noise,
    )?;
    let energy_j = simulate_energy(placement, &ctx.cost, request.id, opts.seed, !opts.disable_noise);

    Ok(ExecutionRecord {
        id: request.id,
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
}

/// Simulate a workload under one strategy (parallel over requests when the
/// `parallel` feature is enabled).
pub fn simulate(
    requests: &[Request],
    strategy: &Strategy,
    ctx: &SimContext,
    opts: &SimOptions,
) -> Result<Vec<ExecutionRecord>, SimError> {
    map_indexed(requests.len(), |i| run_one(&requests[i], strategy, ctx, opts))
        .into_iter()
        .collect()
}

/// Sequential variant with identical output; benches compare the two.
pub fn simulate_seq(
    requests: &[Request],
    strategy: &Strategy,
    ctx: &SimContext,
    opts: &SimOptions,
) -> Result<Vec<ExecutionRecord>, SimError> {
    map_indexed_seq(requests.len(), |i| run_one(&requests[i], strategy, ctx, opts))
        .into_iter()
        .collect()
}
