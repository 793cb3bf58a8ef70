//! Pareto configuration router.
//!
//! Scores every candidate configuration with the quality predictor and the
//! cost estimator, builds the per-request Pareto frontier (cost-sorted,
//! strictly increasing predicted quality), and applies the edge-preferring
//! decision rule: offload only when the best edge option falls below its
//! calibrated operating point and the best cloud option improves predicted
//! quality by more than the minimum gain.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::RequestDescriptor;
use crate::pool::{candidates, Configuration, ModelProfile, NetworkState, PoolConfig, Precision, Tier};

#[derive(Debug, Error)]
pub enum RouteError {
    #[error("no candidate configurations to score")]
    EmptyCandidates,
    #[error("bandwidth guard active but the pool has no edge candidate")]
    NoEdgeCandidate,
    #[error("candidate references unknown model '{0}'")]
    UnknownModel(String),
}

/// Operating-point sentinel: a threshold this low accepts every edge
/// candidate (finite so parameter documents stay plain JSON numbers).
pub const TAU_ALWAYS_EDGE: f64 = -1.0e30;
/// Operating-point sentinel above any attainable predicted quality.
pub const TAU_NEVER_EDGE: f64 = 1.0e30;

/// Coefficients of the quality predictor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QualityModelParams {
    /// Log-resolution coefficient.
    pub res_coeff: f64,
    /// Mismatch-penalty coefficient.
    pub kappa: f64,
    /// Precision adjustment relative to the calibration precision; zero in
    /// the reference deployment where precision is pinned by tier.
    pub delta_prec_int8: f64,
    pub delta_prec_fp16: f64,
    /// Scale of the detail-resolution penalty (a calibration target).
    pub lambda_dr: f64,
    /// Anchor resolution of the detail-resolution penalty.
    pub r_ref: f64,
}

impl Default for QualityModelParams {
    fn default() -> Self {
        Self {
            res_coeff: 0.07,
            kappa: 1.0,
            delta_prec_int8: 0.0,
            delta_prec_fp16: 0.0,
            lambda_dr: 0.1,
            r_ref: 336.0,
        }
    }
}

impl QualityModelParams {
    pub fn delta_prec(&self, precision: Precision) -> f64 {
        match precision {
            Precision::Int8 => self.delta_prec_int8,
            Precision::Fp16 => self.delta_prec_fp16,
        }
    }
}

/// Coefficients of the cost estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostModelParams {
    pub energy_weight: f64,
    /// Fixed edge-perspective energy proxy of a cloud execution.
    pub cloud_energy_const: f64,
    pub f_prec_int8: f64,
    pub f_prec_fp16: f64,
    /// Resolution anchor of the latency and network terms.
    pub res_anchor: f64,
    pub net_coeff: f64,
    /// Bandwidth floor inside the network term.
    pub bw_floor_mbps: f64,
}

impl Default for CostModelParams {
    fn default() -> Self {
        Self {
            energy_weight: 0.3,
            cloud_energy_const: 0.1,
            f_prec_int8: 0.65,
            f_prec_fp16: 1.0,
            res_anchor: 336.0,
            net_coeff: 0.5,
            bw_floor_mbps: 10.0,
        }
    }
}

impl CostModelParams {
    pub fn f_prec(&self, precision: Precision) -> f64 {
        match precision {
            Precision::Int8 => self.f_prec_int8,
            Precision::Fp16 => self.f_prec_fp16,
        }
    }
}

/// Everything the router needs besides the pool and the network state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RouterParams {
    pub quality: QualityModelParams,
    pub cost: CostModelParams,
    /// Calibrated operating point: the best edge candidate is accepted
    /// outright when its predicted quality reaches this threshold.
    pub tau_edge: f64,
    /// Minimum predicted-quality gain required to justify offloading.
    pub delta_min: f64,
}

impl Default for RouterParams {
    fn default() -> Self {
        Self {
            quality: QualityModelParams::default(),
            cost: CostModelParams::default(),
            tau_edge: 0.62,
            delta_min: 0.03,
        }
    }
}

/// A candidate with its predicted quality and estimated cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredCandidate {
    #[serde(flatten)]
    pub config: Configuration,
    pub q_hat: f64,
    pub c_hat: f64,
}

/// Why the router picked what it picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecisionReason {
    BandwidthGuard,
    EdgeSufficient,
    CloudJustified,
    CloudGainTooSmall,
}

impl std::fmt::Display for DecisionReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DecisionReason::BandwidthGuard => "BandwidthGuard",
            DecisionReason::EdgeSufficient => "EdgeSufficient",
            DecisionReason::CloudJustified => "CloudJustified",
            DecisionReason::CloudGainTooSmall => "CloudGainTooSmall",
        };
        write!(f, "{s}")
    }
}

/// The routing outcome: chosen candidate, the full frontier for audit, the
/// rule branch taken, and the thresholds in force.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingDecision {
    pub chosen: ScoredCandidate,
    pub frontier: Vec<ScoredCandidate>,
    pub reason: DecisionReason,
    pub tau_edge: f64,
    pub delta_min: f64,
}

/// Predicted answer quality of a candidate for a request (Eq. 1 shape).
///
/// `q_hat = a_m + delta_prec + res_coeff*(log2 r - log2 r_cal)
///          - kappa * sum(gap_i^2) - d*(1 - a_m) + detail_res_penalty`
/// with `gap_i = max(0, need_i - strength_i)`. The detail-resolution
/// penalty `-lambda_dr * s_detail * max(0, (r_ref - r)/r_ref)` is zero at
/// and above the anchor resolution. The value is intentionally unclamped;
/// clamp only at reporting boundaries, never before threshold comparisons.
pub fn predict_quality(
    config: &Configuration,
    descriptor: &RequestDescriptor,
    profile: &ModelProfile,
    params: &QualityModelParams,
) -> f64 {
    let r = f64::from(config.resolution);
    let r_cal = f64::from(profile.r_cal);
    let gap = |need: f64, strength: f64| (need - strength).max(0.0);
    let g_blur = gap(descriptor.needs.blur, profile.strengths.blur);
    let g_detail = gap(descriptor.needs.detail, profile.strengths.detail);
    let g_reason = gap(descriptor.needs.reasoning, profile.strengths.reasoning);
    let mismatch = g_blur * g_blur + g_detail * g_detail + g_reason * g_reason;
    let detail_res = -params.lambda_dr
        * descriptor.image.s_detail
        * ((params.r_ref - r) / params.r_ref).max(0.0);
    profile.accuracy
        + params.delta_prec(config.precision)
        + params.res_coeff * (r.log2() - r_cal.log2())
        - params.kappa * mismatch
        - descriptor.d * (1.0 - profile.accuracy)
        + detail_res
}

/// Estimated execution cost of a candidate (Eq. 2 shape).
///
/// `c_hat = B_m * f_prec * (r/anchor)^2 + energy_weight * e + n` where the
/// energy proxy `e` is `params_b * f_prec` on edge and a small constant on
/// cloud, and the network term `n` is zero on edge and
/// `net_coeff * (r/anchor)^2 * 100/max(bw, floor)` on cloud.
pub fn estimate_cost(
    config: &Configuration,
    profile: &ModelProfile,
    network: &NetworkState,
    params: &CostModelParams,
) -> f64 {
    let res_scale = {
        let ratio = f64::from(config.resolution) / params.res_anchor;
        ratio * ratio
    };
    let f_prec = params.f_prec(config.precision);
    let compute = profile.base_latency * f_prec * res_scale;
    let (energy, net) = match config.placement {
        Tier::Edge => (profile.params_b * f_prec, 0.0),
        Tier::Cloud => (
            params.cloud_energy_const,
            params.net_coeff * res_scale * 100.0 / network.bandwidth_mbps.max(params.bw_floor_mbps),
        ),
    };
    compute + params.energy_weight * energy + net
}

/// Score a candidate list against one descriptor.
pub fn score_candidates(
    configs: &[Configuration],
    descriptor: &RequestDescriptor,
    pool: &PoolConfig,
    network: &NetworkState,
    params: &RouterParams,
) -> Result<Vec<ScoredCandidate>, RouteError> {
    configs
        .iter()
        .map(|c| {
            let profile = pool
                .profile(&c.model_id)
                .ok_or_else(|| RouteError::UnknownModel(c.model_id.clone()))?;
            Ok(ScoredCandidate {
                config: c.clone(),
                q_hat: predict_quality(c, descriptor, profile, &params.quality),
                c_hat: estimate_cost(c, profile, network, &params.cost),
            })
        })
        .collect()
}

/// Deterministic ordering used for sorting and tie-breaking: cheaper first,
/// then higher quality, then edge before cloud, then model id, then lower
/// resolution.
fn candidate_order(a: &ScoredCandidate, b: &ScoredCandidate) -> std::cmp::Ordering {
    a.c_hat
        .total_cmp(&b.c_hat)
        .then(b.q_hat.total_cmp(&a.q_hat))
        .then_with(|| placement_rank(a).cmp(&placement_rank(b)))
        .then_with(|| a.config.model_id.cmp(&b.config.model_id))
        .then(a.config.resolution.cmp(&b.config.resolution))
}

fn placement_rank(c: &ScoredCandidate) -> u8 {
    match c.config.placement {
        Tier::Edge => 0,
        Tier::Cloud => 1,
    }
}

/// Build the per-request Pareto frontier: sort by estimated cost and keep
/// only candidates with strictly increasing predicted quality. The result
/// equals the dominance skyline of the input (one representative per
/// coincident (cost, quality) point).
pub fn pareto_frontier(scored: &[ScoredCandidate]) -> Result<Vec<ScoredCandidate>, RouteError> {
    if scored.is_empty() {
        return Err(RouteError::EmptyCandidates);
    }
    let mut sorted: Vec<ScoredCandidate> = scored.to_vec();
    sorted.sort_by(candidate_order);
    let mut frontier: Vec<ScoredCandidate> = Vec::new();
    for cand in sorted {
        let keep = match frontier.last() {
            None => true,
            Some(last) => cand.q_hat > last.q_hat,
        };
        if keep {
            frontier.push(cand);
        }
    }
    Ok(frontier)
}

/// Best member of one tier by predicted quality (deterministic tie-break:
/// lower cost, then model id, then lower resolution).
fn best_of_tier(frontier: &[ScoredCandidate], tier: Tier) -> Option<&ScoredCandidate> {
    frontier
        .iter()
        .filter(|c| c.config.placement == tier)
        .max_by(|a, b| {
            a.q_hat
                .total_cmp(&b.q_hat)
                .then(b.c_hat.total_cmp(&a.c_hat))
                .then_with(|| b.config.model_id.cmp(&a.config.model_id))
                .then(b.config.resolution.cmp(&a.config.resolution))
        })
}

/// Apply the edge-preferring decision rule to a frontier.
///
/// Below the bandwidth guard the best edge member is chosen outright.
/// Otherwise the best edge member wins if it reaches the operating point;
/// a cloud member wins only if it improves predicted quality by more than
/// `delta_min`.
pub fn decide(
    frontier: &[ScoredCandidate],
    network: &NetworkState,
    tau_edge: f64,
    delta_min: f64,
) -> Result<RoutingDecision, RouteError> {
    if frontier.is_empty() {
        return Err(RouteError::EmptyCandidates);
    }
    let best_edge = best_of_tier(frontier, Tier::Edge);
    let best_cloud = best_of_tier(frontier, Tier::Cloud);

    let decision = |chosen: &ScoredCandidate, reason| RoutingDecision {
        chosen: chosen.clone(),
        frontier: frontier.to_vec(),
        reason,
        tau_edge,
        delta_min,
    };

    if network.guard_active() {
        let edge = best_edge.ok_or(RouteError::NoEdgeCandidate)?;
        return Ok(decision(edge, DecisionReason::BandwidthGuard));
    }
    match (best_edge, best_cloud) {
        (Some(edge), cloud) => {
            if edge.q_hat >= tau_edge {
                Ok(decision(edge, DecisionReason::EdgeSufficient))
            } else if let Some(cloud) = cloud.filter(|c| c.q_hat - edge.q_hat > delta_min) {
                Ok(decision(cloud, DecisionReason::CloudJustified))
            } else {
                Ok(decision(edge, DecisionReason::CloudGainTooSmall))
            }
        }
        // Every edge candidate was dominated out of the frontier; the cloud
        // member is the only sensible pick.
        (None, Some(cloud)) => Ok(decision(cloud, DecisionReason::CloudJustified)),
        (None, None) => Err(RouteError::EmptyCandidates),
    }
}

/// Full routing pipeline: enumerate, score, build the frontier, decide.
pub fn route(
    descriptor: &RequestDescriptor,
    pool: &PoolConfig,
    network: &NetworkState,
    params: &RouterParams,
) -> Result<RoutingDecision, RouteError> {
    let configs = candidates(pool, network);
    if configs.is_empty() {
        return Err(if network.guard_active() {
            RouteError::NoEdgeCandidate
        } else {
            RouteError::EmptyCandidates
        });
    }
    let scored = score_candidates(&configs, descriptor, pool, network, params)?;
    let frontier = pareto_frontier(&scored)?;
    decide(&frontier, network, params.tau_edge, params.delta_min)
}
