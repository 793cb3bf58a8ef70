//! Routing strategies behind one common interface.
//!
//! Six deployable strategies (edge-only, cloud-only, the full router, the
//! text-only and image-only ablations, and static routing over the Qwen
//! pair) plus the hindsight oracle used as an upper bound. The ablations
//! zero out the excluded modality entirely: its fusion weight and the
//! needs derived from it, so their decisions are invariant to that input.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{FeatureVector, FusionWeights, RequestDescriptor};
use crate::pool::{NetworkState, PoolConfig, Tier};
use crate::router::{route, RouteError, RouterParams, RoutingDecision, TAU_ALWAYS_EDGE, TAU_NEVER_EDGE};

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error("missing outcome for model '{0}'")]
    MissingOutcome(String),
    #[error("the oracle needs per-model outcomes; it does not route requests")]
    OracleNotRoutable,
    #[error("static pool pair ({0}, {1}) not found in the pool")]
    BadStaticPair(String, String),
    #[error(transparent)]
    Route(#[from] RouteError),
    #[error(transparent)]
    Feature(#[from] crate::features::FeatureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StrategyKind {
    EdgeOnly,
    CloudOnly,
    InarVl,
    TextOnly,
    ImageOnly,
    Static,
    Oracle,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 7] = [
        StrategyKind::EdgeOnly,
        StrategyKind::CloudOnly,
        StrategyKind::InarVl,
        StrategyKind::TextOnly,
        StrategyKind::ImageOnly,
        StrategyKind::Static,
        StrategyKind::Oracle,
    ];

    /// CLI flag spelling.
    pub fn flag(self) -> &'static str {
        match self {
            StrategyKind::EdgeOnly => "edge",
            StrategyKind::CloudOnly => "cloud",
            StrategyKind::InarVl => "inar",
            StrategyKind::TextOnly => "text",
            StrategyKind::ImageOnly => "image",
            StrategyKind::Static => "static",
            StrategyKind::Oracle => "oracle",
        }
    }

    pub fn from_flag(flag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.flag() == flag)
    }
}

impl std::fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            StrategyKind::EdgeOnly => "EdgeOnly",
            StrategyKind::CloudOnly => "CloudOnly",
            StrategyKind::InarVl => "InarVl",
            StrategyKind::TextOnly => "TextOnly",
            StrategyKind::ImageOnly => "ImageOnly",
            StrategyKind::Static => "Static",
            StrategyKind::Oracle => "Oracle",
        };
        write!(f, "{name}")
    }
}

/// A strategy instance: the kind plus its pool restriction parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Strategy {
    pub kind: StrategyKind,
    /// The (edge, cloud) model pair used by static routing.
    pub static_pair: (String, String),
}

impl Strategy {
    pub fn new(kind: StrategyKind) -> Self {
        let (edge, cloud) = PoolConfig::static_pair();
        Self { kind, static_pair: (edge.to_string(), cloud.to_string()) }
    }

    /// Fusion weights this strategy routes with.
    pub fn weights(&self, base: FusionWeights) -> FusionWeights {
        match self.kind {
            StrategyKind::TextOnly => FusionWeights::TEXT_ONLY,
            StrategyKind::ImageOnly => FusionWeights::IMAGE_ONLY,
            _ => base,
        }
    }

    /// Zero out needs derived from the excluded modality so ablation
    /// decisions cannot depend on it.
    fn mask_descriptor(&self, mut desc: RequestDescriptor) -> RequestDescriptor {
        match self.kind {
            StrategyKind::TextOnly => {
                desc.needs.blur = 0.0;
                desc.needs.detail = 0.0;
                desc.image.s_detail = 0.0;
            }
            StrategyKind::ImageOnly => {
                desc.needs.reasoning = 0.0;
            }
            _ => {}
        }
        desc
    }

    fn restricted_pool(&self, pool: &PoolConfig) -> Result<PoolConfig, StrategyError> {
        match self.kind {
            StrategyKind::EdgeOnly => {
                let mut p = pool.clone();
                p.profiles.retain(|m| m.tier == Tier::Edge);
                Ok(p)
            }
            StrategyKind::Static => {
                let (edge, cloud) = (&self.static_pair.0, &self.static_pair.1);
                let p = pool.restricted_to(&[edge.as_str(), cloud.as_str()]);
                if p.profiles.len() != 2 {
                    return Err(StrategyError::BadStaticPair(edge.clone(), cloud.clone()));
                }
                Ok(p)
            }
            _ => Ok(pool.clone()),
        }
    }

    fn thresholds(&self, params: &RouterParams) -> (f64, f64) {
        match self.kind {
            // Always accept the best edge candidate.
            StrategyKind::EdgeOnly => (TAU_ALWAYS_EDGE, params.delta_min),
            // Never accept edge outright, and any cloud gain justifies
            // offloading; the guard still forces the edge fallback.
            StrategyKind::CloudOnly => (TAU_NEVER_EDGE, -TAU_NEVER_EDGE),
            _ => (params.tau_edge, params.delta_min),
        }
    }
}

/// Route one request under a strategy.
pub fn select(
    strategy: &Strategy,
    features: &FeatureVector,
    pool: &PoolConfig,
    network: &NetworkState,
    params: &RouterParams,
    beta: [f64; 6],
    base_weights: FusionWeights,
) -> Result<RoutingDecision, StrategyError> {
    if strategy.kind == StrategyKind::Oracle {
        return Err(StrategyError::OracleNotRoutable);
    }
    let weights = strategy.weights(base_weights);
    let descriptor = strategy.mask_descriptor(features.descriptor(beta, weights)?);
    let restricted = strategy.restricted_pool(pool)?;
    let (tau_edge, delta_min) = strategy.thresholds(params);
    let effective = RouterParams { tau_edge, delta_min, ..*params };
    Ok(route(&descriptor, &restricted, network, &effective)?)
}

/// Hindsight best-of-pool selection over per-model outcomes for a single
/// request. Ties break toward edge placement, then lexicographic model id.
pub fn oracle_select(
    outcomes: &BTreeMap<String, f64>,
    pool: &PoolConfig,
) -> Result<(String, f64), StrategyError> {
    let mut best: Option<(&str, f64, Tier)> = None;
    for profile in &pool.profiles {
        let score = *outcomes
            .get(&profile.id)
            .ok_or_else(|| StrategyError::MissingOutcome(profile.id.clone()))?;
        let better = match best {
            None => true,
            Some((best_id, best_score, best_tier)) => {
                score > best_score
                    || (score == best_score
                        && (tier_rank(profile.tier) < tier_rank(best_tier)
                            || (profile.tier == best_tier && profile.id.as_str() < best_id)))
            }
        };
        if better {
            best = Some((&profile.id, score, profile.tier));
        }
    }
    best.map(|(id, score, _)| (id.to_string(), score))
        .ok_or_else(|| StrategyError::MissingOutcome("<empty pool>".to_string()))
}

fn tier_rank(tier: Tier) -> u8 {
    match tier {
        Tier::Edge => 0,
        Tier::Cloud => 1,
    }
}
