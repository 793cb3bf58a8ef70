//! The heterogeneous model pool.
//!
//! Immutable profiles for the edge and cloud models (calibrated accuracy,
//! strength descriptors, latency priors, supported resolutions), pool
//! validation against the device memory budget, and enumeration of the
//! candidate configurations the router scores.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PoolError {
    #[error("duplicate model id '{0}'")]
    DuplicateId(String),
    #[error("edge footprint {found_gb:.2} GB exceeds budget {budget_gb:.2} GB")]
    BudgetExceeded { found_gb: f64, budget_gb: f64 },
    #[error("pool has no {0} model")]
    EmptyTier(&'static str),
    #[error("invalid profile '{id}': {reason}")]
    BadProfile { id: String, reason: String },
    #[error("cannot parse pool config: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Execution tier of a model (and of a routed request).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Edge,
    Cloud,
}

impl std::fmt::Display for Tier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tier::Edge => write!(f, "edge"),
            Tier::Cloud => write!(f, "cloud"),
        }
    }
}

/// Numeric precision; pinned by tier in the reference deployment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Precision {
    Int8,
    Fp16,
}

impl Precision {
    pub fn bytes_per_param(self) -> f64 {
        match self {
            Precision::Int8 => 1.0,
            Precision::Fp16 => 2.0,
        }
    }
}

/// Normalized capability descriptors, one per penalized axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Strengths {
    pub blur: f64,
    pub detail: f64,
    pub reasoning: f64,
}

/// Calibrated, immutable profile of one pool model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelProfile {
    pub id: String,
    /// Model size in billions of parameters.
    pub params_b: f64,
    pub tier: Tier,
    pub precision: Precision,
    pub strengths: Strengths,
    /// Calibrated accuracy a_m on the held-out split.
    pub accuracy: f64,
    /// Calibration resolution (model-specific maximum supported).
    pub r_cal: u32,
    /// Base latency factor B_m, proportional to model size.
    pub base_latency: f64,
    pub gpu_latency_mean_ms: f64,
    pub gpu_latency_p95_ms: f64,
    /// Ascending list of supported input resolutions, pixels.
    pub supported_resolutions: Vec<u32>,
}

impl ModelProfile {
    fn validate(&self) -> Result<(), PoolError> {
        let bad = |reason: String| PoolError::BadProfile { id: self.id.clone(), reason };
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !(unit(self.strengths.blur) && unit(self.strengths.detail) && unit(self.strengths.reasoning)) {
            return Err(bad(format!("strengths out of [0,1]: {:?}", self.strengths)));
        }
        if !unit(self.accuracy) {
            return Err(bad(format!("accuracy {} out of [0,1]", self.accuracy)));
        }
        if self.params_b <= 0.0 || self.base_latency <= 0.0 {
            return Err(bad("params_b and base latency must be positive".into()));
        }
        if self.supported_resolutions.is_empty()
            || !self.supported_resolutions.windows(2).all(|w| w[0] < w[1])
        {
            return Err(bad("supported resolutions must be a nonempty ascending list".into()));
        }
        if !self.supported_resolutions.contains(&self.r_cal) {
            return Err(bad(format!("r_cal {} not among supported resolutions", self.r_cal)));
        }
        match (self.tier, self.precision) {
            (Tier::Edge, Precision::Int8) | (Tier::Cloud, Precision::Fp16) => {}
            (tier, prec) => {
                return Err(bad(format!("tier {tier} pins precision, got {prec:?}")));
            }
        }
        if self.gpu_latency_mean_ms <= 0.0 || self.gpu_latency_p95_ms < self.gpu_latency_mean_ms {
            return Err(bad("gpu latency priors must be positive with P95 >= mean".into()));
        }
        Ok(())
    }

    /// Weight-only memory footprint in bytes.
    pub fn footprint_bytes(&self) -> f64 {
        self.params_b * self.precision.bytes_per_param() * 1e9
    }
}

/// The validated model pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolConfig {
    #[serde(default = "default_pool_schema")]
    pub schema: String,
    pub edge_vram_budget_bytes: u64,
    pub profiles: Vec<ModelProfile>,
}

fn default_pool_schema() -> String {
    POOL_SCHEMA.to_string()
}

pub const POOL_SCHEMA: &str = "pool/1";

impl PoolConfig {
    pub fn validate(&self) -> Result<(), PoolError> {
        if self.schema != POOL_SCHEMA {
            return Err(PoolError::Parse(format!(
                "schema '{}' is not '{POOL_SCHEMA}'",
                self.schema
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for p in &self.profiles {
            p.validate()?;
            if !seen.insert(p.id.clone()) {
                return Err(PoolError::DuplicateId(p.id.clone()));
            }
        }
        if !self.profiles.iter().any(|p| p.tier == Tier::Edge) {
            return Err(PoolError::EmptyTier("edge"));
        }
        if !self.profiles.iter().any(|p| p.tier == Tier::Cloud) {
            return Err(PoolError::EmptyTier("cloud"));
        }
        let edge_bytes: f64 = self
            .profiles
            .iter()
            .filter(|p| p.tier == Tier::Edge)
            .map(ModelProfile::footprint_bytes)
            .sum();
        if edge_bytes > self.edge_vram_budget_bytes as f64 {
            return Err(PoolError::BudgetExceeded {
                found_gb: edge_bytes / 1e9,
                budget_gb: self.edge_vram_budget_bytes as f64 / 1e9,
            });
        }
        Ok(())
    }

    pub fn profile(&self, id: &str) -> Option<&ModelProfile> {
        self.profiles.iter().find(|p| p.id == id)
    }

    pub fn tier_profiles(&self, tier: Tier) -> impl Iterator<Item = &ModelProfile> {
        self.profiles.iter().filter(move |p| p.tier == tier)
    }

    /// Keep only the listed models; validation is the caller's business
    /// (restricted pools may be single-tier).
    pub fn restricted_to(&self, ids: &[&str]) -> PoolConfig {
        PoolConfig {
            schema: self.schema.clone(),
            edge_vram_budget_bytes: self.edge_vram_budget_bytes,
            profiles: self
                .profiles
                .iter()
                .filter(|p| ids.contains(&p.id.as_str()))
                .cloned()
                .collect(),
        }
    }

    /// Parse a pool document (JSON or TOML, detected by content) and
    /// validate it.
    pub fn parse(text: &str) -> Result<Self, PoolError> {
        let pool: PoolConfig = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| PoolError::Parse(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| PoolError::Parse(e.to_string()))?
        };
        pool.validate()?;
        Ok(pool)
    }

    pub fn load(path: &Path) -> Result<Self, PoolError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// The reference four-model deployment: two INT8 edge models inside an
    /// 8 GB budget, two FP16 cloud models at a fixed cloud resolution.
    /// Strengths and accuracies are shipped defaults; calibration overrides
    /// the accuracies.
    pub fn reference() -> Self {
        let edge_resolutions = vec![224, 336, 448];
        let pool = PoolConfig {
            schema: POOL_SCHEMA.to_string(),
            edge_vram_budget_bytes: 8_000_000_000,
            profiles: vec![
                ModelProfile {
                    id: "qwen3-vl-2b".into(),
                    params_b: 2.0,
                    tier: Tier::Edge,
                    precision: Precision::Int8,
                    strengths: Strengths { blur: 0.55, detail: 0.75, reasoning: 0.50 },
                    accuracy: 0.680,
                    r_cal: 448,
                    base_latency: 2.0,
                    gpu_latency_mean_ms: 682.0,
                    gpu_latency_p95_ms: 990.0,
                    supported_resolutions: edge_resolutions.clone(),
                },
                ModelProfile {
                    id: "smolvlm-2b".into(),
                    params_b: 2.0,
                    tier: Tier::Edge,
                    precision: Precision::Int8,
                    strengths: Strengths { blur: 0.50, detail: 0.55, reasoning: 0.45 },
                    accuracy: 0.650,
                    r_cal: 448,
                    base_latency: 2.0,
                    gpu_latency_mean_ms: 1468.0,
                    gpu_latency_p95_ms: 1846.0,
                    supported_resolutions: edge_resolutions,
                },
                ModelProfile {
                    id: "llava-ov-8b".into(),
                    params_b: 8.0,
                    tier: Tier::Cloud,
                    precision: Precision::Fp16,
                    strengths: Strengths { blur: 0.70, detail: 0.65, reasoning: 0.85 },
                    accuracy: 0.740,
                    r_cal: 336,
                    base_latency: 8.0,
                    gpu_latency_mean_ms: 281.0,
                    gpu_latency_p95_ms: 371.0,
                    supported_resolutions: vec![336],
                },
                ModelProfile {
                    id: "qwen3-vl-8b".into(),
                    params_b: 8.0,
                    tier: Tier::Cloud,
                    precision: Precision::Fp16,
                    strengths: Strengths { blur: 0.75, detail: 0.85, reasoning: 0.70 },
                    accuracy: 0.748,
                    r_cal: 336,
                    base_latency: 8.0,
                    gpu_latency_mean_ms: 222.0,
                    gpu_latency_p95_ms: 282.0,
                    supported_resolutions: vec![336],
                },
            ],
        };
        pool.validate().expect("reference pool is valid");
        pool
    }

    /// Ids of the static-routing pair (the Qwen edge/cloud models).
    pub fn static_pair() -> (&'static str, &'static str) {
        ("qwen3-vl-2b", "qwen3-vl-8b")
    }
}

/// Network conditions seen by the router.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkState {
    pub bandwidth_mbps: f64,
    /// Bandwidth guard below which all requests execute on the edge.
    pub guard_mbps: f64,
}

impl NetworkState {
    pub fn new(bandwidth_mbps: f64) -> Self {
        Self { bandwidth_mbps, guard_mbps: 15.0 }
    }

    pub fn guard_active(&self) -> bool {
        self.bandwidth_mbps < self.guard_mbps
    }
}

impl Default for NetworkState {
    fn default() -> Self {
        Self::new(100.0)
    }
}

/// A candidate configuration: (model, precision, resolution, placement).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Configuration {
    pub model_id: String,
    pub precision: Precision,
    pub resolution: u32,
    pub placement: Tier,
}

/// Enumerate the candidate configurations for a request.
///
/// Edge models contribute every supported resolution; cloud models run at
/// their calibration resolution only. Below the bandwidth guard, cloud
/// candidates are excluded entirely.
pub fn candidates(pool: &PoolConfig, network: &NetworkState) -> Vec<Configuration> {
    let mut out = Vec::new();
    for p in &pool.profiles {
        match p.tier {
            Tier::Edge => {
                for &r in &p.supported_resolutions {
                    out.push(Configuration {
                        model_id: p.id.clone(),
                        precision: p.precision,
                        resolution: r,
                        placement: Tier::Edge,
                    });
                }
            }
            Tier::Cloud => {
                if !network.guard_active() {
                    out.push(Configuration {
                        model_id: p.id.clone(),
                        precision: p.precision,
                        resolution: p.r_cal,
                        placement: Tier::Cloud,
                    });
                }
            }
        }
    }
    out
}
