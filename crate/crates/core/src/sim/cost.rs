//! Latency, energy, and network accounting.
//!
//! Per-model GPU latency is drawn from a log-normal fitted to (mean, P95)
//! priors; cloud requests add a fixed communication overhead and the image
//! transfer time; per-request energy is drawn from a per-tier normal
//! clipped at zero. The power-trace integrator implements the dynamic
//! energy definition directly and doubles as the processor for recorded
//! traces.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::SimError;
use crate::pool::Tier;
use crate::rng::{hash_str, salt, stream};

pub const COST_SCHEMA: &str = "cost/1";

/// z-score of the 95th percentile of a standard normal.
const Z95: f64 = 1.644_853_626_951_472_2;

/// GPU latency prior of one model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatencyPrior {
    pub mean_ms: f64,
    pub p95_ms: f64,
}

impl LatencyPrior {
    /// Log-normal parameters (mu, sigma) whose mean and 95th percentile
    /// match this prior exactly.
    pub fn lognormal(&self) -> Result<(f64, f64), SimError> {
        if self.mean_ms <= 0.0 || self.p95_ms < self.mean_ms {
            return Err(SimError::BadCostModel(format!(
                "latency prior needs 0 < mean <= p95, got ({}, {})",
                self.mean_ms, self.p95_ms
            )));
        }
        let spread = (self.p95_ms / self.mean_ms).ln();
        if spread == 0.0 {
            return Ok((self.mean_ms.ln(), 0.0));
        }
        let disc = Z95 * Z95 - 2.0 * spread;
        if disc < 0.0 {
            return Err(SimError::BadCostModel(format!(
                "p95/mean ratio {} too heavy for a log-normal",
                self.p95_ms / self.mean_ms
            )));
        }
        let sigma = Z95 - disc.sqrt();
        let mu = self.mean_ms.ln() - sigma * sigma / 2.0;
        Ok((mu, sigma))
    }
}

/// Per-tier energy prior (per-request normal, clipped at zero).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyPrior {
    pub mean_j: f64,
    pub sd_j: f64,
}

/// The simulation cost model, `cost/1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TierCostModel {
    #[serde(default = "default_cost_schema")]
    pub schema: String,
    pub gpu_latency: BTreeMap<String, LatencyPrior>,
    /// Fixed cloud communication overhead (tunnel plus handshake), ms.
    pub cloud_comm_ms: f64,
    /// Image payload shipped to the cloud, bytes.
    pub payload_bytes: u64,
    /// Edge-side routing overhead draw, uniform in [min, max] ms.
    pub edge_overhead_ms: (f64, f64),
    pub edge_energy: EnergyPrior,
    pub cloud_energy: EnergyPrior,
    /// Idle power subtracted by the trace integrator, watts.
    pub idle_power_w: f64,
    /// Power sampling period, ms.
    pub power_period_ms: f64,
}

fn default_cost_schema() -> String {
    COST_SCHEMA.to_string()
}

impl TierCostModel {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.schema != COST_SCHEMA {
            return Err(SimError::BadCostModel(format!(
                "schema '{}' is not '{COST_SCHEMA}'",
                self.schema
            )));
        }
        for prior in self.gpu_latency.values() {
            prior.lognormal()?;
        }
        if self.cloud_comm_ms < 0.0
            || self.payload_bytes == 0
            || self.edge_overhead_ms.0 > self.edge_overhead_ms.1
            || self.edge_overhead_ms.0 < 0.0
            || self.edge_energy.mean_j <= 0.0
            || self.cloud_energy.mean_j <= 0.0
            || self.edge_energy.sd_j < 0.0
            || self.cloud_energy.sd_j < 0.0
            || self.power_period_ms <= 0.0
        {
            return Err(SimError::BadCostModel("nonpositive cost parameter".into()));
        }
        Ok(())
    }

    /// Reference deployment costs. Per-model GPU latencies come from the
    /// measured priors; the dominant edge model and the communication
    /// overhead are set so tier totals reproduce the published end-to-end
    /// means (edge 824 ms / 7.4 J, cloud 2408 ms / 26.0 J at 100 Mbps).
    pub fn reference() -> Self {
        let mut gpu_latency = BTreeMap::new();
        gpu_latency.insert("qwen3-vl-2b".to_string(), LatencyPrior { mean_ms: 804.0, p95_ms: 1167.0 });
        gpu_latency.insert("smolvlm-2b".to_string(), LatencyPrior { mean_ms: 1468.0, p95_ms: 1846.0 });
        gpu_latency.insert("llava-ov-8b".to_string(), LatencyPrior { mean_ms: 281.0, p95_ms: 371.0 });
        gpu_latency.insert("qwen3-vl-8b".to_string(), LatencyPrior { mean_ms: 222.0, p95_ms: 282.0 });
        Self {
            schema: COST_SCHEMA.to_string(),
            gpu_latency,
            cloud_comm_ms: 2165.0,
            payload_bytes: 250_000,
            edge_overhead_ms: (10.0, 30.0),
            edge_energy: EnergyPrior { mean_j: 7.4, sd_j: 0.6 },
            cloud_energy: EnergyPrior { mean_j: 26.0, sd_j: 1.5 },
            idle_power_w: 15.0,
            power_period_ms: 50.0,
        }
    }

    pub fn parse(text: &str) -> Result<Self, SimError> {
        let cfg: TierCostModel = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| SimError::BadCostModel(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| SimError::BadCostModel(e.to_string()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Image transfer time over the configured bandwidth, ms.
pub fn transfer_ms(payload_bytes: u64, bandwidth_mbps: f64) -> f64 {
    let bits = payload_bytes as f64 * 8.0;
    bits / (bandwidth_mbps.max(1e-9) * 1e6) * 1e3
}

/// Simulated end-to-end latency of one executed request, ms.
///
/// Edge: GPU draw plus a routing-overhead draw in the configured range.
/// Cloud: GPU draw plus fixed communication overhead plus transfer time.
/// With noise disabled the draws collapse to their means.
pub fn simulate_latency(
    model_id: &str,
    placement: Tier,
    cost: &TierCostModel,
    bandwidth_mbps: f64,
    request_id: u64,
    seed: u64,
    noise: bool,
) -> Result<f64, SimError> {
    let prior = cost
        .gpu_latency
        .get(model_id)
        .ok_or_else(|| SimError::BadCostModel(format!("no latency prior for '{model_id}'")))?;
    let mut rng = stream(&[seed, salt::LATENCY, request_id, hash_str(model_id)]);
    let gpu = if noise {
        let (mu, sigma) = prior.lognormal()?;
        let z: f64 = rng.sample(StandardNormal);
        (mu + sigma * z).exp()
    } else {
        prior.mean_ms
    };
    Ok(match placement {
        Tier::Edge => {
            let (lo, hi) = cost.edge_overhead_ms;
            let overhead = if noise { rng.random_range(lo..=hi) } else { (lo + hi) / 2.0 };
            gpu + overhead
        }
        Tier::Cloud => gpu + cost.cloud_comm_ms + transfer_ms(cost.payload_bytes, bandwidth_mbps),
    })
}

/// Simulated per-request energy, joules (per-tier normal clipped at zero).
pub fn simulate_energy(
    placement: Tier,
    cost: &TierCostModel,
    request_id: u64,
    seed: u64,
    noise: bool,
) -> f64 {
    let prior = match placement {
        Tier::Edge => cost.edge_energy,
        Tier::Cloud => cost.cloud_energy,
    };
    if !noise {
        return prior.mean_j;
    }
    let mut rng = stream(&[seed, salt::ENERGY, request_id]);
    let z: f64 = rng.sample(StandardNormal);
    (prior.mean_j + prior.sd_j * z).max(0.0)
}

/// A fixed-period GPU power trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerTrace {
    /// (timestamp ms, watts) pairs at a uniform period.
    pub samples: Vec<(f64, f64)>,
    pub p_idle_w: f64,
}

impl PowerTrace {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.samples.len() < 2 {
            return Err(SimError::ShortTrace(self.samples.len()));
        }
        let period = self.samples[1].0 - self.samples[0].0;
        if period <= 0.0 {
            return Err(SimError::BadCostModel("trace timestamps must increase".into()));
        }
        for pair in self.samples.windows(2) {
            let dt = pair[1].0 - pair[0].0;
            if dt <= 0.0 || (dt - period).abs() > 1e-6 * period.max(1.0) {
                return Err(SimError::BadCostModel(
                    "trace timestamps must be uniform and strictly increasing".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Dynamic energy of a power trace: trapezoidal integral of
/// `max(0, P(t) - P_idle)`, joules. The clamp keeps sensor noise below
/// idle from contributing negative energy.
pub fn integrate_energy(trace: &PowerTrace) -> Result<f64, SimError> {
    trace.validate()?;
    let mut joules = 0.0;
    for pair in trace.samples.windows(2) {
        let (t0, p0) = pair[0];
        let (t1, p1) = pair[1];
        let a = (p0 - trace.p_idle_w).max(0.0);
        let b = (p1 - trace.p_idle_w).max(0.0);
        joules += (a + b) / 2.0 * (t1 - t0) / 1e3;
    }
    Ok(joules)
}
