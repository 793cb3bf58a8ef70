//! Hidden outcome oracle.
//!
//! Stands in for real model answers: a Bernoulli draw whose success
//! probability shares the quality predictor's overall shape but runs on
//! its own coefficients, strengths, and a logistic noise term, all loaded
//! from a config kept separate from the router's bundle by contract. The
//! router never sees these values; its predictions stay imperfect the way
//! they are against real models.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::SimError;
use crate::features::{FeatureVector, FusionWeights};
use crate::rng::{hash_str, salt, stream};

pub const TRUTH_SCHEMA: &str = "truth/1";

/// Hidden per-model parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthModelEntry {
    /// Base success probability before penalties (not the same thing as
    /// the router's calibrated accuracy; tuned so the empirical accuracy
    /// over the reference workload lands on the published targets).
    pub base: f64,
    /// Intended empirical accuracy at the calibration resolution.
    pub target_accuracy: f64,
    pub strengths: crate::pool::Strengths,
}

/// The generator config, `truth/1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthConfig {
    #[serde(default = "default_truth_schema")]
    pub schema: String,
    pub res_coeff: f64,
    pub kappa: f64,
    /// Scale of the logistic perturbation on the success probability.
    pub noise_scale: f64,
    pub beta: [f64; 6],
    pub weights: FusionWeights,
    pub models: BTreeMap<String, TruthModelEntry>,
}

fn default_truth_schema() -> String {
    TRUTH_SCHEMA.to_string()
}

impl TruthConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.schema != TRUTH_SCHEMA {
            return Err(SimError::BadTruthConfig(format!(
                "schema '{}' is not '{TRUTH_SCHEMA}'",
                self.schema
            )));
        }
        if self.models.is_empty() {
            return Err(SimError::BadTruthConfig("no models".into()));
        }
        for (id, m) in &self.models {
            if !(0.0..=1.5).contains(&m.base) {
                return Err(SimError::BadTruthConfig(format!("model '{id}': base {}", m.base)));
            }
        }
        Ok(())
    }

    /// Reference generator: coefficients deliberately offset from the
    /// router's priors, base probabilities pinned so per-model empirical
    /// accuracy over the reference workload matches the published tier
    /// accuracies (edge pair near 66.5, cloud pair near 74.4).
    pub fn reference() -> Self {
        use crate::pool::Strengths;
        let entry = |base: f64, target: f64, s: (f64, f64, f64)| TruthModelEntry {
            base,
            target_accuracy: target,
            strengths: Strengths { blur: s.0, detail: s.1, reasoning: s.2 },
        };
        let mut models = BTreeMap::new();
        models.insert("qwen3-vl-2b".to_string(), entry(0.7642, 0.680, (0.58, 0.72, 0.48)));
        models.insert("smolvlm-2b".to_string(), entry(0.7485, 0.650, (0.47, 0.58, 0.43)));
        models.insert("llava-ov-8b".to_string(), entry(0.8071, 0.740, (0.72, 0.62, 0.88)));
        models.insert("qwen3-vl-8b".to_string(), entry(0.8107, 0.748, (0.78, 0.82, 0.68)));
        Self {
            schema: TRUTH_SCHEMA.to_string(),
            res_coeff: 0.06,
            kappa: 1.15,
            noise_scale: 0.05,
            beta: [1.0 / 6.0; 6],
            weights: FusionWeights::default(),
            models,
        }
    }

    pub fn parse(text: &str) -> Result<Self, SimError> {
        let cfg: TruthConfig = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| SimError::BadTruthConfig(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| SimError::BadTruthConfig(e.to_string()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Success probability of one model on one request, before noise.
pub fn outcome_probability(
    cfg: &TruthConfig,
    features: &FeatureVector,
    model_id: &str,
    r_cal: u32,
    resolution: u32,
) -> Result<f64, SimError> {
    let entry = cfg
        .models
        .get(model_id)
        .ok_or_else(|| SimError::BadTruthConfig(format!("model '{model_id}' not in generator")))?;
    let desc = features.descriptor(cfg.beta, cfg.weights)?;
    let gap = |need: f64, strength: f64| (need - strength).max(0.0);
    let g_blur = gap(desc.needs.blur, entry.strengths.blur);
    let g_detail = gap(desc.needs.detail, entry.strengths.detail);
    let g_reason = gap(desc.needs.reasoning, entry.strengths.reasoning);
    let mismatch = g_blur * g_blur + g_detail * g_detail + g_reason * g_reason;
    let res_term = cfg.res_coeff * (f64::from(resolution).log2() - f64::from(r_cal).log2());
    let p = entry.base + res_term - cfg.kappa * mismatch - desc.d * (1.0 - entry.base);
    Ok(p.clamp(0.0, 1.0))
}

/// Bernoulli outcome, deterministic per (seed, request id, model id).
pub fn true_outcome(
    cfg: &TruthConfig,
    features: &FeatureVector,
    model_id: &str,
    r_cal: u32,
    resolution: u32,
    request_id: u64,
    seed: u64,
) -> Result<f64, SimError> {
    let p = outcome_probability(cfg, features, model_id, r_cal, resolution)?;
    let mut rng = stream(&[seed, salt::OUTCOME, request_id, hash_str(model_id)]);
    let u: f64 = rng.random_range(1e-12..1.0 - 1e-12);
    let noise = cfg.noise_scale * (u / (1.0 - u)).ln();
    let p_noisy = (p + noise).clamp(0.0, 1.0);
    let v: f64 = rng.random();
    Ok(if v < p_noisy { 1.0 } else { 0.0 })
}
