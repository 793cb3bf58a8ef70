//! One-time offline calibration.
//!
//! Estimates per-model accuracy from labeled records, fits the open
//! coefficients (detail-resolution scale, axis weights, optional
//! resolution/mismatch overrides) by coordinate grid search under monotonic
//! constraints, picks the edge operating point by bisection on the routed
//! edge fraction, and freezes everything into a content-hashed bundle.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::features::{
    descriptor_from_axes, quintile_boundaries, validate_beta, FeatureVector, FusionWeights,
};
use crate::parallel::map_indexed;
use crate::pool::{Configuration, NetworkState, PoolConfig, Tier};
use crate::router::{
    pareto_frontier, predict_quality, score_candidates, QualityModelParams, RouterParams,
    ScoredCandidate, TAU_ALWAYS_EDGE,
};

pub const CALREC_SCHEMA: &str = "calrec/1";
pub const BUNDLE_SCHEMA: &str = "bundle/1";

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("no records for model '{0}'")]
    NoRecords(String),
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),
    #[error("records cover too little of the complexity range: {0}")]
    InsufficientCoverage(String),
    #[error("edge-fraction target {target} unreachable (attainable {lo:.3}..{hi:.3})")]
    TargetUnreachable { target: f64, lo: f64, hi: f64 },
    #[error("record {record} is missing an outcome for model '{model}'")]
    MissingOutcome { record: u64, model: String },
    #[error(transparent)]
    Feature(#[from] crate::features::FeatureError),
    #[error(transparent)]
    Route(#[from] crate::router::RouteError),
}

/// One model's observed outcome for a record, at the resolution it ran.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelOutcome {
    pub resolution: u32,
    /// Correctness in {0,1} or a soft score in [0,1].
    pub score: f64,
}

/// A labeled calibration sample: the raw request features plus an outcome
/// for every pool model. The standard protocol measures each model at its
/// calibration resolution; resolution-sweep records vary it so the
/// resolution-linked coefficients become identifiable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRecord {
    #[serde(default = "default_calrec_schema")]
    pub schema: String,
    pub id: u64,
    pub features: FeatureVector,
    pub outcomes: BTreeMap<String, ModelOutcome>,
}

fn default_calrec_schema() -> String {
    CALREC_SCHEMA.to_string()
}

impl CalibrationRecord {
    /// Every pool model must have an outcome with a score in [0,1].
    pub fn validate(&self, pool: &PoolConfig) -> Result<(), CalibrationError> {
        for p in &pool.profiles {
            match self.outcomes.get(&p.id) {
                None => {
                    return Err(CalibrationError::MissingOutcome {
                        record: self.id,
                        model: p.id.clone(),
                    })
                }
                Some(o) if !(0.0..=1.0).contains(&o.score) => {
                    return Err(CalibrationError::ConstraintViolation(format!(
                        "record {} score {} for '{}' out of [0,1]",
                        self.id, o.score, p.id
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Mean observed outcome for one model, with the sample size behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracyEstimate {
    pub accuracy: f64,
    pub record_count: usize,
}

/// Calibrated accuracy of a model: the mean outcome over the records.
pub fn estimate_accuracy(
    records: &[CalibrationRecord],
    model_id: &str,
) -> Result<AccuracyEstimate, CalibrationError> {
    let scores: Vec<f64> = records
        .iter()
        .filter_map(|r| r.outcomes.get(model_id).map(|o| o.score))
        .collect();
    if scores.is_empty() {
        return Err(CalibrationError::NoRecords(model_id.to_string()));
    }
    Ok(AccuracyEstimate {
        accuracy: scores.iter().sum::<f64>() / scores.len() as f64,
        record_count: scores.len(),
    })
}

/// Search grids and limits of the coefficient fitter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitOptions {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_step: f64,
    pub beta_step: f64,
    /// At most this many axis weights may move off the uniform prior.
    pub max_free_axes: usize,
    pub fit_res_coeff: bool,
    pub fit_kappa: bool,
    pub res_coeff_max: f64,
    pub kappa_max: f64,
    pub coarse_step: f64,
    pub max_passes: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            lambda_min: 0.0,
            lambda_max: 0.5,
            lambda_step: 0.01,
            beta_step: 0.05,
            max_free_axes: 3,
            fit_res_coeff: false,
            fit_kappa: false,
            res_coeff_max: 0.14,
            kappa_max: 2.0,
            coarse_step: 0.01,
            max_passes: 8,
        }
    }
}

/// Outcome of the coefficient fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub quality: QualityModelParams,
    pub beta: [f64; 6],
    pub loss: f64,
    /// Coefficients left at their priors because the records carry no
    /// signal for them (e.g. res_coeff without resolution variation).
    pub unidentified: Vec<String>,
    pub passes: usize,
}

fn grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>, CalibrationError> {
    if step <= 0.0 || max < min {
        return Err(CalibrationError::ConstraintViolation(format!(
            "empty search grid [{min}, {max}] step {step}"
        )));
    }
    let n = ((max - min) / step).round() as usize;
    Ok((0..=n).map(|i| min + i as f64 * step).collect())
}

/// Mean squared error of predicted quality against the observed outcomes.
fn fit_loss(
    records: &[CalibrationRecord],
    pool: &PoolConfig,
    quality: &QualityModelParams,
    beta: [f64; 6],
    weights: FusionWeights,
) -> f64 {
    let per_record: Vec<(f64, usize)> = map_indexed(records.len(), |i| {
        let rec = &records[i];
        let Ok(desc) = descriptor_from_axes(rec.features.image, rec.features.text, beta, weights)
        else {
            return (0.0, 0);
        };
        let mut sq = 0.0;
        let mut n = 0usize;
        for (model_id, outcome) in &rec.outcomes {
            let Some(profile) = pool.profile(model_id) else { continue };
            let config = Configuration {
                model_id: model_id.clone(),
                precision: profile.precision,
                resolution: outcome.resolution,
                placement: profile.tier,
            };
            let q = predict_quality(&config, &desc, profile, quality);
            sq += (q - outcome.score) * (q - outcome.score);
            n += 1;
        }
        (sq, n)
    });
    let (sum, count) = per_record
        .iter()
        .fold((0.0, 0usize), |(s, c), (sq, n)| (s + sq, c + n));
    if count == 0 {
        f64::INFINITY
    } else {
        sum / count as f64
    }
}

/// Centered variant used for the axis-weight search: per-model means are
/// profiled out of both prediction and outcome, so the weights are fitted
/// to the correlation structure of the outcomes rather than their level
/// (the level belongs to the accuracy estimates, which are already
/// pinned; without centering the search degenerates onto low-mean axes).
fn fit_loss_centered(
    records: &[CalibrationRecord],
    pool: &PoolConfig,
    quality: &QualityModelParams,
    beta: [f64; 6],
    weights: FusionWeights,
) -> f64 {
    let per_record: Vec<BTreeMap<String, (f64, f64)>> = map_indexed(records.len(), |i| {
        let rec = &records[i];
        let mut out = BTreeMap::new();
        let Ok(desc) = descriptor_from_axes(rec.features.image, rec.features.text, beta, weights)
        else {
            return out;
        };
        for (model_id, outcome) in &rec.outcomes {
            let Some(profile) = pool.profile(model_id) else { continue };
            let config = Configuration {
                model_id: model_id.clone(),
                precision: profile.precision,
                resolution: outcome.resolution,
                placement: profile.tier,
            };
            let q = predict_quality(&config, &desc, profile, quality);
            out.insert(model_id.clone(), (q, outcome.score));
        }
        out
    });
    let mut sums: BTreeMap<&str, (f64, f64, usize)> = BTreeMap::new();
    for rec in &per_record {
        for (model, (q, y)) in rec {
            let entry = sums.entry(model.as_str()).or_insert((0.0, 0.0, 0));
            entry.0 += q;
            entry.1 += y;
            entry.2 += 1;
        }
    }
    let mut loss = 0.0;
    let mut count = 0usize;
    for rec in &per_record {
        for (model, (q, y)) in rec {
            let (qs, ys, n) = sums[model.as_str()];
            let dev = (q - qs / n as f64) - (y - ys / n as f64);
            loss += dev * dev;
            count += 1;
        }
    }
    if count == 0 {
        f64::INFINITY
    } else {
        loss / count as f64
    }
}

/// Move one axis weight to `value` and renormalize the rest proportionally.
fn beta_with_axis(beta: [f64; 6], axis: usize, value: f64) -> Option<[f64; 6]> {
    let rest: f64 = 1.0 - beta[axis];
    let mut out = beta;
    out[axis] = value;
    let remaining = 1.0 - value;
    if rest > 1e-12 {
        let scale = remaining / rest;
        for (i, b) in out.iter_mut().enumerate() {
            if i != axis {
                *b = beta[i] * scale;
            }
        }
    } else {
        for (i, b) in out.iter_mut().enumerate() {
            if i != axis {
                *b = remaining / 5.0;
            }
        }
    }
    validate_beta(&out).ok()?;
    Some(out)
}

/// Fit the open coefficients by coordinate grid search under the monotonic
/// constraints (all grids are restricted to nonnegative values, which makes
/// the constraints hold by construction; a post-hoc validator re-checks).
pub fn fit_coefficients(
    records: &[CalibrationRecord],
    pool: &PoolConfig,
    initial_quality: QualityModelParams,
    initial_beta: [f64; 6],
    weights: FusionWeights,
    opts: &FitOptions,
) -> Result<FitResult, CalibrationError> {
    if records.is_empty() {
        return Err(CalibrationError::NoRecords("<any>".to_string()));
    }
    for rec in records {
        rec.validate(pool)?;
    }
    check_coverage(records, initial_beta, weights)?;

    let lambda_grid = grid(opts.lambda_min, opts.lambda_max, opts.lambda_step)?;
    let beta_grid = grid(0.0, 1.0, opts.beta_step)?;

    // Signal probes: coefficients without variation in the records stay at
    // their priors and are reported as unidentified.
    let mut unidentified = Vec::new();
    let has_res_variation = records.iter().any(|r| {
        r.outcomes.iter().any(|(id, o)| {
            pool.profile(id).is_some_and(|p| o.resolution != p.r_cal)
        })
    });
    let has_subanchor = records.iter().any(|r| {
        r.outcomes
            .iter()
            .any(|(_, o)| f64::from(o.resolution) < initial_quality.r_ref)
    });

    let mut quality = initial_quality;
    let mut beta = initial_beta;
    let mut loss = fit_loss(records, pool, &quality, beta, weights);
    let mut moved = [false; 6];
    let mut passes = 0;

    for _ in 0..opts.max_passes {
        passes += 1;
        let mut improved = false;

        if has_subanchor {
            for &lam in &lambda_grid {
                let mut q = quality;
                q.lambda_dr = lam;
                let l = fit_loss(records, pool, &q, beta, weights);
                if l + 1e-12 < loss {
                    loss = l;
                    quality = q;
                    improved = true;
                }
            }
        }

        if opts.fit_res_coeff && has_res_variation {
            for &rc in &grid(0.0, opts.res_coeff_max, opts.coarse_step)? {
                let mut q = quality;
                q.res_coeff = rc;
                let l = fit_loss(records, pool, &q, beta, weights);
                if l + 1e-12 < loss {
                    loss = l;
                    quality = q;
                    improved = true;
                }
            }
        }

        if opts.fit_kappa {
            for &k in &grid(0.0, opts.kappa_max, 0.1)? {
                let mut q = quality;
                q.kappa = k;
                let l = fit_loss(records, pool, &q, beta, weights);
                if l + 1e-12 < loss {
                    loss = l;
                    quality = q;
                    improved = true;
                }
            }
        }

        let mut centered = fit_loss_centered(records, pool, &quality, beta, weights);
        for axis in 0..6 {
            let free_used = moved.iter().filter(|m| **m).count();
            if !moved[axis] && free_used >= opts.max_free_axes {
                continue;
            }
            let mut best_here = None;
            for &v in &beta_grid {
                let Some(candidate) = beta_with_axis(beta, axis, v) else { continue };
                let l = fit_loss_centered(records, pool, &quality, candidate, weights);
                if l + 1e-12 < centered {
                    centered = l;
                    best_here = Some(candidate);
                }
            }
            if let Some(b) = best_here {
                beta = b;
                moved[axis] = true;
                improved = true;
            }
        }
        loss = fit_loss(records, pool, &quality, beta, weights);

        if !improved {
            break;
        }
    }

    if !has_subanchor {
        unidentified.push("lambda_dr".to_string());
    }
    if opts.fit_res_coeff && !has_res_variation {
        unidentified.push("res_coeff".to_string());
    }

    Ok(FitResult { quality, beta, loss, unidentified, passes })
}

fn check_coverage(
    records: &[CalibrationRecord],
    beta: [f64; 6],
    weights: FusionWeights,
) -> Result<(), CalibrationError> {
    let mut buckets = [false; 5];
    for rec in records {
        if let Ok(d) = descriptor_from_axes(rec.features.image, rec.features.text, beta, weights)
            .map(|desc| desc.d)
        {
            buckets[((d * 5.0).floor() as usize).min(4)] = true;
        }
    }
    let covered = buckets.iter().filter(|b| **b).count();
    if covered < 2 {
        return Err(CalibrationError::InsufficientCoverage(format!(
            "complexity values fall into {covered} of 5 buckets; need at least 2"
        )));
    }
    Ok(())
}

/// Post-hoc check of the three quoted monotonic constraints on fitted
/// parameters, independent of how the optimizer reached them.
pub fn validate_monotonic_constraints(quality: &QualityModelParams) -> Result<(), CalibrationError> {
    let fail = |s: String| Err(CalibrationError::ConstraintViolation(s));
    // Higher resolution never reduces quality: both resolution-linked
    // coefficients must be nonnegative.
    if quality.res_coeff < 0.0 || quality.lambda_dr < 0.0 {
        return fail(format!(
            "resolution terms must be nonnegative (res_coeff={}, lambda_dr={})",
            quality.res_coeff, quality.lambda_dr
        ));
    }
    // Larger need-strength gaps never improve quality.
    if quality.kappa < 0.0 {
        return fail(format!("mismatch coefficient must be nonnegative (kappa={})", quality.kappa));
    }
    // Higher-complexity queries hurt weaker models more: the d term carries
    // the (1 - a_m) factor structurally; verify on probe accuracies.
    let probe = |a: f64, d: f64| -d * (1.0 - a);
    let weak = probe(0.5, 0.8) - probe(0.5, 0.2);
    let strong = probe(0.9, 0.8) - probe(0.9, 0.2);
    if weak > strong + 1e-12 {
        return fail("complexity must hurt weaker models at least as much".to_string());
    }
    Ok(())
}

/// Precomputed per-request frontier summary used by the operating-point
/// search (the frontier itself does not depend on tau).
struct TierBest {
    q_edge: Option<f64>,
    q_cloud: Option<f64>,
}

fn tier_bests(
    features: &[FeatureVector],
    pool: &PoolConfig,
    params: &RouterParams,
    beta: [f64; 6],
    weights: FusionWeights,
    network: &NetworkState,
) -> Result<Vec<TierBest>, CalibrationError> {
    let configs = crate::pool::candidates(pool, network);
    let results: Vec<Result<TierBest, CalibrationError>> = map_indexed(features.len(), |i| {
        let desc = descriptor_from_axes(features[i].image, features[i].text, beta, weights)?;
        let scored = score_candidates(&configs, &desc, pool, network, params)?;
        let frontier = pareto_frontier(&scored)?;
        let best = |tier: Tier| {
            frontier
                .iter()
                .filter(|c: &&ScoredCandidate| c.config.placement == tier)
                .map(|c| c.q_hat)
                .max_by(f64::total_cmp)
        };
        Ok(TierBest { q_edge: best(Tier::Edge), q_cloud: best(Tier::Cloud) })
    });
    results.into_iter().collect()
}

fn edge_fraction(bests: &[TierBest], tau: f64, delta_min: f64) -> f64 {
    let edge = bests
        .iter()
        .filter(|b| match (b.q_edge, b.q_cloud) {
            (Some(qe), Some(qc)) => qe >= tau || qc - qe <= delta_min,
            (Some(_), None) => true,
            (None, _) => false,
        })
        .count();
    edge as f64 / bests.len().max(1) as f64
}

/// Pick the operating point by bisection so the routed edge fraction over
/// the given requests lands within `tolerance` of `target`.
pub fn fit_tau_edge(
    features: &[FeatureVector],
    pool: &PoolConfig,
    params: &RouterParams,
    beta: [f64; 6],
    weights: FusionWeights,
    network: &NetworkState,
    target: f64,
    tolerance: f64,
) -> Result<f64, CalibrationError> {
    if target >= 1.0 {
        return Ok(TAU_ALWAYS_EDGE);
    }
    let bests = tier_bests(features, pool, params, beta, weights, network)?;
    if bests.is_empty() {
        return Err(CalibrationError::NoRecords("<tau fit>".to_string()));
    }
    let q_max = bests
        .iter()
        .filter_map(|b| b.q_edge)
        .fold(f64::NEG_INFINITY, f64::max);
    let hi0 = if q_max.is_finite() { q_max + 1e-6 } else { 1.0 };
    let f = |tau: f64| edge_fraction(&bests, tau, params.delta_min);
    let (f_lo, f_hi) = (f(TAU_ALWAYS_EDGE), f(hi0));
    if target > f_lo + tolerance || target < f_hi - tolerance {
        return Err(CalibrationError::TargetUnreachable { target, lo: f_hi, hi: f_lo });
    }
    if (f_hi - target).abs() <= tolerance {
        // Includes target 0 when every request can justify offloading:
        // the operating point sits above any attainable quality.
        return Ok(hi0);
    }
    let (mut lo, mut hi) = (TAU_ALWAYS_EDGE.max(-2.0), hi0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
        if (f(lo) - target).abs() <= tolerance || hi - lo < 1e-12 {
            break;
        }
    }
    let tau = if (f(lo) - target).abs() <= (f(hi) - target).abs() { lo } else { hi };
    if (f(tau) - target).abs() > tolerance {
        return Err(CalibrationError::TargetUnreachable { target, lo: f_hi, hi: f_lo });
    }
    Ok(tau)
}

/// Provenance of a calibration run; the timestamp is excluded from the
/// content hash so fitting stays deterministic per (records, seed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleProvenance {
    pub seed: u64,
    pub record_count: usize,
    pub timestamp: String,
}

/// The frozen parameter bundle the router runs with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibratedBundle {
    #[serde(default = "default_bundle_schema")]
    pub schema: String,
    pub accuracy: BTreeMap<String, f64>,
    pub beta: [f64; 6],
    pub lambda_dr: f64,
    pub res_coeff: f64,
    pub kappa: f64,
    pub tau_edge: f64,
    pub delta_min: f64,
    pub quintile_boundaries: [f64; 4],
    #[serde(default)]
    pub unidentified: Vec<String>,
    pub provenance: BundleProvenance,
    pub frozen: bool,
    #[serde(default)]
    pub content_hash: String,
}

fn default_bundle_schema() -> String {
    BUNDLE_SCHEMA.to_string()
}

impl CalibratedBundle {
    /// Hash of the parameter payload (everything except timestamp, frozen
    /// flag, and the hash itself), stable across re-serialization.
    pub fn compute_hash(&self) -> String {
        let payload = serde_json::json!({
            "schema": self.schema,
            "accuracy": self.accuracy,
            "beta": self.beta,
            "lambda_dr": self.lambda_dr,
            "res_coeff": self.res_coeff,
            "kappa": self.kappa,
            "tau_edge": self.tau_edge,
            "delta_min": self.delta_min,
            "quintile_boundaries": self.quintile_boundaries,
            "unidentified": self.unidentified,
            "seed": self.provenance.seed,
            "record_count": self.provenance.record_count,
        });
        let digest = Sha256::digest(payload.to_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn freeze(&mut self) {
        self.content_hash = self.compute_hash();
        self.frozen = true;
    }

    pub fn hash_is_valid(&self) -> bool {
        self.content_hash == self.compute_hash()
    }

    /// Router parameters with the bundle's fitted values applied.
    pub fn router_params(&self, base: &RouterParams) -> RouterParams {
        let mut p = *base;
        p.quality.lambda_dr = self.lambda_dr;
        p.quality.res_coeff = self.res_coeff;
        p.quality.kappa = self.kappa;
        p.tau_edge = self.tau_edge;
        p.delta_min = self.delta_min;
        p
    }

    /// Pool with the bundle's calibrated accuracies applied.
    pub fn apply_to_pool(&self, pool: &PoolConfig) -> PoolConfig {
        let mut out = pool.clone();
        for profile in &mut out.profiles {
            if let Some(a) = self.accuracy.get(&profile.id) {
                profile.accuracy = *a;
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CalibrationError> {
        let bundle: CalibratedBundle = serde_json::from_str(text)
            .map_err(|e| CalibrationError::ConstraintViolation(format!("bundle parse: {e}")))?;
        if bundle.schema != BUNDLE_SCHEMA {
            return Err(CalibrationError::ConstraintViolation(format!(
                "schema '{}' is not '{BUNDLE_SCHEMA}'",
                bundle.schema
            )));
        }
        Ok(bundle)
    }
}

/// Options for the end-to-end calibration pipeline.
#[derive(Debug, Clone)]
pub struct CalibrateOptions {
    pub fit: FitOptions,
    pub target_edge_fraction: f64,
    pub tolerance: f64,
    pub network: NetworkState,
    pub weights: FusionWeights,
    pub seed: u64,
    /// Fixed timestamp for reproducible runs; `None` stamps the wall clock.
    pub timestamp: Option<String>,
}

impl Default for CalibrateOptions {
    fn default() -> Self {
        Self {
            fit: FitOptions::default(),
            target_edge_fraction: 0.36,
            tolerance: 0.02,
            network: NetworkState::default(),
            weights: FusionWeights::default(),
            seed: 0,
            timestamp: None,
        }
    }
}

/// End-to-end calibration: accuracies, coefficients, operating point,
/// quintile cut points, frozen bundle.
///
/// `tau_features` is the request sample the operating point and quintile
/// boundaries are computed against (typically the reference workload).
pub fn calibrate(
    records: &[CalibrationRecord],
    pool: &PoolConfig,
    tau_features: &[FeatureVector],
    opts: &CalibrateOptions,
) -> Result<CalibratedBundle, CalibrationError> {
    let mut accuracy = BTreeMap::new();
    for profile in &pool.profiles {
        let est = estimate_accuracy(records, &profile.id)?;
        accuracy.insert(profile.id.clone(), est.accuracy);
    }
    let mut calibrated_pool = pool.clone();
    for profile in &mut calibrated_pool.profiles {
        profile.accuracy = accuracy[&profile.id];
    }

    let base = RouterParams::default();
    let fit = fit_coefficients(
        records,
        &calibrated_pool,
        base.quality,
        [1.0 / 6.0; 6],
        opts.weights,
        &opts.fit,
    )?;
    validate_monotonic_constraints(&fit.quality)?;

    let mut params = base;
    params.quality = fit.quality;
    let tau = fit_tau_edge(
        tau_features,
        &calibrated_pool,
        &params,
        fit.beta,
        opts.weights,
        &opts.network,
        opts.target_edge_fraction,
        opts.tolerance,
    )?;

    let ds: Vec<f64> = tau_features
        .iter()
        .map(|f| {
            descriptor_from_axes(f.image, f.text, fit.beta, opts.weights).map(|d| d.d)
        })
        .collect::<Result<_, _>>()?;
    let cuts = quintile_boundaries(&ds)?;

    let timestamp = opts
        .timestamp
        .clone()
        .unwrap_or_else(|| {
            let now = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            format!("unix:{now}")
        });

    let mut bundle = CalibratedBundle {
        schema: BUNDLE_SCHEMA.to_string(),
        accuracy,
        beta: fit.beta,
        lambda_dr: fit.quality.lambda_dr,
        res_coeff: fit.quality.res_coeff,
        kappa: fit.quality.kappa,
        tau_edge: tau,
        delta_min: base.delta_min,
        quintile_boundaries: cuts,
        unidentified: fit.unidentified,
        provenance: BundleProvenance { seed: opts.seed, record_count: records.len(), timestamp },
        frozen: false,
        content_hash: String::new(),
    };
    bundle.freeze();
    Ok(bundle)
}

/// Bundle with the shipped defaults, for runs without a calibration file.
/// Marked unfrozen; report-producing commands demand an explicit override.
pub fn uncalibrated_bundle(pool: &PoolConfig) -> CalibratedBundle {
    let base = RouterParams::default();
    CalibratedBundle {
        schema: BUNDLE_SCHEMA.to_string(),
        accuracy: pool
            .profiles
            .iter()
            .map(|p| (p.id.clone(), p.accuracy))
            .collect(),
        beta: [1.0 / 6.0; 6],
        lambda_dr: base.quality.lambda_dr,
        res_coeff: base.quality.res_coeff,
        kappa: base.quality.kappa,
        tau_edge: base.tau_edge,
        delta_min: base.delta_min,
        quintile_boundaries: [0.2, 0.4, 0.6, 0.8],
        unidentified: Vec::new(),
        provenance: BundleProvenance { seed: 0, record_count: 0, timestamp: "default".into() },
        frozen: false,
        content_hash: String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(id: u64, d_like: f64, scores: &[(&str, f64)]) -> CalibrationRecord {
        // Image axes pinned so s_img = 1 - d_like at c_text = d_like is not
        // needed; keep a simple spread: all image axes equal, text zero.
        let s = 1.0 - d_like;
        CalibrationRecord {
            schema: CALREC_SCHEMA.to_string(),
            id,
            features: FeatureVector { image: [s, s, s, 0.0], text: [0.0; 6] },
            outcomes: scores
                .iter()
                .map(|(m, v)| {
                    (m.to_string(), ModelOutcome { resolution: 448, score: *v })
                })
                .collect(),
        }
    }

    #[test]
    fn accuracy_is_the_mean_outcome() {
        let records: Vec<CalibrationRecord> = (0..1000)
            .map(|i| record(i, 0.3, &[("m", if i < 744 { 1.0 } else { 0.0 })]))
            .collect();
        let est = estimate_accuracy(&records, "m").unwrap();
        assert!((est.accuracy - 0.744).abs() < 1e-12);
        assert_eq!(est.record_count, 1000);
    }

    #[test]
    fn all_correct_records_give_perfect_accuracy() {
        let records: Vec<CalibrationRecord> =
            (0..10).map(|i| record(i, 0.2, &[("m", 1.0)])).collect();
        assert_eq!(estimate_accuracy(&records, "m").unwrap().accuracy, 1.0);
    }

    #[test]
    fn missing_model_is_no_records() {
        let records = vec![record(0, 0.2, &[("m", 1.0)])];
        assert!(matches!(
            estimate_accuracy(&records, "other"),
            Err(CalibrationError::NoRecords(_))
        ));
    }

    #[test]
    fn bundle_hash_is_stable_across_serialization() {
        let pool = PoolConfig::reference();
        let mut bundle = uncalibrated_bundle(&pool);
        bundle.freeze();
        let json = bundle.to_json();
        let back = CalibratedBundle::from_json(&json).unwrap();
        assert!(back.hash_is_valid());
        assert_eq!(back.content_hash, bundle.content_hash);
    }

    #[test]
    fn hash_ignores_timestamp() {
        let pool = PoolConfig::reference();
        let mut a = uncalibrated_bundle(&pool);
        let mut b = uncalibrated_bundle(&pool);
        b.provenance.timestamp = "elsewhen".into();
        a.freeze();
        b.freeze();
        assert_eq!(a.content_hash, b.content_hash);
    }

    #[test]
    fn monotonic_constraints_hold_on_defaults() {
        validate_monotonic_constraints(&QualityModelParams::default()).unwrap();
        let bad = QualityModelParams { kappa: -0.5, ..Default::default() };
        assert!(validate_monotonic_constraints(&bad).is_err());
    }

    #[test]
    fn empty_grid_is_a_constraint_violation() {
        let err = grid(0.5, 0.1, 0.01).unwrap_err();
        assert!(matches!(err, CalibrationError::ConstraintViolation(_)));
    }

    #[test]
    fn coverage_check_rejects_degenerate_records() {
        let records: Vec<CalibrationRecord> =
            (0..20).map(|i| record(i, 0.30, &[("m", 1.0)])).collect();
        let err = check_coverage(&records, [1.0 / 6.0; 6], FusionWeights::default());
        assert!(matches!(err, Err(CalibrationError::InsufficientCoverage(_))));
        let spread: Vec<CalibrationRecord> = (0..20)
            .map(|i| record(i, if i % 2 == 0 { 0.1 } else { 0.7 }, &[("m", 1.0)]))
            .collect();
        assert!(check_coverage(&spread, [1.0 / 6.0; 6], FusionWeights::default()).is_ok());
    }
}
