//! Seeded synthetic workload generation.
//!
//! Each request draws a shared difficulty factor and maps it through a
//! Gaussian copula onto the ten feature axes, so per-axis marginals follow
//! the configured Beta shapes while axes stay realistically correlated
//! (degraded images tend to arrive with harder questions).

use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF, Normal};

use super::SimError;
use crate::features::FeatureVector;
use crate::parallel::map_indexed;
use crate::rng::{mix, salt, stream};

pub const WORKLOAD_SCHEMA: &str = "workload/1";

/// Marginal and coupling parameters of one feature axis.
///
/// The Beta shape parameters are `alpha = mean * concentration` and
/// `beta = (1 - mean) * concentration`; degenerate means (0 or 1) produce
/// a point mass. `loading` in [-1, 1] couples the axis to the shared
/// difficulty factor: negative loadings make the axis drop as requests get
/// harder (image-quality axes), positive loadings make it rise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub mean: f64,
    pub concentration: f64,
    pub loading: f64,
}

impl AxisSpec {
    pub fn new(mean: f64, concentration: f64, loading: f64) -> Self {
        Self { mean, concentration, loading }
    }

    fn validate(&self, name: &str) -> Result<(), SimError> {
        if !(0.0..=1.0).contains(&self.mean) {
            return Err(SimError::BadSpec(format!("{name}: mean {} out of [0,1]", self.mean)));
        }
        if !(self.concentration > 0.0) {
            return Err(SimError::BadSpec(format!(
                "{name}: concentration {} must be positive",
                self.concentration
            )));
        }
        if !(-1.0..=1.0).contains(&self.loading) {
            return Err(SimError::BadSpec(format!(
                "{name}: loading {} out of [-1,1]",
                self.loading
            )));
        }
        Ok(())
    }
}

/// Parameters of a synthetic workload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkloadSpec {
    #[serde(default = "default_workload_schema")]
    pub schema: String,
    pub seed: u64,
    pub n_requests: usize,
    /// Image-quality axes: [s_blur, s_exp, s_art, s_detail].
    pub image: [AxisSpec; 4],
    /// Text-complexity axes, ordered as [`crate::features::TEXT_AXES`].
    pub text: [AxisSpec; 6],
}

fn default_workload_schema() -> String {
    WORKLOAD_SCHEMA.to_string()
}

impl WorkloadSpec {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.schema != WORKLOAD_SCHEMA {
            return Err(SimError::BadSpec(format!(
                "schema '{}' is not '{WORKLOAD_SCHEMA}'",
                self.schema
            )));
        }
        if self.n_requests == 0 {
            return Err(SimError::BadSpec("n_requests must be at least 1".into()));
        }
        for (i, axis) in self.image.iter().enumerate() {
            axis.validate(&format!("image axis {i}"))?;
        }
        for (i, axis) in self.text.iter().enumerate() {
            axis.validate(&format!("text axis {i}"))?;
        }
        Ok(())
    }

    /// The shipped reference workload: mostly clean images with a coupled
    /// tail of degraded, reasoning-heavy requests.
    pub fn reference(seed: u64, n_requests: usize) -> Self {
        Self {
            schema: WORKLOAD_SCHEMA.to_string(),
            seed,
            n_requests,
            image: [
                AxisSpec::new(0.86, 8.0, -0.90), // sharpness
                AxisSpec::new(0.84, 10.0, -0.75), // exposure
                AxisSpec::new(0.86, 10.0, -0.75), // artifact-freeness
                AxisSpec::new(0.45, 6.0, 0.40),  // detail demand rises with difficulty
            ],
            text: [
                AxisSpec::new(0.40, 6.0, 0.85), // length
                AxisSpec::new(0.30, 5.0, 0.70), // entity density
                AxisSpec::new(0.50, 9.0, 0.80), // question type
                AxisSpec::new(0.45, 7.0, 0.80), // vocabulary
                AxisSpec::new(0.35, 6.0, 0.85), // reasoning markers
                AxisSpec::new(0.45, 5.0, 0.80), // context markers
            ],
        }
    }

    pub fn parse(text: &str) -> Result<Self, SimError> {
        let spec: WorkloadSpec = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| SimError::BadSpec(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| SimError::BadSpec(e.to_string()))?
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// One synthetic request: a stable id plus the ten raw feature values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub id: u64,
    pub features: FeatureVector,
}

fn sample_axis(spec: &AxisSpec, z_shared: f64, z_own: f64) -> f64 {
    const EPS: f64 = 1e-6;
    if spec.mean <= EPS {
        return 0.0;
    }
    if spec.mean >= 1.0 - EPS {
        return 1.0;
    }
    let z = spec.loading * z_shared + (1.0 - spec.loading * spec.loading).sqrt() * z_own;
    let std_normal = Normal::standard();
    let u = std_normal.cdf(z).clamp(1e-9, 1.0 - 1e-9);
    let alpha = spec.mean * spec.concentration;
    let beta = (1.0 - spec.mean) * spec.concentration;
    Beta::new(alpha, beta)
        .expect("validated shape parameters")
        .inverse_cdf(u)
        .clamp(0.0, 1.0)
}

/// Sample the ten feature axes of one request.
pub fn sample_features(spec: &WorkloadSpec, request_id: u64) -> FeatureVector {
    use rand::Rng;
    use rand_distr::StandardNormal;
    let mut rng = stream(&[spec.seed, salt::WORKLOAD, request_id]);
    let z_shared: f64 = rng.sample(StandardNormal);
    let mut image = [0.0; 4];
    for (i, axis) in spec.image.iter().enumerate() {
        let z_own: f64 = rng.sample(StandardNormal);
        image[i] = sample_axis(axis, z_shared, z_own);
    }
    let mut text = [0.0; 6];
    for (i, axis) in spec.text.iter().enumerate() {
        let z_own: f64 = rng.sample(StandardNormal);
        text[i] = sample_axis(axis, z_shared, z_own);
    }
    FeatureVector { image, text }
}

/// Generate the full workload; deterministic given the spec's seed.
pub fn generate_workload(spec: &WorkloadSpec) -> Result<Vec<Request>, SimError> {
    spec.validate()?;
    Ok(map_indexed(spec.n_requests, |i| {
        let id = i as u64;
        Request { id, features: sample_features(spec, id) }
    }))
}

/// Seed for one replicate of a multi-replicate run.
pub fn replicate_seed(seed: u64, replicate: usize) -> u64 {
    mix(&[seed, salt::REPLICATE, replicate as u64])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_gives_identical_workloads() {
        let spec = WorkloadSpec::reference(42, 50);
        let a = generate_workload(&spec).unwrap();
        let b = generate_workload(&spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_differ() {
        let a = generate_workload(&WorkloadSpec::reference(1, 20)).unwrap();
        let b = generate_workload(&WorkloadSpec::reference(2, 20)).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn degenerate_mixture_floors_complexity() {
        let mut spec = WorkloadSpec::reference(7, 40);
        for axis in &mut spec.image {
            axis.mean = 1.0;
        }
        for axis in &mut spec.text {
            axis.mean = 0.0;
        }
        for req in generate_workload(&spec).unwrap() {
            assert_eq!(req.features.image, [1.0; 4]);
            assert_eq!(req.features.text, [0.0; 6]);
        }
    }

    #[test]
    fn marginal_means_track_the_spec() {
        let spec = WorkloadSpec::reference(42, 2000);
        let reqs = generate_workload(&spec).unwrap();
        let n = reqs.len() as f64;
        for axis in 0..4 {
            let mean: f64 = reqs.iter().map(|r| r.features.image[axis]).sum::<f64>() / n;
            assert!(
                (mean - spec.image[axis].mean).abs() <= 0.05,
                "image axis {axis}: sample mean {mean} vs spec {}",
                spec.image[axis].mean
            );
        }
        for axis in 0..6 {
            let mean: f64 = reqs.iter().map(|r| r.features.text[axis]).sum::<f64>() / n;
            assert!(
                (mean - spec.text[axis].mean).abs() <= 0.05,
                "text axis {axis}: sample mean {mean} vs spec {}",
                spec.text[axis].mean
            );
        }
    }

    #[test]
    fn bad_specs_are_rejected() {
        let mut spec = WorkloadSpec::reference(1, 10);
        spec.n_requests = 0;
        assert!(matches!(generate_workload(&spec), Err(SimError::BadSpec(_))));
        let mut spec = WorkloadSpec::reference(1, 10);
        spec.image[0].concentration = 0.0;
        assert!(matches!(generate_workload(&spec), Err(SimError::BadSpec(_))));
        let mut spec = WorkloadSpec::reference(1, 10);
        spec.text[0].loading = 1.5;
        assert!(matches!(generate_workload(&spec), Err(SimError::BadSpec(_))));
    }
}
