//! Request feature extraction.
//!
//! Builds the 10-dimensional normalized request descriptor (4 image-quality
//! axes + 6 text-complexity axes), the fused joint complexity `d`, and the
//! derived capability needs used by the router's gap penalties. All
//! operations are pure functions of their inputs plus an immutable config.

mod image;
mod text;
mod wordlist;

pub use image::{analyze_image, ImageQuality, ImageQualityConfig, LumaImage, MIN_PIXELS};
pub use text::{analyze_text, validate_beta, TextComplexity, TextConfig, TEXT_AXES};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("image is empty or below the {MIN_PIXELS}-pixel minimum ({width}x{height})")]
    EmptyImage { width: u32, height: u32 },
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("bad fusion weights: {0}")]
    BadWeights(String),
    #[error("bad quintile boundaries: {0}")]
    BadBoundaries(String),
}

/// Fusion weights for image-side vs text-side complexity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionWeights {
    pub w_img: f64,
    pub w_txt: f64,
}

impl Default for FusionWeights {
    fn default() -> Self {
        Self { w_img: 0.5, w_txt: 0.5 }
    }
}

impl FusionWeights {
    pub fn new(w_img: f64, w_txt: f64) -> Result<Self, FeatureError> {
        let w = Self { w_img, w_txt };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<(), FeatureError> {
        if !self.w_img.is_finite() || !self.w_txt.is_finite() || self.w_img < 0.0 || self.w_txt < 0.0
        {
            return Err(FeatureError::BadWeights(format!(
                "weights must be nonnegative, got ({}, {})",
                self.w_img, self.w_txt
            )));
        }
        if (self.w_img + self.w_txt - 1.0).abs() > 1e-9 {
            return Err(FeatureError::BadWeights(format!(
                "weights must sum to 1, got {} + {}",
                self.w_img, self.w_txt
            )));
        }
        Ok(())
    }

    /// Text-only ablation: image signal carries no weight.
    pub const TEXT_ONLY: Self = Self { w_img: 0.0, w_txt: 1.0 };
    /// Image-only ablation: text signal carries no weight.
    pub const IMAGE_ONLY: Self = Self { w_img: 1.0, w_txt: 0.0 };
}

/// Capability demands derived from the descriptor, one per strength axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Needs {
    pub blur: f64,
    pub detail: f64,
    pub reasoning: f64,
}

/// The full request descriptor: ten primitive feature dimensions plus the
/// derived needs and joint complexity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestDescriptor {
    pub image: ImageQuality,
    pub text: TextComplexity,
    pub needs: Needs,
    /// Joint complexity, clamped to [0, 1]; lower d = lower complexity.
    pub d: f64,
    pub w_img: f64,
    pub w_txt: f64,
}

impl RequestDescriptor {
    /// The ten primitive feature dimensions (4 image + 6 text).
    pub fn raw_axes(&self) -> [f64; 10] {
        let i = self.image.axes();
        let t = &self.text.axes;
        [i[0], i[1], i[2], i[3], t[0], t[1], t[2], t[3], t[4], t[5]]
    }
}

/// Fuse image-quality and text-complexity signals into a descriptor.
///
/// `d = w_img * (1 - s_img) + w_txt * c_text`, clamped to [0, 1].
/// Needs: blur demand is image degradation (`1 - s_blur`), detail demand is
/// the detail score itself, reasoning demand is the reasoning-marker axis.
pub fn fuse(
    image: ImageQuality,
    text: TextComplexity,
    weights: FusionWeights,
) -> Result<RequestDescriptor, FeatureError> {
    weights.validate()?;
    let d = (weights.w_img * (1.0 - image.s_img) + weights.w_txt * text.c_text).clamp(0.0, 1.0);
    let needs = Needs {
        blur: (1.0 - image.s_blur).clamp(0.0, 1.0),
        detail: image.s_detail,
        reasoning: text.axes[4],
    };
    Ok(RequestDescriptor {
        image,
        text,
        needs,
        d,
        w_img: weights.w_img,
        w_txt: weights.w_txt,
    })
}

/// Build a descriptor directly from the ten raw axis values.
///
/// This is the single construction path shared by the extractor, the
/// synthetic workload generator, and replay ingestion.
pub fn descriptor_from_axes(
    image_axes: [f64; 4],
    text_axes: [f64; 6],
    beta: [f64; 6],
    weights: FusionWeights,
) -> Result<RequestDescriptor, FeatureError> {
    validate_beta(&beta)?;
    let image = ImageQuality::from_components(image_axes[0], image_axes[1], image_axes[2], image_axes[3]);
    let text = TextComplexity::from_axes(text_axes, beta);
    fuse(image, text, weights)
}

/// The ten raw feature dimensions of a request, before any fusion. This is
/// the wire representation shared by workload generation, calibration
/// records, and replay traces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    /// Image-quality axes: [s_blur, s_exp, s_art, s_detail].
    pub image: [f64; 4],
    /// Text-complexity axes, ordered as [`TEXT_AXES`].
    pub text: [f64; 6],
}

impl FeatureVector {
    pub fn descriptor(
        &self,
        beta: [f64; 6],
        weights: FusionWeights,
    ) -> Result<RequestDescriptor, FeatureError> {
        descriptor_from_axes(self.image, self.text, beta, weights)
    }
}

/// Workload complexity buckets by ascending d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Quintile {
    Q1,
    Q2,
    Q3,
    Q4,
    Q5,
}

impl Quintile {
    pub const ALL: [Quintile; 5] = [Quintile::Q1, Quintile::Q2, Quintile::Q3, Quintile::Q4, Quintile::Q5];

    pub fn index(self) -> usize {
        match self {
            Quintile::Q1 => 0,
            Quintile::Q2 => 1,
            Quintile::Q3 => 2,
            Quintile::Q4 => 3,
            Quintile::Q5 => 4,
        }
    }
}

impl std::fmt::Display for Quintile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Q{}", self.index() + 1)
    }
}

/// Bucket a joint-complexity value by four ascending cut points; boundary
/// values fall into the lower bucket.
pub fn complexity_quintile(d: f64, boundaries: &[f64; 4]) -> Result<Quintile, FeatureError> {
    let ascending = boundaries.windows(2).all(|w| w[0] < w[1]);
    let in_range = boundaries.iter().all(|b| b.is_finite() && *b > 0.0 && *b < 1.0);
    if !ascending || !in_range {
        return Err(FeatureError::BadBoundaries(format!(
            "cut points must be strictly ascending in (0,1), got {boundaries:?}"
        )));
    }
    Ok(match boundaries.iter().position(|b| d <= *b) {
        Some(0) => Quintile::Q1,
        Some(1) => Quintile::Q2,
        Some(2) => Quintile::Q3,
        Some(3) => Quintile::Q4,
        _ => Quintile::Q5,
    })
}

/// Empirical 20/40/60/80th percentile cut points of a d sample.
///
/// Uses the nearest-rank convention; degenerate samples (fewer than five
/// distinct values) are rejected.
pub fn quintile_boundaries(ds: &[f64]) -> Result<[f64; 4], FeatureError> {
    if ds.is_empty() {
        return Err(FeatureError::BadBoundaries("empty sample".into()));
    }
    let mut sorted: Vec<f64> = ds.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pick = |p: f64| {
        let rank = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
        sorted[rank - 1]
    };
    let cuts = [pick(0.2), pick(0.4), pick(0.6), pick(0.8)];
    let ascending = cuts.windows(2).all(|w| w[0] < w[1]);
    if !ascending || cuts.iter().any(|c| *c <= 0.0 || *c >= 1.0) {
        return Err(FeatureError::BadBoundaries(format!(
            "sample percentiles are degenerate: {cuts:?}"
        )));
    }
    Ok(cuts)
}

/// Feature extraction configuration: estimator constants, axis weights,
/// fusion weights.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub image: ImageQualityConfig,
    pub text: TextConfig,
    pub weights: FusionWeights,
}

/// Result of running the extractor on one request.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub descriptor: RequestDescriptor,
    /// Wall-clock extraction overhead; reported alongside, never part of
    /// the descriptor, so descriptors stay bit-reproducible.
    pub elapsed_ms: f64,
}

/// Extract the full descriptor from encoded image bytes and a question.
pub fn extract(
    image_bytes: &[u8],
    question: &str,
    cfg: &FeatureConfig,
) -> Result<Extraction, FeatureError> {
    let start = std::time::Instant::now();
    let img = LumaImage::from_bytes(image_bytes)?;
    let extraction = extract_from_luma(&img, question, cfg)?;
    Ok(Extraction {
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        ..extraction
    })
}

/// Extract from an already-decoded luma raster.
pub fn extract_from_luma(
    img: &LumaImage,
    question: &str,
    cfg: &FeatureConfig,
) -> Result<Extraction, FeatureError> {
    let start = std::time::Instant::now();
    let image = analyze_image(img, &cfg.image);
    let text = analyze_text(question, &cfg.text);
    let descriptor = fuse(image, text, cfg.weights)?;
    Ok(Extraction {
        descriptor,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
