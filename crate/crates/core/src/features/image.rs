//! Image-quality proxies.
//!
//! Four normalized scores over an 8-bit luma raster, each scoring quality
//! (1 = best): sharpness via Laplacian variance, exposure via clipping and
//! mid-tone deviation, artifact-freeness via 8x8 blockiness ratio, and
//! detail via edge density. Inner loops accumulate in integers; floats
//! enter only for the final normalization, so scores are bit-reproducible.

use serde::{Deserialize, Serialize};

use super::FeatureError;

/// Minimum raster size accepted by the analyzer, in pixels.
pub const MIN_PIXELS: u64 = 64;

/// 8-bit single-channel raster.
#[derive(Debug, Clone)]
pub struct LumaImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl LumaImage {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self, FeatureError> {
        if u64::from(width) * u64::from(height) < MIN_PIXELS {
            return Err(FeatureError::EmptyImage { width, height });
        }
        if data.len() != (width as usize) * (height as usize) {
            return Err(FeatureError::EmptyImage { width, height });
        }
        Ok(Self { width, height, data })
    }

    /// Decode PNG/JPEG bytes and convert to 8-bit luma.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FeatureError> {
        let img = image::load_from_memory(bytes)
            .map_err(|e| FeatureError::UnsupportedFormat(e.to_string()))?;
        let luma = img.to_luma8();
        Self::new(luma.width(), luma.height(), luma.into_raw())
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, FeatureError> {
        let bytes = std::fs::read(path).map_err(|e| FeatureError::UnsupportedFormat(e.to_string()))?;
        Self::from_bytes(&bytes)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.data
    }

    /// Encode as PNG (used by fixtures and the raw-image workload mode).
    pub fn to_png_bytes(&self) -> Vec<u8> {
        let buf = image::GrayImage::from_raw(self.width, self.height, self.data.clone())
            .expect("dimensions validated at construction");
        let mut out = Vec::new();
        image::DynamicImage::ImageLuma8(buf)
            .write_to(&mut std::io::Cursor::new(&mut out), image::ImageFormat::Png)
            .expect("png encoding of validated raster");
        out
    }
}

/// Normalization constants for the four estimators.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct ImageQualityConfig {
    /// Laplacian-variance value mapped to s_blur = 1 (pinned from a sharp
    /// reference fixture).
    pub blur_var_ref: f64,
    /// Blockiness excess (ratio - 1) mapped to a full artifact penalty.
    pub art_ratio_ref: f64,
    /// Gradient-magnitude threshold, luma levels, for the detail estimator.
    pub grad_threshold: f64,
    /// Edge-pixel fraction mapped to s_detail = 1.
    pub detail_density_ref: f64,
}

impl Default for ImageQualityConfig {
    fn default() -> Self {
        Self {
            blur_var_ref: 1500.0,
            art_ratio_ref: 1.0,
            grad_threshold: 24.0,
            detail_density_ref: 0.25,
        }
    }
}

/// The four quality scores and their mean. Each field is in [0, 1] and
/// scores quality: high s_blur = sharp, high s_art = artifact-free.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImageQuality {
    pub s_blur: f64,
    pub s_exp: f64,
    pub s_art: f64,
    pub s_detail: f64,
    pub s_img: f64,
}

impl ImageQuality {
    /// Assemble from the four component scores; `s_img` is their mean.
    pub fn from_components(s_blur: f64, s_exp: f64, s_art: f64, s_detail: f64) -> Self {
        let clamp = |v: f64| v.clamp(0.0, 1.0);
        let (s_blur, s_exp, s_art, s_detail) =
            (clamp(s_blur), clamp(s_exp), clamp(s_art), clamp(s_detail));
        Self {
            s_blur,
            s_exp,
            s_art,
            s_detail,
            s_img: (s_blur + s_exp + s_art + s_detail) / 4.0,
        }
    }

    pub fn axes(&self) -> [f64; 4] {
        [self.s_blur, self.s_exp, self.s_art, self.s_detail]
    }
}

/// Compute the four image-quality scores for a luma raster.
pub fn analyze_image(img: &LumaImage, cfg: &ImageQualityConfig) -> ImageQuality {
    let w = img.width as usize;
    let h = img.height as usize;
    let px = &img.data;
    let at = |x: usize, y: usize| -> i64 { i64::from(px[y * w + x]) };

    // Exposure: histogram pass.
    let mut hist = [0u64; 256];
    for &v in px {
        hist[v as usize] += 1;
    }
    let total = (w * h) as f64;
    let clipped: u64 = hist[..3].iter().sum::<u64>() + hist[253..].iter().sum::<u64>();
    let sum_luma: u64 = hist
        .iter()
        .enumerate()
        .map(|(v, &c)| v as u64 * c)
        .sum();
    let mean_luma = sum_luma as f64 / total;
    let clip_frac = clipped as f64 / total;
    let mid_dev = (mean_luma - 128.0).abs() / 128.0;
    let s_exp = 1.0 - (clip_frac + mid_dev) / 2.0;

    // Sharpness: variance of the 3x3 Laplacian over interior pixels.
    let mut lap_sum: i64 = 0;
    let mut lap_sq: i64 = 0;
    let mut lap_n: u64 = 0;
    if w >= 3 && h >= 3 {
        for y in 1..h - 1 {
            for x in 1..w - 1 {
                let lap =
                    at(x, y - 1) + at(x, y + 1) + at(x - 1, y) + at(x + 1, y) - 4 * at(x, y);
                lap_sum += lap;
                lap_sq += lap * lap;
                lap_n += 1;
            }
        }
    }
    let blur_var = if lap_n == 0 {
        0.0
    } else {
        let n = lap_n as f64;
        let mean = lap_sum as f64 / n;
        lap_sq as f64 / n - mean * mean
    };
    let s_blur = (blur_var / cfg.blur_var_ref).min(1.0).max(0.0);

    // Detail (edge density) and blockiness share a pass over adjacent pairs.
    let mut edge_count: u64 = 0;
    let mut grad_n: u64 = 0;
    let thr_sq = (cfg.grad_threshold * cfg.grad_threshold).round() as i64;
    let mut bound_sum: u64 = 0;
    let mut bound_n: u64 = 0;
    let mut inner_sum: u64 = 0;
    let mut inner_n: u64 = 0;
    for y in 0..h {
        for x in 0..w {
            let here = at(x, y);
            if x + 1 < w {
                let step = (at(x + 1, y) - here).unsigned_abs();
                if (x + 1) % 8 == 0 {
                    bound_sum += step;
                    bound_n += 1;
                } else {
                    inner_sum += step;
                    inner_n += 1;
                }
            }
            if y + 1 < h {
                let step = (at(x, y + 1) - here).unsigned_abs();
                if (y + 1) % 8 == 0 {
                    bound_sum += step;
                    bound_n += 1;
                } else {
                    inner_sum += step;
                    inner_n += 1;
                }
            }
            if x + 1 < w && y + 1 < h {
                let gx = at(x + 1, y) - here;
                let gy = at(x, y + 1) - here;
                if gx * gx + gy * gy > thr_sq {
                    edge_count += 1;
                }
                grad_n += 1;
            }
        }
    }
    let density = if grad_n == 0 {
        0.0
    } else {
        edge_count as f64 / grad_n as f64
    };
    let s_detail = (density / cfg.detail_density_ref).clamp(0.0, 1.0);

    let mean_bound = if bound_n == 0 { 0.0 } else { bound_sum as f64 / bound_n as f64 };
    let mean_inner = if inner_n == 0 { 0.0 } else { inner_sum as f64 / inner_n as f64 };
    let ratio = if mean_inner <= f64::EPSILON {
        if mean_bound <= f64::EPSILON {
            1.0
        } else {
            // Boundary steps with a flat interior: maximal blockiness.
            1.0 + cfg.art_ratio_ref.max(1.0)
        }
    } else {
        mean_bound / mean_inner
    };
    let s_art = 1.0 - ((ratio - 1.0).max(0.0) / cfg.art_ratio_ref).min(1.0);

    ImageQuality::from_components(s_blur, s_exp, s_art, s_detail)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(width: u32, height: u32, value: u8) -> LumaImage {
        LumaImage::new(width, height, vec![value; (width * height) as usize]).unwrap()
    }

    #[test]
    fn uniform_midgray_has_no_sharpness_or_detail() {
        let q = analyze_image(&uniform(512, 512, 128), &ImageQualityConfig::default());
        assert_eq!(q.s_blur, 0.0);
        assert_eq!(q.s_detail, 0.0);
        assert_eq!(q.s_exp, 1.0);
        assert_eq!(q.s_art, 1.0);
    }

    #[test]
    fn s_img_is_mean_of_components() {
        let q = ImageQuality::from_components(0.2, 0.4, 0.6, 0.8);
        assert!((q.s_img - 0.5).abs() <= f64::EPSILON);
    }

    #[test]
    fn clipped_image_scores_low_exposure() {
        let bright = analyze_image(&uniform(64, 64, 255), &ImageQualityConfig::default());
        let mid = analyze_image(&uniform(64, 64, 128), &ImageQualityConfig::default());
        assert!(bright.s_exp < mid.s_exp);
        // Full clip plus full mid-deviation: 1 - (1 + 127/128)/2.
        assert!((bright.s_exp - (1.0 - (1.0 + 127.0 / 128.0) / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn tiny_raster_is_rejected() {
        assert!(matches!(
            LumaImage::new(7, 9, vec![0; 63]),
            Err(FeatureError::EmptyImage { .. })
        ));
    }

    #[test]
    fn png_round_trip_preserves_scores() {
        let mut data = vec![0u8; 64 * 64];
        for (i, v) in data.iter_mut().enumerate() {
            *v = ((i * 37) % 251) as u8;
        }
        let img = LumaImage::new(64, 64, data).unwrap();
        let again = LumaImage::from_bytes(&img.to_png_bytes()).unwrap();
        let cfg = ImageQualityConfig::default();
        assert_eq!(analyze_image(&img, &cfg), analyze_image(&again, &cfg));
    }

    #[test]
    fn garbage_bytes_are_unsupported() {
        assert!(matches!(
            LumaImage::from_bytes(b"not an image"),
            Err(FeatureError::UnsupportedFormat(_))
        ));
    }
}
