//! Procedural fixtures: deterministic synthetic images, degradation
//! operators, and templated questions. Used by the raw-image workload
//! mode, the bundled CLI fixtures, and the feature-extractor tests.

use rand::Rng;

use super::workload::WorkloadSpec;
use super::SimError;
use crate::features::LumaImage;
use crate::rng::{salt, stream};

/// A sharp synthetic bar chart: light background, dark axes and bars.
/// Values stay away from the clip points so exposure scores well.
pub fn chart_image(width: u32, height: u32) -> LumaImage {
    let (w, h) = (width as usize, height as usize);
    let mut data = vec![200u8; w * h];
    let mut set = |x: usize, y: usize, v: u8| {
        if x < w && y < h {
            data[y * w + x] = v;
        }
    };
    // Axes.
    let margin = w / 10;
    for y in 0..h {
        set(margin, y, 40);
        set(margin + 1, y, 40);
    }
    for x in 0..w {
        set(x, h - margin.min(h - 1), 40);
        set(x, h - margin.min(h - 1) - 1, 40);
    }
    // Grid lines.
    for gy in 1..5 {
        let y = gy * h / 5;
        for x in margin..w {
            set(x, y, 170);
        }
    }
    // Bars with 1px dark borders; heights follow a fixed pattern.
    let heights = [3, 7, 5, 9, 4, 6, 8, 2];
    let bar_w = (w - 2 * margin) / (heights.len() * 2);
    for (i, hgt) in heights.iter().enumerate() {
        let x0 = margin + bar_w + i * 2 * bar_w;
        let top = h.saturating_sub(margin + hgt * (h - 2 * margin) / 10);
        for x in x0..(x0 + bar_w).min(w) {
            for y in top..h.saturating_sub(margin) {
                let border = x == x0 || x + 1 == (x0 + bar_w).min(w) || y == top;
                set(x, y, if border { 40 } else { 120 });
            }
        }
    }
    // Tick-label texture along the axis.
    for (i, item) in data.iter_mut().enumerate() {
        let (x, y) = (i % w, i / w);
        if y > h - margin && (x / 3 + y) % 7 == 0 {
            *item = 70;
        }
    }
    LumaImage::new(width, height, data).expect("chart dimensions are valid")
}

/// A smooth natural-looking scene: seeded value noise plus a few blocks.
pub fn scene_image(width: u32, height: u32, seed: u64) -> LumaImage {
    let (w, h) = (width as usize, height as usize);
    let mut rng = stream(&[seed, salt::RAW_IMAGE, 0x5ce]);
    // Coarse grid of luma values, bilinearly interpolated.
    let cell = 16usize;
    let gw = w / cell + 2;
    let gh = h / cell + 2;
    let grid: Vec<f64> = (0..gw * gh).map(|_| rng.random_range(60.0..200.0)).collect();
    let mut data = vec![0u8; w * h];
    for y in 0..h {
        for x in 0..w {
            let gx = x / cell;
            let gy = y / cell;
            let fx = (x % cell) as f64 / cell as f64;
            let fy = (y % cell) as f64 / cell as f64;
            let v00 = grid[gy * gw + gx];
            let v10 = grid[gy * gw + gx + 1];
            let v01 = grid[(gy + 1) * gw + gx];
            let v11 = grid[(gy + 1) * gw + gx + 1];
            let v = v00 * (1.0 - fx) * (1.0 - fy)
                + v10 * fx * (1.0 - fy)
                + v01 * (1.0 - fx) * fy
                + v11 * fx * fy;
            data[y * w + x] = v.round().clamp(0.0, 255.0) as u8;
        }
    }
    // A few hard-edged objects for gradients.
    for _ in 0..6 {
        let rw = rng.random_range(w / 12..w / 5);
        let rh = rng.random_range(h / 12..h / 5);
        let x0 = rng.random_range(0..w - rw);
        let y0 = rng.random_range(0..h - rh);
        let v: u8 = rng.random_range(50..210);
        for y in y0..y0 + rh {
            for x in x0..x0 + rw {
                data[y * w + x] = v;
            }
        }
    }
    LumaImage::new(width, height, data).expect("scene dimensions are valid")
}

/// Separable Gaussian blur with radius `3*sigma`; `sigma <= 0` is identity.
pub fn gaussian_blur(img: &LumaImage, sigma: f64) -> LumaImage {
    if sigma <= 0.0 {
        return img.clone();
    }
    let (w, h) = (img.width() as usize, img.height() as usize);
    let radius = (3.0 * sigma).ceil() as isize;
    let kernel: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i as f64 * i as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let ksum: f64 = kernel.iter().sum();
    let px = img.pixels();
    let mut tmp = vec![0.0f64; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, kv) in kernel.iter().enumerate() {
                let sx = (x as isize + k as isize - radius).clamp(0, w as isize - 1) as usize;
                acc += f64::from(px[y * w + sx]) * kv;
            }
            tmp[y * w + x] = acc / ksum;
        }
    }
    let mut out = vec![0u8; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, kv) in kernel.iter().enumerate() {
                let sy = (y as isize + k as isize - radius).clamp(0, h as isize - 1) as usize;
                acc += tmp[sy * w + x] * kv;
            }
            out[y * w + x] = (acc / ksum).round().clamp(0.0, 255.0) as u8;
        }
    }
    LumaImage::new(img.width(), img.height(), out).expect("blur preserves dimensions")
}

/// Replace every aligned 8x8 block by its mean luma (hard quantization,
/// the worst-case JPEG blocking pattern).
pub fn block_quantize(img: &LumaImage) -> LumaImage {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let px = img.pixels();
    let mut out = vec![0u8; w * h];
    let mut by = 0;
    while by < h {
        let mut bx = 0;
        while bx < w {
            let mut sum = 0u64;
            let mut n = 0u64;
            for y in by..(by + 8).min(h) {
                for x in bx..(bx + 8).min(w) {
                    sum += u64::from(px[y * w + x]);
                    n += 1;
                }
            }
            let mean = (sum / n.max(1)) as u8;
            for y in by..(by + 8).min(h) {
                for x in bx..(bx + 8).min(w) {
                    out[y * w + x] = mean;
                }
            }
            bx += 8;
        }
        by += 8;
    }
    LumaImage::new(img.width(), img.height(), out).expect("quantize preserves dimensions")
}

const EASY_QUESTIONS: &[&str] = &[
    "What is the total?",
    "What color is the box?",
    "What number is shown?",
    "Which bar is tallest?",
    "Who is in the picture?",
];

const HARD_QUESTIONS: &[&str] = &[
    "Why is the object on the left heavier than that one?",
    "How would you explain the difference between these two regions if the left one moved?",
    "Why does this chart compare those values and how is that different from the other one?",
    "If the left shape were rotated, how would it compare to that one on the right?",
];

/// A templated question whose difficulty band follows the latent value.
pub fn template_question(latent: f64, pick: u64) -> &'static str {
    if latent < 0.5 {
        EASY_QUESTIONS[(pick as usize) % EASY_QUESTIONS.len()]
    } else {
        HARD_QUESTIONS[(pick as usize) % HARD_QUESTIONS.len()]
    }
}

/// A raw request: encoded image plus question, for the raw-image workload
/// mode.
#[derive(Debug, Clone)]
pub struct RawRequest {
    pub id: u64,
    pub image: LumaImage,
    pub question: String,
}

/// Generate raw image+question requests. The spec's seed drives a latent
/// difficulty per request; harder requests get blurrier, darker scenes and
/// reasoning-heavy questions.
pub fn generate_raw_workload(
    spec: &WorkloadSpec,
    width: u32,
    height: u32,
) -> Result<Vec<RawRequest>, SimError> {
    spec.validate()?;
    let out = crate::parallel::map_indexed(spec.n_requests, |i| {
        let id = i as u64;
        let mut rng = stream(&[spec.seed, salt::RAW_IMAGE, id]);
        let latent: f64 = rng.random();
        let base = scene_image(width, height, spec.seed ^ id);
        let sigma = latent * 3.0;
        let image = gaussian_blur(&base, sigma);
        let question = template_question(latent, rng.random()).to_string();
        RawRequest { id, image, question }
    });
    Ok(out)
}
