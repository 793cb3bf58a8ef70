//! Property tests for the spec-level invariants.

use proptest::prelude::*;

use inar_core::features::{
    analyze_image, analyze_text, descriptor_from_axes, fuse, FusionWeights, ImageQuality,
    ImageQualityConfig, LumaImage, TextComplexity, TextConfig,
};
use inar_core::pool::{Configuration, NetworkState, PoolConfig, Precision, Tier};
use inar_core::router::{pareto_frontier, predict_quality, route, QualityModelParams, RouterParams, ScoredCandidate};

fn weights_strategy() -> impl Strategy<Value = FusionWeights> {
    (0.0..=1.0f64).prop_map(|w| FusionWeights { w_img: w, w_txt: 1.0 - w })
}

proptest! {
    #[test]
    fn image_scores_stay_in_range(
        w in 8u32..48,
        h in 8u32..48,
        seed in any::<u64>(),
    ) {
        let n = (w * h) as usize;
        if n < 64 { return Ok(()); }
        let mut state = seed;
        let data: Vec<u8> = (0..n)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 33) as u8
            })
            .collect();
        let img = LumaImage::new(w, h, data).unwrap();
        let q = analyze_image(&img, &ImageQualityConfig::default());
        for v in [q.s_blur, q.s_exp, q.s_art, q.s_detail, q.s_img] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        // Mean identity to within one representation ulp.
        let mean = (q.s_blur + q.s_exp + q.s_art + q.s_detail) / 4.0;
        prop_assert!((q.s_img - mean).abs() <= f64::EPSILON);
    }

    #[test]
    fn text_scores_stay_in_range(question in ".{0,80}") {
        let t = analyze_text(&question, &TextConfig::default());
        for v in t.axes.iter().chain([t.c_text].iter()) {
            prop_assert!((0.0..=1.0).contains(v));
        }
    }

    #[test]
    fn boosting_the_max_axis_weight_never_lowers_c_text(
        axes in prop::array::uniform6(0.0..=1.0f64),
    ) {
        let uniform = [1.0 / 6.0; 6];
        let base = TextComplexity::from_axes(axes, uniform);
        let max_axis = axes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap();
        // Double the max axis's weight, renormalize.
        let mut boosted = uniform;
        boosted[max_axis] *= 2.0;
        let sum: f64 = boosted.iter().sum();
        for b in &mut boosted {
            *b /= sum;
        }
        let after = TextComplexity::from_axes(axes, boosted);
        prop_assert!(after.c_text >= base.c_text - 1e-12);
    }

    #[test]
    fn d_is_monotone_in_its_inputs(
        s1 in 0.0..=1.0f64,
        s2 in 0.0..=1.0f64,
        c1 in 0.0..=1.0f64,
        c2 in 0.0..=1.0f64,
        weights in weights_strategy(),
    ) {
        let quality = |s: f64| ImageQuality::from_components(s, s, s, s);
        let text = |c: f64| TextComplexity::from_axes([c; 6], [1.0 / 6.0; 6]);
        let d = |s: f64, c: f64| fuse(quality(s), text(c), weights).unwrap().d;
        let (s_lo, s_hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
        let (c_lo, c_hi) = if c1 <= c2 { (c1, c2) } else { (c2, c1) };
        // Non-increasing in image quality, non-decreasing in text complexity.
        prop_assert!(d(s_hi, c1) <= d(s_lo, c1) + 1e-12);
        prop_assert!(d(s1, c_hi) + 1e-12 >= d(s1, c_lo));
    }

    #[test]
    fn quality_is_monotone_in_resolution_and_complexity(
        d1 in 0.0..=1.0f64,
        d2 in 0.0..=1.0f64,
        need in 0.0..=1.0f64,
        r_idx1 in 0usize..4,
        r_idx2 in 0usize..4,
    ) {
        let pool = PoolConfig::reference();
        let profile = pool.profile("qwen3-vl-2b").unwrap();
        let params = QualityModelParams::default();
        let ladder = [224u32, 336, 448, 448];
        let mk = |d: f64, need_blur: f64| {
            let mut desc = descriptor_from_axes(
                [1.0 - need_blur, 1.0, 1.0, 0.3],
                [0.0; 6],
                [1.0 / 6.0; 6],
                FusionWeights::default(),
            ).unwrap();
            desc.d = d;
            desc
        };
        let q_at = |r: u32, d: f64, nb: f64| {
            let cfg = Configuration {
                model_id: profile.id.clone(),
                precision: profile.precision,
                resolution: r,
                placement: Tier::Edge,
            };
            predict_quality(&cfg, &mk(d, nb), profile, &params)
        };
        // Non-decreasing in resolution.
        let (r_lo, r_hi) = (ladder[r_idx1.min(r_idx2)], ladder[r_idx1.max(r_idx2)]);
        prop_assert!(q_at(r_hi, d1, need) + 1e-12 >= q_at(r_lo, d1, need));
        // Non-increasing in joint complexity.
        let (d_lo, d_hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        prop_assert!(q_at(336, d_hi, need) <= q_at(336, d_lo, need) + 1e-12);
        // Non-increasing in each need.
        prop_assert!(q_at(336, d1, (need + 0.1).min(1.0)) <= q_at(336, d1, need) + 1e-12);
    }

    #[test]
    fn stronger_models_never_score_lower_on_that_axis(
        need in 0.0..=1.0f64,
        s_weak in 0.0..=1.0f64,
        bump in 0.0..=0.5f64,
    ) {
        let pool = PoolConfig::reference();
        let mut weak = pool.profile("qwen3-vl-2b").unwrap().clone();
        weak.strengths.reasoning = s_weak;
        let mut strong = weak.clone();
        strong.strengths.reasoning = (s_weak + bump).min(1.0);
        let mut desc = descriptor_from_axes(
            [1.0, 1.0, 1.0, 0.0],
            [0.0; 6],
            [1.0 / 6.0; 6],
            FusionWeights::default(),
        ).unwrap();
        desc.needs.reasoning = need;
        let cfg = Configuration {
            model_id: weak.id.clone(),
            precision: Precision::Int8,
            resolution: 448,
            placement: Tier::Edge,
        };
        let params = QualityModelParams::default();
        let q_weak = predict_quality(&cfg, &desc, &weak, &params);
        let q_strong = predict_quality(&cfg, &desc, &strong, &params);
        prop_assert!(q_strong + 1e-12 >= q_weak);
    }

    #[test]
    fn frontier_matches_dominance_oracle(
        points in prop::collection::vec((0u32..60, 0u32..30), 1..64),
    ) {
        let cands: Vec<ScoredCandidate> = points
            .iter()
            .enumerate()
            .map(|(i, (c, q))| ScoredCandidate {
                config: Configuration {
                    model_id: format!("m{i}"),
                    precision: Precision::Int8,
                    resolution: 336,
                    placement: if i % 2 == 0 { Tier::Edge } else { Tier::Cloud },
                },
                c_hat: f64::from(*c) / 6.0,
                q_hat: f64::from(*q) / 30.0,
            })
            .collect();
        let frontier = pareto_frontier(&cands).unwrap();
        // No frontier member is dominated by any input.
        for member in &frontier {
            for other in &cands {
                let dominated = other.c_hat <= member.c_hat
                    && other.q_hat >= member.q_hat
                    && (other.c_hat < member.c_hat || other.q_hat > member.q_hat);
                prop_assert!(!dominated);
            }
        }
        // Every non-dominated (cost, quality) point is represented.
        for cand in &cands {
            let dominated = cands.iter().any(|o| {
                o.c_hat <= cand.c_hat
                    && o.q_hat >= cand.q_hat
                    && (o.c_hat < cand.c_hat || o.q_hat > cand.q_hat)
            });
            if !dominated {
                prop_assert!(frontier
                    .iter()
                    .any(|m| m.c_hat == cand.c_hat && m.q_hat == cand.q_hat));
            }
        }
    }

    #[test]
    fn guard_totality(
        image in prop::array::uniform4(0.0..=1.0f64),
        text in prop::array::uniform6(0.0..=1.0f64),
        bw in 0.0..15.0f64,
    ) {
        let pool = PoolConfig::reference();
        let desc = descriptor_from_axes(image, text, [1.0 / 6.0; 6], FusionWeights::default()).unwrap();
        let decision = route(&desc, &pool, &NetworkState::new(bw), &RouterParams::default()).unwrap();
        prop_assert_eq!(decision.chosen.config.placement, Tier::Edge);
    }
}
