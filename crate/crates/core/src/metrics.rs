//! Desk-scale consistency metrics: temporal flicker, feature-pair cosine
//! consistency, threshold-counted identity consistency, the Gaussian Fréchet
//! distance between feature sets, and a cross-tile low-frequency similarity
//! diagnostic. All scores are pure functions accumulated in f64.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::filter::{split_frequency, ButterworthMask};
use crate::fusion::TileLayout;
use crate::scalar::Real;
use crate::tensor::Tensor;

/// One frame of a video handed to a feature extractor: every
/// `(batch, channel)` plane of that frame, slab-major.
#[derive(Debug, Clone)]
pub struct Frame<T> {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    pub data: Vec<T>,
}

impl<T: Real> Frame<T> {
    fn from_video(video: &Tensor<T>, f: usize) -> Result<Self> {
        let shape = video.shape();
        Ok(Self {
            channels: shape.slabs(),
            height: shape.height,
            width: shape.width,
            data: video.frame(f)?,
        })
    }

    #[inline]
    pub fn at(&self, c: usize, h: usize, w: usize) -> T {
        self.data[(c * self.height + h) * self.width + w]
    }
}

/// Deterministic map from a frame to a fixed-length feature vector; the seam
/// where a pretrained embedder would attach.
pub trait FrameFeatureExtractor<T: Real> {
    fn embed(&self, frame: &Frame<T>) -> Vec<T>;
}

/// Default desk-scale extractor: means over a (up to) 4x4 patch grid pooled
/// across channels, concatenated with per-channel standard deviations.
#[derive(Debug, Clone, Copy)]
pub struct ToyExtractor {
    pub grid: usize,
}

impl Default for ToyExtractor {
    fn default() -> Self {
        Self { grid: 4 }
    }
}

impl<T: Real> FrameFeatureExtractor<T> for ToyExtractor {
    fn embed(&self, frame: &Frame<T>) -> Vec<T> {
        let gh = self.grid.min(frame.height).max(1);
        let gw = self.grid.min(frame.width).max(1);
        let mut features = Vec::with_capacity(gh * gw + frame.channels);
        for bi in 0..gh {
            let h0 = bi * frame.height / gh;
            let h1 = (bi + 1) * frame.height / gh;
            for bj in 0..gw {
                let w0 = bj * frame.width / gw;
                let w1 = (bj + 1) * frame.width / gw;
                let mut sum = 0.0;
                let mut count = 0usize;
                for c in 0..frame.channels {
                    for h in h0..h1 {
                        for w in w0..w1 {
                            sum += frame.at(c, h, w).to_f64_lossless();
                            count += 1;
                        }
                    }
                }
                features.push(T::from_f64_lossy(sum / count as f64));
            }
        }
        let plane = frame.height * frame.width;
        for c in 0..frame.channels {
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for h in 0..frame.height {
                for w in 0..frame.width {
                    let x = frame.at(c, h, w).to_f64_lossless();
                    sum += x;
                    sum_sq += x * x;
                }
            }
            let mean = sum / plane as f64;
            let var = (sum_sq / plane as f64 - mean * mean).max(0.0);
            features.push(T::from_f64_lossy(var.sqrt()));
        }
        features
    }
}

fn require_frames<T: Real>(video: &Tensor<T>, minimum: usize) -> Result<()> {
    if video.shape().frames < minimum {
        return Err(Error::InsufficientFrames(format!(
            "need at least {minimum} frames, got {}",
            video.shape().frames
        )));
    }
    Ok(())
}

/// Mean absolute consecutive-frame difference, normalized by the video's
/// value range. A constant video scores 0; alternating extremes score 1.
pub fn temporal_flicker<T: Real>(video: &Tensor<T>) -> Result<f64> {
    require_frames(video, 2)?;
    let frames = video.shape().frames;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in video.data() {
        let x = v.to_f64_lossless();
        lo = lo.min(x);
        hi = hi.max(x);
    }
    let range = hi - lo;
    if range == 0.0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    let mut prev = video.frame(0)?;
    for f in 1..frames {
        let cur = video.frame(f)?;
        let mut acc = 0.0;
        for (a, b) in cur.iter().zip(&prev) {
            acc += (a.to_f64_lossless() - b.to_f64_lossless()).abs();
        }
        total += acc / cur.len() as f64;
        prev = cur;
    }
    Ok(total / (frames - 1) as f64 / range)
}

fn cosine_f64(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        // Zero embeddings contribute similarity 0 by convention.
        return 0.0;
    }
    dot / (na * nb)
}

/// Embed every frame of a video, widened to f64 feature vectors.
pub fn frame_features<T: Real>(
    video: &Tensor<T>,
    extractor: &dyn FrameFeatureExtractor<T>,
) -> Result<Vec<Vec<f64>>> {
    (0..video.shape().frames)
        .map(|f| {
            let frame = Frame::from_video(video, f)?;
            Ok(extractor
                .embed(&frame)
                .into_iter()
                .map(|v| v.to_f64_lossless())
                .collect())
        })
        .collect()
}

/// Mean cosine similarity between embeddings of consecutive frames.
pub fn pairwise_consistency<T: Real>(
    video: &Tensor<T>,
    extractor: &dyn FrameFeatureExtractor<T>,
) -> Result<f64> {
    require_frames(video, 2)?;
    let embeddings = frame_features(video, extractor)?;
    let sum: f64 = embeddings
        .windows(2)
        .map(|pair| cosine_f64(&pair[0], &pair[1]))
        .sum();
    Ok(sum / (embeddings.len() - 1) as f64)
}

/// Fraction of frames after the first whose embedding distance to frame 0
/// stays below the tolerance `tau`.
pub fn identity_consistency<T: Real>(
    video: &Tensor<T>,
    extractor: &dyn FrameFeatureExtractor<T>,
    tau: f64,
) -> Result<f64> {
    require_frames(video, 2)?;
    if !tau.is_finite() || tau <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance tau must be > 0, got {tau}"
        )));
    }
    let embeddings = frame_features(video, extractor)?;
    let anchor = &embeddings[0];
    let close = embeddings[1..]
        .iter()
        .filter(|e| {
            let dist: f64 = anchor
                .iter()
                .zip(e.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            dist < tau
        })
        .count();
    Ok(close as f64 / (embeddings.len() - 1) as f64)
}

/// Gaussian Fréchet distance between two feature sets:
/// `|mu_a - mu_b|^2 + tr(S_a + S_b - 2 (S_a S_b)^{1/2})`, covariances with
/// `1/(n-1)` normalization and the cross term evaluated through the
/// symmetric product `S_a^{1/2} S_b S_a^{1/2}` with negative eigenvalues
/// clipped at zero.
pub fn frechet_distance<T: Real>(features_a: &[Vec<T>], features_b: &[Vec<T>]) -> Result<f64> {
    for (name, set) in [("first", features_a), ("second", features_b)] {
        if set.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "{name} feature set needs at least 2 samples, got {}",
                set.len()
            )));
        }
    }
    let d = features_a[0].len();
    for row in features_a.iter().chain(features_b) {
        if row.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "feature vectors have mixed dimensions ({} vs {d})",
                row.len()
            )));
        }
    }
    if d == 0 {
        return Err(Error::DimensionMismatch(
            "feature vectors must be non-empty".into(),
        ));
    }

    let to_f64 = |set: &[Vec<T>]| -> Vec<Vec<f64>> {
        set.iter()
            .map(|row| row.iter().map(|v| v.to_f64_lossless()).collect())
            .collect()
    };
    let a = to_f64(features_a);
    let b = to_f64(features_b);
    let (mean_a, cov_a) = crate::linalg::mean_and_covariance(&a, d);
    let (mean_b, cov_b) = crate::linalg::mean_and_covariance(&b, d);

    let mean_term: f64 = mean_a
        .iter()
        .zip(&mean_b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum();

    let sqrt_a = crate::linalg::sym_sqrt(&cov_a, d);
    let inner = crate::linalg::mat_mul(&crate::linalg::mat_mul(&sqrt_a, &cov_b, d), &sqrt_a, d);
    let (lambda, _) = crate::linalg::sym_eig(&inner, d);
    let trace_cross: f64 = lambda.iter().map(|&l| l.max(0.0).sqrt()).sum();

    let trace_a: f64 = (0..d).map(|i| cov_a[i * d + i]).sum();
    let trace_b: f64 = (0..d).map(|i| cov_b[i * d + i]).sum();
    Ok(mean_term + trace_a + trace_b - 2.0 * trace_cross)
}

/// Mean cosine similarity between the flattened low-frequency components of
/// all pairs of non-overlapping tile windows. High for videos whose distant
/// tiles share global content; near 0 for independent noise.
pub fn low_freq_similarity<T: Real>(
    video: &Tensor<T>,
    layout: &TileLayout,
    mask: &ButterworthMask<T>,
) -> Result<f64> {
    if video.shape().frames != layout.long_frames() {
        return Err(Error::InvalidShape(format!(
            "video has {} frames, layout expects {}",
            video.shape().frames,
            layout.long_frames()
        )));
    }
    let n = layout.tile_frames();
    let m = layout.tile_count();

    let lows: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let window = video.frame_window(layout.tile_start(i), n)?;
            let (low, _) = split_frequency(&window, mask)?;
            // Real-ified complex vector: cosine over (re, im) pairs matches
            // cosine over the inverse-transformed low-pass signals.
            Ok(low
                .data()
                .iter()
                .flat_map(|c| [c.re.to_f64_lossless(), c.im.to_f64_lossless()])
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut sum = 0.0;
    let mut pairs = 0usize;
    for i in 0..m {
        for j in (i + 1)..m {
            // Windows overlap iff their starts differ by less than n frames.
            if layout.tile_start(j) - layout.tile_start(i) < n {
                continue;
            }
            sum += cosine_f64(&lows[i], &lows[j]);
            pairs += 1;
        }
    }
    if pairs == 0 {
        return Err(Error::InsufficientWindows(
            "layout admits no pair of non-overlapping tile windows".into(),
        ));
    }
    Ok(sum / pairs as f64)
}

/// Named scalar results of a metric run plus provenance.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricReport {
    scalars: BTreeMap<String, f64>,
    pub seed: Option<u64>,
    pub config_digest: Option<String>,
}

impl MetricReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record a named score; non-finite values are rejected.
    pub fn insert(&mut self, name: &str, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "metric {name} is not finite: {value}"
            )));
        }
        self.scalars.insert(name.to_owned(), value);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.scalars.get(name).copied()
    }

    pub fn scalars(&self) -> &BTreeMap<String, f64> {
        &self.scalars
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::ButterworthParams;
    use crate::noise::replicate_noise;
    use crate::rng::SeededRng;
    use crate::tensor::{randn, Shape5};

    fn toy() -> ToyExtractor {
        ToyExtractor::default()
    }

    #[test]
    fn flicker_of_constant_video_is_zero() {
        let video: Tensor<f32> = Tensor::full(Shape5::new(1, 1, 6, 4, 4), 3.0).unwrap();
        assert_eq!(temporal_flicker(&video).unwrap(), 0.0);
    }

    #[test]
    fn flicker_of_alternating_extremes_is_one() {
        let shape = Shape5::new(1, 1, 6, 2, 2);
        let mut video: Tensor<f64> = Tensor::zeros(shape).unwrap();
        for f in (1..6).step_by(2) {
            let ones = [1.0; 4];
            for (i, v) in ones.iter().enumerate() {
                let (h, w) = (i / 2, i % 2);
                let idx = video.index_of(0, 0, f, h, w);
                video.data_mut()[idx] = *v;
            }
        }
        assert!((temporal_flicker(&video).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flicker_of_linear_ramp() {
        // Values ramp 0 -> 1 over F frames: flicker = 1 / (F - 1).
        let frames = 9;
        let shape = Shape5::new(1, 1, frames, 2, 2);
        let mut video: Tensor<f64> = Tensor::zeros(shape).unwrap();
        for f in 0..frames {
            let value = f as f64 / (frames - 1) as f64;
            for h in 0..2 {
                for w in 0..2 {
                    let idx = video.index_of(0, 0, f, h, w);
                    video.data_mut()[idx] = value;
                }
            }
        }
        let expected = 1.0 / (frames - 1) as f64;
        assert!((temporal_flicker(&video).unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn flicker_requires_two_frames() {
        let video: Tensor<f32> = Tensor::zeros(Shape5::new(1, 1, 1, 4, 4)).unwrap();
        assert!(matches!(
            temporal_flicker(&video),
            Err(Error::InsufficientFrames(_))
        ));
    }

    #[test]
    fn pairwise_consistency_of_constant_video_is_one() {
        let video: Tensor<f32> = Tensor::full(Shape5::new(1, 2, 5, 8, 8), 1.5).unwrap();
        let score = pairwise_consistency(&video, &toy()).unwrap();
        assert!((score - 1.0).abs() < 1e-9, "score {score}");
    }

    #[test]
    fn pairwise_consistency_is_time_reversal_invariant() {
        let shape = Shape5::new(1, 1, 7, 8, 8);
        let video: Tensor<f64> = randn(shape, &mut SeededRng::new(12, "video")).unwrap();
        let reversed_data: Vec<f64> = (0..7).rev().flat_map(|f| video.frame(f).unwrap()).collect();
        let reversed = Tensor::from_vec(shape, reversed_data).unwrap();
        let a = pairwise_consistency(&video, &toy()).unwrap();
        let b = pairwise_consistency(&reversed, &toy()).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_embeddings_score_zero() {
        struct OneHot;
        impl FrameFeatureExtractor<f64> for OneHot {
            fn embed(&self, frame: &Frame<f64>) -> Vec<f64> {
                // Frame f carries value f in every element; map to a one-hot.
                let tag = frame.data[0] as usize;
                let mut e = vec![0.0; 8];
                e[tag % 8] = 1.0;
                e
            }
        }
        let shape = Shape5::new(1, 1, 4, 2, 2);
        let mut video: Tensor<f64> = Tensor::zeros(shape).unwrap();
        for f in 0..4 {
            for h in 0..2 {
                for w in 0..2 {
                    let idx = video.index_of(0, 0, f, h, w);
                    video.data_mut()[idx] = f as f64;
                }
            }
        }
        assert_eq!(pairwise_consistency(&video, &OneHot).unwrap(), 0.0);
    }

    #[test]
    fn identity_consistency_on_identical_frames_is_one() {
        let video: Tensor<f32> = Tensor::full(Shape5::new(1, 1, 5, 8, 8), 0.25).unwrap();
        assert_eq!(identity_consistency(&video, &toy(), 1e-6).unwrap(), 1.0);
    }

    #[test]
    fn identity_consistency_rejects_bad_tau() {
        let video: Tensor<f32> = Tensor::zeros(Shape5::new(1, 1, 3, 4, 4)).unwrap();
        assert!(matches!(
            identity_consistency(&video, &toy(), 0.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            identity_consistency(&video, &toy(), -1.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    /// Video with frame 0 repeated for half the later frames and far-away
    /// frames for the other half; tau between the clusters counts exactly
    /// the copies.
    fn half_copies_video() -> Tensor<f64> {
        let frames = 9; // frame 0 + 4 copies + 4 far frames
        let shape = Shape5::new(1, 1, frames, 8, 8);
        let mut rng = SeededRng::new(77, "anchor");
        let anchor: Tensor<f64> = randn(Shape5::new(1, 1, 1, 8, 8), &mut rng).unwrap();
        let mut video: Tensor<f64> = Tensor::zeros(shape).unwrap();
        let anchor_frame = anchor.frame(0).unwrap();
        for f in 0..frames {
            let offset = if f == 0 || f % 2 == 1 { 0.0 } else { 100.0 };
            for (i, &v) in anchor_frame.iter().enumerate() {
                let (h, w) = (i / 8, i % 8);
                let idx = video.index_of(0, 0, f, h, w);
                video.data_mut()[idx] = v + offset;
            }
        }
        video
    }

    #[test]
    fn identity_consistency_counts_the_constructed_half() {
        let video = half_copies_video();
        let score = identity_consistency(&video, &toy(), 1.0).unwrap();
        assert_eq!(score, 0.5);
    }

    #[test]
    fn identity_consistency_extreme_tau_values() {
        let video = half_copies_video();
        // Tau below every observed nonzero distance: only exact copies pass.
        assert_eq!(identity_consistency(&video, &toy(), 1e-9).unwrap(), 0.5);
        // Jittered video where every frame differs: tiny tau scores 0.
        let shape = Shape5::new(1, 1, 6, 8, 8);
        let jittered: Tensor<f64> = randn(shape, &mut SeededRng::new(5, "jit")).unwrap();
        assert_eq!(identity_consistency(&jittered, &toy(), 1e-12).unwrap(), 0.0);
        // Tau above every distance: everything passes.
        assert_eq!(identity_consistency(&video, &toy(), 1e6).unwrap(), 1.0);
    }

    #[test]
    fn identity_consistency_is_monotone_in_tau() {
        let shape = Shape5::new(1, 2, 10, 8, 8);
        let video: Tensor<f64> = randn(shape, &mut SeededRng::new(8, "mono")).unwrap();
        let mut last = 0.0;
        for tau in [0.01, 0.1, 0.5, 1.0, 5.0, 50.0] {
            let score = identity_consistency(&video, &toy(), tau).unwrap();
            assert!(score >= last, "tau {tau}: {score} < {last}");
            last = score;
        }
    }

    #[test]
    fn frechet_identical_sets_is_zero() {
        let mut rng = SeededRng::new(30, "feat");
        let feats: Vec<Vec<f64>> = (0..20)
            .map(|_| (0..6).map(|_| rng.standard_normal()).collect())
            .collect();
        let d = frechet_distance(&feats, &feats).unwrap();
        assert!(d.abs() < 1e-6, "distance {d}");
    }

    #[test]
    fn frechet_is_symmetric() {
        let mut rng = SeededRng::new(31, "feat");
        let a: Vec<Vec<f64>> = (0..16)
            .map(|_| (0..5).map(|_| rng.standard_normal()).collect())
            .collect();
        let b: Vec<Vec<f64>> = (0..12)
            .map(|_| (0..5).map(|_| rng.standard_normal() + 0.5).collect())
            .collect();
        let ab = frechet_distance(&a, &b).unwrap();
        let ba = frechet_distance(&b, &a).unwrap();
        assert!((ab - ba).abs() < 1e-9);
    }

    #[test]
    fn frechet_matches_one_dimensional_closed_form() {
        // 1-D: (mu_a - mu_b)^2 + (sigma_a - sigma_b)^2.
        let a: Vec<Vec<f64>> = vec![vec![-1.0], vec![1.0]]; // mean 0, sd sqrt(2)
        let b: Vec<Vec<f64>> = vec![vec![0.0], vec![2.0]]; // mean 1, sd sqrt(2)
        let d = frechet_distance(&a, &b).unwrap();
        assert!((d - 1.0).abs() < 1e-6, "distance {d}");
    }

    #[test]
    fn frechet_rejects_degenerate_inputs() {
        let a = vec![vec![1.0f64], vec![2.0]];
        assert!(matches!(
            frechet_distance(&a, &[vec![1.0]]),
            Err(Error::InvalidParameter(_))
        ));
        let mixed = vec![vec![1.0, 2.0], vec![3.0]];
        assert!(matches!(
            frechet_distance(&a, &mixed),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn low_freq_similarity_of_exact_copies_is_one() {
        let tile: Tensor<f64> =
            randn(Shape5::new(1, 1, 8, 8, 8), &mut SeededRng::new(50, "tile")).unwrap();
        let video = replicate_noise(&tile, 4).unwrap();
        let layout = TileLayout::new(8, 0, 32).unwrap();
        let mask = ButterworthMask::new(8, 8, 8, ButterworthParams::default()).unwrap();
        let score = low_freq_similarity(&video, &layout, &mask).unwrap();
        assert!((score - 1.0).abs() < 1e-9, "score {score}");
    }

    #[test]
    fn low_freq_similarity_of_iid_noise_is_near_zero() {
        let video: Tensor<f64> = randn(
            Shape5::new(1, 1, 64, 16, 16),
            &mut SeededRng::new(51, "iid"),
        )
        .unwrap();
        let layout = TileLayout::new(16, 0, 64).unwrap();
        let mask = ButterworthMask::new(16, 16, 16, ButterworthParams::default()).unwrap();
        let score = low_freq_similarity(&video, &layout, &mask).unwrap();
        // Independent windows: zero mean similarity, a few standard errors
        // of slack for the handful of pairs.
        assert!(score.abs() < 0.15, "score {score}");
    }

    #[test]
    fn low_freq_similarity_survives_high_frequency_jitter() {
        let tile: Tensor<f64> =
            randn(Shape5::new(1, 1, 8, 8, 8), &mut SeededRng::new(52, "tile")).unwrap();
        let video = replicate_noise(&tile, 4).unwrap();
        let jitter: Tensor<f64> = randn(video.shape(), &mut SeededRng::new(53, "jitter")).unwrap();
        let jittered = video.add_scaled(&jitter, 0.05).unwrap();
        let layout = TileLayout::new(8, 0, 32).unwrap();
        let mask = ButterworthMask::new(8, 8, 8, ButterworthParams::default()).unwrap();
        let score = low_freq_similarity(&jittered, &layout, &mask).unwrap();
        assert!(score > 0.9, "score {score}");
    }

    #[test]
    fn low_freq_similarity_needs_disjoint_windows() {
        let video: Tensor<f64> =
            randn(Shape5::new(1, 1, 12, 4, 4), &mut SeededRng::new(54, "v")).unwrap();
        // All tile pairs overlap: 2 tiles, stride 4 < n = 8.
        let layout = TileLayout::new(8, 4, 12).unwrap();
        let mask = ButterworthMask::new(8, 4, 4, ButterworthParams::default()).unwrap();
        assert!(matches!(
            low_freq_similarity(&video, &layout, &mask),
            Err(Error::InsufficientWindows(_))
        ));
    }

    #[test]
    fn flicker_is_offset_invariant_and_cosine_is_scale_invariant() {
        let shape = Shape5::new(1, 1, 6, 8, 8);
        let video: Tensor<f64> = randn(shape, &mut SeededRng::new(14, "inv")).unwrap();
        let shifted_data: Vec<f64> = video.data().iter().map(|v| v + 42.0).collect();
        let shifted = Tensor::from_vec(shape, shifted_data).unwrap();
        let a = temporal_flicker(&video).unwrap();
        let b = temporal_flicker(&shifted).unwrap();
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");

        // Per-frame positive scaling of embeddings leaves cosine scores
        // untouched.
        struct Scaled(ToyExtractor, f64);
        impl FrameFeatureExtractor<f64> for Scaled {
            fn embed(&self, frame: &Frame<f64>) -> Vec<f64> {
                self.0
                    .embed(frame)
                    .into_iter()
                    .map(|v| v * self.1)
                    .collect()
            }
        }
        let plain = pairwise_consistency(&video, &toy()).unwrap();
        let scaled = pairwise_consistency(&video, &Scaled(toy(), 7.5)).unwrap();
        assert!((plain - scaled).abs() < 1e-12);
    }

    #[test]
    fn report_rejects_non_finite_scores() {
        let mut report = MetricReport::new();
        report.insert("flicker", 0.5).unwrap();
        assert!(report.insert("bad", f64::NAN).is_err());
        assert_eq!(report.get("flicker"), Some(0.5));
    }
}
