//! Sliding-tile geometry and sine-weighted latent fusion.
//!
//! A frame at index `t` is covered by every tile `i` with
//! `i * stride <= t < i * stride + n`. Each covering tile contributes its
//! prediction at in-tile offset `s = t - i * stride`, weighted by
//! `omega(s) = sin(s * pi / n + pi / (2n))`: small at tile edges, near 1
//! mid-tile. Fusion normalizes the weights per frame, so tiles that agree
//! pass through unchanged and a single-cover frame is a bit-exact copy.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tensor::Tensor;

/// Sliding-tile geometry over a long latent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TileLayout {
    tile_frames: usize,
    overlap: usize,
    long_frames: usize,
}

impl TileLayout {
    /// Validate `0 <= overlap < tile_frames <= long_frames` and that the
    /// stride tiles the long length: `(long - n) % (n - o) == 0`.
    pub fn new(tile_frames: usize, overlap: usize, long_frames: usize) -> Result<Self> {
        if tile_frames == 0 {
            return Err(Error::InvalidParameter("tile_frames must be >= 1".into()));
        }
        if overlap >= tile_frames {
            return Err(Error::InvalidParameter(format!(
                "overlap {overlap} must be < tile_frames {tile_frames}"
            )));
        }
        if long_frames < tile_frames {
            return Err(Error::InvalidParameter(format!(
                "long_frames {long_frames} must be >= tile_frames {tile_frames}"
            )));
        }
        let stride = tile_frames - overlap;
        if !(long_frames - tile_frames).is_multiple_of(stride) {
            return Err(Error::InvalidParameter(format!(
                "long_frames {long_frames} is not reachable: ({long_frames} - {tile_frames}) \
                 is not divisible by stride {stride}"
            )));
        }
        Ok(Self {
            tile_frames,
            overlap,
            long_frames,
        })
    }

    pub fn tile_frames(&self) -> usize {
        self.tile_frames
    }

    pub fn overlap(&self) -> usize {
        self.overlap
    }

    pub fn long_frames(&self) -> usize {
        self.long_frames
    }

    pub fn stride(&self) -> usize {
        self.tile_frames - self.overlap
    }

    /// Number of sliding tiles, `(L - n) / (n - o) + 1`.
    pub fn tile_count(&self) -> usize {
        (self.long_frames - self.tile_frames) / self.stride() + 1
    }

    /// First frame of tile `i`.
    pub fn tile_start(&self, tile: usize) -> usize {
        tile * self.stride()
    }

    /// Ascending indices of the tiles covering frame `t`:
    /// `max(0, floor((t - n) / stride) + 1) ..= min(m - 1, floor(t / stride))`.
    pub fn covering_tiles(&self, frame: usize) -> Result<std::ops::RangeInclusive<usize>> {
        if frame >= self.long_frames {
            return Err(Error::IndexOutOfRange(format!(
                "frame {frame} out of {}",
                self.long_frames
            )));
        }
        let stride = self.stride() as i64;
        let t = frame as i64;
        let n = self.tile_frames as i64;
        let lo = ((t - n).div_euclid(stride) + 1).max(0) as usize;
        let hi = (t.div_euclid(stride) as usize).min(self.tile_count() - 1);
        Ok(lo..=hi)
    }

    /// How many tiles cover frame `t`.
    pub fn cover_count(&self, frame: usize) -> Result<usize> {
        let range = self.covering_tiles(frame)?;
        Ok(range.end() - range.start() + 1)
    }
}

/// Sine weight `omega(s) = sin(s * pi / n + pi / (2n))` for in-tile offset
/// `s` in `[0, n)`. Strictly positive and symmetric about the tile center.
pub fn omega<T: Real>(offset: usize, tile_frames: usize) -> Result<T> {
    if tile_frames == 0 {
        return Err(Error::InvalidParameter("tile_frames must be >= 1".into()));
    }
    if offset >= tile_frames {
        return Err(Error::IndexOutOfRange(format!(
            "in-tile offset {offset} out of [0, {tile_frames})"
        )));
    }
    Ok(T::from_f64_lossy(omega_f64(offset, tile_frames)))
}

fn omega_f64(offset: usize, tile_frames: usize) -> f64 {
    let n = tile_frames as f64;
    ((offset as f64) * std::f64::consts::PI / n + std::f64::consts::PI / (2.0 * n)).sin()
}

/// The per-offset weights of one tile.
#[derive(Debug, Clone)]
pub struct WeightProfile<T> {
    tile_frames: usize,
    values: Vec<T>,
}

impl<T: Real> WeightProfile<T> {
    pub fn new(tile_frames: usize) -> Result<Self> {
        if tile_frames == 0 {
            return Err(Error::InvalidParameter("tile_frames must be >= 1".into()));
        }
        let values = (0..tile_frames)
            .map(|s| T::from_f64_lossy(omega_f64(s, tile_frames)))
            .collect();
        Ok(Self {
            tile_frames,
            values,
        })
    }

    pub fn tile_frames(&self) -> usize {
        self.tile_frames
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}

/// Per-frame fusion coefficients: for each frame, the covering tiles and
/// their normalized weights (summing to 1). These are exactly the
/// coefficients [`fuse`] applies. Weights are normalized in f64 before
/// conversion to the working scalar.
pub fn weight_table<T: Real>(layout: &TileLayout) -> Result<Vec<Vec<(usize, T)>>> {
    let mut table = Vec::with_capacity(layout.long_frames());
    for t in 0..layout.long_frames() {
        let tiles = layout.covering_tiles(t)?;
        let raw: Vec<(usize, f64)> = tiles
            .map(|i| (i, omega_f64(t - layout.tile_start(i), layout.tile_frames())))
            .collect();
        let total: f64 = raw.iter().map(|(_, w)| w).sum();
        table.push(
            raw.into_iter()
                .map(|(i, w)| (i, T::from_f64_lossy(w / total)))
                .collect(),
        );
    }
    Ok(table)
}

/// Streaming fusion of per-tile predictions in ascending tile order.
///
/// Callers feed tiles strictly ascending (0, 1, ..., m-1); the accumulation
/// order is therefore fixed, making the fused output bitwise independent of
/// how the predictions were produced. Frames covered by exactly one tile are
/// copied rather than weighted, so single-cover regions are bit-exact.
pub struct FusionAccumulator<T> {
    layout: TileLayout,
    /// Normalized weight of tile `i` at in-tile offset `s`, `weights[i][s]`.
    weights: Vec<Vec<T>>,
    /// Frames covered by exactly one tile.
    single_cover: Vec<bool>,
    next_tile: usize,
    out: Option<Tensor<T>>,
}

impl<T: Real> FusionAccumulator<T> {
    pub fn new(layout: TileLayout) -> Result<Self> {
        let table = weight_table::<T>(&layout)?;
        let mut weights = vec![vec![T::zero(); layout.tile_frames()]; layout.tile_count()];
        let mut single_cover = vec![false; layout.long_frames()];
        for (t, entries) in table.iter().enumerate() {
            single_cover[t] = entries.len() == 1;
            for &(i, w) in entries {
                weights[i][t - layout.tile_start(i)] = w;
            }
        }
        Ok(Self {
            layout,
            weights,
            single_cover,
            next_tile: 0,
            out: None,
        })
    }

    pub fn layout(&self) -> &TileLayout {
        &self.layout
    }

    /// Fold in the prediction for the next tile index.
    pub fn accumulate(&mut self, tile: usize, prediction: &Tensor<T>) -> Result<()> {
        if tile != self.next_tile {
            return Err(Error::IncompletePredictions(format!(
                "tile {tile} supplied out of order; expected {}",
                self.next_tile
            )));
        }
        if tile >= self.layout.tile_count() {
            return Err(Error::IncompletePredictions(format!(
                "tile {tile} out of {} tiles",
                self.layout.tile_count()
            )));
        }
        let tile_shape = prediction.shape();
        if tile_shape.frames != self.layout.tile_frames() {
            return Err(Error::InvalidShape(format!(
                "prediction has {} frames, layout expects {}",
                tile_shape.frames,
                self.layout.tile_frames()
            )));
        }
        let out = match &mut self.out {
            Some(out) => {
                if out.shape() != tile_shape.with_frames(self.layout.long_frames()) {
                    return Err(Error::InvalidShape(format!(
                        "prediction shape {} disagrees with earlier tiles",
                        tile_shape
                    )));
                }
                out
            }
            None => {
                let long_shape = tile_shape.with_frames(self.layout.long_frames());
                self.out = Some(Tensor::zeros(long_shape)?);
                self.out.as_mut().unwrap()
            }
        };

        let start = self.layout.tile_start(tile);
        let plane = tile_shape.plane();
        let tile_slab = tile_shape.slab();
        let out_slab = out.shape().slab();
        for s in 0..self.layout.tile_frames() {
            let frame = start + s;
            let w = self.weights[tile][s];
            for slab in 0..tile_shape.slabs() {
                let src = slab * tile_slab + s * plane;
                let dst = slab * out_slab + frame * plane;
                let src_data = &prediction.data()[src..src + plane];
                let dst_data = &mut out.data_mut()[dst..dst + plane];
                if self.single_cover[frame] {
                    dst_data.copy_from_slice(src_data);
                } else {
                    for (d, &v) in dst_data.iter_mut().zip(src_data) {
                        *d += w * v;
                    }
                }
            }
        }
        self.next_tile += 1;
        Ok(())
    }

    /// Finish once every tile has been folded in.
    pub fn finish(self) -> Result<Tensor<T>> {
        if self.next_tile != self.layout.tile_count() {
            return Err(Error::IncompletePredictions(format!(
                "{} of {} tiles supplied",
                self.next_tile,
                self.layout.tile_count()
            )));
        }
        self.out
            .ok_or_else(|| Error::IncompletePredictions("no predictions were supplied".into()))
    }
}

/// Fuse per-tile noise predictions into one long prediction.
///
/// `predictions` must contain exactly one entry per tile index; list order is
/// irrelevant (entries are sorted internally), so concurrently produced
/// predictions fuse to a bitwise-identical result.
pub fn fuse<T: Real>(predictions: &[(usize, Tensor<T>)], layout: &TileLayout) -> Result<Tensor<T>> {
    let m = layout.tile_count();
    if predictions.len() != m {
        return Err(Error::IncompletePredictions(format!(
            "{} predictions supplied for {m} tiles",
            predictions.len()
        )));
    }
    let mut order: Vec<usize> = (0..predictions.len()).collect();
    order.sort_by_key(|&k| predictions[k].0);
    let mut seen = vec![false; m];
    let mut acc = FusionAccumulator::new(*layout)?;
    for k in order {
        let (tile, prediction) = &predictions[k];
        if *tile >= m {
            return Err(Error::IncompletePredictions(format!(
                "tile index {tile} out of {m} tiles"
            )));
        }
        if seen[*tile] {
            return Err(Error::IncompletePredictions(format!(
                "tile {tile} supplied more than once"
            )));
        }
        seen[*tile] = true;
        acc.accumulate(*tile, prediction)?;
    }
    acc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use crate::tensor::{randn, Shape5};

    fn layout(n: usize, o: usize, long: usize) -> TileLayout {
        TileLayout::new(n, o, long).unwrap()
    }

    #[test]
    fn default_geometry_yields_25_tiles() {
        let l = layout(16, 12, 112);
        assert_eq!(l.stride(), 4);
        assert_eq!(l.tile_count(), 25);
        assert_eq!(l.tile_start(24) + 16, 112);
    }

    #[test]
    fn covering_tiles_matches_brute_force() {
        for (n, o, long) in [
            (16, 12, 112),
            (16, 0, 64),
            (8, 6, 32),
            (8, 2, 32),
            (4, 3, 16),
        ] {
            let l = layout(n, o, long);
            for t in 0..long {
                let fast: Vec<usize> = l.covering_tiles(t).unwrap().collect();
                let slow: Vec<usize> = (0..l.tile_count())
                    .filter(|&i| {
                        let start = l.tile_start(i);
                        start <= t && t < start + n
                    })
                    .collect();
                assert_eq!(fast, slow, "n={n} o={o} long={long} t={t}");
                assert!(!fast.is_empty(), "frame {t} uncovered");
            }
        }
    }

    #[test]
    fn left_boundary_is_single_covered() {
        let l = layout(16, 12, 112);
        let tiles: Vec<usize> = l.covering_tiles(0).unwrap().collect();
        assert_eq!(tiles, vec![0]);
    }

    #[test]
    fn interior_frame_with_large_overlap_has_four_covers() {
        let l = layout(16, 12, 112);
        let tiles: Vec<usize> = l.covering_tiles(20).unwrap().collect();
        assert_eq!(tiles, vec![2, 3, 4, 5]);
    }

    #[test]
    fn disjoint_tiles_cover_each_frame_once() {
        let l = layout(16, 0, 64);
        for t in 0..64 {
            let tiles: Vec<usize> = l.covering_tiles(t).unwrap().collect();
            assert_eq!(tiles, vec![t / 16]);
        }
    }

    #[test]
    fn covering_rejects_out_of_range_frame() {
        let l = layout(8, 4, 16);
        assert!(matches!(
            l.covering_tiles(16),
            Err(Error::IndexOutOfRange(_))
        ));
    }

    #[test]
    fn omega_matches_direct_evaluation() {
        let w0: f64 = omega(0, 16).unwrap();
        assert!((w0 - 0.0980171403295606).abs() < 1e-12);
        let w8: f64 = omega(8, 16).unwrap();
        assert!((w8 - 0.9951847266721969).abs() < 1e-12);
    }

    #[test]
    fn omega_is_symmetric() {
        for n in [2usize, 5, 16, 31] {
            for s in 0..n {
                let a: f64 = omega(s, n).unwrap();
                let b: f64 = omega(n - 1 - s, n).unwrap();
                assert!((a - b).abs() < 1e-12, "n={n} s={s}");
                assert!(a > 0.0);
            }
        }
    }

    #[test]
    fn omega_rejects_offset_at_tile_length() {
        assert!(matches!(
            omega::<f64>(16, 16),
            Err(Error::IndexOutOfRange(_))
        ));
    }

    #[test]
    fn weight_profile_matches_omega() {
        let profile: WeightProfile<f64> = WeightProfile::new(16).unwrap();
        for (s, &v) in profile.values().iter().enumerate() {
            assert_eq!(v, omega::<f64>(s, 16).unwrap());
        }
    }

    #[test]
    fn weight_table_rows_sum_to_one() {
        let l = layout(16, 12, 112);
        let table: Vec<Vec<(usize, f64)>> = weight_table(&l).unwrap();
        assert_eq!(table.len(), 112);
        for (t, row) in table.iter().enumerate() {
            let sum: f64 = row.iter().map(|(_, w)| w).sum();
            assert!((sum - 1.0).abs() < 1e-9, "frame {t} sums to {sum}");
        }
        // Overlap of 12 > n/2: interior frames have more than 2 covers.
        assert!(table[20].len() > 2);
    }

    #[test]
    fn weight_table_disjoint_is_trivial() {
        let l = layout(16, 0, 64);
        let table: Vec<Vec<(usize, f64)>> = weight_table(&l).unwrap();
        for row in &table {
            assert_eq!(row.len(), 1);
            assert_eq!(row[0].1, 1.0);
        }
    }

    fn random_predictions(l: &TileLayout, seed: u64) -> Vec<(usize, Tensor<f32>)> {
        let mut rng = SeededRng::new(seed, "preds");
        (0..l.tile_count())
            .map(|i| {
                (
                    i,
                    randn(Shape5::new(1, 2, l.tile_frames(), 3, 3), &mut rng).unwrap(),
                )
            })
            .collect()
    }

    #[test]
    fn constant_predictions_fuse_to_the_constant() {
        let l = layout(16, 12, 112);
        let c = 2.5f32;
        let preds: Vec<(usize, Tensor<f32>)> = (0..l.tile_count())
            .map(|i| (i, Tensor::full(Shape5::new(1, 1, 16, 2, 2), c).unwrap()))
            .collect();
        let fused = fuse(&preds, &l).unwrap();
        for &v in fused.data() {
            assert!((v - c).abs() < 1e-6, "fused value {v}");
        }
    }

    #[test]
    fn single_cover_frames_are_bit_exact() {
        let l = layout(8, 2, 32);
        let preds = random_predictions(&l, 3);
        let fused = fuse(&preds, &l).unwrap();
        // Frames 0..stride of tile 0 and the tail of the last tile.
        let first = &preds[0].1;
        for f in 0..l.stride() {
            assert_eq!(fused.frame(f).unwrap(), first.frame(f).unwrap());
        }
        let last = &preds[l.tile_count() - 1].1;
        let last_start = l.tile_start(l.tile_count() - 1);
        for s in l.tile_frames() - l.stride()..l.tile_frames() {
            assert_eq!(fused.frame(last_start + s).unwrap(), last.frame(s).unwrap());
        }
    }

    #[test]
    fn fusion_is_permutation_invariant() {
        let l = layout(8, 6, 32);
        let mut preds = random_predictions(&l, 11);
        let fused = fuse(&preds, &l).unwrap();
        preds.reverse();
        preds.swap(0, 5);
        let refused = fuse(&preds, &l).unwrap();
        assert_eq!(fused.data(), refused.data());
    }

    #[test]
    fn fusion_rejects_missing_and_duplicate_tiles() {
        let l = layout(8, 4, 24);
        let mut preds = random_predictions(&l, 17);
        let removed = preds.pop().unwrap();
        assert!(matches!(
            fuse(&preds, &l),
            Err(Error::IncompletePredictions(_))
        ));
        preds.push(removed.clone());
        preds[0] = removed;
        assert!(matches!(
            fuse(&preds, &l),
            Err(Error::IncompletePredictions(_))
        ));
    }

    #[test]
    fn fusion_rejects_mismatched_shapes() {
        let l = layout(8, 4, 24);
        let mut preds = random_predictions(&l, 19);
        preds[2].1 = Tensor::zeros(Shape5::new(1, 1, 8, 3, 3)).unwrap();
        assert!(matches!(fuse(&preds, &l), Err(Error::InvalidShape(_))));
    }
}
