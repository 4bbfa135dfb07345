//! Analytic reference denoisers with closed-form behavior, used to verify
//! the tiled loop end to end without a neural model.

use crate::rng::SeededRng;
use crate::sampling::{ConditionVector, DenoiseError, Denoiser, TileContext};
use crate::scalar::Real;
use crate::tensor::{randn, Tensor};

/// Guards the oracle's division at the final nonzero sigma.
pub const SIGMA_FLOOR: f64 = 1e-6;

/// Predicts zero velocity: the latent passes through the loop unchanged.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroDenoiser;

impl<T: Real> Denoiser<T> for ZeroDenoiser {
    fn predict(
        &self,
        tile: &Tensor<T>,
        _ctx: &TileContext,
        _sigma: T,
        _condition: &ConditionVector<T>,
    ) -> std::result::Result<Tensor<T>, DenoiseError> {
        Ok(Tensor::zeros(tile.shape())?)
    }
}

/// Velocity field `v = (x - target) / max(sigma, SIGMA_FLOOR)` toward a fixed
/// long target latent. Under the linear schedule the Euler recurrence
/// telescopes: the final latent equals the target exactly (up to rounding),
/// for any tile layout, because all covering tiles predict identical
/// frame-wise values and fusion is a partition of unity.
#[derive(Debug, Clone)]
pub struct GlobalTargetOracle<T> {
    target: Tensor<T>,
}

impl<T: Real> GlobalTargetOracle<T> {
    pub fn new(target: Tensor<T>) -> Self {
        Self { target }
    }

    pub fn target(&self) -> &Tensor<T> {
        &self.target
    }

    fn velocity(
        &self,
        tile: &Tensor<T>,
        ctx: &TileContext,
        sigma: T,
    ) -> std::result::Result<Tensor<T>, DenoiseError> {
        let frames = tile.shape().frames;
        if ctx.frame_offset + frames > self.target.shape().frames {
            return Err(format!(
                "tile at frame {} with {} frames exceeds target ({} frames)",
                ctx.frame_offset,
                frames,
                self.target.shape().frames
            )
            .into());
        }
        let slice = self.target.frame_window(ctx.frame_offset, frames)?;
        let denom = sigma.max(T::from_f64_lossy(SIGMA_FLOOR));
        let data: Vec<T> = tile
            .data()
            .iter()
            .zip(slice.data())
            .map(|(x, t)| (*x - *t) / denom)
            .collect();
        Ok(Tensor::from_vec(tile.shape(), data)?)
    }
}

impl<T: Real> Denoiser<T> for GlobalTargetOracle<T> {
    fn predict(
        &self,
        tile: &Tensor<T>,
        ctx: &TileContext,
        sigma: T,
        _condition: &ConditionVector<T>,
    ) -> std::result::Result<Tensor<T>, DenoiseError> {
        self.velocity(tile, ctx, sigma)
    }
}

/// [`GlobalTargetOracle`] plus a deterministic per-tile-index perturbation
/// field, used to exercise fusion smoothing: without overlap the independent
/// per-tile fields produce hard seams, with overlap the sine weighting blends
/// them away.
#[derive(Debug, Clone)]
pub struct PerturbedOracle<T> {
    oracle: GlobalTargetOracle<T>,
    amplitude: T,
    seed: u64,
}

impl<T: Real> PerturbedOracle<T> {
    pub fn new(target: Tensor<T>, amplitude: T, seed: u64) -> Self {
        Self {
            oracle: GlobalTargetOracle::new(target),
            amplitude,
            seed,
        }
    }

    /// The perturbation tensor of one tile: a fixed standard-normal field
    /// drawn from a stream keyed by the tile index alone.
    fn perturbation(&self, tile: &Tensor<T>, tile_index: usize) -> Tensor<T> {
        let mut rng = SeededRng::new(self.seed, &format!("perturb-{tile_index}"));
        randn(tile.shape(), &mut rng).expect("tile shape is valid")
    }
}

impl<T: Real> Denoiser<T> for PerturbedOracle<T> {
    fn predict(
        &self,
        tile: &Tensor<T>,
        ctx: &TileContext,
        sigma: T,
        _condition: &ConditionVector<T>,
    ) -> std::result::Result<Tensor<T>, DenoiseError> {
        let base = self.oracle.velocity(tile, ctx, sigma)?;
        if self.amplitude == T::zero() {
            return Ok(base);
        }
        let field = self.perturbation(tile, ctx.tile_index);
        Ok(base.add_scaled(&field, self.amplitude)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Shape5;

    fn tile_and_ctx() -> (Tensor<f32>, TileContext) {
        let shape = Shape5::new(1, 1, 4, 2, 2);
        let mut rng = SeededRng::new(8, "tile");
        (
            randn(shape, &mut rng).unwrap(),
            TileContext {
                tile_index: 0,
                frame_offset: 0,
            },
        )
    }

    #[test]
    fn zero_denoiser_is_zero() {
        let (tile, ctx) = tile_and_ctx();
        let out = ZeroDenoiser
            .predict(&tile, &ctx, 1.0, &ConditionVector::empty())
            .unwrap();
        assert!(out.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn oracle_at_target_predicts_zero() {
        let (tile, ctx) = tile_and_ctx();
        let oracle = GlobalTargetOracle::new(tile.clone());
        let out = oracle
            .predict(&tile, &ctx, 0.5, &ConditionVector::empty())
            .unwrap();
        assert!(out.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_amplitude_matches_plain_oracle() {
        let (tile, ctx) = tile_and_ctx();
        let mut rng = SeededRng::new(9, "target");
        let target: Tensor<f32> = randn(tile.shape(), &mut rng).unwrap();
        let plain = GlobalTargetOracle::new(target.clone())
            .predict(&tile, &ctx, 0.7, &ConditionVector::empty())
            .unwrap();
        let perturbed = PerturbedOracle::new(target, 0.0, 123)
            .predict(&tile, &ctx, 0.7, &ConditionVector::empty())
            .unwrap();
        assert_eq!(plain.data(), perturbed.data());
    }

    #[test]
    fn perturbation_depends_only_on_tile_index() {
        let (tile, _) = tile_and_ctx();
        let mut rng = SeededRng::new(10, "target");
        let target: Tensor<f32> = randn(tile.shape(), &mut rng).unwrap();
        let oracle = PerturbedOracle::new(target, 0.5, 7);
        let a = oracle.perturbation(&tile, 3);
        let b = oracle.perturbation(&tile, 3);
        let c = oracle.perturbation(&tile, 4);
        assert_eq!(a.data(), b.data());
        assert_ne!(a.data(), c.data());
    }
}
