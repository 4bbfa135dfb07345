//! The tiled denoising loop: a sigma schedule drives flow-matching Euler
//! updates; at every step the long latent is cut into sliding tiles, each
//! tile is handed to the pluggable denoiser, and the per-tile predictions are
//! fused (sine-weighted) into one long prediction before a single update.
//!
//! Tile evaluations within a step are independent. They may run in parallel
//! (rayon) up to a max-in-flight cap; fusion accumulates in ascending tile
//! order either way, so the output is bitwise independent of evaluation
//! order.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fusion::{FusionAccumulator, TileLayout};
use crate::noise::{init_long_noise, NoiseInitConfig};
use crate::scalar::Real;
use crate::tensor::Tensor;

/// Monotone decreasing noise levels `sigma_0 > ... > sigma_N = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaSchedule<T> {
    values: Vec<T>,
}

impl<T: Real> SigmaSchedule<T> {
    /// Wrap explicit sigma values; must be strictly decreasing and end at 0.
    pub fn from_values(values: Vec<T>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidParameter(
                "schedule needs at least two sigma values".into(),
            ));
        }
        if values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidParameter(
                "sigma values must be strictly decreasing".into(),
            ));
        }
        if *values.last().unwrap() != T::zero() {
            return Err(Error::InvalidParameter(
                "terminal sigma must be exactly 0".into(),
            ));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Number of update steps (one fewer than the number of sigma values).
    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    /// Consecutive `(sigma_cur, sigma_next)` pairs.
    pub fn pairs(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.values.windows(2).map(|w| (w[0], w[1]))
    }
}

/// Linear flow-matching schedule `sigma_i = 1 - i / steps`, `i = 0..=steps`.
pub fn build_schedule<T: Real>(steps: usize) -> Result<SigmaSchedule<T>> {
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be >= 1".into()));
    }
    let denom = T::from_usize(steps).expect("step count fits scalar");
    let values = (0..=steps)
        .map(|i| T::from_usize(steps - i).expect("step count fits scalar") / denom)
        .collect();
    SigmaSchedule::from_values(values)
}

/// Conditioning handed to the denoiser: a fixed-length embedding plus the
/// source prompt for provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionVector<T> {
    pub embedding: Vec<T>,
    pub prompt: String,
}

impl<T: Real> ConditionVector<T> {
    /// Deterministic toy embedding derived from the prompt text.
    pub fn from_prompt(prompt: &str, dim: usize) -> Self {
        let mut rng =
            crate::rng::SeededRng::new(crate::hash::fnv1a64(prompt.as_bytes()), "condition");
        let mut embedding = vec![T::zero(); dim];
        rng.fill_standard_normal(&mut embedding);
        Self {
            embedding,
            prompt: prompt.to_owned(),
        }
    }

    pub fn empty() -> Self {
        Self {
            embedding: Vec::new(),
            prompt: String::new(),
        }
    }
}

/// Placement of the tile being denoised. Model-backed denoisers can ignore
/// it; the analytic reference denoisers need it to line their targets and
/// perturbation fields up with the long latent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TileContext {
    pub tile_index: usize,
    pub frame_offset: usize,
}

/// Error type a denoiser may surface; the loop wraps it with tile and sigma.
pub type DenoiseError = Box<dyn std::error::Error + Send + Sync>;

/// The seam where a real model would attach: a deterministic map from
/// (tile latent, noise level, condition) to a velocity prediction of the
/// same shape.
pub trait Denoiser<T: Real>: Sync {
    fn predict(
        &self,
        tile: &Tensor<T>,
        ctx: &TileContext,
        sigma: T,
        condition: &ConditionVector<T>,
    ) -> std::result::Result<Tensor<T>, DenoiseError>;

    /// Whether `predict` may be called from multiple threads at once.
    /// Serial denoisers return false and are evaluated sequentially even
    /// when the caller asked for parallel tiles.
    fn parallel_safe(&self) -> bool {
        true
    }
}

/// Execution policy for tile evaluation within one timestep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TileExecution {
    /// Evaluate tiles with rayon when the denoiser allows it.
    pub parallel: bool,
    /// Upper bound on simultaneously held tile predictions; caps peak
    /// memory. `None` means all tiles of a step may be in flight.
    pub max_in_flight: Option<usize>,
}

/// Run-level configuration for [`generate`].
#[derive(Debug, Clone)]
pub struct GenerationConfig<T> {
    pub layout: TileLayout,
    pub schedule: SigmaSchedule<T>,
    pub noise: NoiseInitConfig<T>,
    pub condition: ConditionVector<T>,
    pub execution: TileExecution,
}

impl<T: Real> GenerationConfig<T> {
    pub fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        if self.layout.long_frames() != self.noise.long_frames() {
            return Err(Error::InvalidParameter(format!(
                "layout long length {} differs from noise config length {}",
                self.layout.long_frames(),
                self.noise.long_frames()
            )));
        }
        Ok(())
    }
}

/// Flow-matching Euler update `x + (sigma_next - sigma_cur) * v`.
pub fn euler_step<T: Real>(
    x: &Tensor<T>,
    velocity: &Tensor<T>,
    sigma_cur: T,
    sigma_next: T,
) -> Result<Tensor<T>> {
    if sigma_next >= sigma_cur {
        return Err(Error::InvalidParameter(format!(
            "sigma_next {sigma_next} must be < sigma_cur {sigma_cur}"
        )));
    }
    x.add_scaled(velocity, sigma_next - sigma_cur)
}

/// One tiled denoising step: predict per tile at `sigma_cur`, fuse, then
/// apply a single Euler update to the whole long latent.
pub fn denoise_step_tiled<T: Real>(
    x_long: &Tensor<T>,
    sigma_cur: T,
    sigma_next: T,
    denoiser: &dyn Denoiser<T>,
    layout: &TileLayout,
    condition: &ConditionVector<T>,
    execution: TileExecution,
) -> Result<Tensor<T>> {
    if x_long.shape().frames != layout.long_frames() {
        return Err(Error::InvalidShape(format!(
            "latent has {} frames, layout expects {}",
            x_long.shape().frames,
            layout.long_frames()
        )));
    }
    let tile_count = layout.tile_count();
    let chunk = execution
        .max_in_flight
        .unwrap_or(tile_count)
        .clamp(1, tile_count.max(1));
    let parallel = execution.parallel && denoiser.parallel_safe();

    let predict_one = |tile: usize| -> Result<Tensor<T>> {
        let start = layout.tile_start(tile);
        let view = x_long.frame_window(start, layout.tile_frames())?;
        let ctx = TileContext {
            tile_index: tile,
            frame_offset: start,
        };
        denoiser
            .predict(&view, &ctx, sigma_cur, condition)
            .map_err(|source| Error::Denoiser {
                tile,
                sigma: sigma_cur.to_f64_lossless(),
                source,
            })
    };

    let mut acc = FusionAccumulator::new(*layout)?;
    let tiles: Vec<usize> = (0..tile_count).collect();
    for batch in tiles.chunks(chunk) {
        let predictions: Vec<(usize, Tensor<T>)> = if parallel {
            batch
                .par_iter()
                .map(|&tile| predict_one(tile).map(|p| (tile, p)))
                .collect::<Result<_>>()?
        } else {
            batch
                .iter()
                .map(|&tile| predict_one(tile).map(|p| (tile, p)))
                .collect::<Result<_>>()?
        };
        // Chunks arrive ascending and are folded in ascending tile order, so
        // the accumulation sequence never depends on thread interleaving.
        for (tile, prediction) in &predictions {
            acc.accumulate(*tile, prediction)?;
        }
    }
    let fused = acc.finish()?;
    euler_step(x_long, &fused, sigma_cur, sigma_next)
}

/// Full pipeline: initialize the long noise, then run every schedule step
/// through [`denoise_step_tiled`]. Deterministic given the configuration.
pub fn generate<T: Real>(
    cfg: &GenerationConfig<T>,
    denoiser: &dyn Denoiser<T>,
) -> Result<Tensor<T>> {
    cfg.validate()?;
    let mut x = init_long_noise(&cfg.noise)?;
    for (sigma_cur, sigma_next) in cfg.schedule.pairs() {
        x = denoise_step_tiled(
            &x,
            sigma_cur,
            sigma_next,
            denoiser,
            &cfg.layout,
            &cfg.condition,
            cfg.execution,
        )?;
    }
    Ok(x)
}
