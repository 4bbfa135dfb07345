//! Butterworth low-pass masks over the 3D spectrum and the low/high split.
//!
//! Per-bin gain: `P(k_t, k_h, k_w) = B(f_t; c_t, m) * B(f_s; c_s, m)` with the
//! half-power response `B(f; c, m) = 1 / (1 + (f/c)^(2m))`. Frequencies are
//! normalized symmetrically, `f = min(k, N - k) / N` per axis, and the spatial
//! term uses the radial frequency `f_s = sqrt(f_h^2 + f_w^2)`. The symmetric
//! map keeps the mask even in every axis, so masked spectra of real tensors
//! stay Hermitian and invert to real tensors.

use crate::error::{Error, Result};
use crate::fft::fft3;
use crate::scalar::Real;
use crate::tensor::{ComplexTensor, Shape5, Tensor};

/// Parameter block for [`ButterworthMask`]; defaults follow the pipeline
/// defaults (order 4, both cutoffs 0.25).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ButterworthParams {
    pub order: u32,
    pub temporal_cutoff: f64,
    pub spatial_cutoff: f64,
}

impl Default for ButterworthParams {
    fn default() -> Self {
        Self {
            order: 4,
            temporal_cutoff: 0.25,
            spatial_cutoff: 0.25,
        }
    }
}

impl ButterworthParams {
    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(Error::InvalidParameter(
                "butterworth order must be >= 1".into(),
            ));
        }
        for (name, c) in [
            ("temporal_cutoff", self.temporal_cutoff),
            ("spatial_cutoff", self.spatial_cutoff),
        ] {
            if !(c > 0.0 && c <= 0.5) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in (0, 0.5], got {c}"
                )));
            }
        }
        Ok(())
    }
}

/// Normalized symmetric frequency of bin `k` on an axis of length `n`.
fn normalized_frequency(k: usize, n: usize) -> f64 {
    k.min(n - k) as f64 / n as f64
}

/// Half-power Butterworth response `1 / (1 + (f/c)^(2m))`.
fn butterworth_gain(freq: f64, cutoff: f64, order: u32) -> f64 {
    1.0 / (1.0 + (freq / cutoff).powi(2 * order as i32))
}

/// Separable temporal x radial-spatial Butterworth low-pass gains over a
/// `(frames, height, width)` spectrum.
#[derive(Debug, Clone)]
pub struct ButterworthMask<T> {
    params: ButterworthParams,
    frames: usize,
    height: usize,
    width: usize,
    gains: Vec<T>,
}

impl<T: Real> ButterworthMask<T> {
    pub fn new(
        frames: usize,
        height: usize,
        width: usize,
        params: ButterworthParams,
    ) -> Result<Self> {
        params.validate()?;
        if frames == 0 || height == 0 || width == 0 {
            return Err(Error::InvalidShape("mask extents must all be >= 1".into()));
        }
        let mut gains = Vec::with_capacity(frames * height * width);
        for kt in 0..frames {
            let ft = normalized_frequency(kt, frames);
            let temporal = butterworth_gain(ft, params.temporal_cutoff, params.order);
            for kh in 0..height {
                let fh = normalized_frequency(kh, height);
                for kw in 0..width {
                    let fw = normalized_frequency(kw, width);
                    let fs = (fh * fh + fw * fw).sqrt();
                    let spatial = butterworth_gain(fs, params.spatial_cutoff, params.order);
                    gains.push(T::from_f64_lossy(temporal * spatial));
                }
            }
        }
        Ok(Self {
            params,
            frames,
            height,
            width,
            gains,
        })
    }

    /// All-pass mask (every gain 1), handy for degenerate-cutoff tests and
    /// diagnostics.
    pub fn all_pass(frames: usize, height: usize, width: usize) -> Result<Self> {
        Self::from_gains(
            frames,
            height,
            width,
            vec![T::one(); frames * height * width],
        )
    }

    /// Build a mask from explicit gains in `[0, 1]` (diagnostic/test surface;
    /// Butterworth-constructed masks always satisfy the stricter `(0, 1]`).
    pub fn from_gains(frames: usize, height: usize, width: usize, gains: Vec<T>) -> Result<Self> {
        if frames == 0 || height == 0 || width == 0 {
            return Err(Error::InvalidShape("mask extents must all be >= 1".into()));
        }
        if gains.len() != frames * height * width {
            return Err(Error::InvalidShape(format!(
                "gain count {} does not match {frames}x{height}x{width}",
                gains.len()
            )));
        }
        if gains.iter().any(|g| !(*g >= T::zero() && *g <= T::one())) {
            return Err(Error::InvalidParameter(
                "mask gains must lie in [0, 1]".into(),
            ));
        }
        Ok(Self {
            params: ButterworthParams::default(),
            frames,
            height,
            width,
            gains,
        })
    }

    pub fn params(&self) -> ButterworthParams {
        self.params
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.frames, self.height, self.width)
    }

    pub fn gains(&self) -> &[T] {
        &self.gains
    }

    #[inline]
    pub fn gain_at(&self, kt: usize, kh: usize, kw: usize) -> T {
        self.gains[(kt * self.height + kh) * self.width + kw]
    }

    fn matches(&self, shape: Shape5) -> Result<()> {
        if (self.frames, self.height, self.width) != (shape.frames, shape.height, shape.width) {
            return Err(Error::InvalidShape(format!(
                "mask {}x{}x{} does not match tensor {}",
                self.frames, self.height, self.width, shape
            )));
        }
        Ok(())
    }
}

/// Split a real tensor's spectrum into masked low and complementary high
/// parts. The parts sum bin-wise to `fft3(x)` exactly.
pub fn split_frequency<T: Real>(
    x: &Tensor<T>,
    mask: &ButterworthMask<T>,
) -> Result<(ComplexTensor<T>, ComplexTensor<T>)> {
    mask.matches(x.shape())?;
    let spectrum = fft3(x);
    split_spectrum(&spectrum, mask)
}

/// Same split applied to an already-transformed spectrum.
///
/// Per bin, the dominant part (gain >= 1/2 picks the low side) is the rounded
/// product and the other is the residual `full - dominant`; that subtraction
/// is exact by Sterbenz's lemma, which makes `low + high == full` hold
/// bit-for-bit rather than merely within rounding.
pub fn split_spectrum<T: Real>(
    spectrum: &ComplexTensor<T>,
    mask: &ButterworthMask<T>,
) -> Result<(ComplexTensor<T>, ComplexTensor<T>)> {
    mask.matches(spectrum.shape())?;
    let shape = spectrum.shape();
    let slab = shape.slab();
    let half = T::from_f64_lossy(0.5);
    let mut low = spectrum.clone();
    let mut high = spectrum.clone();
    for s in 0..shape.slabs() {
        for (i, &gain) in mask.gains.iter().enumerate() {
            let idx = s * slab + i;
            let full = spectrum.data()[idx];
            let (l, h) = if gain >= half {
                let l = full * gain;
                (l, full - l)
            } else {
                let h = full * (T::one() - gain);
                (full - h, h)
            };
            low.data_mut()[idx] = l;
            high.data_mut()[idx] = h;
        }
    }
    Ok((low, high))
}
