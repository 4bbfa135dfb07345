//! Five-axis real and complex tensors in `[batch, channel, frame, height, width]`
//! row-major layout. Tensors are plain owned buffers: immutable values once
//! built, cheap to clone at desk scale, and safe to share across threads.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::scalar::Real;

/// Extents of the five axes `(batch, channel, frames, height, width)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape5 {
    pub batch: usize,
    pub channel: usize,
    pub frames: usize,
    pub height: usize,
    pub width: usize,
}

impl Shape5 {
    pub fn new(batch: usize, channel: usize, frames: usize, height: usize, width: usize) -> Self {
        Self {
            batch,
            channel,
            frames,
            height,
            width,
        }
    }

    /// Total element count; errors on zero or overflowing extents.
    pub fn checked_len(&self) -> Result<usize> {
        let dims = [
            self.batch,
            self.channel,
            self.frames,
            self.height,
            self.width,
        ];
        if dims.contains(&0) {
            return Err(Error::InvalidShape(format!(
                "all extents must be >= 1, got {self:?}"
            )));
        }
        dims.iter().try_fold(1usize, |acc, &d| {
            acc.checked_mul(d)
                .ok_or_else(|| Error::InvalidShape(format!("element count overflows: {self:?}")))
        })
    }

    pub fn len(&self) -> usize {
        self.batch * self.channel * self.frames * self.height * self.width
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Elements per frame slice of one `(batch, channel)` slab.
    pub fn plane(&self) -> usize {
        self.height * self.width
    }

    /// Elements per `(batch, channel)` slab.
    pub fn slab(&self) -> usize {
        self.frames * self.plane()
    }

    /// Number of `(batch, channel)` slabs.
    pub fn slabs(&self) -> usize {
        self.batch * self.channel
    }

    /// Same shape with a different frame count.
    pub fn with_frames(&self, frames: usize) -> Self {
        Self { frames, ..*self }
    }
}

impl std::fmt::Display for Shape5 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}, {}, {}, {}, {}]",
            self.batch, self.channel, self.frames, self.height, self.width
        )
    }
}

/// Dense real tensor over the five-axis layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<T> {
    shape: Shape5,
    data: Vec<T>,
}

impl<T: Real> Tensor<T> {
    /// Wrap an existing buffer; its length must match the shape.
    pub fn from_vec(shape: Shape5, data: Vec<T>) -> Result<Self> {
        let len = shape.checked_len()?;
        if data.len() != len {
            return Err(Error::InvalidShape(format!(
                "data length {} does not match shape {} ({} elements)",
                data.len(),
                shape,
                len
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: Shape5) -> Result<Self> {
        let len = shape.checked_len()?;
        Ok(Self {
            shape,
            data: vec![T::zero(); len],
        })
    }

    pub fn full(shape: Shape5, value: T) -> Result<Self> {
        let len = shape.checked_len()?;
        Ok(Self {
            shape,
            data: vec![value; len],
        })
    }

    pub fn shape(&self) -> Shape5 {
        self.shape
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn index_of(&self, b: usize, c: usize, f: usize, h: usize, w: usize) -> usize {
        let s = &self.shape;
        (((b * s.channel + c) * s.frames + f) * s.height + h) * s.width + w
    }

    #[inline]
    pub fn at(&self, b: usize, c: usize, f: usize, h: usize, w: usize) -> T {
        self.data[self.index_of(b, c, f, h, w)]
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    /// Largest absolute elementwise difference; shapes must match.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        if self.shape != other.shape {
            return Err(Error::InvalidShape(format!(
                "shape {} differs from {}",
                self.shape, other.shape
            )));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).abs())))
    }

    /// Elementwise `self + scale * other`.
    pub fn add_scaled(&self, other: &Self, scale: T) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::InvalidShape(format!(
                "shape {} differs from {}",
                self.shape, other.shape
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| *a + scale * *b)
            .collect();
        Ok(Self {
            shape: self.shape,
            data,
        })
    }

    /// Copy of the frame window `[start, start + frames)` of every slab.
    pub fn frame_window(&self, start: usize, frames: usize) -> Result<Self> {
        let end = start
            .checked_add(frames)
            .filter(|&e| e <= self.shape.frames)
            .ok_or_else(|| {
                Error::IndexOutOfRange(format!(
                    "frame window [{start}, {start}+{frames}) exceeds {} frames",
                    self.shape.frames
                ))
            })?;
        let out_shape = self.shape.with_frames(frames);
        let plane = self.shape.plane();
        let mut data = Vec::with_capacity(out_shape.len());
        for slab in 0..self.shape.slabs() {
            let base = slab * self.shape.slab();
            data.extend_from_slice(&self.data[base + start * plane..base + end * plane]);
        }
        Tensor::from_vec(out_shape, data)
    }

    /// Overwrite the frame window starting at `start` with `src`'s frames.
    pub fn write_frame_window(&mut self, start: usize, src: &Self) -> Result<()> {
        let src_shape = self.shape.with_frames(src.shape.frames);
        if src.shape != src_shape {
            return Err(Error::InvalidShape(format!(
                "window shape {} incompatible with target {}",
                src.shape, self.shape
            )));
        }
        if start + src.shape.frames > self.shape.frames {
            return Err(Error::IndexOutOfRange(format!(
                "frame window [{start}, {}) exceeds {} frames",
                start + src.shape.frames,
                self.shape.frames
            )));
        }
        let plane = self.shape.plane();
        let src_slab = src.shape.slab();
        let dst_slab = self.shape.slab();
        for slab in 0..self.shape.slabs() {
            let src_base = slab * src_slab;
            let dst_base = slab * dst_slab + start * plane;
            self.data[dst_base..dst_base + src_slab]
                .copy_from_slice(&src.data[src_base..src_base + src_slab]);
        }
        Ok(())
    }

    /// One frame of every slab as a contiguous buffer (slab-major).
    pub fn frame(&self, f: usize) -> Result<Vec<T>> {
        if f >= self.shape.frames {
            return Err(Error::IndexOutOfRange(format!(
                "frame {f} out of {}",
                self.shape.frames
            )));
        }
        let plane = self.shape.plane();
        let mut out = Vec::with_capacity(self.shape.slabs() * plane);
        for slab in 0..self.shape.slabs() {
            let base = slab * self.shape.slab() + f * plane;
            out.extend_from_slice(&self.data[base..base + plane]);
        }
        Ok(out)
    }

    /// Convert every element to another scalar type.
    pub fn cast<U: Real>(&self) -> Tensor<U> {
        Tensor {
            shape: self.shape,
            data: self
                .data
                .iter()
                .map(|v| U::from_f64_lossy(v.to_f64_lossless()))
                .collect(),
        }
    }

    /// Mean and population variance accumulated in f64.
    pub fn mean_var(&self) -> (f64, f64) {
        let n = self.data.len() as f64;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for v in &self.data {
            let x = v.to_f64_lossless();
            sum += x;
            sum_sq += x * x;
        }
        let mean = sum / n;
        (mean, sum_sq / n - mean * mean)
    }
}

/// Standard normal tensor drawn from `rng`.
///
/// Deterministic for a fixed `(seed, stream label)`: the same call yields the
/// same bits on every platform.
pub fn randn<T: Real>(shape: Shape5, rng: &mut SeededRng) -> Result<Tensor<T>> {
    let len = shape.checked_len()?;
    let mut data = vec![T::zero(); len];
    rng.fill_standard_normal(&mut data);
    Tensor::from_vec(shape, data)
}

/// Dense complex tensor sharing the five-axis layout, holding spectra.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTensor<T> {
    shape: Shape5,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexTensor<T> {
    pub fn from_vec(shape: Shape5, data: Vec<Complex<T>>) -> Result<Self> {
        let len = shape.checked_len()?;
        if data.len() != len {
            return Err(Error::InvalidShape(format!(
                "data length {} does not match shape {} ({} elements)",
                data.len(),
                shape,
                len
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: Shape5) -> Result<Self> {
        let len = shape.checked_len()?;
        Ok(Self {
            shape,
            data: vec![Complex::new(T::zero(), T::zero()); len],
        })
    }

    pub fn from_real(real: &Tensor<T>) -> Self {
        Self {
            shape: real.shape(),
            data: real
                .data()
                .iter()
                .map(|&v| Complex::new(v, T::zero()))
                .collect(),
        }
    }

    pub fn shape(&self) -> Shape5 {
        self.shape
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn max_abs_real(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, v| acc.max(v.re.abs()))
    }

    pub fn max_abs_imag(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, v| acc.max(v.im.abs()))
    }

    /// Bin-wise sum; shapes must match.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::InvalidShape(format!(
                "shape {} differs from {}",
                self.shape, other.shape
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            shape: self.shape,
            data,
        })
    }

    /// Check `X[k] == conj(X[N-k])` on all three transformed axes, the
    /// signature of the spectrum of a real tensor.
    pub fn is_hermitian_symmetric(&self, tol: T) -> bool {
        let s = self.shape;
        for slab in 0..s.slabs() {
            let base = slab * s.slab();
            for f in 0..s.frames {
                let fm = (s.frames - f) % s.frames;
                for h in 0..s.height {
                    let hm = (s.height - h) % s.height;
                    for w in 0..s.width {
                        let wm = (s.width - w) % s.width;
                        let a = self.data[base + (f * s.height + h) * s.width + w];
                        let b = self.data[base + (fm * s.height + hm) * s.width + wm];
                        if (a.re - b.re).abs() > tol || (a.im + b.im).abs() > tol {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}
