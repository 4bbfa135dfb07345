//! 3D Fourier transforms over the (frame, height, width) axes of every
//! `(batch, channel)` slab.
//!
//! Convention: the forward transform is unnormalized; the inverse carries the
//! full `1 / (frames * height * width)` factor, so `ifft3(fft3(x)) == x` up to
//! floating-point error.

use num_complex::Complex;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tensor::{ComplexTensor, Tensor};

/// Relative imaginary residue tolerated by [`ifft3`] before declaring the
/// input non-Hermitian.
pub const IMAG_RESIDUE_TOLERANCE: f64 = 1e-4;

fn transform_slabs<T: Real>(spectrum: &mut ComplexTensor<T>, direction: FftDirection) {
    let shape = spectrum.shape();
    let (frames, height, width) = (shape.frames, shape.height, shape.width);
    let slab_len = shape.slab();
    let mut planner = FftPlanner::<T>::new();
    let fft_w = planner.plan_fft(width, direction);
    let fft_h = planner.plan_fft(height, direction);
    let fft_f = planner.plan_fft(frames, direction);
    let mut lane: Vec<Complex<T>> = Vec::new();

    for slab in 0..shape.slabs() {
        let data = &mut spectrum.data_mut()[slab * slab_len..(slab + 1) * slab_len];

        // Width lanes are contiguous.
        for row in data.chunks_exact_mut(width) {
            fft_w.process(row);
        }

        // Height lanes: stride = width.
        lane.resize(height, Complex::new(T::zero(), T::zero()));
        for f in 0..frames {
            for w in 0..width {
                let base = f * height * width + w;
                for h in 0..height {
                    lane[h] = data[base + h * width];
                }
                fft_h.process(&mut lane);
                for h in 0..height {
                    data[base + h * width] = lane[h];
                }
            }
        }

        // Frame lanes: stride = height * width.
        lane.resize(frames, Complex::new(T::zero(), T::zero()));
        let plane = height * width;
        for p in 0..plane {
            for f in 0..frames {
                lane[f] = data[p + f * plane];
            }
            fft_f.process(&mut lane);
            for f in 0..frames {
                data[p + f * plane] = lane[f];
            }
        }
    }
}

/// Unnormalized forward 3D DFT of every `(batch, channel)` slab.
pub fn fft3<T: Real>(x: &Tensor<T>) -> ComplexTensor<T> {
    let mut spectrum = ComplexTensor::from_real(x);
    transform_slabs(&mut spectrum, FftDirection::Forward);
    spectrum
}

fn inverse_normalized<T: Real>(spectrum: &ComplexTensor<T>) -> ComplexTensor<T> {
    let mut out = spectrum.clone();
    transform_slabs(&mut out, FftDirection::Inverse);
    let norm = T::one()
        / T::from_usize(out.shape().frames * out.shape().height * out.shape().width)
            .expect("transform size fits the scalar type");
    for v in out.data_mut() {
        *v *= norm;
    }
    out
}

/// Normalized inverse 3D DFT.
///
/// The input must be (numerically) Hermitian-symmetric; the imaginary residue
/// is checked against [`IMAG_RESIDUE_TOLERANCE`] relative to the real part and
/// then discarded. A violation signals a caller bug, not a numerics problem.
pub fn ifft3<T: Real>(spectrum: &ComplexTensor<T>) -> Result<Tensor<T>> {
    let out = inverse_normalized(spectrum);
    let max_real = out.max_abs_real().to_f64_lossless();
    let max_imag = out.max_abs_imag().to_f64_lossless();
    if max_imag > IMAG_RESIDUE_TOLERANCE * max_real {
        return Err(Error::NonRealResult {
            max_imag,
            max_real,
            threshold: IMAG_RESIDUE_TOLERANCE,
        });
    }
    real_part(&out)
}

/// Inverse transform that drops the imaginary part without asserting
/// Hermitian symmetry. Only the literal-frequency-ramp blend needs this: its
/// frequency-indexed weights break symmetry by construction.
pub(crate) fn ifft3_lossy<T: Real>(spectrum: &ComplexTensor<T>) -> Result<Tensor<T>> {
    real_part(&inverse_normalized(spectrum))
}

fn real_part<T: Real>(spectrum: &ComplexTensor<T>) -> Result<Tensor<T>> {
    Tensor::from_vec(
        spectrum.shape(),
        spectrum.data().iter().map(|v| v.re).collect(),
    )
}

/// Sum of squared magnitudes of a spectrum, accumulated in f64.
pub fn spectrum_energy<T: Real>(spectrum: &ComplexTensor<T>) -> f64 {
    spectrum
        .data()
        .iter()
        .map(|v| {
            let re = v.re.to_f64_lossless();
            let im = v.im.to_f64_lossless();
            re * re + im * im
        })
        .sum()
}

/// Sum of squared values of a real tensor, accumulated in f64.
pub fn signal_energy<T: Real>(x: &Tensor<T>) -> f64 {
    x.data()
        .iter()
        .map(|v| {
            let r = v.to_f64_lossless();
            r * r
        })
        .sum()
}
