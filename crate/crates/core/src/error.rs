//! Crate-wide error type.

/// Errors surfaced by the pipeline library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A tensor shape is empty, overflows, or disagrees with another.
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    /// A configuration or operation parameter is out of its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An inverse transform produced a significant imaginary residue,
    /// meaning the caller handed it a non-Hermitian spectrum.
    #[error(
        "inverse transform is not real: max imaginary magnitude {max_imag:e} \
         exceeds {threshold:e} relative to max real magnitude {max_real:e}"
    )]
    NonRealResult {
        max_imag: f64,
        max_real: f64,
        threshold: f64,
    },

    /// A frame or in-tile index outside its valid range.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// Fusion was asked to merge an incomplete or duplicated prediction set.
    #[error("incomplete predictions: {0}")]
    IncompletePredictions(String),

    /// A metric needs more frames than the video has.
    #[error("insufficient frames: {0}")]
    InsufficientFrames(String),

    /// The low-frequency similarity diagnostic needs at least two
    /// non-overlapping tile windows.
    #[error("insufficient windows: {0}")]
    InsufficientWindows(String),

    /// Feature vectors of mismatched dimension were compared.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A denoiser failed while evaluating one tile.
    #[error("denoiser failed on tile {tile} at sigma {sigma}: {source}")]
    Denoiser {
        tile: usize,
        sigma: f64,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
