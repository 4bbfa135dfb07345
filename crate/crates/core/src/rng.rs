//! Deterministic, platform-stable random number generation.
//!
//! A [`SeededRng`] is a ChaCha8 stream addressed by `(seed, stream label)`.
//! The label is hashed into the ChaCha stream id, so streams derived from one
//! seed ("init", "shuffle", "fresh", ...) are independent and reordering one
//! stream's draws never perturbs another. Normal samples use Box-Muller on
//! top of `libm`, keeping sequences bit-identical across platforms.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hash::fnv1a64;
use crate::scalar::Real;

/// Seeded random stream addressed by `(seed, stream label)`.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    label: String,
    rng: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl SeededRng {
    /// Open the stream `label` of the generator family `seed`.
    pub fn new(seed: u64, label: &str) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(fnv1a64(label.as_bytes()));
        Self {
            seed,
            label: label.to_owned(),
            rng,
            spare_normal: None,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Uniform draw in `[0, 1)` with 53 random mantissa bits.
    fn uniform_unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal draw, Box-Muller over `libm` transcendentals.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // 1 - u in (0, 1] keeps the log argument away from zero.
        let u1 = 1.0 - self.uniform_unit();
        let u2 = self.uniform_unit();
        let radius = (-2.0 * libm::log(u1)).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(radius * libm::sin(theta));
        radius * libm::cos(theta)
    }

    /// Fill a slice with i.i.d. standard normal samples.
    pub fn fill_standard_normal<T: Real>(&mut self, out: &mut [T]) {
        for slot in out.iter_mut() {
            *slot = T::from_f64_lossy(self.standard_normal());
        }
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}
