//! BPSK mapping and the real AWGN channel `y = √ρ·x + z`.
//!
//! Bit 0 maps to `+1` and bit 1 to `−1`; the hard decision of `y` is 1 iff `y < 0`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::fb_bounds::SnrLinear;
use crate::rng::trial_rng;
use crate::scalar::Real;

pub fn modulate<T: Real>(bits: &[u8]) -> Vec<T> {
    bits.iter()
        .map(|&b| if b & 1 == 0 { T::one() } else { -T::one() })
        .collect()
}

pub fn hard_decision<T: Real>(y: &[T]) -> Vec<u8> {
    y.iter().map(|&v| (v < T::zero()) as u8).collect()
}

/// Sends `bits` through the channel, drawing noise from `rng`.
///
/// Noise samples are drawn in `f64` and then cast, so `f32` and `f64` runs
/// see the same realization.
pub fn transmit<T: Real, R: Rng + ?Sized>(bits: &[u8], rho: SnrLinear<T>, rng: &mut R) -> Vec<T> {
    let amp = rho.value().sqrt();
    bits.iter()
        .map(|&b| {
            let x = if b & 1 == 0 { T::one() } else { -T::one() };
            let z: f64 = rng.sample(StandardNormal);
            amp * x + T::lit(z)
        })
        .collect()
}

/// [`transmit`] on the stream `(seed, 0)`.
pub fn transmit_seeded<T: Real>(bits: &[u8], rho: SnrLinear<T>, seed: u64) -> Vec<T> {
    transmit(bits, rho, &mut trial_rng(seed, 0))
}
