//! Seeded, stream-separated randomness. Every stochastic routine in the
//! crate draws from [`rng_for`] with a caller-visible seed and a fixed
//! per-task stream, so identical inputs always reproduce identical output.

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Element, StarAlgebra};
use crate::{Result, C64};

/// A reproducible generator: `seed` is user-facing, `stream` separates
/// independent uses so adding a draw in one task never shifts another.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform real in [-scale, scale].
pub fn uniform(rng: &mut ChaCha8Rng, scale: f64) -> f64 {
    rng.random_range(-scale..=scale)
}

/// Element with independent uniform complex coefficients.
pub fn random_element(alg: &StarAlgebra, rng: &mut ChaCha8Rng, scale: f64) -> Element {
    let coeffs = DVector::from_fn(alg.dim(), |_, _| {
        C64::new(uniform(rng, scale), uniform(rng, scale))
    });
    Element::from_coeffs(coeffs)
}

/// Hermitian element with uniform real chart coordinates.
pub fn random_hermitian(alg: &StarAlgebra, rng: &mut ChaCha8Rng, scale: f64) -> Result<Element> {
    let v = DVector::from_fn(alg.dim(), |_, _| uniform(rng, scale));
    alg.element_from_real_coords(&v)
}

/// Real coefficient vector with entries uniform in [lo, hi].
pub fn uniform_vector(rng: &mut ChaCha8Rng, len: usize, lo: f64, hi: f64) -> DVector<f64> {
    DVector::from_fn(len, |_, _| rng.random_range(lo..=hi))
}
