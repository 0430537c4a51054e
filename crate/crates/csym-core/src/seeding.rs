//! Deterministic seed derivation and seeded Gaussian sampling.
//!
//! Every stochastic component (Haar sampling, restart loops, Monte Carlo
//! trials, zero-block padding) derives its own stream from a base seed and
//! a stream index with [`derive_seed`], so parallel and serial execution
//! orders cannot change any result.

use nalgebra::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::{CMatrix, C64};

/// splitmix64-style mixing of a base seed and a stream index.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic generator for the given seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian scalar (variance 1: re, im each N(0, 1/2)).
pub fn complex_gaussian<R: Rng>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(re, im) / 2.0f64.sqrt()
}

/// Matrix with independent standard complex Gaussian entries.
pub fn complex_gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}
