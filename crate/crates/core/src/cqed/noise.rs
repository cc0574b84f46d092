//! Seeded Poisson count noise.
//!
//! Each bin draws from its own ChaCha8 stream (`seed`, stream = bin index),
//! so the result does not depend on evaluation order and bins can be
//! sampled in parallel.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;

/// Identifier recorded in run manifests for the noise algorithm.
pub const NOISE_ALGORITHM: &str = "chacha8-stream-per-bin/poisson";

/// Replaces every expected count by a Poisson draw with that mean.
pub fn poisson_counts(expected: &[f64], seed: u64) -> Vec<f64> {
    expected
        .par_iter()
        .enumerate()
        .map(|(i, &mean)| {
            if mean <= 0.0 {
                return 0.0;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            Poisson::new(mean)
                .map(|p| p.sample(&mut rng))
                .unwrap_or(mean)
        })
        .collect()
}

/// Zero-mean Gaussian offsets with standard deviation `sigma`, one stream
/// per index as for [`poisson_counts`].
pub fn gaussian_offsets(n: usize, sigma: f64, seed: u64) -> Vec<f64> {
    if !(sigma > 0.0) {
        return vec![0.0; n];
    }
    let normal = Normal::new(0.0, sigma).expect("finite positive sigma");
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            normal.sample(&mut rng)
        })
        .collect()
}

/// Independent `u64` sub-seed for a named purpose, so different noise
/// sources driven by one run seed do not share streams.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    // splitmix64 finaliser
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
