//! Seed derivation and the random inputs used by experiments.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::scalar::{Real, C};

/// SplitMix64 finalizer of `seed ⊕ salt`-style pairs; stable across platforms.
pub fn mix(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x6A09_E667_F3BC_C909);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the `index`-th item of a named stream.
pub fn derive(seed: u64, stream: &str, index: u64) -> u64 {
    let tag = stream.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
    mix(mix(seed, tag), index)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unit vector with i.i.d. standard complex normal amplitudes.
pub fn random_complex_b<T: Real, R: Rng>(len: usize, rng: &mut R) -> Vec<C<T>> {
    loop {
        let v: Vec<C<T>> = (0..len)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex::new(T::of(re), T::of(im))
            })
            .collect();
        if let Ok(u) = crate::linalg::normalized(&v) {
            return u;
        }
    }
}

/// Unit vector with i.i.d. standard normal real amplitudes.
pub fn random_real_b<T: Real, R: Rng>(len: usize, rng: &mut R) -> Vec<C<T>> {
    loop {
        let v: Vec<C<T>> = (0..len)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                Complex::new(T::of(re), T::zero())
            })
            .collect();
        if let Ok(u) = crate::linalg::normalized(&v) {
            return u;
        }
    }
}

/// Real unit vector orthogonal to the all-ones vector.
pub fn random_zero_mean_b<T: Real, R: Rng>(len: usize, rng: &mut R) -> Vec<C<T>> {
    loop {
        let mut v: Vec<f64> = (0..len).map(|_| StandardNormal.sample(rng)).collect();
        let mean = v.iter().sum::<f64>() / len as f64;
        v.iter_mut().for_each(|x| *x -= mean);
        let w: Vec<C<T>> = v.into_iter().map(|x| Complex::new(T::of(x), T::zero())).collect();
        if let Ok(u) = crate::linalg::normalized(&w) {
            return u;
        }
    }
}

/// `count` grid parameters drawn uniformly from `[lo, hi]`.
pub fn random_cs<R: Rng>(count: usize, lo: f64, hi: f64, rng: &mut R) -> Vec<f64> {
    (0..count).map(|_| rng.random_range(lo..=hi)).collect()
}
