//! Readout randomization: each measured bit is replaced by a fair coin with probability `p`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which measured qubits the noise touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseScope {
    /// Every measured qubit.
    #[default]
    AllMeasured,
    /// Only the Hadamard-test ancilla.
    AncillaOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutNoise {
    p: f64,
    pub scope: NoiseScope,
}

impl ReadoutNoise {
    pub fn new(p: f64, scope: NoiseScope) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        Ok(Self { p, scope })
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Exact effect on a probability vector for the bits in `mask`.
    pub fn mix_probabilities<T: Real>(&self, probs: &[T], mask: usize) -> Vec<T> {
        let mut out = probs.to_vec();
        if self.p == 0.0 {
            return out;
        }
        let p = T::of(self.p);
        let half = T::of(0.5);
        let mut bit = 1usize;
        while bit < probs.len() {
            if mask & bit != 0 {
                let prev = out.clone();
                for (i, o) in out.iter_mut().enumerate() {
                    *o = (T::one() - p) * prev[i] + p * half * (prev[i] + prev[i ^ bit]);
                }
            }
            bit <<= 1;
        }
        out
    }

    /// Randomizes the bits of one outcome that fall in `mask`.
    pub fn corrupt<R: Rng>(&self, outcome: usize, mask: usize, rng: &mut R) -> usize {
        if self.p == 0.0 {
            return outcome;
        }
        let mut out = outcome;
        let mut m = mask;
        while m != 0 {
            let bit = m & m.wrapping_neg();
            m ^= bit;
            if rng.random::<f64>() < self.p {
                if rng.random::<bool>() {
                    out |= bit;
                } else {
                    out &= !bit;
                }
            }
        }
        out
    }
}

/// Noisy expectation of a diagonal observable: readout randomization on `mask`
/// applied before averaging `values`.
pub fn apply_depolarizing<T: Real>(probs: &[T], values: &[T], mask: usize, p: f64) -> Result<T> {
    let noise = ReadoutNoise::new(p, NoiseScope::AllMeasured)?;
    if probs.len() != values.len() {
        return Err(Error::LengthMismatch { expected: probs.len(), got: values.len() });
    }
    let mixed = noise.mix_probabilities(probs, mask);
    Ok(mixed.iter().zip(values).map(|(&a, &b)| a * b).sum())
}
