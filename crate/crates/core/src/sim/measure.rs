use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sim::state::QuantumState;

/// `Σ_k |ψ_k|² λ_k`.
pub fn expectation_diagonal<T: Real>(state: &QuantumState<T>, eigenvalues: &[T]) -> Result<T> {
    let amps = state.amplitudes();
    if amps.len() != eigenvalues.len() {
        return Err(Error::LengthMismatch { expected: amps.len(), got: eigenvalues.len() });
    }
    Ok(amps.iter().zip(eigenvalues).map(|(z, &l)| z.norm_sqr() * l).sum())
}

/// Cumulative distribution used for inverse-CDF draws.
pub(crate) struct Sampler {
    cdf: Vec<f64>,
}

impl Sampler {
    pub(crate) fn new<T: Real>(probs: &[T]) -> Self {
        let mut acc = 0.0;
        let cdf = probs
            .iter()
            .map(|p| {
                acc += p.as_f64().max(0.0);
                acc
            })
            .collect();
        Self { cdf }
    }

    pub(crate) fn draw<R: Rng>(&self, rng: &mut R) -> usize {
        let total = *self.cdf.last().expect("nonempty distribution");
        let u = rng.random::<f64>() * total;
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }
}

/// Multinomial outcome counts over the computational basis.
pub fn sample<T: Real>(state: &QuantumState<T>, shots: u64, seed: u64) -> Result<Vec<u64>> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let sampler = Sampler::new(&state.probabilities());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; state.amplitudes().len()];
    for _ in 0..shots {
        counts[sampler.draw(&mut rng)] += 1;
    }
    Ok(counts)
}

/// Sample mean and standard error of `values[outcome]` over `shots` draws.
pub fn sampled_expectation<T: Real>(
    state: &QuantumState<T>,
    values: &[T],
    shots: u64,
    seed: u64,
) -> Result<(T, T)> {
    if values.len() != state.amplitudes().len() {
        return Err(Error::LengthMismatch { expected: state.amplitudes().len(), got: values.len() });
    }
    let counts = sample(state, shots, seed)?;
    Ok(mean_and_error(&counts, |k| values[k].as_f64()))
}

/// Mean and standard error of a per-outcome value from outcome counts.
pub(crate) fn mean_and_error<T: Real>(counts: &[u64], value: impl Fn(usize) -> f64) -> (T, T) {
    let m: u64 = counts.iter().sum();
    let mf = m as f64;
    let (mut s1, mut s2) = (0.0, 0.0);
    for (k, &c) in counts.iter().enumerate() {
        if c > 0 {
            let v = value(k);
            s1 += c as f64 * v;
            s2 += c as f64 * v * v;
        }
    }
    let mean = s1 / mf;
    let var = if m > 1 { ((s2 - mf * mean * mean) / (mf - 1.0)).max(0.0) } else { 0.0 };
    (T::of(mean), T::of((var / mf).sqrt()))
}
