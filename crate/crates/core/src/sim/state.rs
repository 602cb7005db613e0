use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{cr, Real, C};

/// Pure state of `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState<T> {
    n: usize,
    amps: Vec<C<T>>,
}

impl<T: Real> QuantumState<T> {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, k: usize) -> Self {
        let mut amps = vec![cr(T::zero()); 1 << n];
        amps[k] = cr(T::one());
        Self { n, amps }
    }

    /// Wraps amplitudes that must already be unit norm (to 1e-10).
    pub fn from_amplitudes(amps: Vec<C<T>>) -> Result<Self> {
        let n = qubits_for(amps.len())?;
        let norm = linalg::norm(&amps);
        let tol = T::of(1e-10).max(T::prune());
        if (norm - T::one()).abs() > tol {
            return Err(Error::NotNormalized(norm.as_f64()));
        }
        Ok(Self { n, amps })
    }

    /// Normalizes the given amplitudes.
    pub fn normalized(amps: &[C<T>]) -> Result<Self> {
        let n = qubits_for(amps.len())?;
        Ok(Self { n, amps: linalg::normalized(amps)? })
    }

    /// Unchecked scratch state; the norm is whatever the caller provides.
    pub fn scratch(amps: Vec<C<T>>) -> Result<Self> {
        let n = qubits_for(amps.len())?;
        Ok(Self { n, amps })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    #[inline]
    pub fn amplitudes_mut(&mut self) -> &mut [C<T>] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C<T>> {
        self.amps
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn norm(&self) -> T {
        linalg::norm(&self.amps)
    }

    pub fn inner(&self, other: &Self) -> C<T> {
        linalg::inner(&self.amps, &other.amps)
    }

    /// `self ⊗ |0…0⟩` on `extra` new high qubits.
    pub fn extend_zero(&self, extra: usize) -> Self {
        let mut amps = vec![cr(T::zero()); 1 << (self.n + extra)];
        amps[..self.amps.len()].copy_from_slice(&self.amps);
        Self { n: self.n + extra, amps }
    }
}

fn qubits_for(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::LengthMismatch { expected: len.next_power_of_two().max(1), got: len });
    }
    Ok(len.trailing_zeros() as usize)
}
