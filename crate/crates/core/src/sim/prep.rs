//! Amplitude loading: a tree of multi-controlled `Ry` rotations followed by a phase diagonal.

use crate::error::{Error, Result};
use crate::scalar::{Real, C};
use crate::sim::gate::Gate;

/// Gates that map `|0…0⟩` on `qubits` (low bit first) to `Σ_k v_k/‖v‖ |k⟩`.
/// `v` is zero-padded to `2^{qubits.len()}`.
pub fn amplitude_loading<T: Real>(v: &[C<T>], qubits: &[usize]) -> Result<Vec<Gate<T>>> {
    let a = qubits.len();
    let dim = 1usize << a;
    if v.len() > dim {
        return Err(Error::LengthMismatch { expected: dim, got: v.len() });
    }
    let norm = crate::linalg::norm(v);
    if norm == T::zero() {
        return Err(Error::ZeroVector);
    }
    let mut amps = vec![C::new(T::zero(), T::zero()); dim];
    for (slot, z) in amps.iter_mut().zip(v) {
        *slot = z / norm;
    }
    let weight = |lo: usize, hi: usize| amps[lo..hi].iter().map(|z| z.norm_sqr()).sum::<T>();
    let mut gates = Vec::new();
    // Level `l` fixes qubit `a-1-l` given the `l` higher bits already set.
    for level in 0..a {
        let target = qubits[a - 1 - level];
        let block = dim >> level;
        for prefix in 0..1usize << level {
            let lo = prefix * block;
            let mid = lo + block / 2;
            let (w0, w1) = (weight(lo, mid), weight(mid, lo + block));
            if w0 + w1 == T::zero() || w1 == T::zero() {
                continue;
            }
            let theta = T::of(2.0) * w1.sqrt().atan2(w0.sqrt());
            let rot = Gate::Ry(target, theta);
            if level == 0 {
                gates.push(rot);
            } else {
                let controls = (0..level)
                    .map(|j| {
                        let q = qubits[a - 1 - j];
                        let bit = (prefix >> (level - 1 - j)) & 1 == 1;
                        (q, bit)
                    })
                    .collect();
                gates.push(Gate::Controlled { controls, gate: Box::new(rot) });
            }
        }
    }
    let phases: Vec<C<T>> = amps
        .iter()
        .map(|z| if z.norm() == T::zero() { C::new(T::one(), T::zero()) } else { z / z.norm() })
        .collect();
    if phases.iter().any(|p| (p.re - T::one()).abs() > T::epsilon() || p.im.abs() > T::epsilon()) {
        gates.push(Gate::Diagonal { targets: qubits.to_vec(), phases });
    }
    Ok(gates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::circuit::Circuit;
    use crate::sim::state::QuantumState;
    use num_complex::Complex;

    #[test]
    fn loads_arbitrary_complex_vector() {
        let v: Vec<C<f64>> = (0..7).map(|i| Complex::new((i as f64).sin() + 0.2, (i as f64 * 1.3).cos())).collect();
        let gates = amplitude_loading(&v, &[0, 1, 2]).unwrap();
        let c = Circuit::from_gates(3, gates).unwrap();
        let out = c.run(&QuantumState::zero(3)).unwrap();
        let norm = crate::linalg::norm(&v);
        for (k, z) in out.amplitudes().iter().enumerate() {
            let want = if k < 7 { v[k] / norm } else { Complex::new(0.0, 0.0) };
            assert!((z - want).norm() < 1e-12, "k={k}");
        }
    }
}
