//! Unitary discrete Fourier transform on amplitude vectors.
//!
//! The forward transform is `F[j][k] = ω^{jk}/√N` with `ω = exp(2πi/N)`, the
//! same matrix the `qft_circuit` builds gate by gate.

use crate::scalar::{cis, Real, C};

fn fft_in_place<T: Real>(data: &mut [C<T>], sign: T) {
    let n = data.len();
    assert!(n.is_power_of_two(), "FFT length must be a power of two");
    if n <= 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let ang = sign * T::TAU() / T::of(len as f64);
        let half = len / 2;
        let twiddles: Vec<C<T>> = (0..half).map(|k| cis(ang * T::of(k as f64))).collect();
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let u = data[start + k];
                let v = data[start + k + half] * twiddles[k];
                data[start + k] = u + v;
                data[start + k + half] = u - v;
            }
        }
        len <<= 1;
    }
    let s = T::one() / T::of(n as f64).sqrt();
    for z in data.iter_mut() {
        *z = *z * s;
    }
}

/// Applies the QFT in place.
pub fn qft_in_place<T: Real>(data: &mut [C<T>]) {
    fft_in_place(data, T::one());
}

/// Applies QFT† in place.
pub fn iqft_in_place<T: Real>(data: &mut [C<T>]) {
    fft_in_place(data, -T::one());
}

pub fn qft<T: Real>(data: &[C<T>]) -> Vec<C<T>> {
    let mut v = data.to_vec();
    qft_in_place(&mut v);
    v
}

pub fn iqft<T: Real>(data: &[C<T>]) -> Vec<C<T>> {
    let mut v = data.to_vec();
    iqft_in_place(&mut v);
    v
}

/// Applies the transform independently along each of `axes` registers of
/// `n` qubits; axis `r` occupies index bits `r·n .. (r+1)·n`.
pub fn qft_axes_in_place<T: Real>(data: &mut [C<T>], n: usize, axes: usize, inverse: bool) {
    let side = 1usize << n;
    assert_eq!(data.len(), 1usize << (n * axes), "vector length must be 2^(n·axes)");
    let sign = if inverse { -T::one() } else { T::one() };
    let mut line = vec![C::new(T::zero(), T::zero()); side];
    for r in 0..axes {
        let stride = 1usize << (n * r);
        for base in 0..data.len() {
            if (base / stride) % side != 0 {
                continue;
            }
            for (k, slot) in line.iter_mut().enumerate() {
                *slot = data[base + k * stride];
            }
            fft_in_place(&mut line, sign);
            for (k, slot) in line.iter().enumerate() {
                data[base + k * stride] = *slot;
            }
        }
    }
}

/// Applies the diagonal operator `QFT†·diag(d)·QFT` to `v`.
pub fn apply_fourier_diagonal<T: Real>(v: &[C<T>], diag: &[T]) -> Vec<C<T>> {
    let mut w = qft(v);
    for (z, &d) in w.iter_mut().zip(diag) {
        *z = *z * d;
    }
    iqft_in_place(&mut w);
    w
}
