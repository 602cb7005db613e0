//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use heatvqe_core::linalg::DenseOperator;
use heatvqe_core::seeds;
use heatvqe_core::Complex64;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    seeds::rng(seeds::derive(seed, "integration-tests", 0))
}

pub fn to_na(op: &DenseOperator<f64>) -> DMatrix<Complex64> {
    let d = op.dim();
    DMatrix::from_fn(d, d, |i, j| op.get(i, j))
}

pub fn vec_na(v: &[Complex64]) -> DVector<Complex64> {
    DVector::from_column_slice(v)
}

/// Unitary DFT matrix `ω^{jk}/√N` with `ω = e^{2πi/N}`, built entry by entry.
pub fn dft(n_qubits: usize) -> DMatrix<Complex64> {
    let size = 1usize << n_qubits;
    let s = 1.0 / (size as f64).sqrt();
    DMatrix::from_fn(size, size, |j, k| {
        let phase = 2.0 * std::f64::consts::PI * ((j * k) % size) as f64 / size as f64;
        Complex64::from_polar(s, phase)
    })
}

/// DFT applied independently along `axes` registers of `n` qubits, axis 0 on the low bits.
pub fn dft_axes(n: usize, axes: usize) -> DMatrix<Complex64> {
    let f = dft(n);
    let mut out = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    for _ in 0..axes {
        out = f.kronecker(&out);
    }
    out
}

/// Circulant stencil with diagonal `−2−c`, built directly.
pub fn stencil(n: usize, c: f64) -> DMatrix<f64> {
    let size = 1usize << n;
    DMatrix::from_fn(size, size, |i, j| {
        if i == j {
            -2.0 - c
        } else if (i + 1) % size == j || (j + 1) % size == i {
            1.0
        } else {
            0.0
        }
    })
}

pub fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    let na: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    let ov: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    ov.norm_sqr() / (na * nb)
}

pub fn random_unit(len: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    seeds::random_complex_b::<f64, _>(len, rng)
}

pub fn dense_solve(m: &DMatrix<Complex64>, b: &[Complex64]) -> Vec<Complex64> {
    m.clone().lu().solve(&vec_na(b)).expect("nonsingular").iter().copied().collect()
}

/// Dense Pauli word from masks as a Kronecker product, highest qubit leftmost.
pub fn pauli_matrix(n: usize, x: u64, z: u64) -> DMatrix<Complex64> {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut out = DMatrix::from_element(1, 1, l);
    for q in (0..n).rev() {
        let p = match ((x >> q) & 1, (z >> q) & 1) {
            (0, 0) => [l, o, o, l],
            (1, 0) => [o, l, l, o],
            (0, 1) => [l, o, o, -l],
            _ => [o, -i, i, o],
        };
        out = out.kronecker(&DMatrix::from_row_slice(2, 2, &p));
    }
    out
}

/// `tr(M Π)/2ⁿ` for the word with masks `(x, z)`.
pub fn trace_weight(m: &DMatrix<Complex64>, n: usize, x: u64, z: u64) -> Complex64 {
    (m * pauli_matrix(n, x, z)).trace() / (1u64 << n) as f64
}

/// `tr(diag(d) Z_p)/2ⁿ` summed term by term.
pub fn diagonal_trace_weight(d: &[f64], p: u64) -> f64 {
    let s: f64 = d.iter().enumerate().map(|(k, v)| if (k as u64 & p).count_ones() % 2 == 0 { *v } else { -*v }).sum();
    s / d.len() as f64
}
