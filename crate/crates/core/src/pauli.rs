//! Pauli words in bitmask form and the decompositions built on them.
//!
//! A word on `n` qubits is a pair of masks `(x, z)`; qubit `q` carries
//! `I` (0,0), `X` (1,0), `Z` (0,1) or `Y` (1,1). Acting on a basis state,
//! `P|k⟩ = i^{#Y} (−1)^{|k ∧ z|} |k ⊕ x⟩`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::heat;
use crate::linalg::DenseOperator;
use crate::scalar::{cr, Real, C};
use crate::sim::QuantumState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliWord {
    n: usize,
    x: u64,
    z: u64,
}

impl PauliWord {
    pub fn identity(n: usize) -> Self {
        Self { n, x: 0, z: 0 }
    }

    pub fn new(n: usize, x: u64, z: u64) -> Result<Self> {
        if n > 64 {
            return Err(Error::Config(format!("{n} qubits exceed the 64-bit word width")));
        }
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        if (x | z) & !full != 0 {
            return Err(Error::QubitOutOfRange { qubit: 63 - (x | z).leading_zeros() as usize, n });
        }
        Ok(Self { n, x, z })
    }

    /// Product of `Z` on every qubit set in `mask`.
    pub fn z_word(n: usize, mask: u64) -> Self {
        Self { n, x: 0, z: mask }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn x_mask(&self) -> u64 {
        self.x
    }

    #[inline]
    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Amplitude phase and target index of `P|k⟩`.
    #[inline]
    pub fn action<T: Real>(&self, k: usize) -> (C<T>, usize) {
        let sign = if ((k as u64) & self.z).count_ones() % 2 == 1 { -T::one() } else { T::one() };
        let phase = match self.y_count() % 4 {
            0 => cr(sign),
            1 => Complex::new(T::zero(), sign),
            2 => cr(-sign),
            _ => Complex::new(T::zero(), -sign),
        };
        (phase, k ^ self.x as usize)
    }

    pub fn apply<T: Real>(&self, v: &[C<T>]) -> Vec<C<T>> {
        let mut out = vec![cr(T::zero()); v.len()];
        for (k, z) in v.iter().enumerate() {
            let (ph, j) = self.action::<T>(k);
            out[j] = ph * z;
        }
        out
    }

    pub fn to_dense<T: Real>(&self) -> DenseOperator<T> {
        let dim = 1usize << self.n;
        let mut m = DenseOperator::zeros(dim);
        for k in 0..dim {
            let (ph, j) = self.action::<T>(k);
            m.set(j, k, ph);
        }
        m.refresh_hermitian();
        m
    }

    /// Product `self · other` as a phase and a word.
    pub fn mul<T: Real>(&self, other: &Self) -> (C<T>, Self) {
        // Compare the action on |0⟩ of both sides: both are phase · |x⟩ for the same x.
        let (p2, k1) = other.action::<T>(0);
        let (p1, k2) = self.action::<T>(k1);
        let word = Self { n: self.n, x: self.x ^ other.x, z: self.z ^ other.z };
        let (pw, kw) = word.action::<T>(0);
        debug_assert_eq!(k2, kw);
        (p1 * p2 / pw, word)
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in (0..self.n).rev() {
            let c = match ((self.x >> q) & 1, (self.z >> q) & 1) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (0, 1) => 'Z',
                _ => 'Y',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliWord {
    type Err = Error;

    /// Leftmost character is the highest qubit.
    fn from_str(s: &str) -> Result<Self> {
        let n = s.chars().count();
        let (mut x, mut z) = (0u64, 0u64);
        for (pos, ch) in s.chars().enumerate() {
            let q = n - 1 - pos;
            match ch.to_ascii_uppercase() {
                'I' => {}
                'X' => x |= 1 << q,
                'Z' => z |= 1 << q,
                'Y' => {
                    x |= 1 << q;
                    z |= 1 << q
                }
                other => return Err(Error::Parse(format!("invalid Pauli character '{other}'"))),
            }
        }
        PauliWord::new(n, x, z)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauliProduct<T> {
    pub word: PauliWord,
    pub weight: C<T>,
}

/// Sum of weighted Pauli words with no repeated word.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliDecomposition<T> {
    n: usize,
    terms: Vec<PauliProduct<T>>,
}

impl<T: Real> PauliDecomposition<T> {
    /// Merges repeated words; terms keep first-seen order.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = PauliProduct<T>>) -> Result<Self> {
        let mut index: BTreeMap<PauliWord, usize> = BTreeMap::new();
        let mut out: Vec<PauliProduct<T>> = Vec::new();
        for t in terms {
            if t.word.n() != n {
                return Err(Error::LengthMismatch { expected: n, got: t.word.n() });
            }
            match index.get(&t.word) {
                Some(&i) => out[i].weight += t.weight,
                None => {
                    index.insert(t.word, out.len());
                    out.push(t);
                }
            }
        }
        Ok(Self { n, terms: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[PauliProduct<T>] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Drops terms with `|weight| ≤ threshold`.
    pub fn pruned(mut self, threshold: T) -> Self {
        self.terms.retain(|t| t.weight.norm() > threshold);
        self
    }

    pub fn weight_of(&self, word: &PauliWord) -> C<T> {
        self.terms.iter().find(|t| &t.word == word).map_or(cr(T::zero()), |t| t.weight)
    }

    pub fn apply(&self, v: &[C<T>]) -> Vec<C<T>> {
        let mut out = vec![cr(T::zero()); v.len()];
        for t in &self.terms {
            for (k, z) in v.iter().enumerate() {
                let (ph, j) = t.word.action::<T>(k);
                out[j] += t.weight * ph * z;
            }
        }
        out
    }

    pub fn to_dense(&self) -> DenseOperator<T> {
        let dim = 1usize << self.n;
        let mut m = DenseOperator::zeros(dim);
        for t in &self.terms {
            for k in 0..dim {
                let (ph, j) = t.word.action::<T>(k);
                let cur = m.get(j, k);
                m.set(j, k, cur + t.weight * ph);
            }
        }
        m.refresh_hermitian();
        m
    }

    /// For I/Z-only decompositions, the diagonal they represent.
    pub fn diagonal(&self) -> Result<Vec<T>> {
        let dim = 1usize << self.n;
        let mut d = vec![T::zero(); dim];
        for t in &self.terms {
            if !t.word.is_diagonal() {
                return Err(Error::Config(format!("word {} is not diagonal", t.word)));
            }
            for (k, slot) in d.iter_mut().enumerate() {
                let (ph, _) = t.word.action::<T>(k);
                *slot += (t.weight * ph).re;
            }
        }
        Ok(d)
    }

    /// Writes CSV rows `word,weight`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["word", "weight"])?;
        for t in &self.terms {
            let im = t.weight.im.as_f64();
            let weight = if im.abs() <= T::PRUNE {
                format!("{:e}", t.weight.re.as_f64())
            } else {
                format!("{:e}{:+e}i", t.weight.re.as_f64(), im)
            };
            w.write_record([t.word.to_string(), weight])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn qubits_of_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::LengthMismatch { expected: dim.next_power_of_two().max(1), got: dim });
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Brute-force decomposition over all `4ⁿ` words, weight `tr(MΠ)/2ⁿ`.
pub fn decompose_hermitian<T: Real>(m: &DenseOperator<T>) -> Result<PauliDecomposition<T>> {
    let dev = m.hermitian_deviation();
    if dev > T::of(1e-12).max(T::prune()) * m.max_abs().max(T::one()) {
        return Err(Error::NotHermitian(dev.as_f64()));
    }
    let n = qubits_of_dim(m.dim())?;
    let dim = m.dim();
    let inv = T::one() / T::of(dim as f64);
    let mut terms = Vec::new();
    for x in 0..dim as u64 {
        for z in 0..dim as u64 {
            let word = PauliWord { n, x, z };
            let mut tr = cr(T::zero());
            for k in 0..dim {
                let (ph, j) = word.action::<T>(k);
                tr += m.get(k, j) * ph;
            }
            let w = tr * inv;
            if w.norm() > T::prune() {
                // Hermitian input gives real weights; drop round-off.
                terms.push(PauliProduct { word, weight: cr(w.re) });
            }
        }
    }
    PauliDecomposition::from_terms(n, terms)
}

/// In-place fast Walsh–Hadamard transform (unnormalized).
pub fn fwht<T: Real>(v: &mut [T]) {
    let mut h = 1;
    while h < v.len() {
        for start in (0..v.len()).step_by(2 * h) {
            for i in start..start + h {
                let (a, b) = (v[i], v[i + h]);
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// I/Z weights of `diag(d)`: `w_p = 2⁻ⁿ Σ_k d_k (−1)^{|k ∧ p|}`.
pub fn diagonal_weights<T: Real>(d: &[T]) -> Result<Vec<T>> {
    qubits_of_dim(d.len())?;
    let mut w = d.to_vec();
    fwht(&mut w);
    let inv = T::one() / T::of(d.len() as f64);
    w.iter_mut().for_each(|x| *x *= inv);
    Ok(w)
}

fn z_table_to_decomposition<T: Real>(n: usize, table: &[T], prune: bool) -> Result<PauliDecomposition<T>> {
    let terms = table
        .iter()
        .enumerate()
        .filter(|(_, w)| !prune || w.abs() > T::prune())
        .map(|(mask, &w)| PauliProduct { word: PauliWord::z_word(n, mask as u64), weight: cr(w) });
    PauliDecomposition::from_terms(n, terms)
}

type ZPoly<T> = BTreeMap<u64, T>;

fn zpoly_mul<T: Real>(a: &ZPoly<T>, b: &ZPoly<T>) -> ZPoly<T> {
    let mut out = ZPoly::new();
    for (&ma, &wa) in a {
        for (&mb, &wb) in b {
            *out.entry(ma ^ mb).or_insert(T::zero()) += wa * wb;
        }
    }
    out
}

/// Decomposition of `diag(p(0), …, p(2ⁿ−1))` for `p(m) = Σ_s α_s m^s`,
/// expanded symbolically in commuting Z factors through `m = (N−1)/2 − Σ_k 2^{k−1} Z_k`.
pub fn decompose_diagonal_polynomial<T: Real>(coeffs: &[T], n: usize) -> Result<PauliDecomposition<T>> {
    if n == 0 || n > 63 {
        return Err(Error::TooFewQubits { n, min: 1 });
    }
    let degree = coeffs.len().saturating_sub(1);
    if degree > n {
        return Err(Error::DegreeTooHigh { degree, n });
    }
    let mut m = ZPoly::new();
    m.insert(0u64, T::of(((1u64 << n) - 1) as f64) * T::of(0.5));
    for k in 0..n {
        m.insert(1u64 << k, -T::of((1u64 << k) as f64) * T::of(0.5));
    }
    let mut acc = ZPoly::new();
    for &a in coeffs.iter().rev() {
        acc = zpoly_mul(&acc, &m);
        *acc.entry(0).or_insert(T::zero()) += a;
    }
    let terms = acc
        .into_iter()
        .filter(|(_, w)| w.abs() > T::prune())
        .map(|(mask, w)| PauliProduct { word: PauliWord::z_word(n, mask), weight: cr(w) });
    let mut d = PauliDecomposition::from_terms(n, terms)?;
    d.terms.sort_by_key(|t| (t.word.z.count_ones(), t.word.z));
    Ok(d)
}

/// Fourier-space decomposition `ζ·I + Σ s_i Z_i + Σ d_ij Z_iZ_j` of the
/// substituted operator: decompose the shifted single quadratic, then undo
/// the `N/2` shift by conjugating with `X` on the top qubit.
pub fn decompose_substituted_fourier<T: Real>(n: usize, c: T) -> Result<PauliDecomposition<T>> {
    if n < 2 {
        return Err(Error::TooFewQubits { n, min: 2 });
    }
    if !(c >= T::zero()) {
        return Err(Error::InvalidGridParameter(c.as_f64()));
    }
    let nf = T::of((1u64 << n) as f64);
    let pi2 = T::PI() * T::PI();
    let four_pi2 = T::of(4.0) * pi2;
    // −c − 4(πk/N − π/2)² expanded in k.
    let coeffs = [-c - pi2, four_pi2 / nf, -four_pi2 / (nf * nf)];
    let shifted = decompose_diagonal_polynomial(&coeffs, n)?;
    let top = 1u64 << (n - 1);
    let terms: Vec<PauliProduct<T>> = shifted
        .terms
        .into_iter()
        .map(|t| {
            let w = if t.word.z & top != 0 { -t.weight } else { t.weight };
            PauliProduct { word: t.word, weight: w }
        })
        .collect();
    PauliDecomposition::from_terms(n, terms)
}

/// Weights `h_p` of the inverse substituted operator over all `2ⁿ` I/Z words.
pub fn inverse_weights<T: Real>(n: usize, c: T) -> Result<PauliDecomposition<T>> {
    if c <= T::zero() {
        return Err(Error::Singular);
    }
    let lam = heat::substituted_spectrum(n, c)?;
    let inv: Vec<T> = lam.iter().map(|&l| T::one() / l).collect();
    z_table_to_decomposition(n, &diagonal_weights(&inv)?, false)
}

/// Tensor action of `word` on a state.
pub fn apply_pauli_word<T: Real>(state: &QuantumState<T>, word: &PauliWord) -> Result<QuantumState<T>> {
    if word.n() != state.n() {
        return Err(Error::LengthMismatch { expected: state.n(), got: word.n() });
    }
    QuantumState::scratch(word.apply(state.amplitudes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_roundtrip_and_order() {
        let w: PauliWord = "XIZY".parse().unwrap();
        assert_eq!(w.to_string(), "XIZY");
        // Rightmost character is qubit 0.
        assert_eq!(w.x_mask(), 0b1001);
        assert_eq!(w.z_mask(), 0b0011);
    }

    #[test]
    fn y_matches_matrix() {
        let y = PauliWord::new(1, 1, 1).unwrap().to_dense::<f64>();
        assert_eq!(y.get(0, 1), Complex::new(0.0, -1.0));
        assert_eq!(y.get(1, 0), Complex::new(0.0, 1.0));
    }

    #[test]
    fn ramp_decomposition() {
        let d = decompose_diagonal_polynomial(&[0.0_f64, 1.0], 2).unwrap();
        assert_eq!(d.len(), 3);
        assert!((d.weight_of(&"II".parse().unwrap()).re - 1.5).abs() < 1e-15);
        assert!((d.weight_of(&"ZI".parse().unwrap()).re + 1.0).abs() < 1e-15);
        assert!((d.weight_of(&"IZ".parse().unwrap()).re + 0.5).abs() < 1e-15);
    }

    #[test]
    fn degree_guard() {
        assert!(matches!(
            decompose_diagonal_polynomial(&[1.0_f64, 0.0, 0.0, 1.0], 2),
            Err(Error::DegreeTooHigh { degree: 3, n: 2 })
        ));
    }

    #[test]
    fn word_product_phase() {
        let x: PauliWord = "X".parse().unwrap();
        let z: PauliWord = "Z".parse().unwrap();
        // XZ = −iY.
        let (ph, w) = x.mul::<f64>(&z);
        assert_eq!(w.to_string(), "Y");
        assert!((ph - Complex::new(0.0, -1.0)).norm() < 1e-15);
    }
}
