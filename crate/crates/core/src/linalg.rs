//! Dense complex matrices and the handful of vector routines the solvers share.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cr, Real, C};

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator<T> {
    dim: usize,
    entries: Vec<C<T>>,
    hermitian: bool,
}

impl<T: Real> DenseOperator<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: vec![C::new(T::zero(), T::zero()); dim * dim], hermitian: true }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = cr(T::one());
        }
        m
    }

    /// Diagonal matrix with real entries.
    pub fn diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.entries[i * diag.len() + i] = cr(d);
        }
        m
    }

    /// Builds from row-major entries; the hermitian flag is computed.
    pub fn from_entries(dim: usize, entries: Vec<C<T>>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::LengthMismatch { expected: dim * dim, got: entries.len() });
        }
        let mut m = Self { dim, entries, hermitian: false };
        m.hermitian = m.hermitian_deviation() <= T::of(1e-12).max(T::prune());
        Ok(m)
    }

    pub fn from_real_rows(rows: &[Vec<T>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::LengthMismatch { expected: dim, got: row.len() });
            }
            entries.extend(row.iter().map(|&x| cr(x)));
        }
        Self::from_entries(dim, entries)
    }

    /// Builds column by column from the images of the basis vectors.
    pub fn from_columns(dim: usize, mut column: impl FnMut(usize) -> Vec<C<T>>) -> Result<Self> {
        let mut entries = vec![C::new(T::zero(), T::zero()); dim * dim];
        for j in 0..dim {
            let col = column(j);
            if col.len() != dim {
                return Err(Error::LengthMismatch { expected: dim, got: col.len() });
            }
            for (i, v) in col.into_iter().enumerate() {
                entries[i * dim + j] = v;
            }
        }
        Self::from_entries(dim, entries)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C<T>) {
        self.entries[i * self.dim + j] = v;
    }

    /// Recomputes the hermitian flag after in-place edits.
    pub fn refresh_hermitian(&mut self) {
        self.hermitian = self.hermitian_deviation() <= T::of(1e-12).max(T::prune());
    }

    pub fn entries(&self) -> &[C<T>] {
        &self.entries
    }

    pub fn hermitian_deviation(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn diagonal_entries(&self) -> Vec<C<T>> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.entries[j * self.dim + i] = self.get(i, j).conj();
            }
        }
        out.hermitian = self.hermitian;
        out
    }

    pub fn apply(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(v.len(), self.dim, "operator/vector dimension mismatch");
        self.entries
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(v).fold(C::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b))
            .collect()
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = vec![C::new(T::zero(), T::zero()); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let row = &rhs.entries[k * n..(k + 1) * n];
                for (o, r) in out[i * n..(i + 1) * n].iter_mut().zip(row) {
                    *o += a * r;
                }
            }
        }
        let mut m = Self { dim: n, entries: out, hermitian: false };
        m.refresh_hermitian();
        m
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, s: C<T>) -> Self {
        let mut m = Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&a| a * s).collect(),
            hermitian: false,
        };
        m.refresh_hermitian();
        m
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(C<T>, C<T>) -> C<T>) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let mut m = Self {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(&a, &b)| f(a, b)).collect(),
            hermitian: false,
        };
        m.refresh_hermitian();
        m
    }

    /// Kronecker product `self ⊗ rhs`; `rhs` acts on the low-order index bits.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (a, b) = (self.dim, rhs.dim);
        let n = a * b;
        let mut entries = vec![C::new(T::zero(), T::zero()); n * n];
        for i1 in 0..a {
            for j1 in 0..a {
                let x = self.get(i1, j1);
                for i2 in 0..b {
                    for j2 in 0..b {
                        entries[(i1 * b + i2) * n + j1 * b + j2] = x * rhs.get(i2, j2);
                    }
                }
            }
        }
        let mut m = Self { dim: n, entries, hermitian: false };
        m.refresh_hermitian();
        m
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> T {
        self.entries
            .iter()
            .zip(&rhs.entries)
            .fold(T::zero(), |acc, (a, b)| acc.max((a - b).norm()))
    }

    /// Largest entry modulus; cheap stand-in for an operator norm in tolerance checks.
    pub fn max_abs(&self) -> T {
        self.entries.iter().fold(T::zero(), |acc, a| acc.max(a.norm()))
    }

    /// Frobenius norm of the commutator `[self, rhs]`.
    pub fn commutator_norm(&self, rhs: &Self) -> T {
        let ab = self.matmul(rhs);
        let ba = rhs.matmul(self);
        ab.entries.iter().zip(&ba.entries).map(|(x, y)| (x - y).norm_sqr()).sum::<T>().sqrt()
    }
}

/// Solves `M x = b` by LU factorisation with partial pivoting.
pub fn lu_solve<T: Real>(m: &DenseOperator<T>, b: &[C<T>]) -> Result<Vec<C<T>>> {
    let n = m.dim();
    if b.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: b.len() });
    }
    let mut a = m.entries().to_vec();
    let mut x = b.to_vec();
    let scale = m.max_abs().max(T::min_positive_value());
    let tiny = scale * T::epsilon() * T::of(n as f64) * T::of(16.0);
    for col in 0..n {
        let (piv, pmag) = (col..n)
            .map(|r| (r, a[r * n + col].norm()))
            .fold((col, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmag <= tiny {
            return Err(Error::Singular);
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            x.swap(col, piv);
        }
        let p = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f.norm() == T::zero() {
                continue;
            }
            for k in col..n {
                let v = a[col * n + k];
                a[r * n + k] -= f * v;
            }
            let xc = x[col];
            x[r] -= f * xc;
        }
    }
    for col in (0..n).rev() {
        let mut s = x[col];
        for k in col + 1..n {
            s -= a[col * n + k] * x[k];
        }
        x[col] = s / a[col * n + col];
    }
    Ok(x)
}

/// Eigen-decomposition of a real symmetric matrix (row-major, `n × n`) by cyclic Jacobi sweeps.
/// Returns eigenvalues and the eigenvectors as columns of a row-major matrix.
pub fn symmetric_eigen<T: Real>(n: usize, mut a: Vec<T>) -> (Vec<T>, Vec<T>) {
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        let total: T = a.iter().map(|&x| x * x).sum();
        if off <= total * T::epsilon() * T::epsilon() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (T::of(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i * n + i]).collect(), v)
}

/// Outcome of a hermitian positive-semidefinite solve.
#[derive(Debug, Clone)]
pub struct HermitianSolve<T> {
    pub x: Vec<C<T>>,
    /// Set when the matrix was numerically singular and the minimum-norm solution was returned.
    pub singular: bool,
}

/// Solves `M x = v` for hermitian PSD `M`, falling back to the minimum-norm
/// least-squares solution when `M` is singular.
pub fn hermitian_psd_solve<T: Real>(m: &DenseOperator<T>, v: &[C<T>]) -> Result<HermitianSolve<T>> {
    let n = m.dim();
    if v.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: v.len() });
    }
    let scale = m.max_abs();
    // Well-conditioned case: accept LU when the residual is clean.
    if let Ok(x) = lu_solve(m, v) {
        let r = m.apply(&x);
        let res = r.iter().zip(v).map(|(a, b)| (a - b).norm_sqr()).sum::<T>().sqrt();
        let vn = norm(v).max(T::min_positive_value());
        let xn = norm(&x);
        let cond_guard = xn * scale <= vn / (T::epsilon().sqrt() * T::of(1e-2));
        if res <= vn * T::of(1e3) * T::epsilon() * T::of(n as f64) && cond_guard {
            return Ok(HermitianSolve { x, singular: false });
        }
    }
    // Real symmetric embedding [[Re, -Im], [Im, Re]].
    let d = 2 * n;
    let mut a = vec![T::zero(); d * d];
    for i in 0..n {
        for j in 0..n {
            let z = m.get(i, j);
            a[i * d + j] = z.re;
            a[i * d + n + j] = -z.im;
            a[(n + i) * d + j] = z.im;
            a[(n + i) * d + n + j] = z.re;
        }
    }
    let (vals, vecs) = symmetric_eigen(d, a);
    let top = vals.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()));
    let cut = top * T::of(1e-10).max(T::epsilon() * T::of(d as f64 * 10.0));
    let rhs: Vec<T> = v.iter().map(|z| z.re).chain(v.iter().map(|z| z.im)).collect();
    let mut y = vec![T::zero(); d];
    let mut dropped = false;
    for k in 0..d {
        if vals[k].abs() <= cut {
            dropped = true;
            continue;
        }
        let proj: T = (0..d).map(|i| vecs[i * d + k] * rhs[i]).sum();
        let coef = proj / vals[k];
        for i in 0..d {
            y[i] += coef * vecs[i * d + k];
        }
    }
    let x = (0..n).map(|i| Complex::new(y[i], y[n + i])).collect();
    Ok(HermitianSolve { x, singular: dropped })
}

/// `⟨a|b⟩ = Σ conj(a_i) b_i`.
pub fn inner<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter().zip(b).fold(C::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

pub fn norm<T: Real>(a: &[C<T>]) -> T {
    a.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

pub fn normalized<T: Real>(a: &[C<T>]) -> Result<Vec<C<T>>> {
    let n = norm(a);
    if n == T::zero() {
        return Err(Error::ZeroVector);
    }
    Ok(a.iter().map(|z| z / n).collect())
}

/// Squared normalized overlap `|a†b|² / (a†a · b†b)`.
pub fn fidelity<T: Real>(a: &[C<T>], b: &[C<T>]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { expected: a.len(), got: b.len() });
    }
    let na: T = a.iter().map(|z| z.norm_sqr()).sum();
    let nb: T = b.iter().map(|z| z.norm_sqr()).sum();
    if na == T::zero() || nb == T::zero() {
        return Err(Error::ZeroVector);
    }
    let f = inner(a, b).norm_sqr() / (na * nb);
    Ok(f.min(T::one()))
}

pub fn real_vector<T: Real>(v: &[T]) -> Vec<C<T>> {
    v.iter().map(|&x| cr(x)).collect()
}

pub fn max_abs_diff<T: Real>(a: &[C<T>], b: &[C<T>]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc.max((x - y).norm()))
}
