//! Direct variational solver: the ground state of `H = A†(I − |b⟩⟨b|)A` is
//! the normalized solution of `A x = b`.
//!
//! The two-qubit demonstration works on the Poisson matrix (`c = 0`) with a
//! zero-sum right-hand side; the circuit keeps its output orthogonal to the
//! homogeneous mode by construction.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::heat;
use crate::linalg::{self, DenseOperator};
use crate::optim::{nelder_mead, NelderMeadConfig};
use crate::pauli::{decompose_hermitian, PauliDecomposition, PauliWord};
use crate::scalar::{cr, Real, C};
use crate::sim::{measure_diagonal, Circuit, Estimate, Gate, Mode, QuantumState};

/// Largest register for which the Pauli expansion of `H` is built.
pub const MAX_PAULI_QUBITS: usize = 6;

#[derive(Debug, Clone)]
pub struct VariationalHamiltonian<T> {
    pub a: DenseOperator<T>,
    pub b: Vec<C<T>>,
    pub dense: DenseOperator<T>,
    /// Present for registers of at most [`MAX_PAULI_QUBITS`] qubits.
    pub pauli: Option<PauliDecomposition<T>>,
}

pub fn build_hamiltonian<T: Real>(a: &DenseOperator<T>, b: &[C<T>]) -> Result<VariationalHamiltonian<T>> {
    if b.len() != a.dim() {
        return Err(Error::LengthMismatch { expected: a.dim(), got: b.len() });
    }
    let norm = linalg::norm(b);
    if (norm - T::one()).abs() > T::of(1e-10).max(T::prune()) {
        return Err(Error::NotNormalized(norm.as_f64()));
    }
    let dim = a.dim();
    let mut proj = DenseOperator::identity(dim);
    for i in 0..dim {
        for j in 0..dim {
            let v = proj.get(i, j) - b[i] * b[j].conj();
            proj.set(i, j, v);
        }
    }
    let mut dense = a.adjoint().matmul(&proj).matmul(a);
    // Symmetrize away round-off so the hermitian flag is reliable.
    let sym = dense.adjoint();
    dense = dense.add(&sym).scale(cr(T::of(0.5)));
    let n = dim.trailing_zeros() as usize;
    let pauli = if n <= MAX_PAULI_QUBITS { Some(decompose_hermitian(&dense)?) } else { None };
    Ok(VariationalHamiltonian { a: a.clone(), b: b.to_vec(), dense, pauli })
}

impl<T: Real> VariationalHamiltonian<T> {
    pub fn n(&self) -> usize {
        self.a.dim().trailing_zeros() as usize
    }

    /// `⟨x|H|x⟩ / ⟨x|x⟩` from the dense matrix.
    pub fn dense_energy(&self, x: &[C<T>]) -> T {
        let hx = self.dense.apply(x);
        linalg::inner(x, &hx).re / linalg::inner(x, x).re
    }

    /// Measures every Pauli term on `prep|initial⟩`: basis rotation, then the
    /// parity of the term's support. One simulator run per non-identity term.
    pub fn measured_energy(&self, prep: &Circuit<T>, initial: &QuantumState<T>, mode: Mode) -> Result<Estimate<T>> {
        let pauli = self
            .pauli
            .as_ref()
            .ok_or_else(|| Error::Config("Pauli expansion unavailable for this register size".into()))?;
        let n = self.n();
        let mut value = T::zero();
        let mut var = T::zero();
        for (idx, term) in pauli.terms().iter().enumerate() {
            let w = term.weight.re;
            let word = term.word;
            let support = word.x_mask() | word.z_mask();
            if support == 0 {
                value += w;
                continue;
            }
            let mut c = prep.clone();
            for gate in basis_rotation::<T>(&word) {
                c.push(gate)?;
            }
            let parity: Vec<T> = (0..1usize << n)
                .map(|k| if ((k as u64) & support).count_ones() % 2 == 1 { -T::one() } else { T::one() })
                .collect();
            let est = measure_diagonal(&c, initial, &parity, mode.reseeded(idx as u64))?;
            value += w * est.value;
            var += w * w * est.std_err * est.std_err;
        }
        Ok(Estimate { value, std_err: var.sqrt() })
    }
}

/// Rotations taking each factor of `word` to `Z`: `X → H`, `Y → S†` then `H`.
pub fn basis_rotation<T: Real>(word: &PauliWord) -> Vec<Gate<T>> {
    let mut gates = Vec::new();
    for q in 0..word.n() {
        let (x, z) = ((word.x_mask() >> q) & 1, (word.z_mask() >> q) & 1);
        match (x, z) {
            (1, 0) => gates.push(Gate::H(q)),
            (1, 1) => {
                gates.push(Gate::Sdg(q));
                gates.push(Gate::H(q));
            }
            _ => {}
        }
    }
    gates
}

/// Free angles and the dependent third angle of the demonstration circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaPoint<T> {
    pub theta1: T,
    pub theta2: T,
    pub theta3: T,
    /// The zero-sum condition hit its vanishing denominator; `theta3` is the limit `−π`.
    pub degenerate: bool,
}

impl<T: Real> ThetaPoint<T> {
    pub fn new(theta1: T, theta2: T) -> Self {
        let (theta3, degenerate) = theta3(theta1, theta2);
        Self { theta1, theta2, theta3, degenerate }
    }
}

/// `θ₃ = −2·arctan[(cos θ₊ + sin θ₊)/(cos θ₋ + sin θ₋)]`, `θ± = (θ₁ ± θ₂)/2`.
pub fn theta3<T: Real>(theta1: T, theta2: T) -> (T, bool) {
    let half = T::of(0.5);
    let (tp, tm) = ((theta1 + theta2) * half, (theta1 - theta2) * half);
    let num = tp.cos() + tp.sin();
    let den = tm.cos() + tm.sin();
    if den.abs() <= T::epsilon() * T::of(16.0) {
        return (-T::PI(), true);
    }
    (-T::of(2.0) * (num / den).atan(), false)
}

/// `Ry(θ₁)` on q0, `Ry(θ₂)` on q1, `CZ`, then `Ry(θ₃)` on q1.
pub fn demonstration_circuit<T: Real>(theta: &ThetaPoint<T>) -> Circuit<T> {
    Circuit::from_gates(
        2,
        vec![
            Gate::Ry(0, theta.theta1),
            Gate::Ry(1, theta.theta2),
            Gate::Cz(0, 1),
            Gate::Ry(1, theta.theta3),
        ],
    )
    .expect("static two-qubit circuit")
}

pub fn demonstration_state<T: Real>(theta: &ThetaPoint<T>) -> QuantumState<T> {
    demonstration_circuit(theta).run(&QuantumState::zero(2)).expect("two-qubit run")
}

/// The two-qubit Poisson demonstration.
#[derive(Debug, Clone)]
pub struct DirectProblem<T> {
    pub hamiltonian: VariationalHamiltonian<T>,
    /// Zero-mean solution of `A x = b`.
    pub solution: Vec<C<T>>,
}

impl<T: Real> DirectProblem<T> {
    pub fn new(b: &[C<T>]) -> Result<Self> {
        if b.len() != 4 {
            return Err(Error::LengthMismatch { expected: 4, got: b.len() });
        }
        let sum: C<T> = b.iter().copied().sum();
        if sum.norm() > T::of(1e-10).max(T::prune()) {
            return Err(Error::NonZeroSum(sum.norm().as_f64()));
        }
        let a = heat::build_matrix(2, T::zero())?;
        let hamiltonian = build_hamiltonian(&a, b)?;
        let solution = heat::spectral_solve(&heat::spectrum(2, T::zero())?, b)?;
        Ok(Self { hamiltonian, solution })
    }

    pub fn energy(&self, theta: &ThetaPoint<T>, mode: Mode) -> Result<Estimate<T>> {
        self.hamiltonian.measured_energy(&demonstration_circuit(theta), &QuantumState::zero(2), mode)
    }

    fn exact(&self, t1: T, t2: T) -> T {
        self.energy(&ThetaPoint::new(t1, t2), Mode::Exact).map(|e| e.value).unwrap_or(T::infinity())
    }

    pub fn fidelity(&self, theta: &ThetaPoint<T>) -> T {
        linalg::fidelity(&self.solution, demonstration_state(theta).amplitudes()).unwrap_or(T::zero())
    }

    /// Simplex descent from `start`.
    pub fn minimize(&self, start: (T, T), cfg: &NelderMeadConfig) -> DirectMinimum<T> {
        let r = nelder_mead(|x: &[T]| self.exact(x[0], x[1]), &[start.0, start.1], cfg);
        let theta = ThetaPoint::new(wrap(r.x[0]), wrap(r.x[1]));
        DirectMinimum {
            theta,
            state: demonstration_state(&theta),
            energy: r.f,
            fidelity: self.fidelity(&theta),
            trace: r.trace,
            evals: r.evals,
            converged: r.converged,
        }
    }

    /// Energies on a `grid × grid` lattice over `[0, 2π)²`, row-major in `θ₁`.
    pub fn scan_landscape(&self, grid: usize) -> Landscape<T>
    where
        T: Send + Sync,
    {
        let axis: Vec<T> = (0..grid).map(|i| T::TAU() * T::of(i as f64) / T::of(grid as f64)).collect();
        let energies = (0..grid * grid)
            .into_par_iter()
            .map(|idx| self.exact(axis[idx / grid], axis[idx % grid]))
            .collect();
        Landscape { axis, energies }
    }

    /// Local minima of the landscape: every periodic grid-local minimum is
    /// refined by simplex descent and duplicates are merged.
    pub fn landscape_minima(&self, landscape: &Landscape<T>, threshold: T) -> Vec<DirectMinimum<T>> {
        let g = landscape.axis.len();
        let cfg = NelderMeadConfig { max_evals: 1000, restarts: 2, initial_step: 0.1, ..Default::default() };
        let mut found: Vec<DirectMinimum<T>> = Vec::new();
        for i in 0..g {
            for j in 0..g {
                let v = landscape.at(i, j);
                let is_min = (-1i64..=1).all(|di| {
                    (-1i64..=1).all(|dj| {
                        let (ii, jj) = ((i as i64 + di).rem_euclid(g as i64), (j as i64 + dj).rem_euclid(g as i64));
                        (di == 0 && dj == 0) || landscape.at(ii as usize, jj as usize) >= v
                    })
                });
                if !is_min {
                    continue;
                }
                let m = self.minimize((landscape.axis[i], landscape.axis[j]), &cfg);
                if m.energy >= threshold {
                    continue;
                }
                let dup = found.iter().any(|f| {
                    angle_gap(f.theta.theta1, m.theta.theta1) < T::of(1e-3)
                        && angle_gap(f.theta.theta2, m.theta.theta2) < T::of(1e-3)
                });
                if !dup {
                    found.push(m);
                }
            }
        }
        found.sort_by(|a, b| {
            (a.theta.theta1, a.theta.theta2).partial_cmp(&(b.theta.theta1, b.theta.theta2)).unwrap()
        });
        found
    }
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap<T: Real>(a: T) -> T {
    let t = T::TAU();
    let r = a % t;
    if r < T::zero() {
        r + t
    } else {
        r
    }
}

/// Distance between two angles on the circle.
pub fn angle_gap<T: Real>(a: T, b: T) -> T {
    let d = wrap(a - b);
    d.min(T::TAU() - d)
}

#[derive(Debug, Clone)]
pub struct DirectMinimum<T> {
    pub theta: ThetaPoint<T>,
    pub state: QuantumState<T>,
    pub energy: T,
    pub fidelity: T,
    pub trace: Vec<T>,
    pub evals: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct Landscape<T> {
    pub axis: Vec<T>,
    pub energies: Vec<T>,
}

impl<T: Real> Landscape<T> {
    pub fn at(&self, i: usize, j: usize) -> T {
        self.energies[i * self.axis.len() + j]
    }

    pub fn min(&self) -> T {
        self.energies.iter().copied().fold(T::infinity(), T::min)
    }

    /// CSV rows `theta1,theta2,energy`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["theta1", "theta2", "energy"])?;
        let g = self.axis.len();
        for i in 0..g {
            for j in 0..g {
                w.write_record([
                    format!("{:.12e}", self.axis[i].as_f64()),
                    format!("{:.12e}", self.axis[j].as_f64()),
                    format!("{:.12e}", self.at(i, j).as_f64()),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
