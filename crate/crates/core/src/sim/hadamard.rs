//! Hadamard test against a diagonal observable.
//!
//! With `ψ_x = common · on_x · prep · |initial⟩` the test returns the real or
//! imaginary part of `⟨ψ₁|D|ψ₀⟩` as the average of `(−1)^a · λ_k` over the
//! measured ancilla bit `a` and register outcome `k`. The ancilla is the extra
//! qubit with index `n`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sim::circuit::Circuit;
use crate::sim::gate::Gate;
use crate::sim::measure::{mean_and_error, Sampler};
use crate::sim::noise::{NoiseScope, ReadoutNoise};
use crate::sim::state::QuantumState;
use crate::sim::count_run;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Part {
    Re,
    Im,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Shots { shots: u64, seed: u64 },
}

impl Mode {
    pub fn validate(&self) -> Result<()> {
        match self {
            Mode::Shots { shots: 0, .. } => Err(Error::ZeroShots),
            _ => Ok(()),
        }
    }

    /// Same shot budget with a derived seed.
    pub fn reseeded(&self, salt: u64) -> Self {
        match *self {
            Mode::Exact => Mode::Exact,
            Mode::Shots { shots, seed } => Mode::Shots { shots, seed: crate::seeds::mix(seed, salt) },
        }
    }
}

/// Estimated value and its standard error (zero in exact mode).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub std_err: T,
}

#[derive(Debug, Clone)]
pub struct HadamardTest<T> {
    pub initial: QuantumState<T>,
    pub prep: Circuit<T>,
    pub on_zero: Circuit<T>,
    pub on_one: Circuit<T>,
    pub common: Circuit<T>,
    pub diag: Vec<T>,
    pub noise: Option<ReadoutNoise>,
}

impl<T: Real> HadamardTest<T> {
    /// Test with identity `on_zero`, `controlled` on the `|1⟩` branch and an empty `common`.
    pub fn new(initial: QuantumState<T>, prep: Circuit<T>, controlled: Circuit<T>, diag: Vec<T>) -> Self {
        let n = initial.n();
        Self {
            initial,
            prep,
            on_zero: Circuit::new(n),
            on_one: controlled,
            common: Circuit::new(n),
            diag,
            noise: None,
        }
    }

    pub fn n(&self) -> usize {
        self.initial.n()
    }

    fn check(&self) -> Result<()> {
        let n = self.n();
        for c in [&self.prep, &self.on_zero, &self.on_one, &self.common] {
            if c.n() > n {
                return Err(Error::QubitOutOfRange { qubit: c.n() - 1, n });
            }
        }
        if self.diag.len() != 1 << n {
            return Err(Error::LengthMismatch { expected: 1 << n, got: self.diag.len() });
        }
        Ok(())
    }

    /// Full circuit on `n + 1` qubits; the ancilla is qubit `n`.
    pub fn circuit(&self, part: Part) -> Result<Circuit<T>> {
        self.check()?;
        let n = self.n();
        let anc = n;
        let mut c = Circuit::new(n + 1);
        c.extend(&self.prep)?;
        c.push(Gate::H(anc))?;
        for g in self.on_zero.gates() {
            c.push(Gate::open_controlled(anc, g.clone()))?;
        }
        for g in self.on_one.gates() {
            c.push(Gate::controlled(anc, g.clone()))?;
        }
        c.extend(&self.common)?;
        if part == Part::Im {
            c.push(Gate::S(anc))?;
        }
        c.push(Gate::H(anc))?;
        Ok(c)
    }

    fn measured_mask(&self) -> usize {
        let n = self.n();
        match self.noise.map(|z| z.scope) {
            Some(NoiseScope::AncillaOnly) => 1 << n,
            _ => (1 << (n + 1)) - 1,
        }
    }

    fn signed_value(&self, k: usize) -> T {
        let n = self.n();
        let lam = self.diag[k & ((1 << n) - 1)];
        if (k >> n) & 1 == 1 {
            -lam
        } else {
            lam
        }
    }

    pub fn estimate(&self, part: Part, mode: Mode) -> Result<Estimate<T>> {
        mode.validate()?;
        let circuit = self.circuit(part)?;
        let state = circuit.run(&self.initial.extend_zero(1))?;
        count_run();
        let probs = state.probabilities();
        let mask = self.measured_mask();
        match mode {
            Mode::Exact => {
                let probs = match &self.noise {
                    Some(z) => z.mix_probabilities(&probs, mask),
                    None => probs,
                };
                let value = probs.iter().enumerate().map(|(k, &p)| p * self.signed_value(k)).sum();
                Ok(Estimate { value, std_err: T::zero() })
            }
            Mode::Shots { shots, seed } => {
                let sampler = Sampler::new(&probs);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut counts = vec![0u64; probs.len()];
                for _ in 0..shots {
                    let mut k = sampler.draw(&mut rng);
                    if let Some(z) = &self.noise {
                        k = z.corrupt(k, mask, &mut rng);
                    }
                    counts[k] += 1;
                }
                let (value, std_err) = mean_and_error(&counts, |k| self.signed_value(k).as_f64());
                Ok(Estimate { value, std_err })
            }
        }
    }
}

/// One-call form of the test with an identity `on_zero` branch.
pub fn hadamard_test<T: Real>(
    initial: &QuantumState<T>,
    prep: &Circuit<T>,
    controlled_op: &Circuit<T>,
    common: &Circuit<T>,
    eigenvalues: &[T],
    part: Part,
    mode: Mode,
) -> Result<Estimate<T>> {
    let mut t = HadamardTest::new(initial.clone(), prep.clone(), controlled_op.clone(), eigenvalues.to_vec());
    t.common = common.clone();
    t.estimate(part, mode)
}
