use crate::error::{Error, Result};
use crate::linalg::DenseOperator;
use crate::scalar::{cr, Real};
use crate::sim::gate::{Gate, GateDoc};
use crate::sim::state::QuantumState;

/// Ordered gate list on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit<T> {
    n: usize,
    gates: Vec<Gate<T>>,
}

impl<T: Real> Circuit<T> {
    pub fn new(n: usize) -> Self {
        Self { n, gates: Vec::new() }
    }

    pub fn from_gates(n: usize, gates: Vec<Gate<T>>) -> Result<Self> {
        let c = Self { n, gates };
        c.validate()?;
        Ok(c)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn gates(&self) -> &[Gate<T>] {
        &self.gates
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.gates.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Appends a gate after checking it against the register.
    pub fn push(&mut self, gate: Gate<T>) -> Result<&mut Self> {
        gate.validate(self.n)?;
        self.gates.push(gate);
        Ok(self)
    }

    /// Appends all gates of `other`, which may act on a narrower register.
    pub fn extend(&mut self, other: &Circuit<T>) -> Result<&mut Self> {
        if other.n > self.n {
            return Err(Error::QubitOutOfRange { qubit: other.n - 1, n: self.n });
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.gates.iter().try_for_each(|g| g.validate(self.n))
    }

    pub fn count(&self, kind: &str) -> usize {
        self.gates.iter().filter(|g| g.kind_name() == kind).count()
    }

    pub fn inverse(&self) -> Self {
        Self { n: self.n, gates: self.gates.iter().rev().map(Gate::inverse).collect() }
    }

    /// Wraps every gate with the given control qubit and polarity.
    pub fn controlled_by(&self, control: usize, when: bool, width: usize) -> Result<Self> {
        let mut out = Circuit::new(width);
        for g in &self.gates {
            out.push(Gate::Controlled { controls: vec![(control, when)], gate: Box::new(g.clone()) })?;
        }
        Ok(out)
    }

    /// Applies the circuit to raw amplitudes of matching length.
    pub fn apply(&self, amps: &mut [crate::scalar::C<T>]) -> Result<()> {
        if amps.len() != 1usize << self.n {
            return Err(Error::LengthMismatch { expected: 1 << self.n, got: amps.len() });
        }
        for g in &self.gates {
            g.apply(amps);
        }
        Ok(())
    }

    pub fn run(&self, state: &QuantumState<T>) -> Result<QuantumState<T>> {
        let mut out = state.clone();
        self.apply(out.amplitudes_mut())?;
        Ok(out)
    }

    /// Dense unitary, one basis column at a time.
    pub fn unitary(&self) -> Result<DenseOperator<T>> {
        let dim = 1usize << self.n;
        DenseOperator::from_columns(dim, |j| {
            let mut e = vec![cr(T::zero()); dim];
            e[j] = cr(T::one());
            for g in &self.gates {
                g.apply(&mut e);
            }
            e
        })
    }

    pub fn to_docs(&self) -> Vec<GateDoc> {
        self.gates.iter().map(Gate::to_doc).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_docs())?)
    }

    pub fn from_json(n: usize, s: &str) -> Result<Self> {
        let docs: Vec<GateDoc> = serde_json::from_str(s)?;
        let gates = docs.iter().map(Gate::from_doc).collect::<Result<Vec<_>>>()?;
        Self::from_gates(n, gates)
    }
}

/// Textbook QFT: Hadamards and controlled phases from the top qubit down,
/// then the qubit-order reversal swaps.
pub fn qft_circuit<T: Real>(n: usize) -> Circuit<T> {
    let mut c = Circuit::new(n);
    for q in (0..n).rev() {
        c.gates.push(Gate::H(q));
        for m in (0..q).rev() {
            let angle = T::PI() / T::of((1u64 << (q - m)) as f64);
            c.gates.push(Gate::CPhase { control: m, target: q, angle });
        }
    }
    for q in 0..n / 2 {
        c.gates.push(Gate::Swap(q, n - 1 - q));
    }
    c
}

pub fn iqft_circuit<T: Real>(n: usize) -> Circuit<T> {
    qft_circuit(n).inverse()
}

/// QFT on the register `offset .. offset + width` of an `n`-qubit circuit.
pub fn qft_on<T: Real>(n: usize, offset: usize, width: usize, inverse: bool) -> Result<Circuit<T>> {
    let base = if inverse { iqft_circuit::<T>(width) } else { qft_circuit::<T>(width) };
    let mut out = Circuit::new(n);
    for g in base.gates() {
        out.push(shift_gate(g, offset))?;
    }
    Ok(out)
}

/// Relabels every qubit `q → q + offset`.
pub fn shift_gate<T: Real>(g: &Gate<T>, offset: usize) -> Gate<T> {
    let s = |q: usize| q + offset;
    match g {
        Gate::H(q) => Gate::H(s(*q)),
        Gate::S(q) => Gate::S(s(*q)),
        Gate::Sdg(q) => Gate::Sdg(s(*q)),
        Gate::X(q) => Gate::X(s(*q)),
        Gate::Y(q) => Gate::Y(s(*q)),
        Gate::Z(q) => Gate::Z(s(*q)),
        Gate::Rx(q, a) => Gate::Rx(s(*q), *a),
        Gate::Ry(q, a) => Gate::Ry(s(*q), *a),
        Gate::Rz(q, a) => Gate::Rz(s(*q), *a),
        Gate::Rzz(p, q, a) => Gate::Rzz(s(*p), s(*q), *a),
        Gate::Cnot { control, target } => Gate::Cnot { control: s(*control), target: s(*target) },
        Gate::Cz(p, q) => Gate::Cz(s(*p), s(*q)),
        Gate::CPhase { control, target, angle } => {
            Gate::CPhase { control: s(*control), target: s(*target), angle: *angle }
        }
        Gate::Swap(p, q) => Gate::Swap(s(*p), s(*q)),
        Gate::Diagonal { targets, phases } => {
            Gate::Diagonal { targets: targets.iter().map(|&q| s(q)).collect(), phases: phases.clone() }
        }
        Gate::Controlled { controls, gate } => Gate::Controlled {
            controls: controls.iter().map(|&(q, w)| (s(q), w)).collect(),
            gate: Box::new(shift_gate(gate, offset)),
        },
    }
}
