//! Gate set and the in-place kernels that apply it to an amplitude vector.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cis, cr, Real, C};

/// A quantum gate. Qubit 0 is the least-significant bit of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate<T> {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Rx(usize, T),
    /// `[[cos θ/2, −sin θ/2], [sin θ/2, cos θ/2]]`.
    Ry(usize, T),
    Rz(usize, T),
    /// `exp(−iθ Z⊗Z)`, no half angle.
    Rzz(usize, usize, T),
    Cnot { control: usize, target: usize },
    Cz(usize, usize),
    /// `diag(1, 1, 1, e^{iφ})`.
    CPhase { control: usize, target: usize, angle: T },
    Swap(usize, usize),
    /// Arbitrary diagonal on `targets`; `targets[0]` is the low bit of the phase index.
    Diagonal { targets: Vec<usize>, phases: Vec<C<T>> },
    /// Applies `gate` when every control qubit reads its `when` value.
    Controlled { controls: Vec<(usize, bool)>, gate: Box<Gate<T>> },
}

impl<T: Real> Gate<T> {
    pub fn controlled(control: usize, gate: Gate<T>) -> Self {
        Gate::Controlled { controls: vec![(control, true)], gate: Box::new(gate) }
    }

    /// Controlled on the control qubit reading `0`.
    pub fn open_controlled(control: usize, gate: Gate<T>) -> Self {
        Gate::Controlled { controls: vec![(control, false)], gate: Box::new(gate) }
    }

    /// Every qubit the gate touches, controls included.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::S(q) | Gate::Sdg(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => vec![*q],
            Gate::Rx(q, _) | Gate::Ry(q, _) | Gate::Rz(q, _) => vec![*q],
            Gate::Rzz(a, b, _) | Gate::Cz(a, b) | Gate::Swap(a, b) => vec![*a, *b],
            Gate::Cnot { control, target } | Gate::CPhase { control, target, .. } => vec![*control, *target],
            Gate::Diagonal { targets, .. } => targets.clone(),
            Gate::Controlled { controls, gate } => {
                let mut q: Vec<usize> = controls.iter().map(|c| c.0).collect();
                q.extend(gate.qubits());
                q
            }
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Gate::H(_) => "h",
            Gate::S(_) => "s",
            Gate::Sdg(_) => "sdg",
            Gate::X(_) => "x",
            Gate::Y(_) => "y",
            Gate::Z(_) => "z",
            Gate::Rx(..) => "rx",
            Gate::Ry(..) => "ry",
            Gate::Rz(..) => "rz",
            Gate::Rzz(..) => "rzz",
            Gate::Cnot { .. } => "cnot",
            Gate::Cz(..) => "cz",
            Gate::CPhase { .. } => "cphase",
            Gate::Swap(..) => "swap",
            Gate::Diagonal { .. } => "diagonal",
            Gate::Controlled { .. } => "controlled",
        }
    }

    pub fn angle(&self) -> Option<T> {
        match self {
            Gate::Rx(_, a) | Gate::Ry(_, a) | Gate::Rz(_, a) | Gate::Rzz(_, _, a) => Some(*a),
            Gate::CPhase { angle, .. } => Some(*angle),
            _ => None,
        }
    }

    /// Returns a copy with the rotation angle replaced (no-op for fixed gates).
    pub fn with_angle(&self, a: T) -> Self {
        match self {
            Gate::Rx(q, _) => Gate::Rx(*q, a),
            Gate::Ry(q, _) => Gate::Ry(*q, a),
            Gate::Rz(q, _) => Gate::Rz(*q, a),
            Gate::Rzz(p, q, _) => Gate::Rzz(*p, *q, a),
            Gate::CPhase { control, target, .. } => Gate::CPhase { control: *control, target: *target, angle: a },
            Gate::Controlled { controls, gate } => {
                Gate::Controlled { controls: controls.clone(), gate: Box::new(gate.with_angle(a)) }
            }
            g => g.clone(),
        }
    }

    /// Checks ranges, distinct qubits and unitarity of custom diagonals.
    pub fn validate(&self, n: usize) -> Result<()> {
        let qs = self.qubits();
        for &q in &qs {
            if q >= n {
                return Err(Error::QubitOutOfRange { qubit: q, n });
            }
        }
        let mut sorted = qs.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != qs.len() {
            return Err(Error::DuplicateTargets);
        }
        match self {
            Gate::Diagonal { targets, phases } => {
                if phases.len() != 1 << targets.len() {
                    return Err(Error::LengthMismatch { expected: 1 << targets.len(), got: phases.len() });
                }
                let tol = T::of(1e-12).max(T::prune());
                if let Some(p) = phases.iter().find(|p| (p.norm() - T::one()).abs() > tol) {
                    return Err(Error::Config(format!("diagonal phase of modulus {} is not unitary", p.norm())));
                }
                Ok(())
            }
            Gate::Controlled { gate, .. } => gate.validate(n),
            _ => Ok(()),
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            Gate::S(q) => Gate::Sdg(*q),
            Gate::Sdg(q) => Gate::S(*q),
            Gate::Rx(q, a) => Gate::Rx(*q, -*a),
            Gate::Ry(q, a) => Gate::Ry(*q, -*a),
            Gate::Rz(q, a) => Gate::Rz(*q, -*a),
            Gate::Rzz(p, q, a) => Gate::Rzz(*p, *q, -*a),
            Gate::CPhase { control, target, angle } => {
                Gate::CPhase { control: *control, target: *target, angle: -*angle }
            }
            Gate::Diagonal { targets, phases } => {
                Gate::Diagonal { targets: targets.clone(), phases: phases.iter().map(|p| p.conj()).collect() }
            }
            Gate::Controlled { controls, gate } => {
                Gate::Controlled { controls: controls.clone(), gate: Box::new(gate.inverse()) }
            }
            g => g.clone(),
        }
    }

    /// Applies the gate in place. Panics on out-of-range qubits; circuits validate first.
    pub fn apply(&self, amps: &mut [C<T>]) {
        self.apply_masked(amps, 0, 0);
    }

    fn apply_masked(&self, amps: &mut [C<T>], mask: usize, value: usize) {
        let half = T::of(0.5);
        match self {
            Gate::H(q) => {
                let s = T::FRAC_1_SQRT_2();
                mat1(amps, *q, [cr(s), cr(s), cr(s), cr(-s)], mask, value)
            }
            Gate::S(q) => diag1(amps, *q, Complex::i(), mask, value),
            Gate::Sdg(q) => diag1(amps, *q, -Complex::i(), mask, value),
            Gate::X(q) => {
                let (o, z) = (cr(T::one()), cr(T::zero()));
                mat1(amps, *q, [z, o, o, z], mask, value)
            }
            Gate::Y(q) => {
                let z = cr(T::zero());
                mat1(amps, *q, [z, -Complex::i(), Complex::i(), z], mask, value)
            }
            Gate::Z(q) => diag1(amps, *q, cr(-T::one()), mask, value),
            Gate::Rx(q, a) => {
                let (c, s) = ((*a * half).cos(), (*a * half).sin());
                let m = [cr(c), Complex::new(T::zero(), -s), Complex::new(T::zero(), -s), cr(c)];
                mat1(amps, *q, m, mask, value)
            }
            Gate::Ry(q, a) => {
                let (c, s) = ((*a * half).cos(), (*a * half).sin());
                mat1(amps, *q, [cr(c), cr(-s), cr(s), cr(c)], mask, value)
            }
            Gate::Rz(q, a) => {
                let (lo, hi) = (cis(-*a * half), cis(*a * half));
                let bit = 1usize << q;
                for (i, z) in amps.iter_mut().enumerate() {
                    if i & mask == value {
                        *z *= if i & bit == 0 { lo } else { hi };
                    }
                }
            }
            Gate::Rzz(p, q, a) => {
                let (even, odd) = (cis(-*a), cis(*a));
                let (bp, bq) = (1usize << p, 1usize << q);
                for (i, z) in amps.iter_mut().enumerate() {
                    if i & mask == value {
                        let parity = ((i & bp) != 0) ^ ((i & bq) != 0);
                        *z *= if parity { odd } else { even };
                    }
                }
            }
            Gate::Cnot { control, target } => {
                Gate::X(*target).apply_masked(amps, mask | (1 << control), value | (1 << control))
            }
            Gate::Cz(p, q) => {
                let both = (1usize << p) | (1usize << q);
                diag_mask(amps, mask | both, value | both, cr(-T::one()))
            }
            Gate::CPhase { control, target, angle } => {
                let both = (1usize << control) | (1usize << target);
                diag_mask(amps, mask | both, value | both, cis(*angle))
            }
            Gate::Swap(p, q) => {
                let (bp, bq) = (1usize << p, 1usize << q);
                for i in 0..amps.len() {
                    // Visit each pair once from the (p=1, q=0) member.
                    if i & bp != 0 && i & bq == 0 && i & mask == value {
                        amps.swap(i, i ^ bp ^ bq);
                    }
                }
            }
            Gate::Diagonal { targets, phases } => {
                for (i, z) in amps.iter_mut().enumerate() {
                    if i & mask == value {
                        let k = targets
                            .iter()
                            .enumerate()
                            .fold(0usize, |k, (pos, &t)| k | (((i >> t) & 1) << pos));
                        *z *= phases[k];
                    }
                }
            }
            Gate::Controlled { controls, gate } => {
                let (mut m, mut v) = (mask, value);
                for &(c, when) in controls {
                    m |= 1 << c;
                    if when {
                        v |= 1 << c;
                    }
                }
                gate.apply_masked(amps, m, v)
            }
        }
    }
}

fn mat1<T: Real>(amps: &mut [C<T>], q: usize, m: [C<T>; 4], mask: usize, value: usize) {
    let bit = 1usize << q;
    for i in 0..amps.len() {
        if i & bit == 0 && i & mask == value {
            let j = i | bit;
            let (a, b) = (amps[i], amps[j]);
            amps[i] = m[0] * a + m[1] * b;
            amps[j] = m[2] * a + m[3] * b;
        }
    }
}

fn diag1<T: Real>(amps: &mut [C<T>], q: usize, phase: C<T>, mask: usize, value: usize) {
    let bit = 1usize << q;
    diag_mask(amps, mask | bit, value | bit, phase)
}

fn diag_mask<T: Real>(amps: &mut [C<T>], mask: usize, value: usize, phase: C<T>) {
    for (i, z) in amps.iter_mut().enumerate() {
        if i & mask == value {
            *z *= phase;
        }
    }
}

/// Wire form of a gate: `{kind, targets, angle}` plus optional extras.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GateDoc {
    pub kind: String,
    pub targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    /// `[re, im]` pairs for `diagonal`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<Vec<[f64; 2]>>,
    /// Control polarity for `controlled` (targets are the controls).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub when: Option<Vec<bool>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<Box<GateDoc>>,
}

impl<T: Real> Gate<T> {
    pub fn to_doc(&self) -> GateDoc {
        let mut doc = GateDoc {
            kind: self.kind_name().to_string(),
            targets: self.qubits(),
            angle: self.angle().map(|a| a.as_f64()),
            phases: None,
            when: None,
            inner: None,
        };
        match self {
            Gate::Diagonal { phases, .. } => {
                doc.phases = Some(phases.iter().map(|p| [p.re.as_f64(), p.im.as_f64()]).collect());
            }
            Gate::Controlled { controls, gate } => {
                doc.targets = controls.iter().map(|c| c.0).collect();
                doc.when = Some(controls.iter().map(|c| c.1).collect());
                doc.inner = Some(Box::new(gate.to_doc()));
            }
            _ => {}
        }
        doc
    }

    pub fn from_doc(doc: &GateDoc) -> Result<Self> {
        let t = &doc.targets;
        let need = |k: usize| -> Result<()> {
            if t.len() != k {
                return Err(Error::Parse(format!("gate '{}' needs {} targets, got {}", doc.kind, k, t.len())));
            }
            Ok(())
        };
        let angle = || -> Result<T> {
            doc.angle.map(T::of).ok_or_else(|| Error::Parse(format!("gate '{}' needs an angle", doc.kind)))
        };
        let g = match doc.kind.to_ascii_lowercase().as_str() {
            "h" => { need(1)?; Gate::H(t[0]) }
            "s" => { need(1)?; Gate::S(t[0]) }
            "sdg" => { need(1)?; Gate::Sdg(t[0]) }
            "x" => { need(1)?; Gate::X(t[0]) }
            "y" => { need(1)?; Gate::Y(t[0]) }
            "z" => { need(1)?; Gate::Z(t[0]) }
            "rx" => { need(1)?; Gate::Rx(t[0], angle()?) }
            "ry" => { need(1)?; Gate::Ry(t[0], angle()?) }
            "rz" => { need(1)?; Gate::Rz(t[0], angle()?) }
            "rzz" => { need(2)?; Gate::Rzz(t[0], t[1], angle()?) }
            "cnot" | "cx" => { need(2)?; Gate::Cnot { control: t[0], target: t[1] } }
            "cz" => { need(2)?; Gate::Cz(t[0], t[1]) }
            "cphase" => { need(2)?; Gate::CPhase { control: t[0], target: t[1], angle: angle()? } }
            "swap" => { need(2)?; Gate::Swap(t[0], t[1]) }
            "diagonal" => {
                let ph = doc.phases.as_ref().ok_or_else(|| Error::Parse("diagonal gate needs phases".into()))?;
                Gate::Diagonal {
                    targets: t.clone(),
                    phases: ph.iter().map(|p| Complex::new(T::of(p[0]), T::of(p[1]))).collect(),
                }
            }
            "controlled" => {
                let inner = doc.inner.as_ref().ok_or_else(|| Error::Parse("controlled gate needs inner".into()))?;
                let when = doc.when.clone().unwrap_or_else(|| vec![true; t.len()]);
                if when.len() != t.len() {
                    return Err(Error::Parse("controlled gate: 'when' length differs from targets".into()));
                }
                Gate::Controlled {
                    controls: t.iter().copied().zip(when).collect(),
                    gate: Box::new(Gate::from_doc(inner)?),
                }
            }
            other => return Err(Error::Parse(format!("unknown gate kind '{other}'"))),
        };
        Ok(g)
    }
}
