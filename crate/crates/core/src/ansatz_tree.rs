//! Ansatz-tree solver for `A'x = b`.
//!
//! Nodes are states `QFT†·Π_w·QFT|b⟩` for I/Z words `w`; the solution is a
//! weighted sum over the active nodes. Every inner product the solver needs is
//! of the form `⟨i|A'^k|j⟩ = ⟨QFT b|Λ^k Π_{w_i⊕w_j}|QFT b⟩`, which one Hadamard
//! test with the register prepared by a QFT delivers.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::fourier::qft_axes_in_place;
use crate::heat::{self, GridParams, LinearSolver, Solution, SpectrumKind};
use crate::linalg::{self, hermitian_psd_solve, DenseOperator};
use crate::pauli::{decompose_substituted_fourier, PauliWord};
use crate::scalar::{cr, Real, C};
use crate::sim::prep::amplitude_loading;
use crate::sim::{measure_diagonal, qft_on, Circuit, Gate, HadamardTest, Mode, NoiseScope, Part, QuantumState, ReadoutNoise};

/// The substituted system in Fourier space, possibly over several axes.
#[derive(Debug, Clone)]
pub struct FourierSystem<T> {
    n: usize,
    axes: usize,
    c: T,
    lam: Vec<T>,
    sine: Vec<T>,
    b: Vec<C<T>>,
    bhat: Vec<C<T>>,
}

impl<T: Real> FourierSystem<T> {
    pub fn new(n: usize, c: T, b: &[C<T>]) -> Result<Self> {
        Self::multidim(n, c, 1, b)
    }

    /// `d_r` axes of `n` qubits each; axis `r` sits on qubits `r·n..(r+1)·n`.
    pub fn multidim(n: usize, c: T, d_r: usize, b: &[C<T>]) -> Result<Self> {
        if d_r == 0 {
            return Err(Error::Config("d_r must be at least 1".into()));
        }
        heat::check_cap(n * d_r)?;
        let lam = heat::multidim_spectrum(n, c, d_r, SpectrumKind::Substituted)?;
        let sine = heat::multidim_spectrum(n, c, d_r, SpectrumKind::Sine)?;
        if b.len() != lam.len() {
            return Err(Error::LengthMismatch { expected: lam.len(), got: b.len() });
        }
        let nb = linalg::norm(b);
        if (nb - T::one()).abs() > T::of(1e-8) {
            return Err(Error::NotNormalized(nb.as_f64()));
        }
        let b = b.to_vec();
        let mut bhat = b.clone();
        qft_axes_in_place(&mut bhat, n, d_r, false);
        Ok(Self { n, axes: d_r, c, lam, sine, b, bhat })
    }

    /// Qubits per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn axes(&self) -> usize {
        self.axes
    }

    pub fn qubits(&self) -> usize {
        self.n * self.axes
    }

    pub fn c(&self) -> T {
        self.c
    }

    pub fn b(&self) -> &[C<T>] {
        &self.b
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.lam
    }

    fn to_fourier(&self, v: &[C<T>]) -> Vec<C<T>> {
        let mut w = v.to_vec();
        qft_axes_in_place(&mut w, self.n, self.axes, false);
        w
    }

    fn from_fourier(&self, v: &[C<T>]) -> Vec<C<T>> {
        let mut w = v.to_vec();
        qft_axes_in_place(&mut w, self.n, self.axes, true);
        w
    }

    /// `A'·x`.
    pub fn apply(&self, x: &[C<T>]) -> Vec<C<T>> {
        let mut w = self.to_fourier(x);
        w.iter_mut().zip(&self.lam).for_each(|(z, &l)| *z = *z * l);
        self.from_fourier(&w)
    }

    pub fn dense_operator(&self) -> Result<DenseOperator<T>> {
        let dim = self.lam.len();
        DenseOperator::from_columns(dim, |j| {
            let mut e = vec![cr(T::zero()); dim];
            e[j] = cr(T::one());
            self.apply(&e)
        })
    }

    fn fourier_solve(&self, eigs: &[T]) -> Result<Vec<C<T>>> {
        let mut w = self.bhat.clone();
        for (z, &l) in w.iter_mut().zip(eigs) {
            if l == T::zero() {
                if z.norm() > T::zero() {
                    return Err(Error::Singular);
                }
            } else {
                *z = *z / l;
            }
        }
        Ok(self.from_fourier(&w))
    }

    /// `A'⁻¹b`.
    pub fn exact_solution(&self) -> Result<Vec<C<T>>> {
        self.fourier_solve(&self.lam)
    }

    /// Solution of the unsubstituted system `A⁻¹b`.
    pub fn sine_solution(&self) -> Result<Vec<C<T>>> {
        self.fourier_solve(&self.sine)
    }

    /// Node state for the reduced Fourier-space word with Z mask `word`.
    pub fn node_state(&self, word: u64) -> Vec<C<T>> {
        let w: Vec<C<T>> = self
            .bhat
            .iter()
            .enumerate()
            .map(|(k, z)| if (k as u64 & word).count_ones() % 2 == 1 { -z } else { *z })
            .collect();
        self.from_fourier(&w)
    }

    /// QFT on every axis.
    pub fn prep_circuit(&self) -> Result<Circuit<T>> {
        let total = self.qubits();
        let mut c = Circuit::new(total);
        for r in 0..self.axes {
            c.extend(&qft_on(total, r * self.n, self.n, false)?)?;
        }
        Ok(c)
    }

    /// Closed-form `⟨i|A'^k|j⟩` for `w_i ⊕ w_j = xor`.
    pub fn overlap_formula(&self, xor: u64, power: u32) -> T {
        self.bhat
            .iter()
            .zip(&self.lam)
            .enumerate()
            .map(|(x, (z, &l))| {
                let s = z.norm_sqr() * l.powi(power as i32);
                if (x as u64 & xor).count_ones() % 2 == 1 {
                    -s
                } else {
                    s
                }
            })
            .sum()
    }
}

/// One Fourier-space generator and its weight in the decomposition of `A'`.
#[derive(Debug, Clone, PartialEq)]
pub struct MenuEntry<T> {
    pub word: PauliWord,
    pub weight: T,
}

/// Generators `{I, Z_i, Z_iZ_j}` available for expanding a node.
#[derive(Debug, Clone)]
pub struct UnitaryMenu<T> {
    pub qubits: usize,
    pub entries: Vec<MenuEntry<T>>,
}

impl<T: Real> UnitaryMenu<T> {
    pub fn substituted(n: usize, c: T) -> Result<Self> {
        multidim_menu(n, c, 1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn masks(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.word.z_mask()).collect()
    }
}

/// Per-axis generators padded with identities; the identity entry carries
/// `d_r·ζ(0) − c`.
pub fn multidim_menu<T: Real>(n: usize, c: T, d_r: usize) -> Result<UnitaryMenu<T>> {
    if d_r == 0 {
        return Err(Error::Config("d_r must be at least 1".into()));
    }
    heat::check_cap(n * d_r)?;
    let total = n * d_r;
    let base = decompose_substituted_fourier(n, T::zero())?;
    let zeta = base.weight_of(&PauliWord::identity(n)).re;
    let mut entries = vec![MenuEntry { word: PauliWord::z_word(total, 0), weight: T::of(d_r as f64) * zeta - c }];
    for r in 0..d_r {
        for t in base.terms() {
            let m = t.word.z_mask();
            if m == 0 || t.weight.norm() == T::zero() {
                continue;
            }
            entries.push(MenuEntry { word: PauliWord::z_word(total, m << (r * n)), weight: t.weight.re });
        }
    }
    entries[1..].sort_by_key(|e| (e.word.z_mask().count_ones(), e.word.z_mask()));
    Ok(UnitaryMenu { qubits: total, entries })
}

/// Counts of logical measurements, following the tree bookkeeping.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MeasurementLedger {
    /// Gram entries `⟨i|A'²|new⟩`, `|S|+1` per extension.
    pub gram: u64,
    /// Right-hand-side entries `⟨new|A'|0⟩`, one per extension.
    pub rhs: u64,
    /// Candidates scored by gradient overlap.
    pub gradient: u64,
    /// Overlaps consumed by those candidates, `|S|+1` each.
    pub gradient_overlaps: u64,
    /// Identity-weight overlaps `⟨j|k⟩` for the norm recovery.
    pub norm: u64,
}

impl MeasurementLedger {
    pub fn total(&self) -> u64 {
        self.gram + self.rhs + self.gradient_overlaps + self.norm
    }
}

/// Hadamard-test source of `⟨i|A'^k|j⟩`. Exact mode memoizes by `(xor, k, part)`.
#[derive(Debug, Clone)]
pub struct OverlapEstimator<T> {
    system: FourierSystem<T>,
    initial: QuantumState<T>,
    prep: Circuit<T>,
    mode: Mode,
    noise: Option<ReadoutNoise>,
    memo: HashMap<(u64, u32, Part), T>,
    issued: u64,
}

impl<T: Real> OverlapEstimator<T> {
    pub fn new(system: FourierSystem<T>, mode: Mode, noise: Option<ReadoutNoise>) -> Result<Self> {
        mode.validate()?;
        let initial = QuantumState::from_amplitudes(system.b.clone())?;
        let prep = system.prep_circuit()?;
        Ok(Self { system, initial, prep, mode, noise, memo: HashMap::new(), issued: 0 })
    }

    pub fn system(&self) -> &FourierSystem<T> {
        &self.system
    }

    fn powers(&self, power: u32) -> Vec<T> {
        self.system.lam.iter().map(|&l| l.powi(power as i32)).collect()
    }

    fn measure(&mut self, xor: u64, power: u32, part: Part) -> Result<T> {
        self.issued += 1;
        let mode = self.mode.reseeded(self.issued);
        if xor == 0 {
            // Diagonal entries need no ancilla: measure Λ^k on QFT|b⟩ directly.
            if part == Part::Im {
                return Ok(T::zero());
            }
            if power == 0 {
                return Ok(T::one());
            }
            let d = self.powers(power);
            return Ok(measure_diagonal(&self.prep, &self.initial, &d, mode)?.value);
        }
        let n = self.system.qubits();
        let mut on_zero = Circuit::new(n);
        for q in 0..n {
            if xor >> q & 1 == 1 {
                on_zero.push(Gate::Z(q))?;
            }
        }
        let mut test = HadamardTest::new(self.initial.clone(), self.prep.clone(), Circuit::new(n), self.powers(power));
        test.on_zero = on_zero;
        test.noise = self.noise;
        Ok(test.estimate(part, mode)?.value)
    }

    /// `⟨i|A'^k|j⟩` with `w_i ⊕ w_j = xor`.
    pub fn overlap(&mut self, xor: u64, power: u32) -> Result<C<T>> {
        let mut part = |p: Part| -> Result<T> {
            if self.mode == Mode::Exact {
                if let Some(&v) = self.memo.get(&(xor, power, p)) {
                    return Ok(v);
                }
                let v = self.measure(xor, power, p)?;
                self.memo.insert((xor, power, p), v);
                Ok(v)
            } else {
                self.measure(xor, power, p)
            }
        };
        let re = part(Part::Re)?;
        let im = part(Part::Im)?;
        Ok(C::new(re, im))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeNode {
    /// Z mask of the reduced Fourier-space word.
    pub word: u64,
    pub order: usize,
}

/// Result of one expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expansion<T> {
    pub word: u64,
    pub gradient: T,
    pub candidates: usize,
    /// Candidates came from the whole active set, not only the last node.
    pub fallback: bool,
}

#[derive(Debug, Clone)]
pub struct AnsatzTree<T> {
    nodes: Vec<TreeNode>,
    alpha: Vec<C<T>>,
    gram: Vec<Vec<C<T>>>,
    rhs: Vec<C<T>>,
    loss_trace: Vec<T>,
    singular: bool,
    ledger: MeasurementLedger,
    estimator: OverlapEstimator<T>,
    menu: UnitaryMenu<T>,
}

impl<T: Real> AnsatzTree<T> {
    /// Tree holding only the root `|b⟩`, with its weight solved.
    pub fn new(estimator: OverlapEstimator<T>, menu: UnitaryMenu<T>) -> Result<Self> {
        if menu.qubits != estimator.system.qubits() {
            return Err(Error::LengthMismatch { expected: estimator.system.qubits(), got: menu.qubits });
        }
        let mut tree = Self {
            nodes: Vec::new(),
            alpha: Vec::new(),
            gram: Vec::new(),
            rhs: Vec::new(),
            loss_trace: Vec::new(),
            singular: false,
            ledger: MeasurementLedger::default(),
            estimator,
            menu,
        };
        tree.gram_extend(0)?;
        let loss = tree.solve_alpha()?;
        tree.loss_trace.push(loss);
        Ok(tree)
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn words(&self) -> Vec<u64> {
        self.nodes.iter().map(|n| n.word).collect()
    }

    pub fn depth(&self) -> usize {
        self.nodes.len()
    }

    pub fn alpha(&self) -> &[C<T>] {
        &self.alpha
    }

    pub fn rhs(&self) -> &[C<T>] {
        &self.rhs
    }

    pub fn loss_trace(&self) -> &[T] {
        &self.loss_trace
    }

    /// Last weight solve fell back to the minimum-norm solution.
    pub fn singular(&self) -> bool {
        self.singular
    }

    pub fn ledger(&self) -> MeasurementLedger {
        self.ledger
    }

    pub fn system(&self) -> &FourierSystem<T> {
        &self.estimator.system
    }

    pub fn menu(&self) -> &UnitaryMenu<T> {
        &self.menu
    }

    pub fn gram(&self) -> Result<DenseOperator<T>> {
        DenseOperator::from_entries(self.nodes.len(), self.gram.iter().flatten().copied().collect())
    }

    /// Adds `word` to the active set and measures only the new Gram row and
    /// right-hand-side entry.
    pub fn gram_extend(&mut self, word: u64) -> Result<()> {
        if self.nodes.iter().any(|n| n.word == word) {
            return Err(Error::DuplicateNode);
        }
        let mut col = Vec::with_capacity(self.nodes.len() + 1);
        for node in &self.nodes {
            // ⟨i|A'²|new⟩
            col.push(self.estimator.overlap(node.word ^ word, 2)?);
        }
        let diag = self.estimator.overlap(0, 2)?;
        col.push(C::new(diag.re, T::zero()));
        let v = self.estimator.overlap(word, 1)?;
        self.ledger.gram += self.nodes.len() as u64 + 1;
        self.ledger.rhs += 1;
        for (row, z) in self.gram.iter_mut().zip(&col) {
            row.push(*z);
        }
        self.gram.push(col.iter().map(|z| z.conj()).collect());
        self.rhs.push(v);
        self.nodes.push(TreeNode { word, order: self.nodes.len() });
        Ok(())
    }

    /// Minimizes the cached quadratic loss over `α`; no simulator calls.
    pub fn solve_alpha(&mut self) -> Result<T> {
        let m = self.gram()?;
        let sol = hermitian_psd_solve(&m, &self.rhs)?;
        self.alpha = sol.x;
        self.singular = sol.singular;
        Ok(self.loss_of(&self.alpha))
    }

    /// `α†Mα − 2Re(α†v) + 1` from cached quantities.
    pub fn loss_of(&self, alpha: &[C<T>]) -> T {
        let mut quad = C::new(T::zero(), T::zero());
        for (i, ai) in alpha.iter().enumerate() {
            for (j, aj) in alpha.iter().enumerate() {
                quad += ai.conj() * self.gram[i][j] * aj;
            }
        }
        let lin = linalg::inner(alpha, &self.rhs).re;
        quad.re - T::of(2.0) * lin + T::one()
    }

    /// `x = Σ α_j |j⟩` assembled classically.
    pub fn solution(&self) -> Vec<C<T>> {
        let sys = &self.estimator.system;
        let mut xhat = vec![cr(T::zero()); sys.bhat.len()];
        for (node, a) in self.nodes.iter().zip(&self.alpha) {
            for (k, (o, z)) in xhat.iter_mut().zip(&sys.bhat).enumerate() {
                let s = if (k as u64 & node.word).count_ones() % 2 == 1 { -*z } else { *z };
                *o += s * a;
            }
        }
        sys.from_fourier(&xhat)
    }

    /// Fidelity of the current `x` against `A'⁻¹b`.
    pub fn fidelity(&self) -> Result<T> {
        linalg::fidelity(&self.estimator.system.exact_solution()?, &self.solution())
    }

    /// Fidelity of the current `x` against the unsubstituted `A⁻¹b`.
    pub fn sine_fidelity(&self) -> Result<T> {
        linalg::fidelity(&self.estimator.system.sine_solution()?, &self.solution())
    }

    /// `g = 2Σ_j α_j⟨c|A'²|j⟩ − 2⟨c|A'|0⟩`.
    pub fn gradient_overlap(&mut self, word: u64) -> Result<C<T>> {
        let two = T::of(2.0);
        let mut g = C::new(T::zero(), T::zero());
        for (node, a) in self.nodes.iter().zip(&self.alpha) {
            g += self.estimator.overlap(word ^ node.word, 2)? * a * two;
        }
        g -= self.estimator.overlap(word, 1)? * two;
        self.ledger.gradient += 1;
        self.ledger.gradient_overlaps += self.nodes.len() as u64 + 1;
        Ok(g)
    }

    /// Children of the last node not yet in the active set, in menu order;
    /// when all are duplicates, children of every node in insertion order.
    pub fn candidates(&self) -> (Vec<u64>, bool) {
        let present: HashSet<u64> = self.nodes.iter().map(|n| n.word).collect();
        let masks = self.menu.masks();
        let collect = |parents: &[TreeNode]| {
            let mut seen = HashSet::new();
            let mut out = Vec::new();
            for p in parents {
                for m in &masks {
                    let w = p.word ^ m;
                    if !present.contains(&w) && seen.insert(w) {
                        out.push(w);
                    }
                }
            }
            out
        };
        let last = self.nodes.last().copied().into_iter().collect::<Vec<_>>();
        let direct = collect(&last);
        if !direct.is_empty() {
            return (direct, false);
        }
        (collect(&self.nodes), true)
    }

    /// Adds the candidate with the largest `|g|` (earliest on ties) and re-solves `α`.
    pub fn expand_step(&mut self) -> Result<Expansion<T>> {
        let (cands, fallback) = self.candidates();
        if cands.is_empty() {
            return Err(Error::NoCandidates);
        }
        let mut best: Option<(u64, T)> = None;
        for &w in &cands {
            let g = self.gradient_overlap(w)?.norm();
            let better = match best {
                None => true,
                Some((_, b)) => g > b + T::of(1e-12) * b.max(T::one()),
            };
            if better {
                best = Some((w, g));
            }
        }
        let (word, gradient) = best.expect("nonempty candidates");
        self.gram_extend(word)?;
        let loss = self.solve_alpha()?;
        self.loss_trace.push(loss);
        Ok(Expansion { word, gradient, candidates: cands.len(), fallback })
    }

    /// `‖x‖` from `α` and the identity-weight overlaps `⟨j|k⟩`.
    pub fn solution_norm(&mut self) -> Result<T> {
        let words = self.words();
        let mut acc = C::new(T::zero(), T::zero());
        for (j, wj) in words.iter().enumerate() {
            for (k, wk) in words.iter().enumerate() {
                let o = self.estimator.overlap(wj ^ wk, 0)?;
                self.ledger.norm += 1;
                acc += self.alpha[j].conj() * o * self.alpha[k];
            }
        }
        Ok(acc.re.max(T::zero()).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    pub target: f64,
    pub max_depth: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        Self { target: 0.99, max_depth: 256 }
    }
}

#[derive(Debug, Clone)]
pub struct AtaRun<T> {
    pub alpha: Vec<C<T>>,
    pub words: Vec<u64>,
    pub x: Vec<C<T>>,
    pub depth: usize,
    pub fidelity: T,
    /// Fidelity against the unsubstituted system.
    pub sine_fidelity: T,
    pub loss: T,
    pub loss_trace: Vec<T>,
    pub fidelity_trace: Vec<T>,
    pub ledger: MeasurementLedger,
    /// Target not reached before the depth cap or the word space ran out.
    pub censored: bool,
}

fn check_c<T: Real>(c: T) -> Result<()> {
    if !(c > T::zero()) {
        return Err(Error::InvalidGridParameter(c.as_f64()));
    }
    Ok(())
}

fn grow<T: Real>(system: &FourierSystem<T>, stop: &StopRule, mode: Mode, noise: Option<ReadoutNoise>) -> Result<AtaRun<T>> {
    check_c(system.c)?;
    let menu = multidim_menu(system.n, system.c, system.axes)?;
    let est = OverlapEstimator::new(system.clone(), mode, noise)?;
    let mut tree = AnsatzTree::new(est, menu)?;
    let mut fidelity_trace = vec![tree.fidelity()?];
    let mut reached = fidelity_trace[0].as_f64() >= stop.target;
    while !reached && tree.depth() < stop.max_depth {
        match tree.expand_step() {
            Ok(_) => {}
            Err(Error::NoCandidates) => break,
            Err(e) => return Err(e),
        }
        let f = tree.fidelity()?;
        fidelity_trace.push(f);
        reached = f.as_f64() >= stop.target;
    }
    Ok(AtaRun {
        alpha: tree.alpha().to_vec(),
        words: tree.words(),
        x: tree.solution(),
        depth: tree.depth(),
        fidelity: *fidelity_trace.last().expect("nonempty"),
        sine_fidelity: tree.sine_fidelity()?,
        loss: *tree.loss_trace().last().expect("nonempty"),
        loss_trace: tree.loss_trace().to_vec(),
        fidelity_trace,
        ledger: tree.ledger(),
        censored: !reached,
    })
}

/// Grows the tree until the fidelity against `A'⁻¹b` reaches the target.
pub fn run<T: Real>(system: &FourierSystem<T>, stop: &StopRule, mode: Mode) -> Result<AtaRun<T>> {
    grow(system, stop, mode, None)
}

/// Exact-mode run where each Hadamard-test ancilla readout is randomized with
/// probability `p`. Diagonal entries use no ancilla and stay ideal.
pub fn run_with_noise<T: Real>(system: &FourierSystem<T>, p: f64, stop: &StopRule) -> Result<AtaRun<T>> {
    let noise = ReadoutNoise::new(p, NoiseScope::AncillaOnly)?;
    grow(system, stop, Mode::Exact, Some(noise))
}

/// Preparation circuit for the normalized solution and the probability of
/// post-selecting the auxiliary register on `|0…0⟩`.
#[derive(Debug, Clone)]
pub struct SolutionCircuit<T> {
    pub circuit: Circuit<T>,
    /// `|b⟩ ⊗ |0…0⟩`.
    pub initial: QuantumState<T>,
    pub aux_qubits: usize,
    pub success_probability: T,
    /// Post-selected, normalized register state.
    pub output: Vec<C<T>>,
}

/// Loads `α` on `⌈log₂ d⌉` auxiliary qubits, applies the word selected by the
/// auxiliary register between two Fourier transforms, and unloads with
/// Hadamards.
pub fn prepare_solution_circuit<T: Real>(system: &FourierSystem<T>, alpha: &[C<T>], words: &[u64]) -> Result<SolutionCircuit<T>> {
    let d = words.len();
    if d == 0 {
        return Err(Error::EmptyTree);
    }
    if alpha.len() != d {
        return Err(Error::LengthMismatch { expected: d, got: alpha.len() });
    }
    let n = system.qubits();
    let a = (usize::BITS - (d - 1).leading_zeros()) as usize;
    let total = n + a;
    let aux: Vec<usize> = (n..total).collect();
    let mut circuit = Circuit::new(total);
    if a > 0 {
        for g in amplitude_loading(alpha, &aux)? {
            circuit.push(g)?;
        }
    }
    for r in 0..system.axes {
        circuit.extend(&qft_on(total, r * system.n, system.n, false)?)?;
    }
    for (j, &w) in words.iter().enumerate() {
        let controls: Vec<(usize, bool)> = aux.iter().enumerate().map(|(bit, &q)| (q, j >> bit & 1 == 1)).collect();
        for q in 0..n {
            if w >> q & 1 == 1 {
                let z = Gate::Z(q);
                circuit.push(if controls.is_empty() { z } else { Gate::Controlled { controls: controls.clone(), gate: Box::new(z) } })?;
            }
        }
    }
    for r in 0..system.axes {
        circuit.extend(&qft_on(total, r * system.n, system.n, true)?)?;
    }
    for &q in &aux {
        circuit.push(Gate::H(q))?;
    }
    let initial = QuantumState::from_amplitudes(system.b.clone())?.extend_zero(a);
    let out = circuit.run(&initial)?;
    let reg = &out.amplitudes()[..1 << n];
    let success = reg.iter().map(|z| z.norm_sqr()).sum::<T>();
    let output = if a == 0 {
        // No post-selection: the global phase of α₀ is unobservable.
        reg.to_vec()
    } else {
        linalg::normalized(reg)?
    };
    Ok(SolutionCircuit { circuit, initial, aux_qubits: a, success_probability: success, output })
}

/// Time-step solver backed by the ansatz tree on the substituted system.
#[derive(Debug, Clone, Copy)]
pub struct AtaSolver {
    pub stop: StopRule,
    pub mode: Mode,
}

impl<T: Real> LinearSolver<T> for AtaSolver {
    fn name(&self) -> &str {
        "ata"
    }

    fn solve(&mut self, grid: &GridParams<T>, b_hat: &[C<T>]) -> Result<Solution<T>> {
        let system = FourierSystem::new(grid.n, grid.c, b_hat)?;
        let out = run(&system, &self.stop, self.mode)?;
        Ok(Solution { x: out.x, normalized: false })
    }
}
