//! Hadamard-test variational solver.
//!
//! In Fourier space the system operator is diagonal, `A = QFT†·D·QFT`, so for
//! `x = U(θ)|b⟩`, `φ = QFT·x` and `b_f = QFT·b` the loss
//! `⟨φ|D²|φ⟩ − (Re⟨φ|D|b_f⟩)² − (Im⟨φ|D|b_f⟩)²` equals `⟨x|A†(I − |b⟩⟨b|)A|x⟩`
//! and needs three circuit runs: one plain, two Hadamard tests.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::apply_fourier_diagonal;
use crate::heat::{self, SpectrumKind};
use crate::linalg;
use crate::optim::{lbfgs, LbfgsConfig};
use crate::scalar::{Real, C};
use crate::seeds;
use crate::sim::{
    measure_diagonal, qft_circuit, Circuit, Gate, HadamardTest, Mode, ParametricCircuit, Part, QuantumState,
};

pub use crate::linalg::fidelity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnsatzKind {
    /// `Ry`+`Rz` on every qubit, then a linear CNOT chain.
    Hea,
    /// `Ry` layer, even `Rzz` bricks, `Rx` layer, odd `Rzz` bricks.
    Cba,
    /// `Ry` layer, a ring of `Rzz` couplings sharing one angle, `Rx` layer.
    Daa,
}

impl fmt::Display for AnsatzKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnsatzKind::Hea => "hea",
            AnsatzKind::Cba => "cba",
            AnsatzKind::Daa => "daa",
        })
    }
}

impl FromStr for AnsatzKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hea" => Ok(AnsatzKind::Hea),
            "cba" => Ok(AnsatzKind::Cba),
            "daa" => Ok(AnsatzKind::Daa),
            other => Err(Error::Config(format!("unknown ansatz '{other}' (expected hea, cba or daa)"))),
        }
    }
}

/// Parameters per layer.
pub fn params_per_layer(kind: AnsatzKind, n: usize) -> usize {
    match kind {
        AnsatzKind::Hea => 2 * n,
        AnsatzKind::Cba => 3 * n - 1,
        AnsatzKind::Daa => 2 * n + 1,
    }
}

pub fn parameter_count(kind: AnsatzKind, n: usize, layers: usize) -> usize {
    params_per_layer(kind, n) * layers
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzSpec<T> {
    pub kind: AnsatzKind,
    pub n: usize,
    pub layers: usize,
    pub theta: Vec<T>,
}

impl<T: Real> AnsatzSpec<T> {
    pub fn zeros(kind: AnsatzKind, n: usize, layers: usize) -> Self {
        Self { kind, n, layers, theta: vec![T::zero(); parameter_count(kind, n, layers)] }
    }

    /// Parameterized circuit; parameters are laid out layer by layer.
    pub fn parametric(&self) -> Result<ParametricCircuit<T>> {
        parametric_ansatz(self.kind, self.n, self.layers)
    }

    pub fn circuit(&self) -> Result<Circuit<T>> {
        self.parametric()?.bind(&self.theta)
    }
}

pub fn parametric_ansatz<T: Real>(kind: AnsatzKind, n: usize, layers: usize) -> Result<ParametricCircuit<T>> {
    if n < 2 {
        return Err(Error::TooFewQubits { n, min: 2 });
    }
    let z = T::zero();
    let mut pc = ParametricCircuit::new(n);
    let mut p = 0usize;
    let mut next = || {
        p += 1;
        p - 1
    };
    for _ in 0..layers {
        match kind {
            AnsatzKind::Hea => {
                for q in 0..n {
                    pc.bound(Gate::Ry(q, z), next())?;
                    pc.bound(Gate::Rz(q, z), next())?;
                }
                for q in 0..n - 1 {
                    pc.fixed(Gate::Cnot { control: q, target: q + 1 })?;
                }
            }
            AnsatzKind::Cba => {
                for q in 0..n {
                    pc.bound(Gate::Ry(q, z), next())?;
                }
                for q in (0..n - 1).step_by(2) {
                    pc.bound(Gate::Rzz(q, q + 1, z), next())?;
                }
                for q in 0..n {
                    pc.bound(Gate::Rx(q, z), next())?;
                }
                for q in (1..n - 1).step_by(2) {
                    pc.bound(Gate::Rzz(q, q + 1, z), next())?;
                }
            }
            AnsatzKind::Daa => {
                for q in 0..n {
                    pc.bound(Gate::Ry(q, z), next())?;
                }
                let shared = next();
                for q in 0..n {
                    let (a, b) = (q, (q + 1) % n);
                    if a == b {
                        continue;
                    }
                    pc.bound(Gate::Rzz(a.min(b), a.max(b), z), shared)?;
                }
                for q in 0..n {
                    pc.bound(Gate::Rx(q, z), next())?;
                }
            }
        }
    }
    pc.reserve_params(parameter_count(kind, n, layers));
    Ok(pc)
}

pub fn ansatz_circuit<T: Real>(spec: &AnsatzSpec<T>) -> Result<Circuit<T>> {
    spec.circuit()
}

/// Right-hand side and Fourier-diagonal operator of one solve.
#[derive(Debug, Clone)]
pub struct HadamardProblem<T> {
    pub b: Vec<C<T>>,
    /// Diagonal of `QFT·A·QFT†`.
    pub eigs: Vec<T>,
    /// `A⁻¹b` (pseudo-inverse on zero modes).
    pub solution: Vec<C<T>>,
    ab: Vec<C<T>>,
}

impl<T: Real> HadamardProblem<T> {
    pub fn new(b: &[C<T>], eigs: Vec<T>) -> Result<Self> {
        if b.len() != eigs.len() {
            return Err(Error::LengthMismatch { expected: eigs.len(), got: b.len() });
        }
        let norm = linalg::norm(b);
        if (norm - T::one()).abs() > T::of(1e-10).max(T::prune()) {
            return Err(Error::NotNormalized(norm.as_f64()));
        }
        let solution = heat::spectral_solve(&eigs, b)?;
        let ab = apply_fourier_diagonal(b, &eigs);
        Ok(Self { b: b.to_vec(), eigs, solution, ab })
    }

    pub fn heat(n: usize, c: T, kind: SpectrumKind, b: &[C<T>]) -> Result<Self> {
        Self::new(b, kind.eigenvalues(n, c)?)
    }

    pub fn n(&self) -> usize {
        self.b.len().trailing_zeros() as usize
    }

    fn apply_a(&self, v: &[C<T>]) -> Vec<C<T>> {
        apply_fourier_diagonal(v, &self.eigs)
    }

    /// `H x = A²x − A|b⟩⟨b|A x`.
    pub fn apply_hamiltonian(&self, x: &[C<T>]) -> Vec<C<T>> {
        let ax = self.apply_a(x);
        let aax = self.apply_a(&ax);
        let proj = linalg::inner(&self.ab, x);
        aax.iter().zip(&self.ab).map(|(u, v)| u - v * proj).collect()
    }

    /// `⟨x|H|x⟩/⟨x|x⟩` evaluated densely.
    pub fn dense_loss(&self, x: &[C<T>]) -> T {
        linalg::inner(x, &self.apply_hamiltonian(x)).re / linalg::inner(x, x).re
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HadamardLossBreakdown<T> {
    pub quad: T,
    pub re: T,
    pub im: T,
    pub total: T,
    /// Standard error of `total` by first-order propagation (zero when exact).
    pub std_err: T,
}

/// Loss from three circuit runs: `U` then QFT measured against `D²`, and the
/// real and imaginary Hadamard tests with `U` on the controlled branch.
pub fn loss<T: Real>(spec: &AnsatzSpec<T>, problem: &HadamardProblem<T>, mode: Mode) -> Result<HadamardLossBreakdown<T>> {
    let n = problem.n();
    if spec.n != n {
        return Err(Error::LengthMismatch { expected: n, got: spec.n });
    }
    let u = spec.circuit()?;
    let qft = qft_circuit::<T>(n);
    let initial = QuantumState::from_amplitudes(problem.b.clone())?;
    let mut plain = u.clone();
    plain.extend(&qft)?;
    let d2: Vec<T> = problem.eigs.iter().map(|&l| l * l).collect();
    let quad = measure_diagonal(&plain, &initial, &d2, mode.reseeded(0))?;
    let mut test = HadamardTest::new(initial, Circuit::new(n), u, problem.eigs.clone());
    test.common = qft;
    let re = test.estimate(Part::Re, mode.reseeded(1))?;
    let im = test.estimate(Part::Im, mode.reseeded(2))?;
    let total = quad.value - re.value * re.value - im.value * im.value;
    let two = T::of(2.0);
    let var = quad.std_err * quad.std_err
        + (two * re.value * re.std_err).powi(2)
        + (two * im.value * im.std_err).powi(2);
    Ok(HadamardLossBreakdown { quad: quad.value, re: re.value, im: im.value, total, std_err: var.sqrt() })
}

#[derive(Debug, Clone)]
pub struct HadamardFit<T> {
    pub theta: Vec<T>,
    pub x: Vec<C<T>>,
    pub loss: T,
    pub fidelity: T,
    pub converged: bool,
    pub evals: usize,
}

/// Optimizer settings for the Hadamard-test solver.
#[derive(Debug, Clone, Copy)]
pub struct HadamardOptions {
    pub lbfgs: LbfgsConfig,
    /// Scale of the random kick given to freshly added layer parameters.
    pub kick: f64,
}

impl Default for HadamardOptions {
    fn default() -> Self {
        Self { lbfgs: LbfgsConfig { max_iters: 3000, g_tol: 1e-10, f_tol: 1e-15, ..Default::default() }, kick: 1e-2 }
    }
}

fn evaluate<T: Real>(pc: &ParametricCircuit<T>, problem: &HadamardProblem<T>, theta: &[T]) -> (Vec<C<T>>, T, T) {
    let mut x = problem.b.clone();
    pc.apply(theta, &mut x).expect("parameter count fixed by the ansatz");
    let l = problem.dense_loss(&x);
    let f = linalg::fidelity(&x, &problem.solution).unwrap_or(T::zero());
    (x, l, f)
}

/// Minimizes the loss from `spec.theta` with adjoint gradients.
pub fn minimize<T: Real>(spec: &AnsatzSpec<T>, problem: &HadamardProblem<T>, opts: &HadamardOptions) -> Result<HadamardFit<T>> {
    let pc = spec.parametric()?;
    if spec.theta.len() != pc.n_params() {
        return Err(Error::LengthMismatch { expected: pc.n_params(), got: spec.theta.len() });
    }
    let fg = |th: &[T]| {
        pc.expectation_and_gradient(th, &problem.b, |v| problem.apply_hamiltonian(v))
            .expect("parameter count fixed by the ansatz")
    };
    let r = lbfgs(fg, &spec.theta, &opts.lbfgs);
    let (x, l, f) = evaluate(&pc, problem, &r.x);
    Ok(HadamardFit { theta: r.x, x, loss: l, fidelity: f, converged: r.converged, evals: r.evals })
}

/// Outcome of the layer-scaling search for one `(kind, n, c)`.
#[derive(Debug, Clone)]
pub struct LayersResult {
    pub kind: AnsatzKind,
    pub n: usize,
    pub c: f64,
    /// Smallest `M` whose sample-mean fidelity reaches the target.
    pub m_star: Option<usize>,
    pub mean_fidelity: f64,
    pub censored: bool,
    /// Per-sample smallest `M` reaching the target (cap + 1 when never reached).
    pub per_sample_m: Vec<usize>,
    /// Sample-mean fidelity at each `M = 0, 1, …` explored (may run past `M*`).
    pub mean_by_layers: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct LayersConfig {
    pub target: f64,
    pub samples: usize,
    pub cap: usize,
    pub seed: u64,
    pub options: HadamardOptions,
}

impl Default for LayersConfig {
    fn default() -> Self {
        Self { target: 0.99, samples: 20, cap: 64, seed: 0, options: HadamardOptions::default() }
    }
}

/// Grows every sample's ansatz one layer at a time, warm-starting from the
/// previous optimum padded with a small kick on the new parameters; samples
/// still below target also get one uniformly random start. The best of those
/// fits and the padded previous optimum is kept, so each sample's loss is
/// non-increasing in `M`. Growth continues past `M*` until every sample has
/// reached the target or the cap.
pub fn layers_to_fidelity(kind: AnsatzKind, n: usize, c: f64, cfg: &LayersConfig) -> Result<LayersResult> {
    if n < 2 {
        return Err(Error::TooFewQubits { n, min: 2 });
    }
    heat::check_cap(n)?;
    let problems: Vec<HadamardProblem<f64>> = (0..cfg.samples)
        .map(|s| {
            let mut rng = seeds::rng(seeds::derive(cfg.seed, "hadamard-b", s as u64));
            let b = seeds::random_complex_b::<f64, _>(1 << n, &mut rng);
            HadamardProblem::heat(n, c, SpectrumKind::Sine, &b)
        })
        .collect::<Result<_>>()?;
    let mut state: Vec<(Vec<f64>, f64, f64)> = problems
        .iter()
        .map(|p| {
            let f = linalg::fidelity(&p.b, &p.solution).unwrap_or(0.0);
            (Vec::new(), p.dense_loss(&p.b), f)
        })
        .collect();
    let mut per_sample_m = vec![cfg.cap + 1; cfg.samples];
    let mut mean_by_layers = Vec::new();
    let mut m_star = None;
    let mut mean = 0.0;
    for layers in 0..=cfg.cap {
        if layers > 0 {
            state = state
                .into_par_iter()
                .zip(problems.par_iter())
                .enumerate()
                .map(|(s, ((theta, prev_loss, prev_fid), problem))| {
                    let mut rng = seeds::rng(seeds::derive(cfg.seed, "hadamard-kick", (s * 1000 + layers) as u64));
                    let mut padded = theta.clone();
                    padded.resize(parameter_count(kind, n, layers), 0.0);
                    let mut kicked = theta.clone();
                    let extra = parameter_count(kind, n, layers) - theta.len();
                    kicked.extend((0..extra).map(|_| cfg.options.kick * (rng.random::<f64>() * 2.0 - 1.0)));
                    let mut best = (padded, prev_loss, prev_fid);
                    let mut starts = vec![kicked];
                    if prev_fid < cfg.target {
                        let count = parameter_count(kind, n, layers);
                        starts.push((0..count).map(|_| std::f64::consts::PI * (rng.random::<f64>() * 2.0 - 1.0)).collect());
                    }
                    for theta in starts {
                        let spec = AnsatzSpec { kind, n, layers, theta };
                        if let Ok(fit) = minimize(&spec, problem, &cfg.options) {
                            if fit.loss <= best.1 {
                                best = (fit.theta, fit.loss, fit.fidelity);
                            }
                        }
                    }
                    best
                })
                .collect();
        }
        for (s, st) in state.iter().enumerate() {
            if st.2 >= cfg.target && per_sample_m[s] > cfg.cap {
                per_sample_m[s] = layers;
            }
        }
        mean = state.iter().map(|s| s.2).sum::<f64>() / cfg.samples as f64;
        mean_by_layers.push(mean);
        if mean >= cfg.target && m_star.is_none() {
            m_star = Some(layers);
        }
        if m_star.is_some() && per_sample_m.iter().all(|&m| m <= cfg.cap) {
            break;
        }
    }
    Ok(LayersResult {
        kind,
        n,
        c,
        m_star,
        mean_fidelity: m_star.map_or(mean, |m| mean_by_layers[m]),
        censored: m_star.is_none(),
        per_sample_m,
        mean_by_layers,
    })
}

/// CSV rows `ansatz,n,c,M_star,mean_fidelity,censored`.
pub fn write_layers_csv<W: Write>(out: W, rows: &[LayersResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["ansatz", "n", "c", "M_star", "mean_fidelity", "censored"])?;
    for r in rows {
        w.write_record([
            r.kind.to_string(),
            r.n.to_string(),
            format!("{}", r.c),
            r.m_star.map_or_else(String::new, |m| m.to_string()),
            format!("{:.12}", r.mean_fidelity),
            r.censored.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
