//! Periodic 1-D heat equation: the implicit-step linear system, its spectra,
//! reference solvers, the time-stepping driver and the error models.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{apply_fourier_diagonal, iqft_in_place, qft, qft_in_place};
use crate::linalg::{self, DenseOperator};
use crate::scalar::{cr, Real, C};

/// Default largest dense dimension, as a qubit count (2¹² per side).
pub const DEFAULT_CAP_QUBITS: usize = 12;

/// Dense-operator cap in qubits, overridable with `HEATVQE_CAP_QUBITS`.
pub fn dense_cap_qubits() -> usize {
    std::env::var("HEATVQE_CAP_QUBITS")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_CAP_QUBITS)
}

pub fn check_cap(qubits: usize) -> Result<()> {
    let cap = dense_cap_qubits();
    if qubits > cap {
        return Err(Error::CapExceeded { qubits, cap });
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewQubits { n, min: 2 });
    }
    if n >= usize::BITS as usize - 1 {
        return Err(Error::CapExceeded { qubits: n, cap: usize::BITS as usize - 2 });
    }
    Ok(())
}

fn check_c<T: Real>(c: T) -> Result<()> {
    if !(c >= T::zero()) || !c.is_finite() {
        return Err(Error::InvalidGridParameter(c.as_f64()));
    }
    Ok(())
}

/// Grid of the implicit scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridParams<T> {
    pub n: usize,
    pub c: T,
    pub n_tau: usize,
    pub dz: T,
    pub dt: T,
    pub a2: T,
}

impl<T: Real> GridParams<T> {
    /// Builds the grid from physical step sizes; `c` is derived.
    pub fn from_steps(n: usize, n_tau: usize, dz: T, dt: T, a2: T) -> Result<Self> {
        let c = dz * dz / (a2 * dt);
        let g = Self { n, c, n_tau, dz, dt, a2 };
        g.validate()?;
        Ok(g)
    }

    /// Unit domain and unit diffusivity, with `dt` chosen to hit `c`.
    pub fn from_c(n: usize, c: T, n_tau: usize) -> Result<Self> {
        check_n(n)?;
        check_c(c)?;
        let dz = T::one() / T::of((1usize << n) as f64);
        let dt = if c > T::zero() { dz * dz / c } else { T::infinity() };
        let g = Self { n, c, n_tau, dz, dt, a2: T::one() };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        check_n(self.n)?;
        check_c(self.c)?;
        let derived = self.dz * self.dz / (self.a2 * self.dt);
        let tol = T::of(1e-12).max(T::epsilon() * T::of(8.0));
        if (derived - self.c).abs() > tol * self.c.abs().max(T::min_positive_value()) && derived != self.c {
            return Err(Error::InvalidGridParameter(self.c.as_f64()));
        }
        Ok(())
    }

    #[inline]
    pub fn n_z(&self) -> usize {
        1 << self.n
    }
}

/// Boundary conditions; only periodic is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Periodic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatProblem<T> {
    pub grid: GridParams<T>,
    pub chi: Vec<T>,
    /// Source per time layer. Empty means no source; a single layer is reused every step.
    pub f: Vec<Vec<T>>,
    pub boundary: Boundary,
}

#[derive(Serialize, Deserialize)]
struct ProblemDoc {
    n: usize,
    c: f64,
    n_tau: usize,
    #[serde(default)]
    boundary: Boundary,
    chi: Vec<f64>,
    #[serde(default)]
    f: Vec<Vec<f64>>,
}

impl<T: Real> HeatProblem<T> {
    pub fn new(grid: GridParams<T>, chi: Vec<T>, f: Vec<Vec<T>>) -> Result<Self> {
        grid.validate()?;
        let nz = grid.n_z();
        if chi.len() != nz {
            return Err(Error::LengthMismatch { expected: nz, got: chi.len() });
        }
        if let Some(bad) = f.iter().find(|layer| layer.len() != nz) {
            return Err(Error::LengthMismatch { expected: nz, got: bad.len() });
        }
        Ok(Self { grid, chi, f, boundary: Boundary::Periodic })
    }

    /// Source at time layer `tau` (zero when absent).
    pub fn source(&self, tau: usize) -> Vec<T> {
        match self.f.len() {
            0 => vec![T::zero(); self.grid.n_z()],
            1 => self.f[0].clone(),
            len => self.f[tau.min(len - 1)].clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = ProblemDoc {
            n: self.grid.n,
            c: self.grid.c.as_f64(),
            n_tau: self.grid.n_tau,
            boundary: self.boundary,
            chi: self.chi.iter().map(|x| x.as_f64()).collect(),
            f: self.f.iter().map(|l| l.iter().map(|x| x.as_f64()).collect()).collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: ProblemDoc = serde_json::from_str(s)?;
        let grid = GridParams::from_c(doc.n, T::of(doc.c), doc.n_tau)?;
        let conv = |v: Vec<f64>| v.into_iter().map(T::of).collect::<Vec<T>>();
        let f = doc.f.into_iter().map(conv).collect();
        Self::new(grid, conv(doc.chi), f)
    }
}

/// Which eigenvalue law a Fourier-diagonal operator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectrumKind {
    /// `−c − 4 sin²(πk/N)`, the finite-difference matrix.
    Sine,
    /// Piecewise quadratic substitute.
    Substituted,
}

impl SpectrumKind {
    pub fn eigenvalues<T: Real>(self, n: usize, c: T) -> Result<Vec<T>> {
        match self {
            SpectrumKind::Sine => spectrum(n, c),
            SpectrumKind::Substituted => substituted_spectrum(n, c),
        }
    }
}

/// Circulant `A(c)`: diagonal `−2−c`, neighbours and corners `1`.
pub fn build_matrix<T: Real>(n: usize, c: T) -> Result<DenseOperator<T>> {
    check_n(n)?;
    check_c(c)?;
    check_cap(n)?;
    let size = 1usize << n;
    let mut m = DenseOperator::zeros(size);
    for i in 0..size {
        m.set(i, i, cr(-T::of(2.0) - c));
        m.set(i, (i + 1) % size, cr(T::one()));
        m.set(i, (i + size - 1) % size, cr(T::one()));
    }
    m.refresh_hermitian();
    Ok(m)
}

pub fn spectrum<T: Real>(n: usize, c: T) -> Result<Vec<T>> {
    check_n(n)?;
    check_c(c)?;
    let size = T::of((1usize << n) as f64);
    Ok((0..1usize << n)
        .map(|k| {
            let s = (T::PI() * T::of(k as f64) / size).sin();
            -c - T::of(4.0) * s * s
        })
        .collect())
}

/// `λ'_k = −c − π²(|k/2ⁿ⁻¹ − 1| − 1)²`.
pub fn substituted_spectrum<T: Real>(n: usize, c: T) -> Result<Vec<T>> {
    check_n(n)?;
    check_c(c)?;
    let half = T::of((1usize << (n - 1)) as f64);
    let pi2 = T::PI() * T::PI();
    Ok((0..1usize << n)
        .map(|k| {
            let u = (T::of(k as f64) / half - T::one()).abs() - T::one();
            -c - pi2 * u * u
        })
        .collect())
}

/// Same spectrum built by shifting the sine spectrum by `N/2`, replacing it
/// with its quadratic expansion about the maximum, and shifting back.
pub fn substituted_spectrum_via_shift<T: Real>(n: usize, c: T) -> Result<Vec<T>> {
    check_n(n)?;
    check_c(c)?;
    let size = 1usize << n;
    let nf = T::of(size as f64);
    let expanded: Vec<T> = (0..size)
        .map(|k| {
            let d = T::PI() * T::of(k as f64) / nf - T::FRAC_PI_2();
            -c - T::of(4.0) * d * d
        })
        .collect();
    Ok((0..size).map(|k| expanded[(k + size / 2) % size]).collect())
}

/// `QFT†·diag(λ)·QFT` assembled column by column.
pub fn fourier_diagonal_operator<T: Real>(eigs: &[T]) -> Result<DenseOperator<T>> {
    let size = eigs.len();
    let mut m = DenseOperator::from_columns(size, |j| {
        let mut e = vec![cr(T::zero()); size];
        e[j] = cr(T::one());
        apply_fourier_diagonal(&e, eigs)
    })?;
    m.refresh_hermitian();
    Ok(m)
}

pub fn build_substituted_matrix<T: Real>(n: usize, c: T) -> Result<DenseOperator<T>> {
    check_cap(n)?;
    fourier_diagonal_operator(&substituted_spectrum(n, c)?)
}

/// `κ = (c+4)/c`; `c = 0` is reported as divergent.
pub fn condition_number<T: Real>(c: T) -> Result<T> {
    check_c(c)?;
    if c == T::zero() {
        return Err(Error::DivergentConditionNumber);
    }
    Ok((c + T::of(4.0)) / c)
}

/// Right-hand side of one implicit step, `b_i = −(f_i + U_i/dt)·dz²/a2`.
///
/// The minus sign makes the spatial mean a conserved quantity of `A x = b`.
pub fn build_rhs<T: Real>(u_prev: &[T], f: &[T], grid: &GridParams<T>) -> Result<Vec<T>> {
    let nz = grid.n_z();
    for len in [u_prev.len(), f.len()] {
        if len != nz {
            return Err(Error::LengthMismatch { expected: nz, got: len });
        }
    }
    let k = grid.dz * grid.dz / grid.a2;
    Ok(u_prev
        .iter()
        .zip(f)
        .map(|(&u, &s)| {
            let drift = if grid.dt.is_infinite() { T::zero() } else { u / grid.dt };
            -(s + drift) * k
        })
        .collect())
}

fn build_rhs_complex<T: Real>(u_prev: &[C<T>], f: &[T], grid: &GridParams<T>) -> Vec<C<T>> {
    let k = grid.dz * grid.dz / grid.a2;
    u_prev
        .iter()
        .zip(f)
        .map(|(&u, &s)| {
            let drift = if grid.dt.is_infinite() { cr(T::zero()) } else { u / grid.dt };
            -(drift + s) * k
        })
        .collect()
}

/// Dense LU solve.
pub fn classical_solve<T: Real>(m: &DenseOperator<T>, b: &[C<T>]) -> Result<Vec<C<T>>> {
    linalg::lu_solve(m, b)
}

/// Solves `QFT†·diag(eigs)·QFT x = b` in Fourier space. Zero modes are
/// projected out (pseudo-inverse); a zero mode carrying weight in `b` is singular.
pub fn spectral_solve<T: Real>(eigs: &[T], b: &[C<T>]) -> Result<Vec<C<T>>> {
    if eigs.len() != b.len() {
        return Err(Error::LengthMismatch { expected: eigs.len(), got: b.len() });
    }
    let scale = eigs.iter().fold(T::zero(), |a, &x| a.max(x.abs()));
    let zero_tol = scale * T::epsilon() * T::of(64.0);
    let bnorm = linalg::norm(b);
    let mut w = qft(b);
    for (z, &l) in w.iter_mut().zip(eigs) {
        if l.abs() <= zero_tol {
            if z.norm() > T::of(1e-10).max(T::prune()) * bnorm.max(T::one()) {
                return Err(Error::Singular);
            }
            *z = cr(T::zero());
        } else {
            *z = *z / l;
        }
    }
    iqft_in_place(&mut w);
    Ok(w)
}

/// Kronecker sum of `d_r` copies of `A(0)`, minus `c·I`.
pub fn build_multidim_matrix<T: Real>(n: usize, c: T, d_r: usize) -> Result<DenseOperator<T>> {
    check_n(n)?;
    check_c(c)?;
    if d_r == 0 {
        return Err(Error::Config("d_r must be at least 1".into()));
    }
    check_cap(n * d_r)?;
    let base = build_matrix(n, T::zero())?;
    let side = 1usize << n;
    let mut total = DenseOperator::<T>::zeros(1 << (n * d_r));
    for axis in 0..d_r {
        // Axis 0 sits on the least-significant index bits.
        let high = DenseOperator::<T>::identity(1 << (n * (d_r - 1 - axis)));
        let low = DenseOperator::<T>::identity(1 << (n * axis));
        let term = high.kron(&base).kron(&low);
        total = total.add(&term);
        debug_assert_eq!(base.dim(), side);
    }
    let shift = DenseOperator::<T>::identity(total.dim()).scale(cr(c));
    Ok(total.sub(&shift))
}

/// Multi-dimensional spectrum indexed by the per-axis Fourier labels.
pub fn multidim_spectrum<T: Real>(n: usize, c: T, d_r: usize, kind: SpectrumKind) -> Result<Vec<T>> {
    let base = kind.eigenvalues(n, T::zero())?;
    let side = 1usize << n;
    let mask = side - 1;
    Ok((0..1usize << (n * d_r))
        .map(|idx| (0..d_r).map(|r| base[(idx >> (n * r)) & mask]).sum::<T>() - c)
        .collect())
}

/// Closed form `ε̃·√(((cκ)^{2N}−1)/((cκ)²−1))`.
pub fn error_accumulation<T: Real>(eps_tilde: T, c: T, n_tau: usize) -> Result<T> {
    if !(eps_tilde > T::zero()) {
        return Err(Error::Config("eps_tilde must be positive".into()));
    }
    let ck = c * condition_number(c)?;
    let q = ck * ck;
    let ratio = (q.powi(n_tau as i32) - T::one()) / (q - T::one());
    Ok(eps_tilde * ratio.sqrt())
}

/// Step recursion `ε_k² = ε̃² + (cκ ε_{k−1})²`, `ε_0 = 0`.
pub fn error_accumulation_recursive<T: Real>(eps_tilde: T, c: T, n_tau: usize) -> Result<T> {
    if !(eps_tilde > T::zero()) {
        return Err(Error::Config("eps_tilde must be positive".into()));
    }
    let ck = c * condition_number(c)?;
    let mut eps = T::zero();
    for _ in 0..n_tau {
        eps = (eps_tilde * eps_tilde + ck * ck * eps * eps).sqrt();
    }
    Ok(eps)
}

/// Output of a linear solver for one time step.
#[derive(Debug, Clone)]
pub struct Solution<T> {
    pub x: Vec<C<T>>,
    /// The solver only knows `x` up to scale (a normalized quantum state).
    pub normalized: bool,
}

/// Anything that can solve the step system for a unit-norm right-hand side.
pub trait LinearSolver<T: Real> {
    fn name(&self) -> &str;
    fn solve(&mut self, grid: &GridParams<T>, b_hat: &[C<T>]) -> Result<Solution<T>>;
}

/// Exact Fourier-space solver.
#[derive(Debug, Clone, Copy)]
pub struct OracleSolver {
    pub kind: SpectrumKind,
}

impl<T: Real> LinearSolver<T> for OracleSolver {
    fn name(&self) -> &str {
        "oracle"
    }

    fn solve(&mut self, grid: &GridParams<T>, b_hat: &[C<T>]) -> Result<Solution<T>> {
        let eigs = self.kind.eigenvalues(grid.n, grid.c)?;
        Ok(Solution { x: spectral_solve(&eigs, b_hat)?, normalized: false })
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionReport<T> {
    /// `U⁰..U^{n_tau}` produced by the solver.
    pub trajectory: Vec<Vec<C<T>>>,
    /// Reference trajectory from the exact solver.
    pub reference: Vec<Vec<C<T>>>,
    /// `ε_i = 1 − |x_i†x̃_i|²` on normalized vectors, `ε_0 = 0`.
    pub infidelity: Vec<T>,
    /// Steps `i+1` with `ε_i > 1e-12` and `ε_{i+1} > (5+c)·ε_i`.
    pub bound_violations: Vec<usize>,
}

/// Rescales a normalized solution by the least-squares factor `⟨Ax,b⟩/‖Ax‖²`.
fn rescale<T: Real>(x: &[C<T>], b: &[C<T>], eigs: &[T]) -> Vec<C<T>> {
    let ax = apply_fourier_diagonal(x, eigs);
    let den = ax.iter().map(|z| z.norm_sqr()).sum::<T>();
    if den == T::zero() {
        return x.to_vec();
    }
    let s = linalg::inner(&ax, b) / den;
    x.iter().map(|z| z * s).collect()
}

/// Runs `n_tau` implicit steps with `solver`, tracking infidelity against the
/// exact solution of the system with spectrum `reference`.
pub fn time_step_evolve<T: Real, S: LinearSolver<T> + ?Sized>(
    problem: &HeatProblem<T>,
    solver: &mut S,
    n_tau: usize,
    reference: SpectrumKind,
) -> Result<EvolutionReport<T>> {
    let grid = problem.grid;
    if grid.c <= T::zero() {
        return Err(Error::InvalidGridParameter(grid.c.as_f64()));
    }
    let eigs = reference.eigenvalues(grid.n, grid.c)?;
    let start: Vec<C<T>> = problem.chi.iter().map(|&x| cr(x)).collect();
    let mut traj = vec![start.clone()];
    let mut refr = vec![start];
    let mut eps = vec![T::zero()];
    for step in 1..=n_tau {
        let f = problem.source(step - 1);
        // Reference trajectory: exact solve from the exact previous layer.
        let b_ref = build_rhs_complex(refr.last().expect("nonempty"), &f, &grid);
        let x_ref = spectral_solve(&eigs, &b_ref)?;
        // Solver trajectory: inherits its own previous output.
        let b = build_rhs_complex(traj.last().expect("nonempty"), &f, &grid);
        let bn = linalg::norm(&b);
        let x = if bn == T::zero() {
            vec![cr(T::zero()); b.len()]
        } else {
            let b_hat: Vec<C<T>> = b.iter().map(|z| z / bn).collect();
            let sol = solver
                .solve(&grid, &b_hat)
                .map_err(|e| Error::StepFailed { step, reason: e.to_string() })?;
            if sol.x.len() != b.len() {
                return Err(Error::StepFailed {
                    step,
                    reason: format!("solver returned {} amplitudes, expected {}", sol.x.len(), b.len()),
                });
            }
            let x = if sol.normalized { rescale(&sol.x, &b_hat, &eigs) } else { sol.x };
            x.into_iter().map(|z| z * bn).collect()
        };
        let e = match linalg::fidelity(&x_ref, &x) {
            Ok(f) => (T::one() - f).max(T::zero()),
            Err(_) => {
                if linalg::norm(&x_ref) == linalg::norm(&x) {
                    T::zero()
                } else {
                    T::one()
                }
            }
        };
        eps.push(e);
        traj.push(x);
        refr.push(x_ref);
    }
    let factor = T::of(5.0) + grid.c;
    let tiny = T::of(1e-12);
    let bound_violations = (1..eps.len())
        .filter(|&i| eps[i - 1] > tiny && eps[i] > factor * eps[i - 1])
        .collect();
    Ok(EvolutionReport { trajectory: traj, reference: refr, infidelity: eps, bound_violations })
}

/// Writes a trajectory as CSV rows `step,index,value` (real parts).
pub fn write_trajectory_csv<T: Real, W: Write>(out: W, trajectory: &[Vec<C<T>>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "index", "value"])?;
    for (step, layer) in trajectory.iter().enumerate() {
        for (i, z) in layer.iter().enumerate() {
            w.write_record([step.to_string(), i.to_string(), format!("{:e}", z.re.as_f64())])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Applies `A(c)` to `x` in `O(N)` without forming the matrix.
pub fn apply_matrix<T: Real>(c: T, x: &[C<T>]) -> Vec<C<T>> {
    let size = x.len();
    (0..size)
        .map(|i| x[(i + 1) % size] + x[(i + size - 1) % size] - x[i] * (T::of(2.0) + c))
        .collect()
}

/// Fourier-space coefficients of `b`, i.e. `QFT·b`.
pub fn fourier_coefficients<T: Real>(b: &[C<T>]) -> Vec<C<T>> {
    let mut v = b.to_vec();
    qft_in_place(&mut v);
    v
}
