//! Circuits whose rotation angles are affine in a shared parameter vector,
//! with adjoint-mode gradients of quadratic objectives.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{cr, Real, C};
use crate::sim::circuit::Circuit;
use crate::sim::gate::Gate;

/// A gate whose angle is `scale · θ[param]` when `param` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamOp<T> {
    pub gate: Gate<T>,
    pub param: Option<usize>,
    pub scale: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParametricCircuit<T> {
    n: usize,
    n_params: usize,
    ops: Vec<ParamOp<T>>,
}

impl<T: Real> ParametricCircuit<T> {
    pub fn new(n: usize) -> Self {
        Self { n, n_params: 0, ops: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn ops(&self) -> &[ParamOp<T>] {
        &self.ops
    }

    pub fn fixed(&mut self, gate: Gate<T>) -> Result<()> {
        gate.validate(self.n)?;
        self.ops.push(ParamOp { gate, param: None, scale: T::one() });
        Ok(())
    }

    /// Adds a rotation driven by parameter `param` (which may be shared).
    pub fn bound(&mut self, gate: Gate<T>, param: usize) -> Result<()> {
        gate.validate(self.n)?;
        if gate.angle().is_none() {
            return Err(Error::Config(format!("gate '{}' has no angle to parameterize", gate.kind_name())));
        }
        self.n_params = self.n_params.max(param + 1);
        self.ops.push(ParamOp { gate, param: Some(param), scale: T::one() });
        Ok(())
    }

    /// Allocates a fresh parameter index.
    pub fn next_param(&self) -> usize {
        self.n_params
    }

    /// Ensures at least `count` parameters exist even if some are unused.
    pub fn reserve_params(&mut self, count: usize) {
        self.n_params = self.n_params.max(count);
    }

    fn bind_op(&self, op: &ParamOp<T>, theta: &[T]) -> Gate<T> {
        match op.param {
            Some(p) => op.gate.with_angle(op.scale * theta[p]),
            None => op.gate.clone(),
        }
    }

    pub fn bind(&self, theta: &[T]) -> Result<Circuit<T>> {
        self.check_len(theta)?;
        Circuit::from_gates(self.n, self.ops.iter().map(|op| self.bind_op(op, theta)).collect())
    }

    fn check_len(&self, theta: &[T]) -> Result<()> {
        if theta.len() != self.n_params {
            return Err(Error::LengthMismatch { expected: self.n_params, got: theta.len() });
        }
        Ok(())
    }

    /// Applies `U(θ)` in place.
    pub fn apply(&self, theta: &[T], amps: &mut [C<T>]) -> Result<()> {
        self.check_len(theta)?;
        if amps.len() != 1 << self.n {
            return Err(Error::LengthMismatch { expected: 1 << self.n, got: amps.len() });
        }
        for op in &self.ops {
            self.bind_op(op, theta).apply(amps);
        }
        Ok(())
    }

    /// `E(θ) = Re⟨x|H x⟩` with `x = U(θ)|input⟩`, and `∂E/∂θ` by the adjoint method.
    ///
    /// `h` must apply a hermitian operator.
    pub fn expectation_and_gradient(
        &self,
        theta: &[T],
        input: &[C<T>],
        h: impl Fn(&[C<T>]) -> Vec<C<T>>,
    ) -> Result<(T, Vec<T>)> {
        let mut x = input.to_vec();
        self.apply(theta, &mut x)?;
        let mut lam = h(&x);
        let energy = linalg::inner(&x, &lam).re;
        let mut grad = vec![T::zero(); self.n_params];
        let mut psi = x;
        let mut scratch = vec![cr(T::zero()); psi.len()];
        for op in self.ops.iter().rev() {
            let gate = self.bind_op(op, theta);
            if let Some(p) = op.param {
                // dU/dθ = scale · factor · G · U with G commuting with U.
                scratch.copy_from_slice(&psi);
                let factor = generator(&op.gate, &mut scratch)?;
                let overlap = linalg::inner(&lam, &scratch) * factor * op.scale;
                grad[p] += T::of(2.0) * overlap.re;
            }
            let inv = gate.inverse();
            inv.apply(&mut psi);
            inv.apply(&mut lam);
        }
        Ok((energy, grad))
    }
}

/// Replaces `v` by `G v` and returns `factor` so that `dU/dθ = factor · G · U`.
fn generator<T: Real>(gate: &Gate<T>, v: &mut [C<T>]) -> Result<C<T>> {
    let half = T::of(0.5);
    let mi = Complex::new(T::zero(), -T::one());
    match gate {
        Gate::Rx(q, _) => {
            Gate::X(*q).apply(v);
            Ok(mi * half)
        }
        Gate::Ry(q, _) => {
            Gate::Y(*q).apply(v);
            Ok(mi * half)
        }
        Gate::Rz(q, _) => {
            Gate::Z(*q).apply(v);
            Ok(mi * half)
        }
        Gate::Rzz(p, q, _) => {
            Gate::Z(*p).apply(v);
            Gate::Z(*q).apply(v);
            Ok(mi)
        }
        Gate::CPhase { control, target, .. } => {
            let both = (1usize << control) | (1usize << target);
            for (i, z) in v.iter_mut().enumerate() {
                if i & both != both {
                    *z = cr(T::zero());
                }
            }
            Ok(Complex::i())
        }
        g => Err(Error::Config(format!("no generator for gate '{}'", g.kind_name()))),
    }
}
