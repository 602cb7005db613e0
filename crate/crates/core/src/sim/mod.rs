//! Statevector simulator.

use std::cell::Cell;

pub mod circuit;
pub mod gate;
pub mod hadamard;
pub mod measure;
pub mod noise;
pub mod param;
pub mod prep;
pub mod state;

pub use circuit::{iqft_circuit, qft_circuit, qft_on, Circuit};
pub use gate::{Gate, GateDoc};
pub use hadamard::{hadamard_test, Estimate, HadamardTest, Mode, Part};
pub use measure::{expectation_diagonal, sample, sampled_expectation};
pub use noise::{apply_depolarizing, NoiseScope, ReadoutNoise};
pub use param::{ParamOp, ParametricCircuit};
pub use state::QuantumState;

thread_local! {
    static RUNS: Cell<u64> = const { Cell::new(0) };
}

pub(crate) fn count_run() {
    RUNS.with(|r| r.set(r.get() + 1));
}

/// Measured circuit executions issued on the current thread.
pub fn simulator_runs() -> u64 {
    RUNS.with(|r| r.get())
}

/// Runs `circuit` on `initial` and averages `values` over the measured
/// outcomes; counts as one simulator run.
pub fn measure_diagonal<T: crate::scalar::Real>(
    circuit: &Circuit<T>,
    initial: &QuantumState<T>,
    values: &[T],
    mode: Mode,
) -> crate::error::Result<Estimate<T>> {
    mode.validate()?;
    let out = circuit.run(initial)?;
    count_run();
    match mode {
        Mode::Exact => Ok(Estimate { value: expectation_diagonal(&out, values)?, std_err: T::zero() }),
        Mode::Shots { shots, seed } => {
            let (value, std_err) = sampled_expectation(&out, values, shots, seed)?;
            Ok(Estimate { value, std_err })
        }
    }
}
