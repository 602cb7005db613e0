//! Scalar abstraction shared by every numerical module.
//!
//! All core math is written against [`Real`], implemented for `f32` and `f64`.
//! Complex amplitudes are `num_complex::Complex<T>`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar usable by the simulator and the solvers.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Threshold below which a decomposition weight counts as zero.
    const PRUNE: f64;

    /// Converts an `f64` literal.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }

    #[inline]
    fn prune() -> Self {
        Self::of(Self::PRUNE)
    }
}

impl Real for f64 {
    const PRUNE: f64 = 1e-12;
}

impl Real for f32 {
    const PRUNE: f64 = 1e-5;
}

/// Complex amplitude over a [`Real`] scalar.
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn cr<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub(crate) fn cis<T: Real>(phase: T) -> C<T> {
    Complex::new(phase.cos(), phase.sin())
}
