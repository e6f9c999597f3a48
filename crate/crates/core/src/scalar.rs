//! Scalar abstraction shared by every numeric module.
//!
//! All state, channel and entropy code is written against [`Real`], so the
//! same algorithms run in `f64` (the reference precision, whose tolerances
//! are the ones quoted throughout the docs) and in `f32`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type usable as the real part of amplitudes.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Hermiticity, trace and Kraus-completeness tolerance.
    fn herm_tol() -> Self;
    /// Lowest eigenvalue accepted as positive semidefinite.
    fn psd_tol() -> Self;
    /// Eigenvalues at or below this are dropped from entropy sums.
    fn eig_cutoff() -> Self;

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn herm_tol() -> Self {
        1e-12
    }
    fn psd_tol() -> Self {
        1e-10
    }
    fn eig_cutoff() -> Self {
        1e-14
    }
}

impl Real for f32 {
    fn herm_tol() -> Self {
        2e-5
    }
    fn psd_tol() -> Self {
        1e-4
    }
    fn eig_cutoff() -> Self {
        1e-7
    }
}

/// Complex amplitude over a [`Real`].
pub type C<T> = Complex<T>;

#[inline]
pub fn c<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(T::lit(re), T::lit(im))
}

#[inline]
pub fn re<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

/// Base-two logarithm term `-x log2 x`, with `0 log 0 = 0`.
#[inline]
pub fn xlog2x_neg<T: Real>(x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else {
        -x * x.log2()
    }
}

/// Binary entropy in bits.
pub fn binary_entropy<T: Real>(x: T) -> T {
    xlog2x_neg(x) + xlog2x_neg(T::one() - x)
}
