//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Real floating-point scalar the simulator can run on (`f32` or `f64`).
///
/// Tolerances are part of the scalar because the invariants checked at
/// construction time (unit norm, hermiticity, unitarity) cannot be held to
/// the same absolute precision in single and double precision.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Absolute tolerance for norm, trace, hermiticity and unitarity checks.
    fn tolerance() -> Self;

    /// Floor below which an eigenvalue counts as a genuine negative one.
    fn psd_floor() -> Self;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }
}

impl Real for f64 {
    fn tolerance() -> Self {
        1e-12
    }

    fn psd_floor() -> Self {
        1e-10
    }
}

impl Real for f32 {
    fn tolerance() -> Self {
        1e-5
    }

    fn psd_floor() -> Self {
        1e-4
    }
}

/// Complex amplitude over a [`Real`] scalar.
pub type C<T> = Complex<T>;

pub(crate) fn cr<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

pub(crate) fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Multiplies `z` by the phase that makes the first entry with modulus above
/// `tol` real and positive. Returns the phase factor that was applied.
pub(crate) fn fix_global_phase<T: Real>(z: &mut [C<T>], tol: T) -> C<T> {
    let Some(first) = z.iter().find(|c| c.norm() > tol).copied() else {
        return cr(T::one());
    };
    let phase = first.conj() / first.norm();
    for c in z.iter_mut() {
        *c = *c * phase;
    }
    phase
}
