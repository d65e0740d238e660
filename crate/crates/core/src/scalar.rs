//! Real scalar abstraction. Every routine in the crate works over
//! `Complex<T>` for some `T: Real` (in practice `f32` or `f64`).

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point real type: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal (tolerances, factors) into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).unwrap_or_else(Self::infinity)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for a complex scalar over `T`.
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub(crate) fn cone<T: Real>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

#[inline]
pub(crate) fn is_finite<T: Real>(z: C<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Integer power by repeated squaring; `z^0 == 1` for every `z`, including zero.
pub(crate) fn cpowu<T: Real>(z: C<T>, mut n: u64) -> C<T> {
    let mut base = z;
    let mut acc = cone();
    while n > 0 {
        if n & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        n >>= 1;
    }
    acc
}

/// Relative distance `|a - b| / max(1, |a|, |b|)`.
pub fn rel_diff<T: Real>(a: C<T>, b: C<T>) -> T {
    let scale = T::one().max(a.norm()).max(b.norm());
    (a - b).norm() / scale
}
