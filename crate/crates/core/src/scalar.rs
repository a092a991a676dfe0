//! Scalar abstraction for the deterministic numerical kernels.

use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar accepted by the quadrature, saddlepoint and tail kernels.
///
/// Implemented for `f32` and `f64`. Probabilistic parts of the crate
/// (channels, Monte Carlo drivers) work in `f64` only.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal, which is always representable (possibly rounded).
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count.
    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    /// `ln(1 + e^x)` without overflow.
    #[inline]
    fn softplus(self) -> Self {
        if self > Self::zero() {
            self + (-self).exp().ln_1p()
        } else {
            self.exp().ln_1p()
        }
    }

    /// Logistic function `1 / (1 + e^{-x})`.
    #[inline]
    fn logistic(self) -> Self {
        if self >= Self::zero() {
            Self::one() / (Self::one() + (-self).exp())
        } else {
            let e = self.exp();
            e / (Self::one() + e)
        }
    }

    /// `ln(e^a + e^b)`.
    #[inline]
    fn log_add_exp(self, other: Self) -> Self {
        let (hi, lo) = if self >= other { (self, other) } else { (other, self) };
        if hi == Self::neg_infinity() {
            return hi;
        }
        hi + (lo - hi).exp().ln_1p()
    }

    /// Tolerance floor used where an absolute target is requested below the
    /// resolution of the type.
    #[inline]
    fn tol_floor(requested: f64) -> Self {
        Self::lit(requested).max(Self::epsilon() * Self::lit(64.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}
