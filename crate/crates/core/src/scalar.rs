//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, NumAssign};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Real floating-point scalar: `f32` or `f64`.
///
/// Sampling lives on the trait so generic code does not have to carry
/// `StandardNormal: Distribution<T>` bounds around.
pub trait Real:
    Float + FloatConst + NumAssign + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal or parameter into this scalar.
    fn lit(x: f64) -> Self;

    fn as_f64(self) -> f64;

    /// One draw from N(0, 1).
    fn sample_standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// One draw from U[0, 1).
    fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn lit(x: f64) -> Self {
                x as $t
            }

            #[inline]
            fn as_f64(self) -> f64 {
                self as f64
            }

            #[inline]
            fn sample_standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardNormal.sample(rng)
            }

            #[inline]
            fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rng.random::<$t>()
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Phase of `z`, with the phase of zero defined as 0.
#[inline]
pub fn phase<T: Real>(z: Complex<T>) -> T {
    if z.norm_sqr() == T::zero() {
        T::zero()
    } else {
        z.arg()
    }
}

/// `exp(j * phase(z))` without going through `atan2`; zero maps to 1.
#[inline]
pub fn unit_phasor<T: Real>(z: Complex<T>) -> Complex<T> {
    let r = z.norm();
    if r == T::zero() || !r.is_finite() {
        Complex::new(T::one(), T::zero())
    } else {
        z / r
    }
}

/// Linear power ratio from decibels.
/// `log2(1 + x)`, accurate for small `x`.
pub fn log2_1p<T: Real>(x: T) -> T {
    x.ln_1p() * T::LOG2_E()
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_has_zero_phase() {
        assert_eq!(phase(Complex::new(0.0f64, 0.0)), 0.0);
        assert_eq!(phase(Complex::new(-0.0f64, -0.0)), 0.0);
        assert_eq!(unit_phasor(Complex::new(0.0f64, 0.0)), Complex::new(1.0, 0.0));
    }

    #[test]
    fn unit_phasor_matches_polar_form() {
        let z = Complex::new(-3.0f64, 4.0);
        let u = unit_phasor(z);
        let expected = Complex::from_polar(1.0, z.arg());
        assert!((u - expected).norm() < 1e-15);
    }

    #[test]
    fn db_round_trip() {
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
        assert!((linear_to_db(100.0) - 20.0).abs() < 1e-12);
    }
}
