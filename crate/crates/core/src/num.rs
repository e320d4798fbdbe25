// Copyright 2026 The squeezecool Authors
// SPDX-License-Identifier: Apache-2.0

//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::RealField;
use num_traits::{FloatConst, FromPrimitive, ToPrimitive};

pub use nalgebra::Complex;

/// Real scalar type the simulator can run on (`f32`, `f64`).
///
/// Arithmetic and elementary functions come from [`RealField`]; conversions
/// from literals go through [`FromPrimitive`].
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + FloatConst + Display + LowerExp + Debug + Send + Sync + 'static
{
    /// Smallest tolerance that is meaningful at this precision.
    fn precision_floor() -> Self;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }

    /// `max(x, precision_floor)`, used to keep f64-calibrated tolerances
    /// meaningful on lower precision types.
    #[inline]
    fn tol(x: f64) -> Self {
        let t = Self::lit(x);
        if t < Self::precision_floor() {
            Self::precision_floor()
        } else {
            t
        }
    }
}

impl Real for f32 {
    fn precision_floor() -> Self {
        1e-5
    }
}

impl Real for f64 {
    fn precision_floor() -> Self {
        1e-14
    }
}

#[inline]
pub(crate) fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn cr<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub(crate) fn ci<T: Real>(im: T) -> Complex<T> {
    Complex::new(T::zero(), im)
}

/// Magnitude of a complex number without going through `ComplexField`.
#[inline]
pub(crate) fn cabs<T: Real>(z: Complex<T>) -> T {
    (z.re * z.re + z.im * z.im).sqrt()
}

/// `e^{iθ}`.
#[inline]
pub(crate) fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}
