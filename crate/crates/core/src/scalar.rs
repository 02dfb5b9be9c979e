//! Scalar abstraction for the numeric core.
//!
//! The special-function and quadrature layers are generic over [`Real`] so
//! they can be instantiated at `f32` or `f64`. The surface/convolution
//! machinery above them works at the crate-level [`Scalar`] alias.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Shorthand for lossless-enough conversion from `f64` literals.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 conversion")
    }

    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize conversion")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Default working precision for the lab.
pub type Scalar = f64;
