use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Scalar coordinate type: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
}

/// Lossy conversion from `f64`; every `Scalar` admits one.
#[inline]
pub(crate) fn from_f64<S: Scalar>(x: f64) -> S {
    S::from_f64(x).expect("f64 converts into any Scalar")
}
