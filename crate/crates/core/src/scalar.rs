//! Scalar abstractions shared by every numeric kernel in the crate.
//!
//! Anything that only needs ordered field arithmetic (isotonic pooling, MTD
//! search, interval classification) is written against [`Scalar`], which
//! `f32`, `f64` and the exact [`Rational`](crate::Rational) all satisfy.
//! Kernels that need logarithms or powers (the power model, golden-section
//! search) require [`Real`].

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

pub trait Scalar: Num + Copy + PartialOrd + ToPrimitive + Debug + Send + Sync + 'static {
    /// `|self - other|` without requiring a signed `abs`.
    #[inline]
    fn distance(self, other: Self) -> Self {
        if self >= other {
            self - other
        } else {
            other - self
        }
    }

    /// Lossy conversion used for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
impl Scalar for Ratio<i64> {}

/// Floating-point scalars.
pub trait Real: Scalar + Float + FromPrimitive {
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Index of the first minimum of `key` over `items`; ties go to the lower index.
pub(crate) fn argmin_by<T, S: Scalar>(items: impl IntoIterator<Item = T>, key: impl Fn(T) -> S) -> Option<usize> {
    let mut best: Option<(usize, S)> = None;
    for (i, item) in items.into_iter().enumerate() {
        let k = key(item);
        match best {
            Some((_, b)) if !(k < b) => {}
            _ => best = Some((i, k)),
        }
    }
    best.map(|(i, _)| i)
}
