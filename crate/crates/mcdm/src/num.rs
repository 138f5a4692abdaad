//! Scalar abstraction for the numeric core.
//!
//! Every computation in this crate is generic over a floating-point scalar,
//! so the same engine runs on `f32` or `f64`. The crate root exports `f64`
//! aliases for the common case.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};
use serde::{de::DeserializeOwned, Serialize};

/// Floating-point scalar the decision mathematics is generic over. The
/// serde bounds let every table and report type serialize without
/// repeating where clauses at each call site.
pub trait Real:
    Float + FromPrimitive + Debug + Display + Serialize + DeserializeOwned + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` constant into the working scalar type.
pub(crate) fn cast<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("constant representable in the scalar type")
}

/// Lossy view of a scalar as `f64`, used for diagnostics only.
pub(crate) fn as_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
