//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point scalar the library computes with (`f32` or `f64`).
///
/// Besides the usual float operations, each implementation fixes the
/// relative tolerance used by every "equal up to rounding" comparison
/// (weight-class checks, tie-breaks, floors of near-integers).
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Relative tolerance for comparisons.
    fn rel_tol() -> Self;

    /// Lossy conversion from `f64`; used for constants.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable in scalar type")
    }

    fn of_u64(n: u64) -> Self {
        Self::from_u64(n).expect("integer representable in scalar type")
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    /// `2^x`.
    fn pow2(x: Self) -> Self {
        Self::two().powf(x)
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn rel_tol() -> Self {
        1e-12
    }
}

impl Real for f32 {
    fn rel_tol() -> Self {
        1e-5
    }
}

/// `a <= b` up to the scalar's relative tolerance.
pub fn le_tol<S: Real>(a: S, b: S) -> bool {
    if a <= b {
        return true;
    }
    if b.is_infinite() || a.is_infinite() {
        return false;
    }
    let scale = a.abs().max(b.abs()).max(S::min_positive_value());
    a - b <= S::rel_tol() * scale
}

/// `a >= b` up to tolerance.
pub fn ge_tol<S: Real>(a: S, b: S) -> bool {
    le_tol(b, a)
}

/// `a == b` up to tolerance.
pub fn eq_tol<S: Real>(a: S, b: S) -> bool {
    le_tol(a, b) && le_tol(b, a)
}

/// `a < b` beyond tolerance.
pub fn lt_strict<S: Real>(a: S, b: S) -> bool {
    !le_tol(b, a)
}

/// Floor of a non-negative value that is expected to sit on an integer
/// when computed exactly (e.g. `2^{dj} / φ(2^j)^p` for power weights).
pub fn floor_tol<S: Real>(x: S) -> u128 {
    let bumped = x + x.abs() * S::rel_tol() * S::of(4.0);
    let f = bumped.floor();
    if f <= S::zero() {
        0
    } else {
        f.to_u128().unwrap_or(u128::MAX)
    }
}
