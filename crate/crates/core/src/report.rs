//! Serialization helpers shared by the report types.

use serde::Serializer;

use crate::scalar::Real;

/// Finite values as numbers, infinities as the strings `"inf"` / `"-inf"`,
/// NaN as `null`.
pub fn extended<T: Real, S: Serializer>(x: &T, s: S) -> Result<S::Ok, S::Error> {
    let v = x.as_f64();
    if v.is_finite() {
        s.serialize_f64(v)
    } else if v.is_nan() {
        s.serialize_none()
    } else if v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}
