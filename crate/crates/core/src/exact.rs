//! Serialisation of exact rationals as `{num, den, value}`.
//!
//! Numerators and denominators are written as strings so big values survive
//! JSON readers that only have doubles.

use std::fmt::Display;

use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::ser::SerializeStruct;
use serde::Serializer;

pub fn ratio_value<T: Clone + num_integer::Integer + ToPrimitive>(r: &Ratio<T>) -> f64 {
    let (a, b) = (r.numer().to_f64(), r.denom().to_f64());
    match (a, b) {
        (Some(a), Some(b)) => a / b,
        _ => f64::NAN,
    }
}

pub fn serialize_ratio<T, S>(r: &Ratio<T>, ser: S) -> Result<S::Ok, S::Error>
where
    T: Clone + num_integer::Integer + ToPrimitive + Display,
    S: Serializer,
{
    let mut st = ser.serialize_struct("Rational", 3)?;
    st.serialize_field("num", &r.numer().to_string())?;
    st.serialize_field("den", &r.denom().to_string())?;
    st.serialize_field("value", &ratio_value(r))?;
    st.end()
}
