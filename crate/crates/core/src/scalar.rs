//! Scalar abstraction shared by the graph, scoring and planning code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type used for logits, edge weights and scores: `f32` or `f64`.
pub trait Scalar: Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static {
    /// Lossless widening used by the text encoders.
    fn to_f64_lossless(self) -> f64 {
        self.to_f64().expect("float to f64")
    }

    /// Nearest representable value of `v`.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 to float")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Formats a real with 17 significant digits; the output parses back to the same bits.
pub fn fmt_real(v: f64) -> String {
    if v == 0.0 {
        // keep the sign of negative zero
        return if v.is_sign_negative() { "-0.0000000000000000e0".into() } else { "0.0000000000000000e0".into() };
    }
    format!("{v:.16e}")
}
