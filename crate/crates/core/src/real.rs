//! Generic scalar for the floating-point layer.
//!
//! The exact layer (digit algebra, language) works over `BigRational`; the
//! thermodynamic layer is generic over any IEEE-style float.

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("f64 conversion")
    }
    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize conversion")
    }
    fn from_u32_lossy(v: u32) -> Self {
        Self::from_u32(v).expect("u32 conversion")
    }
    fn from_i64_lossy(v: i64) -> Self {
        Self::from_i64(v).expect("i64 conversion")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// log(sum exp(x_i)) with the usual max shift.
pub fn log_sum_exp<F: Real>(values: &[F]) -> F {
    let m = values
        .iter()
        .cloned()
        .fold(F::neg_infinity(), |a, b| if b > a { b } else { a });
    if m == F::neg_infinity() {
        return m;
    }
    let s: F = values.iter().map(|&v| (v - m).exp()).sum();
    m + s.ln()
}

/// In-place pairwise log-add: log(exp(a) + exp(b)).
pub fn log_add<F: Real>(a: F, b: F) -> F {
    if a == F::neg_infinity() {
        return b;
    }
    if b == F::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sum_exp_matches_direct() {
        let xs = [0.0f64, 1.0, -2.0, 3.5];
        let direct: f64 = xs.iter().map(|x| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(&xs) - direct).abs() < 1e-12);
    }

    #[test]
    fn log_sum_exp_handles_large_exponents() {
        let xs = [1000.0f64, 1000.0];
        assert!((log_sum_exp(&xs) - (1000.0 + std::f64::consts::LN_2)).abs() < 1e-9);
    }

    #[test]
    fn log_add_empty_side() {
        assert_eq!(log_add(f64::NEG_INFINITY, 2.0), 2.0);
        assert!((log_add(0.0f64, 0.0) - std::f64::consts::LN_2).abs() < 1e-12);
    }
}
