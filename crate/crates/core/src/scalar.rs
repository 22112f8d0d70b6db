//! Scalars for densities, probability masses and moments.
//!
//! Every probabilistic quantity in the crate is computed generically over
//! [`Scalar`], so the same code yields exact rationals (for identities that
//! must hold on the nose) or floats (for rendering and quick estimates).

use std::fmt::Debug;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed + FromPrimitive {
    fn from_ratio(num: &BigInt, den: &BigInt) -> Self;

    fn to_f64(&self) -> f64;

    fn from_biguint(n: &BigUint) -> Self {
        Self::from_ratio(&BigInt::from(n.clone()), &BigInt::one())
    }

    fn from_count(n: u64) -> Self {
        <Self as FromPrimitive>::from_u64(n).expect("u64 is representable")
    }

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_ratio(&BigInt::from(num), &BigInt::from(den))
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
        BigRational::new(num.clone(), den.clone())
    }

    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }
}

impl Scalar for f64 {
    fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
        ratio_to_f64(&BigRational::new(num.clone(), den.clone()))
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
        ratio_to_f64(&BigRational::new(num.clone(), den.clone())) as f32
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

/// Converts without overflowing when numerator and denominator are huge.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // shift both down to a comparable scale first
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = (nb.max(db) - 900).max(0) as usize;
    let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
    if d == 0.0 {
        if n == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(n)
        }
    } else {
        n / d
    }
}

/// `base^exp` for a possibly negative integer exponent.
pub fn powi<S: Scalar>(base: &S, exp: i64) -> S {
    let pos = num_traits::pow(base.clone(), exp.unsigned_abs() as usize);
    if exp >= 0 {
        pos
    } else {
        S::one() / pos
    }
}

/// Renders `r` rounded half-up to `digits` decimal places, computed exactly.
pub fn format_fixed(r: &BigRational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let negative = r.is_negative();
    let a = r.abs();
    let scaled: BigInt = (a.numer() * &scale * 2 + a.denom()) / (a.denom() * 2);
    let int_part = &scaled / &scale;
    let frac_part = &scaled % &scale;
    let mut out = String::new();
    if negative && !scaled.is_zero() {
        out.push('-');
    }
    out.push_str(&int_part.to_string());
    if digits > 0 {
        out.push('.');
        let frac = frac_part.to_string();
        for _ in frac.len()..digits as usize {
            out.push('0');
        }
        out.push_str(&frac);
    }
    out
}

/// `"num/den"` in lowest terms, or just `"num"` for integers.
pub fn format_ratio(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_rendering_rounds_exactly() {
        let r = BigRational::new(BigInt::from(1), BigInt::from(3));
        assert_eq!(format_fixed(&r, 12), "0.333333333333");
        let r = BigRational::new(BigInt::from(2), BigInt::from(3));
        assert_eq!(format_fixed(&r, 4), "0.6667");
        let r = BigRational::new(BigInt::from(-21), BigInt::from(64));
        assert_eq!(format_fixed(&r, 6), "-0.328125");
        assert_eq!(format_fixed(&BigRational::zero(), 2), "0.00");
    }

    #[test]
    fn huge_ratios_convert() {
        let big = BigInt::from(7u32).pow(2000);
        let r = BigRational::new(big.clone() * 3, big * 4);
        assert!((ratio_to_f64(&r) - 0.75).abs() < 1e-15);
        let tiny = BigRational::new(BigInt::one(), BigInt::from(2u32).pow(1200));
        assert_eq!(ratio_to_f64(&tiny), 0.0);
    }

    #[test]
    fn generic_powers() {
        assert_eq!(powi(&BigRational::from_count(2), -3), BigRational::ratio(1, 8));
        assert_eq!(powi(&2.0f64, 3), 8.0);
        assert_eq!(format_ratio(&BigRational::ratio(6, 4)), "3/2");
        assert_eq!(format_ratio(&BigRational::ratio(4, 2)), "2");
    }
}
