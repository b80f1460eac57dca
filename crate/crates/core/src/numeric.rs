//! Small exact-to-float helpers.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Natural log of a big integer, accurate to a few ulps at any size.
/// Returns `-inf` for zero.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    let top = (x >> shift).to_u64().expect("at most 64 bits remain") as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln C(n, k)` from the exact binomial.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    ln_biguint(&num_integer::binomial(BigUint::from(n), BigUint::from(k)))
}

/// Correctly rounded conversion of an exact rational.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn rational(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rational_from_usize(x: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_of_large_integers() {
        assert_eq!(ln_biguint(&BigUint::from(1u32)), 0.0);
        assert!((ln_biguint(&BigUint::from(6u32)) - 6f64.ln()).abs() < 1e-15);
        let big = BigUint::from(3u32).pow(1000);
        let expected = 1000.0 * 3f64.ln();
        assert!((ln_biguint(&big) - expected).abs() / expected < 1e-14);
        assert!(ln_biguint(&BigUint::zero()).is_infinite());
    }

    #[test]
    fn ln_binomial_small() {
        assert!((ln_binomial(4, 2) - 6f64.ln()).abs() < 1e-15);
        assert_eq!(ln_binomial(5, 0), 0.0);
    }

    #[test]
    fn rational_conversion() {
        assert_eq!(rational_to_f64(&rational(3, 2)), 1.5);
        assert_eq!(rational_to_f64(&rational(-1, 4)), -0.25);
    }
}
