//! Exact rational helpers shared by the analytic modules.

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Edge weight: an exact fraction in (0, 1].
pub type Weight = Ratio<u64>;

/// Numeric field the transition kernel is generic over. Implemented for `f64`
/// (simulation) and [`BigRational`] (exact oracle).
pub trait Scalar: Num + Clone + PartialOrd + std::fmt::Debug {
    fn from_weight(w: &Weight) -> Self;
    fn from_usize(n: usize) -> Self;
}

impl Scalar for f64 {
    fn from_weight(w: &Weight) -> Self {
        *w.numer() as f64 / *w.denom() as f64
    }
    fn from_usize(n: usize) -> Self {
        n as f64
    }
}

impl Scalar for BigRational {
    fn from_weight(w: &Weight) -> Self {
        BigRational::new(BigInt::from(*w.numer()), BigInt::from(*w.denom()))
    }
    fn from_usize(n: usize) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
}

/// Exact rational value of a finite `f64`. Fails on NaN and infinities.
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_f64(x)
}

pub fn to_f64(x: &BigRational) -> f64 {
    // `ToPrimitive` on BigRational goes through the float parts and keeps
    // full precision for the magnitudes used here.
    x.to_f64().unwrap_or_else(|| {
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Binomial coefficient with the extended convention used by the train-length
/// sum: `C(n, k) = 0` for `k < 0` and `C(n, 0) = 1` for every integer `n`,
/// including negative `n`. Other negative-`n` entries never occur in that sum
/// and are reported as zero.
pub fn binomial(n: i64, k: i64) -> BigUint {
    if k < 0 {
        return BigUint::zero();
    }
    if k == 0 {
        return BigUint::one();
    }
    if n < 0 || k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn pow(base: &BigRational, exp: u32) -> BigRational {
    num_traits::pow(base.clone(), exp as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_matches_pascal() {
        let mut row = vec![BigUint::one()];
        for n in 1..40i64 {
            let mut next = vec![BigUint::one(); n as usize + 1];
            for k in 1..n as usize {
                next[k] = &row[k - 1] + &row[k];
            }
            row = next;
            for k in 0..=n {
                assert_eq!(binomial(n, k), row[k as usize]);
            }
        }
    }

    #[test]
    fn binomial_conventions() {
        assert_eq!(binomial(-1, 0), BigUint::one());
        assert_eq!(binomial(-1, -1), BigUint::zero());
        assert_eq!(binomial(5, -2), BigUint::zero());
        assert_eq!(binomial(3, 4), BigUint::zero());
        // C(96, 48) overflows u64
        assert_eq!(
            binomial(96, 48).to_string(),
            "6435067013866298908421603100"
        );
    }

    #[test]
    fn exact_float_roundtrip() {
        let x = rational_from_f64(1.1).unwrap();
        assert_eq!(to_f64(&x), 1.1);
        assert!(rational_from_f64(f64::NAN).is_none());
    }
}
