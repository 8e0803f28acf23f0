//! Closed rational intervals `[lo, hi]` with outward arithmetic.
//!
//! Used for root isolation and for bounding polynomial values on a range.
//! All endpoints are exact `BigRational`s; no rounding ever happens, so the
//! usual interval-arithmetic containment guarantees hold with equality-sharp
//! endpoints.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::Result;

/// A closed interval `[lo, hi]` with `lo ≤ hi`, both exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalInterval {
    lo: BigRational,
    hi: BigRational,
}

impl RationalInterval {
    /// A new interval; fails if `lo > hi`.
    pub fn new(lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo > hi {
            return Err(Error::NotIsolating(format!(
                "interval endpoints out of order: {lo} > {hi}"
            )));
        }
        Ok(Self { lo, hi })
    }

    /// The degenerate interval `[r, r]`.
    pub fn point(r: BigRational) -> Self {
        Self { lo: r.clone(), hi: r }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from(BigInt::from(2))
    }

    pub fn contains(&self, r: &BigRational) -> bool {
        &self.lo <= r && r <= &self.hi
    }

    /// Largest absolute value attained on the interval.
    pub fn abs_upper(&self) -> BigRational {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value attained on the interval (zero if it straddles 0).
    pub fn abs_lower(&self) -> BigRational {
        if self.lo.is_negative() && self.hi.is_positive() {
            BigRational::zero()
        } else if self.hi.is_negative() {
            self.hi.abs()
        } else {
            self.lo.clone()
        }
    }

    /// `Some(sign)` if every point of the interval has that strict sign,
    /// `None` if the interval contains zero.
    pub fn definite_sign(&self) -> Option<i8> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let mut lo = products[0].clone();
        let mut hi = products[0].clone();
        for p in &products[1..] {
            if *p < lo {
                lo = p.clone();
            }
            if *p > hi {
                hi = p.clone();
            }
        }
        Self { lo, hi }
    }

    /// Widen both ends outward by `delta ≥ 0`.
    pub fn inflate(&self, delta: &BigRational) -> Self {
        debug_assert!(!delta.is_negative());
        Self {
            lo: &self.lo - delta,
            hi: &self.hi + delta,
        }
    }

    /// Scale by an exact rational (sign-aware).
    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_negative() {
            Self {
                lo: &self.hi * c,
                hi: &self.lo * c,
            }
        } else {
            Self {
                lo: &self.lo * c,
                hi: &self.hi * c,
            }
        }
    }

    /// Translate by an exact rational.
    pub fn translate(&self, c: &BigRational) -> Self {
        Self {
            lo: &self.lo + c,
            hi: &self.hi + c,
        }
    }
}

/// The exact dyadic rational `2^{-k}`.
pub fn two_pow_neg(k: u64) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn interval_basics() {
        let iv = RationalInterval::new(q(1, 1), q(2, 1)).unwrap();
        assert_eq!(iv.width(), q(1, 1));
        assert_eq!(iv.midpoint(), q(3, 2));
        assert!(iv.contains(&q(3, 2)));
        assert!(!iv.contains(&q(5, 2)));
        assert!(RationalInterval::new(q(2, 1), q(1, 1)).is_err());
    }

    #[test]
    fn mul_covers_sign_mixes() {
        let a = RationalInterval::new(q(-1, 1), q(2, 1)).unwrap();
        let b = RationalInterval::new(q(-3, 1), q(1, 2)).unwrap();
        let p = a.mul(&b);
        // Extremes: (-1)·(-3)=3 and 2·(-3)=-6.
        assert_eq!(p.lo(), &q(-6, 1));
        assert_eq!(p.hi(), &q(3, 1));
    }

    #[test]
    fn abs_bounds_and_sign() {
        let straddle = RationalInterval::new(q(-1, 2), q(1, 3)).unwrap();
        assert_eq!(straddle.abs_lower(), q(0, 1));
        assert_eq!(straddle.abs_upper(), q(1, 2));
        assert_eq!(straddle.definite_sign(), None);

        let neg = RationalInterval::new(q(-5, 1), q(-2, 1)).unwrap();
        assert_eq!(neg.abs_lower(), q(2, 1));
        assert_eq!(neg.abs_upper(), q(5, 1));
        assert_eq!(neg.definite_sign(), Some(-1));

        let pos = RationalInterval::new(q(1, 4), q(7, 1)).unwrap();
        assert_eq!(pos.definite_sign(), Some(1));
    }

    #[test]
    fn dyadic_helper() {
        assert_eq!(two_pow_neg(3), BigRational::from_f64(0.125).unwrap());
    }
}
