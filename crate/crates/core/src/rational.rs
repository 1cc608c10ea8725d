//! Big rational helpers shared by the exact modules.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

#[inline]
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[inline]
pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[inline]
pub fn rat_big(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// Floor of a rational number.
pub fn floor(q: &Rational) -> BigInt {
    q.floor().to_integer()
}

/// Sign of a rational as -1, 0, 1.
pub fn sgn(q: &Rational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

/// Rational power with integer exponent (negative allowed for non-zero base).
pub fn pow_i(q: &Rational, e: i32) -> Rational {
    if e >= 0 {
        num_traits::pow(q.clone(), e as usize)
    } else {
        num_traits::pow(q.recip(), (-e) as usize)
    }
}

/// Splits `n > 0` as `t^2 * m` with `m` squarefree; returns `(t, m)`.
pub fn square_free_split(mut n: u64) -> (u64, u64) {
    assert!(n > 0, "square_free_split of zero");
    let mut t = 1u64;
    let mut m = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            t *= p;
        }
        if e % 2 == 1 {
            m *= p;
        }
        p += 1;
    }
    m *= n;
    (t, m)
}
