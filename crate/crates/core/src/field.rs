//! Elements of the biquadratic field Q(i, sqrt(m)).
//!
//! A CM point of discriminant `d < 0` lives in `Q(sqrt(d)) = Q(i sqrt(|d|))`, and the raised
//! local polynomials pick up real powers of `v = Im(tau)`, so values are carried in the
//! compositum `Q(i, sqrt|d|)`. The radicand is stored squarefree: `sqrt|d| = t sqrt(m)`.
//! When `|d|` is a square the field collapses to `Q(i)` (radicand 1) and the `sqrt` slots stay
//! zero, which keeps equality decidable.

use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::gauss::GaussRational;
use crate::rational::{rat, square_free_split, to_f64, Rational};

/// `w + x sqrt(m) + y i + z i sqrt(m)`.
#[derive(Clone, Debug)]
pub struct ExactNumber {
    pub w: Rational,
    pub x: Rational,
    pub y: Rational,
    pub z: Rational,
    radicand: u64,
}

impl ExactNumber {
    fn effective_radicand(&self) -> u64 {
        if self.x.is_zero() && self.z.is_zero() {
            1
        } else {
            self.radicand
        }
    }
}

impl PartialEq for ExactNumber {
    fn eq(&self, o: &Self) -> bool {
        self.w == o.w
            && self.x == o.x
            && self.y == o.y
            && self.z == o.z
            && self.effective_radicand() == o.effective_radicand()
    }
}

impl Eq for ExactNumber {}

impl core::hash::Hash for ExactNumber {
    fn hash<H: core::hash::Hasher>(&self, h: &mut H) {
        (&self.w, &self.x, &self.y, &self.z, self.effective_radicand()).hash(h);
    }
}

fn join(a: u64, b: u64) -> u64 {
    match (a, b) {
        (1, r) | (r, 1) => r,
        (r, s) if r == s => r,
        (r, s) => panic!("ExactNumber: mixing fields Q(i, sqrt {r}) and Q(i, sqrt {s})"),
    }
}

impl ExactNumber {
    /// Squarefree radicand `m` of the ambient field (1 means Q(i)).
    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn from_rational(q: Rational) -> Self {
        Self::from_gauss(GaussRational::real(q))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat(n))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_gauss(g: GaussRational) -> Self {
        Self { w: g.re, x: Rational::zero(), y: g.im, z: Rational::zero(), radicand: 1 }
    }

    /// `a + b sqrt(m)` with Gaussian rational `a, b`.
    pub fn from_parts(a: GaussRational, b: GaussRational, radicand: u64) -> Self {
        assert!(radicand > 0);
        let (t, m) = square_free_split(radicand);
        if m == 1 {
            // sqrt(radicand) = t is rational
            let folded = &a + &b.scale(&rat(t as i64));
            return Self::from_gauss(folded);
        }
        let b = b.scale(&rat(t as i64));
        if b.is_zero() {
            return Self::from_gauss(a);
        }
        Self { w: a.re, x: b.re, y: a.im, z: b.im, radicand: m }
    }

    /// `sqrt(n)` for a positive integer `n`.
    pub fn sqrt_int(n: u64) -> Self {
        Self::from_parts(GaussRational::zero(), GaussRational::from_int(1), n)
    }

    pub fn i() -> Self {
        Self::from_gauss(GaussRational::i())
    }

    /// Rational part `a` of `a + b sqrt(m)`.
    pub fn gauss_part(&self) -> GaussRational {
        GaussRational::new(self.w.clone(), self.y.clone())
    }

    /// Coefficient `b` of `sqrt(m)`.
    pub fn sqrt_part(&self) -> GaussRational {
        GaussRational::new(self.x.clone(), self.z.clone())
    }

    fn raw(a: GaussRational, b: GaussRational, m: u64) -> Self {
        if m == 1 || b.is_zero() {
            let a = if m == 1 { &a + &b } else { a };
            return Self::from_gauss(a);
        }
        Self { w: a.re, x: b.re, y: a.im, z: b.im, radicand: m }
    }

    pub fn is_zero(&self) -> bool {
        self.w.is_zero() && self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }

    /// True when the value is a rational number.
    pub fn is_rational(&self) -> bool {
        self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }

    /// True when the value lies in `i Q`.
    pub fn is_i_rational(&self) -> bool {
        self.w.is_zero() && self.x.is_zero() && self.z.is_zero()
    }

    /// Complex conjugation (fixes `sqrt(m)`, sends `i` to `-i`).
    pub fn conj(&self) -> Self {
        Self::raw(self.gauss_part().conj(), self.sqrt_part().conj(), self.radicand)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self::raw(self.gauss_part().scale(q), self.sqrt_part().scale(q), self.radicand)
    }

    pub fn inv(&self) -> Self {
        let a = self.gauss_part();
        let b = self.sqrt_part();
        let m = rat(self.radicand as i64);
        let n = &(&a * &a) - &(&b * &b).scale(&m);
        assert!(!n.is_zero(), "inverse of zero ExactNumber");
        let ni = n.inv();
        Self::raw(&a * &ni, -(&b * &ni), self.radicand)
    }

    pub fn pow(&self, e: i32) -> Self {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }

    /// Floating point embedding `(re, im)`.
    pub fn to_f64(&self) -> (f64, f64) {
        let s = libm::sqrt(self.radicand as f64);
        (to_f64(&self.w) + to_f64(&self.x) * s, to_f64(&self.y) + to_f64(&self.z) * s)
    }

    /// Real and imaginary parts as field elements.
    pub fn re(&self) -> Self {
        Self::raw(
            GaussRational::real(self.w.clone()),
            GaussRational::real(self.x.clone()),
            self.radicand,
        )
    }

    pub fn im(&self) -> Self {
        Self::raw(
            GaussRational::real(self.y.clone()),
            GaussRational::real(self.z.clone()),
            self.radicand,
        )
    }
}

impl<'a> Add<&'a ExactNumber> for &'a ExactNumber {
    type Output = ExactNumber;
    fn add(self, o: &ExactNumber) -> ExactNumber {
        let m = join(self.radicand, o.radicand);
        ExactNumber::raw(
            &self.gauss_part() + &o.gauss_part(),
            &self.sqrt_part() + &o.sqrt_part(),
            m,
        )
    }
}

impl<'a> Sub<&'a ExactNumber> for &'a ExactNumber {
    type Output = ExactNumber;
    fn sub(self, o: &ExactNumber) -> ExactNumber {
        let m = join(self.radicand, o.radicand);
        ExactNumber::raw(
            &self.gauss_part() - &o.gauss_part(),
            &self.sqrt_part() - &o.sqrt_part(),
            m,
        )
    }
}

impl<'a> Mul<&'a ExactNumber> for &'a ExactNumber {
    type Output = ExactNumber;
    fn mul(self, o: &ExactNumber) -> ExactNumber {
        let m = join(self.radicand, o.radicand);
        let (a, b) = (self.gauss_part(), self.sqrt_part());
        let (c, e) = (o.gauss_part(), o.sqrt_part());
        let rational = &(&a * &c) + &(&b * &e).scale(&rat(m as i64));
        let surd = &(&a * &e) + &(&b * &c);
        ExactNumber::raw(rational, surd, m)
    }
}

impl Add for ExactNumber {
    type Output = ExactNumber;
    fn add(self, o: ExactNumber) -> ExactNumber {
        &self + &o
    }
}

impl Sub for ExactNumber {
    type Output = ExactNumber;
    fn sub(self, o: ExactNumber) -> ExactNumber {
        &self - &o
    }
}

impl Mul for ExactNumber {
    type Output = ExactNumber;
    fn mul(self, o: ExactNumber) -> ExactNumber {
        &self * &o
    }
}

impl Neg for ExactNumber {
    type Output = ExactNumber;
    fn neg(self) -> ExactNumber {
        let m = self.radicand;
        ExactNumber::raw(-self.gauss_part(), -self.sqrt_part(), m)
    }
}

impl From<GaussRational> for ExactNumber {
    fn from(g: GaussRational) -> Self {
        ExactNumber::from_gauss(g)
    }
}

impl From<Rational> for ExactNumber {
    fn from(q: Rational) -> Self {
        ExactNumber::from_rational(q)
    }
}

impl fmt::Display for ExactNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = alloc::vec::Vec::new();
        if !self.w.is_zero() {
            parts.push(alloc::format!("{}", self.w));
        }
        if !self.x.is_zero() {
            parts.push(alloc::format!("({})*sqrt({})", self.x, self.radicand));
        }
        if !self.y.is_zero() {
            parts.push(alloc::format!("({})*i", self.y));
        }
        if !self.z.is_zero() {
            parts.push(alloc::format!("({})*i*sqrt({})", self.z, self.radicand));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn sqrt_folds_squares() {
        assert_eq!(ExactNumber::sqrt_int(12), ExactNumber::sqrt_int(3).scale(&rat(2)));
        assert!(ExactNumber::sqrt_int(16).is_rational());
        let s3 = ExactNumber::sqrt_int(3);
        assert_eq!(&s3 * &s3, ExactNumber::from_int(3));
    }

    #[test]
    fn inverse_roundtrip() {
        let a = ExactNumber::from_parts(
            GaussRational::new(frac(1, 2), frac(-3, 7)),
            GaussRational::new(frac(5, 3), rat(2)),
            5,
        );
        assert_eq!(&a * &a.inv(), ExactNumber::one());
    }

    #[test]
    #[should_panic(expected = "mixing fields")]
    fn mixing_fields_panics() {
        let _ = &ExactNumber::sqrt_int(3) + &ExactNumber::sqrt_int(5);
    }

    #[test]
    fn rationals_embed_in_any_field() {
        let s = &ExactNumber::sqrt_int(5) + &ExactNumber::from_int(1);
        assert_eq!(s.to_f64().0, 1.0 + libm::sqrt(5.0));
        let back = &s - &ExactNumber::sqrt_int(5);
        assert_eq!(back, ExactNumber::from_int(1));
    }
}
