//! Integral binary quadratic forms `[a, b, c] = a x^2 + b x y + c y^2`.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::CoreError;
use crate::field::ExactNumber;
use crate::gamma::GammaMatrix;
use crate::point::ExactPoint;
use crate::rational::{rat_big, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl QuadForm {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Self {
        Self { a: a.into(), b: b.into(), c: c.into() }
    }

    pub fn disc(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn is_positive_definite(&self) -> bool {
        self.disc().is_negative() && self.a.is_positive()
    }

    fn require_positive_definite(&self) -> Result<(), CoreError> {
        if self.is_positive_definite() {
            Ok(())
        } else {
            Err(CoreError::NotPositiveDefinite(self.to_string()))
        }
    }

    /// `Q(x, y)`.
    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        let (a, b, c) = self.to_f64();
        a * x * x + b * x * y + c * y * y
    }

    pub fn to_f64(&self) -> (f64, f64, f64) {
        let f = |z: &BigInt| z.to_f64().unwrap_or(f64::NAN);
        (f(&self.a), f(&self.b), f(&self.c))
    }

    /// `[a, -b, c]`.
    pub fn conjugate(&self) -> Self {
        Self { a: self.a.clone(), b: -self.b.clone(), c: self.c.clone() }
    }

    pub fn content(&self) -> BigInt {
        self.a.gcd(&self.b).gcd(&self.c)
    }

    /// Right action `(Q . M)(x, y) = Q(a x + b y, c x + d y)`; the CM point moves to
    /// `M^{-1} tau_Q`.
    pub fn act(&self, m: &GammaMatrix) -> Self {
        let (a, b, c, d) = (BigInt::from(m.a), BigInt::from(m.b), BigInt::from(m.c), BigInt::from(m.d));
        let two = BigInt::from(2);
        Self {
            a: self.eval(&a, &c),
            b: &two * &self.a * &a * &b + &self.b * (&a * &d + &b * &c) + &two * &self.c * &c * &d,
            c: self.eval(&b, &d),
        }
    }

    pub fn is_reduced(&self) -> bool {
        let babs = self.b.abs();
        babs <= self.a
            && self.a <= self.c
            && (!(babs == self.a || self.a == self.c) || !self.b.is_negative())
    }

    /// Gauss reduction: the unique reduced form in the class and a matrix `M` with
    /// `self.act(M)` equal to it.
    pub fn reduce(&self) -> Result<(QuadForm, GammaMatrix), CoreError> {
        self.require_positive_definite()?;
        let mut q = self.clone();
        let mut m = GammaMatrix::I;
        loop {
            // bring b into (-a, a]
            let two_a = BigInt::from(2) * &q.a;
            let t = (&q.a - &q.b).div_floor(&two_a);
            if !t.is_zero() {
                let tm = GammaMatrix::translation(t.to_i64().expect("reduction step overflow"));
                q = q.act(&tm);
                m = m.mul(&tm);
            }
            if q.a > q.c || (q.a == q.c && q.b.is_negative()) {
                q = q.act(&GammaMatrix::S);
                m = m.mul(&GammaMatrix::S);
            } else {
                break;
            }
        }
        Ok((q, m))
    }

    pub fn reduced(&self) -> Result<QuadForm, CoreError> {
        self.reduce().map(|(q, _)| q)
    }

    pub fn is_equivalent(&self, other: &QuadForm) -> Result<bool, CoreError> {
        Ok(self.reduced()? == other.reduced()?)
    }

    /// `tau_Q = (-b + i sqrt|d|) / (2a)`, verified to satisfy `Q(tau, 1) = 0`.
    pub fn cm_point(&self) -> Result<ExactPoint, CoreError> {
        self.require_positive_definite()?;
        let two_a = BigInt::from(2) * &self.a;
        let absd = self.disc().abs().to_u64().ok_or(CoreError::InvalidDiscriminant(i64::MIN))?;
        let p = ExactPoint::new(
            Rational::new(-self.b.clone(), two_a.clone()),
            Rational::new(BigInt::one(), two_a),
            absd,
        );
        let t = p.to_exact();
        let val = &(&(&t * &t).scale(&rat_big(self.a.clone())) + &t.scale(&rat_big(self.b.clone())))
            + &ExactNumber::from_rational(rat_big(self.c.clone()));
        assert!(val.is_zero(), "CM point of {self} is not a root");
        Ok(p)
    }

    /// Order of the stabilizer of `Q` in PSL2(Z) by exhaustive search over the matrices
    /// whose columns represent `a` and `c`.
    pub fn stabilizer_order(&self) -> Result<u32, CoreError> {
        let r = self.reduced()?;
        let (a, c) = (r.a.to_i64().unwrap(), r.c.to_i64().unwrap());
        let first = r.representations(a);
        let second = r.representations(c);
        let mut count = 0u32;
        for &(x, z) in &first {
            for &(y, w) in &second {
                if x * w - y * z != 1 {
                    continue;
                }
                let m = GammaMatrix { a: x, b: y, c: z, d: w };
                if r.act(&m) == r {
                    count += 1;
                }
            }
        }
        Ok(count / 2)
    }

    /// The classical rule: 3 on multiples of `[1,1,1]`, 2 on multiples of `[1,0,1]`, else 1.
    pub fn stabilizer_order_rule(&self) -> Result<u32, CoreError> {
        let r = self.reduced()?;
        let g = r.content();
        let p = QuadForm { a: &r.a / &g, b: &r.b / &g, c: &r.c / &g };
        Ok(if p == QuadForm::new(1, 1, 1) {
            3
        } else if p == QuadForm::new(1, 0, 1) {
            2
        } else {
            1
        })
    }

    /// All `(x, y)` with `Q(x, y) = value` (positive definite `Q`).
    pub fn representations(&self, value: i64) -> Vec<(i64, i64)> {
        let (a, b, _) = self.to_f64();
        let absd = -self.disc().to_f64().unwrap();
        let v = value as f64;
        // Q = a (x + b y / 2a)^2 + |d| y^2 / 4a
        let ymax = libm::sqrt(4.0 * a * v / absd).floor() as i64 + 1;
        let target = BigInt::from(value);
        let mut out = Vec::new();
        for y in -ymax..=ymax {
            let centre = -b * y as f64 / (2.0 * a);
            let rad = libm::sqrt(v / a) + 1.0;
            for x in (centre - rad).floor() as i64..=(centre + rad).ceil() as i64 {
                if self.eval(&BigInt::from(x), &BigInt::from(y)) == target {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Forms `[a', b', c']` in the class with `0 < a' <= bound` and `|b'| <= a'`.
    pub fn orbit_forms_bounded(&self, bound: u64) -> Result<Vec<QuadForm>, CoreError> {
        let target = self.reduced()?;
        let d = self.disc();
        let mut out = Vec::new();
        for a in 1..=bound as i64 {
            for b in -a..=a {
                let num = BigInt::from(b * b) - &d;
                let den = BigInt::from(4 * a);
                if !(&num % &den).is_zero() {
                    continue;
                }
                let q = QuadForm::new(a, b, num / den);
                if q.reduced()? == target {
                    out.push(q);
                }
            }
        }
        Ok(out)
    }
}

/// All reduced positive definite forms of discriminant `d` (primitive or not), sorted.
pub fn enumerate_classes(d: i64) -> Result<Vec<QuadForm>, CoreError> {
    if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(CoreError::InvalidDiscriminant(d));
    }
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let q = QuadForm::new(a, b, num / (4 * a));
            if q.is_reduced() {
                out.push(q);
            }
        }
        a += 1;
    }
    out.sort();
    Ok(out)
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.a, self.b, self.c)
    }
}

impl FromStr for QuadForm {
    type Err = CoreError;

    /// Accepts `a,b,c`, optionally wrapped in brackets.
    fn from_str(s: &str) -> Result<Self, CoreError> {
        let t = s.trim().trim_start_matches('[').trim_end_matches(']');
        let parts: Vec<_> = t.split(',').map(|p| p.trim().parse::<BigInt>()).collect();
        match parts.as_slice() {
            [Ok(a), Ok(b), Ok(c)] => Ok(QuadForm::new(a.clone(), b.clone(), c.clone())),
            _ => Err(CoreError::Parse(format!("{s}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, rat};

    fn q(a: i64, b: i64, c: i64) -> QuadForm {
        QuadForm::new(a, b, c)
    }

    #[test]
    fn reduction_examples() {
        let (r, m) = q(1, 1, 1).reduce().unwrap();
        assert_eq!((r, m), (q(1, 1, 1), GammaMatrix::I));
        for (input, want) in [(q(1, 5, 7), q(1, 1, 1)), (q(3, 2, 2), q(2, 2, 3)), (q(7, 23, 19), q(1, 1, 1))] {
            let (r, m) = input.reduce().unwrap();
            assert_eq!(r, want);
            assert_eq!(input.act(&m), r);
        }
        assert!(q(1, 3, 1).reduce().is_err());
    }

    #[test]
    fn classes() {
        assert_eq!(enumerate_classes(-3).unwrap(), [q(1, 1, 1)]);
        assert_eq!(enumerate_classes(-20).unwrap(), [q(1, 0, 5), q(2, 2, 3)]);
        assert_eq!(enumerate_classes(-12).unwrap(), [q(1, 0, 3), q(2, 2, 2)]);
        assert!(enumerate_classes(-5).is_err());
        assert!(enumerate_classes(8).is_err());
    }

    /// Hurwitz class numbers from a brute-force count of reduced forms weighted by
    /// stabilizer orders computed independently.
    #[test]
    fn hurwitz_class_numbers() {
        let want = [(-3, frac(1, 3)), (-4, frac(1, 2)), (-7, rat(1)), (-8, rat(1)), (-11, rat(1)), (-12, frac(4, 3)), (-15, rat(2))];
        for (d, h) in want {
            let sum = enumerate_classes(d)
                .unwrap()
                .iter()
                .fold(Rational::zero(), |acc, f| acc + frac(1, f.stabilizer_order().unwrap() as i64));
            assert_eq!(sum, h, "d = {d}");
        }
    }

    #[test]
    fn stabilizers() {
        for (f, s) in [(q(1, 1, 1), 3), (q(1, 0, 1), 2), (q(1, 0, 5), 1), (q(2, 2, 2), 3), (q(3, 0, 3), 2), (q(2, 2, 3), 1)] {
            assert_eq!(f.stabilizer_order().unwrap(), s, "{f}");
            assert_eq!(f.stabilizer_order_rule().unwrap(), s);
        }
        // non-reduced input
        assert_eq!(q(1, 5, 7).stabilizer_order().unwrap(), 3);
    }

    #[test]
    fn cm_points() {
        let p = q(1, 1, 1).cm_point().unwrap();
        assert_eq!((p.u.clone(), p.v_squared()), (frac(-1, 2), frac(3, 4)));
        let p = q(1, 0, 1).cm_point().unwrap();
        assert_eq!(p, ExactPoint::new_rational(rat(0), rat(1)));
        let p = q(2, 2, 3).cm_point().unwrap();
        assert_eq!((p.u.clone(), p.v_squared()), (frac(-1, 2), frac(5, 4)));
    }

    #[test]
    fn action_moves_cm_point() {
        let f = q(2, 2, 3);
        let m = GammaMatrix::new(2, 1, 5, 3).unwrap();
        assert_eq!(f.act(&m).cm_point().unwrap(), f.cm_point().unwrap().act(&m.inverse()));
    }

    #[test]
    fn orbits() {
        assert_eq!(q(1, 1, 1).orbit_forms_bounded(1).unwrap(), [q(1, -1, 1), q(1, 1, 1)]);
        assert_eq!(q(1, 0, 5).orbit_forms_bounded(1).unwrap(), [q(1, 0, 5)]);
        for a in 1..8 {
            let small = q(2, 2, 3).orbit_forms_bounded(a).unwrap();
            let big = q(2, 2, 3).orbit_forms_bounded(a + 1).unwrap();
            assert!(small.iter().all(|f| big.contains(f)));
        }
    }

    #[test]
    fn parse_print() {
        let f: QuadForm = "1,0,5".parse().unwrap();
        assert_eq!(f, q(1, 0, 5));
        assert_eq!(" [2, 2, 3] ".parse::<QuadForm>().unwrap(), q(2, 2, 3));
        assert_eq!(f.to_string(), "[1,0,5]");
        assert!("1,2".parse::<QuadForm>().is_err());
    }
}
