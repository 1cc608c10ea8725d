//! Laurent polynomials in `tau` with Gaussian rational coefficients, and the weight `2 - 2k`
//! slash action of integer matrices on them.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::error::CoreError;
use crate::field::ExactNumber;
use crate::gamma::GammaMatrix;
use crate::gauss::GaussRational;
use crate::rational::Rational;

/// `sum_j coeffs[j] tau^(low + j)`; normalized so the first and last coefficients are non-zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussPoly {
    low: i32,
    coeffs: Vec<GaussRational>,
}

impl GaussPoly {
    pub fn new(coeffs: Vec<GaussRational>) -> Self {
        Self::laurent(0, coeffs)
    }

    pub fn laurent(low: i32, coeffs: Vec<GaussRational>) -> Self {
        let mut p = Self { low, coeffs };
        p.normalize();
        p
    }

    pub fn from_rationals(coeffs: &[Rational]) -> Self {
        Self::new(coeffs.iter().cloned().map(GaussRational::real).collect())
    }

    pub fn zero() -> Self {
        Self { low: 0, coeffs: Vec::new() }
    }

    pub fn constant(c: GaussRational) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(e: i32, c: GaussRational) -> Self {
        Self::laurent(e, vec![c])
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.low += lead as i32;
        }
        if self.coeffs.is_empty() {
            self.low = 0;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest exponent, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<i32> {
        if self.is_zero() {
            None
        } else {
            Some(self.low + self.coeffs.len() as i32 - 1)
        }
    }

    /// Lowest exponent with non-zero coefficient (0 for the zero polynomial).
    pub fn low(&self) -> i32 {
        self.low
    }

    pub fn is_polynomial(&self) -> bool {
        self.low >= 0
    }

    pub fn coeff(&self, e: i32) -> GaussRational {
        let j = e - self.low;
        if j < 0 || j as usize >= self.coeffs.len() {
            GaussRational::zero()
        } else {
            self.coeffs[j as usize].clone()
        }
    }

    /// `(exponent, coefficient)` pairs of the non-zero terms.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &GaussRational)> {
        let low = self.low;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(j, c)| (low + j as i32, c))
    }

    pub fn scale(&self, s: &GaussRational) -> Self {
        Self::laurent(self.low, self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn scale_rational(&self, s: &Rational) -> Self {
        Self::laurent(self.low, self.coeffs.iter().map(|c| c.scale(s)).collect())
    }

    pub fn conj(&self) -> Self {
        Self::laurent(self.low, self.coeffs.iter().map(GaussRational::conj).collect())
    }

    fn filter_parity(&self, odd: bool) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                if ((self.low + j as i32).rem_euclid(2) == 1) == odd {
                    c.clone()
                } else {
                    GaussRational::zero()
                }
            })
            .collect();
        Self::laurent(self.low, coeffs)
    }

    pub fn even_part(&self) -> Self {
        self.filter_parity(false)
    }

    pub fn odd_part(&self) -> Self {
        self.filter_parity(true)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(GaussRational::from_int(1));
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `p(alpha tau + beta)`; requires a genuine polynomial.
    pub fn compose_affine(&self, alpha: &GaussRational, beta: &GaussRational) -> Self {
        assert!(self.is_polynomial(), "affine substitution into a Laurent polynomial");
        let lin = Self::new(vec![beta.clone(), alpha.clone()]);
        let mut acc = Self::zero();
        for (e, c) in self.terms() {
            acc = &acc + &lin.pow(e as u32).scale(c);
        }
        acc
    }

    /// `p(tau + a)`.
    pub fn shift(&self, a: &GaussRational) -> Self {
        self.compose_affine(&GaussRational::from_int(1), a)
    }

    pub fn eval(&self, t: &ExactNumber) -> ExactNumber {
        let mut acc = ExactNumber::zero();
        if self.is_zero() {
            return acc;
        }
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * t) + &ExactNumber::from_gauss(c.clone());
        }
        if self.low != 0 {
            acc = &acc * &t.pow(self.low);
        }
        acc
    }

    /// Evaluate at the complex number `x + i y`.
    pub fn eval_f64(&self, x: f64, y: f64) -> (f64, f64) {
        let mut acc = (0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            let (cr, ci) = c.to_f64();
            acc = (acc.0 * x - acc.1 * y + cr, acc.0 * y + acc.1 * x + ci);
        }
        if self.low != 0 {
            let mut base = (x, y);
            if self.low < 0 {
                let n = x * x + y * y;
                base = (x / n, -y / n);
            }
            for _ in 0..self.low.unsigned_abs() {
                acc = (acc.0 * base.0 - acc.1 * base.1, acc.0 * base.1 + acc.1 * base.0);
            }
        }
        acc
    }

    /// Weight `2 - 2k` slash: `(c tau + d)^{2k-2} p(M tau)`; a polynomial whenever
    /// `0 <= deg p <= 2k - 2`.
    pub fn slash(&self, k: u32, m: &GammaMatrix) -> Result<Self, CoreError> {
        let top = 2 * k as i32 - 2;
        if !self.is_polynomial() || self.degree().is_some_and(|d| d > top) {
            return Err(CoreError::SlashDegree { degree: self.degree().unwrap_or(0), k });
        }
        let g = |x: i64| GaussRational::from_int(x);
        let num = Self::new(vec![g(m.b), g(m.a)]);
        let den = Self::new(vec![g(m.d), g(m.c)]);
        let mut acc = Self::zero();
        for (e, c) in self.terms() {
            let t = &num.pow(e as u32) * &den.pow((top - e) as u32);
            acc = &acc + &t.scale(c);
        }
        Ok(acc)
    }

    /// Weight `2 - 2k` slash by `S = (0 -1; 1 0)`, valid for Laurent polynomials:
    /// `tau^j -> (-1)^j tau^{2k-2-j}`.
    pub fn slash_s(&self, k: u32) -> Self {
        let top = 2 * k as i32 - 2;
        let mut acc = Self::zero();
        for (e, c) in self.terms() {
            let s = if e.rem_euclid(2) == 0 { c.clone() } else { -c.clone() };
            acc = &acc + &Self::monomial(top - e, s);
        }
        acc
    }

    /// `p | (I - S)` in weight `2 - 2k`.
    pub fn minus_slash_s(&self, k: u32) -> Self {
        self - &self.slash_s(k)
    }
}

impl<'a> Add<&'a GaussPoly> for &'a GaussPoly {
    type Output = GaussPoly;
    fn add(self, o: &GaussPoly) -> GaussPoly {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let low = self.low.min(o.low);
        let high = self.degree().unwrap().max(o.degree().unwrap());
        let coeffs = (low..=high).map(|e| &self.coeff(e) + &o.coeff(e)).collect();
        GaussPoly::laurent(low, coeffs)
    }
}

impl<'a> Sub<&'a GaussPoly> for &'a GaussPoly {
    type Output = GaussPoly;
    fn sub(self, o: &GaussPoly) -> GaussPoly {
        self + &(-o.clone())
    }
}

impl<'a> Mul<&'a GaussPoly> for &'a GaussPoly {
    type Output = GaussPoly;
    fn mul(self, o: &GaussPoly) -> GaussPoly {
        if self.is_zero() || o.is_zero() {
            return GaussPoly::zero();
        }
        let mut coeffs = vec![GaussRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                coeffs[i + j] += &(a * b);
            }
        }
        GaussPoly::laurent(self.low + o.low, coeffs)
    }
}

impl Add for GaussPoly {
    type Output = GaussPoly;
    fn add(self, o: GaussPoly) -> GaussPoly {
        &self + &o
    }
}

impl Sub for GaussPoly {
    type Output = GaussPoly;
    fn sub(self, o: GaussPoly) -> GaussPoly {
        &self - &o
    }
}

impl Neg for GaussPoly {
    type Output = GaussPoly;
    fn neg(self) -> GaussPoly {
        GaussPoly::laurent(self.low, self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl fmt::Display for GaussPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*t^{e}")?;
        }
        Ok(())
    }
}
