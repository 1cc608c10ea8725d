//! Finite sums of `c(pi) v^j e^{q pi v} e(m u)` with `c` a polynomial in `pi` over `Q(i)`.
//! This is the span of the Fourier modes of holomorphic and non-holomorphic Eichler
//! integrals, and it is closed under the raising operator:
//! `R_kappa g = pi (q - 2m) g + (j + kappa) v^{j-1} e^{q pi v} e(m u)`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::gauss::GaussRational;
use crate::rational::{factorial, rat, rat_big, to_f64, Rational};

/// Polynomial in `pi` with Gaussian rational coefficients (index = power of `pi`).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PiPoly(Vec<GaussRational>);

impl PiPoly {
    pub fn monomial(power: usize, c: GaussRational) -> Self {
        let mut v = alloc::vec![GaussRational::zero(); power + 1];
        v[power] = c;
        let mut p = PiPoly(v);
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeffs(&self) -> &[GaussRational] {
        &self.0
    }

    pub fn add(&self, o: &PiPoly) -> PiPoly {
        let n = self.0.len().max(o.0.len());
        let z = GaussRational::zero();
        let mut p = PiPoly(
            (0..n)
                .map(|j| self.0.get(j).unwrap_or(&z) + o.0.get(j).unwrap_or(&z))
                .collect(),
        );
        p.trim();
        p
    }

    pub fn scale(&self, s: &GaussRational) -> PiPoly {
        let mut p = PiPoly(self.0.iter().map(|c| c * s).collect());
        p.trim();
        p
    }

    /// Multiply by `pi`.
    pub fn times_pi(&self) -> PiPoly {
        if self.is_zero() {
            return PiPoly::default();
        }
        let mut v = alloc::vec![GaussRational::zero()];
        v.extend(self.0.iter().cloned());
        PiPoly(v)
    }

    pub fn conj(&self) -> PiPoly {
        PiPoly(self.0.iter().map(GaussRational::conj).collect())
    }

    pub fn eval_f64(&self) -> (f64, f64) {
        let pi = core::f64::consts::PI;
        self.0.iter().rev().fold((0.0, 0.0), |acc, c| {
            let (cr, ci) = c.to_f64();
            (acc.0 * pi + cr, acc.1 * pi + ci)
        })
    }
}

/// Key `(j, q, m)` of the basis function `v^j e^{q pi v} e(m u)`.
pub type ExpKey = (i32, Rational, i64);

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExpFourierExpr {
    terms: BTreeMap<ExpKey, PiPoly>,
}

impl ExpFourierExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(j: i32, q: Rational, m: i64, c: PiPoly) -> Self {
        let mut e = Self::zero();
        e.add_term((j, q, m), c);
        e
    }

    fn add_term(&mut self, key: ExpKey, c: PiPoly) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(key.clone()).or_default();
        *slot = slot.add(&c);
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExpKey, &PiPoly)> {
        self.terms.iter()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut e = self.clone();
        for (k, c) in &o.terms {
            e.add_term(k.clone(), c.clone());
        }
        e
    }

    pub fn scale(&self, s: &GaussRational) -> Self {
        let mut e = Self::zero();
        for (k, c) in &self.terms {
            e.add_term(k.clone(), c.scale(s));
        }
        e
    }

    /// Complex conjugate: `pi` and `v` are real, `e(m u)` becomes `e(-m u)`.
    pub fn conj(&self) -> Self {
        let mut e = Self::zero();
        for ((j, q, m), c) in &self.terms {
            e.add_term((*j, q.clone(), -m), c.conj());
        }
        e
    }

    /// `e(n tau) = e^{-2 pi n v} e(n u)`.
    pub fn holomorphic_mode(n: i64) -> Self {
        Self::term(0, rat(-2 * n), n, PiPoly::monomial(0, GaussRational::from_int(1)))
    }

    /// `Gamma(2k-1, 4 pi n v) e(-n tau)
    ///   = (2k-2)! sum_{j <= 2k-2} (4 pi n)^j / j! v^j e^{-2 pi n v} e(-n u)`.
    pub fn incomplete_gamma_mode(k: u32, n: i64) -> Self {
        let mut e = Self::zero();
        let top = 2 * k - 2;
        for j in 0..=top {
            let c = rat_big(factorial(top) * BigInt::from(4 * n).pow(j)) / rat_big(factorial(j));
            e.add_term((j as i32, rat(-2 * n), -n), PiPoly::monomial(j as usize, GaussRational::real(c)));
        }
        e
    }

    pub fn raise(&self, kappa: i32) -> Self {
        let mut e = Self::zero();
        for ((j, q, m), c) in &self.terms {
            let lam = q - rat(2 * m);
            e.add_term((*j, q.clone(), *m), c.times_pi().scale(&GaussRational::real(lam)));
            e.add_term((j - 1, q.clone(), *m), c.scale(&GaussRational::from_int((j + kappa) as i64)));
        }
        e
    }

    pub fn raise_iterated(&self, k: u32, steps: u32) -> Self {
        let mut e = self.clone();
        for s in 0..steps {
            e = e.raise(2 - 2 * k as i32 + 2 * s as i32);
        }
        e
    }

    pub fn eval_f64(&self, u: f64, v: f64) -> (f64, f64) {
        let pi = core::f64::consts::PI;
        let mut acc = (0.0, 0.0);
        for ((j, q, m), c) in &self.terms {
            let (cr, ci) = c.eval_f64();
            let mag = libm::pow(v, *j as f64) * libm::exp(to_f64(q) * pi * v);
            let (s, co) = libm::sincos(2.0 * pi * *m as f64 * u);
            let (br, bi) = (mag * co, mag * s);
            acc.0 += cr * br - ci * bi;
            acc.1 += cr * bi + ci * br;
        }
        acc
    }
}

/// `R^{k-1}(Gamma(2k-1, 4 pi n v) e(-n tau)) - (2k-2)! conj(R^{k-1} e(n tau))`; identically zero.
pub fn eichler_mode_residual(k: u32, n: i64) -> ExpFourierExpr {
    let lhs = ExpFourierExpr::incomplete_gamma_mode(k, n).raise_iterated(k, k - 1);
    let rhs = ExpFourierExpr::holomorphic_mode(n)
        .raise_iterated(k, k - 1)
        .conj()
        .scale(&GaussRational::real(rat_big(factorial(2 * k - 2))));
    lhs.add(&rhs.scale(&GaussRational::from_int(-1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eichler_relation_mode_by_mode() {
        for k in 1..=6 {
            for n in 1..=10 {
                assert!(eichler_mode_residual(k, n).is_zero(), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn incomplete_gamma_at_zero() {
        // Gamma(3, 0) = 2: the k = 2 mode at v = 0, u = 0
        let e = ExpFourierExpr::incomplete_gamma_mode(2, 1);
        let (re, im) = e.eval_f64(0.0, 0.0);
        assert!((re - 2.0).abs() < 1e-15 && im.abs() < 1e-15);
    }

    #[test]
    fn raise_matches_finite_difference() {
        let e = ExpFourierExpr::incomplete_gamma_mode(3, 2);
        let (u, v, h) = (0.3, 0.7, 1e-5);
        let r = e.raise(-4).eval_f64(u, v);
        let f = |a: f64, b: f64| e.eval_f64(a, b);
        let (du, dv) = {
            let (p, m) = (f(u + h, v), f(u - h, v));
            let (q, n) = (f(u, v + h), f(u, v - h));
            (((p.0 - m.0) / (2.0 * h), (p.1 - m.1) / (2.0 * h)), ((q.0 - n.0) / (2.0 * h), (q.1 - n.1) / (2.0 * h)))
        };
        let g = f(u, v);
        // i d/du + d/dv - 4/v
        let want = (-du.1 + dv.0 - 4.0 * g.0 / v, du.0 + dv.1 - 4.0 * g.1 / v);
        assert!((r.0 - want.0).abs() < 1e-5 * want.0.abs().max(1.0));
        assert!((r.1 - want.1).abs() < 1e-5 * want.1.abs().max(1.0));
    }
}
