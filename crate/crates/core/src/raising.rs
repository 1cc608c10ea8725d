//! Expressions `sum c u^alpha v^beta` in the real coordinates of `tau = u + i v`, and the
//! Maass raising operator `R_kappa = 2i d/dtau + kappa / v = i d/du + d/dv + kappa / v` on them.

use alloc::collections::BTreeMap;
use core::fmt;
use core::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::CoreError;
use crate::field::ExactNumber;
use crate::gauss::GaussRational;
use crate::point::ExactPoint;
use crate::poly::GaussPoly;
use crate::rational::{binomial, factorial, frac, rat, rat_big};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MixedExpr {
    /// `(alpha, beta) -> coefficient`, zero coefficients removed.
    terms: BTreeMap<(u32, i32), GaussRational>,
}

impl MixedExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(alpha: u32, beta: i32, c: GaussRational) -> Self {
        let mut e = Self::zero();
        e.add_term(alpha, beta, c);
        e
    }

    pub fn constant(c: GaussRational) -> Self {
        Self::term(0, 0, c)
    }

    fn add_term(&mut self, alpha: u32, beta: i32, c: GaussRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((alpha, beta)).or_insert_with(GaussRational::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&(alpha, beta));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, i32), &GaussRational)> {
        self.terms.iter()
    }

    /// `tau^l = sum_alpha C(l, alpha) u^alpha (i v)^{l - alpha}`.
    pub fn tau_power(l: u32) -> Self {
        let mut e = Self::zero();
        for alpha in 0..=l {
            let c = GaussRational::i_pow((l - alpha) as i64).scale(&rat_big(binomial(l as i64, alpha as i64)));
            e.add_term(alpha, (l - alpha) as i32, c);
        }
        e
    }

    /// A polynomial in `tau` rewritten in `u, v`.
    pub fn from_poly(p: &GaussPoly) -> Self {
        assert!(p.is_polynomial(), "Laurent terms have no polynomial expression in u, v");
        let mut e = Self::zero();
        for (l, c) in p.terms() {
            e = &e + &Self::tau_power(l as u32).scale(c);
        }
        e
    }

    pub fn scale(&self, s: &GaussRational) -> Self {
        let mut e = Self::zero();
        for (&(a, b), c) in &self.terms {
            e.add_term(a, b, c * s);
        }
        e
    }

    pub fn d_u(&self) -> Self {
        let mut e = Self::zero();
        for (&(a, b), c) in &self.terms {
            if a > 0 {
                e.add_term(a - 1, b, c.scale(&rat(a as i64)));
            }
        }
        e
    }

    pub fn d_v(&self) -> Self {
        let mut e = Self::zero();
        for (&(a, b), c) in &self.terms {
            e.add_term(a, b - 1, c.scale(&rat(b as i64)));
        }
        e
    }

    /// Multiply by `v^j`.
    pub fn mul_v_pow(&self, j: i32) -> Self {
        let mut e = Self::zero();
        for (&(a, b), c) in &self.terms {
            e.add_term(a, b + j, c.clone());
        }
        e
    }

    /// `d/dtau = (d/du - i d/dv) / 2`.
    pub fn d_tau(&self) -> Self {
        (&self.d_u() - &self.d_v().scale(&GaussRational::i())).scale(&GaussRational::real(frac(1, 2)))
    }

    /// `R_kappa`: `u^a v^b -> i a u^{a-1} v^b + (b + kappa) u^a v^{b-1}`.
    pub fn raise(&self, kappa: i32) -> Self {
        let mut e = Self::zero();
        for (&(a, b), c) in &self.terms {
            if a > 0 {
                e.add_term(a - 1, b, (c * &GaussRational::i()).scale(&rat(a as i64)));
            }
            e.add_term(a, b - 1, c.scale(&rat((b + kappa) as i64)));
        }
        e
    }

    /// `R_{2-2k}^{steps}` applied one operator at a time.
    pub fn raise_iterated(&self, k: u32, steps: u32) -> Self {
        let mut e = self.clone();
        for s in 0..steps {
            e = e.raise(2 - 2 * k as i32 + 2 * s as i32);
        }
        e
    }

    /// `R_{2-2k}^{k-1}` through the single sum
    /// `(-v)^{1-k} (k-1)! sum_j (-2iv)^j / j! C(2k-2-j, k-1) d^j/dtau^j`.
    pub fn raise_closed_sum(&self, k: u32) -> Self {
        let km1 = k as i64 - 1;
        let mut acc = Self::zero();
        let mut deriv = self.clone();
        for j in 0..=km1 {
            // (-2i)^j (k-1)! C(2k-2-j, k-1) / j!
            let c = GaussRational::i_pow(j).scale(
                &(rat_big(BigInt::from(-2).pow(j as u32) * factorial(km1 as u32) * binomial(2 * km1 - j, km1))
                    / rat_big(factorial(j as u32))),
            );
            acc = &acc + &deriv.mul_v_pow(j as i32).scale(&c);
            deriv = deriv.d_tau();
        }
        // (-v)^{1-k}
        let sign = if km1 % 2 == 0 { 1 } else { -1 };
        acc.mul_v_pow(-(km1 as i32)).scale(&GaussRational::from_int(sign))
    }

    pub fn eval(&self, tau: &ExactPoint) -> ExactNumber {
        let u = tau.u_exact();
        let v = tau.v_exact();
        let mut acc = ExactNumber::zero();
        for (&(a, b), c) in &self.terms {
            let t = &(&u.pow(a as i32) * &v.pow(b)) * &ExactNumber::from_gauss(c.clone());
            acc = &acc + &t;
        }
        acc
    }

    pub fn eval_f64(&self, u: f64, v: f64) -> (f64, f64) {
        let mut acc = (0.0, 0.0);
        for (&(a, b), c) in &self.terms {
            let m = libm::pow(u, a as f64) * libm::pow(v, b as f64);
            let (cr, ci) = c.to_f64();
            acc.0 += cr * m;
            acc.1 += ci * m;
        }
        acc
    }
}

impl<'a> Add<&'a MixedExpr> for &'a MixedExpr {
    type Output = MixedExpr;
    fn add(self, o: &MixedExpr) -> MixedExpr {
        let mut e = self.clone();
        for (&(a, b), c) in &o.terms {
            e.add_term(a, b, c.clone());
        }
        e
    }
}

impl<'a> Sub<&'a MixedExpr> for &'a MixedExpr {
    type Output = MixedExpr;
    fn sub(self, o: &MixedExpr) -> MixedExpr {
        self + &o.scale(&GaussRational::from_int(-1))
    }
}

impl<'a> Mul<&'a MixedExpr> for &'a MixedExpr {
    type Output = MixedExpr;
    fn mul(self, o: &MixedExpr) -> MixedExpr {
        let mut e = MixedExpr::zero();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &o.terms {
                e.add_term(a1 + a2, b1 + b2, c1 * c2);
            }
        }
        e
    }
}

impl fmt::Display for MixedExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (j, (&(a, b), c)) in self.terms.iter().enumerate() {
            if j > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*u^{a}*v^{b}")?;
        }
        Ok(())
    }
}

/// `R_{2-2k}^{k-1} tau^l` at an exact point:
/// `(-v)^{1-k} sum_j C(l,j) (2k-2-j)!/(k-1-j)! (-2)^j sum_{alpha <= l-j, l-alpha even}
/// C(l-j, alpha) u^alpha (iv)^{l-alpha}`, plus `i (-1)^{k-1} 2^{2k-2} (k-1)! v^k` when `l = 2k-1`.
pub fn raise_monomial_closed_form(k: u32, l: u32, tau: &ExactPoint) -> Result<ExactNumber, CoreError> {
    if k == 0 || l > 2 * k - 1 {
        return Err(CoreError::MonomialDegree { l, k });
    }
    let (k, l) = (k as i64, l as i64);
    let u = tau.u_exact();
    let v = tau.v_exact();
    let mut inner_sum = ExactNumber::zero();
    for j in 0..=l.min(k - 1) {
        let outer = rat_big(
            binomial(l, j) * factorial((2 * k - 2 - j) as u32) * BigInt::from(-2).pow(j as u32)
                / factorial((k - 1 - j) as u32),
        );
        let mut inner = ExactNumber::zero();
        for alpha in (0..=l - j).filter(|a| (l - a) % 2 == 0) {
            // (iv)^{l - alpha} with l - alpha even is real: (-1)^{(l-alpha)/2} v^{l-alpha}
            let e = l - alpha;
            let sign = if (e / 2) % 2 == 0 { 1 } else { -1 };
            let c = rat_big(binomial(l - j, alpha) * BigInt::from(sign));
            inner = &inner + &(&u.pow(alpha as i32) * &v.pow(e as i32)).scale(&c);
        }
        inner_sum = &inner_sum + &inner.scale(&outer);
    }
    let sign = if (k - 1) % 2 == 0 { 1 } else { -1 };
    let mut out = (&v.pow(1 - k as i32) * &inner_sum).scale(&rat(sign));
    if l == 2 * k - 1 {
        let c = rat_big(BigInt::from(sign) * BigInt::from(2).pow(2 * k as u32 - 2) * factorial(k as u32 - 1));
        out = &out + &(&ExactNumber::i() * &v.pow(k as i32)).scale(&c);
    }
    Ok(out)
}

/// `R_{2-2k}^{k-1} p` at an exact point for a polynomial of degree at most `2k - 1`.
pub fn raise_poly_closed_form(k: u32, p: &GaussPoly, tau: &ExactPoint) -> Result<ExactNumber, CoreError> {
    let mut acc = ExactNumber::zero();
    for (l, c) in p.terms() {
        if l < 0 {
            return Err(CoreError::MonomialDegree { l: 0, k });
        }
        let t = raise_monomial_closed_form(k, l as u32, tau)?;
        acc = &acc + &(&t * &ExactNumber::from_gauss(c.clone()));
    }
    Ok(acc)
}

/// `R_{2-2k}^{k-1}` of a constant: `(-v)^{1-k} (2k-2)!/(k-1)!` times the constant.
pub fn raise_constant(k: u32, tau: &ExactPoint) -> ExactNumber {
    let c = rat_big(factorial(2 * k - 2) / factorial(k - 1));
    let sign = if (k - 1) % 2 == 0 { 1 } else { -1 };
    tau.v_exact().pow(1 - k as i32).scale(&(c * rat(sign)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_raise_examples() {
        // R_{-2} v = (1 - 2) v^0
        let v = MixedExpr::term(0, 1, GaussRational::from_int(1));
        assert_eq!(v.raise(-2), MixedExpr::constant(GaussRational::from_int(-1)));
        // steps = 0 is the identity
        let t = MixedExpr::tau_power(3);
        assert_eq!(t.raise_iterated(4, 0), t);
        // R_{-2} tau = -2u/v, which is -2/sqrt 3 at e^{i pi / 3}
        let p = ExactPoint::new(frac(1, 2), frac(1, 2), 3);
        let want = ExactNumber::sqrt_int(3).scale(&frac(-2, 3));
        assert_eq!(MixedExpr::tau_power(1).raise(-2).eval(&p), want);
        assert_eq!(raise_monomial_closed_form(2, 1, &p).unwrap(), want);
        // constants: -2/v for k = 2
        assert_eq!(raise_monomial_closed_form(2, 0, &p).unwrap(), raise_constant(2, &p));
        assert_eq!(raise_constant(2, &p), p.v_exact().inv().scale(&rat(-2)));
    }

    #[test]
    fn top_degree_correction() {
        // k = 3, l = 5 at i: imaginary part 32 from the correction, real part from the double sum
        let p = ExactPoint::new_rational(rat(0), rat(1));
        let got = raise_monomial_closed_form(3, 5, &p).unwrap();
        let brute = MixedExpr::tau_power(5).raise_iterated(3, 2).eval(&p);
        assert_eq!(got, brute);
        assert_eq!(got.im(), ExactNumber::from_int(32));
        assert!(raise_monomial_closed_form(3, 6, &p).is_err());
    }

    #[test]
    fn closed_sum_matches_iteration_exactly() {
        for k in 1..=7u32 {
            for l in 0..=2 * k {
                let t = MixedExpr::tau_power(l);
                assert_eq!(t.raise_iterated(k, k - 1), t.raise_closed_sum(k), "k={k} l={l}");
            }
            // a non-holomorphic input
            let e = &MixedExpr::term(2, -1, GaussRational::new(rat(1), rat(3)))
                + &MixedExpr::term(1, 3, GaussRational::from_int(-5));
            assert_eq!(e.raise_iterated(k, k - 1), e.raise_closed_sum(k));
        }
    }

    fn cm_type_point() -> impl Strategy<Value = ExactPoint> {
        (-30i64..30, 1i64..12, 1i64..20, 1i64..12, prop::sample::select(alloc::vec![1u64, 2, 3, 5, 7, 11, 15, 23]))
            .prop_map(|(un, ud, vn, vd, m)| ExactPoint::new(frac(un, ud), frac(vn, vd), m))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn closed_form_matches_iterated_raise(p in cm_type_point()) {
            for k in 1..=7u32 {
                for l in 0..=2 * k - 1 {
                    let brute = MixedExpr::tau_power(l).raise_iterated(k, k - 1).eval(&p);
                    prop_assert_eq!(raise_monomial_closed_form(k, l, &p).unwrap(), brute);
                }
            }
        }
    }
}
