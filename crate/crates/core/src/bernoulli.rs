//! Bernoulli numbers (with `B_1 = -1/2`), Bernoulli polynomials and their 1-periodic versions.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::field::ExactNumber;
use crate::gauss::GaussRational;
use crate::point::ExactPoint;
use crate::poly::GaussPoly;
use crate::rational::{binomial, floor, frac, rat, rat_big, Rational};

/// `B_0, ..., B_m` computed with the Akiyama-Tanigawa transform.
pub fn bernoulli_table(m: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(m + 1);
    let mut row: Vec<Rational> = Vec::with_capacity(m + 1);
    for n in 0..=m {
        row.push(frac(1, n as i64 + 1));
        for j in (1..=n).rev() {
            let d = &row[j - 1] - &row[j];
            row[j - 1] = d * rat(j as i64);
        }
        out.push(row[0].clone());
    }
    // the transform yields B_1 = +1/2
    if m >= 1 {
        out[1] = frac(-1, 2);
    }
    out
}

pub fn bernoulli_number(m: usize) -> Rational {
    bernoulli_table(m).pop().unwrap()
}

/// `B_m(x) = sum_l C(m, l) B_{m-l} x^l`.
pub fn bernoulli_polynomial(m: usize) -> GaussPoly {
    let b = bernoulli_table(m);
    let coeffs = (0..=m)
        .map(|l| GaussRational::real(rat_big(binomial(m as i64, l as i64)) * &b[m - l]))
        .collect();
    GaussPoly::new(coeffs)
}

/// The 1-periodic function agreeing with `B_m` on `0 < u < 1`; at integer `u` the
/// average of the two one-sided limits.
pub fn periodized_bernoulli(m: usize, tau: &ExactPoint) -> ExactNumber {
    let poly = bernoulli_polynomial(m);
    let n = rat_big(floor(&tau.u));
    let t = tau.to_exact();
    let right = poly.eval(&(&t - &ExactNumber::from_rational(n.clone())));
    if tau.u == n {
        let left = poly.eval(&(&t - &ExactNumber::from_rational(n - rat(1))));
        (&right + &left).scale(&frac(1, 2))
    } else {
        right
    }
}

/// Floating point version for a numeric point `(u, v)`; averages at integer `u`.
pub fn periodized_bernoulli_f64(m: usize, u: f64, v: f64) -> (f64, f64) {
    let poly = bernoulli_polynomial(m);
    let n = libm::floor(u);
    let right = poly.eval_f64(u - n, v);
    if u == n {
        let left = poly.eval_f64(u - n + 1.0, v);
        ((right.0 + left.0) / 2.0, (right.1 + left.1) / 2.0)
    } else {
        right
    }
}

/// `sum_{j<m} C(m, j) B_j`; vanishes for every `m >= 2`.
pub fn recurrence_residual(b: &[Rational], m: usize) -> Rational {
    (0..m).fold(Rational::zero(), |acc, j| {
        acc + rat_big(binomial(m as i64, j as i64)) * &b[j]
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: solve `sum_{j<=n} C(n+1, j) B_j = 0` for `B_n`.
    fn oracle(m: usize) -> Vec<Rational> {
        let mut b = alloc::vec![rat(1)];
        for n in 1..=m {
            let s = (0..n).fold(Rational::zero(), |acc, j| {
                acc + rat_big(binomial(n as i64 + 1, j as i64)) * &b[j]
            });
            b.push(-s / rat(n as i64 + 1));
        }
        b
    }

    #[test]
    fn small_values() {
        assert_eq!(bernoulli_number(0), rat(1));
        assert_eq!(bernoulli_number(1), frac(-1, 2));
        assert_eq!(bernoulli_number(12), frac(-691, 2730));
        assert_eq!(bernoulli_table(30), oracle(30));
        let b = bernoulli_table(20);
        for m in 2..=20 {
            assert!(recurrence_residual(&b, m).is_zero(), "m = {m}");
        }
    }

    #[test]
    fn polynomials() {
        assert_eq!(
            bernoulli_polynomial(1),
            GaussPoly::from_rationals(&[frac(-1, 2), rat(1)])
        );
        assert_eq!(
            bernoulli_polynomial(2),
            GaussPoly::from_rationals(&[frac(1, 6), rat(-1), rat(1)])
        );
        for m in 1..=14usize {
            let bm = bernoulli_polynomial(m);
            // B_m(x + 1) - B_m(x) = m x^{m-1}
            let diff = &bm.shift(&GaussRational::from_int(1)) - &bm;
            assert_eq!(diff, GaussPoly::monomial(m as i32 - 1, GaussRational::from_int(m as i64)));
            // B_m(1 - x) = (-1)^m B_m(x)
            let refl = bm.compose_affine(&GaussRational::from_int(-1), &GaussRational::from_int(1));
            let sign = if m % 2 == 0 { 1 } else { -1 };
            assert_eq!(refl, bm.scale(&GaussRational::from_int(sign)));
        }
    }

    #[test]
    fn periodized_values() {
        let p = ExactPoint::new_rational(frac(1, 2), rat(2));
        assert_eq!(periodized_bernoulli(2, &p), ExactNumber::from_rational(frac(-49, 12)));
        // 1-periodicity
        let a = ExactPoint::new(frac(-1, 2), frac(1, 2), 3);
        let b = ExactPoint::new(frac(1, 2), frac(1, 2), 3);
        assert_eq!(periodized_bernoulli(2, &a), periodized_bernoulli(2, &b));
        assert_eq!(periodized_bernoulli(2, &b), bernoulli_polynomial(2).eval(&b.to_exact()));
        // average rule at integer real part
        let c = ExactPoint::new_rational(rat(0), rat(2));
        assert_eq!(periodized_bernoulli(1, &c), ExactNumber::from_gauss(GaussRational::new(rat(0), rat(2))));
    }
}
