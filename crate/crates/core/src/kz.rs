//! Period polynomials of the cusp forms `R_n` (the Petersson duals of the period functionals)
//! from the Kohnen-Zagier Bernoulli formulas, and extraction of individual periods from them.

use alloc::collections::BTreeMap;
use alloc::format;

use crate::bernoulli::bernoulli_polynomial;
use crate::eisenstein::{eisenstein_even_shape, eisenstein_odd_period_poly, eisenstein_period_exact};
use crate::error::CoreError;
use crate::gauss::GaussRational;
use crate::poly::GaussPoly;
use crate::rational::{binomial, frac, rat, rat_big, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    /// `r^-`: odd powers of `tau`, encodes `r_m` for odd `m`.
    Odd,
    /// `r^+`: even powers of `tau`, encodes `r_m` for even `m`.
    Even,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodPolynomial {
    pub k: u32,
    pub parity: Parity,
    pub poly: GaussPoly,
}

fn bern_over(m: u32) -> GaussPoly {
    bernoulli_polynomial(m as usize).scale_rational(&frac(1, m as i64))
}

/// `(i/2)^{2k-2} = (-1)^{k-1} / 4^{k-1}`.
fn half_i_power(k: u32) -> Rational {
    let s = if (k - 1) % 2 == 0 { 1 } else { -1 };
    frac(s, 1) / rat_big(num_bigint::BigInt::from(4).pow(k - 1))
}

/// For even `n` the odd period polynomial `r^-_{R_n}`; for odd `0 < n < 2k-2` the even period
/// polynomial `r^+_{R_n}`.
pub fn kz_period_polynomial(k: u32, n: u32) -> Result<PeriodPolynomial, CoreError> {
    if k < 2 || n > 2 * k - 2 {
        return Err(CoreError::IndexOutOfRange { k, n });
    }
    let top = 2 * k - 2;
    let ipow = GaussRational::i_pow(n as i64 + 1);
    let mono = |e: u32| GaussPoly::monomial(e as i32, GaussRational::from_int(1));
    if n % 2 == 0 {
        let bern = &bern_over(n + 1) - &bern_over(2 * k - 1 - n);
        let mut rhs = &bern.minus_slash_s(k).scale(&ipow) + &(&mono(n) - &mono(top - n)).scale(&ipow);
        let delta = if n == 0 {
            1
        } else if n == top {
            if k % 2 == 0 { 1 } else { -1 }
        } else {
            0
        };
        if delta != 0 {
            rhs = &rhs + &eisenstein_odd_period_poly(k).scale(&GaussRational::new(rat(0), rat(delta)));
        }
        // divide by i (i/2)^{2k-2}
        let inv = GaussRational::new(rat(0), -half_i_power(k).recip());
        Ok(PeriodPolynomial { k, parity: Parity::Odd, poly: rhs.scale(&inv) })
    } else {
        if n == top {
            return Err(CoreError::WrongParity { k, n });
        }
        let bern = &bern_over(n + 1) + &bern_over(2 * k - 1 - n);
        let neg = -ipow.clone();
        let r_e = eisenstein_period_exact(k, n)?.as_rational().cloned().expect("odd interior period is rational");
        let rhs = &(&bern.minus_slash_s(k).scale(&neg) + &(&mono(n) + &mono(top - n)).scale(&neg))
            + &eisenstein_even_shape(k).scale_rational(&r_e);
        Ok(PeriodPolynomial { k, parity: Parity::Even, poly: rhs.scale_rational(&half_i_power(k).recip()) })
    }
}

/// Periods `r_m` encoded by a parity part of `r_f(tau) = sum_m i^{1-m} C(2k-2, m) r_m tau^{2k-2-m}`
/// (with `r_f = r^- + i r^+`). Returns `m -> r_m` for every `m` of the matching parity.
pub fn extract_periods(p: &PeriodPolynomial) -> Result<BTreeMap<u32, GaussRational>, CoreError> {
    let top = 2 * p.k as i32 - 2;
    let mut out = BTreeMap::new();
    let first = match p.parity {
        Parity::Odd => 1,
        Parity::Even => 0,
    };
    for (e, _) in p.poly.terms() {
        if e < 0 || e > top || (e % 2 == 0) != (p.parity == Parity::Even) {
            return Err(CoreError::NotInKernel(format!("unexpected term tau^{e} in {}", p.poly)));
        }
    }
    for m in (first..=top).step_by(2) {
        let c = p.poly.coeff(top - m);
        let b = rat_big(binomial(top as i64, m as i64));
        let unit = match p.parity {
            // i^{1-m}, real for odd m
            Parity::Odd => GaussRational::i_pow(1 - m as i64),
            // -i * i^{1-m} = i^{-m}
            Parity::Even => GaussRational::i_pow(-(m as i64)),
        };
        out.insert(m as u32, (&c * &unit.inv()).scale(&b.recip()));
    }
    Ok(out)
}

/// `sum_n a_n r^{+/-}_{R_n}` for coefficients supported on one parity of `n`.
pub fn combination_polynomial(k: u32, coeffs: &BTreeMap<u32, Rational>) -> Result<GaussPoly, CoreError> {
    let mut parity = None;
    let mut acc = GaussPoly::zero();
    for (&n, a) in coeffs {
        let p = kz_period_polynomial(k, n)?;
        if parity.is_some_and(|q| q != p.parity) {
            return Err(CoreError::WrongParity { k, n });
        }
        parity = Some(p.parity);
        acc = &acc + &p.poly.scale_rational(a);
    }
    Ok(acc)
}

/// `Ok(())` when `sum_n a_n R_n = 0`, otherwise the non-zero residual polynomial.
pub fn verify_kernel(k: u32, coeffs: &BTreeMap<u32, Rational>) -> Result<(), CoreError> {
    let res = combination_polynomial(k, coeffs)?;
    if res.is_zero() {
        Ok(())
    } else {
        Err(CoreError::NotInKernel(format!("{res}")))
    }
}

/// `true` when the space of cusp forms of weight `2k` is zero.
pub fn cusp_space_trivial(k: u32) -> bool {
    cusp_space_dim(k) == 0
}

pub fn cusp_space_dim(k: u32) -> u32 {
    let w = 2 * k;
    if w < 12 || w == 14 {
        return 0;
    }
    let base = w / 12;
    if w % 12 == 2 {
        base - 1
    } else {
        base
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn trivial_cusp_space_gives_zero() {
        for k in [2u32, 3, 4, 5, 7] {
            for n in 1..2 * k - 2 {
                let p = kz_period_polynomial(k, n).unwrap();
                assert!(p.poly.is_zero(), "k={k} n={n}: {}", p.poly);
            }
            // the outer polynomials vanish as well
            assert!(kz_period_polynomial(k, 0).unwrap().poly.is_zero(), "k={k} n=0");
        }
        assert!(kz_period_polynomial(6, 9).is_ok());
        assert_eq!(kz_period_polynomial(6, 10).unwrap().parity, Parity::Odd);
    }

    #[test]
    fn gram_symmetry_weight_12() {
        let k = 6;
        for n in (0..=10u32).step_by(2) {
            let odd = extract_periods(&kz_period_polynomial(k, n).unwrap()).unwrap();
            for (&m, r_m_rn) in &odd {
                if m == 0 || m == 10 {
                    continue;
                }
                let even = extract_periods(&kz_period_polynomial(k, m).unwrap()).unwrap();
                assert_eq!(r_m_rn, &even[&n], "m={m} n={n}");
                assert!(r_m_rn.im.is_zero());
            }
        }
        // the space is one-dimensional, so some period is non-zero
        let p = kz_period_polynomial(6, 1).unwrap();
        assert!(!p.poly.is_zero());
    }

    #[test]
    fn cohen_relation() {
        let mut c = BTreeMap::new();
        c.insert(1u32, rat(10));
        c.insert(3, rat(-24));
        c.insert(5, rat(6));
        verify_kernel(6, &c).unwrap();
        c.insert(5, rat(7));
        assert!(matches!(verify_kernel(6, &c), Err(CoreError::NotInKernel(_))));
    }

    #[test]
    fn dims() {
        let want = [(2, 0), (3, 0), (4, 0), (5, 0), (6, 1), (7, 0), (8, 1), (9, 1), (10, 1), (11, 1), (12, 2), (13, 1)];
        for (k, d) in want {
            assert_eq!(cusp_space_dim(k), d, "k={k}");
        }
    }
}
