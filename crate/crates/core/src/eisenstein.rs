//! Periods of the normalized Eisenstein series `E_{2k}` and the odd part of its period function.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::bernoulli::bernoulli_table;
use crate::error::CoreError;
use crate::gauss::GaussRational;
use crate::poly::GaussPoly;
use crate::rational::{factorial, frac, rat, rat_big, Rational};

/// `r_n(E_{2k})`. The outer periods are `coeff * pi zeta(2k-1) / zeta(2k)`, which is not in
/// the exact field and is kept symbolic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EisensteinPeriod {
    Rational(Rational),
    PiZeta { coeff: Rational },
}

impl EisensteinPeriod {
    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            EisensteinPeriod::Rational(q) => Some(q),
            EisensteinPeriod::PiZeta { .. } => None,
        }
    }

    /// Numeric value given `zeta(2k-1)` and `zeta(2k)`.
    pub fn to_f64(&self, zeta_odd: f64, zeta_even: f64) -> f64 {
        match self {
            EisensteinPeriod::Rational(q) => crate::rational::to_f64(q),
            EisensteinPeriod::PiZeta { coeff } => {
                crate::rational::to_f64(coeff) * core::f64::consts::PI * zeta_odd / zeta_even
            }
        }
    }
}

pub fn eisenstein_period_exact(k: u32, n: u32) -> Result<EisensteinPeriod, CoreError> {
    if k < 2 || n > 2 * k - 2 {
        return Err(CoreError::IndexOutOfRange { k, n });
    }
    let outer = frac(-1, 2 * k as i64 - 1);
    if n == 0 {
        return Ok(EisensteinPeriod::PiZeta { coeff: outer });
    }
    if n == 2 * k - 2 {
        let s = if k % 2 == 0 { 1 } else { -1 };
        return Ok(EisensteinPeriod::PiZeta { coeff: outer * rat(s) });
    }
    if n % 2 == 0 {
        return Ok(EisensteinPeriod::Rational(Rational::zero()));
    }
    let b = bernoulli_table(2 * k as usize);
    let (n, k) = (n as i64, k as i64);
    let sign = if ((n - 1) / 2) % 2 == 0 { 1 } else { -1 };
    let num = rat(sign * 2 * k) * &b[(n + 1) as usize] * &b[(2 * k - 1 - n) as usize];
    let den = &b[2 * k as usize] * rat((n + 1) * (2 * k - 1 - n));
    Ok(EisensteinPeriod::Rational(num / den))
}

/// `r^-_{E_{2k}}(tau) = 2k (2k-2)!/B_{2k} sum_{n odd, -1 <= n <= 2k-1}
/// B_{n+1} B_{2k-1-n} / ((n+1)! (2k-1-n)!) tau^{2k-2-n}` (a Laurent polynomial).
pub fn eisenstein_odd_period_poly(k: u32) -> GaussPoly {
    let b = bernoulli_table(2 * k as usize);
    let k = k as i64;
    let pre = rat(2 * k) * rat_big(factorial(2 * k as u32 - 2)) / &b[2 * k as usize];
    let mut terms: Vec<(i32, Rational)> = Vec::new();
    let mut n = -1i64;
    while n <= 2 * k - 1 {
        let c = &pre * &b[(n + 1) as usize] * &b[(2 * k - 1 - n) as usize]
            / (rat_big(factorial((n + 1) as u32)) * rat_big(factorial((2 * k - 1 - n) as u32)));
        terms.push(((2 * k - 2 - n) as i32, c));
        n += 2;
    }
    terms.into_iter().fold(GaussPoly::zero(), |acc, (e, c)| {
        &acc + &GaussPoly::monomial(e, GaussRational::real(c))
    })
}

/// `tau^{2k-2} - 1`, the even period polynomial of `E_{2k}` divided by `r_0(E_{2k})`.
pub fn eisenstein_even_shape(k: u32) -> GaussPoly {
    &GaussPoly::monomial(2 * k as i32 - 2, GaussRational::from_int(1))
        - &GaussPoly::constant(GaussRational::from_int(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::binomial;

    #[test]
    fn examples() {
        assert_eq!(eisenstein_period_exact(2, 1).unwrap(), EisensteinPeriod::Rational(frac(-5, 6)));
        assert_eq!(eisenstein_period_exact(4, 2).unwrap(), EisensteinPeriod::Rational(rat(0)));
        assert_eq!(eisenstein_period_exact(2, 0).unwrap(), EisensteinPeriod::PiZeta { coeff: frac(-1, 3) });
        assert!(eisenstein_period_exact(2, 3).is_err());
        // -pi zeta(3) / (3 zeta(4))
        let z3 = 1.2020569031595942;
        let z4 = core::f64::consts::PI.powi(4) / 90.0;
        let v = eisenstein_period_exact(2, 0).unwrap().to_f64(z3, z4);
        assert!((v + 1.16304).abs() < 1e-5, "{v}");
    }

    #[test]
    fn symmetry() {
        for k in 2..=9u32 {
            for n in 1..2 * k - 2 {
                let a = eisenstein_period_exact(k, n).unwrap();
                let b = eisenstein_period_exact(k, 2 * k - 2 - n).unwrap();
                let s = rat(if k % 2 == 0 { 1 } else { -1 });
                assert_eq!(a.as_rational().unwrap(), &(b.as_rational().unwrap() * s));
            }
            let s = rat(if k % 2 == 0 { 1 } else { -1 });
            let (EisensteinPeriod::PiZeta { coeff: a }, EisensteinPeriod::PiZeta { coeff: b }) =
                (eisenstein_period_exact(k, 0).unwrap(), eisenstein_period_exact(k, 2 * k - 2).unwrap())
            else {
                panic!("outer periods of E_{{2k}} are not rational");
            };
            assert_eq!(a, b * s);
        }
    }

    /// The odd part of the full period function, assembled from the individual odd periods,
    /// must equal the closed Bernoulli form.
    #[test]
    fn odd_part_of_period_function() {
        for k in 2..=8u32 {
            let top = 2 * k as i32 - 2;
            let mut r = &GaussPoly::monomial(top + 1, GaussRational::real(frac(1, 2 * k as i64 - 1)))
                + &GaussPoly::monomial(-1, GaussRational::real(frac(1, 2 * k as i64 - 1)));
            for n in (1..top).step_by(2) {
                let q = eisenstein_period_exact(k, n as u32).unwrap().as_rational().unwrap().clone();
                let c = GaussRational::i_pow(1 - n as i64).scale(&(q * rat_big(binomial(top as i64, n as i64))));
                r = &r + &GaussPoly::monomial(top - n, c);
            }
            assert_eq!(r, eisenstein_odd_period_poly(k), "k={k}");
        }
    }
}
