//! Exact periods `r_n(f_{k,P})` for interior `n`, where the only non-rational ingredients
//! (raised Eichler integrals of cusp forms) vanish or cancel.

use alloc::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::CoreError;
use crate::field::ExactNumber;
use crate::kz::{cusp_space_trivial, verify_kernel};
use crate::local_poly::{raised_local_polynomial_at, RaisedLocal};
use crate::quadform::QuadForm;
use crate::rational::{factorial, rat, rat_big, Rational};

/// `|d|^{(k-1)/2} / |Gamma_P|`.
pub fn period_prefactor(p: &QuadForm, k: u32) -> Result<ExactNumber, CoreError> {
    let absd = p.disc().abs();
    let stab = p.stabilizer_order()?;
    let whole = rat_big(absd.pow((k - 1) / 2)) / rat(stab as i64);
    let mut out = ExactNumber::from_rational(whole);
    if (k - 1) % 2 == 1 {
        let d = absd.to_u64().ok_or_else(|| CoreError::NotPositiveDefinite(alloc::format!("{p}")))?;
        out = &out * &ExactNumber::sqrt_int(d);
    }
    Ok(out)
}

/// `(-1)^{k-1} / (2^{k-2} (k-1)!)`.
pub fn raising_normalization(k: u32) -> Rational {
    let s = if (k - 1) % 2 == 0 { 1 } else { -1 };
    rat(s) / rat_big(BigInt::from(2).pow(k - 2) * factorial(k - 1))
}

/// The contribution of the locally polynomial part to `r_n(f_{k,P})`:
/// `|d|^{(k-1)/2}/|Gamma_P| (-1)^{k-1}/(2^{k-2}(k-1)!) R^{k-1} P_{1-k,n}(tau_P)`,
/// with the outer Eisenstein constant left symbolic.
pub fn local_period_part(p: &QuadForm, k: u32, n: u32) -> Result<RaisedLocal, CoreError> {
    let tau = p.cm_point()?;
    let r = raised_local_polynomial_at(k, n, &tau)?;
    let pre = &period_prefactor(p, k)? * &ExactNumber::from_rational(raising_normalization(k));
    Ok(RaisedLocal { eis: r.eis, eis_factor: &r.eis_factor * &pre, rest: &r.rest * &pre })
}

fn interior(k: u32, n: u32) -> Result<(), CoreError> {
    if k < 2 || n == 0 || n >= 2 * k - 2 {
        Err(CoreError::IndexOutOfRange { k, n })
    } else {
        Ok(())
    }
}

/// `r_n(f_{k,P})` for `0 < n < 2k-2` when there are no cusp forms of weight `2k`.
pub fn exact_period(p: &QuadForm, k: u32, n: u32) -> Result<ExactNumber, CoreError> {
    interior(k, n)?;
    if !cusp_space_trivial(k) {
        return Err(CoreError::CuspSpaceTooLarge { k });
    }
    let v = local_period_part(p, k, n)?.exact().expect("interior Eisenstein period is rational");
    assert!(v.is_rational() || v.is_i_rational(), "period {v} is neither real rational nor imaginary rational");
    Ok(v)
}

/// `sum_n a_n r_n(f_{k,P})` for a relation `sum_n a_n R_n = 0` among interior indices of one
/// parity; the cusp form contributions cancel, so the value is exact.
pub fn linear_combination_period(
    p: &QuadForm,
    k: u32,
    coeffs: &BTreeMap<u32, Rational>,
) -> Result<ExactNumber, CoreError> {
    for &n in coeffs.keys() {
        interior(k, n)?;
    }
    verify_kernel(k, coeffs)?;
    let mut acc = ExactNumber::zero();
    for (&n, a) in coeffs {
        if a.is_zero() {
            continue;
        }
        let v = local_period_part(p, k, n)?.exact().expect("interior Eisenstein period is rational");
        acc = &acc + &v.scale(a);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn q(a: i64, b: i64, c: i64) -> QuadForm {
        QuadForm::new(a, b, c)
    }

    #[test]
    fn table_for_disc_minus_3() {
        let p = q(1, 1, 1);
        let real = |x: Rational| ExactNumber::from_rational(x);
        assert_eq!(exact_period(&p, 2, 1).unwrap(), real(rat(-2)));
        assert_eq!(exact_period(&p, 4, 3).unwrap(), real(frac(2, 3)));
        assert_eq!(exact_period(&p, 3, 2).unwrap(), ExactNumber::zero());
        assert!(matches!(exact_period(&p, 6, 3), Err(CoreError::CuspSpaceTooLarge { k: 6 })));
        assert!(exact_period(&p, 2, 0).is_err());
    }

    #[test]
    fn cohen_combination() {
        let mut c = BTreeMap::new();
        c.insert(1u32, rat(10));
        c.insert(3, rat(-24));
        c.insert(5, rat(6));
        let v = linear_combination_period(&q(1, 1, 1), 6, &c).unwrap();
        assert_eq!(v, ExactNumber::from_int(-108));
        c.insert(3, rat(-23));
        assert!(matches!(linear_combination_period(&q(1, 1, 1), 6, &c), Err(CoreError::NotInKernel(_))));
    }

    #[test]
    fn single_coefficient_kernel_for_trivial_space() {
        let mut c = BTreeMap::new();
        c.insert(3u32, rat(1));
        let v = linear_combination_period(&q(1, 1, 1), 4, &c).unwrap();
        assert_eq!(v, exact_period(&q(1, 1, 1), 4, 3).unwrap());
    }

    #[test]
    fn class_invariance() {
        // equivalent forms give the same periods
        for (a, b) in [(q(1, 1, 1), q(1, 5, 7)), (q(1, 1, 1), q(7, -5, 1)), (q(2, 2, 3), q(3, -2, 2)), (q(2, 2, 3), q(7, 8, 3))] {
            for (k, n) in [(2, 1), (3, 1), (3, 2), (4, 3)] {
                assert_eq!(exact_period(&a, k, n).unwrap(), exact_period(&b, k, n).unwrap());
            }
        }
    }
}
