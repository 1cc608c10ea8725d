//! The locally polynomial part `P_{1-k,n}` of the splitting of `H_{1-k,n}`, in its two
//! equivalent shapes, together with its value after `k - 1` raising steps.
//!
//! Shape A (component-wise):
//! `r_n(E_{2k}) + (-i)^{n+1}/(n+1) BB_{n+1} + i^{n+1}/(2k-1-n) BB_{2k-1-n}
//!   - i^{1-n}/2 sum_{ac > 0, Re(M tau) < 0} (tau^n - (-1)^n tau^{2k-2-n}) | M`,
//! with `BB_m` the 1-periodic Bernoulli function. On `E1` the value is the average of the
//! two one-sided limits. The sign of the finite sum is the one forced by shape B and by the
//! `S` cocycle; the opposite sign breaks both as soon as `Im(tau) < 1/2`.
//!
//! Shape B (global):
//! `r_n(E_{2k}) + (-i)^{n+1}/(n+1) B_{n+1} + i^{n+1}/(2k-1-n) B_{2k-1-n}
//!   + (-i)^{n+1}/2 (tau^n - (-1)^n tau^{2k-2-n})
//!   + i^{1-n}/4 sum_M ((sgn(Re M tau) - sgn(M)) tau^n) | M`.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::bernoulli::bernoulli_polynomial;
use crate::eisenstein::{eisenstein_period_exact, EisensteinPeriod};
use crate::error::CoreError;
use crate::exceptional::{enumerate_exceptional_matrices, is_on_exceptional_set, Region};
use crate::field::ExactNumber;
use crate::gauss::GaussRational;
use crate::point::ExactPoint;
use crate::poly::GaussPoly;
use crate::raising::{raise_constant, raise_monomial_closed_form, raise_poly_closed_form};
use crate::rational::{floor, frac, rat, rat_big, sgn};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Theorem,
    Lemma,
}

/// `eis + rest`, where `eis` is `r_n(E_{2k})` (symbolic for the outer indices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalValue {
    pub eis: EisensteinPeriod,
    pub rest: ExactNumber,
}

impl LocalValue {
    /// The full value when `r_n(E_{2k})` is rational.
    pub fn exact(&self) -> Option<ExactNumber> {
        self.eis
            .as_rational()
            .map(|q| &self.rest + &ExactNumber::from_rational(q.clone()))
    }
}

fn check(k: u32, n: u32) -> Result<(), CoreError> {
    if k < 2 || n > 2 * k - 2 {
        Err(CoreError::IndexOutOfRange { k, n })
    } else {
        Ok(())
    }
}

fn mono(e: u32) -> GaussPoly {
    GaussPoly::monomial(e as i32, GaussRational::from_int(1))
}

/// `tau^n - (-1)^n tau^{2k-2-n}`.
fn antisym(k: u32, n: u32) -> GaussPoly {
    let s = if n % 2 == 0 { 1 } else { -1 };
    &mono(n) - &mono(2 * k - 2 - n).scale(&GaussRational::from_int(s))
}

/// Weight of one PSL2 representative in the strict-interior sum:
/// `-i^{1-n}/2` over Gamma, i.e. `-i^{1-n}` per representative.
fn interior_unit(n: u32) -> GaussRational {
    -GaussRational::i_pow(1 - n as i64)
}

fn bernoulli_part(k: u32, n: u32, shift: &BigInt) -> GaussPoly {
    let s = GaussRational::real(rat_big(-shift.clone()));
    let b1 = bernoulli_polynomial(n as usize + 1).shift(&s);
    let b2 = bernoulli_polynomial((2 * k - 1 - n) as usize).shift(&s);
    let c1 = GaussRational::i_pow(n as i64 + 1).conj().scale(&frac(1, n as i64 + 1));
    let c2 = GaussRational::i_pow(n as i64 + 1).scale(&frac(1, (2 * k - 1 - n) as i64));
    &b1.scale(&c1) + &b2.scale(&c2)
}

/// The polynomial (without the constant `r_n(E_{2k})`) that represents shape A on the
/// component of `H \ E1` containing `tau`.
pub fn theorem_piece(k: u32, n: u32, tau: &ExactPoint) -> Result<GaussPoly, CoreError> {
    check(k, n)?;
    if is_on_exceptional_set(tau) {
        return Err(CoreError::OnExceptionalSet(alloc::format!("point {}", display_point(tau))));
    }
    let mut p = bernoulli_part(k, n, &floor(&tau.u));
    let base = antisym(k, n);
    let mut sum = GaussPoly::zero();
    for m in enumerate_exceptional_matrices(tau, Region::StrictInterior) {
        sum = &sum + &base.slash(k, &m)?;
    }
    p = &p + &sum.scale(&interior_unit(n));
    Ok(p)
}

/// Shape B at `tau` (without `r_n(E_{2k})`), valid everywhere with `sgn(0) = 0`.
pub fn lemma_value(k: u32, n: u32, tau: &ExactPoint) -> Result<ExactNumber, CoreError> {
    check(k, n)?;
    let mut p = bernoulli_part(k, n, &BigInt::zero());
    let half = GaussRational::i_pow(n as i64 + 1).conj().scale(&frac(1, 2));
    p = &p + &antisym(k, n).scale(&half);
    let base = mono(n);
    let mut sum = GaussPoly::zero();
    for m in enumerate_exceptional_matrices(tau, Region::SignMismatch) {
        let w = sgn(&tau.real_part_numerator(&m)) - m.sign();
        sum = &sum + &base.slash(k, &m)?.scale(&GaussRational::from_int(w as i64));
    }
    // i^{1-n}/4 times the sum over Gamma = i^{1-n}/2 times the sum over PSL2
    p = &p + &sum.scale(&GaussRational::i_pow(1 - n as i64).scale(&frac(1, 2)));
    Ok(p.eval(&tau.to_exact()))
}

fn display_point(tau: &ExactPoint) -> alloc::string::String {
    if tau.radicand() == 1 {
        alloc::format!("{} + {}i", tau.u, tau.v_coef)
    } else {
        alloc::format!("{} + {}*sqrt({})i", tau.u, tau.v_coef, tau.radicand())
    }
}

/// Points just left and right of `tau` across a geodesic `M^{-1}(iR+)` through it, chosen off
/// `E1` and close enough that halving the offset stays in the same components.
pub fn transversal_points(k: u32, n: u32, tau: &ExactPoint) -> Result<(ExactPoint, ExactPoint), CoreError> {
    let boundary = enumerate_exceptional_matrices(tau, Region::Boundary);
    // largest Im(M tau), which is >= 1; near such a point only the integer vertical lines
    // belong to E1
    let m = *boundary.iter().min_by(|a, b| tau.j_abs_squared(a).cmp(&tau.j_abs_squared(b))).expect("point is on E1");
    let w = tau.act(&m);
    let minv = m.inverse();
    let at = |e: &crate::rational::Rational| ExactPoint::new(e.clone(), w.v_coef.clone(), w.radicand()).act(&minv);
    let mut eps = frac(1, 16);
    for _ in 0..40 {
        let half = &eps / rat(2);
        let pts = [at(&eps), at(&-eps.clone()), at(&half), at(&-half.clone())];
        if pts.iter().all(|p| !is_on_exceptional_set(p)) {
            let pieces: Result<alloc::vec::Vec<_>, _> = pts.iter().map(|p| theorem_piece(k, n, p)).collect();
            let pieces = pieces?;
            if pieces[0] == pieces[2] && pieces[1] == pieces[3] {
                let [a, b, _, _] = pts;
                return Ok((a, b));
            }
        }
        eps = half;
    }
    panic!("no stable transversal found at {}", display_point(tau));
}

/// `P_{1-k,n}(tau)` in either shape; on `E1` shape A returns the two-sided average.
pub fn local_polynomial(k: u32, n: u32, tau: &ExactPoint, rep: Representation) -> Result<LocalValue, CoreError> {
    check(k, n)?;
    let eis = eisenstein_period_exact(k, n)?;
    let t = tau.to_exact();
    let rest = match rep {
        Representation::Lemma => lemma_value(k, n, tau)?,
        Representation::Theorem => {
            if is_on_exceptional_set(tau) {
                let (a, b) = transversal_points(k, n, tau)?;
                let va = theorem_piece(k, n, &a)?.eval(&t);
                let vb = theorem_piece(k, n, &b)?.eval(&t);
                (&va + &vb).scale(&frac(1, 2))
            } else {
                theorem_piece(k, n, tau)?.eval(&t)
            }
        }
    };
    Ok(LocalValue { eis, rest })
}

/// `R^{k-1}_{2-2k} P_{1-k,n}` at `tau = tau_P`: `eis * eis_factor + rest`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RaisedLocal {
    pub eis: EisensteinPeriod,
    /// `(-v)^{1-k} (2k-2)!/(k-1)!`
    pub eis_factor: ExactNumber,
    pub rest: ExactNumber,
}

impl RaisedLocal {
    pub fn exact(&self) -> Option<ExactNumber> {
        self.eis
            .as_rational()
            .map(|q| &self.rest + &self.eis_factor.scale(q))
    }
}

/// Move a point off `E1` into the strip `0 < u < 1`.
pub fn canonicalize_strip(tau: &ExactPoint) -> ExactPoint {
    tau.translate(&-rat_big(floor(&tau.u)))
}

/// `R^{k-1} P_{1-k,n}(tau)` for `tau` off `E1`, term by term from the closed form for
/// `R^{k-1} tau^l` at the points `M tau`.
pub fn raised_local_polynomial_at(k: u32, n: u32, tau: &ExactPoint) -> Result<RaisedLocal, CoreError> {
    check(k, n)?;
    if is_on_exceptional_set(tau) {
        return Err(CoreError::OnExceptionalSet(alloc::format!("point {}", display_point(tau))));
    }
    let tau = canonicalize_strip(tau);
    let eis = eisenstein_period_exact(k, n)?;
    let eis_factor = raise_constant(k, &tau);
    let b1 = bernoulli_polynomial(n as usize + 1);
    let b2 = bernoulli_polynomial((2 * k - 1 - n) as usize);
    let c1 = GaussRational::i_pow(n as i64 + 1).conj().scale(&frac(1, n as i64 + 1));
    let c2 = GaussRational::i_pow(n as i64 + 1).scale(&frac(1, (2 * k - 1 - n) as i64));
    let mut rest = &(&raise_poly_closed_form(k, &b1, &tau)? * &ExactNumber::from_gauss(c1))
        + &(&raise_poly_closed_form(k, &b2, &tau)? * &ExactNumber::from_gauss(c2));
    let sign = if n % 2 == 0 { 1 } else { -1 };
    let unit = ExactNumber::from_gauss(interior_unit(n));
    for m in enumerate_exceptional_matrices(&tau, Region::StrictInterior) {
        let w = tau.act(&m);
        let term = &raise_monomial_closed_form(k, n, &w)?
            - &raise_monomial_closed_form(k, 2 * k - 2 - n, &w)?.scale(&rat(sign));
        rest = &rest + &(&term * &unit);
    }
    Ok(RaisedLocal { eis, eis_factor, rest })
}

/// Same quantity by raising the component polynomial as a whole.
pub fn raised_local_polynomial_via_piece(k: u32, n: u32, tau: &ExactPoint) -> Result<RaisedLocal, CoreError> {
    let tau = canonicalize_strip(tau);
    let piece = theorem_piece(k, n, &tau)?;
    Ok(RaisedLocal {
        eis: eisenstein_period_exact(k, n)?,
        eis_factor: raise_constant(k, &tau),
        rest: raise_poly_closed_form(k, &piece, &tau)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadform::QuadForm;
    use proptest::prelude::*;

    #[test]
    fn value_above_the_strip() {
        // S_4 = 0 and v > 1/2: only the constant and one Bernoulli term survive
        let tau = ExactPoint::new_rational(frac(1, 2), rat(2));
        let v = local_polynomial(2, 1, &tau, Representation::Theorem).unwrap();
        assert_eq!(v.exact().unwrap(), ExactNumber::from_rational(frac(13, 4)));
        let w = local_polynomial(2, 1, &tau, Representation::Lemma).unwrap();
        assert_eq!(v, w);
    }

    #[test]
    fn average_high_on_the_axis() {
        // the transversal must cross iR+ near tau, not near S(tau)
        for u in -1..=1 {
            let tau = ExactPoint::new(rat(u), frac(25, 3), 7);
            for k in 2..=4u32 {
                for n in 0..=2 * k - 2 {
                    let a = local_polynomial(k, n, &tau, Representation::Theorem).unwrap();
                    let b = local_polynomial(k, n, &tau, Representation::Lemma).unwrap();
                    assert_eq!(a, b, "u={u} k={k} n={n}");
                }
            }
        }
    }

    #[test]
    fn raised_value_for_disc_minus_3() {
        let tau = QuadForm::new(1, 1, 1).cm_point().unwrap();
        let r = raised_local_polynomial_at(2, 1, &tau).unwrap();
        assert_eq!(r.exact().unwrap(), ExactNumber::sqrt_int(3).scale(&rat(2)));
        assert_eq!(r, raised_local_polynomial_via_piece(2, 1, &tau).unwrap());
    }

    #[test]
    fn raised_value_field_membership() {
        let tau = QuadForm::new(1, 1, 1).cm_point().unwrap();
        // |d|^{(k-1)/2} R^{k-1} P in Q for odd n, iQ for even n
        let r = raised_local_polynomial_at(4, 3, &tau).unwrap().exact().unwrap();
        let scaled = &r * &ExactNumber::sqrt_int(27);
        assert!(scaled.is_rational(), "{scaled}");
        let r = raised_local_polynomial_at(3, 2, &tau).unwrap().exact().unwrap();
        let scaled = r.scale(&rat(3));
        assert!(scaled.is_i_rational(), "{scaled}");
    }

    #[test]
    fn rejects_points_on_e1() {
        let tau = QuadForm::new(1, 0, 1).cm_point().unwrap();
        assert!(matches!(raised_local_polynomial_at(2, 1, &tau), Err(CoreError::OnExceptionalSet(_))));
    }

    #[test]
    fn average_at_2i() {
        let tau = ExactPoint::new_rational(rat(0), rat(2));
        for (k, n) in [(2, 1), (3, 2), (4, 0)] {
            let a = local_polynomial(k, n, &tau, Representation::Theorem).unwrap();
            let b = local_polynomial(k, n, &tau, Representation::Lemma).unwrap();
            assert_eq!(a, b, "k={k} n={n}");
        }
    }

    fn point_from(vd_range: core::ops::Range<i64>, vn_range: core::ops::Range<i64>) -> impl Strategy<Value = ExactPoint> {
        (-40i64..40, 1i64..9, vn_range, vd_range, prop::sample::select(alloc::vec![1u64, 2, 3, 5, 7]))
            .prop_filter("not too close to the real line", |(_, _, vn, vd, m)| {
                (*vn as f64 / *vd as f64) * (*m as f64).sqrt() > 0.12
            })
            .prop_map(|(un, ud, vn, vd, m)| ExactPoint::new(frac(un, ud), frac(vn, vd), m))
    }

    /// Half of the cases lie below `Im(tau) = 1/2`, where the finite sums are non-empty.
    fn exact_point() -> impl Strategy<Value = ExactPoint> {
        prop_oneof![point_from(1..10, 1..30), point_from(4..24, 1..5)]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn representations_agree(tau in exact_point()) {
            for k in 2..=5u32 {
                for n in 0..=2 * k - 2 {
                    let a = local_polynomial(k, n, &tau, Representation::Theorem).unwrap();
                    let b = local_polynomial(k, n, &tau, Representation::Lemma).unwrap();
                    prop_assert_eq!(a, b);
                }
            }
        }

    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn cocycle_identities(tau in exact_point()) {
            for k in 2..=7u32 {
                for n in 0..=2 * k - 2 {
                    prop_assert!(crate::checks::t_cocycle_residual(k, n, &tau).unwrap().is_zero());
                    prop_assert!(crate::checks::s_cocycle_residual(k, n, &tau).unwrap().is_zero(), "k={} n={}", k, n);
                }
            }
        }

        #[test]
        fn raising_paths_agree(tau in exact_point()) {
            prop_assume!(!is_on_exceptional_set(&tau));
            for k in 2..=5u32 {
                for n in 0..=2 * k - 2 {
                    let a = raised_local_polynomial_at(k, n, &tau).unwrap();
                    let b = raised_local_polynomial_via_piece(k, n, &tau).unwrap();
                    prop_assert_eq!(a, b);
                }
            }
        }
    }
}
