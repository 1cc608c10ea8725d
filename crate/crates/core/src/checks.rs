//! Exact identities of the locally polynomial part and the period polynomials, as residuals that
//! vanish when the identity holds.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::eisenstein::{eisenstein_odd_period_poly, eisenstein_period_exact};
use crate::error::CoreError;
use crate::field::ExactNumber;
use crate::gamma::GammaMatrix;
use crate::gauss::GaussRational;
use crate::kz::{extract_periods, kz_period_polynomial, Parity};
use crate::local_poly::{local_polynomial, Representation};
use crate::point::ExactPoint;
use crate::poly::GaussPoly;
use crate::raising::{raise_monomial_closed_form, MixedExpr};
use crate::rational::{frac, pow_i, rat, Rational};

/// Right-hand side of `P_{1-k,n} |_{2-2k} (I - S)`, leaving out the constant `r_n(E_{2k})` which
/// contributes `r_n(E_{2k}) (1 - tau^{2k-2})` on its own.
pub fn trafo_s_rhs(k: u32, n: u32) -> Result<GaussPoly, CoreError> {
    let kz = kz_period_polynomial(k, n)?;
    let scale = pow_i(&frac(1, 2), 2 * k as i32 - 2) * rat(if (k - 1) % 2 == 0 { 1 } else { -1 });
    let mut rhs = kz.poly.scale_rational(&-scale);
    if kz.parity == Parity::Odd {
        rhs = rhs.scale(&GaussRational::i());
        let top = 2 * k - 2;
        let delta = if n == 0 {
            1
        } else if n == top {
            if k % 2 == 0 { 1 } else { -1 }
        } else {
            0
        };
        rhs = &rhs + &eisenstein_odd_period_poly(k).scale(&GaussRational::new(rat(0), rat(delta)));
    }
    Ok(rhs)
}

fn lemma_rest(k: u32, n: u32, tau: &ExactPoint) -> Result<ExactNumber, CoreError> {
    Ok(local_polynomial(k, n, tau, Representation::Lemma)?.rest)
}

/// `P(tau) - P(tau + 1)`.
pub fn t_cocycle_residual(k: u32, n: u32, tau: &ExactPoint) -> Result<ExactNumber, CoreError> {
    Ok(&lemma_rest(k, n, tau)? - &lemma_rest(k, n, &tau.translate(&rat(1)))?)
}

/// `P |_{2-2k} (I - S)(tau)` minus its closed form.
pub fn s_cocycle_residual(k: u32, n: u32, tau: &ExactPoint) -> Result<ExactNumber, CoreError> {
    let t = tau.to_exact();
    let here = lemma_rest(k, n, tau)?;
    let slashed = &t.pow(2 * k as i32 - 2) * &lemma_rest(k, n, &tau.act(&GammaMatrix::S))?;
    let c = eisenstein_period_exact(k, n)?.as_rational().cloned().unwrap_or_else(Rational::zero);
    let const_part = (&ExactNumber::one() - &t.pow(2 * k as i32 - 2)).scale(&c);
    let lhs = &(&here - &slashed) + &const_part;
    Ok(&lhs - &trafo_s_rhs(k, n)?.eval(&t))
}

/// Theorem form minus lemma form of `P_{1-k,n}(tau)`.
pub fn representation_residual(k: u32, n: u32, tau: &ExactPoint) -> Result<ExactNumber, CoreError> {
    let a = local_polynomial(k, n, tau, Representation::Theorem)?.rest;
    let b = local_polynomial(k, n, tau, Representation::Lemma)?.rest;
    Ok(&a - &b)
}

/// Closed form of `R^{k-1}_{2-2k} tau^l` minus the iterated raising operator.
pub fn raising_residual(k: u32, l: u32, tau: &ExactPoint) -> Result<ExactNumber, CoreError> {
    let brute = MixedExpr::tau_power(l).raise_iterated(k, k - 1).eval(tau);
    Ok(&raise_monomial_closed_form(k, l, tau)? - &brute)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramPair {
    /// Odd index.
    pub m: u32,
    /// Even index.
    pub n: u32,
    /// `r_m(R_n)`.
    pub r_m_of_r_n: GaussRational,
    /// `r_n(R_m)`.
    pub r_n_of_r_m: GaussRational,
}

impl GramPair {
    pub fn holds(&self) -> bool {
        self.r_m_of_r_n == self.r_n_of_r_m
    }
}

/// All cross-parity pairs `(m odd, n even)` of interior indices whose periods are read off the
/// Kohnen-Zagier period polynomials.
pub fn gram_pairs(k: u32) -> Result<Vec<GramPair>, CoreError> {
    let top = 2 * k - 2;
    let mut out = Vec::new();
    for n in (0..=top).step_by(2) {
        let from_n = extract_periods(&kz_period_polynomial(k, n)?)?;
        for (&m, r_m) in &from_n {
            if m % 2 == 0 || m == 0 || m == top || n == 0 || n == top {
                continue;
            }
            let from_m = extract_periods(&kz_period_polynomial(k, m)?)?;
            if let Some(r_n) = from_m.get(&n) {
                out.push(GramPair { m, n, r_m_of_r_n: r_m.clone(), r_n_of_r_m: r_n.clone() });
            }
        }
    }
    Ok(out)
}
