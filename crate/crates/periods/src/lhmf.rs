//! The locally harmonic Maass form `H_{1-k,n}`: direct evaluation from its defining integral,
//! the splitting into locally polynomial part and Eichler integrals, and its jumps along `E1`.

use std::f64::consts::PI;

use num_complex::ComplexFloat;
use periods_core::exceptional::is_on_exceptional_set;
use periods_core::local_poly::{local_polynomial, Representation};
use periods_core::point::ExactPoint;
use rayon::prelude::*;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::modforms::{eichler_holomorphic, eichler_nonholomorphic, eisenstein_coeffs, mobius, psl2_shell};
use crate::numerics::{factorial_f64, zeta, Value, C64};
use crate::period::rn_coefficients;

pub use periods_core::jumps::{jump_check, singularity_descriptor, JumpReport, SingularityDescriptor};

const I: C64 = C64::new(0.0, 1.0);

fn binomial_f64(n: u32, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, t| acc * (n - t) as f64 / (t + 1) as f64)
}

/// `int_0^inf y^n (iy - w)^{-m} dy = (-1)^m i^{n+1} n! (m-n-2)! / (m-1)! w^{n+1-m}`.
pub fn y_integral_closed_form(n: u32, m: u32, w: C64) -> Result<C64> {
    if m < n + 2 {
        return Err(Error::Invalid(format!("y-integral diverges for n = {n}, m = {m}")));
    }
    if w.re == 0.0 && w.im >= 0.0 {
        return Err(Error::Invalid(format!("w = {w} lies on the closed positive imaginary axis")));
    }
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    let c = sign * factorial_f64(n) * factorial_f64(m - n - 2) / factorial_f64(m - 1);
    Ok(I.powi(n as i32 + 1) * c * w.powi(n as i32 + 1 - m as i32))
}

/// `log(iy - w)` at `y = 0` on a branch continuous along `y >= 0`, up to a constant depending
/// only on the sign of `Re w`.
fn ray_log(w: C64) -> C64 {
    if w.re < 0.0 {
        (-w).ln()
    } else {
        w.ln()
    }
}

/// `int_0^inf y^n (iy - a)^{-1} (iy - conj a)^{1-2k} dy` with a bound on the magnitudes of the
/// intermediate quantities (for the rounding error).
fn kernel_integral(k: u32, n: u32, a: C64) -> Result<(C64, f64)> {
    if a.im < 0.5 * a.re.abs() {
        Ok(kernel_near_real(k, n, a))
    } else {
        kernel_partial_fractions(k, n, a)
    }
}

/// Expansion in `eps = Im a` around `r = Re a`: with `X = iy - r`,
/// `(X - i eps)^{-1} (X + i eps)^{1-2k} = sum_j c_j (i eps)^j X^{-2k-j}` where
/// `c_j = sum_{l <= j} binom(1-2k, l)`; each term integrates in closed form.
fn kernel_near_real(k: u32, n: u32, a: C64) -> (C64, f64) {
    let (r, eps) = (a.re, a.im);
    let w = C64::new(r, 0.0);
    let m0 = 2 * k;
    // y-integral for exponent m, updated by m -> m + 1
    let mut y = y_integral_closed_form(n, m0, w).expect("real nonzero point");
    let mut binom = 1.0;
    let mut c = 0.0;
    let mut ie = C64::new(1.0, 0.0);
    let mut acc = C64::new(0.0, 0.0);
    let mut mag = 0.0;
    for j in 0..400u32 {
        if j > 0 {
            // binom(1-2k, j) from binom(1-2k, j-1)
            binom *= (1.0 - m0 as f64 - (j - 1) as f64) / j as f64;
            let m = m0 + j - 1;
            y *= -((m - n - 1) as f64) / (m as f64 * r);
            ie *= C64::new(0.0, eps);
        }
        c += binom;
        let t = ie * c * y;
        acc += t;
        mag += t.norm();
        if j > 4 && t.norm() < 1e-18 * acc.norm() {
            break;
        }
    }
    (acc, mag)
}

/// Partial fractions in `iy - a` and `iy - conj a`.
fn kernel_partial_fractions(k: u32, n: u32, a: C64) -> Result<(C64, f64)> {
    let b = a.conj();
    let ab = a - b;
    // int (1/(iy-a) - 1/(iy-b)) dy
    let log_part = I * (ray_log(a) - ray_log(b));
    let top = 2 * k - 1;
    // J(p) = int dy / ((iy-a)(iy-b)^p)
    let j_of = |p: u32| -> Result<(C64, f64)> {
        let mut acc = log_part / ab.powi(p as i32);
        let mut mag = acc.norm();
        for j in 2..=p {
            let t = y_integral_closed_form(0, j, b)? / ab.powi((p - j + 1) as i32);
            acc -= t;
            mag += t.norm();
        }
        Ok((acc, mag))
    };
    // y^n = (-i)^n x^n, x^n = sum_j C(n,j) b^{n-j} (x-b)^j
    let mut acc = C64::new(0.0, 0.0);
    let mut mag = 0.0;
    for j in 0..=n {
        let c = binomial_f64(n, j) * b.powi((n - j) as i32);
        let (v, m) = j_of(top - j)?;
        acc += c * v;
        mag += c.norm() * m;
    }
    Ok(((-I).powi(n as i32) * acc, mag))
}

/// `H_{1-k,n}(tau) = (2i)^{2k-2}/(2 pi) int_0^inf H_{k,k-1}(iy, tau) y^n dy`, summing the matrix
/// terms of `H_{k,k-1}` over shells of maximal entry `<= bound`, each integrated in closed form.
///
/// The remainder beyond the last shell is extrapolated from the decay of the two outermost dyadic
/// blocks of shells and added; the error is the change of the extrapolated value from half the
/// shells, plus ten times the last shell and the accumulated rounding error.
///
/// Points whose orbit comes within hyperbolic angle `guard` of `iR_+` are rejected: there the
/// integral is a principal value.
pub fn eval_h1kn_direct(k: u32, n: u32, tau: C64, bound: i64, guard: f64) -> Result<Value> {
    let d = eval_h1kn_shells(k, n, tau, bound, guard)?;
    Ok(Value { value: d.extrapolated, err: d.err })
}

#[derive(Clone, Debug)]
pub struct DirectSum {
    /// Plain sum over shells `1..=B`.
    pub truncated: C64,
    pub extrapolated: C64,
    pub err: f64,
    /// Contribution of each shell, including the prefactor.
    pub shells: Vec<C64>,
}

/// Geometric continuation of the tail from blocks `(B/4, B/2]` and `(B/2, B]`; zero when the
/// blocks do not decay.
fn tail_extrapolation(shells: &[C64]) -> C64 {
    let b = shells.len();
    if b < 8 {
        return C64::new(0.0, 0.0);
    }
    let outer: C64 = shells[b / 2..].iter().sum();
    let inner: C64 = shells[b / 4..b / 2].iter().sum();
    if inner.norm() == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let ratio = outer / inner;
    if ratio.norm() >= 0.95 {
        return C64::new(0.0, 0.0);
    }
    outer * ratio / (1.0 - ratio)
}

pub fn eval_h1kn_shells(k: u32, n: u32, tau: C64, bound: i64, guard: f64) -> Result<DirectSum> {
    if k < 2 || n > 2 * k - 2 {
        return Err(periods_core::error::CoreError::IndexOutOfRange { k, n }.into());
    }
    if !(tau.im > 0.0) {
        return Err(Error::Invalid(format!("tau = {tau} is not in the upper half-plane")));
    }
    let shells: Vec<Result<(C64, f64)>> = (1..=bound)
        .into_par_iter()
        .map(|s| {
            let mut acc = C64::new(0.0, 0.0);
            let mut noise = 0.0;
            for m in psl2_shell(s) {
                let w = mobius(&m, tau);
                if w.re.abs() < guard * w.im {
                    return Err(Error::PoleProximity {
                        form: format!("M = {m}"),
                        z: format!("{tau}"),
                        distance: w.re.abs() / w.im,
                    });
                }
                let j = tau * m.c as f64 + m.d as f64;
                let weight = j.powi(2 * k as i32 - 2) * w.im.powi(2 * k as i32 - 1);
                let (v, mag) = kernel_integral(k, n, w)?;
                acc += weight * v;
                noise += weight.norm() * mag;
            }
            Ok((acc, noise))
        })
        .collect();
    let scale = (2.0 * I).powi(2 * k as i32 - 2) / (2.0 * PI) * 2.0;
    let mut parts = Vec::with_capacity(shells.len());
    let mut noise = 0.0;
    for s in shells {
        let (v, m) = s?;
        parts.push(v * scale);
        noise += m * scale.abs();
    }
    let truncated: C64 = parts.iter().sum();
    let extrapolated = truncated + tail_extrapolation(&parts);
    let half = parts.len() / 2;
    let coarse = parts[..half].iter().sum::<C64>() + tail_extrapolation(&parts[..half]);
    let last = parts.last().map(|s| s.norm()).unwrap_or(0.0);
    let err = 2.0 * (extrapolated - coarse).norm() + 10.0 * last + 4.0 * f64::EPSILON * noise;
    Ok(DirectSum { truncated, extrapolated, err, shells: parts })
}

/// `P_{1-k,n} + (-1)^{n+1} (2k-2)!/(4 pi)^{2k-1} E_{R_n} - R_n^* - ((-1)^k d_{n,0} + d_{n,2k-2})
/// (2k-2)!/(2 pi)^{2k-1} E_{E_{2k}}`. On `E1` the locally polynomial part takes its average value.
pub fn splitting_rhs(k: u32, n: u32, tau: &ExactPoint, cfg: &Config) -> Result<Value> {
    let rep = if is_on_exceptional_set(tau) { Representation::Lemma } else { Representation::Theorem };
    let local = local_polynomial(k, n, tau, rep)?;
    let (re, im) = local.rest.to_f64();
    let mut value = C64::new(re, im) + local.eis.to_f64(zeta(2.0 * k as f64 - 1.0), zeta(2.0 * k as f64));
    let mut err = 1e-15 * value.norm();
    let (u, v) = tau.to_f64();
    let t = C64::new(u, v);
    let fact = factorial_f64(2 * k - 2);

    let rn = rn_coefficients(k, n, cfg)?;
    if rn.is_cuspidal() && rn.coeffs.iter().any(|c| c.norm() > 0.0) {
        let hol = eichler_holomorphic(&rn, t)?;
        let non = eichler_nonholomorphic(&rn, t)?;
        let c = if n.is_multiple_of(2) { -1.0 } else { 1.0 } * fact / (4.0 * PI).powi(2 * k as i32 - 1);
        value += hol.value * c - non.value;
        err += hol.err * c.abs() + non.err;
    }
    let delta = if n == 0 {
        if k.is_multiple_of(2) { 1.0 } else { -1.0 }
    } else if n == 2 * k - 2 {
        1.0
    } else {
        0.0
    };
    if delta != 0.0 {
        let e = eisenstein_coeffs(k, cfg.series_terms)?;
        let x = eichler_holomorphic(&e, t)?;
        let c = delta * fact / (2.0 * PI).powi(2 * k as i32 - 1);
        value -= x.value * c;
        err += x.err * c.abs();
    }
    Ok(Value { value, err })
}
