//! Periods of `f_{k,P}`: exact values, quadrature, the closed formula with its cusp and Eisenstein
//! corrections, and the cusp forms `R_n` for one-dimensional cusp spaces.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_traits::{Signed, ToPrimitive, Zero};
use periods_core::error::CoreError;
use periods_core::exact_period::{exact_period, linear_combination_period, local_period_part, period_prefactor};
use periods_core::field::ExactNumber;
use periods_core::kz::cusp_space_dim;
use periods_core::local_poly::canonicalize_strip;
use periods_core::quadform::QuadForm;
use periods_core::rational::{rat, to_f64, Rational};
use serde::{Deserialize, Serialize};

use crate::cache::cached;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::modforms::{delta_coeffs, eisenstein_coeffs, eval_series, raised_eichler, Eichler, FourierSeries, RaisePath};
use crate::numeric_period::{fkp_periods, numeric_periods, NumericValue};
use crate::numerics::{factorial_f64, integrate, zeta, Value, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

/// Normalized generator of a one-dimensional `S_{2k}`: `Delta E_{2k-12}`.
pub fn cusp_basis(k: u32, n_max: usize) -> Result<Option<FourierSeries>> {
    if cusp_space_dim(k) != 1 {
        return Ok(None);
    }
    let delta = delta_coeffs(n_max)?;
    if k == 6 {
        return Ok(Some(delta));
    }
    let e = eisenstein_coeffs(k - 6, n_max)?;
    let (_, d) = delta.exact.as_ref().unwrap();
    let (e0, ec) = e.exact.as_ref().unwrap();
    // (sum_{m >= 1} d_m q^m)(e0 + sum_{j >= 1} e_j q^j)
    let mut out = vec![Rational::zero(); n_max];
    for m in 1..=n_max {
        let mut acc = &d[m - 1] * e0;
        for j in 1..m {
            acc += &d[m - 1 - j] * &ec[j - 1];
        }
        out[m - 1] = acc;
    }
    Ok(Some(FourierSeries {
        weight: 2 * k,
        constant: C64::new(0.0, 0.0),
        coeffs: out.iter().map(|c| C64::new(to_f64(c), 0.0)).collect(),
        exact: Some((rat(0), out)),
        coeff_rel_err: 0.0,
    }))
}

/// `<f, f> = int_{Gamma \ H} |f|^2 v^{2k-2} du dv` over the standard fundamental domain, cut at
/// `v = 8` (the remainder is below `e^{-32 pi}`).
pub fn petersson_norm(f: &FourierSeries, tol: f64) -> Result<Estimate> {
    if !f.is_cuspidal() {
        return Err(Error::Invalid("Petersson norm needs a cusp form".into()));
    }
    let w = f.weight as i32 - 2;
    let top = 8.0;
    let mut failure = None;
    let mut inner_err = 0.0;
    let outer = integrate(
        |u| {
            let lo = (1.0 - u * u).sqrt();
            let r = integrate(
                |v| match eval_series(f, C64::new(u, v)) {
                    Ok(x) => C64::new(x.value.norm_sqr() * v.powi(w), 0.0),
                    Err(e) => {
                        failure.get_or_insert(e);
                        C64::new(0.0, 0.0)
                    }
                },
                lo,
                top,
                tol * 1e-2,
            );
            inner_err += r.err;
            r.value
        },
        0.0,
        0.5,
        tol,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let value = 2.0 * outer.value.re;
    Ok(Estimate { value, err: 2.0 * outer.err + value * 1e-14 })
}

/// All periods of the normalized generator of `S_{2k}` and its Petersson norm, cached.
fn cusp_data(k: u32, cfg: &Config) -> Result<Option<(FourierSeries, Vec<NumericValue>, Estimate)>> {
    let Some(f) = cusp_basis(k, cfg.series_terms)? else { return Ok(None) };
    let key = (k, cfg.series_terms, cfg.quad_tol.to_bits());
    let (periods, norm): (Vec<NumericValue>, Estimate) = cached(cfg.cache_dir.as_deref(), "cusp-periods", &key, || {
        let periods = numeric_periods(&|z| eval_series(&f, z), k, &[], &cfg.quad())?;
        let norm = petersson_norm(&f, cfg.quad_tol * 1e-6)?;
        Ok((periods, norm))
    })?;
    Ok(Some((f, periods, norm)))
}

/// The cusp form `R_n` with `<g, R_n> = r_n(g)` for all `g` in `S_{2k}`; zero when `S_{2k} = {0}`.
pub fn rn_coefficients(k: u32, n: u32, cfg: &Config) -> Result<FourierSeries> {
    if k < 2 || n > 2 * k - 2 {
        return Err(CoreError::IndexOutOfRange { k, n }.into());
    }
    match cusp_space_dim(k) {
        0 => Ok(FourierSeries {
            weight: 2 * k,
            constant: C64::new(0.0, 0.0),
            coeffs: vec![C64::new(0.0, 0.0); cfg.series_terms],
            exact: Some((rat(0), vec![Rational::zero(); cfg.series_terms])),
            coeff_rel_err: 0.0,
        }),
        1 => {
            let (f, periods, norm) = cusp_data(k, cfg)?.expect("dimension one");
            let r = periods[n as usize];
            let scale = r.re / norm.value;
            let rel = r.err / r.re.abs().max(f64::MIN_POSITIVE) + norm.err / norm.value;
            Ok(f.scaled(C64::new(scale, 0.0), rel))
        }
        _ => Err(CoreError::CuspSpaceTooLarge { k }.into()),
    }
}

fn exact_to_c64(x: &ExactNumber) -> C64 {
    let (re, im) = x.to_f64();
    C64::new(re, im)
}

fn cm_point_f64(p: &QuadForm) -> Result<C64> {
    let tau = canonicalize_strip(&p.cm_point()?);
    let (u, v) = tau.to_f64();
    Ok(C64::new(u, v))
}

/// `r_n(f_{k,P})` from the closed formula: raised locally polynomial part, raised Eichler integrals of
/// `R_n`, and for the outer indices the raised Eichler integral of `E_{2k}`.
pub fn period_formula(p: &QuadForm, k: u32, n: u32, cfg: &Config) -> Result<Value> {
    let local = local_period_part(p, k, n)?;
    let zo = zeta(2.0 * k as f64 - 1.0);
    let ze = zeta(2.0 * k as f64);
    let mut value = exact_to_c64(&local.rest) + exact_to_c64(&local.eis_factor) * local.eis.to_f64(zo, ze);
    let mut err = 1e-14 * value.norm();

    let tau = cm_point_f64(p)?;
    let pre = exact_to_c64(&period_prefactor(p, k)?).re;
    let kf = factorial_f64(k - 1) * 2f64.powi(k as i32 - 2);

    let rn = rn_coefficients(k, n, cfg)?;
    if rn.coeffs.iter().any(|c| *c != C64::new(0.0, 0.0)) {
        let x = raised_eichler(&rn, tau, Eichler::NonHolomorphic, RaisePath::Conjugate)?;
        let sign_k = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let sign_n = if n.is_multiple_of(2) { -1.0 } else { 1.0 };
        value += (x.value.conj() * sign_n + x.value) * (pre * sign_k / kf);
        err += 2.0 * x.err * pre / kf;
    }
    if n == 0 || n == 2 * k - 2 {
        let e = eisenstein_coeffs(k, cfg.series_terms)?;
        let x = raised_eichler(&e, tau, Eichler::Holomorphic, RaisePath::Termwise)?;
        let sign = if n == 0 || k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let c = sign * 2f64.powi(k as i32 + 1) * factorial_f64(2 * k - 2)
            / ((4.0 * PI).powi(2 * k as i32 - 1) * factorial_f64(k - 1));
        value += x.value * (pre * c);
        err += x.err * (pre * c).abs();
    }
    Ok(Value { value, err })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Numeric,
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactJson {
    pub kind: String,
    pub value: String,
}

impl ExactJson {
    pub fn from_exact(x: &ExactNumber) -> Self {
        let rational_string = |q: &Rational| q.to_string();
        if x.is_rational() {
            ExactJson { kind: "rational".into(), value: rational_string(&x.gauss_part().re) }
        } else if x.is_i_rational() {
            ExactJson { kind: "i-rational".into(), value: rational_string(&x.gauss_part().im) }
        } else {
            ExactJson { kind: "field".into(), value: x.to_string() }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodResult {
    pub k: u32,
    pub n: u32,
    pub form: [i64; 3],
    pub exact: Option<ExactJson>,
    pub numeric: Option<NumericValue>,
    pub config: Config,
    #[serde(skip)]
    pub exact_value: Option<ExactNumber>,
}

impl PeriodResult {
    /// `(r_n(f^+), r_n(f^-)) = (Re r_n, -Im r_n)`.
    pub fn plus_minus(&self) -> Option<(f64, f64)> {
        if let Some(x) = &self.exact_value {
            let (re, im) = x.to_f64();
            return Some((re, -im));
        }
        self.numeric.map(|v| (v.re, -v.im))
    }

    /// The index `2k - 2 - n` and the sign `(-1)^k` relating the two periods.
    pub fn partner(&self) -> (u32, i32) {
        (2 * self.k - 2 - self.n, if self.k.is_multiple_of(2) { 1 } else { -1 })
    }

    /// `|exact - numeric| <= err` when both are present.
    pub fn consistent(&self) -> bool {
        match (&self.exact_value, &self.numeric) {
            (Some(x), Some(v)) => (exact_to_c64(x) - v.value()).norm() <= v.err,
            _ => true,
        }
    }
}

pub fn form_triple(p: &QuadForm) -> Result<[i64; 3]> {
    let t = [&p.a, &p.b, &p.c].map(|x| x.to_i64());
    match t {
        [Some(a), Some(b), Some(c)] => Ok([a, b, c]),
        _ => Err(Error::Invalid(format!("coefficients of {p} too large"))),
    }
}

/// `r_n(f_{k,P})` exactly when `0 < n < 2k-2` and `S_{2k} = {0}`, otherwise `None`.
pub fn try_exact(p: &QuadForm, k: u32, n: u32) -> Result<Option<ExactNumber>> {
    if n == 0 || n >= 2 * k - 2 || cusp_space_dim(k) != 0 {
        return Ok(None);
    }
    Ok(Some(exact_period(p, k, n)?))
}

/// All periods `n = 0..=2k-2` of `f_{k,P}`.
pub fn compute_periods(p: &QuadForm, k: u32, mode: Mode, cfg: &Config) -> Result<Vec<PeriodResult>> {
    cfg.validate()?;
    if k < 2 {
        return Err(Error::Invalid(format!("k must be at least 2, got {k}")));
    }
    if !p.is_positive_definite() {
        return Err(CoreError::NotPositiveDefinite(p.to_string()).into());
    }
    let form = form_triple(p)?;
    let numeric = match mode {
        Mode::Exact => None,
        _ => Some(fkp_periods(k, p, cfg.orbit_bound_for(k), &cfg.quad())?),
    };
    let mut out = Vec::new();
    for n in 0..=2 * k - 2 {
        let exact_value = match mode {
            Mode::Numeric => None,
            _ => try_exact(p, k, n)?,
        };
        out.push(PeriodResult {
            k,
            n,
            form,
            exact: exact_value.as_ref().map(ExactJson::from_exact),
            numeric: numeric.as_ref().map(|v| v[n as usize]),
            config: cfg.clone(),
            exact_value,
        });
    }
    Ok(out)
}

pub fn compute_period(p: &QuadForm, k: u32, n: u32, mode: Mode, cfg: &Config) -> Result<PeriodResult> {
    if k < 2 || n > 2 * k - 2 {
        return Err(CoreError::IndexOutOfRange { k, n }.into());
    }
    if mode == Mode::Exact && try_exact(p, k, n)?.is_none() {
        return Err(Error::Invalid(format!(
            "no exact value for k = {k}, n = {n}: only interior periods with S_{{2k}} = 0 are exact"
        )));
    }
    Ok(compute_periods(p, k, mode, cfg)?.swap_remove(n as usize))
}

/// Exact value and quadrature value of `sum a_n r_n(f_{k,P})` for a relation among the `R_n`.
pub fn combination(p: &QuadForm, k: u32, coeffs: &BTreeMap<u32, Rational>, cfg: &Config) -> Result<(ExactNumber, NumericValue)> {
    let exact = linear_combination_period(p, k, coeffs)?;
    let periods = fkp_periods(k, p, cfg.orbit_bound_for(k), &cfg.quad())?;
    let mut v = NumericValue { re: 0.0, im: 0.0, err: 0.0 };
    for (&n, a) in coeffs {
        let r = periods.get(n as usize).ok_or(CoreError::IndexOutOfRange { k, n })?;
        let a = to_f64(a);
        v.re += a * r.re;
        v.im += a * r.im;
        v.err += a.abs() * r.err;
    }
    Ok((exact, v))
}

/// `-|d|^{k-1/2} zeta_P(k) / (2 (2k-1) |Gamma_P| zeta(2k))`.
pub fn outer_period_target(p: &QuadForm, k: u32, cfg: &Config) -> Result<crate::epstein::Estimate> {
    crate::epstein::outer_period_from_epstein(p, k, cfg.matrix_bound.max(400))
}

pub fn abs_disc(p: &QuadForm) -> i64 {
    p.disc().abs().to_i64().unwrap_or(i64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use periods_core::kz::{extract_periods, kz_period_polynomial};

    #[test]
    fn petersson_norm_of_delta() {
        let d = delta_coeffs(40).unwrap();
        let n = petersson_norm(&d, 1e-14).unwrap();
        assert!((n.value - 1.035_362_056_804_32e-6).abs() < 1e-12 * 1e-6 * 1e3, "{n:?}");
    }

    #[test]
    fn rn_normalization_against_kohnen_zagier() {
        let cfg = Config::default();
        // odd periods of R_n for even n are encoded in r^-_{R_n}
        let poly = kz_period_polynomial(6, 2).unwrap();
        let exact = extract_periods(&poly).unwrap();
        let r2 = rn_coefficients(6, 2, &cfg).unwrap();
        let numeric = numeric_periods(&|z| eval_series(&r2, z), 6, &[], &cfg.quad()).unwrap();
        for (m, want) in exact {
            let (re, _) = want.to_f64();
            assert!((numeric[m as usize].re - re).abs() < 1e-4 * re.abs().max(1.0), "m={m}: {} vs {re}", numeric[m as usize].re);
        }
        let r8 = rn_coefficients(6, 8, &cfg).unwrap();
        assert!((r8.coeffs[0] - r2.coeffs[0]).norm() < 1e-12 * r2.coeffs[0].norm());
    }

    #[test]
    fn formula_matches_quadrature() {
        let cfg = Config::default();
        let p = QuadForm::new(1, 1, 1);
        for (k, n) in [(2, 0), (3, 4), (6, 1), (6, 0), (6, 5), (7, 12)] {
            let f = period_formula(&p, k, n, &cfg).unwrap();
            let q = fkp_periods(k, &p, cfg.orbit_bound_for(k), &cfg.quad()).unwrap()[n as usize];
            assert!((f.value - q.value()).norm() < 1e-6, "k={k} n={n}: {f:?} vs {q:?}");
        }
        let p = QuadForm::new(2, 2, 3);
        let f = period_formula(&p, 2, 0, &cfg).unwrap();
        let q = fkp_periods(2, &p, cfg.orbit_bound_for(2), &cfg.quad()).unwrap()[0];
        assert!((f.value - q.value()).norm() < 1e-6, "{f:?} vs {q:?}");
    }

    #[test]
    fn results_and_json() {
        let cfg = Config::default();
        let p = QuadForm::new(1, 1, 1);
        let r = compute_period(&p, 4, 3, Mode::Both, &cfg).unwrap();
        assert_eq!(r.exact.as_ref().unwrap().kind, "rational");
        assert_eq!(r.exact.as_ref().unwrap().value, "2/3");
        assert!(r.consistent());
        assert_eq!(r.partner(), (3, 1));
        let js = serde_json::to_value(&r).unwrap();
        assert_eq!(js["form"], serde_json::json!([1, 1, 1]));
        assert!(js["numeric"]["err"].as_f64().unwrap() < 1e-6);
        let (plus, minus) = r.plus_minus().unwrap();
        assert!((plus - 2.0 / 3.0).abs() < 1e-15 && minus == 0.0);
        let r0 = compute_period(&p, 2, 0, Mode::Numeric, &cfg).unwrap();
        assert!((r0.plus_minus().unwrap().0 + 2.05670).abs() < 1e-5);
        assert!(r0.exact.is_none());
        assert!(compute_period(&p, 2, 0, Mode::Exact, &cfg).is_err());
    }

    #[test]
    fn cohen_combination_both_ways() {
        let cfg = Config::default();
        let coeffs: BTreeMap<u32, Rational> = [(1, rat(10)), (3, rat(-24)), (5, rat(6))].into_iter().collect();
        let (exact, numeric) = combination(&QuadForm::new(1, 1, 1), 6, &coeffs, &cfg).unwrap();
        assert_eq!(exact, ExactNumber::from_int(-108));
        assert!((numeric.re + 108.0).abs() < 1e-3);
    }
}
