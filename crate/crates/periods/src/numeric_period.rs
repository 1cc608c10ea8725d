//! Numeric periods `r_n(f) = int_0^inf f(iy) y^n dy`, folded onto `[1, inf)` with
//! `f(-1/z) = z^{2k} f(z)`:
//! `r_n(f) = int_1^inf f(iy) (y^n + (-1)^k y^{2k-2-n}) dy`.

use std::cell::RefCell;
use std::f64::consts::PI;

use periods_core::quadform::QuadForm;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fkp::{FkpEvaluator, Value};
use crate::numerics::{integrate_vec, C64, I};

/// Treatment of poles of the integrand on the imaginary axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AxisPoles {
    #[default]
    Reject,
    /// Average of the two contours that detour around the pole on either side.
    PrincipalValue,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Absolute tolerance per period.
    pub tol: f64,
    pub axis_poles: AxisPoles,
    /// Radius of the detour around an axis pole.
    pub detour_radius: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { tol: 1e-10, axis_poles: AxisPoles::Reject, detour_radius: 0.2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericValue {
    pub re: f64,
    pub im: f64,
    pub err: f64,
}

impl NumericValue {
    pub fn value(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

enum Piece {
    Segment(f64, f64),
    /// `y = y0 + delta e^{i theta}` for `theta` from `from` to `0`, with a weight.
    Arc { y0: f64, delta: f64, from: f64, weight: f64 },
}

/// All periods `r_0 .. r_{2k-2}` of a weight `2k` form given by a point evaluator.
///
/// `axis_poles` lists the heights `y >= 1` of poles on the imaginary axis.
pub fn numeric_periods(
    f: &(dyn Fn(C64) -> Result<Value> + Sync),
    k: u32,
    axis_poles: &[f64],
    cfg: &QuadConfig,
) -> Result<Vec<NumericValue>> {
    let m = 2 * k as usize - 2;
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut poles: Vec<f64> = axis_poles.iter().cloned().filter(|y| *y >= 1.0 - 1e-9).collect();
    poles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if let Some(&p) = poles.first() {
        if (p - 1.0).abs() < 1e-9 {
            return Err(Error::CpvExcluded("f has a pole at the fold point i".into()));
        }
    }
    if !poles.is_empty() && cfg.axis_poles == AxisPoles::Reject {
        return Err(Error::CpvExcluded(format!("f has a pole at {} on the imaginary axis", C64::new(0.0, poles[0]))));
    }

    // upper limit: stop once the remaining tail is negligible
    let mut ymax = poles.last().map(|p| p + 1.0).unwrap_or(2.0).max(2.0);
    loop {
        let v = f(I * ymax)?;
        let tail = v.value.norm() * (1.0 + ymax.powi(m as i32)) / (2.0 * PI);
        if tail < cfg.tol * 1e-2 || ymax > 200.0 {
            break;
        }
        ymax += 1.0;
    }

    let mut pieces = Vec::new();
    let mut start = 1.0;
    for (j, &y0) in poles.iter().enumerate() {
        let next = poles.get(j + 1).copied().unwrap_or(f64::INFINITY);
        let prev = if j == 0 { 1.0 } else { poles[j - 1] };
        let delta = cfg.detour_radius.min(0.45 * (y0 - prev)).min(0.45 * (next - y0));
        pieces.push(Piece::Segment(start, y0 - delta));
        pieces.push(Piece::Arc { y0, delta, from: PI, weight: 0.5 });
        pieces.push(Piece::Arc { y0, delta, from: -PI, weight: 0.5 });
        start = y0 + delta;
    }
    pieces.push(Piece::Segment(start, ymax));

    let failure: RefCell<Option<Error>> = RefCell::new(None);
    // components: m + 1 periods, then m + 1 propagated evaluation errors
    let integrand = |y: C64, dy: C64| -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); 2 * (m + 1)];
        if failure.borrow().is_some() {
            return out;
        }
        match f(I * y) {
            Ok(v) => {
                for n in 0..=m {
                    let w = y.powi(n as i32) + y.powi((m - n) as i32) * sign;
                    out[n] = v.value * w * dy;
                    out[m + 1 + n] = C64::new(v.err * w.norm() * dy.norm(), 0.0);
                }
            }
            Err(e) => *failure.borrow_mut() = Some(e),
        }
        out
    };
    let mut total = vec![C64::new(0.0, 0.0); 2 * (m + 1)];
    let mut quad_err = vec![0.0; 2 * (m + 1)];
    for piece in &pieces {
        let (vals, errs) = match *piece {
            Piece::Segment(a, b) => integrate_vec(|y| integrand(C64::new(y, 0.0), C64::new(1.0, 0.0)), a, b, cfg.tol),
            Piece::Arc { y0, delta, from, weight } => {
                let (v, e) = integrate_vec(
                    |t| {
                        let u = C64::from_polar(delta, t);
                        integrand(y0 + u, I * u)
                    },
                    from,
                    0.0,
                    cfg.tol,
                );
                (v.into_iter().map(|x| x * weight).collect(), e.into_iter().map(|x| x * weight).collect())
            }
        };
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        for j in 0..total.len() {
            total[j] += vals[j];
            quad_err[j] += errs[j];
        }
    }
    Ok((0..=m)
        .map(|n| NumericValue {
            re: total[n].re,
            im: total[n].im,
            err: quad_err[n] + total[m + 1 + n].re + cfg.tol,
        })
        .collect())
}

pub fn numeric_period(
    f: &(dyn Fn(C64) -> Result<Value> + Sync),
    k: u32,
    n: u32,
    axis_poles: &[f64],
    cfg: &QuadConfig,
) -> Result<NumericValue> {
    if n > 2 * k - 2 {
        return Err(periods_core::error::CoreError::IndexOutOfRange { k, n }.into());
    }
    Ok(numeric_periods(f, k, axis_poles, cfg)?[n as usize])
}

/// All periods from the integral over `(0, oo)` itself, without folding at `i`; the relation
/// `r_n = (-1)^k r_{2k-2-n}` is then a property of the result rather than of the method.
/// Requires `f` to be pole-free on the imaginary axis.
pub fn unfolded_periods(f: &(dyn Fn(C64) -> Result<Value> + Sync), k: u32, cfg: &QuadConfig) -> Result<Vec<NumericValue>> {
    let m = 2 * k as usize - 2;
    let mut ymax = 2.0f64;
    loop {
        let v = f(I * ymax)?;
        let tail = v.value.norm() * (1.0 + ymax.powi(m as i32)) / (2.0 * PI);
        if tail < cfg.tol * 1e-2 || ymax > 200.0 {
            break;
        }
        ymax += 1.0;
    }
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let integrand = |y: f64| -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); 2 * (m + 1)];
        if failure.borrow().is_some() {
            return out;
        }
        match f(I * y) {
            Ok(v) => {
                for n in 0..=m {
                    let w = y.powi(n as i32);
                    out[n] = v.value * w;
                    out[m + 1 + n] = C64::new(v.err * w, 0.0);
                }
            }
            Err(e) => *failure.borrow_mut() = Some(e),
        }
        out
    };
    let mut total = vec![C64::new(0.0, 0.0); 2 * (m + 1)];
    let mut quad_err = vec![0.0; 2 * (m + 1)];
    // geometric pieces towards 0, where f(iy) y^n is concentrated near y = 1/ymax
    let mut edges = vec![1.0 / ymax];
    let mut y = 1.0 / ymax;
    while y < 1.0 {
        y = (y * 2.0).min(1.0);
        edges.push(y);
    }
    edges.push(ymax);
    for w in edges.windows(2) {
        let (vals, errs) = integrate_vec(&integrand, w[0], w[1], cfg.tol);
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        for j in 0..total.len() {
            total[j] += vals[j];
            quad_err[j] += errs[j];
        }
    }
    Ok((0..=m)
        .map(|n| NumericValue {
            re: total[n].re,
            im: total[n].im,
            // the two cut-off tails are below tol / 100 each
            err: quad_err[n] + total[m + 1 + n].re + cfg.tol,
        })
        .collect())
}

/// All numeric periods of `f_{k,P}`.
pub fn fkp_periods(k: u32, p: &QuadForm, orbit_bound: i64, cfg: &QuadConfig) -> Result<Vec<NumericValue>> {
    let f = FkpEvaluator::new(k, p, orbit_bound)?;
    let poles = f.axis_poles();
    numeric_periods(&|z| f.eval(z), k, &poles, cfg)
}

/// [`unfolded_periods`] of `f_{k,P}`.
pub fn fkp_unfolded_periods(k: u32, p: &QuadForm, orbit_bound: i64, cfg: &QuadConfig) -> Result<Vec<NumericValue>> {
    let f = FkpEvaluator::new(k, p, orbit_bound)?;
    if let Some(y) = f.axis_poles().first() {
        return Err(Error::CpvExcluded(format!("f has a pole at {} on the imaginary axis", C64::new(0.0, *y))));
    }
    unfolded_periods(&|z| f.eval(z), k, cfg)
}
