//! Epstein zeta values `zeta_P(k) = sum_{(x,y) != 0} P(x,y)^{-k}` and the outer-period identity.

use num_traits::ToPrimitive;
use periods_core::quadform::QuadForm;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{integrate, zeta, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

fn shells(p: (f64, f64, f64), k: u32, from: i64, to: i64) -> f64 {
    let (a, b, c) = p;
    let q = |x: f64, y: f64| (a * x * x + b * x * y + c * y * y).powi(-(k as i32));
    let per_shell: Vec<f64> = (from..=to)
        .into_par_iter()
        .map(|s| {
            let sf = s as f64;
            // the square max(|x|, |y|) = s walked once
            let mut acc = 0.0;
            for t in -s..s {
                let t = t as f64;
                acc += q(sf, t) + q(-sf, -t) + q(-t, sf) + q(t, -sf);
            }
            acc
        })
        .collect();
    per_shell.iter().sum()
}

/// `int P(x,y)^{-k}` over the plane outside the square of half-side `r`.
fn outside_square(p: (f64, f64, f64), k: u32, r: f64) -> f64 {
    let (a, b, c) = p;
    let g = |t: f64| {
        let (s, co) = t.sin_cos();
        let pt = a * co * co + b * co * s + c * s * s;
        let rt = r / co.abs().max(s.abs());
        C64::new(pt.powi(-(k as i32)) * rt.powi(2 - 2 * k as i32) / (2.0 * k as f64 - 2.0), 0.0)
    };
    let quarter = std::f64::consts::FRAC_PI_4;
    (0..8).map(|j| integrate(g, j as f64 * quarter, (j + 1) as f64 * quarter, 1e-15).value.re).sum()
}

/// Square-shell sum up to `max(|x|,|y|) = shells`, completed by the integral over the rest of the
/// plane (outside the square of half-side `shells + 1/2`). The error is the change from half the
/// number of shells.
pub fn epstein_zeta(p: &QuadForm, k: u32, max_shell: i64) -> Result<Estimate> {
    if k < 2 {
        return Err(Error::Invalid(format!("Epstein zeta needs k >= 2, got {k}")));
    }
    if !p.is_positive_definite() {
        return Err(periods_core::error::CoreError::NotPositiveDefinite(p.to_string()).into());
    }
    let coeffs = p.to_f64();
    let half = (max_shell / 2).max(1);
    let inner = shells(coeffs, k, 1, half);
    let coarse = inner + outside_square(coeffs, k, half as f64 + 0.5);
    let value = inner + shells(coeffs, k, half + 1, max_shell) + outside_square(coeffs, k, max_shell as f64 + 0.5);
    Ok(Estimate { value, err: (value - coarse).abs() })
}

/// `-|d|^{k-1/2} zeta_P(k) / (2 (2k-1) |Gamma_P| zeta(2k))`, the real part of the outer periods
/// `r_0 = (-1)^k r_{2k-2}` of `f_{k,P}`.
pub fn outer_period_from_epstein(p: &QuadForm, k: u32, max_shell: i64) -> Result<Estimate> {
    let z = epstein_zeta(p, k, max_shell)?;
    let d = p.disc().to_f64().unwrap().abs();
    let stab = p.stabilizer_order()? as f64;
    let scale = -d.powf(k as f64 - 0.5) / (2.0 * (2.0 * k as f64 - 1.0) * stab * zeta(2.0 * k as f64));
    Ok(Estimate { value: scale * z.value, err: scale.abs() * z.err })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{l_chi_minus3, l_chi_minus4};
    use std::f64::consts::PI;

    #[test]
    fn factorizations() {
        let z = epstein_zeta(&QuadForm::new(1, 1, 1), 3, 400).unwrap();
        let want = 8.0 * PI.powi(3) * zeta(3.0) / (27.0 * 3f64.sqrt());
        assert!((z.value - want).abs() < 1e-8 * want, "{z:?} vs {want}");
        assert!((want - 6.0 * zeta(3.0) * l_chi_minus3(3.0)).abs() < 1e-12);
        let z = epstein_zeta(&QuadForm::new(1, 0, 1), 2, 400).unwrap();
        let want = 4.0 * zeta(2.0) * l_chi_minus4(2.0);
        assert!((z.value - want).abs() < 1e-8 * want, "{z:?} vs {want}");
        assert!(z.err < 1e-8);
    }

    #[test]
    fn shell_doubling_is_stable() {
        let p = QuadForm::new(2, 2, 3);
        let a = epstein_zeta(&p, 2, 100).unwrap();
        let b = epstein_zeta(&p, 2, 200).unwrap();
        assert!((a.value - b.value).abs() <= a.err.max(1e-14));
    }

    #[test]
    fn outer_period_for_minus_3() {
        let r = outer_period_from_epstein(&QuadForm::new(1, 1, 1), 2, 400).unwrap();
        assert!((r.value + 2.05670).abs() < 1e-5, "{r:?}");
    }
}
