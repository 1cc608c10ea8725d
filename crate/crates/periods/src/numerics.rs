//! Quadrature, zeta values and cotangent sums.

use std::f64::consts::PI;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

pub type C64 = Complex64;

pub const I: C64 = C64::new(0.0, 1.0);

/// A complex value with an absolute error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Value {
    pub value: C64,
    pub err: f64,
}

fn rule(deg: usize) -> &'static [(f64, f64)] {
    static LOW: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    static HIGH: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    let cell = if deg == 20 { &LOW } else { &HIGH };
    cell.get_or_init(|| {
        let q = GaussLegendre::new(deg).expect("degree >= 2");
        q.iter().map(|(x, w)| (*x, *w)).collect()
    })
}

/// Panels whose two rules agree to this multiple of the rounding level of `sum |f| w` are
/// accepted whatever the tolerance.
const ROUNDING_FLOOR: f64 = 64.0 * f64::EPSILON;

/// Rule value and `sum |f| w` over the panel.
fn panel(f: &mut impl FnMut(f64) -> C64, a: f64, b: f64, deg: usize) -> (C64, f64) {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut s = C64::new(0.0, 0.0);
    let mut mag = 0.0;
    for &(x, w) in rule(deg) {
        let v = f(mid + half * x) * w;
        s += v;
        mag += v.norm();
    }
    (s * half, mag * half.abs())
}

#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: C64,
    pub err: f64,
    pub panels: usize,
}

/// Adaptive Gauss-Legendre on `[a, b]`: each panel is accepted when the 20- and 40-point rules
/// agree to within `tol * width / (b - a)`, or to rounding level; the reported error is the sum of
/// those differences.
pub fn integrate(mut f: impl FnMut(f64) -> C64, a: f64, b: f64, tol: f64) -> QuadResult {
    let total = (b - a).abs().max(f64::MIN_POSITIVE);
    let mut stack = vec![(a, b, 0u32)];
    let mut value = C64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut panels = 0;
    while let Some((lo, hi, depth)) = stack.pop() {
        let (coarse, _) = panel(&mut f, lo, hi, 20);
        let (fine, mag) = panel(&mut f, lo, hi, 40);
        let diff = (fine - coarse).norm();
        if diff <= (tol * (hi - lo).abs() / total).max(ROUNDING_FLOOR * mag) || depth >= 40 {
            value += fine;
            err += diff;
            panels += 1;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    QuadResult { value, err, panels }
}

/// Vector-valued variant of [`integrate`]: one evaluation per node serves every component, and a
/// panel is accepted when all components agree between the two rules.
pub fn integrate_vec(mut f: impl FnMut(f64) -> Vec<C64>, a: f64, b: f64, tol: f64) -> (Vec<C64>, Vec<f64>) {
    let total = (b - a).abs().max(f64::MIN_POSITIVE);
    let mut stack = vec![(a, b, 0u32)];
    let mut value: Vec<C64> = Vec::new();
    let mut err: Vec<f64> = Vec::new();
    let mut both = |lo: f64, hi: f64| {
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let mut out = [Vec::new(), Vec::new()];
        let mut mag = Vec::new();
        for (slot, deg) in [(0, 20), (1, 40)] {
            for &(x, w) in rule(deg) {
                let v = f(mid + half * x);
                if out[slot].is_empty() {
                    out[slot] = vec![C64::new(0.0, 0.0); v.len()];
                    mag = vec![0.0; v.len()];
                }
                for ((acc, m), t) in out[slot].iter_mut().zip(mag.iter_mut()).zip(v) {
                    let t = t * (w * half);
                    *acc += t;
                    *m += t.norm();
                }
            }
        }
        let [c, fine] = out;
        (c, fine, mag)
    };
    while let Some((lo, hi, depth)) = stack.pop() {
        let (coarse, fine, mag) = both(lo, hi);
        let diffs: Vec<f64> = coarse.iter().zip(&fine).map(|(c, f)| (f - c).norm()).collect();
        let allowed = tol * (hi - lo).abs() / total;
        let converged = diffs.iter().zip(&mag).all(|(d, m)| *d <= allowed.max(ROUNDING_FLOOR * m));
        if converged || depth >= 40 {
            if value.is_empty() {
                value = vec![C64::new(0.0, 0.0); fine.len()];
                err = vec![0.0; fine.len()];
            }
            for j in 0..fine.len() {
                value[j] += fine[j];
                err[j] += diffs[j];
            }
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    (value, err)
}

/// Hurwitz zeta `sum_{j >= 0} (j + a)^{-s}` for real `s > 1`, `a > 0`, by Euler-Maclaurin.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(s > 1.0 && a > 0.0);
    const N: usize = 20;
    // B_{2j} / (2j)!
    const B: [f64; 8] = [
        1.0 / 6.0 / 2.0,
        -1.0 / 30.0 / 24.0,
        1.0 / 42.0 / 720.0,
        -1.0 / 30.0 / 40320.0,
        5.0 / 66.0 / 3628800.0,
        -691.0 / 2730.0 / 479001600.0,
        7.0 / 6.0 / 87178291200.0,
        -3617.0 / 510.0 / 20922789888000.0,
    ];
    let mut sum = 0.0;
    for j in 0..N {
        sum += (j as f64 + a).powf(-s);
    }
    let x = N as f64 + a;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // rising products s (s+1) ... (s + 2j - 2)
    let mut rising = s;
    let mut xp = x.powf(-s - 1.0);
    for (j, b) in B.iter().enumerate() {
        sum += b * rising * xp;
        let m = 2.0 * j as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        xp /= x * x;
    }
    sum
}

pub fn zeta(s: f64) -> f64 {
    hurwitz_zeta(s, 1.0)
}

/// `L(chi_{-3}, s)` and `L(chi_{-4}, s)` through Hurwitz values.
pub fn l_chi_minus3(s: f64) -> f64 {
    3f64.powf(-s) * (hurwitz_zeta(s, 1.0 / 3.0) - hurwitz_zeta(s, 2.0 / 3.0))
}

pub fn l_chi_minus4(s: f64) -> f64 {
    4f64.powf(-s) * (hurwitz_zeta(s, 0.25) - hurwitz_zeta(s, 0.75))
}

/// `e(x) = exp(2 pi i x)`.
pub fn e(x: C64) -> C64 {
    (x * (2.0 * PI) * I).exp()
}

/// `cot(pi x)` without overflow for large `|Im x|`.
pub fn cot_pi(x: C64) -> C64 {
    if x.im >= 0.0 {
        let q = e(x);
        -I * (1.0 + q) / (1.0 - q)
    } else {
        -cot_pi(-x)
    }
}

/// Integer coefficients of `P_m` with `d^m/dx^m cot(x) = P_m(cot x)`.
pub fn cot_derivative_poly(m: usize) -> Vec<f64> {
    let mut p = vec![0.0, 1.0];
    for _ in 0..m {
        // P' (c) * -(1 + c^2)
        let mut dp = vec![0.0; p.len().saturating_sub(1).max(1)];
        for (j, c) in p.iter().enumerate().skip(1) {
            dp[j - 1] = c * j as f64;
        }
        let mut next = vec![0.0; dp.len() + 2];
        for (j, c) in dp.iter().enumerate() {
            next[j] -= c;
            next[j + 2] -= c;
        }
        while next.len() > 1 && *next.last().unwrap() == 0.0 {
            next.pop();
        }
        p = next;
    }
    p
}

fn horner(p: &[f64], x: C64) -> C64 {
    p.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * x + c)
}

/// `sum_{j in Z} (x + j)^{-p}` for `p >= 1` (symmetric summation for `p = 1`).
pub fn lipschitz_sum(x: C64, p: usize, polys: &[Vec<f64>]) -> C64 {
    assert!(p >= 1);
    let c = cot_pi(x);
    let fact: f64 = (1..p).map(|j| j as f64).product();
    let sign = if (p - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    horner(&polys[p - 1], c) * (sign * PI.powi(p as i32) / fact)
}

/// `Gamma(s, x)` for integer `s >= 1`: `(s-1)! e^{-x} sum_{j < s} x^j / j!`.
pub fn upper_gamma_int(s: u32, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..s {
        term *= x / j as f64;
        sum += term;
    }
    let fact: f64 = (1..s).map(|j| j as f64).product();
    fact * (-x).exp() * sum
}

/// `Gamma(s, x) e^x` for integer `s >= 1`.
pub fn upper_gamma_int_scaled(s: u32, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..s {
        term *= x / j as f64;
        sum += term;
    }
    factorial_f64(s - 1) * sum
}

pub fn factorial_f64(n: u32) -> f64 {
    (1..=n).map(|j| j as f64).product()
}
