//! q-expansions, Eichler integrals and Petersson's Poincaré series.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use periods_core::bernoulli::bernoulli_number;
use periods_core::expfourier::ExpFourierExpr;
use periods_core::gamma::{ext_gcd, GammaMatrix};
use periods_core::rational::{rat, rat_big, to_f64, Rational};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{factorial_f64, upper_gamma_int_scaled, Value, C64, I};

/// `sum_{n >= 0} c(n) e(n tau)` truncated at `n = N`.
#[derive(Clone, Debug)]
pub struct FourierSeries {
    /// The weight `2k`.
    pub weight: u32,
    pub constant: C64,
    /// `c(1), ..., c(N)`.
    pub coeffs: Vec<C64>,
    /// Exact constant term and coefficients when known.
    pub exact: Option<(Rational, Vec<Rational>)>,
    /// Relative uncertainty of the numeric coefficients.
    pub coeff_rel_err: f64,
}

fn sigma(n: u64, e: u32) -> BigInt {
    let mut s = BigInt::zero();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            s += BigInt::from(d).pow(e);
            if d * d != n {
                s += BigInt::from(n / d).pow(e);
            }
        }
        d += 1;
    }
    s
}

/// `E_{2k} = 1 - (4k / B_{2k}) sum sigma_{2k-1}(n) q^n`.
pub fn eisenstein_coeffs(k: u32, n_max: usize) -> Result<FourierSeries> {
    if k < 2 {
        return Err(Error::Invalid(format!("Eisenstein series needs k >= 2, got {k}")));
    }
    let scale = -rat(4 * k as i64) / bernoulli_number(2 * k as usize);
    let exact: Vec<Rational> = (1..=n_max as u64).map(|n| &scale * rat_big(sigma(n, 2 * k - 1))).collect();
    Ok(FourierSeries {
        weight: 2 * k,
        constant: C64::new(1.0, 0.0),
        coeffs: exact.iter().map(|c| C64::new(to_f64(c), 0.0)).collect(),
        exact: Some((rat(1), exact)),
        coeff_rel_err: 0.0,
    })
}

/// Ramanujan's `Delta = q prod (1 - q^n)^24`.
pub fn delta_coeffs(n_max: usize) -> Result<FourierSeries> {
    if n_max == 0 {
        return Err(Error::Invalid("delta_coeffs needs N >= 1".into()));
    }
    // prod_{n <= N-1} (1 - q^n)^24 modulo q^N
    let mut p = vec![BigInt::zero(); n_max];
    p[0] = BigInt::one();
    for n in 1..n_max {
        for _ in 0..24 {
            for j in (n..n_max).rev() {
                let t = p[j - n].clone();
                p[j] -= t;
            }
        }
    }
    let exact: Vec<Rational> = p.into_iter().map(rat_big).collect();
    Ok(FourierSeries {
        weight: 12,
        constant: C64::new(0.0, 0.0),
        coeffs: exact.iter().map(|c| C64::new(to_f64(c), 0.0)).collect(),
        exact: Some((rat(0), exact)),
        coeff_rel_err: 0.0,
    })
}

impl FourierSeries {
    pub fn k(&self) -> u32 {
        self.weight / 2
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_cuspidal(&self) -> bool {
        self.constant == C64::new(0.0, 0.0)
    }

    /// Numeric multiple of this series.
    pub fn scaled(&self, s: C64, rel_err: f64) -> FourierSeries {
        FourierSeries {
            weight: self.weight,
            constant: self.constant * s,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            exact: None,
            coeff_rel_err: self.coeff_rel_err + rel_err,
        }
    }

    pub fn truncated(&self, n: usize) -> FourierSeries {
        let mut f = self.clone();
        f.coeffs.truncate(n);
        if let Some((_, ex)) = f.exact.as_mut() {
            ex.truncate(n);
        }
        f
    }

    /// `C` with `|c(n)| <= C n^{2k-1}` on the stored range, doubled as a safety margin for the tail.
    fn growth(&self) -> f64 {
        let e = self.weight as i32 - 1;
        2.0 * self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c.norm() / ((j + 1) as f64).powi(e))
            .fold(0.0, f64::max)
    }

    /// `sum_{n > N} C n^{2k-1} g(n)` for a decaying weight `g`.
    fn tail(&self, g: impl Fn(f64) -> f64) -> f64 {
        let c = self.growth();
        let e = self.weight as i32 - 1;
        let n0 = self.order() + 1;
        let mut s = 0.0;
        let mut last = 0.0;
        for n in n0..n0 + 64 {
            last = c * (n as f64).powi(e) * g(n as f64);
            s += last;
        }
        // geometric remainder
        let next = c * ((n0 + 64) as f64).powi(e) * g((n0 + 64) as f64);
        let ratio = if last > 0.0 { (next / last).min(0.999) } else { 0.0 };
        s + next / (1.0 - ratio)
    }
}

fn check_upper(tau: C64) -> Result<()> {
    if tau.im > 0.0 {
        Ok(())
    } else {
        Err(Error::Invalid(format!("{tau} is not in the upper half-plane")))
    }
}

fn q_power(tau: C64, n: usize) -> C64 {
    (2.0 * PI * I * tau * n as f64).exp()
}

/// `sum c(n) e(n tau)` in ascending `n` with the geometric tail bound.
pub fn eval_series(f: &FourierSeries, tau: C64) -> Result<Value> {
    check_upper(tau)?;
    let q = q_power(tau, 1);
    let mut acc = f.constant;
    let mut mag = f.constant.norm();
    let mut qn = C64::new(1.0, 0.0);
    for c in &f.coeffs {
        qn *= q;
        let t = c * qn;
        acc += t;
        mag += t.norm();
    }
    let r = q.norm();
    let tail = f.tail(|n| r.powf(n));
    Ok(Value { value: acc, err: tail + mag * (f.coeff_rel_err + 1e-15) })
}

/// `E_f(tau) = sum_{n >= 1} c(n) n^{1-2k} e(n tau)`.
pub fn eichler_holomorphic(f: &FourierSeries, tau: C64) -> Result<Value> {
    check_upper(tau)?;
    let e = 1 - f.weight as i32;
    let mut acc = C64::new(0.0, 0.0);
    let mut mag = 0.0;
    for (j, c) in f.coeffs.iter().enumerate() {
        let n = (j + 1) as f64;
        let t = c * n.powi(e) * q_power(tau, j + 1);
        acc += t;
        mag += t.norm();
    }
    let v = tau.im;
    let tail = f.tail(|n| n.powi(e) * (-2.0 * PI * n * v).exp());
    Ok(Value { value: acc, err: tail + mag * (f.coeff_rel_err + 1e-15) })
}

/// `f^*(tau) = -sum_{n >= 1} conj(c(n)) (4 pi n)^{1-2k} Gamma(2k-1, 4 pi n v) e(-n tau)`.
pub fn eichler_nonholomorphic(f: &FourierSeries, tau: C64) -> Result<Value> {
    check_upper(tau)?;
    let k = f.k();
    let e = 1 - f.weight as i32;
    let v = tau.im;
    // Gamma(2k-1, 4 pi n v) e(-n tau) = [Gamma e^{x}] e^{-2 pi n v} e(-n u)
    let mode = |n: f64| upper_gamma_int_scaled(2 * k - 1, 4.0 * PI * n * v) * (-2.0 * PI * n * v).exp();
    let mut acc = C64::new(0.0, 0.0);
    let mut mag = 0.0;
    for (j, c) in f.coeffs.iter().enumerate() {
        let n = (j + 1) as f64;
        let phase = (-2.0 * PI * I * n * tau.re).exp();
        let t = -c.conj() * (4.0 * PI * n).powi(e) * mode(n) * phase;
        acc += t;
        mag += t.norm();
    }
    let tail = f.tail(|n| (4.0 * PI * n).powi(e) * mode(n));
    Ok(Value { value: acc, err: tail + mag * (f.coeff_rel_err + 1e-15) })
}

/// `R^{steps}_kappa e(n tau) / e(n tau)`, a real function of `v`:
/// `sum_r C(steps, r) (kappa + r)_{steps - r} v^{r - steps} (-4 pi n)^r`.
pub fn raised_mode_factor(kappa: i32, steps: u32, n: f64, v: f64) -> f64 {
    let mut acc = 0.0;
    let mut binom = 1.0;
    for r in 0..=steps {
        let mut rising = 1.0;
        for j in 0..(steps - r) {
            rising *= (kappa + r as i32 + j as i32) as f64;
        }
        acc += binom * rising * v.powi(r as i32 - steps as i32) * (-4.0 * PI * n).powi(r as i32);
        binom *= (steps - r) as f64 / (r + 1) as f64;
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Eichler {
    Holomorphic,
    NonHolomorphic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RaisePath {
    /// Term by term on the Fourier expansion.
    Termwise,
    /// For `f^*`, through `R^{k-1} f^* = -(2k-2)!/(4 pi)^{2k-1} conj(R^{k-1} E_f)`.
    Conjugate,
}

fn gamma_mode_raised(k: u32, n: i64) -> Arc<ExpFourierExpr> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, i64), Arc<ExpFourierExpr>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(e) = cache.lock().unwrap().get(&(k, n)) {
        return e.clone();
    }
    let e = Arc::new(ExpFourierExpr::incomplete_gamma_mode(k, n).raise_iterated(k, k - 1));
    cache.lock().unwrap().insert((k, n), e.clone());
    e
}

/// `R^{k-1}_{2-2k}` of an Eichler integral of `f`.
pub fn raised_eichler(f: &FourierSeries, tau: C64, which: Eichler, path: RaisePath) -> Result<Value> {
    check_upper(tau)?;
    let k = f.k();
    let steps = k - 1;
    let kappa = 2 - 2 * k as i32;
    let e = 1 - f.weight as i32;
    let v = tau.im;
    let raised_holomorphic = || {
        let mut acc = C64::new(0.0, 0.0);
        let mut mag = 0.0;
        for (j, c) in f.coeffs.iter().enumerate() {
            let n = (j + 1) as f64;
            let t = c * n.powi(e) * q_power(tau, j + 1) * raised_mode_factor(kappa, steps, n, v);
            acc += t;
            mag += t.norm();
        }
        let tail = f.tail(|n| n.powi(e) * (-2.0 * PI * n * v).exp() * raised_mode_factor(kappa, steps, n, v).abs());
        Value { value: acc, err: tail + mag * (f.coeff_rel_err + 1e-15) }
    };
    match (which, path) {
        (Eichler::Holomorphic, _) => Ok(raised_holomorphic()),
        (Eichler::NonHolomorphic, RaisePath::Conjugate) => {
            let h = raised_holomorphic();
            let s = -factorial_f64(2 * k - 2) / (4.0 * PI).powi(2 * k as i32 - 1);
            Ok(Value { value: h.value.conj() * s, err: h.err * s.abs() })
        }
        (Eichler::NonHolomorphic, RaisePath::Termwise) => {
            let mut acc = C64::new(0.0, 0.0);
            let mut mag = 0.0;
            for (j, c) in f.coeffs.iter().enumerate() {
                let n = (j + 1) as i64;
                let (re, im) = gamma_mode_raised(k, n).eval_f64(tau.re, v);
                let t = -c.conj() * (4.0 * PI * n as f64).powi(e) * C64::new(re, im);
                acc += t;
                mag += t.norm();
            }
            let s = factorial_f64(2 * k - 2) / (4.0 * PI).powi(2 * k as i32 - 1);
            let tail = s * f.tail(|n| n.powi(e) * (-2.0 * PI * n * v).exp() * raised_mode_factor(kappa, steps, n, v).abs());
            Ok(Value { value: acc, err: tail + mag * (f.coeff_rel_err + 1e-13) })
        }
    }
}

/// PSL2(Z) representatives (`c > 0`, or `c = 0` and `d > 0`) with `max |entry| = s`.
pub fn psl2_shell(s: i64) -> Vec<GammaMatrix> {
    let mut out = Vec::new();
    if s == 1 {
        out.push(GammaMatrix::I);
    }
    if s >= 1 {
        out.push(GammaMatrix::translation(s));
        out.push(GammaMatrix::translation(-s));
    }
    for c in 1..=s {
        for d in -s..=s {
            let (g, x, y) = ext_gcd(d, c);
            if g != 1 {
                continue;
            }
            // a d - b c = 1 with a = x + t c, b = -y + t d
            let (a0, b0) = (x, -y);
            let mut lo = (-s - a0).div_euclid(c) - 1;
            let mut hi = (s - a0).div_euclid(c) + 1;
            if d != 0 {
                let (l2, h2) = if d > 0 {
                    ((-s - b0).div_euclid(d) - 1, (s - b0).div_euclid(d) + 1)
                } else {
                    ((s - b0).div_euclid(d) - 1, (-s - b0).div_euclid(d) + 1)
                };
                lo = lo.max(l2);
                hi = hi.min(h2);
            }
            for t in lo..=hi {
                let (a, b) = (a0 + t * c, b0 + t * d);
                if a.abs().max(b.abs()).max(c).max(d.abs()) == s {
                    out.push(GammaMatrix { a, b, c, d });
                }
            }
        }
    }
    out
}

pub fn mobius(m: &GammaMatrix, z: C64) -> C64 {
    (z * m.a as f64 + m.b as f64) / (z * m.c as f64 + m.d as f64)
}

/// Truncation of Petersson's Poincaré series `H_{k,l}(z, tau)` to matrices with entries bounded
/// by `bound`, summed over shells.
///
/// The error is an estimate, not a bound: the larger of ten times the last shell and a power-law
/// extrapolation of the two outermost dyadic blocks of shells, doubled.
pub fn eval_h_poincare(k: u32, l: i32, z: C64, tau: C64, bound: i64, guard: f64) -> Result<Value> {
    check_upper(z)?;
    check_upper(tau)?;
    if k < 2 || l.unsigned_abs() > k {
        return Err(Error::Invalid(format!("need k >= 2 and |l| <= k, got k = {k}, l = {l}")));
    }
    let kk = k as i32;
    let shells: Vec<Result<C64>> = (1..=bound)
        .into_par_iter()
        .map(|s| {
            let mut acc = C64::new(0.0, 0.0);
            for m in psl2_shell(s) {
                let w = mobius(&m, tau);
                if (z - w).norm() < guard {
                    return Err(Error::PoleProximity {
                        form: format!("M = {m}"),
                        z: format!("{z}"),
                        distance: (z - w).norm(),
                    });
                }
                let j = tau * m.c as f64 + m.d as f64;
                acc += j.powi(2 * l) * w.im.powi(kk + l) * (z - w).powi(l - kk) * (z - w.conj()).powi(-l - kk);
            }
            Ok(acc)
        })
        .collect();
    let shells = shells.into_iter().collect::<Result<Vec<C64>>>()?;
    let total: C64 = shells.iter().sum();
    Ok(Value { value: total * 2.0, err: 2.0 * shell_tail_estimate(&shells) })
}

/// Estimated remainder of a sum over shells `1..=B` given the shell contributions.
pub fn shell_tail_estimate(shells: &[C64]) -> f64 {
    let b = shells.len();
    let last = shells.last().map(|s| s.norm()).unwrap_or(0.0);
    if b < 8 {
        return 10.0 * last;
    }
    let outer: C64 = shells[b / 2..].iter().sum();
    let inner: C64 = shells[b / 4..b / 2].iter().sum();
    let ratio = outer.norm() / inner.norm().max(f64::MIN_POSITIVE);
    let extrapolated = if ratio < 0.95 { 2.0 * outer.norm() * ratio / (1.0 - ratio) } else { f64::INFINITY };
    extrapolated.max(10.0 * last)
}

pub fn bernoulli_f64(m: usize) -> f64 {
    bernoulli_number(m).to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::upper_gamma_int;

    #[test]
    fn eisenstein_and_delta() {
        let e4 = eisenstein_coeffs(2, 10).unwrap();
        assert_eq!(e4.exact.as_ref().unwrap().1[0], rat(240));
        let e6 = eisenstein_coeffs(3, 10).unwrap();
        assert_eq!(e6.exact.as_ref().unwrap().1[1], rat(-504 * 33));
        assert_eq!(e6.exact.as_ref().unwrap().0, rat(1));
        let d = delta_coeffs(12).unwrap();
        let tau: Vec<i64> = d.exact.as_ref().unwrap().1.iter().map(|c| c.to_integer().to_i64().unwrap()).collect();
        assert_eq!(&tau[..6], &[1, -24, 252, -1472, 4830, -6048]);
        assert_eq!(tau[5], tau[1] * tau[2]);
        assert_eq!(tau[11], tau[2] * tau[3]);
    }

    #[test]
    fn series_evaluation() {
        let e4 = eisenstein_coeffs(2, 40).unwrap();
        let v = eval_series(&e4, C64::new(0.0, 10.0)).unwrap();
        assert!((v.value.re - 1.0 - 240.0 * (-20.0 * PI).exp()).abs() < 1e-20);
        let tau = C64::new(1.0 / 3.0, 1.0);
        let a = eval_series(&e4, -1.0 / tau).unwrap();
        let b = eval_series(&e4, tau).unwrap();
        assert!((a.value - tau.powi(4) * b.value).norm() < 1e-10);
        let d20 = delta_coeffs(20).unwrap();
        let d40 = delta_coeffs(40).unwrap();
        let x = eval_series(&d20, I).unwrap();
        let y = eval_series(&d40, I).unwrap();
        assert!((x.value - y.value).norm() <= x.err);
        assert!(x.value.re > 0.0 && x.value.im.abs() < 1e-18);
        // Delta(i) = Gamma(1/4)^24 / (2^24 pi^18)
        assert!((y.value.re - 0.001_785_369_850_642_152).abs() < 1e-15);
    }

    #[test]
    fn incomplete_gamma_edge() {
        assert_eq!(upper_gamma_int(3, 0.0), 2.0);
        assert!((upper_gamma_int_scaled(5, 2.0) * (-2f64).exp() - upper_gamma_int(5, 2.0)).abs() < 1e-14);
    }

    #[test]
    fn raised_mode_matches_symbolic() {
        for k in 2..=6u32 {
            for n in 1..=3i64 {
                let sym = ExpFourierExpr::holomorphic_mode(n).raise_iterated(k, k - 1);
                let (u, v) = (0.3, 0.7);
                let (re, im) = sym.eval_f64(u, v);
                let want = raised_mode_factor(2 - 2 * k as i32, k - 1, n as f64, v) * q_power(C64::new(u, v), n as usize);
                assert!((C64::new(re, im) - want).norm() < 1e-12 * want.norm().max(1e-300), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn raised_paths_agree() {
        let d = delta_coeffs(40).unwrap();
        let tau = C64::new(1.0 / 3.0, 1.0);
        let a = raised_eichler(&d, tau, Eichler::NonHolomorphic, RaisePath::Termwise).unwrap();
        let b = raised_eichler(&d, tau, Eichler::NonHolomorphic, RaisePath::Conjugate).unwrap();
        assert!((a.value - b.value).norm() < 1e-12 * a.value.norm().max(1e-30) + 1e-25, "{a:?} {b:?}");
        // k = 1: no raising
        let mut w2 = d.clone();
        w2.weight = 2;
        let h = raised_eichler(&w2, tau, Eichler::Holomorphic, RaisePath::Termwise).unwrap();
        let plain = eichler_holomorphic(&w2, tau).unwrap();
        assert!((h.value - plain.value).norm() < 1e-15);
    }

    #[test]
    fn xi_of_nonholomorphic_eichler() {
        // xi_{2-2k} f^* = 2i v^{2-2k} conj(d f^*/d tau-bar) = f
        let d = delta_coeffs(40).unwrap();
        let tau = C64::new(0.2, 0.9);
        let h = 1e-5;
        let g = |t: C64| eichler_nonholomorphic(&d, t).unwrap().value;
        let dx = (g(tau + h) - g(tau - h)) / (2.0 * h);
        let dy = (g(tau + I * h) - g(tau - I * h)) / (2.0 * h);
        let dbar = 0.5 * (dx + I * dy);
        let xi = 2.0 * I * tau.im.powi(-10) * dbar.conj();
        let want = eval_series(&d, tau).unwrap().value;
        assert!((xi - want).norm() < 1e-6 * want.norm());
    }

    #[test]
    fn eisenstein_eichler_cocycle() {
        // E_{E_4} | (I - S) = (-2 pi i)^3 / 2! r_{E_4}
        let e4 = eisenstein_coeffs(2, 80).unwrap();
        let tau = C64::new(0.5, 1.0);
        let a = eichler_holomorphic(&e4, tau).unwrap().value;
        let b = eichler_holomorphic(&e4, -1.0 / tau).unwrap().value;
        let lhs = a - tau.powi(2) * b;
        // r_{E_4}(tau) = (tau^3 + 1/tau)/3 + sum i^{1-n} C(2,n) r_n tau^{2-n}
        let r0 = -PI * crate::numerics::zeta(3.0) / (3.0 * crate::numerics::zeta(4.0));
        let r1 = -5.0 / 6.0;
        let r2 = r0;
        let r = (tau.powi(3) + 1.0 / tau) / 3.0 + I * r0 * tau * tau + 2.0 * r1 * tau - I * r2;
        let rhs = (-2.0 * PI * I).powi(3) / 2.0 * r;
        assert!((lhs - rhs).norm() < 1e-10, "{lhs} vs {rhs}");
    }

    #[test]
    fn shells_partition() {
        let mut seen = std::collections::HashSet::new();
        for s in 1..=6 {
            for m in psl2_shell(s) {
                assert_eq!(m.a * m.d - m.b * m.c, 1);
                assert_eq!(m.max_entry(), s);
                assert!(m.c > 0 || (m.c == 0 && m.d > 0));
                assert!(seen.insert((m.a, m.b, m.c, m.d)));
            }
        }
        // brute force count for max entry <= 6
        let mut count = 0;
        for a in -6i64..=6 {
            for b in -6i64..=6 {
                for c in 0i64..=6 {
                    for d in -6i64..=6 {
                        if a * d - b * c == 1 && (c > 0 || d > 0) {
                            count += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(seen.len(), count);
    }

    #[test]
    fn poincare_matches_fkp() {
        use crate::fkp::FkpEvaluator;
        use periods_core::quadform::QuadForm;
        let p = QuadForm::new(1, 1, 1);
        let tau_p = C64::new(-0.5, 3f64.sqrt() / 2.0);
        let z = C64::new(0.25, 2.0);
        let h = eval_h_poincare(2, 0, z, tau_p, 200, 1e-3).unwrap();
        let f = FkpEvaluator::new(2, &p, 32768).unwrap().eval(z).unwrap();
        let want = f.value * (0.5 / 3f64.sqrt() * 3.0 * PI);
        assert!((h.value - want).norm() < h.err + f.err, "{h:?} vs {want}");
        // weight 2 - 2k in tau under T
        let a = eval_h_poincare(2, 1, z, C64::new(0.1, 0.8), 60, 1e-3).unwrap();
        let b = eval_h_poincare(2, 1, z, C64::new(1.1, 0.8), 60, 1e-3).unwrap();
        assert!((a.value - b.value).norm() < a.err + b.err);
    }
}
