//! Verification suites. Every check carries its observed residual and tolerance; exact checks
//! use tolerance zero.

use std::f64::consts::PI;

use periods_core::checks::{
    gram_pairs, raising_residual, representation_residual, s_cocycle_residual, t_cocycle_residual,
};
use periods_core::exact_period::local_period_part;
use periods_core::exceptional::is_on_exceptional_set;
use periods_core::expfourier::eichler_mode_residual;
use periods_core::field::ExactNumber;
use periods_core::gamma::GammaMatrix;
use periods_core::kz::{cusp_space_trivial, kz_period_polynomial};
use periods_core::local_poly::{local_polynomial, Representation};
use periods_core::point::ExactPoint;
use periods_core::quadform::QuadForm;
use periods_core::rational::{frac, rat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::epstein::outer_period_from_epstein;
use crate::error::Result;
use crate::lhmf::{eval_h1kn_direct, jump_check, splitting_rhs};
use crate::modforms::{delta_coeffs, eichler_holomorphic, eisenstein_coeffs, raised_eichler, Eichler, RaisePath};
use crate::numeric_period::{fkp_periods, fkp_unfolded_periods, AxisPoles};
use crate::numerics::{zeta, C64};
use crate::period::{compute_periods, try_exact, Mode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Raising,
    Eichler,
    KzZero,
    Gram,
    PolynomialReps,
    Trafo,
    Splitting,
    Jumps,
    Outer,
    Parity,
    All,
}

impl Suite {
    pub const EACH: [Suite; 10] = [
        Suite::Raising,
        Suite::Eichler,
        Suite::KzZero,
        Suite::Gram,
        Suite::PolynomialReps,
        Suite::Trafo,
        Suite::Splitting,
        Suite::Jumps,
        Suite::Outer,
        Suite::Parity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Raising => "raising",
            Suite::Eichler => "eichler",
            Suite::KzZero => "kz-zero",
            Suite::Gram => "gram",
            Suite::PolynomialReps => "polynomial-reps",
            Suite::Trafo => "trafo",
            Suite::Splitting => "splitting",
            Suite::Jumps => "jumps",
            Suite::Outer => "outer",
            Suite::Parity => "parity",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Zero for exact checks.
    pub tolerance: f64,
    pub residual: f64,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub detail: String,
}

impl Check {
    fn exact(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed: ok, tolerance: 0.0, residual: if ok { 0.0 } else { 1.0 }, detail: detail.into() }
    }

    fn numeric(name: impl Into<String>, residual: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed: residual <= tolerance, tolerance, residual, detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: Suite, checks: Vec<Check>) -> Self {
        SuiteReport { suite: suite.name().into(), passed: checks.iter().all(|c| c.passed), checks }
    }
}

pub fn run(suite: Suite, cfg: &Config) -> Result<Vec<SuiteReport>> {
    if suite == Suite::All {
        return Suite::EACH.iter().map(|&s| run_one(s, cfg)).collect();
    }
    Ok(vec![run_one(suite, cfg)?])
}

pub fn run_one(suite: Suite, cfg: &Config) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Raising => raising()?,
        Suite::Eichler => eichler()?,
        Suite::KzZero => kz_zero()?,
        Suite::Gram => gram()?,
        Suite::PolynomialReps => polynomial_reps()?,
        Suite::Trafo => trafo(cfg)?,
        Suite::Splitting => splitting(cfg)?,
        Suite::Jumps => jumps()?,
        Suite::Outer => outer(cfg)?,
        Suite::Parity => parity(cfg)?,
        Suite::All => unreachable!("expanded by run"),
    };
    Ok(SuiteReport::new(suite, checks))
}

const SEED: u64 = 0x5eed_0f_9e71_0d5;

/// Random point `u + v sqrt(m) i` with rational `u`, `v`.
fn random_cm_point(rng: &mut ChaCha8Rng, small_v: bool) -> ExactPoint {
    const RADICANDS: [u64; 8] = [1, 2, 3, 5, 7, 11, 15, 23];
    let u = frac(rng.gen_range(-30..30), rng.gen_range(1..12));
    let v = if small_v {
        frac(rng.gen_range(1..5), rng.gen_range(4..24))
    } else {
        frac(rng.gen_range(1..30), rng.gen_range(1..10))
    };
    let m = RADICANDS[rng.gen_range(0..RADICANDS.len())];
    // keep Im(tau) of the small points below 1/2
    let v = if small_v { v / rat(if m > 4 { 5 } else { 2 }) } else { v };
    ExactPoint::new(u, v, m)
}

fn show(p: &ExactPoint) -> String {
    let (u, v) = p.to_f64();
    format!("{u:.6}+{v:.6}i")
}

fn raising() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut out = Vec::new();
    for j in 0..20 {
        let p = random_cm_point(&mut rng, j % 2 == 0);
        let mut ok = true;
        for k in 1..=7u32 {
            for l in 0..2 * k {
                ok &= raising_residual(k, l, &p)?.is_zero();
            }
        }
        out.push(Check::exact(format!("closed form = iterated raising, k <= 7, l <= 2k-1, tau = {}", show(&p)), ok, ""));
    }
    Ok(out)
}

fn eichler() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for k in 1..=6u32 {
        let ok = (1..=10).all(|n| eichler_mode_residual(k, n).is_zero());
        out.push(Check::exact(format!("mode identity k = {k}, n <= 10"), ok, ""));
    }
    let delta = delta_coeffs(60)?;
    let e8 = eisenstein_coeffs(4, 60)?;
    let points = [C64::new(0.1, 0.9), C64::new(-0.4, 1.3), C64::new(0.5, 0.7), C64::new(0.25, 2.0), C64::new(-0.05, 1.1)];
    for (name, f) in [("Delta", &delta), ("E_8", &e8)] {
        for tau in points {
            let a = raised_eichler(f, tau, Eichler::NonHolomorphic, RaisePath::Termwise)?;
            let b = raised_eichler(f, tau, Eichler::NonHolomorphic, RaisePath::Conjugate)?;
            let rel = (a.value - b.value).norm() / a.value.norm().max(f64::MIN_POSITIVE);
            out.push(Check::numeric(format!("raised f^* paths agree for {name} at {tau}"), rel, 1e-10, "relative"));
        }
    }
    Ok(out)
}

fn kz_zero() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for k in [2u32, 3, 4, 5, 7] {
        let ok = (1..2 * k - 2).map(|n| kz_period_polynomial(k, n)).collect::<std::result::Result<Vec<_>, _>>()?
            .iter()
            .all(|p| p.poly.is_zero());
        out.push(Check::exact(format!("Kohnen-Zagier polynomials vanish, k = {k}"), ok, ""));
    }
    Ok(out)
}

fn gram() -> Result<Vec<Check>> {
    let pairs = gram_pairs(6)?;
    let mut out = vec![Check::exact("k = 6 has extractable cross-parity pairs", !pairs.is_empty(), format!("{} pairs", pairs.len()))];
    for p in pairs {
        out.push(Check::exact(
            format!("r_{}(R_{}) = r_{}(R_{})", p.m, p.n, p.n, p.m),
            p.holds(),
            format!("{} vs {}", p.r_m_of_r_n, p.r_n_of_r_m),
        ));
    }
    Ok(out)
}

fn polynomial_reps() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 13);
    let points: Vec<ExactPoint> = (0..50).map(|j| random_cm_point(&mut rng, j % 2 == 0)).collect();
    let mut out = Vec::new();
    for k in 2..=5u32 {
        for n in 0..=2 * k - 2 {
            let mut bad = Vec::new();
            for p in &points {
                if !representation_residual(k, n, p)?.is_zero() {
                    bad.push(show(p));
                }
            }
            out.push(Check::exact(format!("theorem = lemma form, k = {k}, n = {n}, 50 points"), bad.is_empty(), bad.join(", ")));
        }
    }
    Ok(out)
}

fn trafo(cfg: &Config) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 10);
    let points: Vec<ExactPoint> = (0..6).map(|j| random_cm_point(&mut rng, j % 2 == 0)).collect();
    let mut out = Vec::new();
    for k in 2..=7u32 {
        let mut t_ok = true;
        let mut s_ok = true;
        for n in 0..=2 * k - 2 {
            for p in &points {
                t_ok &= t_cocycle_residual(k, n, p)?.is_zero();
                s_ok &= s_cocycle_residual(k, n, p)?.is_zero();
            }
        }
        out.push(Check::exact(format!("P | (I - T) = 0, k = {k}, all n"), t_ok, ""));
        out.push(Check::exact(format!("P | (I - S) = closed form, k = {k}, all n"), s_ok, ""));
    }

    // E_{E_4} | (I - S) = (-2 pi i)^3 / 2! r_{E_4}
    let e4 = eisenstein_coeffs(2, 80)?;
    let r0 = -PI * zeta(3.0) / (3.0 * zeta(4.0));
    let i = C64::new(0.0, 1.0);
    for tau in [C64::new(0.5, 1.0), C64::new(0.1, 0.9), C64::new(-0.3, 1.2), C64::new(0.2, 0.8), C64::new(0.45, 1.5)] {
        let a = eichler_holomorphic(&e4, tau)?.value;
        let b = eichler_holomorphic(&e4, -1.0 / tau)?.value;
        let lhs = a - tau.powi(2) * b;
        let r = (tau.powi(3) + 1.0 / tau) / 3.0 + i * r0 * tau * tau + 2.0 * (-5.0 / 6.0) * tau - i * r0;
        let rhs = (-2.0 * PI * i).powi(3) / 2.0 * r;
        out.push(Check::numeric(format!("E_(E_4) | (I - S) at {tau}"), (lhs - rhs).norm(), 1e-10, ""));
    }

    let s = GammaMatrix::S;
    for (k, n) in [(2u32, 0u32), (2, 2), (3, 4), (6, 2), (6, 1)] {
        for p in [ExactPoint::new_rational(frac(1, 3), frac(5, 4)), ExactPoint::new_rational(frac(-2, 7), frac(9, 10))] {
            let a = splitting_rhs(k, n, &p, cfg)?;
            let b = splitting_rhs(k, n, &p.act(&s), cfg)?;
            let (u, v) = p.to_f64();
            let slashed = C64::new(u, v).powi(2 * k as i32 - 2) * b.value;
            let rel = (a.value - slashed).norm() / a.value.norm().max(1.0);
            out.push(Check::numeric(format!("splitting rhs | (I - S), k = {k}, n = {n}, tau = {}", show(&p)), rel, 1e-8, "relative"));
        }
    }
    Ok(out)
}

/// Five points off `E1` used for the direct evaluation of `H_{1-k,n}`.
pub fn splitting_points() -> [ExactPoint; 5] {
    [
        ExactPoint::new_rational(frac(1, 2), rat(2)),
        ExactPoint::new_rational(frac(1, 3), frac(3, 4)),
        ExactPoint::new_rational(frac(-2, 5), frac(7, 10)),
        ExactPoint::new_rational(frac(1, 7), frac(6, 5)),
        ExactPoint::new_rational(frac(2, 5), frac(1, 3)),
    ]
}

fn splitting(cfg: &Config) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let bound = cfg.matrix_bound;
    for p in splitting_points() {
        let want = local_polynomial(2, 1, &p, Representation::Theorem)?.exact().expect("interior n");
        let (wr, wi) = want.to_f64();
        let (u, v) = p.to_f64();
        let h = eval_h1kn_direct(2, 1, C64::new(u, v), bound, 1e-9)?;
        let diff = (h.value - C64::new(wr, wi)).norm();
        out.push(Check::numeric(
            format!("H_(-1,1) direct = P at {}, B = {bound}", show(&p)),
            diff,
            1e-2,
            format!("estimate {:.3e}", h.err),
        ));
        out.push(Check::numeric(format!("shell estimate at {}, B = {bound}", show(&p)), h.err, 1e-2, ""));
    }
    let p = ExactPoint::new_rational(frac(1, 3), frac(3, 4));
    let rhs = splitting_rhs(3, 2, &p, cfg)?;
    let h = eval_h1kn_direct(3, 2, C64::new(1.0 / 3.0, 0.75), bound.min(100), 1e-9)?;
    out.push(Check::numeric("H_(-2,2) direct = splitting rhs at 1/3+3i/4", (h.value - rhs.value).norm(), h.err + rhs.err, ""));
    Ok(out)
}

fn jumps() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let ladder = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
    let two_i = ExactPoint::new_rational(rat(0), rat(2));
    for base in [two_i.clone(), two_i.act(&GammaMatrix::S)] {
        for (k, n) in [(2u32, 1u32), (3, 2)] {
            let r = jump_check(k, n, &base, &ladder)?;
            let linear = r.ladder.windows(2).all(|w| w[1].1 <= w[0].1 * 0.2 + 1e-12 && w[1].2 <= w[0].2 * 0.2 + 1e-12);
            out.push(Check::exact(
                format!("jump = descriptor and on-set value = average, k = {k}, n = {n}, tau0 = {}", show(&base)),
                r.passed(),
                format!("jump {}", r.jump),
            ));
            out.push(Check::exact(format!("one-sided limits converge, k = {k}, n = {n}, tau0 = {}", show(&base)), linear, ""));
        }
    }
    let r = jump_check(2, 1, &two_i, &ladder)?;
    let four_i = ExactNumber::i().scale(&rat(4));
    out.push(Check::exact("descriptor jump at 2i, k = 2, n = 1 is 4i", r.descriptor_jump == four_i, format!("{}", r.descriptor_jump)));
    Ok(out)
}

/// The four cases of the outer-period identity.
pub fn outer_cases() -> [(u32, QuadForm); 4] {
    [(2, QuadForm::new(1, 1, 1)), (3, QuadForm::new(1, 1, 1)), (2, QuadForm::new(1, 0, 5)), (2, QuadForm::new(2, 2, 3))]
}

fn outer(cfg: &Config) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (k, p) in outer_cases() {
        let mut quad = cfg.quad();
        // [1,0,5] has its CM point on the axis; its period is a principal value
        if is_on_exceptional_set(&p.cm_point()?) {
            quad.axis_poles = AxisPoles::PrincipalValue;
        }
        let r0 = fkp_periods(k, &p, cfg.orbit_bound_for(k), &quad)?[0];
        let target = outer_period_from_epstein(&p, k, 400)?;
        let rel = (r0.re - target.value).abs() / target.value.abs();
        out.push(Check::numeric(
            format!("Re r_0(f_({k},{p})) = Epstein value"),
            rel,
            1e-6,
            format!("{:.10} vs {:.10}", r0.re, target.value),
        ));
    }
    Ok(out)
}

/// The `eps = (-1)^n` part of the exact value, or of the locally polynomial contribution when
/// cusp forms contribute too.
fn exact_parity_part(p: &QuadForm, k: u32, n: u32) -> Result<ExactNumber> {
    let x = match try_exact(p, k, n)? {
        Some(x) => x,
        None => local_period_part(p, k, n)?.exact().expect("interior"),
    };
    // r_n(f^+) = Re r_n and r_n(f^-) = -Im r_n
    Ok(if n.is_multiple_of(2) { x.re() } else { x.im() })
}

/// Forms used by the parity suite: the ambiguous `[1,1,1]` of the table and `[2,1,3]`, which is
/// not equivalent to its conjugate.
pub fn parity_forms() -> [QuadForm; 2] {
    [QuadForm::new(1, 1, 1), QuadForm::new(2, 1, 3)]
}

fn parity(cfg: &Config) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for p in parity_forms() {
        for k in 2..=7u32 {
            let rows = compute_periods(&p, k, Mode::Numeric, cfg)?;
            let unfolded = fkp_unfolded_periods(k, &p, cfg.orbit_bound_for(k), &cfg.quad())?;
            let top = 2 * k - 2;
            for r in &rows {
                let n = r.n;
                let a = r.numeric.expect("numeric mode");
                if n > 0 && n < top {
                    let part = exact_parity_part(&p, k, n)?;
                    let what = if cusp_space_trivial(k) { "" } else { " (local part)" };
                    out.push(Check::exact(format!("r_{n}(f^eps_({k},{p})) = 0 exactly{what}"), part.is_zero(), part.to_string()));
                    let num = if n % 2 == 0 { a.re } else { -a.im };
                    out.push(Check::numeric(format!("|r_{n}(f^eps_({k},{p}))| numeric"), num.abs(), 2e-4, ""));
                }
                let (x, y) = (unfolded[n as usize], unfolded[(top - n) as usize]);
                let s = if k % 2 == 0 { 1.0 } else { -1.0 };
                let diff = (x.value() - y.value() * s).norm();
                out.push(Check::numeric(format!("r_{n} = (-1)^k r_{} for f_({k},{p}), unfolded", top - n), diff, x.err + y.err, ""));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suites_pass() {
        let cfg = Config::default();
        for s in [Suite::KzZero, Suite::Gram, Suite::Jumps, Suite::Eichler] {
            let r = run_one(s, &cfg).unwrap();
            assert!(r.passed, "{}", serde_json::to_string_pretty(&r).unwrap());
        }
    }

    #[test]
    fn suite_names_roundtrip() {
        for s in Suite::EACH {
            let js = serde_json::to_string(&s).unwrap();
            assert_eq!(js, format!("\"{}\"", s.name()));
        }
    }
}
