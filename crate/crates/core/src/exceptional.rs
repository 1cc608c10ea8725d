//! The exceptional set `E1` (SL2(Z)-translates of the positive imaginary axis) and the finite
//! matrix enumerations that the locally polynomial part is built from.
//!
//! For `M = (a b; c d)`, `Re(M tau)` has the sign of `F_M(tau) = ac|tau|^2 + (ad+bc)u + bd`.
//! When `ac != 0`, `F_M / ac = |tau - x_0|^2 - 1/(4a^2c^2)`, so `sgn F_M != sgn(ac)` forces
//! `v <= 1/(2|ac|)`. Every enumeration below is therefore finite. Matrices are returned as
//! PSL2 representatives; sums over SL2(Z) count each of them twice.

use alloc::vec::Vec;

use crate::gamma::{complete_column, ext_gcd, GammaMatrix};
use crate::point::ExactPoint;
use crate::rational::{sgn, to_f64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// `ac > 0` and `Re(M tau) < 0`.
    StrictInterior,
    /// `Re(M tau) = 0`.
    Boundary,
    /// `sgn(Re(M tau)) != sgn(M)`: the support of the sum in the alternative representation.
    SignMismatch,
}

fn wanted(region: Region, m: &GammaMatrix, f_sign: i32) -> bool {
    match region {
        Region::StrictInterior => m.a * m.c > 0 && f_sign < 0,
        Region::Boundary => f_sign == 0,
        Region::SignMismatch => f_sign != m.sign(),
    }
}

/// Candidate scan shared by the exact and floating point front ends. `u`, `abs2`, `v` are
/// floating approximations used only to bound the search; membership is decided by `sign`.
fn scan(
    region: Region,
    u: f64,
    abs2: f64,
    v: f64,
    sign: impl Fn(&GammaMatrix) -> i32,
) -> Vec<GammaMatrix> {
    let mut out = Vec::new();
    let mut push = |m: GammaMatrix| {
        if wanted(region, &m, sign(&m)) {
            out.push(m);
        }
    };

    // integer window around the roots of a monic-up-to-scale quadratic in t
    let window = |lead: f64, lin: f64, cst: f64| -> (i64, i64) {
        let disc = lin * lin - 4.0 * lead * cst;
        let mid = -lin / (2.0 * lead);
        let half = if disc > 0.0 { libm::sqrt(disc) / (2.0 * lead.abs()) } else { 0.0 };
        (libm::floor(mid - half) as i64 - 1, libm::ceil(mid + half) as i64 + 1)
    };

    if region != Region::StrictInterior {
        // c = 0: M = T^b, Re(M tau) = u + b, sgn(M) = sgn(b)
        let lo = libm::floor(u.min(-u).min(0.0)) as i64 - 1;
        let hi = libm::ceil(u.max(-u).max(0.0)) as i64 + 1;
        for b in lo..=hi {
            push(GammaMatrix { a: 1, b, c: 0, d: 1 });
        }
        // a = 0: M = (0 -1; 1 d), Re(M tau) ~ -(u + d), sgn(M) = sgn(-d)
        for d in lo..=hi {
            push(GammaMatrix { a: 0, b: -1, c: 1, d });
        }
    }

    // ac != 0 with |ac| <= 1/(2v)
    let bound = libm::floor(1.0 / (2.0 * v) + 1e-9) as i64;
    for a in 1..=bound {
        for cabs in 1..=bound / a {
            for c in [cabs, -cabs] {
                if region == Region::StrictInterior && c < 0 {
                    continue;
                }
                if ext_gcd(a, c).0 != 1 {
                    continue;
                }
                let base = complete_column(a, c);
                let (b0, d0) = (base.b as f64, base.d as f64);
                let (af, cf) = (a as f64, c as f64);
                let ac = af * cf;
                let lin = 2.0 * ac * u + af * d0 + b0 * cf;
                let cst = ac * abs2 + (af * d0 + b0 * cf) * u + b0 * d0;
                let (t0, t1) = window(ac, lin, cst);
                for t in t0..=t1 {
                    push(GammaMatrix { a, b: base.b + t * a, c, d: base.d + t * c });
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Exact enumeration for a point with rational coordinates.
pub fn enumerate_exceptional_matrices(tau: &ExactPoint, region: Region) -> Vec<GammaMatrix> {
    let u = to_f64(&tau.u);
    let abs2 = to_f64(&tau.abs_squared());
    let v = tau.to_f64().1;
    scan(region, u, abs2, v, |m| sgn(&tau.real_part_numerator(m)))
}

/// Floating point enumeration (boundary region is meaningless here and is rejected).
pub fn enumerate_exceptional_matrices_f64(u: f64, v: f64, region: Region) -> Option<Vec<GammaMatrix>> {
    if region == Region::Boundary {
        return None;
    }
    let abs2 = u * u + v * v;
    Some(scan(region, u, abs2, v, |m| {
        let (a, b, c, d) = (m.a as f64, m.b as f64, m.c as f64, m.d as f64);
        let f = a * c * abs2 + (a * d + b * c) * u + b * d;
        if f > 0.0 {
            1
        } else if f < 0.0 {
            -1
        } else {
            0
        }
    }))
}

/// Exact membership test for `E1`.
pub fn is_on_exceptional_set(tau: &ExactPoint) -> bool {
    !enumerate_exceptional_matrices(tau, Region::Boundary).is_empty()
}

/// Distance-like quantity used as a numeric guard: the smallest `|Re(M tau)| / Im(M tau)` over
/// the boundary candidates, i.e. the hyperbolic offset from the nearest translate of `iR+`.
pub fn exceptional_offset_f64(u: f64, v: f64) -> f64 {
    let mut best = f64::INFINITY;
    let abs2 = u * u + v * v;
    // candidates near the boundary: vertical lines and circles with |ac| <= 1/(2v)
    let cands = scan(Region::SignMismatch, u, abs2, v, |_| 2);
    for m in cands.iter().chain([GammaMatrix::I, GammaMatrix::S].iter()) {
        let (x, y) = m.act_f64(u, v);
        best = best.min(x.abs() / y);
    }
    // vertical lines u in Z
    best.min((u - libm::round(u)).abs() / v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, rat};

    fn brute(tau_u: f64, tau_v: f64, region: Region, bound: i64) -> Vec<GammaMatrix> {
        let mut out = Vec::new();
        for a in -bound..=bound {
            for c in -bound..=bound {
                for b in -bound..=bound {
                    let ds: Vec<i64> = if a != 0 {
                        if (1 + b * c) % a != 0 { continue; }
                        alloc::vec![(1 + b * c) / a]
                    } else if b * c == -1 {
                        (-bound..=bound).collect()
                    } else {
                        continue;
                    };
                    for d in ds {
                        if d.abs() > bound {
                            continue;
                        }
                        let m = GammaMatrix { a, b, c, d };
                        let (x, _) = m.act_f64(tau_u, tau_v);
                        let s = if x > 0.0 { 1 } else if x < 0.0 { -1 } else { 0 };
                        if wanted(region, &m, s) {
                            out.push(m);
                        }
                    }
                }
            }
        }
        // normalize representatives the same way as the scanner
        let mut out: Vec<_> = out.into_iter().map(canon).collect();
        out.sort();
        out.dedup();
        out
    }

    fn canon(m: GammaMatrix) -> GammaMatrix {
        if m.a < 0 || (m.a == 0 && m.c < 0) {
            m.neg()
        } else {
            m
        }
    }

    #[test]
    fn remark_vanishing_above_one_half() {
        for (u, v) in [(0.3, 0.51), (-2.7, 0.6), (0.5, 3.0)] {
            let m = enumerate_exceptional_matrices_f64(u, v, Region::StrictInterior).unwrap();
            assert!(m.is_empty());
        }
    }

    #[test]
    fn strict_interior_matches_brute_force() {
        let got: Vec<_> = enumerate_exceptional_matrices_f64(-0.3, 0.2, Region::StrictInterior)
            .unwrap()
            .into_iter()
            .map(canon)
            .collect();
        assert!(!got.is_empty());
        let want = brute(-0.3, 0.2, Region::StrictInterior, 50);
        let mut got = got;
        got.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn boundary_at_2i() {
        let tau = ExactPoint::new_rational(rat(0), rat(2));
        let got = enumerate_exceptional_matrices(&tau, Region::Boundary);
        assert_eq!(got, alloc::vec![GammaMatrix::S, GammaMatrix::I]);
        for m in &got {
            assert_eq!(tau.real_part_numerator(m), rat(0));
        }
    }

    #[test]
    fn membership() {
        assert!(is_on_exceptional_set(&ExactPoint::new_rational(rat(0), rat(1))));
        assert!(is_on_exceptional_set(&ExactPoint::new_rational(rat(1), rat(5))));
        // e^{2 pi i / 3}
        assert!(!is_on_exceptional_set(&ExactPoint::new(frac(-1, 2), frac(1, 2), 3)));
        // i sqrt 5 lies on the axis itself
        assert!(is_on_exceptional_set(&ExactPoint::new(rat(0), rat(1), 5)));
    }
}
