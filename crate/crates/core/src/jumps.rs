//! Jump singularities of `P_{1-k,n}` (and hence of `H_{1-k,n}`) along `E1`.
//!
//! Near a point `tau_0`, `H_{1-k,n}` differs from
//! `i^{1-n}/4 sum_{Re(M tau_0) = 0} (sgn(u) tau^n) | M` by a harmonic function.

use alloc::vec::Vec;

use crate::error::CoreError;
use crate::exceptional::{enumerate_exceptional_matrices, Region};
use crate::field::ExactNumber;
use crate::gamma::GammaMatrix;
use crate::gauss::GaussRational;
use crate::local_poly::{local_polynomial, theorem_piece, transversal_points, Representation};
use crate::point::ExactPoint;
use crate::poly::GaussPoly;
use crate::rational::{frac, sgn};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularityDescriptor {
    pub k: u32,
    pub n: u32,
    pub base: ExactPoint,
    /// `(M, q_M)` over PSL2 representatives with `Re(M tau_0) = 0`; the local singular
    /// function is `sum_M sgn(Re(M tau)) q_M(tau)`.
    pub terms: Vec<(GammaMatrix, GaussPoly)>,
}

pub fn singularity_descriptor(k: u32, n: u32, base: &ExactPoint) -> Result<SingularityDescriptor, CoreError> {
    if k < 2 || n > 2 * k - 2 {
        return Err(CoreError::IndexOutOfRange { k, n });
    }
    let unit = GaussRational::i_pow(1 - n as i64).scale(&frac(1, 2));
    let mono = GaussPoly::monomial(n as i32, GaussRational::from_int(1));
    let mut terms = Vec::new();
    for m in enumerate_exceptional_matrices(base, Region::Boundary) {
        terms.push((m, mono.slash(k, &m)?.scale(&unit)));
    }
    Ok(SingularityDescriptor { k, n, base: base.clone(), terms })
}

impl SingularityDescriptor {
    /// Polynomial jump `plus - minus` of the singular function between two points on either
    /// side of the set.
    pub fn jump_between(&self, plus: &ExactPoint, minus: &ExactPoint) -> GaussPoly {
        let mut acc = GaussPoly::zero();
        for (m, q) in &self.terms {
            let ds = sgn(&plus.real_part_numerator(m)) - sgn(&minus.real_part_numerator(m));
            if ds != 0 {
                acc = &acc + &q.scale(&GaussRational::from_int(ds as i64));
            }
        }
        acc
    }
}

#[derive(Clone, Debug)]
pub struct JumpReport {
    pub descriptor: SingularityDescriptor,
    /// Point on the side where `Re(M_0 tau) > 0`, `M_0` the simplest matrix whose geodesic is crossed.
    pub plus: ExactPoint,
    pub minus: ExactPoint,
    pub one_sided_plus: ExactNumber,
    pub one_sided_minus: ExactNumber,
    /// `P_+(tau_0) - P_-(tau_0)`.
    pub jump: ExactNumber,
    /// Descriptor jump at `tau_0`.
    pub descriptor_jump: ExactNumber,
    /// The piece polynomials differ by exactly the descriptor jump polynomial.
    pub polynomial_jump_matches: bool,
    /// The on-set value equals the average of the one-sided limits.
    pub average_matches: bool,
    /// `(eps, |P(tau_plus(eps)) - P_+(tau_0)|, |P(tau_minus(eps)) - P_-(tau_0)|)`.
    pub ladder: Vec<(f64, f64, f64)>,
}

impl JumpReport {
    pub fn passed(&self) -> bool {
        self.jump == self.descriptor_jump && self.polynomial_jump_matches && self.average_matches
    }
}

pub fn jump_check(k: u32, n: u32, base: &ExactPoint, ladder: &[f64]) -> Result<JumpReport, CoreError> {
    let descriptor = singularity_descriptor(k, n, base)?;
    if descriptor.terms.is_empty() {
        return Err(CoreError::OnExceptionalSet(alloc::format!("base point is not on E1")));
    }
    let (mut plus, mut minus) = transversal_points(k, n, base)?;
    // orient by the simplest matrix whose geodesic is crossed
    let m0 = descriptor
        .terms
        .iter()
        .map(|(m, _)| *m)
        .filter(|m| sgn(&plus.real_part_numerator(m)) != sgn(&minus.real_part_numerator(m)))
        .min_by_key(|m| (m.c.abs(), m.a.abs(), m.d.abs()))
        .expect("transversal crosses a boundary geodesic");
    if sgn(&plus.real_part_numerator(&m0)) < 0 {
        core::mem::swap(&mut plus, &mut minus);
    }
    let p_plus = theorem_piece(k, n, &plus)?;
    let p_minus = theorem_piece(k, n, &minus)?;
    let t0 = base.to_exact();
    let one_sided_plus = p_plus.eval(&t0);
    let one_sided_minus = p_minus.eval(&t0);
    let jump = &one_sided_plus - &one_sided_minus;
    let jump_poly = descriptor.jump_between(&plus, &minus);
    let descriptor_jump = jump_poly.eval(&t0);
    let polynomial_jump_matches = &p_plus - &p_minus == jump_poly;
    let on_set = local_polynomial(k, n, base, Representation::Lemma)?.rest;
    let average_matches = on_set == (&one_sided_plus + &one_sided_minus).scale(&frac(1, 2));

    // numeric approach along the same transversal
    let (wu, wv) = base.act(&m0).to_f64();
    let inv = m0.inverse();
    let (pr, pi) = one_sided_plus.to_f64();
    let (mr, mi) = one_sided_minus.to_f64();
    let mut rows = Vec::new();
    for &eps in ladder {
        let (xp, yp) = inv.act_f64(wu + eps, wv);
        let (xm, ym) = inv.act_f64(wu - eps, wv);
        let vp = p_plus.eval_f64(xp, yp);
        let vm = p_minus.eval_f64(xm, ym);
        rows.push((eps, libm::hypot(vp.0 - pr, vp.1 - pi), libm::hypot(vm.0 - mr, vm.1 - mi)));
    }
    Ok(JumpReport {
        descriptor,
        plus,
        minus,
        one_sided_plus,
        one_sided_minus,
        jump,
        descriptor_jump,
        polynomial_jump_matches,
        average_matches,
        ladder: rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernoulli::bernoulli_polynomial;
    use crate::rational::rat;

    #[test]
    fn jump_at_2i() {
        let base = ExactPoint::new_rational(rat(0), rat(2));
        let ladder = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
        let r = jump_check(2, 1, &base, &ladder).unwrap();
        assert!(r.passed());
        assert_eq!(r.descriptor.terms.len(), 2);
        let four_i = ExactNumber::from_gauss(GaussRational::new(rat(0), rat(4)));
        assert_eq!(r.descriptor_jump, four_i);
        // independent: the periodized Bernoulli term -BB_2 jumps by B_2(tau + 1) - B_2(tau)
        let b2 = bernoulli_polynomial(2);
        let t = base.to_exact();
        let bern_jump = &b2.eval(&(&t + &ExactNumber::one())) - &b2.eval(&t);
        assert_eq!(bern_jump, four_i);
        // linear convergence of the one-sided limits
        for w in r.ladder.windows(2) {
            assert!(w[1].1 < w[0].1 * 0.2 && w[1].2 < w[0].2 * 0.2);
        }
    }

    #[test]
    fn jumps_at_s_translate_and_even_n() {
        let base = ExactPoint::new_rational(rat(0), rat(2));
        let moved = base.act(&GammaMatrix::new(1, 0, 1, 1).unwrap());
        for (k, n) in [(2, 1), (3, 2)] {
            for p in [&base, &moved] {
                let r = jump_check(k, n, p, &[1e-3]).unwrap();
                assert!(r.passed(), "k={k} n={n} at {:?}", p);
            }
        }
        let s = ExactPoint::new_rational(rat(0), frac(1, 2));
        assert!(jump_check(3, 2, &s, &[1e-3]).unwrap().passed());
    }

    #[test]
    fn generic_axis_descriptor() {
        let base = ExactPoint::new_rational(rat(0), rat(3));
        let d = singularity_descriptor(3, 2, &base).unwrap();
        let ms: Vec<_> = d.terms.iter().map(|(m, _)| *m).collect();
        assert_eq!(ms, [GammaMatrix::S, GammaMatrix::I]);
    }
}
