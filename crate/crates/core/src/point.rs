//! Exact points `u + i v` of the upper half-plane with `u` rational and `v = q sqrt(m)`.

use num_traits::{Signed, Zero};

use crate::field::ExactNumber;
use crate::gamma::GammaMatrix;
use crate::gauss::GaussRational;
use crate::rational::{rat, square_free_split, to_f64, Rational};

/// A point whose real part and squared imaginary part are rational. CM points and all of
/// their SL2(Z)-images have this shape.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactPoint {
    pub u: Rational,
    /// `v = v_coef * sqrt(radicand)`
    pub v_coef: Rational,
    radicand: u64,
}

impl ExactPoint {
    pub fn new(u: Rational, v_coef: Rational, radicand: u64) -> Self {
        assert!(v_coef.is_positive(), "point must lie in the upper half-plane");
        let (t, m) = square_free_split(radicand);
        Self { u, v_coef: v_coef * rat(t as i64), radicand: m }
    }

    pub fn new_rational(u: Rational, v: Rational) -> Self {
        Self::new(u, v, 1)
    }

    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn v_squared(&self) -> Rational {
        &self.v_coef * &self.v_coef * rat(self.radicand as i64)
    }

    /// `|tau|^2 = u^2 + v^2`.
    pub fn abs_squared(&self) -> Rational {
        &self.u * &self.u + self.v_squared()
    }

    pub fn v_exact(&self) -> ExactNumber {
        ExactNumber::from_parts(
            GaussRational::zero(),
            GaussRational::real(self.v_coef.clone()),
            self.radicand,
        )
    }

    pub fn u_exact(&self) -> ExactNumber {
        ExactNumber::from_rational(self.u.clone())
    }

    /// `tau` as a field element.
    pub fn to_exact(&self) -> ExactNumber {
        &self.u_exact() + &(&ExactNumber::i() * &self.v_exact())
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (to_f64(&self.u), to_f64(&self.v_coef) * libm::sqrt(self.radicand as f64))
    }

    pub fn translate(&self, n: &Rational) -> Self {
        Self { u: &self.u + n, v_coef: self.v_coef.clone(), radicand: self.radicand }
    }

    /// `F_M(tau) = ac|tau|^2 + (ad + bc) u + bd`, whose sign is the sign of `Re(M tau)`.
    pub fn real_part_numerator(&self, m: &GammaMatrix) -> Rational {
        rat(m.a * m.c) * self.abs_squared() + rat(m.a * m.d + m.b * m.c) * &self.u + rat(m.b * m.d)
    }

    /// `|c tau + d|^2`.
    pub fn j_abs_squared(&self, m: &GammaMatrix) -> Rational {
        let cu_d = rat(m.c) * &self.u + rat(m.d);
        &cu_d * &cu_d + rat(m.c * m.c) * self.v_squared()
    }

    /// `M tau`.
    pub fn act(&self, m: &GammaMatrix) -> ExactPoint {
        let j2 = self.j_abs_squared(m);
        ExactPoint {
            u: self.real_part_numerator(m) / &j2,
            v_coef: &self.v_coef / &j2,
            radicand: self.radicand,
        }
    }

    /// True when `Re(tau)` is an integer.
    pub fn has_integral_real_part(&self) -> bool {
        self.u.is_integer()
    }

    pub fn is_zero_real(&self) -> bool {
        self.u.is_zero()
    }
}
