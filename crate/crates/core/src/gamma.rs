//! Elements of SL2(Z).

use core::fmt;

use crate::error::CoreError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GammaMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl GammaMatrix {
    pub const I: GammaMatrix = GammaMatrix { a: 1, b: 0, c: 0, d: 1 };
    pub const S: GammaMatrix = GammaMatrix { a: 0, b: -1, c: 1, d: 0 };
    pub const T: GammaMatrix = GammaMatrix { a: 1, b: 1, c: 0, d: 1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self, CoreError> {
        if a * d - b * c != 1 {
            return Err(CoreError::NotUnimodular);
        }
        Ok(Self { a, b, c, d })
    }

    pub fn translation(n: i64) -> Self {
        Self { a: 1, b: n, c: 0, d: 1 }
    }

    pub fn mul(&self, o: &GammaMatrix) -> GammaMatrix {
        GammaMatrix {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> GammaMatrix {
        GammaMatrix { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn neg(&self) -> GammaMatrix {
        GammaMatrix { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    /// Representative of `{M, -M}` with first non-zero entry of the bottom row positive
    /// (or `a > 0` when `c = 0`).
    pub fn psl_normalized(&self) -> GammaMatrix {
        if self.c < 0 || (self.c == 0 && self.d < 0) {
            self.neg()
        } else {
            *self
        }
    }

    /// `sgn(ac)` if `ac != 0`, otherwise `sgn(bd)` (with `sgn(0) = 0`).
    pub fn sign(&self) -> i32 {
        let ac = self.a * self.c;
        let s = if ac != 0 { ac } else { self.b * self.d };
        s.signum() as i32
    }

    pub fn max_entry(&self) -> i64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    /// Action on a complex number `(x, y)`.
    pub fn act_f64(&self, x: f64, y: f64) -> (f64, f64) {
        let (a, b, c, d) = (self.a as f64, self.b as f64, self.c as f64, self.d as f64);
        let nr = a * x + b;
        let ni = a * y;
        let dr = c * x + d;
        let di = c * y;
        let den = dr * dr + di * di;
        ((nr * dr + ni * di) / den, (ni * dr - nr * di) / den)
    }
}

impl fmt::Display for GammaMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// `(g, x, y)` with `a x + b y = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Some matrix with first column `(a, c)`; requires `gcd(a, c) = 1`.
pub fn complete_column(a: i64, c: i64) -> GammaMatrix {
    let (g, x, y) = ext_gcd(a, c);
    debug_assert_eq!(g, 1);
    // a x + c y = 1  =>  a*x - (-y)*c = 1 with b = -y, d = x
    GammaMatrix { a, b: -y, c, d: x }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics() {
        assert_eq!(GammaMatrix::S.mul(&GammaMatrix::S), GammaMatrix::I.neg());
        let m = GammaMatrix::new(2, 3, 1, 2).unwrap();
        assert_eq!(m.mul(&m.inverse()), GammaMatrix::I);
        assert!(GammaMatrix::new(2, 2, 1, 2).is_err());
        for (a, c) in [(3, 7), (-5, 2), (1, 0), (0, 1), (12, -35)] {
            let m = complete_column(a, c);
            assert_eq!(m.a * m.d - m.b * m.c, 1);
        }
        assert_eq!(GammaMatrix::S.sign(), 0);
        assert_eq!(GammaMatrix::I.sign(), 0);
        assert_eq!(GammaMatrix::T.sign(), 1);
    }
}
