//! Point evaluation of `f_{k,P}(z) = |d|^{k-1/2}/pi sum_{Q in [P]} Q(z,1)^{-k}`.
//!
//! Forms are grouped by their translation class: for `Q = [a, b, c]` with `b` reduced into
//! `(-a, a]`, the translates contribute `a^{-k} S_k(z + b/2a; r)` with `r = sqrt|d| / 2a` and
//! `S_k(w; r) = sum_j ((w + j)^2 + r^2)^{-k}`. Forms with large `r` are summed in closed form
//! through cotangent derivatives; the rest are aggregated into Fourier coefficients, which is
//! valid once `Im z > r`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::ToPrimitive;
use periods_core::gamma::GammaMatrix;
use periods_core::quadform::{enumerate_classes, QuadForm};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{cot_derivative_poly, e, lipschitz_sum, C64};

/// Number of Fourier modes kept for the aggregated part.
const MODES: usize = 40;
const BLOCKS: usize = 3;
/// Required gap between `Im z` and the largest `r` in the aggregated part.
const MARGIN: f64 = 0.35;
/// Forms with `r` above this are always summed in closed form.
const R_CAP: f64 = 1.2;
const CHUNK: usize = 2048;

pub use crate::numerics::Value;

/// Default cutoff `A` on the leading coefficient; the tail decays roughly like `A^{1-k}`.
pub fn default_orbit_bound(k: u32) -> i64 {
    match k {
        2 => 32768,
        3 => 4096,
        4 => 1024,
        _ => 512,
    }
}

type FormList = Arc<Vec<(i64, i64, i64)>>;

/// All positive definite forms `[a, b, c]` of discriminant `d` with `a <= amax`, `-a < b <= a`.
fn forms_of_disc(d: i64, amax: i64) -> FormList {
    static CACHE: OnceLock<Mutex<HashMap<(i64, i64), FormList>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().unwrap().get(&(d, amax)) {
        return v.clone();
    }
    let absd = -d;
    let per_a: Vec<Vec<(i64, i64, i64)>> = (1..=amax)
        .into_par_iter()
        .map(|a| {
            let m = 4 * a;
            let mut out = Vec::new();
            let start = if absd % 2 == 0 { 0 } else { 1 };
            let mut b = start;
            while b <= a {
                if (b * b + absd) % m == 0 {
                    let c = (b * b + absd) / m;
                    if b != 0 && b != a {
                        out.push((a, -b, c));
                    }
                    out.push((a, b, c));
                }
                b += 2;
            }
            out
        })
        .collect();
    let all: FormList = Arc::new(per_a.into_iter().flatten().collect());
    cache.lock().unwrap().insert((d, amax), all.clone());
    all
}

/// `(j_{M}(z), M z)` with `M z` in the standard fundamental domain.
pub fn reduce_point(z: C64) -> (GammaMatrix, C64) {
    let mut m = GammaMatrix::I;
    let mut w = z;
    for _ in 0..10_000 {
        let n = w.re.round();
        if n != 0.0 {
            w -= n;
            m = GammaMatrix::translation(-(n as i64)).mul(&m);
        }
        if w.norm_sqr() < 1.0 - 1e-13 {
            w = -1.0 / w;
            m = GammaMatrix::S.mul(&m);
        } else {
            break;
        }
    }
    (m, w)
}

pub fn automorphy(m: &GammaMatrix, z: C64) -> C64 {
    z * m.c as f64 + m.d as f64
}

struct Tail {
    coeffs: Vec<C64>,
    /// Contributions of the last dyadic blocks `(A/2, A]`, `(A/4, A/2]`, ... used for the
    /// truncation estimate.
    blocks: Vec<Vec<C64>>,
}

pub struct FkpEvaluator {
    pub k: u32,
    pub form: QuadForm,
    pub orbit_bound: i64,
    pub guard: f64,
    absd: f64,
    norm: f64,
    /// `(a, b)` of every form in the class with `a <= orbit_bound`, ordered by `a`.
    terms: Vec<(i64, i64)>,
    polys: Vec<Vec<f64>>,
    tails: Mutex<HashMap<i64, Arc<Tail>>>,
}

/// `c_l(r) = (-1)^k (2 pi)^{2k} l^{2k-1} sum_i C(k+i-1, i) (2 pi l r)^{2i} / (2k+2i-1)!`,
/// the `l`-th Fourier coefficient of `S_k(w; r)` above the poles.
fn mode_coefficient(k: u32, l: usize, r: f64) -> f64 {
    let kf = k as f64;
    let x2 = (2.0 * PI * l as f64 * r).powi(2);
    let mut t = 1.0 / (1..2 * k).map(|j| j as f64).product::<f64>();
    let mut sum = t;
    let mut i = 0.0;
    loop {
        t *= (kf + i) / (i + 1.0) * x2 / ((2.0 * kf + 2.0 * i) * (2.0 * kf + 2.0 * i + 1.0));
        sum += t;
        i += 1.0;
        if t <= 1e-18 * sum && i * i > x2 {
            break;
        }
    }
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * (2.0 * PI).powi(2 * k as i32) * (l as f64).powi(2 * k as i32 - 1) * sum
}

impl FkpEvaluator {
    pub fn new(k: u32, form: &QuadForm, orbit_bound: i64) -> Result<Self> {
        if k < 2 {
            return Err(Error::Invalid(format!("weight 2k needs k >= 2, got k = {k}")));
        }
        if !form.is_positive_definite() {
            return Err(periods_core::error::CoreError::NotPositiveDefinite(form.to_string()).into());
        }
        let d = form.disc().to_i64().ok_or_else(|| Error::Invalid("discriminant too large".into()))?;
        let target = form.reduced()?;
        let single_class = enumerate_classes(d)?.len() == 1;
        let all = forms_of_disc(d, orbit_bound);
        let chunks: Vec<Vec<(i64, i64)>> = all
            .par_chunks(CHUNK)
            .map(|chunk| {
                chunk
                    .iter()
                    .filter(|(a, b, c)| single_class || QuadForm::new(*a, *b, *c).reduced().map(|q| q == target).unwrap_or(false))
                    .map(|&(a, b, _)| (a, b))
                    .collect()
            })
            .collect();
        let terms = chunks.into_iter().flatten().collect();
        let absd = (-d) as f64;
        Ok(Self {
            k,
            form: form.clone(),
            orbit_bound,
            guard: 1e-3,
            absd,
            norm: absd.powf(k as f64 - 0.5) / PI,
            terms,
            polys: (0..k as usize).map(cot_derivative_poly).collect(),
            tails: Mutex::new(HashMap::new()),
        })
    }

    pub fn with_guard(mut self, guard: f64) -> Self {
        self.guard = guard;
        self
    }

    fn r_of(&self, a: i64) -> f64 {
        self.absd.sqrt() / (2.0 * a as f64)
    }

    fn tail(&self, a0: i64) -> Arc<Tail> {
        if let Some(t) = self.tails.lock().unwrap().get(&a0) {
            return t.clone();
        }
        let k = self.k;
        let partials: Vec<(Vec<C64>, Vec<Vec<C64>>)> = self
            .terms
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut coeffs = vec![C64::new(0.0, 0.0); MODES];
                let mut blocks = vec![vec![C64::new(0.0, 0.0); MODES]; BLOCKS];
                for &(a, b) in chunk {
                    if a < a0 {
                        continue;
                    }
                    let r = self.r_of(a);
                    let scale = (a as f64).powi(-(k as i32));
                    let shift = b as f64 / (2.0 * a as f64);
                    let j = (0..BLOCKS).find(|&j| a > self.orbit_bound >> (j + 1));
                    for l in 1..=MODES {
                        let t = e(C64::new(l as f64 * shift, 0.0)) * (scale * mode_coefficient(k, l, r));
                        coeffs[l - 1] += t;
                        if let Some(j) = j {
                            blocks[j][l - 1] += t;
                        }
                    }
                }
                (coeffs, blocks)
            })
            .collect();
        let mut coeffs = vec![C64::new(0.0, 0.0); MODES];
        let mut blocks = vec![vec![C64::new(0.0, 0.0); MODES]; BLOCKS];
        for (c, b) in partials {
            for l in 0..MODES {
                coeffs[l] += c[l];
                for j in 0..BLOCKS {
                    blocks[j][l] += b[j][l];
                }
            }
        }
        let t = Arc::new(Tail { coeffs, blocks });
        self.tails.lock().unwrap().insert(a0, t.clone());
        t
    }

    /// `S_k(w; r)` by partial fractions in `(X - ir)^{-p}`, `(X + ir)^{-p}`.
    fn closed_form_translates(&self, w: C64, r: f64) -> C64 {
        let k = self.k as i32;
        let two_ir = C64::new(0.0, 2.0 * r);
        let mut s = C64::new(0.0, 0.0);
        for p in 1..=k {
            let m = (k - p) as u32;
            // binom(-k, m) = (-1)^m C(k+m-1, m)
            let mut binom = 1.0;
            for j in 0..m {
                binom *= (k as f64 + j as f64) / (j as f64 + 1.0);
            }
            if m % 2 == 1 {
                binom = -binom;
            }
            let alpha = two_ir.powi(p - 2 * k) * binom;
            let beta = (-two_ir).powi(p - 2 * k) * binom;
            s += alpha * lipschitz_sum(w - C64::new(0.0, r), p as usize, &self.polys)
                + beta * lipschitz_sum(w + C64::new(0.0, r), p as usize, &self.polys);
        }
        s
    }

    fn raw(&self, z: C64) -> Result<Value> {
        let y = z.im;
        let need = (self.absd.sqrt() / (2.0 * (y - MARGIN))).ceil() as i64;
        let cap = (self.absd.sqrt() / (2.0 * R_CAP)).ceil() as i64;
        let a0 = (need.max(cap).max(1) as u64).next_power_of_two() as i64;
        if a0 > self.orbit_bound / 2 {
            return Err(Error::Invalid(format!("Im z = {y} is too small for orbit bound {}", self.orbit_bound)));
        }
        let mut direct = C64::new(0.0, 0.0);
        for &(a, b) in self.terms.iter().take_while(|(a, _)| *a < a0) {
            let r = self.r_of(a);
            let w = z + b as f64 / (2.0 * a as f64);
            // nearest pole of this translation class
            let p = w - C64::new(0.0, r);
            let dist = C64::new(p.re - p.re.round(), p.im).norm();
            if dist < self.guard {
                let c = (b * b + self.absd as i64) / (4 * a);
                return Err(Error::PoleProximity { form: format!("[{a},{b},{c}]"), z: format!("{z}"), distance: dist });
            }
            direct += self.closed_form_translates(w, r) * (a as f64).powi(-(self.k as i32));
        }
        let tail = self.tail(a0);
        let mut fourier = C64::new(0.0, 0.0);
        // mode by mode, so that cancellation at one point cannot hide a block
        let mut block = [0.0; BLOCKS];
        for l in 1..=MODES {
            let q = e(z * l as f64);
            fourier += tail.coeffs[l - 1] * q;
            for j in 0..BLOCKS {
                block[j] += (tail.blocks[j][l - 1] * q).norm();
            }
        }
        let value = (direct + fourier) * self.norm;
        // blocks shrink like 2^{1-k} on average but not one by one: project each of the last
        // few forward and take twice the geometric continuation of the largest
        let rho = 2f64.powi(1 - self.k as i32);
        let projected = (0..BLOCKS).map(|j| block[j] * rho.powi(j as i32)).fold(0.0, f64::max);
        let continuation = 2.0 * rho / (1.0 - rho);
        let err = projected * continuation.max(1.0) * self.norm + 1e-14 * value.norm().max(self.norm * direct.norm());
        Ok(Value { value, err })
    }

    /// `f_{k,P}(z)` with an error estimate; points with small imaginary part are first moved
    /// into the fundamental domain.
    pub fn eval(&self, z: C64) -> Result<Value> {
        if z.im <= 0.0 {
            return Err(Error::Invalid(format!("{z} is not in the upper half-plane")));
        }
        if z.im >= 0.8 {
            return self.raw(z);
        }
        let (m, w) = reduce_point(z);
        let v = self.raw(w)?;
        let j = automorphy(&m, z).powi(-2 * self.k as i32);
        Ok(Value { value: v.value * j, err: v.err * j.norm() })
    }

    /// Poles of `f_{k,P}` on the positive imaginary axis: heights `y` of CM points `i y` of
    /// forms `[a, 0, c]` in the class.
    pub fn axis_poles(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.terms.iter().filter(|(_, b)| *b == 0).map(|&(a, _)| self.r_of(a)).collect();
        out.sort_by(|x, y| x.partial_cmp(y).unwrap());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(k: u32, form: &QuadForm, z: C64, amax: i64, jmax: i64) -> C64 {
        let d = form.disc().to_i64().unwrap();
        let target = form.reduced().unwrap();
        let mut s = C64::new(0.0, 0.0);
        for &(a, b, _) in forms_of_disc(d, amax).iter() {
            if QuadForm::new(a, b, (b * b - d) / (4 * a)).reduced().unwrap() != target {
                continue;
            }
            for j in -jmax..=jmax {
                let bb = b + 2 * a * j;
                let c = (bb * bb - d) / (4 * a);
                s += (z * z * a as f64 + z * bb as f64 + c as f64).powi(-(k as i32));
            }
        }
        s * ((-d) as f64).powf(k as f64 - 0.5) / PI
    }

    #[test]
    fn matches_direct_sum_for_large_k() {
        let p = QuadForm::new(1, 1, 1);
        let f = FkpEvaluator::new(5, &p, 256).unwrap();
        let z = C64::new(0.1, 1.1);
        let v = f.eval(z).unwrap();
        let b = brute(5, &p, z, 256, 400);
        assert!((v.value - b).norm() < 1e-9 * b.norm().max(1.0), "{} vs {b}", v.value);
    }

    #[test]
    fn real_on_axis_and_periodic() {
        let p = QuadForm::new(1, 1, 1);
        let f = FkpEvaluator::new(2, &p, 4096).unwrap();
        let v = f.eval(C64::new(0.0, 1.3)).unwrap();
        assert!(v.value.im.abs() < 10.0 * v.err + 1e-12, "{v:?}");
        let z = C64::new(0.37, 1.05);
        let a = f.eval(z).unwrap();
        let b = f.eval(z + 1.0).unwrap();
        assert!((a.value - b.value).norm() < 1e-12);
    }

    #[test]
    fn modularity_under_s() {
        let p = QuadForm::new(1, 1, 1);
        for k in [2u32, 3, 4] {
            let f = FkpEvaluator::new(k, &p, default_orbit_bound(k)).unwrap();
            let z = C64::new(0.2, 0.5);
            let lhs = f.eval(-1.0 / z).unwrap();
            let rhs = f.eval(z).unwrap();
            let want = rhs.value * z.powi(2 * k as i32);
            let tol = 10.0 * (lhs.err + rhs.err * z.norm().powi(2 * k as i32)) + 1e-9;
            assert!((lhs.value - want).norm() < tol, "k={k}: {} vs {want} (tol {tol})", lhs.value);
        }
    }

    #[test]
    fn closed_form_agrees_with_fourier() {
        // a point where some forms can be summed either way
        let p = QuadForm::new(2, 2, 3);
        let f = FkpEvaluator::new(3, &p, 1024).unwrap();
        let z = C64::new(0.3, 3.0);
        let a = f.raw(z).unwrap();
        let w = z + 0.25;
        let r = f.r_of(2);
        let cf = f.closed_form_translates(w, r);
        let mut four = C64::new(0.0, 0.0);
        for l in 1..=MODES {
            four += e(w * l as f64) * mode_coefficient(3, l, r);
        }
        // the partial fractions cancel down from O(1) terms
        assert!((cf - four).norm() < 1e-13, "{cf} vs {four}");
        assert!(a.err < 1e-6);
    }

    #[test]
    fn pole_guard() {
        let p = QuadForm::new(1, 0, 5);
        let f = FkpEvaluator::new(2, &p, 1024).unwrap();
        let pole = C64::new(0.0, 5f64.sqrt());
        assert!(matches!(f.eval(pole + 1e-4), Err(Error::PoleProximity { .. })));
        assert_eq!(f.axis_poles().len(), 2);
    }
}
