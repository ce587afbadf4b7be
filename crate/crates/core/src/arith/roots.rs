//! Floating root finding used to locate candidate factors, which are then
//! confirmed by exact division.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::poly::Poly;
use super::rational::{rat, to_f64, Rational};
use crate::fmath;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct C64 {
    pub re: f64,
    pub im: f64,
}

impl C64 {
    pub fn new(re: f64, im: f64) -> Self {
        C64 { re, im }
    }
    fn add(self, o: C64) -> C64 {
        C64::new(self.re + o.re, self.im + o.im)
    }
    fn sub(self, o: C64) -> C64 {
        C64::new(self.re - o.re, self.im - o.im)
    }
    fn mul(self, o: C64) -> C64 {
        C64::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
    fn div(self, o: C64) -> C64 {
        let d = o.re * o.re + o.im * o.im;
        C64::new(
            (self.re * o.re + self.im * o.im) / d,
            (self.im * o.re - self.re * o.im) / d,
        )
    }
    pub fn norm(self) -> f64 {
        fmath::hypot(self.re, self.im)
    }
}

fn horner(c: &[f64], z: C64) -> (C64, C64) {
    // value and derivative
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp.mul(z).add(p);
        p = p.mul(z).add(C64::new(a, 0.0));
    }
    (p, dp)
}

/// All complex roots of a nonzero polynomial (Aberth iteration).
pub(crate) fn complex_roots(p: &Poly) -> Vec<C64> {
    let n = p.degree();
    if n == 0 {
        return Vec::new();
    }
    let lead = to_f64(&p.lead());
    let c: Vec<f64> = p.coeffs().iter().map(|a| to_f64(a) / lead).collect();
    let bound = 1.0 + c[..n].iter().map(|a| fmath::abs(*a)).fold(0.0, f64::max);
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let ang = 2.0 * core::f64::consts::PI * (k as f64 + 0.25) / n as f64;
            let r = bound * 0.5 + 0.1;
            C64::new(r * libm::cos(ang), r * libm::sin(ang))
        })
        .collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (pv, dpv) = horner(&c, z[i]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv.div(dpv);
            let mut s = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i].sub(z[j]);
                    if d.norm() > 0.0 {
                        s = s.add(C64::new(1.0, 0.0).div(d));
                    }
                }
            }
            let denom = C64::new(1.0, 0.0).sub(ratio.mul(s));
            let w = if denom.norm() > 0.0 { ratio.div(denom) } else { ratio };
            z[i] = z[i].sub(w);
            moved = moved.max(w.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    // Newton polish
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (pv, dpv) = horner(&c, *zi);
            if dpv.norm() == 0.0 {
                break;
            }
            *zi = zi.sub(pv.div(dpv));
        }
    }
    z
}

/// Continued-fraction convergents of `x` with denominator at most `max_den`.
pub(crate) fn convergents(x: f64, max_den: f64) -> Vec<Rational> {
    let mut out = Vec::new();
    if !x.is_finite() {
        return out;
    }
    let (mut h0, mut h1) = (BigInt::from(0), BigInt::from(1));
    let (mut k0, mut k1) = (BigInt::from(1), BigInt::from(0));
    let mut y = x;
    for _ in 0..64 {
        let a = fmath::floor(y);
        let ai = BigInt::from(a as i64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        if k2.to_f64().unwrap_or(f64::INFINITY) > max_den {
            break;
        }
        out.push(Rational::new(h2.clone(), k2.clone()));
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = y - a;
        if frac.abs() < 1e-13 {
            break;
        }
        y = 1.0 / frac;
        if !y.is_finite() || y.abs() > 1e15 {
            break;
        }
    }
    out
}

fn den_bound(p: &Poly) -> f64 {
    let ints = p.primitive_integer();
    let l = ints.last().cloned().unwrap_or_else(|| BigInt::from(1));
    l.abs().to_f64().unwrap_or(1e15).min(1e15)
}

/// Splits off all rational roots of a square-free polynomial. Returns the
/// roots found and the cofactor.
pub(crate) fn split_rational_roots(p: &Poly) -> (Vec<Rational>, Poly) {
    let mut rest = p.clone();
    let mut found = Vec::new();
    if rest.is_constant() {
        return (found, rest);
    }
    if rest.coeff(0).is_zero() {
        found.push(rat(0));
        rest = rest.div_exact(&Poly::x()).expect("x divides");
    }
    let mut progress = true;
    while progress && !rest.is_constant() {
        progress = false;
        let maxd = den_bound(&rest);
        for z in complex_roots(&rest) {
            if z.im.abs() > 1e-6 * (1.0 + z.re.abs()) {
                continue;
            }
            for cand in convergents(z.re, maxd).into_iter().rev() {
                if rest.eval(&cand).is_zero() {
                    rest = rest
                        .div_exact(&Poly::linear(-cand.clone()))
                        .expect("root divides");
                    found.push(cand);
                    progress = true;
                    break;
                }
            }
            if progress {
                break;
            }
        }
    }
    (found, rest)
}

/// Splits `p` (square-free, no rational roots) into monic quadratics
/// `x^2 + 2 m x + c` with `c - m^2 > 0`. Returns `(m, c)` pairs and the part
/// that could not be split this way.
pub(crate) fn split_definite_quadratics(p: &Poly) -> (Vec<(Rational, Rational)>, Poly) {
    let mut rest = p.monic();
    let mut found = Vec::new();
    loop {
        if rest.degree() < 2 {
            break;
        }
        if rest.degree() == 2 {
            let m = rest.coeff(1) / rat(2);
            let c = rest.coeff(0);
            if &c - &m * &m > Rational::zero() {
                found.push((m, c));
                rest = Poly::one();
            }
            break;
        }
        let maxd = den_bound(&rest);
        let mut hit = false;
        let roots = complex_roots(&rest);
        'outer: for z in roots.iter().filter(|z| z.im > 1e-9 * (1.0 + z.norm())) {
            let m_f = -z.re;
            let c_f = z.re * z.re + z.im * z.im;
            let ms = convergents(2.0 * m_f, maxd * maxd);
            let cs = convergents(c_f, maxd * maxd);
            for tm in ms.iter().rev().take(4) {
                for c in cs.iter().rev().take(4) {
                    let q = Poly::new(vec![c.clone(), tm.clone(), rat(1)]);
                    if let Some(quot) = rest.div_exact(&q) {
                        let m = tm / rat(2);
                        if c - &m * &m > Rational::zero() {
                            found.push((m, c.clone()));
                            rest = quot;
                            hit = true;
                            break 'outer;
                        }
                    }
                }
            }
        }
        if !hit {
            break;
        }
    }
    (found, rest)
}
