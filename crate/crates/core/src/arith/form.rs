use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use super::poly::Poly;
use super::rational::{rat, Rational};
use super::roots::{complex_roots, split_definite_quadratics, split_rational_roots};
use crate::error::{Error, Result};
use crate::fmath;

/// Homogeneous binary form; `coeffs[t]` is the coefficient of
/// `x^(d-t) y^t`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryForm {
    coeffs: Vec<Rational>,
}

impl BinaryForm {
    /// Builds a form from its coefficients; an empty list is the zero form.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        if coeffs.is_empty() || coeffs.iter().all(|c| c.is_zero()) {
            return Self::zero();
        }
        BinaryForm { coeffs }
    }

    pub fn zero() -> Self {
        BinaryForm {
            coeffs: vec![Rational::zero()],
        }
    }

    pub fn one() -> Self {
        BinaryForm { coeffs: vec![rat(1)] }
    }

    pub fn x() -> Self {
        BinaryForm {
            coeffs: vec![rat(1), rat(0)],
        }
    }

    pub fn y() -> Self {
        BinaryForm {
            coeffs: vec![rat(0), rat(1)],
        }
    }

    /// `a x + b y`
    pub fn linear(a: Rational, b: Rational) -> Self {
        Self::new(vec![a, b])
    }

    /// `x^2 + 2 mu x y + c y^2`
    pub fn quadratic(mu: &Rational, c: &Rational) -> Self {
        Self::new(vec![rat(1), mu * rat(2), c.clone()])
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| rat(v)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Exponent of the largest power of `y` dividing the form.
    pub fn y_order(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0)
    }

    /// `f(x, 1)` as a polynomial in `x`.
    pub fn dehomogenize(&self) -> Poly {
        Poly::new(self.coeffs.iter().rev().cloned().collect())
    }

    /// `y^k * y^deg(p) p(x/y)`.
    pub fn from_poly(p: &Poly, k: usize) -> Self {
        if p.is_zero() {
            return Self::zero();
        }
        let mut c: Vec<Rational> = (0..k).map(|_| Rational::zero()).collect();
        c.extend(p.coeffs().iter().rev().cloned());
        Self::new(c)
    }

    /// Splits `f = y^k * hom(p)` with `p` of degree `deg f - k`.
    pub fn split_y(&self) -> (usize, Poly) {
        let k = self.y_order();
        let p = Poly::new(self.coeffs[k..].iter().rev().cloned().collect());
        (k, p)
    }

    /// Divides by the coefficient of the highest power of `x` present.
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let lead = self.coeffs[self.y_order()].clone();
        let inv = Rational::one() / lead;
        Self::new(self.coeffs.iter().map(|c| c * &inv).collect())
    }

    /// A form that is a pure power of `y` (an infinite elementary divisor).
    pub fn is_infinite(&self) -> bool {
        !self.is_zero() && self.y_order() == self.degree() && self.degree() > 0
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        let d = self.degree();
        let mut acc = Rational::zero();
        for (t, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc += c * num_traits::pow(x.clone(), d - t) * num_traits::pow(y.clone(), t);
            }
        }
        acc
    }

    pub fn mul(&self, o: &BinaryForm) -> BinaryForm {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        BinaryForm { coeffs: c }
    }

    pub fn pow(&self, e: usize) -> BinaryForm {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Exact quotient of forms, `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &BinaryForm) -> Option<BinaryForm> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let (ks, ps) = self.split_y();
        let (kd, pd) = d.split_y();
        if kd > ks || self.degree() < d.degree() {
            return None;
        }
        let q = ps.div_exact(&pd)?;
        let out_deg = self.degree() - d.degree();
        let qk = out_deg - q.degree();
        if qk != ks - kd {
            return None;
        }
        Some(Self::from_poly(&q, qk))
    }
}

impl fmt::Debug for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let d = self.degree();
        let mut first = true;
        for (t, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mono = monomial(d - t, t);
            let sign = if c.is_negative() { "-" } else { "+" };
            let a = c.abs();
            let coef = if a.is_one() && !mono.is_empty() {
                String::new()
            } else {
                format!("{}", a)
            };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", sign)?;
            }
            write!(f, "{}{}", coef, mono)?;
            first = false;
        }
        Ok(())
    }
}

fn monomial(a: usize, b: usize) -> String {
    let part = |v: &str, e: usize| match e {
        0 => String::new(),
        1 => String::from(v),
        _ => format!("{}^{}", v, e),
    };
    format!("{}{}", part("x", a), part("y", b))
}

/// Monic gcd of two forms; `gcd(f, 0)` is `f` normalized, `gcd(0, 0) = 0`.
pub fn gcd_forms(a: &BinaryForm, b: &BinaryForm) -> BinaryForm {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    let (ka, pa) = a.split_y();
    let (kb, pb) = b.split_y();
    BinaryForm::from_poly(&Poly::gcd(&pa, &pb), ka.min(kb)).monic()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FactorMode {
    #[default]
    Exact,
    Numeric,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormFactor {
    pub factor: BinaryForm,
    pub multiplicity: usize,
}

/// Irreducible real factors of a square-free polynomial with rational
/// coefficients: roots `r` (factor `x - r`) and quadratics
/// `x^2 + 2 mu x + c`. Errors if anything else remains.
pub(crate) fn split_squarefree_exact(s: &Poly) -> Result<(Vec<Rational>, Vec<(Rational, Rational)>)> {
    let (roots, rest) = split_rational_roots(s);
    let (quads, rest) = split_definite_quadratics(&rest);
    if !rest.is_constant() {
        return Err(Error::Unsupported(format!(
            "factor of degree {} with irrational roots; retry in numeric mode",
            rest.degree()
        )));
    }
    Ok((roots, quads))
}

/// Floating root of a square-free polynomial: real or one of a conjugate
/// pair (`im > 0`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct NumRoot {
    pub re: f64,
    pub im: f64,
}

/// Float roots of `p` with the upper half-plane representative of each
/// conjugate pair; roots within `tol` (relative) are clustered.
pub(crate) fn numeric_roots(p: &Poly, tol: f64) -> Vec<(NumRoot, usize)> {
    let mut out: Vec<(NumRoot, usize)> = Vec::new();
    for z in complex_roots(p) {
        let scale = 1.0 + z.norm();
        let im = if fmath::abs(z.im) <= tol.max(1e-12) * scale * 1e3 { 0.0 } else { z.im };
        if im < 0.0 {
            continue;
        }
        let r = NumRoot { re: z.re, im };
        if let Some(slot) = out
            .iter_mut()
            .find(|(o, _)| fmath::hypot(o.re - r.re, o.im - r.im) <= tol * scale)
        {
            slot.1 += 1;
        } else {
            out.push((r, 1));
        }
    }
    out
}

fn exact_of(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

/// Factors a nonzero form into real irreducible factors with
/// multiplicities. The product of the factors equals `f` up to a scalar.
pub fn factor_form(f: &BinaryForm, mode: FactorMode, tol: f64) -> Result<Vec<FormFactor>> {
    if f.is_zero() {
        return Err(Error::Degenerate("cannot factor the zero form".into()));
    }
    let (k, p) = f.split_y();
    let mut out = Vec::new();
    if k > 0 {
        out.push(FormFactor {
            factor: BinaryForm::y(),
            multiplicity: k,
        });
    }
    let sf = p.squarefree_decomposition();
    match mode {
        FactorMode::Exact => {
            for (i, s) in sf.iter().enumerate() {
                if s.is_constant() {
                    continue;
                }
                let (roots, quads) = split_squarefree_exact(s)?;
                for r in roots {
                    out.push(FormFactor {
                        factor: BinaryForm::linear(rat(1), -r),
                        multiplicity: i + 1,
                    });
                }
                for (mu, c) in quads {
                    out.push(FormFactor {
                        factor: BinaryForm::quadratic(&mu, &c),
                        multiplicity: i + 1,
                    });
                }
            }
        }
        FactorMode::Numeric => {
            let mut all: Vec<(NumRoot, usize)> = Vec::new();
            for (i, s) in sf.iter().enumerate() {
                if s.is_constant() {
                    continue;
                }
                for (r, m) in numeric_roots(s, tol) {
                    let scale = 1.0 + fmath::hypot(r.re, r.im);
                    if let Some(slot) = all
                        .iter_mut()
                        .find(|(o, _)| fmath::hypot(o.re - r.re, o.im - r.im) <= tol * scale)
                    {
                        slot.1 += m * (i + 1);
                    } else {
                        all.push((r, m * (i + 1)));
                    }
                }
            }
            for (r, m) in all {
                let factor = if r.im == 0.0 {
                    BinaryForm::linear(rat(1), -exact_of(r.re))
                } else {
                    let mu = exact_of(-r.re);
                    let c = exact_of(r.re * r.re + r.im * r.im);
                    BinaryForm::quadratic(&mu, &c)
                };
                out.push(FormFactor { factor, multiplicity: m });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product(fs: &[FormFactor]) -> BinaryForm {
        fs.iter()
            .fold(BinaryForm::one(), |acc, f| acc.mul(&f.factor.pow(f.multiplicity)))
    }

    #[test]
    fn gcd_examples() {
        // x^2 (x+y) and x (x+y)^2
        let a = BinaryForm::from_i64(&[1, 1, 0, 0]);
        let b = BinaryForm::from_i64(&[1, 2, 1, 0]);
        assert_eq!(gcd_forms(&a, &b), BinaryForm::from_i64(&[1, 1, 0]));
        let x2 = BinaryForm::from_i64(&[1, 0, 0]);
        let y2 = BinaryForm::from_i64(&[0, 0, 1]);
        assert_eq!(gcd_forms(&x2, &y2), BinaryForm::one());
        let sq = BinaryForm::from_i64(&[1, 2, 1]);
        let l = BinaryForm::from_i64(&[1, 1]);
        assert_eq!(gcd_forms(&sq, &l), l);
        assert_eq!(gcd_forms(&BinaryForm::zero(), &BinaryForm::zero()), BinaryForm::zero());
        assert_eq!(
            gcd_forms(&BinaryForm::from_i64(&[2, 4]), &BinaryForm::zero()),
            BinaryForm::from_i64(&[1, 2])
        );
    }

    #[test]
    fn gcd_of_pure_y_powers() {
        let a = BinaryForm::from_i64(&[0, 0, 3]);
        let b = BinaryForm::from_i64(&[0, 2, 2]);
        assert_eq!(gcd_forms(&a, &b), BinaryForm::y());
        assert!(BinaryForm::y().is_infinite());
    }

    #[test]
    fn factor_examples() {
        let f = BinaryForm::from_i64(&[1, 1, 0, 0]);
        let fs = factor_form(&f, FactorMode::Exact, 1e-9).unwrap();
        assert!(fs.contains(&FormFactor { factor: BinaryForm::x(), multiplicity: 2 }));
        assert!(fs.contains(&FormFactor { factor: BinaryForm::from_i64(&[1, 1]), multiplicity: 1 }));
        assert_eq!(product(&fs), f);

        let g = BinaryForm::from_i64(&[1, 0, 1]);
        let fs = factor_form(&g, FactorMode::Exact, 1e-9).unwrap();
        assert_eq!(fs, vec![FormFactor { factor: g.clone(), multiplicity: 1 }]);

        let h = BinaryForm::from_i64(&[1, 0, -2]);
        assert!(matches!(factor_form(&h, FactorMode::Exact, 1e-9), Err(Error::Unsupported(_))));
        let fs = factor_form(&h, FactorMode::Numeric, 1e-9).unwrap();
        assert_eq!(fs.len(), 2);
    }

    #[test]
    fn factor_with_y_and_repeated_quadratic() {
        // y^2 (x^2 + 2xy + 5y^2)^2 (3x - y)
        let q = BinaryForm::quadratic(&rat(1), &rat(5));
        let f = BinaryForm::y().pow(2).mul(&q.pow(2)).mul(&BinaryForm::from_i64(&[3, -1]));
        let fs = factor_form(&f, FactorMode::Exact, 1e-9).unwrap();
        assert_eq!(product(&fs).monic(), f.monic());
        assert!(fs.contains(&FormFactor { factor: q, multiplicity: 2 }));
        assert!(fs.contains(&FormFactor { factor: BinaryForm::y(), multiplicity: 2 }));
    }

    #[test]
    fn display_and_division() {
        let f = BinaryForm::from_i64(&[1, -2, 0, 3]);
        assert_eq!(alloc::format!("{}", f), "x^3 - 2x^2y + 3y^3");
        let a = BinaryForm::from_i64(&[1, 1]).mul(&BinaryForm::y());
        assert_eq!(a.div_exact(&BinaryForm::y()), Some(BinaryForm::from_i64(&[1, 1])));
        assert_eq!(a.div_exact(&BinaryForm::x()), None);
    }
}
