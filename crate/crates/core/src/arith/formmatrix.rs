use alloc::format;
use alloc::vec::Vec;

use num_traits::Zero;

use super::form::{gcd_forms, BinaryForm};
use super::matrix::RatMatrix;
use super::poly::Poly;
use super::rational::{rat, Rational};
use crate::error::{Error, Result};

/// Matrix of binary forms, all of one degree (zero entries allowed).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormMatrix {
    rows: usize,
    cols: usize,
    degree: usize,
    entries: Vec<BinaryForm>,
}

impl FormMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BinaryForm>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!("{} forms for {}x{}", entries.len(), rows, cols)));
        }
        let mut degree = None;
        for e in entries.iter().filter(|e| !e.is_zero()) {
            match degree {
                None => degree = Some(e.degree()),
                Some(d) if d != e.degree() => {
                    return Err(Error::Shape("forms of mixed degree".into()));
                }
                _ => {}
            }
        }
        Ok(FormMatrix {
            rows,
            cols,
            degree: degree.unwrap_or(0),
            entries,
        })
    }

    /// The pencil `x A + y B`.
    pub fn pencil(a: &RatMatrix, b: &RatMatrix) -> Result<Self> {
        if (a.rows(), a.cols()) != (b.rows(), b.cols()) {
            return Err(Error::Shape("pencil matrices differ in shape".into()));
        }
        let entries = a
            .data()
            .iter()
            .zip(b.data())
            .map(|(p, q)| BinaryForm::linear(p.clone(), q.clone()))
            .collect();
        Ok(FormMatrix {
            rows: a.rows(),
            cols: a.cols(),
            degree: 1,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn get(&self, i: usize, j: usize) -> &BinaryForm {
        &self.entries[i * self.cols + j]
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> RatMatrix {
        RatMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).eval(x, y))
    }

    fn select(&self, rows: &[usize], cols: &[usize]) -> FormMatrix {
        let entries = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j).clone())
            .collect();
        FormMatrix {
            rows: rows.len(),
            cols: cols.len(),
            degree: self.degree,
            entries,
        }
    }

    /// Determinant of a square form matrix, recovered from exact values on
    /// the affine line `y = 1` by interpolation.
    pub fn det(&self) -> BinaryForm {
        assert_eq!(self.rows, self.cols);
        let total = self.rows * self.degree;
        let xs: Vec<Rational> = (0..=total as i64).map(rat).collect();
        let ys: Vec<Rational> = xs.iter().map(|x| self.eval(x, &rat(1)).det()).collect();
        let p = Poly::interpolate(&xs, &ys);
        if p.is_zero() {
            return BinaryForm::zero();
        }
        BinaryForm::from_poly(&p, total - p.degree())
    }
}

/// Rank over the field of rational functions. A nonzero `r x r` minor has
/// degree at most `r * deg`, so it cannot vanish at `r * deg + 1` distinct
/// points of the line `y = 1`; the maximum rank over those points is exact.
pub fn generic_rank(m: &FormMatrix) -> usize {
    let full = m.rows.min(m.cols);
    if m.entries.iter().all(|e| e.is_zero()) {
        return 0;
    }
    let mut best = 0;
    for x0 in 0..=(full * m.degree.max(1)) as i64 {
        best = best.max(m.eval(&rat(x0), &rat(1)).rank());
        if best == full {
            break;
        }
    }
    best
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// `Delta_r`: monic gcd of all `r x r` minors, or 0 if they all vanish.
/// Minors are enumerated until the gcd drops to 1.
pub fn minors_gcd(m: &FormMatrix, r: usize) -> BinaryForm {
    assert!(r >= 1 && r <= m.rows.min(m.cols), "minor size out of range");
    let rs = combinations(m.rows, r);
    let cs = combinations(m.cols, r);
    let mut g = BinaryForm::zero();
    for ri in &rs {
        for ci in &cs {
            let d = m.select(ri, ci).det();
            if d.is_zero() {
                continue;
            }
            g = gcd_forms(&g, &d);
            if g.degree() == 0 && !g.coeffs()[0].is_zero() {
                return g;
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pencil(q: usize, a: &[i64], b: &[i64]) -> FormMatrix {
        FormMatrix::pencil(&RatMatrix::from_i64(q, q, a), &RatMatrix::from_i64(q, q, b)).unwrap()
    }

    // sk(x) ⊕ sk(x + y)
    fn two_blocks() -> FormMatrix {
        pencil(
            4,
            &[0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 0, 1, 0, 0, -1, 0],
            &[0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, -1, 0],
        )
    }

    #[test]
    fn ranks() {
        // sk(L1) / sk(R1)
        let m = pencil(3, &[0, 1, 0, -1, 0, 0, 0, 0, 0], &[0, 0, 1, 0, 0, 0, -1, 0, 0]);
        assert_eq!(generic_rank(&m), 2);
        assert_eq!(generic_rank(&pencil(3, &[0; 9], &[0; 9])), 0);
        assert_eq!(generic_rank(&two_blocks()), 4);
    }

    #[test]
    fn delta_chain() {
        let m = two_blocks();
        let x = BinaryForm::x();
        let xy = BinaryForm::from_i64(&[1, 1]);
        assert_eq!(minors_gcd(&m, 4), x.pow(2).mul(&xy.pow(2)));
        assert_eq!(minors_gcd(&m, 3), x.mul(&xy));
        assert_eq!(minors_gcd(&m, 2), BinaryForm::one());
        for r in 1..4 {
            let a = minors_gcd(&m, r);
            let b = minors_gcd(&m, r + 1);
            assert!(b.div_exact(&a).is_some());
        }
    }
}
