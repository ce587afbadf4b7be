use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Div, Index, IndexMut, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::rational::{to_f64, Rational};
use crate::error::{Error, Result};
use crate::fmath;

/// Field operations needed by the dense elimination routines.
///
/// Rationals are exact; `f64` treats entries below a relative threshold as
/// zero.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero_val() -> Self;
    fn one_val() -> Self;
    fn from_int(v: i64) -> Self;
    fn is_nil(&self) -> bool;
    /// Size used for pivot choice and thresholds.
    fn magnitude(&self) -> f64;
    /// Larger is a better pivot.
    fn pivot_weight(&self) -> f64;
    fn negligible(&self, thresh: f64) -> bool;
    fn rank_of(m: &Mat<Self>) -> usize {
        m.rref().1.len()
    }
    fn det_of(m: &Mat<Self>) -> Self {
        m.det_elim()
    }
}

impl Scalar for Rational {
    fn zero_val() -> Self {
        Rational::zero()
    }
    fn one_val() -> Self {
        Rational::one()
    }
    fn from_int(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn is_nil(&self) -> bool {
        self.is_zero()
    }
    fn magnitude(&self) -> f64 {
        fmath::abs(to_f64(self))
    }
    fn pivot_weight(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            // small bit size keeps growth down
            1.0 / (1.0 + (self.numer().bits() + self.denom().bits()) as f64)
        }
    }
    fn negligible(&self, _thresh: f64) -> bool {
        self.is_zero()
    }
    fn rank_of(m: &Mat<Self>) -> usize {
        bareiss_rank(m)
    }
    fn det_of(m: &Mat<Self>) -> Self {
        bareiss_det(m)
    }
}

impl Scalar for f64 {
    fn zero_val() -> Self {
        0.0
    }
    fn one_val() -> Self {
        1.0
    }
    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn is_nil(&self) -> bool {
        *self == 0.0
    }
    fn magnitude(&self) -> f64 {
        fmath::abs(*self)
    }
    fn pivot_weight(&self) -> f64 {
        fmath::abs(*self)
    }
    fn negligible(&self, thresh: f64) -> bool {
        fmath::abs(*self) <= thresh
    }
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type RatMatrix = Mat<Rational>;

impl<T: fmt::Debug> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T> Mat<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn data(&self) -> &[T] {
        &self.data
    }
    pub fn into_data(self) -> Vec<T> {
        self.data
    }
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }
}

impl<T: Scalar> Mat<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(alloc::format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero_val(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one_val() } else { T::zero_val() })
    }

    pub fn diag(d: &[T]) -> Self {
        let n = d.len();
        Self::from_fn(n, n, |i, j| if i == j { d[i].clone() } else { T::zero_val() })
    }

    pub fn from_i64(rows: usize, cols: usize, v: &[i64]) -> Self {
        assert_eq!(v.len(), rows * cols);
        Mat {
            rows,
            cols,
            data: v.iter().map(|&x| T::from_int(x)).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|a| a.clone() * c.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.is_nil())
    }

    pub fn is_skew(&self) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|i| (0..=i).all(|j| self[(i, j)] == -self[(j, i)].clone()))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero_val(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero_val(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    /// Submatrix on the given row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    pub fn block_diag(blocks: &[Mat<T>]) -> Self {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(r, c);
        let (mut oi, mut oj) = (0, 0);
        for b in blocks {
            m.set_block(oi, oj, b);
            oi += b.rows;
            oj += b.cols;
        }
        m
    }

    pub fn set_block(&mut self, oi: usize, oj: usize, b: &Mat<T>) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(oi + i, oj + j)] = b[(i, j)].clone();
            }
        }
    }

    pub fn hstack(&self, o: &Mat<T>) -> Self {
        assert_eq!(self.rows, o.rows);
        Self::from_fn(self.rows, self.cols + o.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                o[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn vstack(&self, o: &Mat<T>) -> Self {
        assert_eq!(self.cols, o.cols);
        let mut data = self.data.clone();
        data.extend(o.data.iter().cloned());
        Mat {
            rows: self.rows + o.rows,
            cols: self.cols,
            data,
        }
    }

    fn max_magnitude(&self) -> f64 {
        self.data.iter().map(|a| a.magnitude()).fold(0.0, f64::max)
    }

    /// Reduced row echelon form and pivot columns. Float entries below
    /// `1e-10` times the largest entry count as zero.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        self.rref_tol(1e-10)
    }

    pub fn rref_tol(&self, tol: f64) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let thresh = tol * self.max_magnitude();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let mut best = None;
            let mut best_w = 0.0;
            for i in r..m.rows {
                let a = &m[(i, c)];
                if a.is_nil() || a.negligible(thresh) {
                    continue;
                }
                let w = a.pivot_weight();
                if best.is_none() || w > best_w {
                    best = Some(i);
                    best_w = w;
                }
            }
            let Some(p) = best else {
                for i in r..m.rows {
                    m[(i, c)] = T::zero_val();
                }
                continue;
            };
            m.swap_rows(r, p);
            let inv = T::one_val() / m[(r, c)].clone();
            for j in c..m.cols {
                m[(r, j)] = m[(r, j)].clone() * inv.clone();
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m[(i, c)].clone();
                if f.is_nil() {
                    continue;
                }
                for j in c..m.cols {
                    let t = f.clone() * m[(r, j)].clone();
                    m[(i, j)] = m[(i, j)].clone() - t;
                }
                m[(i, c)] = T::zero_val();
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        T::rank_of(self)
    }

    /// Basis of the right kernel `{v : M v = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<T>> {
        let (r, piv) = self.rref();
        nullspace_from_rref(&r, &piv, self.cols)
    }

    /// Basis of the row space (nonzero rows of the RREF).
    pub fn row_space(&self) -> Self {
        let (r, piv) = self.rref();
        Self::from_fn(piv.len(), self.cols, |i, j| r[(i, j)].clone())
    }

    /// One solution of `M x = b`, or `None` if inconsistent.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        assert_eq!(b.len(), self.rows);
        let aug = self.hstack(&Mat {
            rows: self.rows,
            cols: 1,
            data: b.to_vec(),
        });
        let (r, piv) = aug.rref();
        if piv.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![T::zero_val(); self.cols];
        for (i, &c) in piv.iter().enumerate() {
            x[c] = r[(i, self.cols)].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let (r, piv) = self.hstack(&Self::identity(n)).rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        Some(Self::from_fn(n, n, |i, j| r[(i, n + j)].clone()))
    }

    pub fn det(&self) -> T {
        assert!(self.is_square());
        T::det_of(self)
    }

    fn det_elim(&self) -> T {
        let mut m = self.clone();
        let n = self.rows;
        let thresh = 1e-14 * self.max_magnitude();
        let mut det = T::one_val();
        for c in 0..n {
            let mut best = None;
            let mut best_w = 0.0;
            for i in c..n {
                let a = &m[(i, c)];
                if a.is_nil() || a.negligible(thresh) {
                    continue;
                }
                if best.is_none() || a.pivot_weight() > best_w {
                    best = Some(i);
                    best_w = a.pivot_weight();
                }
            }
            let Some(p) = best else {
                return T::zero_val();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det = det * piv.clone();
            for i in c + 1..n {
                let f = m[(i, c)].clone() / piv.clone();
                if f.is_nil() {
                    continue;
                }
                for j in c..n {
                    let t = f.clone() * m[(c, j)].clone();
                    m[(i, j)] = m[(i, j)].clone() - t;
                }
            }
        }
        det
    }
}

pub(crate) fn nullspace_from_rref<T: Scalar>(r: &Mat<T>, piv: &[usize], cols: usize) -> Vec<Vec<T>> {
    let mut is_piv = vec![false; cols];
    for &c in piv {
        is_piv[c] = true;
    }
    let mut out = Vec::new();
    for f in (0..cols).filter(|&c| !is_piv[c]) {
        let mut v = vec![T::zero_val(); cols];
        v[f] = T::one_val();
        for (i, &c) in piv.iter().enumerate() {
            v[c] = -r[(i, f)].clone();
        }
        out.push(v);
    }
    out
}

fn integer_rows(m: &RatMatrix) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    let mut scales = Vec::with_capacity(m.rows);
    let rows = (0..m.rows)
        .map(|i| {
            let row = m.row(i);
            let l = row.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
            let out = row.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect();
            scales.push(l);
            out
        })
        .collect();
    (rows, scales)
}

/// Determinant by fraction-free elimination on an integer copy.
fn bareiss_det(m: &RatMatrix) -> Rational {
    let n = m.rows;
    if n == 0 {
        return Rational::one();
    }
    let (mut a, scales) = integer_rows(m);
    let mut prev = BigInt::one();
    let mut neg = false;
    for c in 0..n {
        let Some(p) = (c..n).filter(|&i| !a[i][c].is_zero()).min_by_key(|&i| a[i][c].bits()) else {
            return Rational::zero();
        };
        if p != c {
            a.swap(p, c);
            neg = !neg;
        }
        let (top, bottom) = a.split_at_mut(c + 1);
        let pr = &top[c];
        for row in bottom.iter_mut() {
            let f = row[c].clone();
            for j in c..n {
                let v = &pr[c] * &row[j] - &f * &pr[j];
                row[j] = v / &prev;
            }
        }
        prev = a[c][c].clone();
    }
    let den = scales.iter().fold(BigInt::one(), |d, l| d * l);
    let d = Rational::new(prev, den);
    if neg {
        -d
    } else {
        d
    }
}

/// Rank of a rational matrix by fraction-free elimination on an integer
/// copy (rows cleared of denominators).
fn bareiss_rank(m: &RatMatrix) -> usize {
    let mut a: Vec<Vec<BigInt>> = (0..m.rows)
        .map(|i| {
            let row = m.row(i);
            let l = row.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
            row.iter()
                .map(|x| (x * Rational::from_integer(l.clone())).to_integer())
                .collect()
        })
        .filter(|row: &Vec<BigInt>| row.iter().any(|x| !x.is_zero()))
        .collect();
    let rows = a.len();
    let cols = m.cols;
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows)
            .filter(|&i| !a[i][c].is_zero())
            .min_by_key(|&i| a[i][c].bits())
        else {
            continue;
        };
        a.swap(r, p);
        let (top, bottom) = a.split_at_mut(r + 1);
        let pr = &top[r];
        for row in bottom.iter_mut() {
            let f = row[c].clone();
            for j in c..cols {
                let v = &pr[c] * &row[j] - &f * &pr[j];
                row[j] = v / &prev;
            }
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

impl<T: Scalar> Add for &Mat<T> {
    type Output = Mat<T>;
    fn add(self, o: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
}

impl<T: Scalar> Sub for &Mat<T> {
    type Output = Mat<T>;
    fn sub(self, o: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }
}

impl<T: Scalar> Neg for &Mat<T> {
    type Output = Mat<T>;
    fn neg(self) -> Mat<T> {
        self.map(|a| -a.clone())
    }
}

impl<T: Scalar> Mul for &Mat<T> {
    type Output = Mat<T>;
    fn mul(self, o: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, o.rows, "matrix product shape mismatch");
        let mut out = Mat::<T>::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_nil() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if b.is_nil() {
                        continue;
                    }
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                }
            }
        }
        out
    }
}

impl RatMatrix {
    pub fn to_f64(&self) -> Mat<f64> {
        self.map(to_f64)
    }
}

impl Mat<f64> {
    pub fn frobenius(&self) -> f64 {
        fmath::sqrt(self.data.iter().map(|a| a * a).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| fmath::abs(*a)).fold(0.0, f64::max)
    }

    pub fn rank_tol(&self, tol: f64) -> usize {
        self.rref_tol(tol).1.len()
    }

    /// Lower-triangular `L` with `L Lᵀ = self`, or `None` if not positive
    /// definite.
    pub fn cholesky(&self) -> Option<Mat<f64>> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut l = Mat::<f64>::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 0.0) {
                return None;
            }
            let dj = fmath::sqrt(d);
            l[(j, j)] = dj;
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / dj;
            }
        }
        Some(l)
    }

    /// Eigen-decomposition of a symmetric matrix by cyclic Jacobi sweeps.
    /// Returns eigenvalues (ascending) and the matching eigenvectors as
    /// columns.
    pub fn sym_eigen(&self) -> (Vec<f64>, Mat<f64>) {
        let n = self.rows;
        let mut a = self.clone();
        let mut v = Mat::<f64>::identity(n);
        for _ in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)] * a[(i, j)])
                .sum();
            if off <= 1e-30 * (1.0 + { let f = a.frobenius(); f * f }) {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                    let t = theta.signum() / (fmath::abs(theta) + fmath::sqrt(theta * theta + 1.0));
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / fmath::sqrt(t * t + 1.0);
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
        let vals = idx.iter().map(|&i| a[(i, i)]).collect();
        let vecs = Mat::from_fn(n, n, |r, c| v[(r, idx[c])]);
        (vals, vecs)
    }

    /// Least-squares solution of minimum norm via the pseudo-inverse of
    /// `AᵀA` (symmetric eigen-decomposition, small singular values dropped).
    pub fn lstsq_min_norm(&self, b: &[f64]) -> Vec<f64> {
        let at = self.transpose();
        let ata = &at * self;
        let atb = at.mul_vec(b);
        let (vals, vecs) = ata.sym_eigen();
        let vmax = vals.iter().cloned().fold(0.0, f64::max);
        let n = self.cols;
        let mut x = vec![0.0; n];
        for (k, &lam) in vals.iter().enumerate() {
            if lam <= 1e-12 * vmax.max(1e-300) {
                continue;
            }
            let coef: f64 = (0..n).map(|i| vecs[(i, k)] * atb[i]).sum::<f64>() / lam;
            for i in 0..n {
                x[i] += coef * vecs[(i, k)];
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};

    fn rm(r: usize, c: usize, v: &[i64]) -> RatMatrix {
        RatMatrix::from_i64(r, c, v)
    }

    #[test]
    fn rank_and_nullspace() {
        let m = rm(3, 3, &[1, 2, 3, 4, 5, 6, 7, 8, 9]);
        assert_eq!(m.rank(), 2);
        assert_eq!(m.rref().1.len(), 2);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn bareiss_matches_rref() {
        let m = RatMatrix::from_fn(4, 5, |i, j| ratio((i * 7 + j * 3) as i64 % 5 - 2, (j + 1) as i64));
        assert_eq!(bareiss_rank(&m), m.rref().1.len());
    }

    #[test]
    fn fraction_free_det() {
        let mut seed = 7u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 33) % 11) as i64 - 5
        };
        for n in 1..7 {
            for _ in 0..10 {
                let m = RatMatrix::from_fn(n, n, |_, _| ratio(next(), 1 + next().abs()));
                assert_eq!(bareiss_det(&m), m.det_elim());
            }
        }
        assert_eq!(rm(2, 2, &[0, 1, 1, 0]).det(), rat(-1));
        assert_eq!(rm(2, 2, &[1, 2, 2, 4]).det(), rat(0));
    }

    #[test]
    fn inverse_and_det() {
        let m = rm(2, 2, &[2, 1, 1, 3]);
        assert_eq!(m.det(), rat(5));
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, RatMatrix::identity(2));
        assert!(rm(2, 2, &[1, 2, 2, 4]).inverse().is_none());
    }

    #[test]
    fn solve_consistent_and_not() {
        let m = rm(2, 2, &[1, 1, 2, 2]);
        assert!(m.solve(&[rat(1), rat(3)]).is_none());
        let x = m.solve(&[rat(1), rat(2)]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![rat(1), rat(2)]);
    }

    #[test]
    fn jacobi_and_cholesky() {
        let m = Mat::<f64>::from_i64(3, 3, &[4, 1, 0, 1, 3, 1, 0, 1, 2]);
        let (vals, vecs) = m.sym_eigen();
        for k in 0..3 {
            let v: Vec<f64> = (0..3).map(|i| vecs[(i, k)]).collect();
            let mv = m.mul_vec(&v);
            for i in 0..3 {
                assert!((mv[i] - vals[k] * v[i]).abs() < 1e-12);
            }
        }
        let l = m.cholesky().unwrap();
        assert!((&(&l * &l.transpose()) - &m).frobenius() < 1e-12);
    }
}
