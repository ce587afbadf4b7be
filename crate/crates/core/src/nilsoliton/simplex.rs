use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::arith::{RatMatrix, Rational};

/// Some `x >= 0` with `A x = b`, found by the first phase of the simplex
/// method in exact arithmetic (Bland's rule, so it terminates), or `None`
/// when the system has no nonnegative solution.
pub fn feasible_nonnegative(a: &RatMatrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let (m, n) = (a.rows(), a.cols());
    assert_eq!(b.len(), m);
    let width = n + m + 1;
    let rhs = width - 1;
    // tableau rows with b >= 0, artificial variables n..n+m
    let mut t: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let flip = b[i].is_negative();
            let mut row = vec![Rational::zero(); width];
            for j in 0..n {
                row[j] = if flip { -a[(i, j)].clone() } else { a[(i, j)].clone() };
            }
            row[n + i] = Rational::from_integer(1.into());
            row[rhs] = if flip { -b[i].clone() } else { b[i].clone() };
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();
    // reduced costs for minimizing the sum of artificials
    let mut obj = vec![Rational::zero(); width];
    for row in &t {
        for j in 0..n {
            obj[j] -= &row[j];
        }
        obj[rhs] -= &row[rhs];
    }
    loop {
        let Some(enter) = (0..n + m).find(|&j| obj[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][rhs] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // phase one is bounded below by zero
        let (r, _) = leave.expect("bounded objective");
        let p = t[r][enter].clone();
        for v in t[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    if !pv.is_zero() {
                        *v -= &f * pv;
                    }
                }
            }
        }
        if !obj[enter].is_zero() {
            let f = obj[enter].clone();
            for (v, pv) in obj.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        basis[r] = enter;
    }
    if !obj[rhs].is_zero() {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][rhs].clone();
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};

    #[test]
    fn small_systems() {
        let a = RatMatrix::from_i64(2, 3, &[1, 1, 1, 1, -1, 0]);
        let x = feasible_nonnegative(&a, &[rat(2), rat(1)]).unwrap();
        assert!(x.iter().all(|v| !v.is_negative()));
        assert_eq!(a.mul_vec(&x), vec![rat(2), rat(1)]);
        // x1 + x2 = -1 has no nonnegative solution
        let a = RatMatrix::from_i64(1, 2, &[1, 1]);
        assert!(feasible_nonnegative(&a, &[rat(-1)]).is_none());
        let a = RatMatrix::from_i64(2, 2, &[2, 0, 0, 3]);
        assert_eq!(feasible_nonnegative(&a, &[rat(1), rat(1)]).unwrap(), vec![ratio(1, 2), ratio(1, 3)]);
        // redundant rows
        let a = RatMatrix::from_i64(2, 2, &[1, 1, 2, 2]);
        assert!(feasible_nonnegative(&a, &[rat(1), rat(2)]).is_some());
    }
}
