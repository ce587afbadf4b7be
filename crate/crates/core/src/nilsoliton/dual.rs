use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::algebra::{trace_form, MetricData, TwoStepAlgebra};
use crate::arith::{rat, RatMatrix, Rational};
use crate::error::{Error, Result};

use super::{certify, NilsolitonCertificate, DEFAULT_CERT_TOL};

/// Squared radii of the nilsoliton metric on the dual of
/// `sk(I_d) ⊕ 0_l`: `r_i²` scales the trace form on the `i`-th summand
/// (`r_1` absent when `d = 1`, `r_2` when `l = 0`, `r_3` when `l < 2`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualHeisenbergRadii {
    pub d: usize,
    pub l: usize,
    /// The constant `c` with `ric = c I - c φ`.
    pub c: Rational,
    pub r_sq: [Option<Rational>; 3],
    /// `d(q-1)`, `qd-d-1`, `qd-d-2` for comparison.
    pub printed: [Rational; 3],
}

fn check_dims(q: usize, d: usize) -> Result<usize> {
    if d == 0 || 2 * d > q || q < 3 {
        return Err(Error::BadDimensions(format!("need q >= 3 and 1 <= d <= q/2, got q = {}, d = {}", q, d)));
    }
    Ok(q - 2 * d)
}

/// Solve the linear system for `r_i²` exactly.
pub fn dual_heisenberg_radii(q: usize, d: usize) -> Result<DualHeisenbergRadii> {
    let l = check_dims(q, d)?;
    let (qi, di, li) = (q as i64, d as i64, l as i64);
    let a = Rational::new((2 * di * di - di - 1).into(), (2 * di).into());
    let c = Rational::new((-((5 + 2 * qi * qi - 3 * qi) * di + 2 - 4 * qi)).into(), 4.into());
    let present = [d >= 2, l >= 1, l >= 2];
    // rows: 2λ1 = λ3, λ1 + λ2 = λ4, 2λ2 = λ5, each multiplied by 4c
    let full = [
        [&a * rat(4) + rat(1), rat(2 * li), rat(0)],
        [&a * rat(2), rat(li + 2 * di + 1), rat(li - 1)],
        [rat(0), rat(4 * di), rat(2 * li - 1)],
    ];
    let idx: Vec<usize> = (0..3).filter(|&i| present[i]).collect();
    let m = RatMatrix::from_fn(idx.len(), idx.len(), |r, s| full[idx[r]][idx[s]].clone());
    let rhs = vec![-&c * rat(4); idx.len()];
    let sol = m
        .inverse()
        .ok_or_else(|| Error::Internal("singular radius system".into()))?
        .mul_vec(&rhs);
    let mut r_sq = [None, None, None];
    for (k, &i) in idx.iter().enumerate() {
        r_sq[i] = Some(sol[k].clone());
    }
    Ok(DualHeisenbergRadii {
        d,
        l,
        c,
        r_sq,
        printed: [rat(di * (qi - 1)), rat(qi * di - di - 1), rat(qi * di - di - 2)],
    })
}

fn elementary(q: usize, a: usize, b: usize) -> RatMatrix {
    let mut m = RatMatrix::zeros(q, q);
    m[(a, b)] = rat(1);
    m[(b, a)] = rat(-1);
    m
}

/// The dual of `sk(I_d) ⊕ 0_l` in a basis orthogonal for `-Tr(K1 K2)`,
/// with the metric scaling each summand by its `r_i²`. The certificate is
/// exact.
pub fn construct_dual_heisenberg(q: usize, d: usize) -> Result<(TwoStepAlgebra, NilsolitonCertificate)> {
    let radii = dual_heisenberg_radii(q, d)?;
    let mut mats: Vec<(RatMatrix, usize)> = Vec::new();
    // L1: the part of Λ²ℝ^{2d} orthogonal to sk(I_d)
    for a in 0..2 * d {
        for b in a + 1..2 * d {
            if b != a + d {
                mats.push((elementary(q, a, b), 0));
            }
        }
    }
    let mut diag: Vec<Vec<Rational>> = Vec::new();
    for t in 1..d {
        let mut v = vec![rat(0); d];
        v[0] = rat(1);
        v[t] = rat(-1);
        for u in &diag {
            let num: Rational = v.iter().zip(u).map(|(x, y)| x * y).sum();
            let den: Rational = u.iter().map(|x| x * x).sum();
            let f = num / den;
            for (x, y) in v.iter_mut().zip(u) {
                *x -= &f * y;
            }
        }
        diag.push(v);
    }
    for v in &diag {
        let mut m = RatMatrix::zeros(q, q);
        for (t, c) in v.iter().enumerate() {
            if !c.is_zero() {
                m = &m + &elementary(q, t, d + t).scale(c);
            }
        }
        mats.push((m, 0));
    }
    // L2 and L3
    for a in 0..2 * d {
        for b in 2 * d..q {
            mats.push((elementary(q, a, b), 1));
        }
    }
    for a in 2 * d..q {
        for b in a + 1..q {
            mats.push((elementary(q, a, b), 2));
        }
    }
    let mut g = vec![rat(1); q];
    for (m, i) in &mats {
        let r = radii.r_sq[*i]
            .clone()
            .ok_or_else(|| Error::Internal("radius of an empty summand".into()))?;
        g.push(r / trace_form(m, m));
    }
    let n = TwoStepAlgebra::from_tuple(mats.into_iter().map(|(m, _)| m).collect())?;
    let cert = certify(&n, &MetricData::ExactDiagonal(g), DEFAULT_CERT_TOL)?.into_result()?;
    Ok((n, cert))
}

/// `f(f, 2) ⊕ ℝ^a`: the free two-step algebra on `f` generators plus an
/// abelian factor, in its standard nice basis.
pub fn free_plus_abelian(f: usize, a: usize) -> Result<TwoStepAlgebra> {
    if f < 2 {
        return Err(Error::BadDimensions(format!("free algebra needs f >= 2 generators, got {}", f)));
    }
    let q = f + a;
    let mut mats = Vec::new();
    for i in 0..f {
        for j in i + 1..f {
            mats.push(elementary(q, i, j));
        }
    }
    TwoStepAlgebra::from_tuple(mats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use crate::nilsoliton::nice_metric;

    #[test]
    fn radii_match_closed_form() {
        for q in 3..9 {
            for d in 1..=q / 2 {
                let r = dual_heisenberg_radii(q, d).unwrap();
                for i in 0..3 {
                    if let Some(v) = &r.r_sq[i] {
                        assert_eq!(v, &r.printed[i], "q={} d={} i={}", q, d, i);
                    }
                }
            }
        }
        assert!(dual_heisenberg_radii(4, 3).is_err());
    }

    #[test]
    fn small_dual_heisenberg() {
        let (n, cert) = construct_dual_heisenberg(3, 1).unwrap();
        assert_eq!((n.q(), n.p()), (3, 2));
        let (c, phi) = cert.exact.clone().unwrap();
        assert_eq!(c, rat(-1));
        // φ = I - ric / c has eigenvalues 3/4, 1/2 on b and 5/4 on m
        let lam: Vec<Rational> = (0..5).map(|i| -&phi[(i, i)] / &c).collect();
        assert_eq!(
            lam,
            vec![ratio(3, 4), ratio(3, 4), ratio(1, 2), ratio(5, 4), ratio(5, 4)]
        );
        for (q, d) in [(4, 1), (5, 2), (6, 2)] {
            let (_, cert) = construct_dual_heisenberg(q, d).unwrap();
            assert!(cert.is_certified() && cert.exact.is_some());
        }
    }

    #[test]
    fn free_plus_abelian_duals() {
        let n = free_plus_abelian(2, 2).unwrap();
        assert!(nice_metric(&n).unwrap().positive);
        let sol = nice_metric(&n.dualize().unwrap()).unwrap();
        assert!(sol.positive && sol.unique);
        let mut a = sol.alpha.clone();
        a.sort();
        assert_eq!(a, vec![ratio(1, 11), ratio(2, 11), ratio(2, 11), ratio(2, 11), ratio(2, 11)]);
        for (f, a) in [(3, 1), (3, 2), (4, 2), (2, 3), (3, 3), (4, 1)] {
            let dual = free_plus_abelian(f, a).unwrap().dualize().unwrap();
            let sol = nice_metric(&dual).unwrap();
            assert!(sol.unique);
            // with a = 1 there are no components (a + 1 - f) δ at all
            assert_eq!(sol.positive, a >= f || a == 1);
            let delta = Rational::new(1.into(), ((2 * a * a + a + f) as i64 - 1).into());
            let big = rat(a as i64) * &delta;
            let small = rat(a as i64 + 1 - f as i64) * &delta;
            assert_eq!(sol.alpha.iter().filter(|x| **x == big).count(), f * a);
            assert_eq!(sol.alpha.iter().filter(|x| **x == small).count(), a * (a - 1) / 2);
        }
    }
}
