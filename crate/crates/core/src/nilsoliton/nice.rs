use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::algebra::TwoStepAlgebra;
use crate::arith::{rat, to_f64, Mat, RatMatrix, Rational};
use crate::canonical::CanonicalSpec;
use crate::classifier::{classify, subsingular_labeling, VerdictCase};
use crate::error::{Error, Result};
use crate::fmath;
use crate::pencil::{PencilInvariants, RealDivisor};

use super::simplex::feasible_nonnegative;

/// Solution of `Y Yᵀ α = [1]` for a nice basis, and the metric it gives.
#[derive(Clone, Debug)]
pub struct NiceBasisSolution {
    pub y: RatMatrix,
    /// Structure constant of each row of `Y`.
    pub consts: Vec<Rational>,
    pub alpha: Vec<Rational>,
    /// A solution with all coordinates positive exists.
    pub positive: bool,
    /// `Y Yᵀ` is invertible.
    pub unique: bool,
    /// Log-scales: the metric `exp(2 s_a)` is nilsoliton.
    pub s: Option<Vec<f64>>,
    pub nu1: Option<Rational>,
    pub nu2: Option<Rational>,
    pub delta: Option<Rational>,
}

/// Nonzero brackets `[e_i, e_j] = c e_k` (`i < j`), ordered by `k` and then
/// by `i`. Fails unless the basis is nice.
pub fn nice_brackets(n: &TwoStepAlgebra) -> Result<Vec<(usize, usize, usize, Rational)>> {
    let q = n.q();
    let js = n.matrices();
    for i in 0..q {
        for j in i + 1..q {
            let targets = js.iter().filter(|m| !m[(i, j)].is_zero()).count();
            if targets > 1 {
                return Err(Error::NotNice(format!("[e{}, e{}] has {} components", i + 1, j + 1, targets)));
            }
        }
    }
    let mut out = Vec::new();
    for (a, m) in js.iter().enumerate() {
        for i in 0..q {
            let row = (0..q).filter(|&j| !m[(i, j)].is_zero()).count();
            if row > 1 {
                return Err(Error::NotNice(format!(
                    "e{} brackets into z{} with {} partners",
                    i + 1,
                    a + 1,
                    row
                )));
            }
            for j in i + 1..q {
                if !m[(i, j)].is_zero() {
                    out.push((i, j, q + a, m[(i, j)].clone()));
                }
            }
        }
    }
    Ok(out)
}

/// The matrix `Y` (one row `e_i + e_j - e_k` per bracket) and the structure
/// constants of its rows.
pub fn build_nice_y(n: &TwoStepAlgebra) -> Result<(RatMatrix, Vec<Rational>)> {
    let br = nice_brackets(n)?;
    let mut y = RatMatrix::zeros(br.len(), n.dim());
    let mut consts = Vec::with_capacity(br.len());
    for (r, (i, j, k, c)) in br.into_iter().enumerate() {
        y[(r, i)] = rat(1);
        y[(r, j)] = rat(1);
        y[(r, k)] = rat(-1);
        consts.push(c);
    }
    Ok((y, consts))
}

pub fn solve_alpha(y: &RatMatrix) -> NiceBasisSolution {
    solve_alpha_with(y, &vec![rat(1); y.rows()])
}

/// Exact `α` with `Y Yᵀ α = [1]` (positive if possible) and, when positive,
/// log-scales `s` with `c_r² exp(-2 (Y s)_r) = α_r`.
pub fn solve_alpha_with(y: &RatMatrix, consts: &[Rational]) -> NiceBasisSolution {
    let m = y.rows();
    let a = y * &y.transpose();
    let ones = vec![rat(1); m];
    let (alpha, unique, positive) = match a.inverse() {
        Some(inv) => {
            let alpha = inv.mul_vec(&ones);
            let pos = alpha.iter().all(|x| x.is_positive());
            (alpha, true, pos)
        }
        None => {
            // α = (1 + β) / λ with β >= 0, λ >= 0 and A β - λ 1 = -A 1
            let lhs = a.hstack(&RatMatrix::from_fn(m, 1, |_, _| rat(-1)));
            let rhs: Vec<Rational> = a.mul_vec(&ones).into_iter().map(|x| -x).collect();
            match feasible_nonnegative(&lhs, &rhs) {
                Some(x) => {
                    let lambda = &x[m];
                    let alpha = (0..m).map(|r| (rat(1) + &x[r]) / lambda).collect();
                    (alpha, false, true)
                }
                None => (a.solve(&ones).expect("[1] lies in the range of Y"), false, false),
            }
        }
    };
    let s = if positive { log_scales(y, consts, &alpha) } else { None };
    NiceBasisSolution {
        y: y.clone(),
        consts: consts.to_vec(),
        alpha,
        positive,
        unique,
        s,
        nu1: None,
        nu2: None,
        delta: None,
    }
}

fn log_scales(y: &RatMatrix, consts: &[Rational], alpha: &[Rational]) -> Option<Vec<f64>> {
    let rhs: Vec<f64> = alpha
        .iter()
        .zip(consts)
        .map(|(a, c)| -0.5 * fmath::ln(to_f64(a) / to_f64(&(c * c))))
        .collect();
    let yf: Mat<f64> = y.to_f64();
    let s = yf.lstsq_min_norm(&rhs);
    let back = yf.mul_vec(&s);
    let err = back.iter().zip(&rhs).map(|(a, b)| fmath::abs(a - b)).fold(0.0, f64::max);
    let scale = rhs.iter().map(|x| fmath::abs(*x)).fold(1.0, f64::max);
    (err <= 1e-9 * scale).then_some(s)
}

/// `x^e` for an integer exponent.
fn rat_pow(x: &Rational, e: &Rational) -> Option<Rational> {
    if !e.is_integer() {
        return None;
    }
    let k = e.to_integer();
    let n: i32 = i32::try_from(&k).ok()?;
    Some(num_traits::pow::Pow::pow(x, n))
}

/// Rational squared lengths for the positive solution, when some solution
/// of `Y s = -½ ln(α / c²)` has `exp(2 s)` rational: free coordinates are
/// set to zero and every pivot coordinate must be an integer combination of
/// the logarithms.
pub fn exact_scales(sol: &NiceBasisSolution) -> Option<Vec<Rational>> {
    if !sol.positive {
        return None;
    }
    let (m, dim) = (sol.y.rows(), sol.y.cols());
    let x: Vec<Rational> = sol.alpha.iter().zip(&sol.consts).map(|(a, c)| a / (c * c)).collect();
    let (r, piv) = sol.y.hstack(&RatMatrix::identity(m)).rref();
    let rank = piv.iter().take_while(|&&c| c < dim).count();
    let product = |row: usize| -> Option<Rational> {
        let mut acc = rat(1);
        for (t, xt) in x.iter().enumerate() {
            let e = &r[(row, dim + t)];
            if !e.is_zero() {
                acc *= rat_pow(xt, e)?;
            }
        }
        Some(acc)
    };
    // consistency: the left kernel of Y kills the logarithms
    for row in rank..m {
        let lcm = (0..m).fold(num_bigint::BigInt::from(1), |l, t| {
            num_integer::Integer::lcm(&l, r[(row, dim + t)].denom())
        });
        let scale = Rational::from_integer(lcm);
        let mut acc = rat(1);
        for (t, xt) in x.iter().enumerate() {
            let e = &r[(row, dim + t)] * &scale;
            if !e.is_zero() {
                acc *= rat_pow(xt, &e)?;
            }
        }
        if acc != rat(1) {
            return None;
        }
    }
    let mut g = vec![rat(1); dim];
    for (row, &c) in piv.iter().take(rank).enumerate() {
        // exp(2 s_c) = Π x_t^{-E_ct}
        g[c] = rat(1) / product(row)?;
    }
    Some(g)
}

/// Nice-basis solution for an algebra given in a nice basis.
pub fn nice_metric(n: &TwoStepAlgebra) -> Result<NiceBasisSolution> {
    let (y, c) = build_nice_y(n)?;
    Ok(solve_alpha_with(&y, &c))
}

fn sorted_group(g: &[RealDivisor]) -> Vec<RealDivisor> {
    let mut g = g.to_vec();
    g.sort_by(|a, b| b.power.cmp(&a.power));
    g
}

/// Canonical spec of a subsingular pencil with the group-1 root first, so
/// that the synthesized pencil is in nice form.
pub fn case2_spec(inv: &PencilInvariants) -> Result<CanonicalSpec> {
    let v = classify(inv);
    if v.case != VerdictCase::Subsingular {
        return Err(Error::WrongCase {
            expected: "at most two real roots and no complex divisors",
            got: format!("{:?}", v.case),
        });
    }
    let lab = subsingular_labeling(&inv.real_divisors);
    let mut real = sorted_group(&lab.group1);
    real.extend(sorted_group(&lab.group2));
    Ok(CanonicalSpec::new(real, Vec::new(), inv.minimal_indices.clone()))
}

fn sixth(a: i64) -> Rational {
    Rational::new(a.into(), 6.into())
}

/// `α` from the closed formulas for the pieces `U`, `V`, in the row order
/// of the nice basis of [`case2_spec`].
pub fn alpha_closed_form_case2(inv: &PencilInvariants) -> Result<NiceBasisSolution> {
    let spec = case2_spec(inv)?;
    let lab = subsingular_labeling(&inv.real_divisors);
    let g1: Vec<i64> = sorted_group(&lab.group1).iter().map(|d| d.power as i64).collect();
    let g2: Vec<i64> = sorted_group(&lab.group2).iter().map(|d| d.power as i64).collect();
    let ks: Vec<i64> = inv.minimal_indices.iter().map(|&k| k as i64).collect();

    let l1: Rational = g1.iter().map(|&l| sixth(l * l * l + 2 * l)).sum();
    let l2: Rational = g1.iter().map(|&l| sixth(l * l * l - l)).sum();
    let n1: Rational = g2.iter().map(|&l| sixth(l * l * l + 2 * l)).sum();
    let n2: Rational = g2.iter().map(|&l| sixth(l * l * l - l)).sum();
    let k1: Rational = ks
        .iter()
        .map(|&k| Rational::new((k * (k + 1) * (k * k + k + 1)).into(), (3 * (2 * k + 1)).into()))
        .sum();
    let k2: Rational = ks
        .iter()
        .map(|&k| Rational::new((k * (k + 1) * (2 * k * k + 2 * k - 1)).into(), (6 * (2 * k + 1)).into()))
        .sum();
    let kk = &k1 + &k2;
    let one = Rational::one();
    let delta = (&one + &l1 + &n2 + &k1) * (&one + &l2 + &n1 + &k1) - (&l2 + &n2 + &k2) * (&l2 + &n2 + &k2);
    let nu1 = (&one + rat(2) * &l2 + &n1 + &n2 + &kk) / &delta;
    let nu2 = (&one + &l1 + &l2 + rat(2) * &n2 + &kk) / &delta;
    let d = &nu2 - &nu1;
    let half = Rational::new(1.into(), 2.into());

    let mut u = Vec::new();
    let mut v = Vec::new();
    for &l in &g1 {
        let lr = rat(l);
        for t in 1..=l {
            let t = rat(t);
            u.push(&d * &t * &t - &d * (&lr + rat(1)) * &t + &half * (&nu2 * (&lr + rat(1)) - &nu1 * &lr));
        }
        for t in 1..l {
            let t = rat(t);
            v.push(-&d * (&t * &t - &lr * &t));
        }
    }
    for &l in &g2 {
        let lr = rat(l);
        for t in 1..l {
            let t = rat(t);
            u.push(&d * (&t * &t - &lr * &t));
        }
        for t in 1..=l {
            let t = rat(t);
            v.push(-&d * &t * &t + &d * (&lr + rat(1)) * &t + &half * (&nu1 * (&lr + rat(1)) - &nu2 * &lr));
        }
    }
    for &k in &ks {
        let kr = rat(k);
        let w = rat(2 * k + 1);
        for t in 1..=k {
            let t = rat(t);
            u.push((&kr + rat(1) - &t) * (&t * -&d * &w + &nu2 * (&kr + rat(1)) - &nu1 * &kr) / &w);
        }
        for t in 1..=k {
            let t = rat(t);
            v.push(&t * ((&kr + rat(1) - &t) * &d * &w + &nu1 * (&kr + rat(1)) - &nu2 * &kr) / &w);
        }
    }
    u.extend(v);
    let alpha = u;

    let algebra = TwoStepAlgebra::from_pencil(&crate::canonical::synthesize(&spec)?)?;
    let (y, consts) = build_nice_y(&algebra)?;
    if y.rows() != alpha.len() {
        return Err(Error::Internal(format!("{} rows of Y but {} pieces", y.rows(), alpha.len())));
    }
    let positive = alpha.iter().all(|x| x.is_positive());
    let s = if positive { log_scales(&y, &consts, &alpha) } else { None };
    Ok(NiceBasisSolution {
        y,
        consts,
        alpha,
        positive,
        unique: true,
        s,
        nu1: Some(nu1),
        nu2: Some(nu2),
        delta: Some(delta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use crate::canonical::synthesize;
    use crate::pencil::SkewPencil;

    fn alg(spec: &CanonicalSpec) -> TwoStepAlgebra {
        TwoStepAlgebra::from_pencil(&synthesize(spec).unwrap()).unwrap()
    }

    #[test]
    fn single_singular_block() {
        let spec = CanonicalSpec::default().with_indices(&[1]);
        let sol = nice_metric(&alg(&spec)).unwrap();
        assert_eq!(sol.alpha, vec![ratio(1, 4), ratio(1, 4)]);
        assert!(sol.positive && sol.unique && sol.s.is_some());
        let cf = alpha_closed_form_case2(&spec.to_invariants()).unwrap();
        assert_eq!(cf.alpha, sol.alpha);
        assert_eq!(cf.delta, Some(ratio(8, 3)));
        assert_eq!(cf.nu1, Some(ratio(3, 4)));
    }

    #[test]
    fn not_nice() {
        // [e1, e2] has both central components
        let j1 = RatMatrix::from_i64(4, 4, &[0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 0, 1, 0, 0, -1, 0]);
        let j2 = RatMatrix::from_i64(4, 4, &[0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
        let n = TwoStepAlgebra::from_pencil(&SkewPencil::new(j1, j2).unwrap()).unwrap();
        assert!(matches!(build_nice_y(&n), Err(Error::NotNice(_))));
    }

    fn all_subsingular(budget: usize) -> Vec<PencilInvariants> {
        // partitions into group-1 powers, group-2 powers and minimal indices
        fn parts(n: usize, max: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for first in (1..=max.min(n)).rev() {
                for mut rest in parts(n - first, first) {
                    rest.insert(0, first);
                    out.push(rest);
                }
            }
            out
        }
        let mut out = Vec::new();
        for a in 0..=budget {
            for b in 0..=budget - a {
                for c in 0..=budget - a - b {
                    for p1 in parts(a, a) {
                        for p2 in parts(b, b) {
                            for p3 in parts(c, c) {
                                let mut spec = CanonicalSpec::default().with_indices(&p3);
                                for &l in &p1 {
                                    spec.real_divisors.push(RealDivisor { root: rat(0), power: l });
                                }
                                for &l in &p2 {
                                    spec.real_divisors.push(RealDivisor { root: rat(1), power: l });
                                }
                                let inv = spec.to_invariants();
                                if (!p1.is_empty() || !p2.is_empty() || !p3.is_empty())
                                    && (p1.len() + p2.len() + p3.len() > 1 || !p3.is_empty() || p1.iter().chain(&p2).any(|&l| l > 1))
                                {
                                    out.push(inv);
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn closed_form_agrees_with_solve() {
        let mut count = 0;
        for inv in all_subsingular(7) {
            let spec = case2_spec(&inv).unwrap();
            let Ok(p) = synthesize(&spec) else { continue };
            let n = TwoStepAlgebra::from_pencil(&p).unwrap();
            let sol = nice_metric(&n).unwrap();
            let cf = alpha_closed_form_case2(&inv).unwrap();
            assert!(sol.unique);
            assert_eq!(sol.alpha, cf.alpha, "{:?}", spec);
            assert_eq!(sol.positive, classify(&inv).is_einstein, "{:?}", spec);
            count += 1;
        }
        assert!(count > 100);
    }
}
