//! Pre-Einstein derivations and eigenvalue types.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::TwoStepAlgebra;
use crate::arith::roots::convergents;
use crate::arith::{rat, Mat, RatMatrix, Rational};
use crate::error::{Error, Result};
use crate::fmath;
use crate::pencil::{CaseTag, PencilInvariants};

/// A semisimple derivation `φ` with `Tr(φ ψ) = Tr ψ` for every derivation
/// `ψ`. Here `φ` is diagonal in the basis of the algebra it was computed for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreEinsteinDerivation {
    pub phi: RatMatrix,
    /// Sorted by value.
    pub eigenvalues: Vec<(Rational, usize)>,
    /// Only for the closed form on Case 1 invariants.
    pub sigma: Option<Rational>,
}

fn spectrum_of_diag(d: &[Rational]) -> Vec<(Rational, usize)> {
    let mut v: Vec<Rational> = d.to_vec();
    v.sort();
    let mut out: Vec<(Rational, usize)> = Vec::new();
    for x in v {
        match out.last_mut() {
            Some((y, m)) if *y == x => *m += 1,
            _ => out.push((x, 1)),
        }
    }
    out
}

impl PreEinsteinDerivation {
    fn from_diag(d: Vec<Rational>, sigma: Option<Rational>) -> Self {
        PreEinsteinDerivation {
            eigenvalues: spectrum_of_diag(&d),
            phi: RatMatrix::diag(&d),
            sigma,
        }
    }

    pub fn diagonal(&self) -> Vec<Rational> {
        (0..self.phi.rows()).map(|i| self.phi[(i, i)].clone()).collect()
    }
}

/// Basis of the derivations that are diagonal in the given basis, as
/// vectors of diagonal entries.
pub fn diagonal_derivations(n: &TwoStepAlgebra) -> Vec<Vec<Rational>> {
    let (q, dim) = (n.q(), n.dim());
    let mut eqs = Vec::new();
    for (al, ja) in n.matrices().iter().enumerate() {
        for i in 0..q {
            for j in i + 1..q {
                if !ja[(i, j)].is_zero() {
                    let mut row = alloc::vec![rat(0); dim];
                    row[i] += rat(1);
                    row[j] += rat(1);
                    row[q + al] -= rat(1);
                    eqs.push(row);
                }
            }
        }
    }
    // algebras always have a nonzero bracket, so the system is nonempty
    RatMatrix::from_rows(eqs).expect("rectangular").nullspace()
}

/// Pre-Einstein derivation in the diagonal torus of the given basis,
/// checked against all derivations.
pub fn solve_pre_einstein(n: &TwoStepAlgebra) -> Result<PreEinsteinDerivation> {
    let t = diagonal_derivations(n);
    if t.is_empty() {
        return Err(Error::NonDiagonalTorus);
    }
    // Gram system Σ_l Tr(t_k t_l) c_l = Tr t_k; positive definite
    let k = t.len();
    let dot = |a: &[Rational], b: &[Rational]| a.iter().zip(b).map(|(x, y)| x * y).fold(rat(0), |s, v| s + v);
    let g = RatMatrix::from_fn(k, k, |a, b| dot(&t[a], &t[b]));
    let rhs: Vec<Rational> = t.iter().map(|v| v.iter().fold(rat(0), |s, x| s + x)).collect();
    let c = g.solve(&rhs).ok_or_else(|| Error::Internal("singular Gram matrix".into()))?;
    let mut d = alloc::vec![rat(0); n.dim()];
    for (ck, tk) in c.iter().zip(&t) {
        for (di, x) in d.iter_mut().zip(tk) {
            *di += ck * x;
        }
    }
    let phi = RatMatrix::diag(&d);
    debug_assert!(n.is_derivation(&phi));
    for psi in n.derivation_basis() {
        if (&phi * &psi).trace() != psi.trace() {
            return Err(Error::NonDiagonalTorus);
        }
    }
    Ok(PreEinsteinDerivation::from_diag(d, None))
}

/// `σ = -4 / (q + 8 - Σ 1/(2k_j + 1))`.
pub fn case1_sigma(q: usize, minimal_indices: &[usize]) -> Rational {
    let mut s = rat(q as i64 + 8);
    for &k in minimal_indices {
        s -= Rational::new(BigInt::one(), BigInt::from(2 * k as i64 + 1));
    }
    rat(-4) / s
}

/// Closed form for Case 1, in the basis of the canonical pencil (regular
/// part, then each singular pair as `k` then `k + 1` coordinates, then the
/// center): `1 + σ` on the regular part, `1 + σ ± σ/(2k+1)` on singular
/// blocks, `2(1 + σ)` on the center.
pub fn case1_pre_einstein(inv: &PencilInvariants) -> Result<PreEinsteinDerivation> {
    if inv.case_tag != CaseTag::Case1 {
        return Err(Error::WrongCase {
            expected: "Case1",
            got: String::from(inv.case_tag.name()),
        });
    }
    if inv.common_kernel_dim != 0 {
        return Err(Error::BadDimensions("closed form needs a trivial common kernel".into()));
    }
    let q_r: usize = 2 * inv.real_divisors.iter().map(|d| d.power).sum::<usize>()
        + 4 * inv.complex_divisors.iter().map(|d| d.power).sum::<usize>();
    let q = q_r + inv.minimal_indices.iter().map(|k| 2 * k + 1).sum::<usize>();
    let sigma = case1_sigma(q, &inv.minimal_indices);
    let eta = rat(1) + &sigma;
    let mut d = alloc::vec![eta.clone(); q_r];
    for &k in &inv.minimal_indices {
        let delta = &sigma / rat(2 * k as i64 + 1);
        d.extend(core::iter::repeat(&eta + &delta).take(k));
        d.extend(core::iter::repeat(&eta - &delta).take(k + 1));
    }
    d.push(rat(2) * &eta);
    d.push(rat(2) * &eta);
    Ok(PreEinsteinDerivation::from_diag(d, Some(sigma)))
}

/// `(λ_1 < .. < λ_r ; d_1, .., d_r)` with coprime positive integers `λ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EigenvalueType {
    pub lambdas: Vec<u64>,
    pub multiplicities: Vec<usize>,
}

impl fmt::Display for EigenvalueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l: Vec<String> = self.lambdas.iter().map(|x| format!("{}", x)).collect();
        let m: Vec<String> = self.multiplicities.iter().map(|x| format!("{}", x)).collect();
        write!(f, "({}; {})", l.join(", "), m.join(", "))
    }
}

/// Eigenvalue type of an exact positive spectrum.
pub fn eigenvalue_type_exact(spectrum: &[(Rational, usize)]) -> Result<EigenvalueType> {
    if spectrum.iter().any(|(v, _)| !v.is_positive()) {
        return Err(Error::BadDimensions("eigenvalue type needs a positive spectrum".into()));
    }
    let lcm = spectrum.iter().fold(BigInt::one(), |l, (v, _)| l.lcm(v.denom()));
    let ints: Vec<BigInt> = spectrum.iter().map(|(v, _)| (v * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    let mut pairs: Vec<(u64, usize)> = ints
        .iter()
        .zip(spectrum)
        .map(|(x, (_, m))| ((x / &g).to_u64().unwrap_or(u64::MAX), *m))
        .collect();
    pairs.sort();
    let mut out = EigenvalueType {
        lambdas: Vec::new(),
        multiplicities: Vec::new(),
    };
    for (l, m) in pairs {
        if out.lambdas.last() == Some(&l) {
            *out.multiplicities.last_mut().expect("nonempty") += m;
        } else {
            out.lambdas.push(l);
            out.multiplicities.push(m);
        }
    }
    Ok(out)
}

/// Eigenvalue type of a symmetric float matrix with positive spectrum;
/// eigenvalue ratios are recognized as rationals with denominator at most
/// 10^4.
pub fn eigenvalue_type_of(phi: &Mat<f64>, tol: f64) -> Result<EigenvalueType> {
    let sym = Mat::from_fn(phi.rows(), phi.cols(), |i, j| 0.5 * (phi[(i, j)] + phi[(j, i)]));
    let (vals, _) = sym.sym_eigen();
    let vmin = vals.first().cloned().unwrap_or(0.0);
    let vmax = vals.last().cloned().unwrap_or(0.0);
    if !(vmin > tol * vmax.max(1.0)) {
        return Err(Error::NotCertified(vmin));
    }
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    for v in vals {
        match clusters.last_mut() {
            Some((c, m)) if fmath::abs(v - *c) <= tol * vmax => {
                *c = (*c * *m as f64 + v) / (*m as f64 + 1.0);
                *m += 1;
            }
            _ => clusters.push((v, 1)),
        }
    }
    let base = clusters[0].0;
    let mut spectrum = Vec::new();
    for (c, m) in &clusters {
        let ratio = c / base;
        let r = convergents(ratio, 1e4)
            .into_iter()
            .find(|r| fmath::abs(crate::arith::to_f64(r) - ratio) <= 1e3 * tol * ratio)
            .ok_or_else(|| Error::NotCertified(ratio))?;
        spectrum.push((r, *m));
    }
    eigenvalue_type_exact(&spectrum)
}

/// Eigenvalue type of a certified nilsoliton.
pub fn eigenvalue_type(cert: &crate::nilsoliton::NilsolitonCertificate) -> Result<EigenvalueType> {
    if !cert.is_certified() {
        return Err(Error::NotCertified(cert.ricci_residual.max(cert.derivation_residual)));
    }
    eigenvalue_type_of(&cert.phi, 1e-7)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use crate::arith::ratio;
    use crate::canonical::{random_spec, sk, synthesize, CanonicalSpec, RandomSpecOptions};
    use crate::pencil::{compute_invariants, Mode};
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn algebra(spec: &CanonicalSpec) -> TwoStepAlgebra {
        TwoStepAlgebra::from_pencil(&synthesize(spec).unwrap()).unwrap()
    }

    #[test]
    fn heisenberg() {
        let h = TwoStepAlgebra::from_tuple(vec![sk(&RatMatrix::identity(1))]).unwrap();
        let pe = solve_pre_einstein(&h).unwrap();
        assert_eq!(pe.diagonal(), vec![ratio(2, 3), ratio(2, 3), ratio(4, 3)]);
        assert_eq!(eigenvalue_type_exact(&pe.eigenvalues).unwrap().to_string(), "(1, 2; 2, 1)");
    }

    #[test]
    fn case1_closed_form() {
        let spec = CanonicalSpec::real(&[(rat(0), 1), (rat(1), 1), (rat(2), 1)]);
        let pe = case1_pre_einstein(&spec.to_invariants()).unwrap();
        assert_eq!(pe.sigma, Some(ratio(-2, 7)));
        assert_eq!(pe.eigenvalues, vec![(ratio(5, 7), 6), (ratio(10, 7), 2)]);
        assert_eq!(solve_pre_einstein(&algebra(&spec)).unwrap().phi, pe.phi);

        let spec = spec.with_indices(&[1]);
        let pe = case1_pre_einstein(&spec.to_invariants()).unwrap();
        // -4 / (9 + 8 - 1/3)
        assert_eq!(pe.sigma, Some(ratio(-6, 25)));
        let eta = ratio(19, 25);
        let delta = ratio(-2, 25);
        assert_eq!(pe.diagonal()[6..9], [&eta + &delta, &eta - &delta, &eta - &delta]);
        assert_eq!(solve_pre_einstein(&algebra(&spec)).unwrap().phi, pe.phi);
    }

    #[test]
    fn closed_form_matches_solve_on_random_case1() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let o = RandomSpecOptions {
            max_q: 12,
            ..Default::default()
        };
        let mut seen = 0;
        while seen < 20 {
            let spec = random_spec(&mut rng, &o);
            if spec.case_tag() != CaseTag::Case1 || spec.padding > 0 {
                continue;
            }
            seen += 1;
            let closed = case1_pre_einstein(&spec.to_invariants()).unwrap();
            let solved = solve_pre_einstein(&algebra(&spec)).unwrap();
            assert_eq!(closed.phi, solved.phi);
        }
    }

    #[test]
    fn wrong_case_and_trace_identity() {
        let spec = CanonicalSpec::real(&[(rat(0), 2)]).with_indices(&[1]);
        assert!(matches!(case1_pre_einstein(&spec.to_invariants()), Err(Error::WrongCase { .. })));
        let n = algebra(&spec);
        let pe = solve_pre_einstein(&n).unwrap();
        for psi in n.derivation_basis() {
            assert_eq!((&pe.phi * &psi).trace(), psi.trace());
        }
        let inv = compute_invariants(&synthesize(&spec).unwrap(), Mode::Exact).unwrap();
        assert_eq!(inv.case_tag, CaseTag::Case2);
    }

    #[test]
    fn float_types() {
        let t = eigenvalue_type_of(&Mat::diag(&[1.0, 1.0, 2.0]), 1e-9).unwrap();
        assert_eq!((t.lambdas.clone(), t.multiplicities.clone()), (vec![1, 2], vec![2, 1]));
        let t = eigenvalue_type_of(&Mat::diag(&[0.3, 0.45, 0.3 + 1e-12]), 1e-9).unwrap();
        assert_eq!(t.to_string(), "(2, 3; 2, 1)");
        assert!(eigenvalue_type_of(&Mat::diag(&[0.0, 1.0]), 1e-9).is_err());
    }
}
