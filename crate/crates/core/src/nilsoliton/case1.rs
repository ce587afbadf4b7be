use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{MetricData, TwoStepAlgebra};
use crate::arith::{rat, to_f64, Mat, RatMatrix, Rational};
use crate::canonical::{complex_block, l_block, r_block, sk, synthesize, CanonicalSpec};
use crate::classifier::{classify, FailedCondition, VerdictCase};
use crate::error::{Error, Result};
use crate::fmath;
use crate::pencil::{compute_invariants, Mode, PencilInvariants, RealDivisor, SkewPencil};

use super::sl2::Sl2State;
use super::{certify, NilsolitonCertificate};

/// Coefficients of `(a x + b y)^p (c x + d y)^r` in `x^{p+r-j} y^j`.
fn expand(h: &Mat<f64>, p: usize, r: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    let mul = |v: &[f64], s: f64, t: f64| {
        let mut w = vec![0.0; v.len() + 1];
        for (j, &c) in v.iter().enumerate() {
            w[j] += c * s;
            w[j + 1] += c * t;
        }
        w
    };
    for _ in 0..p {
        out = mul(&out, h[(0, 0)], h[(0, 1)]);
    }
    for _ in 0..r {
        out = mul(&out, h[(1, 0)], h[(1, 1)]);
    }
    out
}

/// The matrix of the substitution `(x, y) ↦ h (x, y)` on forms of degree
/// `k - 1` in the monomials `x^{k-1}, ..., y^{k-1}`: row `i` holds
/// `(a x + b y)^{k-i} (c x + d y)^{i-1}`. It satisfies
/// `Q_k(h) (a L_k + b R_k) Q_{k+1}(h⁻¹) = L_k` and likewise for `R_k`.
pub fn rep_matrix(h: &Mat<f64>, k: usize) -> Mat<f64> {
    let mut m = Mat::<f64>::zeros(k, k);
    for i in 0..k {
        for (j, c) in expand(h, k - 1 - i, i).into_iter().enumerate() {
            m[(i, j)] = c;
        }
    }
    m
}

fn inv2(h: &Mat<f64>) -> Mat<f64> {
    let det = h[(0, 0)] * h[(1, 1)] - h[(0, 1)] * h[(1, 0)];
    Mat::from_rows(vec![
        vec![h[(1, 1)] / det, -h[(0, 1)] / det],
        vec![-h[(1, 0)] / det, h[(0, 0)] / det],
    ])
    .expect("2x2")
}

fn require_simple(inv: &PencilInvariants) -> Result<()> {
    if inv.real_divisors.iter().any(|d| d.power != 1) || inv.complex_divisors.iter().any(|d| d.power != 1) {
        return Err(Error::WrongCase {
            expected: "elementary divisors of degree one",
            got: format!("{:?}", inv.real_divisors),
        });
    }
    Ok(())
}

/// Scales `ξ` (length `k`) and `θ` (length `k + 1`) with
/// `(ξ_s θ_s)^{-2} = 2(k+1-s)/(2k+1)` and `(ξ_s θ_{s+1})^{-2} = 2s/(2k+1)`.
fn singular_scales(k: usize) -> (Vec<f64>, Vec<f64>) {
    let n = 2 * k + 1;
    let mut a = Mat::<f64>::zeros(2 * k, n);
    let mut b = vec![0.0; 2 * k];
    for s in 1..=k {
        let u = 2.0 * (k + 1 - s) as f64 / n as f64;
        let v = 2.0 * s as f64 / n as f64;
        a[(2 * s - 2, s - 1)] = 1.0;
        a[(2 * s - 2, k + s - 1)] = 1.0;
        b[2 * s - 2] = -0.5 * fmath::ln(u);
        a[(2 * s - 1, s - 1)] = 1.0;
        a[(2 * s - 1, k + s)] = 1.0;
        b[2 * s - 1] = -0.5 * fmath::ln(v);
    }
    let x = a.lstsq_min_norm(&b);
    let xi = x[..k].iter().map(|v| fmath::exp(*v)).collect();
    let theta = x[k..].iter().map(|v| fmath::exp(*v)).collect();
    (xi, theta)
}

/// Frame of `b` for the canonical algebra of `spec`: per-block scalings
/// `x_i`, `y_i` for the regular part, `Q_k(h)ᵀ Ξ⁻¹ ⊕ Q_{k+1}(h⁻¹) Θ⁻¹`
/// for the singular part (the `ξ`, `θ` given per block), identity on the
/// padding. With `twist` the companion blocks are conjugated to
/// `μ I + ν I^c`.
fn frame(
    spec: &CanonicalSpec,
    h: &Mat<f64>,
    xs: &[f64],
    ys: &[f64],
    sing: &[(Vec<f64>, Vec<f64>)],
    twist: bool,
) -> Mat<f64> {
    let mut blocks: Vec<Mat<f64>> = Vec::new();
    for x in xs {
        blocks.push(Mat::identity(2).scale(&(1.0 / x)));
    }
    for (d, y) in spec.complex_divisors.iter().zip(ys) {
        let (p, q) = if twist && d.nu().is_none() {
            let nu = d.nu_f64();
            (Mat::diag(&[1.0 / nu, -1.0]), Mat::diag(&[nu, -1.0]))
        } else {
            (Mat::identity(2), Mat::identity(2))
        };
        blocks.push(Mat::block_diag(&[p, q]).scale(&(1.0 / y)));
    }
    let hinv = inv2(h);
    for (&k, (xi, theta)) in spec.minimal_indices.iter().zip(sing) {
        let u = &rep_matrix(h, k).transpose() * &Mat::diag(&xi.iter().map(|v| 1.0 / v).collect::<Vec<_>>());
        let w = &rep_matrix(&hinv, k + 1) * &Mat::diag(&theta.iter().map(|v| 1.0 / v).collect::<Vec<_>>());
        blocks.push(Mat::block_diag(&[u, w]));
    }
    if spec.padding > 0 {
        blocks.push(Mat::identity(spec.padding));
    }
    Mat::block_diag(&blocks)
}

/// `J'_β = Σ_α h_{βα} Aᵀ J_α A`.
fn transformed(n: &TwoStepAlgebra, a: &Mat<f64>, h: &Mat<f64>) -> [Mat<f64>; 2] {
    let js: Vec<Mat<f64>> = n.matrices().iter().map(|m| &(&a.transpose() * &m.to_f64()) * a).collect();
    let mk = |b: usize| &js[0].scale(&h[(b, 0)]) + &js[1].scale(&h[(b, 1)]);
    [mk(0), mk(1)]
}

/// Nilsoliton metric on the canonical algebra of a Case-1 pencil from a
/// critical point `h` of the SL(2) objective, as a full Gram matrix.
pub fn assemble_case1_metric(inv: &PencilInvariants, state: &Sl2State, tol: f64) -> Result<NilsolitonCertificate> {
    require_simple(inv)?;
    if !(state.grad <= 1e-6) {
        return Err(Error::NotConverged(format!("SL(2) gradient {:e}", state.grad)));
    }
    let spec = CanonicalSpec::from_invariants(inv);
    let algebra = TwoStepAlgebra::from_pencil(&synthesize(&spec)?)?;
    let det = state.h[(0, 0)] * state.h[(1, 1)] - state.h[(0, 1)] * state.h[(1, 0)];
    let h = state.h.scale(&(1.0 / fmath::sqrt(det)));
    let (a, b, c, d) = (h[(0, 0)], h[(0, 1)], h[(1, 0)], h[(1, 1)]);
    // the normalization 2 C σ = 1
    let xs: Vec<f64> = spec
        .real_divisors
        .iter()
        .map(|r| {
            let t = to_f64(&r.root);
            fmath::sqrt(fmath::sqrt((a + b * t) * (a + b * t) + (c + d * t) * (c + d * t)))
        })
        .collect();
    let ys: Vec<f64> = spec
        .complex_divisors
        .iter()
        .map(|z| {
            let (mu, nu2) = (to_f64(&z.mu), to_f64(&z.nu_sq));
            let s = (a + b * mu) * (a + b * mu) + (b * b + d * d) * nu2 + (c + d * mu) * (c + d * mu);
            fmath::sqrt(fmath::sqrt(s))
        })
        .collect();
    let sing: Vec<(Vec<f64>, Vec<f64>)> = spec.minimal_indices.iter().map(|&k| singular_scales(k)).collect();
    let tb = frame(&spec, &h, &xs, &ys, &sing, true);
    let t = Mat::block_diag(&[tb, inv2(&h)]);
    let ti = t
        .inverse()
        .ok_or_else(|| Error::Internal("singular frame".into()))?;
    let g = &ti.transpose() * &ti;
    let g = Mat::from_fn(g.rows(), g.cols(), |i, j| 0.5 * (g[(i, j)] + g[(j, i)]));
    certify(&algebra, &MetricData::Full(g), tol)?.into_result()
}

/// A degeneration of the canonical algebra to a non-isomorphic limit,
/// which shows that it is not an Einstein nilradical.
#[derive(Clone, Debug)]
pub struct Witness {
    /// Canonical algebra the curve starts at.
    pub spec: CanonicalSpec,
    pub j1: RatMatrix,
    pub j2: RatMatrix,
    pub invariants: PencilInvariants,
    pub failed: FailedCondition,
}

/// Canonical spec with the divisors of the most frequent root first.
fn witness_spec(inv: &PencilInvariants, root: &Rational) -> CanonicalSpec {
    let mut spec = CanonicalSpec::from_invariants(inv);
    let (mut first, rest): (Vec<RealDivisor>, Vec<RealDivisor>) =
        spec.real_divisors.iter().cloned().partition(|d| &d.root == root);
    first.extend(rest);
    spec.real_divisors = first;
    spec
}

struct Plan {
    spec: CanonicalSpec,
    failed: FailedCondition,
    root: Option<Rational>,
    m: usize,
}

fn plan(inv: &PencilInvariants) -> Result<Plan> {
    let v = classify(inv);
    if v.case != VerdictCase::Generic {
        return Err(Error::WrongCase {
            expected: "a complex divisor or at least three distinct roots",
            got: format!("{:?}", v.case),
        });
    }
    match v.failed_condition {
        None => Err(Error::ConditionHolds),
        Some(FailedCondition::AI) => Ok(Plan {
            spec: CanonicalSpec::from_invariants(inv),
            failed: FailedCondition::AI,
            root: None,
            m: 0,
        }),
        Some(f) => {
            let hint = v.witness_hint.ok_or_else(|| Error::Internal("missing witness hint".into()))?;
            Ok(Plan {
                spec: witness_spec(inv, &hint.root),
                failed: f,
                root: Some(hint.root),
                m: hint.multiplicity,
            })
        }
    }
}

/// Exact limit pencil of the degenerating curve. When some divisor has
/// degree above one the limit drops the nilpotent parts; otherwise it
/// collapses the most frequent root.
pub fn degeneration_witness(inv: &PencilInvariants) -> Result<Witness> {
    let pl = plan(inv)?;
    let spec = pl.spec;
    let mut b1 = Vec::new();
    let mut b2 = Vec::new();
    match &pl.root {
        None => {
            for d in &spec.real_divisors {
                let l = d.power;
                b1.push(sk(&RatMatrix::identity(l)));
                b2.push(sk(&RatMatrix::identity(l).scale(&d.root)));
            }
            for d in &spec.complex_divisors {
                let m = 2 * d.power;
                let full = complex_block(d);
                // keep the 2x2 diagonal blocks, drop N²
                let kept = RatMatrix::from_fn(m, m, |i, j| if i / 2 == j / 2 { full[(i, j)].clone() } else { rat(0) });
                b1.push(sk(&RatMatrix::identity(m)));
                b2.push(sk(&kept));
            }
        }
        Some(xi) => {
            let u = spec.real_divisors.len();
            let w = spec.complex_divisors.len();
            let collapsed = 2 * w + u - pl.m;
            for (i, d) in spec.real_divisors.iter().enumerate() {
                let one = RatMatrix::identity(1);
                b1.push(sk(&one.scale(&(xi - &d.root))));
                b2.push(sk(&one.scale(&rat(if i < collapsed { 1 } else { 0 }))));
            }
            for d in &spec.complex_divisors {
                let k = &complex_block(d) - &RatMatrix::identity(2).scale(&d.mu);
                b1.push(sk(&(&RatMatrix::identity(2).scale(&(xi - &d.mu)) - &k)));
                b2.push(RatMatrix::zeros(4, 4));
            }
        }
    }
    for &k in &spec.minimal_indices {
        b1.push(sk(&l_block(k)));
        b2.push(sk(&r_block(k)));
    }
    if spec.padding > 0 {
        b1.push(RatMatrix::zeros(spec.padding, spec.padding));
        b2.push(RatMatrix::zeros(spec.padding, spec.padding));
    }
    let j1 = RatMatrix::block_diag(&b1);
    let j2 = RatMatrix::block_diag(&b2);
    let invariants = compute_invariants(&SkewPencil::new(j1.clone(), j2.clone())?, Mode::Exact)?;
    Ok(Witness {
        spec,
        j1,
        j2,
        invariants,
        failed: pl.failed,
    })
}

/// The pair `(J1(t), J2(t))` on the curve whose limit is the witness, for
/// the canonical algebra `Witness::spec`.
pub fn witness_curve(inv: &PencilInvariants, t: f64) -> Result<(Mat<f64>, Mat<f64>)> {
    let pl = plan(inv)?;
    let spec = pl.spec;
    let n = TwoStepAlgebra::from_pencil(&synthesize(&spec)?)?;
    let (a, h) = match &pl.root {
        None => {
            // exp(-t A1) with A1 = -D ⊕ D on each regular block
            let mut blocks: Vec<Mat<f64>> = Vec::new();
            let weights = |m: usize, paired: bool| -> Vec<f64> {
                (0..m).map(|i| if paired { (i / 2 + 1) as f64 } else { (i + 1) as f64 }).collect()
            };
            let mut push = |dw: Vec<f64>| {
                let mut d: Vec<f64> = dw.iter().map(|v| fmath::exp(t * v)).collect();
                d.extend(dw.iter().map(|v| fmath::exp(-t * v)));
                blocks.push(Mat::diag(&d));
            };
            for d in &spec.real_divisors {
                push(weights(d.power, false));
            }
            for d in &spec.complex_divisors {
                push(weights(2 * d.power, true));
            }
            let rest = n.q() - blocks.iter().map(|b| b.rows()).sum::<usize>();
            if rest > 0 {
                blocks.push(Mat::identity(rest));
            }
            (Mat::block_diag(&blocks), Mat::identity(2))
        }
        Some(xi) => {
            let xi = to_f64(xi);
            let e = fmath::exp(t / 2.0);
            let h = Mat::from_rows(vec![vec![xi * e, -e], vec![1.0 / e, 0.0]]).expect("2x2");
            let u = spec.real_divisors.len();
            let w = spec.complex_divisors.len();
            let collapsed = 2 * w + u - pl.m;
            let q4 = fmath::exp(t / 4.0);
            let xs: Vec<f64> = (0..u)
                .map(|i| {
                    if i < collapsed {
                        1.0 / q4
                    } else if i < pl.m {
                        1.0
                    } else {
                        q4
                    }
                })
                .collect();
            let ys = vec![q4; w];
            let sing: Vec<(Vec<f64>, Vec<f64>)> =
                spec.minimal_indices.iter().map(|&k| (vec![1.0; k], vec![1.0; k + 1])).collect();
            (frame(&spec, &h, &xs, &ys, &sing, false), h)
        }
    };
    let [j1, j2] = transformed(&n, &a, &h);
    Ok((j1, j2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use crate::nilsoliton::{sl2_minimize, Sl2Outcome};
    use crate::pre_einstein::{case1_pre_einstein, solve_pre_einstein};

    fn hm(a: f64, b: f64, c: f64, d: f64) -> Mat<f64> {
        Mat::from_rows(vec![vec![a, b], vec![c, d]]).unwrap()
    }

    #[test]
    fn rep_matrix_undoes_the_substitution() {
        let h = hm(2.0, 0.5, -1.0, 0.25);
        let hi = inv2(&h);
        for k in 1..5 {
            let (l, r) = (l_block(k).to_f64(), r_block(k).to_f64());
            let ab = &l.scale(&h[(0, 0)]) + &r.scale(&h[(0, 1)]);
            let cd = &l.scale(&h[(1, 0)]) + &r.scale(&h[(1, 1)]);
            let lhs1 = &(&rep_matrix(&h, k) * &ab) * &rep_matrix(&hi, k + 1);
            let lhs2 = &(&rep_matrix(&h, k) * &cd) * &rep_matrix(&hi, k + 1);
            assert!((&lhs1 - &l).max_abs() < 1e-12);
            assert!((&lhs2 - &r).max_abs() < 1e-12);
            // a representation
            let g = hm(0.3, 1.0, -1.0, 0.7);
            let prod = &rep_matrix(&h, k) * &rep_matrix(&g, k);
            assert!((&prod - &rep_matrix(&(&h * &g), k)).max_abs() < 1e-12);
        }
    }

    fn certified(spec: &CanonicalSpec) -> NilsolitonCertificate {
        let inv = spec.to_invariants();
        let st = match sl2_minimize(&inv, 1e-13, 500).unwrap() {
            Sl2Outcome::Minimum(s) => s,
            Sl2Outcome::NoMinimum(_) => panic!("no minimum"),
        };
        assemble_case1_metric(&inv, &st, 1e-8).unwrap()
    }

    #[test]
    fn metrics_are_nilsolitons() {
        let specs = [
            CanonicalSpec::real(&[(rat(0), 1), (rat(1), 1), (rat(-1), 1)]),
            CanonicalSpec::real(&[(rat(0), 1), (rat(1), 1), (rat(2), 1)]).with_indices(&[1]),
            CanonicalSpec::default().with_complex(rat(0), rat(1), 1),
            CanonicalSpec::default().with_complex(ratio(1, 2), rat(2), 1).with_indices(&[2]),
            CanonicalSpec::real(&[(rat(3), 1)]).with_complex(rat(0), rat(3), 1).with_indices(&[1, 2]),
        ];
        for spec in &specs {
            let cert = certified(spec);
            assert!(cert.is_certified(), "{:?}", cert);
            // spectrum proportional to the closed-form pre-Einstein derivation
            let n = TwoStepAlgebra::from_pencil(&synthesize(spec).unwrap()).unwrap();
            let pe = solve_pre_einstein(&n).unwrap();
            if spec.case_tag() == crate::pencil::CaseTag::Case1 {
                assert_eq!(pe.phi, case1_pre_einstein(&spec.to_invariants()).unwrap().phi);
            }
            let (vals, _) = cert.phi.sym_eigen();
            let mut got: Vec<f64> = vals.clone();
            got.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut want: Vec<f64> = pe.diagonal().iter().map(to_f64).collect();
            want.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let scale = got[got.len() - 1] / want[want.len() - 1];
            for (g, w) in got.iter().zip(&want) {
                assert!((g - scale * w).abs() < 1e-7, "{:?} vs {:?}", got, want);
            }
        }
    }

    #[test]
    fn witness_for_a_repeated_root() {
        let inv = CanonicalSpec::real(&[(rat(1), 1), (rat(0), 1), (rat(0), 1), (rat(2), 1), (rat(0), 1)])
            .to_invariants();
        let w = degeneration_witness(&inv).unwrap();
        assert_eq!(w.failed, FailedCondition::AIi);
        assert_eq!(w.invariants.common_kernel_dim, 2);
        assert!(!w.invariants.same_invariants(&inv));
        let (j1, j2) = witness_curve(&inv, 80.0).unwrap();
        assert!((&j1 - &w.j1.to_f64()).max_abs() < 1e-9);
        assert!((&j2 - &w.j2.to_f64()).max_abs() < 1e-9);
        // the curve stays in the group: the determinant of the scaling is one
        let u: f64 = 5.0;
        let (m, collapsed) = (3.0, 2.0);
        let t: f64 = 3.7;
        let logdet = collapsed * (-t / 2.0) + (u - m) * (t / 2.0);
        assert!(logdet.abs() < 1e-12);
    }

    #[test]
    fn witness_for_nilpotent_parts() {
        let inv = CanonicalSpec::real(&[(rat(0), 2), (rat(1), 1), (rat(2), 1)])
            .with_complex(rat(0), rat(2), 2)
            .to_invariants();
        let w = degeneration_witness(&inv).unwrap();
        assert_eq!(w.failed, FailedCondition::AI);
        assert!(!w.invariants.same_invariants(&inv));
        let (j1, j2) = witness_curve(&inv, 40.0).unwrap();
        assert!((&j1 - &w.j1.to_f64()).max_abs() < 1e-9);
        assert!((&j2 - &w.j2.to_f64()).max_abs() < 1e-9);
    }

    #[test]
    fn no_witness_when_einstein() {
        let inv = CanonicalSpec::real(&[(rat(0), 1), (rat(1), 1), (rat(2), 1)]).to_invariants();
        assert!(matches!(degeneration_witness(&inv), Err(Error::ConditionHolds)));
    }
}
