use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{to_f64, Mat};
use crate::classifier::{classify, VerdictCase};
use crate::error::{Error, Result};
use crate::fmath;
use crate::pencil::PencilInvariants;

/// The data the SL(2) objective depends on: one root per real divisor and
/// `(mu, nu)` per complex divisor.
#[derive(Clone, Debug, PartialEq)]
pub struct Sl2Data {
    pub roots: Vec<f64>,
    pub complex: Vec<(f64, f64)>,
}

impl Sl2Data {
    pub fn from_invariants(inv: &PencilInvariants) -> Self {
        Sl2Data {
            roots: inv.real_divisors.iter().map(|d| to_f64(&d.root)).collect(),
            complex: inv.complex_divisors.iter().map(|d| (to_f64(&d.mu), d.nu_f64())).collect(),
        }
    }

    fn vectors(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        self.roots.iter().map(|&a| [1.0, a])
    }

    /// `M = [[1, 0], [mu, nu]]` for each complex divisor.
    fn blocks(&self) -> impl Iterator<Item = Mat<f64>> + '_ {
        self.complex
            .iter()
            .map(|&(mu, nu)| Mat::from_rows(vec![vec![1.0, 0.0], vec![mu, nu]]).expect("2x2"))
    }
}

/// Result of the minimization, `S = hᵀ h` with `det h = 1`.
#[derive(Clone, Debug)]
pub struct Sl2State {
    pub s: Mat<f64>,
    pub h: Mat<f64>,
    pub log_f: f64,
    /// Norm of the traceless part of [`d_h`].
    pub grad: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub enum Sl2Outcome {
    Minimum(Sl2State),
    /// The objective keeps decreasing towards the boundary.
    NoMinimum(Sl2State),
}

fn apply(h: &Mat<f64>, v: [f64; 2]) -> [f64; 2] {
    [h[(0, 0)] * v[0] + h[(0, 1)] * v[1], h[(1, 0)] * v[0] + h[(1, 1)] * v[1]]
}

/// `Σ log |h v_i|² + 2 Σ log |h M_j|²`.
pub fn log_f(data: &Sl2Data, h: &Mat<f64>) -> f64 {
    let mut f = 0.0;
    for v in data.vectors() {
        let w = apply(h, v);
        f += fmath::ln(w[0] * w[0] + w[1] * w[1]);
    }
    for m in data.blocks() {
        let n = (h * &m).frobenius();
        f += 2.0 * fmath::ln(n * n);
    }
    f
}

/// `Σ ŵ ŵᵀ + 2 Σ P / tr P` with `ŵ = h v / |h v|`, `P = h M Mᵀ hᵀ`; `h` is
/// critical iff this is a multiple of the identity.
pub fn d_h(data: &Sl2Data, h: &Mat<f64>) -> Mat<f64> {
    let mut g = Mat::<f64>::zeros(2, 2);
    for v in data.vectors() {
        let w = apply(h, v);
        let n = w[0] * w[0] + w[1] * w[1];
        for i in 0..2 {
            for j in 0..2 {
                g[(i, j)] += w[i] * w[j] / n;
            }
        }
    }
    for m in data.blocks() {
        let hm = h * &m;
        let p = &hm * &hm.transpose();
        let t = p.trace();
        for i in 0..2 {
            for j in 0..2 {
                g[(i, j)] += 2.0 * p[(i, j)] / t;
            }
        }
    }
    g
}

/// Gradient and Hessian of `Y ↦ log F(exp(Y/2) h)` at `Y = 0` in the
/// coordinates `Y = [[p, r], [r, -p]]`.
fn local_model(data: &Sl2Data, h: &Mat<f64>) -> ([f64; 2], [[f64; 2]; 2]) {
    let mut g = [0.0; 2];
    let mut hess = [[0.0; 2]; 2];
    let mut add = |wt: f64, gi: [f64; 2]| {
        for a in 0..2 {
            g[a] += wt * gi[a];
            for b in 0..2 {
                let id = if a == b { 1.0 } else { 0.0 };
                hess[a][b] += wt * (id - gi[a] * gi[b]);
            }
        }
    };
    for v in data.vectors() {
        let w = apply(h, v);
        let n = w[0] * w[0] + w[1] * w[1];
        add(1.0, [(w[0] * w[0] - w[1] * w[1]) / n, 2.0 * w[0] * w[1] / n]);
    }
    for m in data.blocks() {
        let hm = h * &m;
        let p = &hm * &hm.transpose();
        let t = p.trace();
        add(2.0, [(p[(0, 0)] - p[(1, 1)]) / t, 2.0 * p[(0, 1)] / t]);
    }
    (g, hess)
}

/// `exp(Y/2)` for `Y = [[p, r], [r, -p]]`.
fn half_exp(p: f64, r: f64) -> Mat<f64> {
    let rho = fmath::hypot(p, r);
    if rho < 1e-300 {
        return Mat::identity(2);
    }
    let (c, s) = (fmath::cosh(rho / 2.0), fmath::sinh(rho / 2.0) / rho);
    Mat::from_rows(vec![vec![c + s * p, s * r], vec![s * r, c - s * p]]).expect("2x2")
}

/// Half the log of the condition number of `S`: the distance from `I` in
/// the symmetric space.
fn distance(s: &Mat<f64>) -> f64 {
    let (vals, _) = s.sym_eigen();
    let (lo, hi) = (vals[0].min(vals[1]), vals[0].max(vals[1]));
    0.5 * fmath::ln(hi / lo)
}

const ESCAPE: f64 = 50.0;
const MAX_STEP: f64 = 2.0;

/// Minimize `F` over `SL(2)` by damped Newton steps in the symmetric space.
/// Only meaningful when the pencil has a complex divisor or at least three
/// distinct roots.
pub fn sl2_minimize(inv: &PencilInvariants, tol: f64, max_iter: usize) -> Result<Sl2Outcome> {
    let v = classify(inv);
    if v.case != VerdictCase::Generic {
        return Err(Error::WrongCase {
            expected: "a complex divisor or at least three distinct roots",
            got: format!("{:?}", v.case),
        });
    }
    let data = Sl2Data::from_invariants(inv);
    let mut h = Mat::<f64>::identity(2);
    let mut f = log_f(&data, &h);
    let state = |h: &Mat<f64>, f: f64, gn: f64, it: usize| Sl2State {
        s: &h.transpose() * h,
        h: h.clone(),
        log_f: f,
        grad: gn,
        iterations: it,
    };
    for it in 0..max_iter {
        let (g, hs) = local_model(&data, &h);
        let gn = fmath::hypot(g[0], g[1]);
        // near the boundary the gradient also vanishes, but so does the
        // curvature
        let tr = hs[0][0] + hs[1][1];
        let lo = 0.5 * (tr - fmath::hypot(hs[0][0] - hs[1][1], 2.0 * hs[0][1]));
        let flat = lo <= 1e-6 * tr.max(1.0);
        if gn <= tol && !flat {
            return Ok(Sl2Outcome::Minimum(state(&h, f, gn, it)));
        }
        let st = state(&h, f, gn, it);
        // stationary but flat: F only approaches its infimum at infinity
        if distance(&st.s) > ESCAPE || (gn <= tol && flat) {
            return Ok(Sl2Outcome::NoMinimum(st));
        }
        // Newton direction, regularized where the Hessian degenerates
        let reg = 1e-12 * (hs[0][0] + hs[1][1]).max(1.0);
        let (a, b, c) = (hs[0][0] + reg, hs[0][1], hs[1][1] + reg);
        let det = a * c - b * b;
        let (mut dp, mut dr) = if det > 1e-300 {
            (-(c * g[0] - b * g[1]) / det, -(a * g[1] - b * g[0]) / det)
        } else {
            (-g[0], -g[1])
        };
        let len = fmath::hypot(dp, dr);
        if len > MAX_STEP {
            dp *= MAX_STEP / len;
            dr *= MAX_STEP / len;
        }
        let slope = g[0] * dp + g[1] * dr;
        let mut t = 1.0;
        loop {
            let hn = &half_exp(t * dp, t * dr) * &h;
            let fnew = log_f(&data, &hn);
            if t < 1e-12 && flat {
                // rounding noise near the boundary swamps the decrease
                return Ok(Sl2Outcome::NoMinimum(st));
            }
            if fnew <= f + 1e-4 * t * slope || t < 1e-12 {
                h = hn;
                f = fnew;
                break;
            }
            t *= 0.5;
        }
        // keep h upper triangular with positive diagonal: F(U h) = F(h)
        h = triangular(&h);
    }
    let (g, _) = local_model(&data, &h);
    let st = state(&h, f, fmath::hypot(g[0], g[1]), max_iter);
    if distance(&st.s) > ESCAPE / 2.0 {
        return Ok(Sl2Outcome::NoMinimum(st));
    }
    Err(Error::NotConverged(format!(
        "SL(2) minimization: gradient {:e} after {} iterations",
        st.grad, max_iter
    )))
}

/// The upper triangular `h'` with `h'ᵀ h' = hᵀ h` (Cholesky of `S`).
fn triangular(h: &Mat<f64>) -> Mat<f64> {
    let s = &h.transpose() * h;
    let a = fmath::sqrt(s[(0, 0)]);
    let b = s[(0, 1)] / a;
    let d = fmath::sqrt((s[(1, 1)] - b * b).max(0.0));
    Mat::from_rows(vec![vec![a, b], vec![0.0, d]]).expect("2x2")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::canonical::CanonicalSpec;

    fn minimum(inv: &PencilInvariants) -> Sl2State {
        match sl2_minimize(inv, 1e-12, 500).unwrap() {
            Sl2Outcome::Minimum(s) => s,
            Sl2Outcome::NoMinimum(s) => panic!("no minimum: {:?}", s),
        }
    }

    #[test]
    fn complex_pair_at_identity() {
        let inv = CanonicalSpec::default().with_complex(rat(0), rat(1), 1).to_invariants();
        let s = minimum(&inv).s;
        assert!((&s - &Mat::identity(2)).max_abs() < 1e-9, "{:?}", s);
    }

    #[test]
    fn three_roots() {
        let inv = CanonicalSpec::real(&[(rat(0), 1), (rat(1), 1), (rat(-1), 1)]).to_invariants();
        let st = minimum(&inv);
        let r3 = fmath::sqrt(3.0);
        assert!((st.s[(0, 0)] - 1.0 / r3).abs() < 1e-9);
        assert!((st.s[(1, 1)] - r3).abs() < 1e-9);
        assert!(st.s[(0, 1)].abs() < 1e-9);
        let d = d_h(&Sl2Data::from_invariants(&inv), &st.h);
        assert!((d[(0, 0)] - d[(1, 1)]).abs() < 1e-9 && d[(0, 1)].abs() < 1e-9);
    }

    #[test]
    fn repeated_root_escapes() {
        let inv = CanonicalSpec::real(&[(rat(0), 1), (rat(0), 1), (rat(0), 1), (rat(1), 1), (rat(2), 1)])
            .to_invariants();
        assert!(matches!(sl2_minimize(&inv, 1e-12, 500).unwrap(), Sl2Outcome::NoMinimum(_)));
        let inv = CanonicalSpec::real(&[(rat(0), 1), (rat(1), 1)]).to_invariants();
        assert!(matches!(sl2_minimize(&inv, 1e-12, 500), Err(Error::WrongCase { .. })));
    }

    #[test]
    fn convex_along_geodesics() {
        let data = Sl2Data {
            roots: vec![0.0, 1.0, 3.0, -2.0],
            complex: vec![(0.5, 2.0)],
        };
        let h0 = Mat::from_rows(vec![vec![1.3, 0.4], vec![0.0, 1.0 / 1.3]]).unwrap();
        for &(p, r) in &[(1.0, 0.0), (0.0, 1.0), (0.6, -0.8), (-2.0, 0.3)] {
            let f = |t: f64| log_f(&data, &(&half_exp(t * p, t * r) * &h0));
            for k in -5..5 {
                let t = k as f64 * 0.7;
                let e = 1e-3;
                assert!(f(t + e) - 2.0 * f(t) + f(t - e) > -1e-9);
            }
        }
    }
}
