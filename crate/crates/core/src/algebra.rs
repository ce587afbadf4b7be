//! Two-step nilpotent Lie algebras `n = b ⊕ m` given by skew matrices
//! `J_1..J_p` with `[X_i, X_j] = Σ (J_α)_{ij} Z_α`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::arith::{rat, to_f64, Mat, RatMatrix, Rational};
use crate::error::{Error, Result};
use crate::fmath;
use crate::pencil::SkewPencil;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoStepAlgebra {
    q: usize,
    j: Vec<RatMatrix>,
}

/// `(q+p) x (q+p)` matrix `[[A1, 0], [U, M]]` acting on column vectors in
/// the basis `X_1..X_q, Z_1..Z_p`.
pub type DerivationMatrix = RatMatrix;

/// Inner product on `n`, block diagonal for `b ⊕ m`.
#[derive(Clone, Debug, PartialEq)]
pub enum MetricData {
    /// Squared lengths `exp(2 s_a)` of the basis vectors.
    Diagonal(Vec<f64>),
    ExactDiagonal(Vec<Rational>),
    Full(Mat<f64>),
}

/// Ricci operator restricted to `b` and `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct RicciData<T> {
    pub ric_b: Mat<T>,
    pub ric_m: Mat<T>,
}

/// Best decomposition `ric = C id + Φ + defect` with `Φ` a derivation.
#[derive(Clone, Debug)]
pub struct SolitonResidual {
    pub c: f64,
    /// In the orthonormal frame of the metric.
    pub phi: Mat<f64>,
    pub residual: f64,
    /// Set when the metric is exact diagonal and the decomposition is exact;
    /// `Φ` is then in the original basis.
    pub exact: Option<(Rational, RatMatrix)>,
}

fn skew_independent(j: &[RatMatrix]) -> bool {
    let q = j[0].rows();
    let rows: Vec<Vec<Rational>> = j
        .iter()
        .map(|m| {
            (0..q)
                .flat_map(|a| (a + 1..q).map(move |b| (a, b)))
                .map(|(a, b)| m[(a, b)].clone())
                .collect()
        })
        .collect();
    if rows[0].is_empty() {
        return false;
    }
    RatMatrix::from_rows(rows).map(|m| m.rank() == j.len()).unwrap_or(false)
}

impl TwoStepAlgebra {
    /// Type `(p, q)` algebra from `p` independent skew `q x q` matrices.
    pub fn from_tuple(j: Vec<RatMatrix>) -> Result<Self> {
        let q = j.first().ok_or_else(|| Error::Degenerate("no matrices".into()))?.rows();
        if j.iter().any(|m| m.rows() != q || m.cols() != q) {
            return Err(Error::Shape("matrices of different sizes".into()));
        }
        if j.iter().any(|m| !m.is_skew()) {
            return Err(Error::Shape("matrices must be skew-symmetric".into()));
        }
        if !skew_independent(&j) {
            return Err(Error::Degenerate("matrices are linearly dependent".into()));
        }
        Ok(TwoStepAlgebra { q, j })
    }

    pub fn from_pencil(p: &SkewPencil) -> Result<Self> {
        Self::from_tuple(vec![p.j1().clone(), p.j2().clone()])
    }

    pub fn q(&self) -> usize {
        self.q
    }
    pub fn p(&self) -> usize {
        self.j.len()
    }
    pub fn dim(&self) -> usize {
        self.q + self.j.len()
    }
    pub fn matrices(&self) -> &[RatMatrix] {
        &self.j
    }

    /// Pencil of a type `(2, q)` algebra.
    pub fn pencil(&self) -> Result<SkewPencil> {
        if self.p() != 2 {
            return Err(Error::BadDimensions(format!("pencil needs p = 2, got {}", self.p())));
        }
        SkewPencil::new(self.j[0].clone(), self.j[1].clone())
    }

    /// Structure constants of `[e_a, e_b]` in the full basis.
    pub fn bracket(&self, a: usize, b: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim()];
        if a < self.q && b < self.q {
            for (al, m) in self.j.iter().enumerate() {
                out[self.q + al] = m[(a, b)].clone();
            }
        }
        out
    }

    /// `J_α A1 + A1ᵀ J_α = Σ_β M_{αβ} J_β` for all `α`, and the block
    /// shape `[[A1, 0], [U, M]]`.
    pub fn is_derivation(&self, d: &RatMatrix) -> bool {
        let (q, n) = (self.q, self.dim());
        if d.rows() != n || d.cols() != n {
            return false;
        }
        if (0..q).any(|i| (q..n).any(|c| !d[(i, c)].is_zero())) {
            return false;
        }
        let a1 = d.select(&(0..q).collect::<Vec<_>>(), &(0..q).collect::<Vec<_>>());
        let m = d.select(&(q..n).collect::<Vec<_>>(), &(q..n).collect::<Vec<_>>());
        self.j.iter().enumerate().all(|(al, ja)| {
            let lhs = &(ja * &a1) + &(&a1.transpose() * ja);
            let mut rhs = RatMatrix::zeros(q, q);
            for (be, jb) in self.j.iter().enumerate() {
                rhs = &rhs + &jb.scale(&m[(al, be)]);
            }
            lhs == rhs
        })
    }

    /// Largest entry of the derivation defect of `d` for float matrices `j`,
    /// including the entries that must vanish in the upper right block.
    pub fn derivation_defect_f64(j: &[Mat<f64>], d: &Mat<f64>) -> f64 {
        let q = j[0].rows();
        let n = q + j.len();
        let a1 = Mat::from_fn(q, q, |r, c| d[(r, c)]);
        let m = Mat::from_fn(j.len(), j.len(), |r, c| d[(q + r, q + c)]);
        let mut worst = (0..q)
            .flat_map(|i| (q..n).map(move |c| (i, c)))
            .map(|(i, c)| fmath::abs(d[(i, c)]))
            .fold(0.0, f64::max);
        for (al, ja) in j.iter().enumerate() {
            let mut e = &(ja * &a1) + &(&a1.transpose() * ja);
            for (be, jb) in j.iter().enumerate() {
                e = &e - &jb.scale(&m[(al, be)]);
            }
            worst = worst.max(e.max_abs());
        }
        worst
    }

    /// Exact basis of `Der(n)`: the `U`-blocks first, then a basis of the
    /// `(A1, M)` solutions.
    pub fn derivation_basis(&self) -> Vec<DerivationMatrix> {
        let (q, p, n) = (self.q, self.p(), self.dim());
        let mut out = Vec::new();
        for al in 0..p {
            for i in 0..q {
                let mut d = RatMatrix::zeros(n, n);
                d[(q + al, i)] = Rational::one();
                out.push(d);
            }
        }
        // unknowns: A1 row-major, then M row-major
        let nv = q * q + p * p;
        let mut eqs = Vec::new();
        for (al, ja) in self.j.iter().enumerate() {
            for i in 0..q {
                for j in i + 1..q {
                    let mut row = vec![Rational::zero(); nv];
                    for k in 0..q {
                        // (J A)_{ij} + (Aᵀ J)_{ij}
                        row[k * q + j] += &ja[(i, k)];
                        row[k * q + i] += &ja[(k, j)];
                    }
                    for (be, jb) in self.j.iter().enumerate() {
                        row[q * q + al * p + be] -= &jb[(i, j)];
                    }
                    eqs.push(row);
                }
            }
        }
        let sys = if eqs.is_empty() {
            RatMatrix::zeros(1, nv)
        } else {
            RatMatrix::from_rows(eqs).expect("rectangular")
        };
        for v in sys.nullspace() {
            let mut d = RatMatrix::zeros(n, n);
            for r in 0..q {
                for c in 0..q {
                    d[(r, c)] = v[r * q + c].clone();
                }
            }
            for r in 0..p {
                for c in 0..p {
                    d[(q + r, q + c)] = v[q * q + r * p + c].clone();
                }
            }
            out.push(d);
        }
        out
    }

    /// `diag(I_q, 2 I_p)`.
    pub fn grading_derivation(&self) -> DerivationMatrix {
        let d: Vec<Rational> = (0..self.dim()).map(|a| if a < self.q { rat(1) } else { rat(2) }).collect();
        RatMatrix::diag(&d)
    }

    fn check_metric(&self, g: &MetricData) -> Result<()> {
        let n = self.dim();
        match g {
            MetricData::Diagonal(d) => {
                if d.len() != n || d.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
                    return Err(Error::MetricInvalid("diagonal entries must be positive".into()));
                }
            }
            MetricData::ExactDiagonal(d) => {
                if d.len() != n || d.iter().any(|x| !x.is_positive()) {
                    return Err(Error::MetricInvalid("diagonal entries must be positive".into()));
                }
            }
            MetricData::Full(m) => {
                if m.rows() != n || m.cols() != n || !m.is_symmetric() {
                    return Err(Error::MetricInvalid("metric must be symmetric of size q+p".into()));
                }
                let q = self.q;
                if (0..q).any(|i| (q..n).any(|c| m[(i, c)] != 0.0)) {
                    return Err(Error::MetricInvalid("metric must be block diagonal on b ⊕ m".into()));
                }
                if m.cholesky().is_none() {
                    return Err(Error::MetricInvalid("metric is not positive definite".into()));
                }
            }
        }
        Ok(())
    }

    /// `T_b`, `T_m` with orthonormal frames given by their columns, and
    /// `T_m^{-1}`.
    fn frames(&self, g: &MetricData) -> (Mat<f64>, Mat<f64>, Mat<f64>) {
        let (q, n) = (self.q, self.dim());
        let full = match g {
            MetricData::Diagonal(d) => Mat::diag(d),
            MetricData::ExactDiagonal(d) => Mat::diag(&d.iter().map(to_f64).collect::<Vec<_>>()),
            MetricData::Full(m) => m.clone(),
        };
        let gb = Mat::from_fn(q, q, |r, c| full[(r, c)]);
        let gm = Mat::from_fn(n - q, n - q, |r, c| full[(q + r, q + c)]);
        let inv_t = |g: &Mat<f64>| {
            // T = L^{-T}
            let l = g.cholesky().expect("checked positive definite");
            (l.inverse().expect("nonsingular").transpose(), l.transpose())
        };
        let (tb, _) = inv_t(&gb);
        let (tm, tm_inv) = inv_t(&gm);
        (tb, tm, tm_inv)
    }

    /// Bracket matrices `J̃_β` in a `g`-orthonormal frame.
    pub fn orthonormal_matrices(&self, g: &MetricData) -> Result<Vec<Mat<f64>>> {
        self.check_metric(g)?;
        let (tb, _, tm_inv) = self.frames(g);
        let jt: Vec<Mat<f64>> = self.j.iter().map(|m| &(&tb.transpose() * &m.to_f64()) * &tb).collect();
        Ok((0..self.p())
            .map(|be| {
                let mut acc = Mat::<f64>::zeros(self.q, self.q);
                for (al, m) in jt.iter().enumerate() {
                    acc = &acc + &m.scale(&tm_inv[(be, al)]);
                }
                acc
            })
            .collect())
    }

    /// Ricci operator in a `g`-orthonormal frame:
    /// `ric_b = -½ Σ J̃ J̃ᵀ`, `(ric_m)_{αβ} = ¼ Tr J̃_α J̃_βᵀ`.
    pub fn ricci(&self, g: &MetricData) -> Result<RicciData<f64>> {
        let jt = self.orthonormal_matrices(g)?;
        Ok(ricci_from_frame(&jt))
    }

    /// Ricci operator for an exact diagonal metric, written in the given
    /// basis (it is conjugate to the orthonormal-frame operator by a
    /// diagonal matrix, so diagonal entries agree).
    pub fn ricci_exact(&self, g: &[Rational]) -> Result<RicciData<Rational>> {
        self.check_metric(&MetricData::ExactDiagonal(g.to_vec()))?;
        let (q, p) = (self.q, self.p());
        let mut rb = RatMatrix::zeros(q, q);
        for (al, ja) in self.j.iter().enumerate() {
            let ga = &g[q + al];
            for i in 0..q {
                for j in 0..q {
                    let mut s = Rational::zero();
                    for k in 0..q {
                        if !ja[(i, k)].is_zero() && !ja[(j, k)].is_zero() {
                            s += &ja[(i, k)] * &ja[(j, k)] / &g[k];
                        }
                    }
                    rb[(i, j)] -= s * ga / (&g[i] * rat(2));
                }
            }
        }
        let rm = RatMatrix::from_fn(p, p, |a, b| {
            let mut s = Rational::zero();
            for i in 0..q {
                for j in 0..q {
                    let (x, y) = (&self.j[a][(i, j)], &self.j[b][(i, j)]);
                    if !x.is_zero() && !y.is_zero() {
                        s += x * y / (&g[i] * &g[j]);
                    }
                }
            }
            s * &g[q + b] / rat(4)
        });
        Ok(RicciData { ric_b: rb, ric_m: rm })
    }

    /// Least-squares fit of `ric - C id` by a derivation.
    pub fn nilsoliton_residual(&self, g: &MetricData) -> Result<SolitonResidual> {
        self.check_metric(g)?;
        let basis = self.derivation_basis();
        if let MetricData::ExactDiagonal(d) = g {
            if let Some((c, phi)) = self.exact_decomposition(d, &basis)? {
                return Ok(SolitonResidual {
                    c: to_f64(&c),
                    phi: phi.to_f64(),
                    residual: 0.0,
                    exact: Some((c, phi)),
                });
            }
        }
        let jt = self.orthonormal_matrices(g)?;
        let ric = ricci_from_frame(&jt).operator();
        // derivations conjugated into the orthonormal frame: T^{-1} D T
        let (tb, tm, tm_inv) = self.frames(g);
        let (q, n) = (self.q, self.dim());
        let mut t = Mat::<f64>::zeros(n, n);
        t.set_block(0, 0, &tb);
        t.set_block(q, q, &tm);
        let mut t_inv = Mat::<f64>::zeros(n, n);
        t_inv.set_block(0, 0, &tb.inverse().expect("nonsingular"));
        t_inv.set_block(q, q, &tm_inv);
        let dt: Vec<Mat<f64>> = basis.iter().map(|d| &(&t_inv * &d.to_f64()) * &t).collect();
        let ncol = 1 + dt.len();
        let a = Mat::from_fn(n * n, ncol, |r, c| {
            let (i, j) = (r / n, r % n);
            if c == 0 {
                if i == j {
                    1.0
                } else {
                    0.0
                }
            } else {
                dt[c - 1][(i, j)]
            }
        });
        let x = a.lstsq_min_norm(ric.data());
        let mut phi = Mat::<f64>::zeros(n, n);
        for (k, d) in dt.iter().enumerate() {
            phi = &phi + &d.scale(&x[k + 1]);
        }
        let defect = &(&ric - &Mat::<f64>::identity(n).scale(&x[0])) - &phi;
        Ok(SolitonResidual {
            c: x[0],
            phi,
            residual: defect.frobenius(),
            exact: None,
        })
    }

    fn exact_decomposition(&self, g: &[Rational], basis: &[RatMatrix]) -> Result<Option<(Rational, RatMatrix)>> {
        let ric = self.ricci_exact(g)?.operator();
        let n = self.dim();
        let ncol = 1 + basis.len();
        let a = RatMatrix::from_fn(n * n, ncol, |r, c| {
            let (i, j) = (r / n, r % n);
            if c == 0 {
                if i == j {
                    rat(1)
                } else {
                    rat(0)
                }
            } else {
                basis[c - 1][(i, j)].clone()
            }
        });
        Ok(a.solve(ric.data()).map(|x| {
            let mut phi = RatMatrix::zeros(n, n);
            for (k, d) in basis.iter().enumerate() {
                if !x[k + 1].is_zero() {
                    phi = &phi + &d.scale(&x[k + 1]);
                }
            }
            (x[0].clone(), phi)
        }))
    }

    /// Dual algebra of type `(D - p, q)`: its matrices span the orthogonal
    /// complement of `span(J)` in `Λ²ℝ^q` under `-Tr(K1 K2)`.
    pub fn dualize(&self) -> Result<Self> {
        let q = self.q;
        let dd = q * (q - 1) / 2;
        if self.p() >= dd {
            return Err(Error::FullType);
        }
        let pairs: Vec<(usize, usize)> = (0..q).flat_map(|a| (a + 1..q).map(move |b| (a, b))).collect();
        let rows: Vec<Vec<Rational>> = self
            .j
            .iter()
            .map(|m| pairs.iter().map(|&(a, b)| m[(a, b)].clone()).collect())
            .collect();
        let comp = RatMatrix::from_rows(rows).expect("rectangular").nullspace();
        let mats = comp
            .into_iter()
            .map(|v| {
                let mut m = RatMatrix::zeros(q, q);
                for (c, &(a, b)) in v.iter().zip(&pairs) {
                    m[(a, b)] = c.clone();
                    m[(b, a)] = -c.clone();
                }
                m
            })
            .collect();
        Self::from_tuple(mats)
    }
}

fn ricci_from_frame(jt: &[Mat<f64>]) -> RicciData<f64> {
    let q = jt[0].rows();
    let p = jt.len();
    let mut rb = Mat::<f64>::zeros(q, q);
    for m in jt {
        rb = &rb - &(&(m * &m.transpose())).scale(&0.5);
    }
    let rm = Mat::from_fn(p, p, |a, b| 0.25 * (&jt[a] * &jt[b].transpose()).trace());
    RicciData { ric_b: rb, ric_m: rm }
}

impl<T: crate::arith::Scalar> RicciData<T> {
    /// `ric_b ⊕ ric_m` as one operator on `n`.
    pub fn operator(&self) -> Mat<T> {
        Mat::block_diag(&[self.ric_b.clone(), self.ric_m.clone()])
    }
}

/// `-Tr(K1 K2)`.
pub fn trace_form(a: &RatMatrix, b: &RatMatrix) -> Rational {
    -(a * b).trace()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{l_block, r_block, sk, synthesize, CanonicalSpec};

    fn h3() -> TwoStepAlgebra {
        TwoStepAlgebra::from_tuple(vec![sk(&RatMatrix::identity(1))]).unwrap()
    }

    fn free3() -> TwoStepAlgebra {
        TwoStepAlgebra::from_tuple(vec![sk(&l_block(1)), sk(&r_block(1))]).unwrap()
    }

    fn span_rank(ms: &[RatMatrix]) -> usize {
        let rows: Vec<Vec<Rational>> = ms.iter().map(|m| m.data().to_vec()).collect();
        RatMatrix::from_rows(rows).unwrap().rank()
    }

    #[test]
    fn construction() {
        let p = synthesize(&CanonicalSpec::real(&[(rat(0), 1)])).err();
        assert!(p.is_some());
        assert!(TwoStepAlgebra::from_tuple(vec![RatMatrix::identity(2)]).is_err());
        let f = free3();
        assert_eq!((f.p(), f.q()), (2, 3));
        let s = synthesize(&CanonicalSpec::real(&[(rat(0), 1), (rat(1), 1)])).unwrap();
        let a = TwoStepAlgebra::from_pencil(&s).unwrap();
        assert_eq!((a.p(), a.q()), (2, 4));
        assert_eq!(a.bracket(0, 1)[4], rat(1));
    }

    #[test]
    fn derivations() {
        let h = h3();
        let b = h.derivation_basis();
        assert_eq!(b.len(), 6);
        assert!(b.iter().all(|d| h.is_derivation(d)));
        assert_eq!(span_rank(&b), 6);
        let f = free3();
        let b = f.derivation_basis();
        // [X2, X3] = 0 forces the X1-components of A1 X2, A1 X3 to vanish
        assert_eq!(b.len(), 7 + 6);
        assert!(b.iter().all(|d| f.is_derivation(d)));
        let mut with_grading = b.clone();
        with_grading.push(f.grading_derivation());
        assert_eq!(span_rank(&with_grading), b.len());
        let e23 = RatMatrix::from_i64(3, 3, &[0, 0, 0, 0, 0, 1, 0, -1, 0]);
        let free = TwoStepAlgebra::from_tuple(vec![sk(&l_block(1)), sk(&r_block(1)), e23]).unwrap();
        assert_eq!(free.derivation_basis().len(), 9 + 9);
        let mut bad = f.grading_derivation();
        bad[(0, 0)] = rat(3);
        assert!(!f.is_derivation(&bad));
    }

    #[test]
    fn ricci_examples() {
        let r = h3().ricci(&MetricData::Diagonal(vec![1.0; 3])).unwrap();
        assert_eq!(r.ric_b, Mat::diag(&[-0.5, -0.5]));
        assert_eq!(r.ric_m, Mat::diag(&[0.5]));
        let r = free3().ricci_exact(&vec![rat(1); 5]).unwrap();
        let h = Rational::new((-1).into(), 2.into());
        assert_eq!(r.ric_b, RatMatrix::diag(&[rat(-1), h.clone(), h.clone()]));
        assert_eq!(r.ric_m, RatMatrix::diag(&[-h.clone(), -h]));
        // homogeneity
        let r4 = free3().ricci(&MetricData::Diagonal(vec![4.0; 5])).unwrap();
        assert!((r4.ric_b[(0, 0)] + 0.25).abs() < 1e-14);
    }

    #[test]
    fn ricci_exact_matches_float() {
        let a = TwoStepAlgebra::from_pencil(&synthesize(&CanonicalSpec::real(&[(rat(0), 2), (rat(1), 1)])).unwrap()).unwrap();
        let g: Vec<Rational> = (1..=8).map(|k| Rational::new(k.into(), 3.into())).collect();
        let e = a.ricci_exact(&g).unwrap();
        let f = a.ricci(&MetricData::ExactDiagonal(g.clone())).unwrap();
        for i in 0..6 {
            assert!((to_f64(&e.ric_b[(i, i)]) - f.ric_b[(i, i)]).abs() < 1e-12);
        }
        // full metric path agrees with the diagonal one
        let full = Mat::diag(&g.iter().map(to_f64).collect::<Vec<_>>());
        let f2 = a.ricci(&MetricData::Full(full)).unwrap();
        assert!((&f2.ric_b - &f.ric_b).max_abs() < 1e-12);
        assert!(a.ricci(&MetricData::Diagonal(vec![1.0, -1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0])).is_err());
    }

    #[test]
    fn residual_h3() {
        let r = h3().nilsoliton_residual(&MetricData::ExactDiagonal(vec![rat(1); 3])).unwrap();
        let (c, phi) = r.exact.unwrap();
        assert_eq!(c, Rational::new((-3).into(), 2.into()));
        assert_eq!(phi, RatMatrix::diag(&[rat(1), rat(1), rat(2)]));
        let r = h3().nilsoliton_residual(&MetricData::Diagonal(vec![2.0, 0.5, 3.0])).unwrap();
        assert!(r.residual < 1e-10 && (r.c + 4.5).abs() < 1e-9, "{:?}", r);
    }

    #[test]
    fn non_soliton_metric_has_residual() {
        // sk(I1) ⊕ sk(I1) / sk(0) ⊕ sk(I1) is the Case 1 spec {0, 1}
        let a = TwoStepAlgebra::from_pencil(&synthesize(&CanonicalSpec::real(&[(rat(0), 1), (rat(1), 1), (rat(2), 1)])).unwrap()).unwrap();
        let r = a.nilsoliton_residual(&MetricData::Diagonal(vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0])).unwrap();
        assert!(r.residual > 0.01);
    }

    #[test]
    fn duals() {
        // type (1, 4) with J = sk(I_2)
        let n = TwoStepAlgebra::from_tuple(vec![sk(&RatMatrix::identity(2))]).unwrap();
        let d = n.dualize().unwrap();
        assert_eq!((d.p(), d.q()), (5, 4));
        for a in d.matrices() {
            assert!(trace_form(a, &n.matrices()[0]).is_zero());
        }
        let dd = d.dualize().unwrap();
        assert_eq!(dd.p(), 1);
        let mut all = dd.matrices().to_vec();
        all.extend_from_slice(n.matrices());
        assert_eq!(span_rank(&all), 1);
        assert_eq!(free3().dualize().unwrap().p(), 1);
        let full = TwoStepAlgebra::from_tuple(vec![sk(&RatMatrix::identity(1))]).unwrap();
        assert_eq!(full.dualize(), Err(Error::FullType));
    }
}
