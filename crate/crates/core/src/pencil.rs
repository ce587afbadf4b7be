//! Projective invariants of a skew-symmetric pencil `x J1 + y J2`.
//!
//! The pipeline: split off the common kernel, pick a variable change that
//! removes infinite elementary divisors, read the finite elementary divisors
//! from the local Smith structure at each root of the top determinantal
//! divisor, halve their multiplicities, and count minimal indices from the
//! dimensions of homogeneous kernel solutions.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::form::{numeric_roots, split_squarefree_exact};
use crate::arith::{generic_rank, BinaryForm, FormMatrix, Mat, Poly, RatMatrix, Rational};
use crate::arith::{rat, to_f64};
use crate::error::{Error, Result};

pub use crate::arith::FactorMode as Mode;

/// Default limit on `q` for exact computations.
pub const DEFAULT_MAX_Q: usize = 20;

/// A pair of skew-symmetric `q x q` rational matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewPencil {
    j1: RatMatrix,
    j2: RatMatrix,
}

impl SkewPencil {
    /// Checks shape and skew-symmetry. Linear dependence is reported as
    /// `Degenerate`.
    pub fn new(j1: RatMatrix, j2: RatMatrix) -> Result<Self> {
        let p = Self::new_unchecked(j1, j2)?;
        if !p.independent() {
            return Err(Error::Degenerate("J1 and J2 are linearly dependent".into()));
        }
        Ok(p)
    }

    /// Like `new` but allows dependent matrices.
    pub fn new_unchecked(j1: RatMatrix, j2: RatMatrix) -> Result<Self> {
        if !j1.is_square() || (j1.rows(), j1.cols()) != (j2.rows(), j2.cols()) {
            return Err(Error::Shape("pencil matrices must be square of equal size".into()));
        }
        if j1.rows() == 0 {
            return Err(Error::Shape("empty pencil".into()));
        }
        if !j1.is_skew() || !j2.is_skew() {
            return Err(Error::Shape("pencil matrices must be skew-symmetric".into()));
        }
        Ok(SkewPencil { j1, j2 })
    }

    pub fn q(&self) -> usize {
        self.j1.rows()
    }
    pub fn j1(&self) -> &RatMatrix {
        &self.j1
    }
    pub fn j2(&self) -> &RatMatrix {
        &self.j2
    }

    pub fn independent(&self) -> bool {
        let m = RatMatrix::new(2, self.q() * self.q(), {
            let mut d = self.j1.data().to_vec();
            d.extend_from_slice(self.j2.data());
            d
        })
        .expect("shape");
        m.rank() == 2
    }

    pub fn form_matrix(&self) -> FormMatrix {
        FormMatrix::pencil(&self.j1, &self.j2).expect("equal shapes")
    }

    /// `P J Pᵀ` for both matrices.
    pub fn congruent(&self, p: &RatMatrix) -> SkewPencil {
        let pt = p.transpose();
        SkewPencil {
            j1: &(p * &self.j1) * &pt,
            j2: &(p * &self.j2) * &pt,
        }
    }

    /// `(J1, J2) V`, i.e. the pencil `P(V (x, y)ᵀ)`.
    pub fn change_variables(&self, v: &RatMatrix) -> SkewPencil {
        SkewPencil {
            j1: &self.j1.scale(&v[(0, 0)]) + &self.j2.scale(&v[(1, 0)]),
            j2: &self.j1.scale(&v[(0, 1)]) + &self.j2.scale(&v[(1, 1)]),
        }
    }

    pub fn direct_sum(&self, o: &SkewPencil) -> SkewPencil {
        SkewPencil {
            j1: RatMatrix::block_diag(&[self.j1.clone(), o.j1.clone()]),
            j2: RatMatrix::block_diag(&[self.j2.clone(), o.j2.clone()]),
        }
    }

    /// Removes the common kernel: returns the reduced pencil and the
    /// kernel dimension.
    pub fn split_kernel(&self) -> (SkewPencil, usize) {
        let stacked = self.j1.vstack(&self.j2);
        let b = stacked.row_space();
        let kdim = self.q() - b.rows();
        if kdim == 0 {
            return (self.clone(), 0);
        }
        let bt = b.transpose();
        (
            SkewPencil {
                j1: &(&b * &self.j1) * &bt,
                j2: &(&b * &self.j2) * &bt,
            },
            kdim,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RealDivisor {
    /// `a` in `(x + a y)^power`.
    pub root: Rational,
    pub power: usize,
}

/// `((x + mu y)^2 + nu^2 y^2)^power`, stored through `nu^2` so that rational
/// changes of variables stay exact.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComplexDivisor {
    pub mu: Rational,
    pub nu_sq: Rational,
    pub power: usize,
}

impl ComplexDivisor {
    pub fn nu_f64(&self) -> f64 {
        crate::fmath::sqrt(to_f64(&self.nu_sq))
    }

    /// `nu` itself when `nu^2` is the square of a rational.
    pub fn nu(&self) -> Option<Rational> {
        rational_sqrt(&self.nu_sq)
    }

    pub fn prime(&self) -> BinaryForm {
        BinaryForm::quadratic(&self.mu, &(&self.mu * &self.mu + &self.nu_sq))
    }
}

pub(crate) fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rational::new(n, d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseTag {
    Case1,
    Case2,
    Case3,
}

impl CaseTag {
    pub fn name(&self) -> &'static str {
        match self {
            CaseTag::Case1 => "Case1",
            CaseTag::Case2 => "Case2",
            CaseTag::Case3 => "Case3",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PencilInvariants {
    pub real_divisors: Vec<RealDivisor>,
    pub complex_divisors: Vec<ComplexDivisor>,
    pub minimal_indices: Vec<usize>,
    pub common_kernel_dim: usize,
    /// The divisors above belong to `P(V (x, y)ᵀ)`.
    pub variable_change: RatMatrix,
    pub case_tag: CaseTag,
    /// False when roots came from floating root finding.
    pub exact: bool,
}

impl PencilInvariants {
    /// Builds invariants from parts, computing the case tag.
    pub fn from_parts(
        real_divisors: Vec<RealDivisor>,
        complex_divisors: Vec<ComplexDivisor>,
        minimal_indices: Vec<usize>,
        common_kernel_dim: usize,
    ) -> Self {
        let case_tag = case_tag_of(&real_divisors, &complex_divisors);
        PencilInvariants {
            real_divisors,
            complex_divisors,
            minimal_indices,
            common_kernel_dim,
            variable_change: RatMatrix::identity(2),
            case_tag,
            exact: true,
        }
    }

    /// `2 sum l + 4 sum n + sum (2k + 1) + common kernel`.
    pub fn dimension(&self) -> usize {
        2 * self.real_divisors.iter().map(|d| d.power).sum::<usize>()
            + 4 * self.complex_divisors.iter().map(|d| d.power).sum::<usize>()
            + self.minimal_indices.iter().map(|k| 2 * k + 1).sum::<usize>()
            + self.common_kernel_dim
    }

    /// Sorted copy for multiset comparison.
    pub fn normalized(&self) -> Self {
        let mut s = self.clone();
        s.real_divisors.sort();
        s.complex_divisors.sort();
        s.minimal_indices.sort_unstable();
        s
    }

    /// Equality of the divisor and index multisets (variable change and
    /// exactness flag ignored).
    pub fn same_invariants(&self, o: &Self) -> bool {
        let (a, b) = (self.normalized(), o.normalized());
        a.real_divisors == b.real_divisors
            && a.complex_divisors == b.complex_divisors
            && a.minimal_indices == b.minimal_indices
            && a.common_kernel_dim == b.common_kernel_dim
    }

    /// Divisors of `P(M (x, y)ᵀ)` given those of `P`. Fails if a divisor
    /// becomes infinite (a power of `y`).
    pub fn transform(&self, m: &RatMatrix) -> Result<Self> {
        let mut real = Vec::with_capacity(self.real_divisors.len());
        for d in &self.real_divisors {
            let c0 = &m[(0, 0)] + &d.root * &m[(1, 0)];
            let c1 = &m[(0, 1)] + &d.root * &m[(1, 1)];
            if c0.is_zero() {
                return Err(Error::Degenerate("variable change makes a divisor infinite".into()));
            }
            real.push(RealDivisor {
                root: c1 / c0,
                power: d.power,
            });
        }
        let mut complex = Vec::with_capacity(self.complex_divisors.len());
        for d in &self.complex_divisors {
            let c = &d.mu * &d.mu + &d.nu_sq;
            let q = RatMatrix::from_rows(vec![vec![rat(1), d.mu.clone()], vec![d.mu.clone(), c]])
                .expect("2x2");
            let qp = &(&m.transpose() * &q) * m;
            let mu = &qp[(0, 1)] / &qp[(0, 0)];
            let cc = &qp[(1, 1)] / &qp[(0, 0)];
            complex.push(ComplexDivisor {
                nu_sq: cc - &mu * &mu,
                mu,
                power: d.power,
            });
        }
        Ok(PencilInvariants {
            case_tag: case_tag_of(&real, &complex),
            real_divisors: real,
            complex_divisors: complex,
            minimal_indices: self.minimal_indices.clone(),
            common_kernel_dim: self.common_kernel_dim,
            variable_change: self.variable_change.clone(),
            exact: self.exact,
        })
    }

    /// Number of distinct roots, a conjugate pair counting twice.
    pub fn distinct_root_count(&self) -> usize {
        distinct_count(&self.real_divisors, &self.complex_divisors)
    }
}

fn distinct_count(real: &[RealDivisor], complex: &[ComplexDivisor]) -> usize {
    let mut roots: Vec<&Rational> = real.iter().map(|d| &d.root).collect();
    roots.sort();
    roots.dedup();
    let mut pairs: Vec<(&Rational, &Rational)> = complex.iter().map(|d| (&d.mu, &d.nu_sq)).collect();
    pairs.sort();
    pairs.dedup();
    roots.len() + 2 * pairs.len()
}

pub(crate) fn case_tag_of(real: &[RealDivisor], complex: &[ComplexDivisor]) -> CaseTag {
    if distinct_count(real, complex) >= 3 {
        CaseTag::Case1
    } else if complex.is_empty() {
        CaseTag::Case2
    } else {
        CaseTag::Case3
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvariantOptions {
    pub mode: Mode,
    /// Relative tolerance for root clustering and float ranks.
    pub tol: f64,
    pub max_q: usize,
}

impl Default for InvariantOptions {
    fn default() -> Self {
        InvariantOptions {
            mode: Mode::Exact,
            tol: 1e-9,
            max_q: DEFAULT_MAX_Q,
        }
    }
}

/// Complete projective invariant of a skew pencil.
pub fn compute_invariants(p: &SkewPencil, mode: Mode) -> Result<PencilInvariants> {
    compute_invariants_with(
        p,
        &InvariantOptions {
            mode,
            ..Default::default()
        },
    )
}

/// One prime of the reduced pencil with its (unhalved) partial
/// multiplicities, largest first.
#[derive(Clone, Debug)]
struct LocalPrime {
    kind: PrimeKind,
    kappas: Vec<usize>,
}

#[derive(Clone, Debug)]
enum PrimeKind {
    /// Root `theta` of `A(x)`, so the divisor is `x - theta y`.
    Real(Rational),
    /// `x^2 + 2 m x + c`.
    Quadratic(Rational, Rational),
}

/// Reduced pencil after kernel split and variable change.
struct Prepared {
    n: usize,
    normal_rank: usize,
    kernel_dim: usize,
    v: RatMatrix,
    reduced: SkewPencil,
    changed: SkewPencil,
}

fn prepare(p: &SkewPencil, opts: &InvariantOptions) -> Result<Prepared> {
    if p.q() > opts.max_q {
        return Err(Error::TooLarge(p.q(), opts.max_q));
    }
    if !p.independent() {
        return Err(Error::Degenerate("J1 and J2 are linearly dependent".into()));
    }
    let (reduced, kernel_dim) = p.split_kernel();
    let n = reduced.q();
    let normal_rank = generic_rank(&reduced.form_matrix());
    let mut t = 0i64;
    let v = loop {
        let v = RatMatrix::from_rows(vec![vec![rat(1), rat(0)], vec![rat(t), rat(1)]]).expect("2x2");
        let top = reduced.change_variables(&v);
        if top.j1.rank() == normal_rank {
            break v;
        }
        t = if t > 0 { -t } else { 1 - t };
        if t.unsigned_abs() as usize > 2 * n + 2 {
            return Err(Error::Internal("no variable change reaches the normal rank".into()));
        }
    };
    let changed = reduced.change_variables(&v);
    Ok(Prepared {
        n,
        normal_rank,
        kernel_dim,
        v,
        reduced,
        changed,
    })
}

pub fn compute_invariants_with(p: &SkewPencil, opts: &InvariantOptions) -> Result<PencilInvariants> {
    let prep = prepare(p, opts)?;
    let primes = local_primes(&prep, opts)?;
    let mut real = Vec::new();
    let mut complex = Vec::new();
    for lp in &primes {
        for (power, count) in halved_counts(&lp.kappas)? {
            for _ in 0..count {
                match &lp.kind {
                    PrimeKind::Real(theta) => real.push(RealDivisor {
                        root: -theta.clone(),
                        power,
                    }),
                    PrimeKind::Quadratic(m, c) => complex.push(ComplexDivisor {
                        mu: m.clone(),
                        nu_sq: c - m * m,
                        power,
                    }),
                }
            }
        }
    }
    let indices = kernel_degrees(&prep.reduced, prep.n - prep.normal_rank)?;
    let mut inv = PencilInvariants::from_parts(real, complex, indices, prep.kernel_dim);
    inv.variable_change = prep.v;
    inv.exact = opts.mode == Mode::Exact;
    inv.real_divisors.sort();
    inv.complex_divisors.sort();
    if inv.dimension() != p.q() {
        return Err(Error::Internal(format!(
            "invariants account for dimension {} of {}",
            inv.dimension(),
            p.q()
        )));
    }
    Ok(inv)
}

/// `(power, count / 2)` from a list of partial multiplicities; each count
/// must be even for a skew pencil.
fn halved_counts(kappas: &[usize]) -> Result<Vec<(usize, usize)>> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for &k in kappas {
        match out.iter_mut().find(|(p, _)| *p == k) {
            Some(slot) => slot.1 += 1,
            None => out.push((k, 1)),
        }
    }
    for (p, c) in out.iter_mut() {
        if *c % 2 != 0 {
            return Err(Error::Internal(format!(
                "elementary divisor of degree {} repeats an odd number of times",
                p
            )));
        }
        *c /= 2;
    }
    Ok(out)
}

/// Polynomial `det(U A(x) W)` for random rational `U, W`, a multiple of the
/// product of all finite invariant factors of `A(x) = x J1 + J2`.
fn random_compressed_det(a1: &RatMatrix, a0: &RatMatrix, r: usize, rng: &mut ChaCha8Rng) -> Poly {
    let n = a1.rows();
    let u = RatMatrix::from_fn(r, n, |_, _| rat(rng.gen_range(-9..=9)));
    let w = RatMatrix::from_fn(n, r, |_, _| rat(rng.gen_range(-9..=9)));
    let b1 = &(&u * a1) * &w;
    let b0 = &(&u * a0) * &w;
    let xs: Vec<Rational> = (0..=r as i64).map(rat).collect();
    let ys: Vec<Rational> = xs.iter().map(|x| (&b1.scale(x) + &b0).det()).collect();
    Poly::interpolate(&xs, &ys)
}

/// Square-free polynomial whose roots include every finite eigenvalue.
fn eigen_candidates(prep: &Prepared) -> Poly {
    let r = prep.normal_rank;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_9e_4c11);
    let mut g = Poly::zero();
    let mut hits = 0;
    for _ in 0..12 {
        let d = random_compressed_det(prep.changed.j1(), prep.changed.j2(), r, &mut rng);
        if d.is_zero() {
            continue;
        }
        g = Poly::gcd(&g, &d);
        hits += 1;
        if hits >= 3 || g.is_constant() {
            break;
        }
    }
    g.squarefree_part()
}

fn toeplitz<T: crate::arith::Scalar>(diag: &Mat<T>, sub: &Mat<T>, k: usize) -> Mat<T> {
    let n = diag.rows();
    let mut t = Mat::<T>::zeros(k * n, k * n);
    for b in 0..k {
        t.set_block(b * n, b * n, diag);
        if b > 0 {
            t.set_block(b * n, (b - 1) * n, sub);
        }
    }
    t
}

/// Realification `[[X, -s Y], [Y, X]]` of `X + i sqrt(s) Y` (rank doubles).
fn realify<T: crate::arith::Scalar>(x: &Mat<T>, y: &Mat<T>, s: &T) -> Mat<T> {
    let top = x.hstack(&y.scale(&-s.clone()));
    let bottom = y.hstack(x);
    top.vstack(&bottom)
}

/// Partial multiplicities from nullities of the block Toeplitz matrices:
/// `nullity(T_k) = k (n - r) + sum min(kappa, k)`.
fn kappas_from_nullities(n: usize, r: usize, mut nullity: impl FnMut(usize) -> usize) -> Result<Vec<usize>> {
    let mut c = vec![0usize]; // c[0] unused
    let mut prev = 0usize;
    for k in 1..=n + 1 {
        let nk = nullity(k);
        let ck = nk
            .checked_sub(prev + (n - r))
            .ok_or_else(|| Error::Internal("Toeplitz nullities not monotone".into()))?;
        prev = nk;
        if ck == 0 {
            break;
        }
        if c.len() > 1 && ck > c[c.len() - 1] {
            return Err(Error::Internal("partial multiplicity counts increase".into()));
        }
        c.push(ck);
    }
    let mut kappas = Vec::new();
    for j in (1..c.len()).rev() {
        let next = if j + 1 < c.len() { c[j + 1] } else { 0 };
        for _ in 0..(c[j] - next) {
            kappas.push(j);
        }
    }
    Ok(kappas)
}

fn local_primes(prep: &Prepared, opts: &InvariantOptions) -> Result<Vec<LocalPrime>> {
    let s = eigen_candidates(prep);
    if s.is_constant() {
        return Ok(Vec::new());
    }
    let (n, r) = (prep.n, prep.normal_rank);
    let a1 = prep.changed.j1();
    let a0 = prep.changed.j2();
    let mut out = Vec::new();
    match opts.mode {
        Mode::Exact => {
            let (roots, quads) = split_squarefree_exact(&s)?;
            for theta in roots {
                let at = &a1.scale(&theta) + a0;
                let kappas = kappas_from_nullities(n, r, |k| k * n - toeplitz(&at, a1, k).rank())?;
                if !kappas.is_empty() {
                    out.push(LocalPrime {
                        kind: PrimeKind::Real(theta),
                        kappas,
                    });
                }
            }
            for (m, c) in quads {
                // theta = -m + i nu, nu^2 = c - m^2
                let nu_sq = &c - &m * &m;
                let xr = &a1.scale(&-m.clone()) + a0;
                let zero = RatMatrix::zeros(n, n);
                let kappas = kappas_from_nullities(n, r, |k| {
                    let x = toeplitz(&xr, a1, k);
                    let y = toeplitz(a1, &zero, k);
                    k * n - realify(&x, &y, &nu_sq).rank() / 2
                })?;
                if !kappas.is_empty() {
                    out.push(LocalPrime {
                        kind: PrimeKind::Quadratic(m, c),
                        kappas,
                    });
                }
            }
        }
        Mode::Numeric => {
            let f1 = a1.to_f64();
            let f0 = a0.to_f64();
            let zero = Mat::<f64>::zeros(n, n);
            let rank_tol = opts.tol.max(1e-12);
            for (z, _) in numeric_roots(&s, opts.tol) {
                if z.im == 0.0 {
                    let at = &f1.scale(&z.re) + &f0;
                    let kappas =
                        kappas_from_nullities(n, r, |k| k * n - toeplitz(&at, &f1, k).rank_tol(rank_tol))?;
                    if !kappas.is_empty() {
                        out.push(LocalPrime {
                            kind: PrimeKind::Real(Rational::from_float(z.re).unwrap_or_else(Rational::zero)),
                            kappas,
                        });
                    }
                } else {
                    let xr = &f1.scale(&z.re) + &f0;
                    let kappas = kappas_from_nullities(n, r, |k| {
                        let x = toeplitz(&xr, &f1, k);
                        let y = toeplitz(&f1, &zero, k);
                        // [[X, -s Y], [Y, X]] with s = im^2, rescaled to keep it balanced
                        let yy = y.scale(&z.im);
                        let re = realify(&x, &yy, &1.0);
                        k * n - re.rank_tol(rank_tol) / 2
                    })?;
                    if !kappas.is_empty() {
                        let m = Rational::from_float(-z.re).unwrap_or_else(Rational::zero);
                        let c = Rational::from_float(z.re * z.re + z.im * z.im).unwrap_or_else(Rational::zero);
                        out.push(LocalPrime {
                            kind: PrimeKind::Quadratic(m, c),
                            kappas,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Minimal indices of a pencil without common kernel: `count` indices are
/// expected (corank over the function field).
fn kernel_degrees(p: &SkewPencil, count: usize) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    if count == 0 {
        return Ok(out);
    }
    let n = p.q();
    let mut s = vec![0usize]; // s[d + 1] = s_d, s_{-1} = 0
    for d in 0..=n {
        let sd = homogeneous_kernel_dim(p, d);
        s.push(sd);
        let sm1 = s[s.len() - 2];
        let sm2 = if s.len() >= 3 { s[s.len() - 3] } else { 0 };
        let found = (sd + sm2)
            .checked_sub(2 * sm1)
            .ok_or_else(|| Error::Internal("kernel dimensions not convex".into()))?;
        if d == 0 && found > 0 {
            return Err(Error::Internal("constant kernel after kernel split".into()));
        }
        for _ in 0..found {
            out.push(d);
        }
        if out.len() >= count {
            break;
        }
    }
    if out.len() != count {
        return Err(Error::Internal(format!(
            "found {} minimal indices, expected {}",
            out.len(),
            count
        )));
    }
    Ok(out)
}

/// Dimension of degree-`d` homogeneous vectors `v` with `(x J1 + y J2) v = 0`.
fn homogeneous_kernel_dim(p: &SkewPencil, d: usize) -> usize {
    let n = p.q();
    let mut m = RatMatrix::zeros((d + 2) * n, (d + 1) * n);
    for t in 0..=d {
        // v_t contributes J1 v_t to row block t and J2 v_t to row block t+1
        m.set_block(t * n, t * n, p.j1());
        m.set_block((t + 1) * n, t * n, p.j2());
    }
    (d + 1) * n - m.rank()
}

/// Minimal indices and common kernel dimension of any pencil.
pub fn minimal_indices(p: &SkewPencil) -> Result<(Vec<usize>, usize)> {
    let (reduced, kdim) = p.split_kernel();
    if reduced.q() == 0 {
        return Ok((Vec::new(), kdim));
    }
    let r = generic_rank(&reduced.form_matrix());
    Ok((kernel_degrees(&reduced, reduced.q() - r)?, kdim))
}

/// Invariant polynomials `i_1 | i_2 | ... | i_r` of the reduced pencil after
/// the recorded variable change (`r` the normal rank), monic.
pub fn invariant_polynomials(p: &SkewPencil) -> Result<(Vec<BinaryForm>, RatMatrix)> {
    let opts = InvariantOptions::default();
    let prep = prepare(p, &opts)?;
    let primes = local_primes(&prep, &opts)?;
    let r = prep.normal_rank;
    let mut inv = vec![BinaryForm::one(); r];
    for lp in &primes {
        let prime = match &lp.kind {
            PrimeKind::Real(theta) => BinaryForm::linear(rat(1), -theta.clone()),
            PrimeKind::Quadratic(m, c) => BinaryForm::quadratic(m, c),
        };
        for (j, &k) in lp.kappas.iter().enumerate() {
            inv[r - 1 - j] = inv[r - 1 - j].mul(&prime.pow(k));
        }
    }
    Ok((inv, prep.v))
}

/// Product `Delta_r = i_1 ... i_r`.
pub fn determinantal_divisors(p: &SkewPencil) -> Result<Vec<BinaryForm>> {
    let (inv, _) = invariant_polynomials(p)?;
    let mut acc = BinaryForm::one();
    Ok(inv
        .iter()
        .map(|i| {
            acc = acc.mul(i);
            acc.clone()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{minors_gcd, ratio};

    fn sk(a: &RatMatrix) -> RatMatrix {
        let (m, n) = (a.rows(), a.cols());
        let mut s = RatMatrix::zeros(m + n, m + n);
        s.set_block(0, m, a);
        s.set_block(m, 0, &-&a.transpose());
        s
    }

    fn l_mat(k: usize) -> RatMatrix {
        RatMatrix::from_fn(k, k + 1, |i, j| if i == j { rat(1) } else { rat(0) })
    }

    fn r_mat(k: usize) -> RatMatrix {
        RatMatrix::from_fn(k, k + 1, |i, j| if j == i + 1 { rat(1) } else { rat(0) })
    }

    fn scalar(a: i64) -> RatMatrix {
        RatMatrix::from_i64(1, 1, &[a])
    }

    #[test]
    fn two_real_roots() {
        let j1 = RatMatrix::block_diag(&[sk(&scalar(1)), sk(&scalar(1))]);
        let j2 = RatMatrix::block_diag(&[sk(&scalar(0)), sk(&scalar(1))]);
        let inv = compute_invariants(&SkewPencil::new(j1, j2).unwrap(), Mode::Exact).unwrap();
        assert_eq!(
            inv.real_divisors,
            vec![RealDivisor { root: rat(0), power: 1 }, RealDivisor { root: rat(1), power: 1 }]
        );
        assert!(inv.complex_divisors.is_empty() && inv.minimal_indices.is_empty());
        assert_eq!(inv.case_tag, CaseTag::Case2);
    }

    #[test]
    fn singular_block() {
        let p = SkewPencil::new(sk(&l_mat(1)), sk(&r_mat(1))).unwrap();
        let inv = compute_invariants(&p, Mode::Exact).unwrap();
        assert_eq!(inv.minimal_indices, vec![1]);
        assert_eq!(inv.common_kernel_dim, 0);
        assert!(inv.real_divisors.is_empty());
        assert_eq!(inv.case_tag, CaseTag::Case2);
        assert_eq!(minimal_indices(&p).unwrap(), (vec![1], 0));
        let padded = p.direct_sum(&SkewPencil::new_unchecked(RatMatrix::zeros(1, 1), RatMatrix::zeros(1, 1)).unwrap());
        assert_eq!(minimal_indices(&padded).unwrap(), (vec![1], 1));
    }

    #[test]
    fn regular_case1_has_no_indices() {
        let j1 = RatMatrix::block_diag(&[sk(&scalar(1)), sk(&scalar(1)), sk(&scalar(1))]);
        let j2 = RatMatrix::block_diag(&[sk(&scalar(0)), sk(&scalar(1)), sk(&scalar(2))]);
        let p = SkewPencil::new(j1, j2).unwrap();
        assert_eq!(minimal_indices(&p).unwrap(), (vec![], 0));
        let inv = compute_invariants(&p, Mode::Exact).unwrap();
        assert_eq!(inv.case_tag, CaseTag::Case1);
        assert_eq!(inv.real_divisors.len(), 3);
    }

    #[test]
    fn jordan_and_infinite_blocks() {
        // sk(I_2) / sk(3 I + N) gives (x + 3y)^2; sk(N_2) / sk(I_2) is infinite y^2
        let n2 = RatMatrix::from_i64(2, 2, &[0, 1, 0, 0]);
        let j1 = RatMatrix::block_diag(&[sk(&RatMatrix::identity(2)), sk(&n2)]);
        let j2 = RatMatrix::block_diag(&[sk(&(&RatMatrix::identity(2).scale(&rat(3)) + &n2)), sk(&RatMatrix::identity(2))]);
        let p = SkewPencil::new(j1, j2).unwrap();
        let inv = compute_invariants(&p, Mode::Exact).unwrap();
        assert_ne!(inv.variable_change, RatMatrix::identity(2));
        // undo the change: divisors of P are those of P∘V composed with V^{-1}
        let back = inv.transform(&inv.variable_change.inverse().unwrap());
        // y^2 becomes infinite again, so the inverse transform must fail
        assert!(back.is_err());
        let mut powers: Vec<usize> = inv.real_divisors.iter().map(|d| d.power).collect();
        powers.sort();
        assert_eq!(powers, vec![2, 2]);
    }

    #[test]
    fn complex_divisor_with_irrational_nu() {
        // sk(I_2) / sk([[1, -2], [1, 1]]): det(xI + yB) = (x + y)^2 + 2 y^2
        let b = RatMatrix::from_i64(2, 2, &[1, -2, 1, 1]);
        let p = SkewPencil::new(sk(&RatMatrix::identity(2)), sk(&b)).unwrap();
        let inv = compute_invariants(&p, Mode::Exact).unwrap();
        assert_eq!(
            inv.complex_divisors,
            vec![ComplexDivisor { mu: rat(1), nu_sq: rat(2), power: 1 }]
        );
        assert_eq!(inv.case_tag, CaseTag::Case3);
        let num = compute_invariants(&p, Mode::Numeric).unwrap();
        assert_eq!(num.complex_divisors.len(), 1);
        assert!((to_f64(&num.complex_divisors[0].nu_sq) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn invariant_polynomials_match_minors() {
        let n2 = RatMatrix::from_i64(2, 2, &[0, 1, 0, 0]);
        let j1 = RatMatrix::block_diag(&[sk(&RatMatrix::identity(2)), sk(&scalar(1)), sk(&l_mat(1))]);
        let j2 = RatMatrix::block_diag(&[sk(&(&RatMatrix::identity(2).scale(&ratio(1, 2)) + &n2)), sk(&scalar(-1)), sk(&r_mat(1))]);
        let p = SkewPencil::new(j1, j2).unwrap();
        let deltas = determinantal_divisors(&p).unwrap();
        let fm = p.form_matrix();
        for (r, d) in deltas.iter().enumerate() {
            assert_eq!(&minors_gcd(&fm, r + 1), d, "Delta_{}", r + 1);
        }
        let inv = compute_invariants(&p, Mode::Exact).unwrap();
        assert_eq!(inv.minimal_indices, vec![1]);
        assert_eq!(
            inv.real_divisors,
            vec![RealDivisor { root: rat(-1), power: 1 }, RealDivisor { root: ratio(1, 2), power: 2 }]
        );
    }

    #[test]
    fn congruence_invariance() {
        let j1 = RatMatrix::block_diag(&[sk(&scalar(1)), sk(&scalar(1)), sk(&l_mat(2))]);
        let j2 = RatMatrix::block_diag(&[sk(&scalar(0)), sk(&scalar(5)), sk(&r_mat(2))]);
        let p = SkewPencil::new(j1, j2).unwrap();
        let pm = RatMatrix::from_fn(9, 9, |i, j| {
            if i == j {
                rat(1)
            } else if j == (i * 4 + 1) % 9 {
                rat(i as i64 - 3)
            } else {
                rat(0)
            }
        });
        assert!(pm.inverse().is_some());
        let a = compute_invariants(&p, Mode::Exact).unwrap();
        let b = compute_invariants(&p.congruent(&pm), Mode::Exact).unwrap();
        assert!(a.same_invariants(&b));
    }

    #[test]
    fn dependent_pencil_is_degenerate() {
        let j = sk(&scalar(1));
        assert!(matches!(SkewPencil::new(j.clone(), j.scale(&rat(2))), Err(Error::Degenerate(_))));
    }

    #[test]
    fn too_large() {
        let z = RatMatrix::zeros(21, 21);
        let mut j1 = z.clone();
        j1[(0, 1)] = rat(1);
        j1[(1, 0)] = rat(-1);
        let mut j2 = z;
        j2[(2, 3)] = rat(1);
        j2[(3, 2)] = rat(-1);
        let p = SkewPencil::new(j1, j2).unwrap();
        assert_eq!(compute_invariants(&p, Mode::Exact), Err(Error::TooLarge(21, 20)));
    }
}
