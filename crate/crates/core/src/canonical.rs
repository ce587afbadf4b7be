//! Canonical skew pencils built from invariant data, and random
//! presentations of the same algebra.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{rat, RatMatrix, Rational};
use crate::error::{Error, Result};
use crate::pencil::{case_tag_of, CaseTag, ComplexDivisor, PencilInvariants, RealDivisor, SkewPencil};

/// Invariant data for a canonical pencil, plus optional zero padding (an
/// abelian direct factor).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CanonicalSpec {
    pub real_divisors: Vec<RealDivisor>,
    pub complex_divisors: Vec<ComplexDivisor>,
    pub minimal_indices: Vec<usize>,
    pub padding: usize,
}

impl CanonicalSpec {
    pub fn new(real: Vec<RealDivisor>, complex: Vec<ComplexDivisor>, indices: Vec<usize>) -> Self {
        CanonicalSpec {
            real_divisors: real,
            complex_divisors: complex,
            minimal_indices: indices,
            padding: 0,
        }
    }

    /// Real divisors from `(root, power)` pairs.
    pub fn real(pairs: &[(Rational, usize)]) -> Self {
        Self::new(
            pairs
                .iter()
                .map(|(r, l)| RealDivisor {
                    root: r.clone(),
                    power: *l,
                })
                .collect(),
            Vec::new(),
            Vec::new(),
        )
    }

    pub fn with_indices(mut self, k: &[usize]) -> Self {
        self.minimal_indices.extend_from_slice(k);
        self
    }

    pub fn with_complex(mut self, mu: Rational, nu_sq: Rational, power: usize) -> Self {
        self.complex_divisors.push(ComplexDivisor { mu, nu_sq, power });
        self
    }

    pub fn q(&self) -> usize {
        self.to_invariants().dimension()
    }

    pub fn case_tag(&self) -> CaseTag {
        case_tag_of(&self.real_divisors, &self.complex_divisors)
    }

    pub fn to_invariants(&self) -> PencilInvariants {
        PencilInvariants::from_parts(
            self.real_divisors.clone(),
            self.complex_divisors.clone(),
            self.minimal_indices.clone(),
            self.padding,
        )
    }

    pub fn from_invariants(inv: &PencilInvariants) -> Self {
        CanonicalSpec {
            real_divisors: inv.real_divisors.clone(),
            complex_divisors: inv.complex_divisors.clone(),
            minimal_indices: inv.minimal_indices.clone(),
            padding: inv.common_kernel_dim,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.real_divisors.is_empty() && self.complex_divisors.is_empty() && self.minimal_indices.is_empty() {
            return Err(Error::SpecInvalid("no divisors and no minimal indices".into()));
        }
        if self.real_divisors.iter().any(|d| d.power == 0)
            || self.complex_divisors.iter().any(|d| d.power == 0)
            || self.minimal_indices.iter().any(|&k| k == 0)
        {
            return Err(Error::SpecInvalid("powers and minimal indices must be positive".into()));
        }
        if self.complex_divisors.iter().any(|d| !d.nu_sq.is_positive()) {
            return Err(Error::SpecInvalid("nu^2 must be positive".into()));
        }
        Ok(())
    }
}

/// Elementary blocks of the canonical forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Block {
    I(usize),
    N(usize),
    L(usize),
    R(usize),
    /// `I^c_{2n}`, given `2n`.
    Ic(usize),
    D(usize),
    /// `D^c_{2n}`, given `2n`.
    Dc(usize),
    Sk(RatMatrix),
}

impl Block {
    pub fn matrix(&self) -> RatMatrix {
        match self {
            Block::I(n) => RatMatrix::identity(*n),
            Block::N(n) => nilpotent(*n),
            Block::L(n) => l_block(*n),
            Block::R(n) => r_block(*n),
            Block::Ic(m) => ic(*m),
            Block::D(n) => RatMatrix::diag(&(1..=*n as i64).map(rat).collect::<Vec<_>>()),
            Block::Dc(m) => RatMatrix::diag(&(0..*m).map(|i| rat((i / 2 + 1) as i64)).collect::<Vec<_>>()),
            Block::Sk(a) => sk(a),
        }
    }
}

/// `[[0, A], [-Aᵀ, 0]]`.
pub fn sk(a: &RatMatrix) -> RatMatrix {
    let (m, n) = (a.rows(), a.cols());
    let mut s = RatMatrix::zeros(m + n, m + n);
    s.set_block(0, m, a);
    s.set_block(m, 0, &-&a.transpose());
    s
}

/// `N_n`: ones on the superdiagonal.
pub fn nilpotent(n: usize) -> RatMatrix {
    RatMatrix::from_fn(n, n, |i, j| if j == i + 1 { rat(1) } else { rat(0) })
}

/// `L_n`: `I_n` with a zero column on the right.
pub fn l_block(n: usize) -> RatMatrix {
    RatMatrix::from_fn(n, n + 1, |i, j| if i == j { rat(1) } else { rat(0) })
}

/// `R_n`: `I_n` with a zero column on the left.
pub fn r_block(n: usize) -> RatMatrix {
    RatMatrix::from_fn(n, n + 1, |i, j| if j == i + 1 { rat(1) } else { rat(0) })
}

/// `I^c_{m}` for even `m`: `m/2` copies of `sk(I_1)`.
pub fn ic(m: usize) -> RatMatrix {
    assert!(m % 2 == 0, "I^c needs even size");
    let one = RatMatrix::identity(1);
    RatMatrix::block_diag(&vec![sk(&one); m / 2])
}

/// Real block `mu I + (nu I^c or companion) + N^2` of size `2n` whose
/// elementary divisor is `((x + mu y)^2 + nu^2 y^2)^n`. When `nu` is
/// rational this is exactly `mu I + nu I^c + N^2`.
pub fn complex_block(d: &ComplexDivisor) -> RatMatrix {
    let m = 2 * d.power;
    let rot = match d.nu() {
        Some(nu) => ic(m).scale(&nu),
        None => {
            let c = RatMatrix::from_rows(vec![vec![rat(0), -d.nu_sq.clone()], vec![rat(1), rat(0)]]).expect("2x2");
            RatMatrix::block_diag(&vec![c; d.power])
        }
    };
    let n = nilpotent(m);
    &(&RatMatrix::identity(m).scale(&d.mu) + &rot) + &(&n * &n)
}

fn singular_blocks(k: &[usize]) -> (Vec<RatMatrix>, Vec<RatMatrix>) {
    k.iter().map(|&k| (sk(&l_block(k)), sk(&r_block(k)))).unzip()
}

/// Canonical pencil of the spec. Cases 1 and 3 use the affine form; Case 2
/// uses the `x^l / y^l` split with the first root of the spec in group 1.
pub fn synthesize(spec: &CanonicalSpec) -> Result<SkewPencil> {
    synthesize_with_change(spec).map(|(p, _)| p)
}

/// Canonical pencil `P` and a change `V0` such that `P(V0 (x, y)ᵀ)` has
/// exactly the divisors of the spec (`V0 = I` outside Case 2).
pub fn synthesize_with_change(spec: &CanonicalSpec) -> Result<(SkewPencil, RatMatrix)> {
    spec.validate()?;
    let mut b1 = Vec::new();
    let mut b2 = Vec::new();
    let mut v0 = RatMatrix::identity(2);
    match spec.case_tag() {
        CaseTag::Case1 | CaseTag::Case3 => {
            for d in &spec.real_divisors {
                let l = d.power;
                b1.push(sk(&RatMatrix::identity(l)));
                b2.push(sk(&(&RatMatrix::identity(l).scale(&d.root) + &nilpotent(l))));
            }
            for d in &spec.complex_divisors {
                b1.push(sk(&RatMatrix::identity(2 * d.power)));
                b2.push(sk(&complex_block(d)));
            }
        }
        CaseTag::Case2 => {
            let alpha = spec.real_divisors.first().map(|d| d.root.clone());
            let beta = spec
                .real_divisors
                .iter()
                .map(|d| &d.root)
                .find(|r| Some(*r) != alpha.as_ref())
                .cloned();
            let (g1, g2): (Vec<&RealDivisor>, Vec<&RealDivisor>) =
                spec.real_divisors.iter().partition(|d| Some(&d.root) == alpha.as_ref());
            for d in &g1 {
                b1.push(sk(&RatMatrix::identity(d.power)));
                b2.push(sk(&nilpotent(d.power)));
            }
            for d in &g2 {
                b1.push(sk(&nilpotent(d.power)));
                b2.push(sk(&RatMatrix::identity(d.power)));
            }
            if let Some(a) = alpha {
                let row2 = match beta {
                    Some(b) => vec![rat(1), b],
                    None => vec![rat(0), rat(1)],
                };
                v0 = RatMatrix::from_rows(vec![vec![rat(1), a], row2]).expect("2x2");
            }
        }
    }
    let (s1, s2) = singular_blocks(&spec.minimal_indices);
    b1.extend(s1);
    b2.extend(s2);
    if spec.padding > 0 {
        b1.push(RatMatrix::zeros(spec.padding, spec.padding));
        b2.push(RatMatrix::zeros(spec.padding, spec.padding));
    }
    let p = SkewPencil::new_unchecked(RatMatrix::block_diag(&b1), RatMatrix::block_diag(&b2))?;
    if !p.independent() {
        return Err(Error::SpecInvalid("resulting J1 and J2 are linearly dependent".into()));
    }
    Ok((p, v0))
}

/// Pencil whose own divisors are those of the spec (no infinite divisors).
pub fn synthesize_affine(spec: &CanonicalSpec) -> Result<SkewPencil> {
    let (p, v0) = synthesize_with_change(spec)?;
    Ok(p.change_variables(&v0))
}

/// `P (x J1 + y J2) Pᵀ` followed by the variable change `W`.
pub fn apply_equivalence(p: &SkewPencil, pm: &RatMatrix, w: &RatMatrix) -> SkewPencil {
    p.congruent(pm).change_variables(w)
}

/// Random product of `factors` elementary matrices `I + c E_ij` with
/// `c` in `{-3..3} \ {0}`.
pub fn random_congruence(q: usize, factors: usize, rng: &mut ChaCha8Rng) -> RatMatrix {
    let mut p = RatMatrix::identity(q);
    if q < 2 {
        return p;
    }
    for _ in 0..factors {
        let i = rng.gen_range(0..q);
        let mut j = rng.gen_range(0..q - 1);
        if j >= i {
            j += 1;
        }
        let c = *[-3i64, -2, -1, 1, 2, 3].choose(rng).expect("nonempty");
        // row i += c * row j
        for col in 0..q {
            let add = &p[(j, col)] * rat(c);
            p[(i, col)] += add;
        }
    }
    p
}

/// Random invertible `2 x 2` change of variables with small entries.
pub fn random_variable_change(rng: &mut ChaCha8Rng) -> RatMatrix {
    loop {
        let e: Vec<i64> = (0..4).map(|_| rng.gen_range(-3..=3)).collect();
        if e[0] * e[3] - e[1] * e[2] != 0 {
            return RatMatrix::from_i64(2, 2, &e);
        }
    }
}

/// Random congruent presentation with a random variable change, given a
/// seed. Deterministic.
pub fn random_equivalence(p: &SkewPencil, seed: u64) -> SkewPencil {
    random_equivalence_with_change(p, seed).0
}

/// As `random_equivalence`, also returning the variable change `W`: the
/// result is `(P J Pᵀ)` evaluated at `W (x, y)ᵀ`.
pub fn random_equivalence_with_change(p: &SkewPencil, seed: u64) -> (SkewPencil, RatMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pm = random_congruence(p.q(), 4 * p.q(), &mut rng);
    let w = random_variable_change(&mut rng);
    (apply_equivalence(p, &pm, &w), w)
}

/// Shape of a random spec.
#[derive(Clone, Copy, Debug)]
pub struct RandomSpecOptions {
    pub max_q: usize,
    pub allow_complex: bool,
    pub allow_singular: bool,
    pub max_power: usize,
}

impl Default for RandomSpecOptions {
    fn default() -> Self {
        RandomSpecOptions {
            max_q: 14,
            allow_complex: true,
            allow_singular: true,
            max_power: 3,
        }
    }
}

fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    let d = [1i64, 1, 1, 2, 3][rng.gen_range(0..5)];
    Rational::new(rng.gen_range(-4i64..=4).into(), d.into())
}

/// Random valid spec with `q <= max_q`; roots are drawn from a small pool so
/// coincidences occur.
pub fn random_spec(rng: &mut ChaCha8Rng, o: &RandomSpecOptions) -> CanonicalSpec {
    loop {
        let mut spec = CanonicalSpec::default();
        let mut budget = o.max_q;
        let pool: Vec<Rational> = (0..rng.gen_range(1..=4)).map(|_| small_rational(rng)).collect();
        let cpool: Vec<(Rational, Rational)> = (0..2)
            .map(|_| {
                let nu_sq = [rat(1), rat(4), rat(2), Rational::new(1.into(), 4.into())][rng.gen_range(0..4)].clone();
                (small_rational(rng), nu_sq)
            })
            .collect();
        for _ in 0..rng.gen_range(0..=6) {
            match rng.gen_range(0..10) {
                0..=5 => {
                    let l = rng.gen_range(1..=o.max_power);
                    if 2 * l <= budget {
                        budget -= 2 * l;
                        spec.real_divisors.push(RealDivisor {
                            root: pool.choose(rng).expect("pool").clone(),
                            power: l,
                        });
                    }
                }
                6 | 7 if o.allow_complex => {
                    let n = rng.gen_range(1..=o.max_power.min(2));
                    if 4 * n <= budget {
                        budget -= 4 * n;
                        let (mu, nu_sq) = cpool.choose(rng).expect("pool").clone();
                        spec.complex_divisors.push(ComplexDivisor { mu, nu_sq, power: n });
                    }
                }
                _ if o.allow_singular => {
                    let k = rng.gen_range(1..=3);
                    if 2 * k + 1 <= budget {
                        budget -= 2 * k + 1;
                        spec.minimal_indices.push(k);
                    }
                }
                _ => {}
            }
        }
        if synthesize(&spec).is_ok() {
            return spec;
        }
    }
}

/// Distinct real roots of a spec in order of first appearance.
pub fn distinct_roots(spec: &CanonicalSpec) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::new();
    for d in &spec.real_divisors {
        if !out.contains(&d.root) {
            out.push(d.root.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use crate::pencil::{compute_invariants, Mode};

    fn check_round_trip(spec: &CanonicalSpec, seed: u64) {
        let (p, v0) = synthesize_with_change(spec).unwrap();
        assert_eq!(p.q(), spec.q());
        assert!(p.j1().is_skew() && p.j2().is_skew());
        let (pe, w) = random_equivalence_with_change(&p, seed);
        let inv = compute_invariants(&pe, Mode::Exact).unwrap();
        let m = &(&v0.inverse().unwrap() * &w) * &inv.variable_change;
        let expected = spec.to_invariants().transform(&m).unwrap();
        assert!(
            inv.same_invariants(&expected),
            "spec {:?} seed {}: got {:?}",
            spec,
            seed,
            inv
        );
    }

    #[test]
    fn spec_examples() {
        let spec = CanonicalSpec::real(&[(rat(0), 1), (rat(1), 1), (rat(2), 1)]);
        let p = synthesize(&spec).unwrap();
        assert_eq!(p.q(), 6);
        assert_eq!(p.j1(), &RatMatrix::block_diag(&vec![sk(&RatMatrix::identity(1)); 3]));
        let inv = compute_invariants(&p, Mode::Exact).unwrap();
        assert!(inv.same_invariants(&spec.to_invariants()));
        assert_eq!(inv.case_tag, CaseTag::Case1);

        let spec = CanonicalSpec::default().with_indices(&[1]);
        let p = synthesize(&spec).unwrap();
        assert_eq!(p.j1(), &sk(&l_block(1)));
        assert_eq!(p.j2(), &sk(&r_block(1)));

        let spec = CanonicalSpec::default().with_complex(rat(0), rat(1), 1);
        let p = synthesize(&spec).unwrap();
        assert_eq!(p.q(), 4);
        assert_eq!(p.j1(), &sk(&RatMatrix::identity(2)));
        assert_eq!(p.j2(), &sk(&ic(2)));
    }

    #[test]
    fn dependent_specs_rejected() {
        assert!(matches!(synthesize(&CanonicalSpec::real(&[(rat(1), 1)])), Err(Error::SpecInvalid(_))));
        assert!(matches!(synthesize(&CanonicalSpec::default()), Err(Error::SpecInvalid(_))));
        assert!(synthesize(&CanonicalSpec::real(&[(rat(1), 2)])).is_ok());
    }

    #[test]
    fn round_trips() {
        check_round_trip(&CanonicalSpec::real(&[(rat(0), 2), (rat(3), 1)]).with_indices(&[2]), 1);
        check_round_trip(&CanonicalSpec::real(&[(ratio(1, 2), 1), (rat(0), 1), (rat(-1), 2)]), 2);
        check_round_trip(&CanonicalSpec::default().with_complex(rat(1), rat(2), 2), 3);
        check_round_trip(&CanonicalSpec::real(&[(rat(5), 1)]).with_complex(rat(0), rat(4), 1).with_indices(&[1]), 4);
        let mut padded = CanonicalSpec::real(&[(rat(2), 1), (rat(2), 1)]).with_indices(&[1]);
        padded.padding = 2;
        check_round_trip(&padded, 5);
    }

    #[test]
    fn random_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let o = RandomSpecOptions {
            max_q: 10,
            ..Default::default()
        };
        for s in 0..8 {
            let spec = random_spec(&mut rng, &o);
            check_round_trip(&spec, 100 + s);
        }
    }

    #[test]
    fn identity_equivalence_is_noop() {
        let p = synthesize(&CanonicalSpec::default().with_indices(&[1])).unwrap();
        assert_eq!(apply_equivalence(&p, &RatMatrix::identity(3), &RatMatrix::identity(2)), p);
        let perm = RatMatrix::from_i64(3, 3, &[0, 0, 1, 1, 0, 0, 0, 1, 0]);
        let inv = compute_invariants(&p.congruent(&perm), Mode::Exact).unwrap();
        assert_eq!(inv.minimal_indices, vec![1]);
    }
}
