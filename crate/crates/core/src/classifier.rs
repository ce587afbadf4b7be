//! Einstein nilradical decision for type `(2, q)` algebras from pencil
//! invariants.

use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::arith::{rat, Rational};
use crate::pencil::{PencilInvariants, RealDivisor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VerdictCase {
    /// Complex divisors present or at least three distinct real roots.
    Generic,
    /// Only real divisors, with at most two distinct roots.
    Subsingular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FailedCondition {
    /// Some `l_i > 1` or `n_j > 1` in the generic case.
    AI,
    /// A root value carries at least `u/2 + w` divisors.
    AIi,
    /// Some divisor of group 2 has `l > 1`.
    BNilpotentL,
    /// `S1 <= 0` and (a) fails.
    BA,
    /// `2 k_j^2 >= 2 S2 / S1`.
    BBK,
    /// `[(l_i^2 + 1) / 2] >= 2 S2 / S1` for a group 1 divisor.
    BBL,
}

impl FailedCondition {
    pub fn name(self) -> &'static str {
        match self {
            FailedCondition::AI => "A_i",
            FailedCondition::AIi => "A_ii",
            FailedCondition::BNilpotentL => "B_nilpotent_l",
            FailedCondition::BA => "B_a",
            FailedCondition::BBK => "B_b_k",
            FailedCondition::BBL => "B_b_l",
        }
    }
}

/// Subsingular grouping: group 1 has root `a1`, group 2 root `a2`, and
/// `(max l, count)` of group 1 is lexicographically at least that of group 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling {
    pub group1: Vec<RealDivisor>,
    pub group2: Vec<RealDivisor>,
}

impl Labeling {
    pub fn u1(&self) -> usize {
        self.group1.len()
    }
    pub fn u2(&self) -> usize {
        self.group2.len()
    }
    pub fn root1(&self) -> Option<&Rational> {
        self.group1.first().map(|d| &d.root)
    }
    pub fn root2(&self) -> Option<&Rational> {
        self.group2.first().map(|d| &d.root)
    }
}

/// Root whose multiplicity breaks (A)(ii) while (A)(i) holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessHint {
    pub root: Rational,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub is_einstein: bool,
    pub case: VerdictCase,
    pub labeling: Option<Labeling>,
    pub s1: Option<Rational>,
    pub s2: Option<Rational>,
    pub failed_condition: Option<FailedCondition>,
    pub witness_hint: Option<WitnessHint>,
}

fn key(g: &[RealDivisor]) -> (usize, usize) {
    (g.iter().map(|d| d.power).max().unwrap_or(0), g.len())
}

/// Group the real divisors by root and order the two groups.
pub fn subsingular_labeling(real: &[RealDivisor]) -> Labeling {
    let mut roots: Vec<&Rational> = Vec::new();
    for d in real {
        if !roots.contains(&&d.root) {
            roots.push(&d.root);
        }
    }
    assert!(roots.len() <= 2, "subsingular labeling needs at most two roots");
    roots.sort();
    let pick = |r: Option<&&Rational>| -> Vec<RealDivisor> {
        match r {
            Some(r) => real.iter().filter(|d| &&d.root == r).cloned().collect(),
            None => Vec::new(),
        }
    };
    let a = pick(roots.first());
    let b = pick(roots.get(1));
    // ties go to the smaller root, which is `a`
    if key(&b) > key(&a) {
        Labeling { group1: b, group2: a }
    } else {
        Labeling { group1: a, group2: b }
    }
}

/// `S1 = Σ_{group 1} l - u''`.
pub fn s1(lab: &Labeling) -> Rational {
    rat(lab.group1.iter().map(|d| d.power as i64).sum::<i64>() - lab.u2() as i64)
}

/// `S2 = 1 + Σ_{group 1} (2l³ + l)/6 + Σ_j k(k+1)(2k+1)/6`.
pub fn s2(lab: &Labeling, minimal_indices: &[usize]) -> Rational {
    let mut s = rat(1);
    for d in &lab.group1 {
        let l = d.power as i64;
        s += Rational::new((2 * l * l * l + l).into(), 6.into());
    }
    for &k in minimal_indices {
        let k = k as i64;
        s += Rational::new((k * (k + 1) * (2 * k + 1)).into(), 6.into());
    }
    s
}

fn is_generic(inv: &PencilInvariants) -> bool {
    !inv.complex_divisors.is_empty() || {
        let mut roots: Vec<&Rational> = inv.real_divisors.iter().map(|d| &d.root).collect();
        roots.sort();
        roots.dedup();
        roots.len() >= 3
    }
}

/// Decide whether the algebra of the pencil is an Einstein nilradical. The
/// common kernel (abelian factor) does not matter.
pub fn classify(inv: &PencilInvariants) -> Verdict {
    if is_generic(inv) {
        classify_generic(inv)
    } else {
        classify_subsingular(inv)
    }
}

fn classify_generic(inv: &PencilInvariants) -> Verdict {
    let u = inv.real_divisors.len();
    let w = inv.complex_divisors.len();
    let mut v = Verdict {
        is_einstein: false,
        case: VerdictCase::Generic,
        labeling: None,
        s1: None,
        s2: None,
        failed_condition: None,
        witness_hint: None,
    };
    let a_i = inv.real_divisors.iter().all(|d| d.power == 1) && inv.complex_divisors.iter().all(|d| d.power == 1);
    // the most frequent root value
    let mut worst: Option<(Rational, usize)> = None;
    for d in &inv.real_divisors {
        let m = inv.real_divisors.iter().filter(|e| e.root == d.root).count();
        let better = match &worst {
            None => true,
            Some((r, wm)) => m > *wm || (m == *wm && d.root < *r),
        };
        if better {
            worst = Some((d.root.clone(), m));
        }
    }
    let a_ii_fails = worst.as_ref().map(|(_, m)| 2 * m >= u + 2 * w);
    if !a_i {
        v.failed_condition = Some(FailedCondition::AI);
    } else if a_ii_fails == Some(true) {
        v.failed_condition = Some(FailedCondition::AIi);
        let (root, multiplicity) = worst.expect("some root");
        v.witness_hint = Some(WitnessHint { root, multiplicity });
    } else {
        v.is_einstein = true;
    }
    v
}

fn classify_subsingular(inv: &PencilInvariants) -> Verdict {
    let lab = subsingular_labeling(&inv.real_divisors);
    let s1v = s1(&lab);
    let s2v = s2(&lab, &inv.minimal_indices);
    let failed = if lab.group2.iter().any(|d| d.power > 1) {
        Some(FailedCondition::BNilpotentL)
    } else if s1v.is_zero() {
        if lab.group1.iter().all(|d| d.power == 1) {
            None
        } else {
            Some(FailedCondition::BA)
        }
    } else if s1v.is_negative() {
        Some(FailedCondition::BA)
    } else {
        let bound = rat(2) * &s2v / &s1v;
        if inv.minimal_indices.iter().any(|&k| rat(2 * (k * k) as i64) >= bound) {
            Some(FailedCondition::BBK)
        } else if lab
            .group1
            .iter()
            .any(|d| rat(((d.power * d.power + 1) / 2) as i64) >= bound)
        {
            Some(FailedCondition::BBL)
        } else {
            None
        }
    };
    Verdict {
        is_einstein: failed.is_none(),
        case: VerdictCase::Subsingular,
        labeling: Some(lab),
        s1: Some(s1v),
        s2: Some(s2v),
        failed_condition: failed,
        witness_hint: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::CanonicalSpec;
    use crate::pencil::ComplexDivisor;
    use alloc::vec;
    use proptest::prelude::*;

    fn inv(roots: &[(i64, usize)], k: &[usize]) -> PencilInvariants {
        CanonicalSpec::real(&roots.iter().map(|&(r, l)| (rat(r), l)).collect::<Vec<_>>())
            .with_indices(k)
            .to_invariants()
    }

    #[test]
    fn generic_examples() {
        let v = classify(&inv(&[(0, 1), (1, 1), (2, 1)], &[]));
        assert!(v.is_einstein);
        assert_eq!(v.case, VerdictCase::Generic);
        let v = classify(&inv(&[(0, 1), (0, 1), (0, 1), (1, 1), (2, 1)], &[]));
        assert!(!v.is_einstein);
        assert_eq!(v.failed_condition, Some(FailedCondition::AIi));
        assert_eq!(v.witness_hint, Some(WitnessHint { root: rat(0), multiplicity: 3 }));
        let v = classify(&inv(&[(0, 2), (1, 1), (2, 1)], &[]));
        assert_eq!(v.failed_condition, Some(FailedCondition::AI));
        // complex divisors count towards w
        let mut i = inv(&[(0, 1), (0, 1)], &[]);
        i.complex_divisors.push(ComplexDivisor {
            mu: rat(0),
            nu_sq: rat(1),
            power: 1,
        });
        assert_eq!(classify(&i).case, VerdictCase::Generic);
        // 2 < u/2 + w = 2 fails
        assert_eq!(classify(&i).failed_condition, Some(FailedCondition::AIi));
        i.real_divisors[1].root = rat(1);
        assert!(classify(&i).is_einstein);
    }

    #[test]
    fn subsingular_examples() {
        let v = classify(&inv(&[], &[3, 1]));
        assert!(v.is_einstein);
        assert_eq!(v.case, VerdictCase::Subsingular);
        assert_eq!(v.s1, Some(rat(0)));

        let v = classify(&inv(&[(4, 2)], &[1]));
        assert!(v.is_einstein);
        assert_eq!((v.s1.clone().unwrap(), v.s2.clone().unwrap()), (rat(2), rat(5)));

        let v = classify(&inv(&[(0, 1), (0, 1), (0, 1), (1, 1)], &[]));
        assert_eq!(v.case, VerdictCase::Subsingular);
        let lab = v.labeling.clone().unwrap();
        assert_eq!((lab.u1(), lab.u2()), (3, 1));
        assert!(v.is_einstein);

        let v = classify(&inv(&[(0, 1), (1, 2)], &[]));
        assert_eq!(v.labeling.as_ref().unwrap().root1(), Some(&rat(1)));
        assert!(v.is_einstein, "{:?}", v);

        let v = classify(&inv(&[(0, 2), (1, 2)], &[]));
        assert_eq!(v.failed_condition, Some(FailedCondition::BNilpotentL));

        let v = classify(&inv(&[(0, 3)], &[]));
        // S1 = 3, S2 = 1 + 57/6, bound 7; [(9+1)/2] = 5 < 7
        assert!(v.is_einstein);
        let v = classify(&inv(&[(0, 1)], &[4]));
        // S1 = 1, S2 = 1 + 1/2 + 30, bound 63, 2k² = 32
        assert!(v.is_einstein);
        let v = classify(&inv(&[(0, 1), (0, 1), (0, 1), (0, 1), (0, 1)], &[2]));
        // S1 = 5, S2 = 1 + 5/2 + 5 = 17/2, bound 17/5, 2k² = 8
        assert_eq!(v.failed_condition, Some(FailedCondition::BBK));
        let v = classify(&inv(&[(0, 2), (1, 1), (1, 1), (1, 1)], &[]));
        // lex order prefers the l = 2 group, S1 = 2 - 3 < 0
        assert_eq!(v.failed_condition, Some(FailedCondition::BA));
        let v = classify(&inv(&[(0, 2), (1, 1), (1, 1)], &[]));
        assert_eq!(v.failed_condition, Some(FailedCondition::BA));
    }

    #[test]
    fn boundary_is_not_einstein() {
        // group1 = {1, 1}, k = [1]: S1 = 2, S2 = 3, bound 3 > 2k² = 2
        assert!(classify(&inv(&[(0, 1), (0, 1)], &[1])).is_einstein);
        // group1 = {1 x 4}, k = [1]: S1 = 4, S2 = 4, bound 2 = 2k²
        let v = classify(&inv(&[(0, 1), (0, 1), (0, 1), (0, 1)], &[1]));
        assert_eq!(v.failed_condition, Some(FailedCondition::BBK));
        // multiplicity exactly u/2 + w
        let v = classify(&inv(&[(0, 1), (0, 1), (1, 1), (2, 1)], &[]));
        assert_eq!(v.failed_condition, Some(FailedCondition::AIi));
    }

    fn arb_spec() -> impl Strategy<Value = (Vec<(i64, usize)>, Vec<usize>)> {
        (
            proptest::collection::vec((0i64..4, 1usize..4), 0..6),
            proptest::collection::vec(1usize..4, 0..3),
        )
    }

    proptest! {
        #[test]
        fn invariant_under_permutation_and_relabeling(
            (roots, k) in arb_spec(),
            seed in 0u64..1000,
            a in 1i64..5,
            b in -5i64..5,
        ) {
            let base = classify(&inv(&roots, &k));
            let mut permuted = roots.clone();
            let n = permuted.len();
            if n > 1 {
                permuted.rotate_left((seed as usize) % n);
                permuted.reverse();
            }
            // injective affine substitution of root values
            let moved: Vec<(i64, usize)> = permuted.iter().map(|&(r, l)| (a * r + b, l)).collect();
            let other = classify(&inv(&moved, &k));
            prop_assert_eq!(base.is_einstein, other.is_einstein);
            prop_assert_eq!(base.case, other.case);
            prop_assert_eq!(base.failed_condition, other.failed_condition);
            prop_assert_eq!(base.s1, other.s1);
        }
    }

    #[test]
    fn case3_needs_simple_complex_divisors() {
        let c = |n| ComplexDivisor {
            mu: rat(1),
            nu_sq: rat(2),
            power: n,
        };
        let mut i = inv(&[], &[1]);
        i.complex_divisors = vec![c(1), c(1)];
        assert!(classify(&i).is_einstein);
        i.complex_divisors = vec![c(2)];
        assert!(!classify(&i).is_einstein);
    }
}
