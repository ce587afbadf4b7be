use nilrad_core::arith::rat;
use nilrad_core::canonical::{random_equivalence, random_spec, synthesize, CanonicalSpec, RandomSpecOptions};
use nilrad_core::classifier::classify;
use nilrad_core::nilsoliton::{nilsoliton_for, NilsolitonOptions};
use nilrad_core::pencil::{compute_invariants, Mode};
use nilrad_core::pre_einstein::eigenvalue_type;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small() -> RandomSpecOptions {
    RandomSpecOptions {
        max_q: 10,
        allow_complex: true,
        allow_singular: true,
        max_power: 2,
    }
}

#[test]
fn disguised_pencils_get_certified_metrics() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut einstein, mut other) = (0, 0);
    for _ in 0..40 {
        let spec = random_spec(&mut rng, &small());
        let p = random_equivalence(&synthesize(&spec).unwrap(), rng.next_u64());
        let inv = compute_invariants(&p, Mode::Exact).unwrap();
        let verdict = classify(&inv);
        assert_eq!(verdict.is_einstein, classify(&spec.to_invariants()).is_einstein);
        let report = nilsoliton_for(&inv, &NilsolitonOptions::default()).unwrap();
        assert_eq!(report.is_einstein, verdict.is_einstein);
        match &report.certificate {
            Some(cert) => {
                assert!(cert.is_certified());
                assert!(cert.c < 0.0);
                einstein += 1;
            }
            None => {
                assert!(!report.is_einstein);
                other += 1;
            }
        }
    }
    assert!(einstein > 5 && other > 5, "{} / {}", einstein, other);
}

#[test]
fn numeric_mode_matches_exact_on_rational_roots() {
    let spec = CanonicalSpec::real(&[(rat(0), 1), (rat(2), 1), (rat(-3), 2)]).with_indices(&[1]);
    let p = random_equivalence(&synthesize(&spec).unwrap(), 9);
    let exact = compute_invariants(&p, Mode::Exact).unwrap();
    let numeric = compute_invariants(&p, Mode::Numeric).unwrap();
    assert!(!numeric.exact);
    assert_eq!(numeric.minimal_indices, exact.minimal_indices);
    let powers = |inv: &nilrad_core::PencilInvariants| {
        let mut v: Vec<usize> = inv.real_divisors.iter().map(|d| d.power).collect();
        v.sort();
        v
    };
    assert_eq!(powers(&numeric), powers(&exact));
    assert_eq!(classify(&numeric).is_einstein, classify(&exact).is_einstein);
}

#[test]
fn eigenvalue_type_of_generic_pencil() {
    // four simple roots, q = 8: Einstein derivation has type (1, 2; 8, 2)
    let spec = CanonicalSpec::real(&[(rat(0), 1), (rat(1), 1), (rat(-1), 1), (rat(3), 1)]);
    let report = nilsoliton_for(&spec.to_invariants(), &NilsolitonOptions::default()).unwrap();
    let cert = report.certificate.unwrap();
    let t = eigenvalue_type(&cert).unwrap();
    assert_eq!(t.lambdas, vec![1, 2]);
    assert_eq!(t.multiplicities, vec![8, 2]);
}
