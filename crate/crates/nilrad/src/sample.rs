//! Bulk classification of random integer pencils. Entries of `J1, J2` are
//! uniform in `{-range..range}`; a smoke distribution, not a natural measure
//! on pencils.

use std::collections::BTreeMap;

use clap::Args;
use nilrad_core::arith::{rat, RatMatrix};
use nilrad_core::classifier::classify;
use nilrad_core::nilsoliton::nilsoliton_for;
use nilrad_core::pencil::{compute_invariants, Mode, SkewPencil};
use nilrad_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::commands::{Cli, ModeArg};
use crate::error::CliError;

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Size of the pencil matrices.
    #[arg(long)]
    pub q: usize,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Entries are drawn from `-range..=range`.
    #[arg(long, default_value_t = 5)]
    pub range: i64,
}

#[derive(Debug, Default)]
struct Trial {
    skipped: bool,
    numeric_fallback: bool,
    failure: Option<String>,
    case_tag: &'static str,
    is_einstein: bool,
    failed_condition: Option<&'static str>,
    eigenvalue_type: Option<String>,
}

/// Trial `index` only depends on `(seed, index)`.
fn random_pencil(q: usize, range: i64, seed: u64, index: u64) -> SkewPencil {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut skew = || {
        let mut m = RatMatrix::zeros(q, q);
        for a in 0..q {
            for b in a + 1..q {
                let v = rng.gen_range(-range..=range);
                m[(a, b)] = rat(v);
                m[(b, a)] = rat(-v);
            }
        }
        m
    };
    let j1 = skew();
    let j2 = skew();
    SkewPencil::new_unchecked(j1, j2).expect("square skew matrices")
}

fn trial(cli: &Cli, args: &SampleArgs, index: u64) -> Trial {
    let p = random_pencil(args.q, args.range, cli.seed, index);
    if !p.independent() {
        return Trial {
            skipped: true,
            ..Default::default()
        };
    }
    let mut out = Trial::default();
    let inv = match compute_invariants(&p, cli.mode.into()) {
        Ok(inv) => inv,
        Err(Error::Unsupported(_)) if cli.mode == ModeArg::Exact => {
            out.numeric_fallback = true;
            match compute_invariants(&p, Mode::Numeric) {
                Ok(inv) => inv,
                Err(e) => {
                    out.failure = Some(e.to_string());
                    return out;
                }
            }
        }
        Err(e) => {
            out.failure = Some(e.to_string());
            return out;
        }
    };
    let v = classify(&inv);
    out.case_tag = inv.case_tag.name();
    out.is_einstein = v.is_einstein;
    out.failed_condition = v.failed_condition.map(|f| f.name());
    if v.is_einstein {
        let opts = nilrad_core::nilsoliton::NilsolitonOptions {
            max_iter: cli.max_iter,
            cert_tol: cli.tol,
            ..Default::default()
        };
        match nilsoliton_for(&inv, &opts) {
            Ok(r) => out.eigenvalue_type = r.certificate.and_then(|c| c.eigenvalue_type).map(|t| t.to_string()),
            Err(e) => out.failure = Some(e.to_string()),
        }
    }
    out
}

fn fraction(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        n as f64 / d as f64
    }
}

pub fn run_sample(args: &SampleArgs, cli: &Cli) -> Result<Value, CliError> {
    if args.q < 3 || args.q > nilrad_core::pencil::DEFAULT_MAX_Q {
        return Err(CliError::Malformed(format!(
            "--q must lie in 3..={}, got {}",
            nilrad_core::pencil::DEFAULT_MAX_Q,
            args.q
        )));
    }
    if args.range < 1 {
        return Err(CliError::Malformed("--range must be positive".into()));
    }
    let trials: Vec<Trial> = (0..args.count as u64).into_par_iter().map(|i| trial(cli, args, i)).collect();

    let used: Vec<&Trial> = trials.iter().filter(|t| !t.skipped && t.failure.is_none()).collect();
    let einstein = used.iter().filter(|t| t.is_einstein).count();
    let mut cases: BTreeMap<&str, usize> = BTreeMap::new();
    let mut failed: BTreeMap<&str, usize> = BTreeMap::new();
    let mut types: BTreeMap<String, usize> = BTreeMap::new();
    for t in &used {
        *cases.entry(t.case_tag).or_default() += 1;
        if let Some(f) = t.failed_condition {
            *failed.entry(f).or_default() += 1;
        }
        if let Some(ty) = &t.eigenvalue_type {
            *types.entry(ty.clone()).or_default() += 1;
        }
    }
    let generic_type = format!("(1, 2; {}, 2)", args.q);
    let with_generic = types.get(&generic_type).copied().unwrap_or(0);
    let failures: Vec<Value> = trials
        .iter()
        .enumerate()
        .filter_map(|(i, t)| t.failure.as_ref().map(|m| json!({"index": i, "error": m})))
        .collect();
    Ok(json!({
        "q": args.q,
        "count": args.count,
        "seed": cli.seed,
        "classified": used.len(),
        "skipped_dependent": trials.iter().filter(|t| t.skipped).count(),
        "numeric_fallbacks": trials.iter().filter(|t| t.numeric_fallback).count(),
        "einstein": einstein,
        "fraction_einstein": fraction(einstein, used.len()),
        "case_tags": cases,
        "failed_conditions": failed,
        "eigenvalue_types": types,
        "generic_type": generic_type,
        "fraction_generic_type": fraction(with_generic, used.len()),
        "failures": failures,
    }))
}
