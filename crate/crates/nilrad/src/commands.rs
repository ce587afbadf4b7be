use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nilrad_core::algebra::TwoStepAlgebra;
use nilrad_core::arith::RatMatrix;
use nilrad_core::canonical::{synthesize, synthesize_affine, CanonicalSpec};
use nilrad_core::classifier::{classify, VerdictCase};
use nilrad_core::nilsoliton::{certify, degeneration_witness, nilsoliton_for, NilsolitonCertificate, NilsolitonOptions};
use nilrad_core::pencil::{compute_invariants_with, InvariantOptions, Mode, PencilInvariants};
use nilrad_core::pre_einstein::{case1_pre_einstein, eigenvalue_type_exact, solve_pre_einstein, PreEinsteinDerivation};
use nilrad_core::{CaseTag, Error};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::json::{
    f64_rows, parse_input, rat_rows, rat_str, AlgebraJson, Input, InvariantsJson, MetricJson, PencilJson, SpecJson,
    VerifyJson,
};
use crate::sample::{run_sample, SampleArgs};

#[derive(Debug, Parser)]
#[command(name = "nilrad", version, about = "Einstein nilradicals of type (2, q)")]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
    /// Factorization mode for the invariant polynomials.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    /// Certificate tolerance for nilsoliton residuals.
    #[arg(long, global = true, default_value_t = nilrad_core::nilsoliton::DEFAULT_CERT_TOL)]
    pub tol: f64,
    /// Iteration cap for the SL(2) minimization.
    #[arg(long = "max-iter", global = true, default_value_t = 500)]
    pub max_iter: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Numeric,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Numeric => Mode::Numeric,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Reduced elementary divisors and minimal indices of a pencil.
    Invariants(InputArg),
    /// Einstein nilradical decision with the condition trace.
    Classify(InputArg),
    /// Pre-Einstein derivation.
    Preeinstein(InputArg),
    /// Build and certify a nilsoliton metric.
    Nilsoliton(InputArg),
    /// Check a given metric: `{"algebra": .., "metric": ..}`.
    Verify(InputArg),
    /// Dual algebra of type (D - p, q).
    Dual(InputArg),
    /// Pencil with the given canonical spec.
    Synth(InputArg),
    /// Degeneration witness for a non-Einstein pencil.
    Witness(InputArg),
    /// Classify random integer pencils in bulk.
    Sample(SampleArgs),
}

#[derive(Debug, Args)]
pub struct InputArg {
    /// File path, `-` for standard input, or inline JSON.
    pub input: String,
}

fn read_input(s: &str) -> Result<Value, CliError> {
    let text = if s.trim_start().starts_with('{') {
        s.to_string()
    } else if s == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        std::fs::read_to_string(s)?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Malformed(e.to_string()))
}

impl Cli {
    fn validate(&self) -> Result<(), CliError> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(CliError::Malformed(format!("--tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(CliError::Malformed("--max-iter must be positive".into()));
        }
        Ok(())
    }

    fn nilsoliton_options(&self) -> NilsolitonOptions {
        NilsolitonOptions {
            max_iter: self.max_iter,
            cert_tol: self.tol,
            ..Default::default()
        }
    }

    fn invariants_of(&self, input: &Input) -> Result<PencilInvariants, CliError> {
        match input {
            Input::Pencil(p) => {
                let opts = InvariantOptions {
                    mode: self.mode.into(),
                    ..Default::default()
                };
                let inv = compute_invariants_with(p, &opts)?;
                Ok(own_variables(inv))
            }
            Input::Spec(spec) => {
                synthesize(spec)?;
                Ok(spec.to_invariants())
            }
            Input::Algebra(n) if n.p() == 2 => self.invariants_of(&Input::Pencil(n.pencil()?)),
            Input::Algebra(n) => Err(CliError::Malformed(format!(
                "pencil invariants need a two-dimensional center, got p = {}",
                n.p()
            ))),
        }
    }
}

/// Express the divisors in the pencil's own variables when that keeps them
/// finite.
fn own_variables(inv: PencilInvariants) -> PencilInvariants {
    let Some(vi) = inv.variable_change.inverse() else {
        return inv;
    };
    match inv.transform(&vi) {
        Ok(mut back) => {
            back.variable_change = RatMatrix::identity(2);
            back.real_divisors.sort();
            back.complex_divisors.sort();
            back
        }
        Err(_) => inv,
    }
}

fn algebra_of(input: &Input) -> Result<TwoStepAlgebra, CliError> {
    Ok(match input {
        Input::Pencil(p) => TwoStepAlgebra::from_pencil(p)?,
        Input::Algebra(n) => n.clone(),
        Input::Spec(s) => TwoStepAlgebra::from_pencil(&synthesize(s)?)?,
    })
}

fn spectrum_json(pe: &PreEinsteinDerivation) -> Value {
    json!({
        "diagonal": pe.diagonal().iter().map(rat_str).collect::<Vec<_>>(),
        "eigenvalues": pe.eigenvalues.iter().map(|(v, m)| json!({"value": rat_str(v), "multiplicity": m})).collect::<Vec<_>>(),
        "sigma": pe.sigma.as_ref().map(rat_str),
        "eigenvalue_type": eigenvalue_type_exact(&pe.eigenvalues).ok().map(|t| t.to_string()),
    })
}

pub fn certificate_json(cert: &NilsolitonCertificate) -> Value {
    json!({
        "certified": cert.is_certified(),
        "metric": MetricJson::from_metric(&cert.metric),
        "c": cert.c,
        "phi": f64_rows(&cert.phi),
        "exact": cert.exact.as_ref().map(|(c, phi)| json!({"c": rat_str(c), "phi": rat_rows(phi)})),
        "ricci_residual": cert.ricci_residual,
        "derivation_residual": cert.derivation_residual,
        "tol": cert.tol,
        "eigenvalue_type": cert.eigenvalue_type.as_ref().map(|t| t.to_string()),
    })
}

fn case_name(c: VerdictCase) -> &'static str {
    match c {
        VerdictCase::Generic => "Generic",
        VerdictCase::Subsingular => "Subsingular",
    }
}

/// Run one command and return its JSON report.
pub fn execute(cli: &Cli) -> Result<Value, CliError> {
    cli.validate()?;
    let load = |a: &InputArg| read_input(&a.input).and_then(parse_input);
    match &cli.verb {
        Verb::Invariants(a) => {
            let inv = cli.invariants_of(&load(a)?)?;
            Ok(serde_json::to_value(InvariantsJson::from_invariants(&inv)).expect("serializable"))
        }
        Verb::Classify(a) => {
            let inv = cli.invariants_of(&load(a)?)?;
            let v = classify(&inv);
            let group = |g: &[nilrad_core::pencil::RealDivisor]| {
                g.iter().map(|d| json!({"root": rat_str(&d.root), "power": d.power})).collect::<Vec<_>>()
            };
            Ok(json!({
                "is_einstein": v.is_einstein,
                "case": case_name(v.case),
                "case_tag": inv.case_tag.name(),
                "s1": v.s1.as_ref().map(rat_str),
                "s2": v.s2.as_ref().map(rat_str),
                "failed_condition": v.failed_condition.map(|f| f.name()),
                "labeling": v.labeling.as_ref().map(|l| json!({"group1": group(&l.group1), "group2": group(&l.group2)})),
                "witness_hint": v.witness_hint.as_ref().map(|h| json!({"root": rat_str(&h.root), "multiplicity": h.multiplicity})),
                "invariants": InvariantsJson::from_invariants(&inv),
            }))
        }
        Verb::Preeinstein(a) => {
            let input = load(a)?;
            if let Input::Algebra(n) = &input {
                let pe = solve_pre_einstein(n)?;
                return Ok(json!({"basis": "input", "solved": spectrum_json(&pe), "closed_form": Value::Null}));
            }
            let inv = cli.invariants_of(&input)?;
            let spec = CanonicalSpec::from_invariants(&inv);
            let n = TwoStepAlgebra::from_pencil(&synthesize(&spec)?)?;
            let solved = solve_pre_einstein(&n)?;
            let closed = if inv.case_tag == CaseTag::Case1 && inv.common_kernel_dim == 0 {
                Some(case1_pre_einstein(&inv)?)
            } else {
                None
            };
            if let Some(c) = &closed {
                if c.eigenvalues != solved.eigenvalues {
                    return Err(Error::Internal("closed form and solved pre-Einstein derivation differ".into()).into());
                }
            }
            Ok(json!({
                "basis": "canonical",
                "spec": SpecJson::from_spec(&spec),
                "solved": spectrum_json(&solved),
                "closed_form": closed.as_ref().map(spectrum_json),
            }))
        }
        Verb::Nilsoliton(a) => {
            let inv = cli.invariants_of(&load(a)?)?;
            let r = nilsoliton_for(&inv, &cli.nilsoliton_options())?;
            Ok(json!({
                "case": case_name(r.case),
                "case_tag": inv.case_tag.name(),
                "is_einstein": r.is_einstein,
                "spec": SpecJson::from_spec(&r.spec),
                "algebra": AlgebraJson::from_algebra(&r.algebra),
                "nice": r.nice.as_ref().map(|s| json!({
                    "alpha": s.alpha.iter().map(rat_str).collect::<Vec<_>>(),
                    "positive": s.positive,
                    "unique": s.unique,
                    "log_scales": s.s,
                })),
                "sl2": r.sl2.as_ref().map(|s| json!({
                    "s": f64_rows(&s.s),
                    "log_f": s.log_f,
                    "gradient": s.grad,
                    "iterations": s.iterations,
                })),
                "certificate": r.certificate.as_ref().map(certificate_json),
            }))
        }
        Verb::Verify(a) => {
            let v: VerifyJson =
                serde_json::from_value(read_input(&a.input)?).map_err(|e| CliError::Malformed(e.to_string()))?;
            let n = algebra_of(&parse_input(v.algebra)?)?;
            let g = v.metric.to_metric()?;
            let cert = certify(&n, &g, cli.tol)?;
            Ok(certificate_json(&cert))
        }
        Verb::Dual(a) => {
            let n = algebra_of(&load(a)?)?;
            Ok(serde_json::to_value(AlgebraJson::from_algebra(&n.dualize()?)).expect("serializable"))
        }
        Verb::Synth(a) => match load(a)? {
            Input::Spec(spec) => {
                let p = synthesize_affine(&spec)?;
                Ok(serde_json::to_value(PencilJson::from_pencil(&p)).expect("serializable"))
            }
            _ => Err(CliError::Malformed("synth takes a spec (real, complex, minimal_indices)".into())),
        },
        Verb::Witness(a) => {
            let inv = cli.invariants_of(&load(a)?)?;
            match degeneration_witness(&inv) {
                Ok(w) => {
                    let limit = nilrad_core::SkewPencil::new(w.j1.clone(), w.j2.clone())?;
                    Ok(json!({
                        "witness": true,
                        "failed_condition": w.failed.name(),
                        "spec": SpecJson::from_spec(&w.spec),
                        "limit": PencilJson::from_pencil(&limit),
                        "limit_invariants": InvariantsJson::from_invariants(&w.invariants),
                    }))
                }
                Err(Error::ConditionHolds) => Ok(json!({"witness": false, "reason": "condition (A)(ii) holds"})),
                Err(Error::WrongCase { .. }) if classify(&inv).case == VerdictCase::Subsingular => Ok(json!({
                    "witness": false,
                    "reason": "subsingular pencils are decided by the nice-basis criterion",
                })),
                Err(e) => Err(e.into()),
            }
        }
        Verb::Sample(s) => run_sample(s, cli),
    }
}
