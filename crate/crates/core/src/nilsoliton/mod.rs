//! Nilsoliton metrics: nice-basis solutions, the SL(2) minimization for the
//! generic case, degeneration witnesses, and explicit duals of Heisenberg
//! algebras. Every construction ends in a residual certificate.

mod case1;
mod dual;
mod nice;
mod simplex;
mod sl2;

pub use case1::{assemble_case1_metric, degeneration_witness, rep_matrix, witness_curve, Witness};
pub use dual::{construct_dual_heisenberg, dual_heisenberg_radii, free_plus_abelian, DualHeisenbergRadii};
pub use nice::{
    alpha_closed_form_case2, build_nice_y, case2_spec, exact_scales, nice_brackets, nice_metric, solve_alpha, solve_alpha_with,
    NiceBasisSolution,
};
pub use simplex::feasible_nonnegative;
pub use sl2::{d_h, log_f, sl2_minimize, Sl2Data, Sl2Outcome, Sl2State};

use alloc::format;
use alloc::string::String;

use crate::algebra::{MetricData, TwoStepAlgebra};
use crate::arith::{Mat, RatMatrix, Rational};
use crate::canonical::{synthesize, CanonicalSpec};
use crate::classifier::{classify, VerdictCase};
use crate::error::{Error, Result};
use crate::pencil::PencilInvariants;
use crate::pre_einstein::{eigenvalue_type_of, EigenvalueType};

pub const DEFAULT_CERT_TOL: f64 = 1e-8;

/// A metric together with the evidence that it is nilsoliton:
/// `ric = C id + Φ` with `Φ` a derivation, up to the stated residuals.
#[derive(Clone, Debug)]
pub struct NilsolitonCertificate {
    pub metric: MetricData,
    pub c: f64,
    /// In an orthonormal frame of the metric.
    pub phi: Mat<f64>,
    /// Exact `(C, Φ)` in the algebra's basis when the metric is exact.
    pub exact: Option<(Rational, RatMatrix)>,
    pub ricci_residual: f64,
    pub derivation_residual: f64,
    pub tol: f64,
    pub eigenvalue_type: Option<EigenvalueType>,
}

impl NilsolitonCertificate {
    pub fn is_certified(&self) -> bool {
        self.c < 0.0 && self.ricci_residual <= self.tol && self.derivation_residual <= self.tol
    }

    pub fn into_result(self) -> Result<Self> {
        if self.is_certified() {
            Ok(self)
        } else {
            Err(Error::NotCertified(self.ricci_residual.max(self.derivation_residual)))
        }
    }
}

/// Evaluate a metric: the decomposition of its Ricci operator and how far
/// `Φ` is from a derivation.
pub fn certify(n: &TwoStepAlgebra, g: &MetricData, tol: f64) -> Result<NilsolitonCertificate> {
    let r = n.nilsoliton_residual(g)?;
    let jt = n.orthonormal_matrices(g)?;
    let derivation_residual = TwoStepAlgebra::derivation_defect_f64(&jt, &r.phi);
    let mut cert = NilsolitonCertificate {
        metric: g.clone(),
        c: r.c,
        phi: r.phi,
        exact: r.exact,
        ricci_residual: r.residual,
        derivation_residual,
        tol,
        eigenvalue_type: None,
    };
    if cert.is_certified() {
        cert.eigenvalue_type = eigenvalue_type_of(&cert.phi, 1e-7).ok();
    }
    Ok(cert)
}

/// What the dispatcher produced for a pencil.
#[derive(Clone, Debug)]
pub struct NilsolitonReport {
    pub case: VerdictCase,
    pub is_einstein: bool,
    /// Canonical algebra the metric lives on.
    pub spec: CanonicalSpec,
    pub algebra: TwoStepAlgebra,
    pub nice: Option<NiceBasisSolution>,
    pub sl2: Option<Sl2State>,
    pub certificate: Option<NilsolitonCertificate>,
}

/// Options for [`nilsoliton_for`].
#[derive(Clone, Copy, Debug)]
pub struct NilsolitonOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub cert_tol: f64,
}

impl Default for NilsolitonOptions {
    fn default() -> Self {
        NilsolitonOptions {
            tol: 1e-12,
            max_iter: 500,
            cert_tol: DEFAULT_CERT_TOL,
        }
    }
}

/// Build and certify a nilsoliton metric on the canonical algebra with the
/// given invariants. Subsingular pencils use the nice basis of the
/// `x^l / y^l` form; the others use the SL(2) minimization.
pub fn nilsoliton_for(inv: &PencilInvariants, o: &NilsolitonOptions) -> Result<NilsolitonReport> {
    let verdict = classify(inv);
    match verdict.case {
        VerdictCase::Subsingular => {
            let mut spec = case2_spec(inv)?;
            spec.padding = inv.common_kernel_dim;
            let algebra = TwoStepAlgebra::from_pencil(&synthesize(&spec)?)?;
            let sol = nice_metric(&algebra)?;
            if sol.positive != verdict.is_einstein {
                return Err(Error::Internal(format!(
                    "nice-basis positivity {} disagrees with the classification",
                    sol.positive
                )));
            }
            let exact = exact_scales(&sol)
                .map(|g| certify(&algebra, &MetricData::ExactDiagonal(g), o.cert_tol))
                .transpose()?
                .filter(|c| c.exact.is_some() && c.is_certified());
            let certificate = match &sol.s {
                _ if exact.is_some() => exact,
                Some(s) => {
                    let g = MetricData::Diagonal(s.iter().map(|x| crate::fmath::exp(2.0 * x)).collect());
                    Some(certify(&algebra, &g, o.cert_tol)?.into_result()?)
                }
                None => None,
            };
            Ok(NilsolitonReport {
                case: verdict.case,
                is_einstein: sol.positive,
                spec,
                algebra,
                nice: Some(sol),
                sl2: None,
                certificate,
            })
        }
        VerdictCase::Generic => {
            let spec = CanonicalSpec::from_invariants(inv);
            let algebra = TwoStepAlgebra::from_pencil(&synthesize(&spec)?)?;
            let mut report = NilsolitonReport {
                case: verdict.case,
                is_einstein: verdict.is_einstein,
                spec,
                algebra,
                nice: None,
                sl2: None,
                certificate: None,
            };
            if !verdict.is_einstein {
                return Ok(report);
            }
            match sl2_minimize(inv, o.tol, o.max_iter)? {
                Sl2Outcome::Minimum(state) => {
                    let cert = assemble_case1_metric(inv, &state, o.cert_tol)?;
                    report.sl2 = Some(state);
                    report.certificate = Some(cert);
                    Ok(report)
                }
                Sl2Outcome::NoMinimum(_) => Err(Error::Internal(String::from(
                    "no critical point although condition (A)(ii) holds",
                ))),
            }
        }
    }
}
