//! JSON formats. Rationals are strings (`"3"`, `"-1/2"`, `"0.25"`; plain
//! integers are accepted on input), matrices are arrays of rows.

use nilrad_core::algebra::{MetricData, TwoStepAlgebra};
use nilrad_core::arith::{parse_rational, Mat, RatMatrix, Rational};
use nilrad_core::canonical::CanonicalSpec;
use nilrad_core::pencil::{ComplexDivisor, PencilInvariants, RealDivisor, SkewPencil};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RatIn {
    Text(String),
    Int(i64),
}

impl RatIn {
    fn parse(&self) -> Result<Rational, CliError> {
        match self {
            RatIn::Int(n) => Ok(Rational::from_integer((*n).into())),
            RatIn::Text(s) => parse_rational(s).ok_or_else(|| CliError::Malformed(format!("not a rational: {:?}", s))),
        }
    }
}

pub fn rat_str(r: &Rational) -> String {
    r.to_string()
}

pub fn rat_rows(m: &RatMatrix) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(rat_str).collect()).collect()
}

pub fn f64_rows(m: &Mat<f64>) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn parse_matrix(rows: &[Vec<RatIn>]) -> Result<RatMatrix, CliError> {
    let parsed = rows
        .iter()
        .map(|r| r.iter().map(RatIn::parse).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    if parsed.is_empty() {
        return Err(CliError::Malformed("empty matrix".into()));
    }
    RatMatrix::from_rows(parsed).map_err(|e| CliError::Malformed(e.to_string()))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PencilJson {
    pub j1: Vec<Vec<RatIn>>,
    pub j2: Vec<Vec<RatIn>>,
}

impl PencilJson {
    pub fn from_pencil(p: &SkewPencil) -> Self {
        let conv = |m: &RatMatrix| rat_rows(m).into_iter().map(|r| r.into_iter().map(RatIn::Text).collect()).collect();
        PencilJson {
            j1: conv(p.j1()),
            j2: conv(p.j2()),
        }
    }

    pub fn to_pencil(&self) -> Result<SkewPencil, CliError> {
        SkewPencil::new(parse_matrix(&self.j1)?, parse_matrix(&self.j2)?).map_err(CliError::Core)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraJson {
    /// `J_1 .. J_p`, each `q x q` skew-symmetric.
    pub matrices: Vec<Vec<Vec<RatIn>>>,
}

impl AlgebraJson {
    pub fn from_algebra(n: &TwoStepAlgebra) -> Self {
        AlgebraJson {
            matrices: n
                .matrices()
                .iter()
                .map(|m| rat_rows(m).into_iter().map(|r| r.into_iter().map(RatIn::Text).collect()).collect())
                .collect(),
        }
    }

    pub fn to_algebra(&self) -> Result<TwoStepAlgebra, CliError> {
        let mats = self.matrices.iter().map(|m| parse_matrix(m)).collect::<Result<Vec<_>, _>>()?;
        if mats.is_empty() {
            return Err(CliError::Malformed("an algebra needs at least one matrix".into()));
        }
        TwoStepAlgebra::from_tuple(mats).map_err(CliError::Core)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RealJson {
    pub root: RatIn,
    pub power: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexJson {
    pub mu: RatIn,
    pub nu_sq: RatIn,
    pub power: usize,
}

/// Canonical spec: divisors `(x + root y)^power`,
/// `((x + mu y)^2 + nu_sq y^2)^power`, minimal indices and a zero block.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SpecJson {
    #[serde(default)]
    pub real: Vec<RealJson>,
    #[serde(default)]
    pub complex: Vec<ComplexJson>,
    #[serde(default)]
    pub minimal_indices: Vec<usize>,
    #[serde(default, alias = "common_kernel_dim")]
    pub padding: usize,
}

impl SpecJson {
    pub fn from_spec(s: &CanonicalSpec) -> Self {
        SpecJson {
            real: s
                .real_divisors
                .iter()
                .map(|d| RealJson {
                    root: RatIn::Text(rat_str(&d.root)),
                    power: d.power,
                })
                .collect(),
            complex: s
                .complex_divisors
                .iter()
                .map(|d| ComplexJson {
                    mu: RatIn::Text(rat_str(&d.mu)),
                    nu_sq: RatIn::Text(rat_str(&d.nu_sq)),
                    power: d.power,
                })
                .collect(),
            minimal_indices: s.minimal_indices.clone(),
            padding: s.padding,
        }
    }

    pub fn to_spec(&self) -> Result<CanonicalSpec, CliError> {
        let real = self
            .real
            .iter()
            .map(|d| {
                Ok(RealDivisor {
                    root: d.root.parse()?,
                    power: d.power,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let complex = self
            .complex
            .iter()
            .map(|d| {
                Ok(ComplexDivisor {
                    mu: d.mu.parse()?,
                    nu_sq: d.nu_sq.parse()?,
                    power: d.power,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let mut spec = CanonicalSpec::new(real, complex, self.minimal_indices.clone());
        spec.padding = self.padding;
        Ok(spec)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantsJson {
    pub real: Vec<RealJson>,
    pub complex: Vec<ComplexJson>,
    pub minimal_indices: Vec<usize>,
    pub common_kernel_dim: usize,
    pub case_tag: &'static str,
    pub exact: bool,
    /// The divisors belong to `P(V (x, y)ᵀ)`; the identity unless the
    /// pencil has infinite divisors.
    pub variable_change: Vec<Vec<String>>,
}

impl InvariantsJson {
    pub fn from_invariants(inv: &PencilInvariants) -> Self {
        let spec = SpecJson::from_spec(&CanonicalSpec::from_invariants(inv));
        InvariantsJson {
            real: spec.real,
            complex: spec.complex,
            minimal_indices: inv.minimal_indices.clone(),
            common_kernel_dim: inv.common_kernel_dim,
            case_tag: inv.case_tag.name(),
            exact: inv.exact,
            variable_change: rat_rows(&inv.variable_change),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetricJson {
    /// Exact squared lengths of the basis vectors.
    ExactDiagonal { entries: Vec<RatIn> },
    Diagonal { entries: Vec<f64> },
    /// Full Gram matrix in the basis `X_1..X_q, Z_1..Z_p`.
    Gram { matrix: Vec<Vec<f64>> },
}

impl MetricJson {
    pub fn from_metric(g: &MetricData) -> Self {
        match g {
            MetricData::ExactDiagonal(v) => MetricJson::ExactDiagonal {
                entries: v.iter().map(|x| RatIn::Text(rat_str(x))).collect(),
            },
            MetricData::Diagonal(v) => MetricJson::Diagonal { entries: v.clone() },
            MetricData::Full(m) => MetricJson::Gram { matrix: f64_rows(m) },
        }
    }

    pub fn to_metric(&self) -> Result<MetricData, CliError> {
        Ok(match self {
            MetricJson::ExactDiagonal { entries } => {
                MetricData::ExactDiagonal(entries.iter().map(RatIn::parse).collect::<Result<_, _>>()?)
            }
            MetricJson::Diagonal { entries } => MetricData::Diagonal(entries.clone()),
            MetricJson::Gram { matrix } => {
                MetricData::Full(Mat::from_rows(matrix.clone()).map_err(|e| CliError::Malformed(e.to_string()))?)
            }
        })
    }
}

/// What an input document describes, detected from its keys.
pub enum Input {
    Pencil(SkewPencil),
    Algebra(TwoStepAlgebra),
    Spec(CanonicalSpec),
}

fn from_value<T: serde::de::DeserializeOwned>(v: Value) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::Malformed(e.to_string()))
}

pub fn parse_input(v: Value) -> Result<Input, CliError> {
    let Value::Object(map) = &v else {
        return Err(CliError::Malformed("input must be a JSON object".into()));
    };
    if map.contains_key("j1") {
        Ok(Input::Pencil(from_value::<PencilJson>(v)?.to_pencil()?))
    } else if map.contains_key("matrices") {
        Ok(Input::Algebra(from_value::<AlgebraJson>(v)?.to_algebra()?))
    } else if ["real", "complex", "minimal_indices"].iter().any(|k| map.contains_key(*k)) {
        Ok(Input::Spec(from_value::<SpecJson>(v)?.to_spec()?))
    } else {
        Err(CliError::Malformed(
            "expected a pencil (j1, j2), an algebra (matrices) or a spec (real, complex, minimal_indices)".into(),
        ))
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct VerifyJson {
    pub algebra: Value,
    pub metric: MetricJson,
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn detects_input_kind() {
        let p = json!({"j1": [[0, 1], [-1, 0]], "j2": [[0, "1/2"], ["-1/2", 0]]});
        assert!(matches!(parse_input(p), Err(CliError::Core(_))));
        let a = json!({"matrices": [[[0, 1, 0], [-1, 0, 0], [0, 0, 0]]]});
        assert!(matches!(parse_input(a), Ok(Input::Algebra(_))));
        let s = json!({"minimal_indices": [1], "common_kernel_dim": 2});
        match parse_input(s) {
            Ok(Input::Spec(spec)) => assert_eq!(spec.padding, 2),
            _ => panic!("expected a spec"),
        }
        assert!(matches!(parse_input(json!([1])), Err(CliError::Malformed(_))));
        assert!(matches!(parse_input(json!({"x": 1})), Err(CliError::Malformed(_))));
    }

    #[test]
    fn rationals_in_both_spellings() {
        let r: Vec<RatIn> = serde_json::from_value(json!([3, "-1/2", "0.25"])).unwrap();
        let parsed: Vec<String> = r.iter().map(|x| rat_str(&x.parse().unwrap())).collect();
        assert_eq!(parsed, ["3", "-1/2", "1/4"]);
        assert!(RatIn::Text("1/0".into()).parse().is_err());
    }

    #[test]
    fn spec_round_trip() {
        let s = json!({"real": [{"root": "2/3", "power": 2}],
                       "complex": [{"mu": 0, "nu_sq": 1, "power": 1}],
                       "minimal_indices": [2, 1]});
        let spec = from_value::<SpecJson>(s).unwrap().to_spec().unwrap();
        let back = serde_json::to_value(SpecJson::from_spec(&spec)).unwrap();
        assert_eq!(back["real"], json!([{"root": "2/3", "power": 2}]));
        assert_eq!(back["complex"], json!([{"mu": "0", "nu_sq": "1", "power": 1}]));
    }

    #[test]
    fn metric_kinds() {
        let m: MetricJson = serde_json::from_value(json!({"kind": "exact_diagonal", "entries": [4, "1/2"]})).unwrap();
        assert!(matches!(m.to_metric().unwrap(), MetricData::ExactDiagonal(v) if v.len() == 2));
        let g: MetricJson = serde_json::from_value(json!({"kind": "gram", "matrix": [[1.0, 0.0], [0.0]]})).unwrap();
        assert!(g.to_metric().is_err());
    }
}
