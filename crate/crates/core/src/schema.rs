//! JSON operator-spec documents.
//!
//! ```json
//! {
//!   "dimension": 1,
//!   "exponent_p": 2.0,
//!   "measure": {"kind": "box", "lower": [0.0], "upper": [1.0], "gauss_order": 12},
//!   "kernel": {"form": "ck", "k": 2.0},
//!   "family": {"C": [1.0], "eigenvalue_forms": [{"coord": 0, "power": 1.0}]}
//! }
//! ```
//!
//! Measures: `box` with optional `gauss_order`, `grading_ratio`,
//! `grading_depth`; `discrete` with either `count` (atoms `0..count` with
//! unit weights) or explicit `atoms` and `weights`.
//!
//! Kernels: `cesaro` (`scale`), `ck` (`k`), `discrete` with `law` one of
//! `geometric` (`ratio`, `scale`), `inverse_factorial`, `delta`, and `table`
//! (`values`, each a number or `[re, im]`). Every kernel accepts
//! `conjugate`, `det_power` and `nonnegative`.
//!
//! Family: `C` row-major (identity when omitted) and one eigenvalue form per
//! axis: `{"coord": i, "power": a}`, `{"constant": c}`, `{"geometric": λ}`
//! (value `λ^k` at atom `k`) or `{"table": [...]}`. Alternatively `matrices`
//! lists one row-major symmetric matrix per discrete atom; they are jointly
//! diagonalized on load.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::BoxRule;
use crate::spec::{CommutingFamily, DiscreteLaw, EigenForm, KernelForm, KernelSpec, MeasureSpace, OperatorSpec};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDoc {
    dimension: usize,
    #[serde(default = "two")]
    exponent_p: f64,
    measure: MeasureDoc,
    kernel: KernelDoc,
    family: FamilyDoc,
}

fn two() -> f64 {
    2.0
}

fn is_false(b: &bool) -> bool {
    !*b
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct MeasureDoc {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    atoms: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lower: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    upper: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gauss_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grading_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grading_depth: Option<f64>,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
#[serde(untagged)]
enum ComplexDoc {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexDoc> for Complex64 {
    fn from(c: ComplexDoc) -> Self {
        match c {
            ComplexDoc::Real(x) => Complex64::new(x, 0.0),
            ComplexDoc::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

impl From<Complex64> for ComplexDoc {
    fn from(c: Complex64) -> Self {
        if c.im == 0.0 {
            ComplexDoc::Real(c.re)
        } else {
            ComplexDoc::Pair([c.re, c.im])
        }
    }
}

#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct KernelDoc {
    form: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    law: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<ComplexDoc>>,
    #[serde(default, skip_serializing_if = "is_false")]
    conjugate: bool,
    #[serde(default, skip_serializing_if = "is_zero")]
    det_power: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nonnegative: Option<bool>,
}

#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct EigenDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coord: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    power: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    constant: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    geometric: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    table: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FamilyDoc {
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    c: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eigenvalue_forms: Option<Vec<EigenDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrices: Option<Vec<Vec<f64>>>,
}

fn need<T>(v: Option<T>, what: &str) -> Result<T> {
    v.ok_or_else(|| Error::Malformed(format!("missing field `{what}`")))
}

impl MeasureDoc {
    fn into_measure(self) -> Result<MeasureSpace> {
        match self.kind.as_str() {
            "discrete" => match (self.count, self.atoms) {
                (Some(count), None) => {
                    if self.weights.is_some() {
                        return Err(Error::Malformed("`count` and `weights` are exclusive".into()));
                    }
                    Ok(MeasureSpace::counting(count))
                }
                (None, Some(atoms)) => {
                    let weights = self.weights.unwrap_or_else(|| vec![1.0; atoms.len()]);
                    Ok(MeasureSpace::Discrete { atoms, weights })
                }
                _ => Err(Error::Malformed("discrete measure needs exactly one of `count` or `atoms`".into())),
            },
            "box" => {
                let d = BoxRule::default();
                Ok(MeasureSpace::Box {
                    lower: need(self.lower, "measure.lower")?,
                    upper: need(self.upper, "measure.upper")?,
                    rule: BoxRule {
                        gauss_order: self.gauss_order.unwrap_or(d.gauss_order),
                        grading_ratio: self.grading_ratio.unwrap_or(d.grading_ratio),
                        grading_depth: self.grading_depth.unwrap_or(d.grading_depth),
                    },
                })
            }
            other => Err(Error::Malformed(format!("unknown measure kind `{other}`"))),
        }
    }

    fn from_measure(m: &MeasureSpace) -> Self {
        match m {
            MeasureSpace::Discrete { atoms, weights } => {
                if m.is_counting() {
                    MeasureDoc { kind: "discrete".into(), count: Some(atoms.len()), ..Default::default() }
                } else {
                    MeasureDoc {
                        kind: "discrete".into(),
                        atoms: Some(atoms.clone()),
                        weights: Some(weights.clone()),
                        ..Default::default()
                    }
                }
            }
            MeasureSpace::Box { lower, upper, rule } => MeasureDoc {
                kind: "box".into(),
                lower: Some(lower.clone()),
                upper: Some(upper.clone()),
                gauss_order: Some(rule.gauss_order),
                grading_ratio: Some(rule.grading_ratio),
                grading_depth: Some(rule.grading_depth),
                ..Default::default()
            },
        }
    }
}

impl KernelDoc {
    fn into_kernel(self) -> Result<KernelSpec> {
        let form = match self.form.as_str() {
            "cesaro" => KernelForm::Cesaro { scale: self.scale.unwrap_or(1.0) },
            "ck" => KernelForm::Ck { k: need(self.k, "kernel.k")? },
            "discrete" => {
                let law = need(self.law, "kernel.law")?;
                KernelForm::Discrete(match law.as_str() {
                    "geometric" => DiscreteLaw::Geometric {
                        ratio: need(self.ratio, "kernel.ratio")?,
                        scale: self.scale.unwrap_or(1.0),
                    },
                    "inverse_factorial" => DiscreteLaw::InverseFactorial,
                    "delta" => DiscreteLaw::Delta,
                    other => return Err(Error::Malformed(format!("unknown discrete law `{other}`"))),
                })
            }
            "table" => KernelForm::Table(need(self.values, "kernel.values")?.into_iter().map(Into::into).collect()),
            other => return Err(Error::Malformed(format!("unknown kernel form `{other}`"))),
        };
        let mut kernel = KernelSpec::new(form);
        kernel.conjugate = self.conjugate;
        kernel.det_power = self.det_power;
        if let Some(flag) = self.nonnegative {
            kernel.nonnegative = flag;
        }
        Ok(kernel)
    }

    fn from_kernel(k: &KernelSpec) -> Self {
        let mut doc = KernelDoc {
            conjugate: k.conjugate,
            det_power: k.det_power,
            nonnegative: Some(k.nonnegative),
            ..Default::default()
        };
        match &k.form {
            KernelForm::Cesaro { scale } => {
                doc.form = "cesaro".into();
                doc.scale = Some(*scale);
            }
            KernelForm::Ck { k } => {
                doc.form = "ck".into();
                doc.k = Some(*k);
            }
            KernelForm::Discrete(law) => {
                doc.form = "discrete".into();
                match law {
                    DiscreteLaw::Geometric { ratio, scale } => {
                        doc.law = Some("geometric".into());
                        doc.ratio = Some(*ratio);
                        doc.scale = Some(*scale);
                    }
                    DiscreteLaw::InverseFactorial => doc.law = Some("inverse_factorial".into()),
                    DiscreteLaw::Delta => doc.law = Some("delta".into()),
                }
            }
            KernelForm::Table(v) => {
                doc.form = "table".into();
                doc.values = Some(v.iter().map(|c| (*c).into()).collect());
            }
        }
        doc
    }
}

impl EigenDoc {
    fn into_form(self) -> Result<EigenForm> {
        let set = [self.coord.is_some(), self.constant.is_some(), self.geometric.is_some(), self.table.is_some()]
            .iter()
            .filter(|b| **b)
            .count();
        if set != 1 {
            return Err(Error::Malformed(
                "eigenvalue form needs exactly one of `coord`, `constant`, `geometric`, `table`".into(),
            ));
        }
        if self.power.is_some() && self.coord.is_none() {
            return Err(Error::Malformed("`power` only applies to `coord` forms".into()));
        }
        Ok(if let Some(index) = self.coord {
            EigenForm::Coord { index, power: self.power.unwrap_or(1.0) }
        } else if let Some(c) = self.constant {
            EigenForm::Constant(c)
        } else if let Some(b) = self.geometric {
            EigenForm::Geometric(b)
        } else {
            EigenForm::Table(self.table.unwrap_or_default())
        })
    }

    fn from_form(e: &EigenForm) -> Self {
        match e {
            EigenForm::Coord { index, power } => EigenDoc { coord: Some(*index), power: Some(*power), ..Default::default() },
            EigenForm::Constant(c) => EigenDoc { constant: Some(*c), ..Default::default() },
            EigenForm::Geometric(b) => EigenDoc { geometric: Some(*b), ..Default::default() },
            EigenForm::Table(v) => EigenDoc { table: Some(v.clone()), ..Default::default() },
        }
    }
}

impl FamilyDoc {
    fn into_family(self, n: usize) -> Result<CommutingFamily> {
        match (self.eigenvalue_forms, self.matrices) {
            (Some(forms), None) => {
                let eigen = forms.into_iter().map(EigenDoc::into_form).collect::<Result<Vec<_>>>()?;
                Ok(match self.c {
                    Some(basis) => CommutingFamily::new(basis, eigen),
                    None => CommutingFamily::diagonal(eigen),
                })
            }
            (None, Some(mats)) => {
                if self.c.is_some() {
                    return Err(Error::Malformed("`C` is derived when `matrices` is given".into()));
                }
                CommutingFamily::from_matrices(n, &mats)
            }
            _ => Err(Error::Malformed("family needs exactly one of `eigenvalue_forms` or `matrices`".into())),
        }
    }
}

/// Parses and shape-checks a spec document. Invariant violations beyond
/// shape are left to [`crate::validate_spec`].
pub fn spec_from_json(text: &str) -> Result<OperatorSpec> {
    let doc: SpecDoc = serde_json::from_str(text)?;
    let spec = OperatorSpec {
        dimension: doc.dimension,
        exponent_p: doc.exponent_p,
        measure: doc.measure.into_measure()?,
        kernel: doc.kernel.into_kernel()?,
        family: doc.family.into_family(doc.dimension)?,
    };
    spec.check_shapes()?;
    Ok(spec)
}

pub fn spec_to_json(spec: &OperatorSpec) -> String {
    let doc = SpecDoc {
        dimension: spec.dimension,
        exponent_p: spec.exponent_p,
        measure: MeasureDoc::from_measure(&spec.measure),
        kernel: KernelDoc::from_kernel(&spec.kernel),
        family: FamilyDoc {
            c: Some(spec.family.basis.clone()),
            eigenvalue_forms: Some(spec.family.eigen.iter().map(EigenDoc::from_form).collect()),
            matrices: None,
        },
    };
    serde_json::to_string_pretty(&doc).expect("spec documents always serialize")
}

pub fn load_spec(path: impl AsRef<std::path::Path>) -> Result<OperatorSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Malformed(format!("cannot read {}: {e}", path.display())))?;
    spec_from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{builtin_cesaro, builtin_ck, geometric_spec, identity_spec};

    #[test]
    fn builtins_round_trip() {
        for spec in [builtin_cesaro(3), builtin_ck(0.5).unwrap(), geometric_spec(), identity_spec(2)] {
            let back = spec_from_json(&spec_to_json(&spec)).unwrap();
            assert_eq!(back, spec);
        }
    }

    #[test]
    fn minimal_document() {
        let text = r#"{"dimension":1,"measure":{"kind":"discrete","count":3},
            "kernel":{"form":"table","values":[1.0,[0.0,2.0],-1]},
            "family":{"eigenvalue_forms":[{"geometric":2.0}]}}"#;
        let spec = spec_from_json(text).unwrap();
        assert_eq!(spec.exponent_p, 2.0);
        assert!(!spec.kernel.nonnegative);
        let KernelForm::Table(v) = &spec.kernel.form else { panic!() };
        assert_eq!(v[1], Complex64::new(0.0, 2.0));
    }

    #[test]
    fn matrices_are_diagonalized() {
        let text = r#"{"dimension":2,"measure":{"kind":"discrete","count":2},
            "kernel":{"form":"discrete","law":"delta"},
            "family":{"matrices":[[2.0,1.0,1.0,2.0],[5.0,-1.0,-1.0,5.0]]}}"#;
        let spec = spec_from_json(text).unwrap();
        assert!(spec.family.orthogonality_defect() < 1e-12);
        let mut e: Vec<f64> = spec.family.eigen.iter().map(|f| f.eval(&[0.0], 0)).collect();
        e.sort_by(f64::total_cmp);
        assert!((e[0] - 1.0).abs() < 1e-12 && (e[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn malformed_documents_are_rejected() {
        let bad = [
            r#"{"dimension":1,"measure":{"kind":"sphere"},"kernel":{"form":"cesaro"},"family":{"eigenvalue_forms":[{"coord":0}]}}"#,
            r#"{"dimension":1,"measure":{"kind":"box","lower":[0],"upper":[1]},"kernel":{"form":"ck"},"family":{"eigenvalue_forms":[{"coord":0}]}}"#,
            r#"{"dimension":2,"measure":{"kind":"box","lower":[0],"upper":[1]},"kernel":{"form":"cesaro"},"family":{"eigenvalue_forms":[{"coord":0}]}}"#,
            r#"{"dimension":1,"measure":{"kind":"box","lower":[0],"upper":[1]},"kernel":{"form":"cesaro"},"family":{"eigenvalue_forms":[{"coord":0,"constant":1}]}}"#,
        ];
        for text in bad {
            assert!(spec_from_json(text).is_err(), "{text}");
        }
    }
}
