//! Constructors for the standard operators.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spec::{
    validate_spec, CommutingFamily, DiscreteLaw, EigenForm, KernelForm, KernelSpec, MeasureSpace, OperatorSpec,
};

/// n-dimensional Cesàro operator: `Φ ≡ 1` on `[0,1]^n`, `A(u) = diag[u]`, `p = 2`.
pub fn builtin_cesaro(n: usize) -> OperatorSpec {
    assert!(n >= 1, "dimension must be at least 1");
    OperatorSpec {
        dimension: n,
        exponent_p: 2.0,
        measure: MeasureSpace::unit_box(n),
        kernel: KernelSpec::new(KernelForm::Cesaro { scale: 1.0 }),
        family: CommutingFamily::diagonal((0..n).map(|i| EigenForm::Coord { index: i, power: 1.0 }).collect()),
    }
}

/// `(C, k)` mean: `Φ(u) = k (1 - u)^{k-1}` on `[0, 1]`, `A(u) = u`.
pub fn builtin_ck(k: f64) -> Result<OperatorSpec> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Invalid(format!("(C,k) needs k > 0, got {k}")));
    }
    Ok(OperatorSpec {
        dimension: 1,
        exponent_p: 2.0,
        measure: MeasureSpace::unit_box(1),
        kernel: KernelSpec::new(KernelForm::Ck { k }),
        family: CommutingFamily::diagonal(vec![EigenForm::Coord { index: 0, power: 1.0 }]),
    })
}

/// Discrete operator `Σ_{k=0}^{K} Φ(k) f(A(k)x)` with unit weights.
/// Rejected when the weighted sum `Σ |Φ(k)| det A(k)^{-1/p}` is not finite
/// or exceeds the validation cap.
pub fn builtin_discrete(weights: Vec<Complex64>, family: CommutingFamily, p: f64) -> Result<OperatorSpec> {
    let count = weights.len();
    let spec = OperatorSpec::new(p, MeasureSpace::counting(count), KernelSpec::new(KernelForm::Table(weights)), family)?;
    let report = validate_spec(&spec)?;
    if !report.l1_bound.is_finite() || report.l1_bound >= crate::spec::L1_CAP {
        return Err(Error::Invalid(format!("weighted kernel sum {} exceeds the cap", report.l1_bound)));
    }
    Ok(spec)
}

/// `Φ(k) = ratio^k`, `A(k) = base^k` in one dimension on `{0, …, K}`.
pub fn geometric(ratio: f64, base: f64, k_max: usize, p: f64) -> OperatorSpec {
    OperatorSpec {
        dimension: 1,
        exponent_p: p,
        measure: MeasureSpace::counting(k_max + 1),
        kernel: KernelSpec::new(KernelForm::Discrete(DiscreteLaw::Geometric { ratio, scale: 1.0 })),
        family: CommutingFamily::diagonal(vec![EigenForm::Geometric(base)]),
    }
}

/// `Φ(k) = 2^{-k}`, `A(k) = 4^k`, `K = 40`, `p = 2`.
pub fn geometric_spec() -> OperatorSpec {
    geometric(0.5, 4.0, 40, 2.0)
}

/// `Φ = δ_0`, `A ≡ I`.
pub fn identity_spec(n: usize) -> OperatorSpec {
    OperatorSpec {
        dimension: n,
        exponent_p: 2.0,
        measure: MeasureSpace::counting(1),
        kernel: KernelSpec::new(KernelForm::Discrete(DiscreteLaw::Delta)),
        family: CommutingFamily::diagonal(vec![EigenForm::Constant(1.0); n]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::NodeOptions;

    #[test]
    fn ck_rejects_nonpositive_order() {
        assert!(builtin_ck(0.0).is_err());
        assert!(builtin_ck(-1.0).is_err());
    }

    #[test]
    fn ck_one_matches_cesaro_nodes() {
        let a = builtin_ck(1.0).unwrap().nodes(&NodeOptions::default()).unwrap();
        let b = builtin_cesaro(1).nodes(&NodeOptions::default()).unwrap();
        assert_eq!(a.len(), b.len());
        for i in 0..a.len() {
            assert!((a.mass[i] - b.mass[i]).norm() < 1e-15);
            assert_eq!(a.eig(i), b.eig(i));
        }
    }

    #[test]
    fn divergent_discrete_is_rejected() {
        let family = CommutingFamily::diagonal(vec![EigenForm::Table(vec![1e-300, 1.0])]);
        let w = vec![Complex64::new(1.0, 0.0); 2];
        assert!(builtin_discrete(w, family, 1.0).is_err());
    }

    #[test]
    fn identity_has_unit_mass() {
        let set = identity_spec(2).nodes(&NodeOptions::default()).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.mass[0], Complex64::new(1.0, 0.0));
        assert_eq!(set.eig(0), &[1.0, 1.0]);
    }
}
