//! Symbols `φ(s) = ∫ Φ(u) det A(u)^{-1/p} a(u)^{-is} dμ(u)`.
//!
//! A [`Symbol`] is either one of the closed forms (Cesàro boxes, `(C,k)`
//! means, finite discrete sums, constants), a quadrature of an arbitrary
//! spec, or a pointwise conjugate or product of other symbols. Evaluation
//! is not memoized.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gamma::gamma_ratio;
use crate::spec::{EigenForm, KernelForm, MeasureSpace, NodeOptions, NodeSet, OperatorSpec, NODES_PER_PERIOD};

/// Node budget for one symbol quadrature.
pub const DEFAULT_BUDGET: usize = 4_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum SymbolForm {
    /// `scale · ∏_j 1/(offset_j − i rate_j s_j)`.
    Cesaro { scale: f64, offsets: Vec<f64>, rates: Vec<f64> },
    /// `Γ(k+1) Γ(w) / Γ(k+w)` with `w = offset − i rate s`.
    Ck { k: f64, offset: f64, rate: f64 },
    /// `Σ_k c_k exp(−i Σ_j s_j L_kj)`, `L` row-major with `n` entries per term.
    /// `generator` holds `ln λ_j` when `a_j(k) = λ_j^k` on `{0, …, K}`.
    Discrete { coeffs: Vec<Complex64>, log_eig: Vec<f64>, generator: Option<Vec<f64>> },
    Constant(Complex64),
    Quadrature(Box<OperatorSpec>),
    Conjugate(Box<Symbol>),
    Product(Box<Symbol>, Box<Symbol>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Symbol {
    pub dim: usize,
    pub p: f64,
    pub form: SymbolForm,
}

impl Symbol {
    /// Closed form of the spec when one is recognized, quadrature otherwise.
    pub fn from_spec(spec: &OperatorSpec) -> Result<Self> {
        Ok(match closed_form(spec)? {
            Some(form) => Self { dim: spec.dimension, p: spec.p(), form },
            None => Self::quadrature(spec),
        })
    }

    pub fn quadrature(spec: &OperatorSpec) -> Self {
        Self { dim: spec.dimension, p: spec.p(), form: SymbolForm::Quadrature(Box::new(spec.clone())) }
    }

    /// Symbol of the standard `n`-dimensional Cesàro operator on L².
    pub fn cesaro(n: usize) -> Self {
        Self { dim: n, p: 2.0, form: SymbolForm::Cesaro { scale: 1.0, offsets: vec![0.5; n], rates: vec![1.0; n] } }
    }

    /// Symbol of the `(C,k)` mean on L².
    pub fn ck(k: f64) -> Self {
        Self { dim: 1, p: 2.0, form: SymbolForm::Ck { k, offset: 0.5, rate: 1.0 } }
    }

    pub fn constant(dim: usize, value: Complex64) -> Self {
        Self { dim, p: 2.0, form: SymbolForm::Constant(value) }
    }

    pub fn is_closed_form(&self) -> bool {
        match &self.form {
            SymbolForm::Quadrature(_) => false,
            SymbolForm::Conjugate(a) => a.is_closed_form(),
            SymbolForm::Product(a, b) => a.is_closed_form() && b.is_closed_form(),
            _ => true,
        }
    }

    pub fn eval(&self, s: &[f64]) -> Result<Complex64> {
        if s.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: s.len() });
        }
        self.eval_unchecked(s)
    }

    fn eval_unchecked(&self, s: &[f64]) -> Result<Complex64> {
        let i = Complex64::i();
        Ok(match &self.form {
            SymbolForm::Cesaro { scale, offsets, rates } => {
                let mut v = Complex64::new(*scale, 0.0);
                for ((o, r), sj) in offsets.iter().zip(rates).zip(s) {
                    v /= *o - i * (r * sj);
                }
                v
            }
            SymbolForm::Ck { k, offset, rate } => {
                let w = *offset - i * (rate * s[0]);
                gamma_ratio(w, w + k)? * crate::gamma::real_gamma(k + 1.0)
            }
            SymbolForm::Discrete { coeffs, log_eig, .. } => {
                let n = self.dim;
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| {
                        let phase: f64 = (0..n).map(|j| s[j] * log_eig[k * n + j]).sum();
                        c * Complex64::from_polar(1.0, -phase)
                    })
                    .sum()
            }
            SymbolForm::Constant(c) => *c,
            SymbolForm::Quadrature(spec) => symbol_quadrature(spec, s)?,
            SymbolForm::Conjugate(a) => a.eval_unchecked(s)?.conj(),
            SymbolForm::Product(a, b) => a.eval_unchecked(s)? * b.eval_unchecked(s)?,
        })
    }

    /// Values at many points, evaluated in parallel.
    pub fn eval_many(&self, points: &[Vec<f64>]) -> Result<Vec<Complex64>> {
        points.par_iter().map(|s| self.eval(s)).collect()
    }

    /// The kernel is nonnegative, so `|φ|` peaks at `s = 0`.
    pub fn peaks_at_origin(&self) -> bool {
        match &self.form {
            SymbolForm::Cesaro { scale, offsets, .. } => *scale >= 0.0 && offsets.iter().all(|o| *o > 0.0),
            SymbolForm::Ck { k, offset, .. } => *k > 0.0 && *offset > 0.0,
            SymbolForm::Discrete { coeffs, .. } => coeffs.iter().all(|c| c.im == 0.0 && c.re >= 0.0),
            SymbolForm::Constant(_) => true,
            SymbolForm::Quadrature(spec) => spec.kernel.nonnegative && !conjugate_matters(&spec.kernel),
            SymbolForm::Conjugate(a) => a.peaks_at_origin(),
            SymbolForm::Product(a, b) => a.peaks_at_origin() && b.peaks_at_origin(),
        }
    }

    /// `|φ(s)| → 0` as `|s| → ∞`, known analytically.
    pub fn decays(&self) -> bool {
        match &self.form {
            SymbolForm::Cesaro { rates, .. } => rates.iter().all(|r| *r != 0.0),
            SymbolForm::Ck { rate, .. } => *rate != 0.0,
            SymbolForm::Conjugate(a) => a.decays(),
            SymbolForm::Product(a, b) => {
                // A decaying factor times a bounded one still decays.
                a.decays() || b.decays()
            }
            _ => false,
        }
    }

    /// `ln λ_j` and the coefficients of `F` when `φ(s) = F(exp(−i Σ s_j ln λ_j))`.
    pub fn power_series(&self) -> Option<(Vec<f64>, Vec<Complex64>)> {
        match &self.form {
            SymbolForm::Discrete { coeffs, generator: Some(g), .. } => Some((g.clone(), coeffs.clone())),
            _ => None,
        }
    }

    /// `φ` depends on `s` only through one angle `θ = Σ s_j ln λ_j`; returns
    /// the direction `ln λ` and `F` on the unit circle as a function of `θ`.
    pub fn circle_form(&self) -> Option<(Vec<f64>, CircleFn<'_>)> {
        match &self.form {
            SymbolForm::Constant(c) => Some((vec![0.0; self.dim], CircleFn::Constant(*c))),
            SymbolForm::Discrete { coeffs, generator: Some(g), .. } => Some((g.clone(), CircleFn::Series(coeffs))),
            SymbolForm::Conjugate(a) => {
                let (g, f) = a.circle_form()?;
                Some((g, CircleFn::Conjugate(Box::new(f))))
            }
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        match &self.form {
            SymbolForm::Cesaro { .. } => format!("cesaro(n={})", self.dim),
            SymbolForm::Ck { k, .. } => format!("ck(k={k})"),
            SymbolForm::Discrete { coeffs, .. } => format!("discrete({} terms)", coeffs.len()),
            SymbolForm::Constant(c) => format!("constant({c})"),
            SymbolForm::Quadrature(_) => "quadrature".into(),
            SymbolForm::Conjugate(a) => format!("conj({})", a.describe()),
            SymbolForm::Product(a, b) => format!("{}·{}", a.describe(), b.describe()),
        }
    }
}

/// `F(e^{−iθ})` for the circle form of a symbol.
pub enum CircleFn<'a> {
    Constant(Complex64),
    Series(&'a [Complex64]),
    Conjugate(Box<CircleFn<'a>>),
}

impl CircleFn<'_> {
    pub fn eval(&self, theta: f64) -> Complex64 {
        match self {
            CircleFn::Constant(c) => *c,
            CircleFn::Series(c) => {
                let z = Complex64::from_polar(1.0, -theta);
                c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, ck| acc * z + ck)
            }
            CircleFn::Conjugate(f) => f.eval(theta).conj(),
        }
    }
}

/// Conjugation changes a complex kernel; it is a no-op on real ones.
fn conjugate_matters(kernel: &crate::spec::KernelSpec) -> bool {
    kernel.conjugate && matches!(&kernel.form, KernelForm::Table(v) if v.iter().any(|c| c.im != 0.0))
}

fn unit_interval(spec: &OperatorSpec) -> bool {
    matches!(&spec.measure, MeasureSpace::Box { lower, upper, .. } if lower == &[0.0] && upper == &[1.0])
}

fn closed_form(spec: &OperatorSpec) -> Result<Option<SymbolForm>> {
    let p = spec.p();
    if spec.measure.is_discrete() {
        let set = spec.nodes(&NodeOptions::default())?;
        return discrete_form(spec, &set).map(Some);
    }
    let Some(factors) = spec.factorize() else {
        return Ok(None);
    };
    let mut scale = 1.0;
    let mut offsets = Vec::with_capacity(factors.len());
    let mut rates = Vec::with_capacity(factors.len());
    for f in &factors {
        let EigenForm::Coord { index: 0, power } = f.family.eigen[0] else {
            return Ok(None);
        };
        if !unit_interval(f) {
            return Ok(None);
        }
        let offset = 1.0 + power * (f.kernel.det_power - 1.0 / p);
        if offset <= 0.0 {
            return Ok(None);
        }
        match f.kernel.form {
            KernelForm::Cesaro { scale: c } => {
                scale *= c;
                offsets.push(offset);
                rates.push(power);
            }
            KernelForm::Ck { k } if factors.len() == 1 => return Ok(Some(SymbolForm::Ck { k, offset, rate: power })),
            _ => return Ok(None),
        }
    }
    Ok(Some(SymbolForm::Cesaro { scale, offsets, rates }))
}

fn discrete_form(spec: &OperatorSpec, set: &NodeSet) -> Result<SymbolForm> {
    let p = spec.p();
    let n = spec.dimension;
    let mut coeffs = Vec::with_capacity(set.len());
    let mut log_eig = Vec::with_capacity(set.len() * n);
    for i in 0..set.len() {
        let eig = set.eig(i);
        if eig.iter().any(|a| !(*a > 0.0)) {
            return Err(Error::Invalid(format!("eigenvalue {eig:?} at atom {i} is not positive")));
        }
        coeffs.push(set.mass[i] * set.det(i).powf(-1.0 / p));
        log_eig.extend(eig.iter().map(|a| a.ln()));
    }
    let generator = if spec.measure.is_counting() {
        spec.family.eigen.iter().map(|e| e.generator().map(f64::ln)).collect::<Option<Vec<_>>>()
    } else {
        None
    };
    Ok(SymbolForm::Discrete { coeffs, log_eig, generator })
}

fn weigh(set: &NodeSet, s: &[f64], p: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..set.len() {
        let m = set.mass[i];
        if m == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mut log_mod = 0.0;
        let mut phase = 0.0;
        for (a, sj) in set.eig(i).iter().zip(s) {
            let l = a.ln();
            log_mod -= l / p;
            phase -= sj * l;
        }
        acc += m * Complex64::from_polar(log_mod.exp(), phase);
    }
    acc
}

/// `φ(s)` by the spec's own quadrature with the default node budget.
pub fn symbol_quadrature(spec: &OperatorSpec, s: &[f64]) -> Result<Complex64> {
    symbol_quadrature_with(spec, s, DEFAULT_BUDGET)
}

/// `φ(s)` by quadrature, refusing when resolving the oscillation of
/// `a(u)^{-is}` needs more than `budget` nodes. The refusal carries the
/// difference between the two finest rules that fit the budget.
pub fn symbol_quadrature_with(spec: &OperatorSpec, s: &[f64], budget: usize) -> Result<Complex64> {
    let n = spec.dimension;
    if s.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: s.len() });
    }
    let p = spec.p();
    if let Some(factors) = spec.factorize().filter(|f| f.len() > 1) {
        return factors
            .iter()
            .zip(s)
            .map(|(f, sj)| symbol_quadrature_with(f, &[*sj], budget))
            .product();
    }
    let opts = NodeOptions { oscillation: Some(s), budget, ..Default::default() };
    match spec.nodes(&opts) {
        Ok(set) => Ok(weigh(&set, s, p)),
        Err(Error::RefinementFailure { s, required, budget, .. }) => {
            let base = spec.axis_rules();
            let mut per_period = NODES_PER_PERIOD;
            while per_period > 1e-6 && spec.refined_count(&base, &s, per_period) > budget {
                per_period *= 0.5;
            }
            let at = |pp: f64| {
                let mut rules = base.clone();
                spec.refine(&mut rules, &s, pp);
                weigh(&spec.nodes_from_rules(&rules), &s, p)
            };
            let error_estimate = (at(per_period) - at(0.5 * per_period)).norm();
            Err(Error::RefinementFailure { s, required, budget, error_estimate })
        }
        Err(e) => Err(e),
    }
}

/// The closed form; quadrature-backed symbols are refused.
pub fn symbol_closed_form(sym: &Symbol, s: &[f64]) -> Result<Complex64> {
    if !sym.is_closed_form() {
        return Err(Error::UnsupportedVariant(format!("{} has no closed form", sym.describe())));
    }
    sym.eval(s)
}

/// `φ̄`, the symbol of the L² adjoint.
pub fn adjoint_symbol(sym: &Symbol) -> Result<Symbol> {
    if sym.p != 2.0 {
        return Err(Error::RequiresL2(sym.p));
    }
    Ok(match &sym.form {
        SymbolForm::Conjugate(a) => (**a).clone(),
        _ => Symbol { dim: sym.dim, p: 2.0, form: SymbolForm::Conjugate(Box::new(sym.clone())) },
    })
}

/// Pointwise product `φψ`, the symbol of `H_1 H_2` on L².
pub fn product_symbol(a: &Symbol, b: &Symbol) -> Result<Symbol> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { expected: a.dim, found: b.dim });
    }
    for p in [a.p, b.p] {
        if p != 2.0 {
            return Err(Error::RequiresL2(p));
        }
    }
    Ok(Symbol { dim: a.dim, p: 2.0, form: SymbolForm::Product(Box::new(a.clone()), Box::new(b.clone())) })
}

/// Truncated infinite product
/// `∏_{l=1}^{L} l(k + l − 1/2 − is) / ((k + l)(l − 1/2 − is))` for the `(C,k)`
/// symbol. The tail contributes a relative error of order `1/L`.
pub fn ck_product(k: f64, s: f64, terms: usize) -> Complex64 {
    let w = Complex64::new(-0.5, -s);
    let mut acc = Complex64::new(1.0, 0.0);
    for l in 1..=terms {
        let l = l as f64;
        acc *= (w + k + l) * l / ((w + l) * (k + l));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{builtin_cesaro, builtin_ck, geometric_spec, identity_spec};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cesaro_quadrature_values() {
        let spec = builtin_cesaro(1);
        assert!((symbol_quadrature(&spec, &[0.0]).unwrap() - 2.0).norm() < 1e-12);
        assert!((symbol_quadrature(&spec, &[0.5]).unwrap() - c(1.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn geometric_quadrature_at_zero() {
        assert!((symbol_quadrature(&geometric_spec(), &[0.0]).unwrap() - 4.0 / 3.0).norm() < 1e-12);
    }

    #[test]
    fn ck_closed_values() {
        assert!((Symbol::ck(1.0).eval(&[0.0]).unwrap() - 2.0).norm() < 1e-13);
        assert!((Symbol::ck(2.0).eval(&[0.0]).unwrap() - 8.0 / 3.0).norm() < 1e-13);
    }

    #[test]
    fn geometric_closed_form_is_reciprocal_series() {
        let sym = Symbol::from_spec(&geometric_spec()).unwrap();
        for s in [-3.0, 0.1, 0.7, 5.0] {
            let z = Complex64::from_polar(1.0, -s * 4f64.ln());
            // K = 40 truncation of 1/(1 − z/4).
            let want = (Complex64::new(1.0, 0.0) - (z / 4.0).powu(41)) / (Complex64::new(1.0, 0.0) - z / 4.0);
            assert!((sym.eval(&[s]).unwrap() - want).norm() < 1e-14);
        }
    }

    #[test]
    fn spec_recognition() {
        assert_eq!(Symbol::from_spec(&builtin_cesaro(2)).unwrap(), Symbol::cesaro(2));
        assert_eq!(Symbol::from_spec(&builtin_ck(3.0).unwrap()).unwrap(), Symbol::ck(3.0));
        let adj = Symbol::from_spec(&builtin_cesaro(1).adjoint()).unwrap();
        for s in [-2.0, 0.0, 1.5] {
            let want = Complex64::new(1.0, 0.0) / c(0.5, s);
            assert!((adj.eval(&[s]).unwrap() - want).norm() < 1e-14);
        }
    }

    #[test]
    fn closed_matches_quadrature() {
        for spec in [builtin_cesaro(1), builtin_ck(0.5).unwrap(), builtin_ck(2.0).unwrap(), builtin_ck(3.0).unwrap()] {
            let sym = Symbol::from_spec(&spec).unwrap();
            for s in [-20.0, -7.3, 0.0, 0.25, 3.0, 19.9] {
                let a = sym.eval(&[s]).unwrap();
                let b = symbol_quadrature(&spec, &[s]).unwrap();
                assert!((a - b).norm() < 1e-9, "{} at {s}: {a} vs {b}", sym.describe());
            }
        }
    }

    #[test]
    fn adjoint_closed_matches_quadrature() {
        let spec = builtin_ck(0.5).unwrap();
        let adj = adjoint_symbol(&Symbol::from_spec(&spec).unwrap()).unwrap();
        for s in [-4.0, 0.3, 11.0] {
            let q = symbol_quadrature(&spec.adjoint(), &[s]).unwrap();
            assert!((adj.eval(&[s]).unwrap() - q).norm() < 1e-9);
        }
    }

    #[test]
    fn budget_refusal_reports_estimate() {
        let err = symbol_quadrature_with(&builtin_cesaro(1), &[500.0], 2000).unwrap_err();
        match err {
            Error::RefinementFailure { required, error_estimate, .. } => {
                assert!(required > 2000);
                assert!(error_estimate.is_finite() && error_estimate > 0.0);
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn closed_form_refuses_quadrature() {
        let sym = Symbol::quadrature(&builtin_cesaro(1));
        assert!(matches!(symbol_closed_form(&sym, &[0.0]), Err(Error::UnsupportedVariant(_))));
    }

    #[test]
    fn adjoint_and_product_rules() {
        let sym = Symbol::cesaro(1);
        let twice = adjoint_symbol(&adjoint_symbol(&sym).unwrap()).unwrap();
        assert_eq!(twice, sym);
        let one = Symbol::from_spec(&identity_spec(1)).unwrap();
        let prod = product_symbol(&sym, &one).unwrap();
        assert!((prod.eval(&[0.4]).unwrap() - sym.eval(&[0.4]).unwrap()).norm() < 1e-15);
        assert!(matches!(product_symbol(&sym, &Symbol::cesaro(2)), Err(Error::DimensionMismatch { .. })));
        let mut p3 = sym.clone();
        p3.p = 3.0;
        assert!(matches!(adjoint_symbol(&p3), Err(Error::RequiresL2(_))));
    }

    #[test]
    fn ck_infinite_product_converges() {
        for (k, s) in [(1.0, 0.0), (2.0, 1.5), (0.5, -3.0)] {
            let want = Symbol::ck(k).eval(&[s]).unwrap();
            let got = ck_product(k, s, 200_000);
            assert!((got - want).norm() / want.norm() < 1e-4, "k={k} s={s}");
        }
    }

    #[test]
    fn single_atom_unitary_symbol() {
        let lambda: f64 = 3.0;
        let set = crate::spec::OperatorSpec::new(
            2.0,
            MeasureSpace::counting(1),
            crate::spec::KernelSpec::new(KernelForm::Table(vec![c(lambda.sqrt(), 0.0)])),
            crate::spec::CommutingFamily::diagonal(vec![EigenForm::Constant(lambda)]),
        )
        .unwrap();
        let sym = Symbol::from_spec(&set).unwrap();
        for s in [0.0, 1.0, PI] {
            let v = sym.eval(&[s]).unwrap();
            assert!((v.norm() - 1.0).abs() < 1e-14);
        }
    }
}
