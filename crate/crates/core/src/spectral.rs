//! Operator-level conclusions drawn from the symbol: norm, invertibility,
//! spectrum, classification, and the inverse of discrete operators.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spec::{CommutingFamily, KernelForm, KernelSpec, MeasureSpace, OperatorSpec};
use crate::symbol::{Symbol, SymbolForm};

/// Axis-aligned box of frequencies with a sampling density.
#[derive(Clone, Debug, PartialEq)]
pub struct SGrid {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Points per axis, endpoints included.
    pub points: usize,
}

impl SGrid {
    pub fn cube(dim: usize, lo: f64, hi: f64, points: usize) -> Self {
        Self { lower: vec![lo; dim], upper: vec![hi; dim], points: points.max(2) }
    }

    /// `201ⁿ` points on `[−40, 40]ⁿ`.
    pub fn default_for(dim: usize) -> Self {
        Self::cube(dim, -40.0, 40.0, 201)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    fn coord(&self, axis: usize, k: usize) -> f64 {
        let (a, b) = (self.lower[axis], self.upper[axis]);
        a + (b - a) * k as f64 / (self.points - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn index(&self, flat: usize) -> Vec<usize> {
        let mut rem = flat;
        let mut idx = vec![0; self.dim()];
        for j in (0..self.dim()).rev() {
            idx[j] = rem % self.points;
            rem /= self.points;
        }
        idx
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.index(flat).iter().enumerate().map(|(j, &k)| self.coord(j, k)).collect()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    fn on_boundary(&self, flat: usize) -> bool {
        self.index(flat).iter().any(|&k| k == 0 || k + 1 == self.points)
    }

    fn spacing(&self, axis: usize) -> f64 {
        (self.upper[axis] - self.lower[axis]) / (self.points - 1) as f64
    }
}

fn check_l2(sym: &Symbol) -> Result<()> {
    if sym.p != 2.0 {
        return Err(Error::RequiresL2(sym.p));
    }
    Ok(())
}

/// Golden-section search for a maximum of `g` on `[a, b]`.
fn golden_max<G: Fn(f64) -> f64>(g: G, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..iters {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    if gc > gd {
        (c, gc)
    } else {
        (d, gd)
    }
}

/// Grid search for the extreme of `sign · |φ|`, refined coordinatewise by
/// golden sections around the best grid point.
fn extreme(sym: &Symbol, grid: &SGrid, sign: f64, sweeps: usize) -> Result<(Vec<f64>, f64, bool)> {
    let values = sym.eval_many(&grid.points())?;
    let (best, _) = values
        .iter()
        .enumerate()
        .map(|(i, v)| (i, sign * v.norm()))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let boundary = grid.on_boundary(best);
    let mut s = grid.point(best);
    let mut val = sign * values[best].norm();
    for _ in 0..sweeps {
        for j in 0..grid.dim() {
            let h = grid.spacing(j);
            let (a, b) = ((s[j] - h).max(grid.lower[j]), (s[j] + h).min(grid.upper[j]));
            let g = |x: f64| {
                let mut p = s.clone();
                p[j] = x;
                sym.eval(&p).map_or(f64::NEG_INFINITY, |v| sign * v.norm())
            };
            let (x, gx) = golden_max(g, a, b, 60);
            if gx > val {
                s[j] = x;
                val = gx;
            }
        }
    }
    Ok((s, sign * val, boundary))
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub at: Vec<f64>,
    /// The maximum was found on the boundary of the search box.
    pub boundary: bool,
    /// `φ(0)` of a nonnegative kernel: exact, not a search result.
    pub exact: bool,
}

/// `sup |φ|`, the L² operator norm. Nonnegative kernels return `|φ(0)|`
/// directly; otherwise a grid search refined by golden sections.
pub fn operator_norm(sym: &Symbol, search: &SGrid, sweeps: usize) -> Result<NormEstimate> {
    check_l2(sym)?;
    if search.dim() != sym.dim {
        return Err(Error::DimensionMismatch { expected: sym.dim, found: search.dim() });
    }
    if sym.peaks_at_origin() {
        let at = vec![0.0; sym.dim];
        return Ok(NormEstimate { value: sym.eval(&at)?.norm(), at, boundary: false, exact: true });
    }
    if let Some((dir, f)) = sym.circle_form() {
        let (theta, value) = circle_extreme(&f, 1.0);
        return Ok(NormEstimate { value, at: point_on_direction(&dir, theta), boundary: false, exact: true });
    }
    let (at, value, boundary) = extreme(sym, search, 1.0, sweeps.max(1))?;
    Ok(NormEstimate { value, at, boundary, exact: false })
}

/// `s` with `Σ s_j d_j = θ`, along `d`.
fn point_on_direction(d: &[f64], theta: f64) -> Vec<f64> {
    let dd: f64 = d.iter().map(|x| x * x).sum();
    if dd == 0.0 {
        return vec![0.0; d.len()];
    }
    d.iter().map(|x| x * theta / dd).collect()
}

/// Extreme of `sign·|F(e^{−iθ})|` over one period.
fn circle_extreme(f: &crate::symbol::CircleFn<'_>, sign: f64) -> (f64, f64) {
    const SAMPLES: usize = 4096;
    let h = TAU / SAMPLES as f64;
    let (k, _) = (0..SAMPLES)
        .map(|k| (k, sign * f.eval(k as f64 * h).norm()))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let c = k as f64 * h;
    let (theta, v) = golden_max(|t| sign * f.eval(t).norm(), c - h, c + h, 80);
    (theta.rem_euclid(TAU), sign * v)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Invertibility {
    /// `inf |φ| > 0`; `exact` when the infimum covers all of `ℝⁿ`.
    Invertible { inf: f64, exact: bool },
    /// A witness `s*` with `|φ(s*)| < floor`, or analytic decay to zero.
    NotInvertible { witness: Option<Vec<f64>>, analytic: bool },
    /// Positive infimum on a finite grid, which certifies nothing on `ℝⁿ`.
    Inconclusive { inf_estimate: f64 },
}

impl Invertibility {
    pub fn label(&self) -> &'static str {
        match self {
            Invertibility::Invertible { .. } => "invertible",
            Invertibility::NotInvertible { .. } => "not-invertible",
            Invertibility::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// Verdict on `inf |φ| > 0`.
pub fn invertibility(sym: &Symbol, grid: &SGrid, floor: f64) -> Result<Invertibility> {
    check_l2(sym)?;
    if grid.dim() != sym.dim {
        return Err(Error::DimensionMismatch { expected: sym.dim, found: grid.dim() });
    }
    if sym.decays() {
        return Ok(Invertibility::NotInvertible { witness: None, analytic: true });
    }
    if let Some((dir, f)) = sym.circle_form() {
        let (theta, inf) = circle_extreme(&f, -1.0);
        return Ok(if inf > floor {
            Invertibility::Invertible { inf, exact: true }
        } else {
            Invertibility::NotInvertible { witness: Some(point_on_direction(&dir, theta)), analytic: false }
        });
    }
    let (at, inf, _) = extreme(sym, grid, -1.0, 2)?;
    Ok(if inf < floor {
        Invertibility::NotInvertible { witness: Some(at), analytic: false }
    } else {
        Invertibility::Inconclusive { inf_estimate: inf }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Predicate {
    /// `|z − center| = radius`.
    Circle { center: Complex64, radius: f64 },
    /// `r ≤ 2(2^{n−1} − 1 + cos θ)`.
    CesaroRegion { n: usize },
    None,
}

impl Predicate {
    /// Membership with absolute slack `tol`.
    pub fn holds(&self, z: Complex64, tol: f64) -> bool {
        match self {
            Predicate::Circle { center, radius } => ((z - center).norm() - radius).abs() <= tol,
            Predicate::CesaroRegion { n } => cesaro_region_slack(z, *n) >= -tol,
            Predicate::None => true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SpectrumCloud {
    pub s: Vec<Vec<f64>>,
    pub points: Vec<Complex64>,
    pub predicate: Predicate,
    /// Grid spacing per axis.
    pub resolution: Vec<f64>,
}

impl SpectrumCloud {
    pub fn violations(&self, tol: f64) -> usize {
        self.points.iter().filter(|z| !self.predicate.holds(**z, tol)).count()
    }

    pub fn max_modulus(&self) -> f64 {
        self.points.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Slack tolerance used when checking a cloud against its predicate.
pub const CLOUD_TOLERANCE: f64 = 1e-10;

fn standard_cesaro(sym: &Symbol) -> Option<usize> {
    match &sym.form {
        SymbolForm::Cesaro { scale, offsets, rates }
            if *scale == 1.0 && offsets.iter().all(|o| *o == 0.5) && rates.iter().all(|r| r.abs() == 1.0) =>
        {
            Some(sym.dim)
        }
        SymbolForm::Conjugate(a) => standard_cesaro(a),
        _ => None,
    }
}

/// Samples of `φ` with the analytic predicate of the variant, if any.
pub fn spectrum_cloud(sym: &Symbol, grid: &SGrid) -> Result<SpectrumCloud> {
    check_l2(sym)?;
    if grid.dim() != sym.dim {
        return Err(Error::DimensionMismatch { expected: sym.dim, found: grid.dim() });
    }
    let s = grid.points();
    let points = sym.eval_many(&s)?;
    let predicate = match (standard_cesaro(sym), &sym.form) {
        (Some(1), _) => Predicate::Circle { center: Complex64::new(1.0, 0.0), radius: 1.0 },
        (Some(n), _) => Predicate::CesaroRegion { n },
        (None, SymbolForm::Constant(c)) => Predicate::Circle { center: *c, radius: 0.0 },
        _ => Predicate::None,
    };
    let resolution = (0..grid.dim()).map(|j| grid.spacing(j)).collect();
    Ok(SpectrumCloud { s, points, predicate, resolution })
}

/// `2(2^{n−1} − 1 + cos θ) − r` for `z = r e^{iθ}`.
fn cesaro_region_slack(z: Complex64, n: usize) -> f64 {
    let bound = 2.0 * (2f64.powi(n as i32 - 1) - 1.0 + z.arg().cos());
    bound - z.norm()
}

/// `z = r e^{iθ}` with `r ≤ 2(2^{n−1} − 1 + cos θ)`. At `n = 1` this is a
/// disk, while the spectrum of the one-dimensional operator is the circle
/// `|z − 1| = 1`; use [`Predicate::Circle`] there.
pub fn cesaro_spectrum_membership(z: Complex64, n: usize) -> bool {
    cesaro_region_slack(z, n) >= 0.0
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Classification {
    pub self_adjoint: bool,
    pub positive: bool,
    pub unitary: bool,
}

impl Classification {
    pub fn labels(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.self_adjoint {
            out.push("self-adjoint");
        }
        if self.positive {
            out.push("positive");
        }
        if self.unitary {
            out.push("unitary");
        }
        if out.is_empty() {
            out.push("none-of-these");
        }
        out
    }
}

/// Real, nonnegative and unimodular symbols on the grid, to `tol`.
pub fn classify_operator(sym: &Symbol, grid: &SGrid, tol: f64) -> Result<Classification> {
    check_l2(sym)?;
    let values = sym.eval_many(&grid.points())?;
    let self_adjoint = values.iter().all(|v| v.im.abs() <= tol);
    Ok(Classification {
        self_adjoint,
        positive: self_adjoint && values.iter().all(|v| v.re >= -tol),
        unitary: values.iter().all(|v| (v.norm() - 1.0).abs() <= tol),
    })
}

/// Truncated Taylor coefficients `c_0, …, c_K`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries {
    pub coeffs: Vec<Complex64>,
}

/// Default truncation of power-series reciprocals.
pub const DEFAULT_TERMS: usize = 64;
/// Largest tail `Σ_{k>K} |b_k|` accepted by [`discrete_inverse`].
pub const TAIL_TARGET: f64 = 1e-12;

impl PowerSeries {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Invalid("power series needs finite coefficients".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Cauchy product truncated to `len` terms.
    pub fn convolve(&self, other: &Self, len: usize) -> Vec<Complex64> {
        (0..len)
            .map(|k| {
                (0..=k)
                    .filter_map(|j| Some(self.coeffs.get(j)? * other.coeffs.get(k - j)?))
                    .sum()
            })
            .collect()
    }

    /// `b_0, …, b_K` with `Σ_{j≤k} b_j c_{k−j} = δ_{k0}`, and an estimate of
    /// `Σ_{k>K} |b_k|` from the geometric decay of the last coefficients.
    pub fn reciprocal(&self, k_max: usize) -> Result<(Self, f64)> {
        let c0 = self.coeffs[0];
        if c0.norm() == 0.0 {
            return Err(Error::NotInvertible { inf: 0.0 });
        }
        let mut b = Vec::with_capacity(k_max + 1);
        b.push(Complex64::new(1.0, 0.0) / c0);
        for k in 1..=k_max {
            let acc: Complex64 = (1..=k.min(self.coeffs.len() - 1)).map(|j| self.coeffs[j] * b[k - j]).sum();
            b.push(-acc / c0);
        }
        let tail = tail_estimate(&b);
        Ok((Self { coeffs: b }, tail))
    }
}

/// Geometric extrapolation of `Σ_{k>K} |b_k|` from the last eight terms.
fn tail_estimate(b: &[Complex64]) -> f64 {
    let n = b.len();
    let window = &b[n.saturating_sub(9)..];
    let last = window.last().map_or(0.0, |v| v.norm());
    let peak = window.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let mut ratio: f64 = 0.0;
    for w in window.windows(2) {
        let (a, c) = (w[0].norm(), w[1].norm());
        if a > 0.0 {
            ratio = ratio.max(c / a);
        } else if c > 0.0 {
            return f64::INFINITY;
        }
    }
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    last.max(peak * ratio) * ratio / (1.0 - ratio)
}

#[derive(Clone, Debug)]
pub struct DiscreteInverse {
    pub spec: OperatorSpec,
    /// Coefficients of `G = 1/F`.
    pub b: Vec<Complex64>,
    /// `F` itself.
    pub f: PowerSeries,
    pub tail: f64,
    pub inf_f: f64,
}

/// Inverse of `Σ_k Φ(k) f(A^k x)` through `G = 1/F`, where
/// `F(z) = Σ_k Φ(k) det(A)^{-k/p} z^k`. The inverse is
/// `Σ_k b(k) det(A)^{k/p} f(A^k x)`, truncated at `K = k_max`.
pub fn discrete_inverse(spec: &OperatorSpec, k_max: usize) -> Result<DiscreteInverse> {
    let sym = Symbol::from_spec(spec)?;
    let Some((log_lambda, coeffs)) = sym.power_series() else {
        return Err(Error::UnsupportedVariant("inverse needs A(k) = A^k on {0, …, K}".into()));
    };
    let f = PowerSeries::new(coeffs)?;
    let circle = crate::symbol::CircleFn::Series(&f.coeffs);
    let (_, inf_f) = circle_extreme(&circle, -1.0);
    if !(inf_f > 1e-8) {
        return Err(Error::NotInvertible { inf: inf_f });
    }
    let (g, tail) = f.reciprocal(k_max)?;
    if !(tail <= TAIL_TARGET) {
        return Err(Error::Truncation { k: k_max, tail, target: TAIL_TARGET });
    }
    let mut b = g.coeffs.clone();
    while b.len() > 1 && b.last().is_some_and(|v| v.norm() == 0.0) {
        b.pop();
    }
    let log_det: f64 = log_lambda.iter().sum();
    let p = spec.p();
    let weights: Vec<Complex64> = b.iter().enumerate().map(|(k, bk)| bk * (k as f64 * log_det / p).exp()).collect();
    let count = weights.len();
    let inverse = OperatorSpec::new(
        p,
        MeasureSpace::counting(count),
        KernelSpec::new(KernelForm::Table(weights)),
        CommutingFamily::new(spec.family.basis.clone(), spec.family.eigen.clone()),
    )?;
    Ok(DiscreteInverse { spec: inverse, b, f, tail, inf_f })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{builtin_ck, geometric_spec, identity_spec};
    use crate::spec::EigenForm;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cesaro_norms() {
        for n in 1..=3 {
            let e = operator_norm(&Symbol::cesaro(n), &SGrid::default_for(n), 2).unwrap();
            assert!(e.exact);
            assert!((e.value - 2f64.powi(n as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn ck_half_norm() {
        let sym = Symbol::from_spec(&builtin_ck(0.5).unwrap()).unwrap();
        let e = operator_norm(&sym, &SGrid::default_for(1), 2).unwrap();
        assert!((e.value - PI / 2.0).abs() < 1e-12);
    }

    /// `−φ_cesàro`: the kernel `−δ_0` hides the peak from the shortcut.
    fn negated_cesaro() -> Symbol {
        let minus = OperatorSpec::new(
            2.0,
            MeasureSpace::counting(1),
            KernelSpec::new(KernelForm::Table(vec![c(-1.0, 0.0)])),
            CommutingFamily::diagonal(vec![EigenForm::Constant(1.0)]),
        )
        .unwrap();
        crate::symbol::product_symbol(&Symbol::cesaro(1), &Symbol::from_spec(&minus).unwrap()).unwrap()
    }

    #[test]
    fn searched_norm_matches_shortcut() {
        let e = operator_norm(&negated_cesaro(), &SGrid::default_for(1), 3).unwrap();
        assert!(!e.exact && !e.boundary);
        assert!((e.value - 2.0).abs() < 1e-9, "{}", e.value);
    }

    #[test]
    fn boundary_maximum_is_flagged() {
        let e = operator_norm(&negated_cesaro(), &SGrid::cube(1, 5.0, 10.0, 11), 1).unwrap();
        assert!(e.boundary);
        assert!((e.value - 1.0 / (0.25f64 + 25.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn verdicts() {
        let g = SGrid::default_for(1);
        assert!(matches!(
            invertibility(&Symbol::cesaro(1), &g, 1e-6).unwrap(),
            Invertibility::NotInvertible { analytic: true, .. }
        ));
        match invertibility(&Symbol::from_spec(&geometric_spec()).unwrap(), &g, 1e-6).unwrap() {
            Invertibility::Invertible { inf, exact } => {
                assert!(exact);
                assert!((inf - 0.8).abs() < 1e-10, "{inf}");
            }
            v => panic!("{v:?}"),
        }
        match invertibility(&Symbol::from_spec(&identity_spec(1)).unwrap(), &g, 1e-6).unwrap() {
            Invertibility::Invertible { inf, .. } => assert!((inf - 1.0).abs() < 1e-15),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn cardioid_membership() {
        assert!(cesaro_spectrum_membership(c(4.0, 0.0), 2));
        assert!(!cesaro_spectrum_membership(c(-0.1, 0.0), 2));
        assert!(cesaro_spectrum_membership(c(1.0, 0.0), 2));
    }

    #[test]
    fn cesaro_clouds() {
        let one = spectrum_cloud(&Symbol::cesaro(1), &SGrid::default_for(1)).unwrap();
        assert_eq!(one.violations(1e-10), 0);
        let two = spectrum_cloud(&Symbol::cesaro(2), &SGrid::default_for(2)).unwrap();
        assert_eq!(two.violations(CLOUD_TOLERANCE), 0);
        assert!(two.max_modulus() > 3.99);
    }

    #[test]
    fn classification() {
        let g = SGrid::default_for(1);
        assert_eq!(classify_operator(&Symbol::cesaro(1), &g, 1e-9).unwrap().labels(), vec!["none-of-these"]);
        let unit = OperatorSpec::new(
            2.0,
            MeasureSpace::counting(1),
            KernelSpec::new(KernelForm::Table(vec![c(3f64.sqrt(), 0.0)])),
            CommutingFamily::diagonal(vec![EigenForm::Constant(3.0)]),
        )
        .unwrap();
        let cl = classify_operator(&Symbol::from_spec(&unit).unwrap(), &g, 1e-12).unwrap();
        assert!(cl.unitary && !cl.self_adjoint);
    }

    #[test]
    fn reciprocal_of_geometric() {
        let f = PowerSeries::new((0..41).map(|k| c(0.25f64.powi(k), 0.0)).collect()).unwrap();
        let (g, tail) = f.reciprocal(64).unwrap();
        assert!((g.coeffs[0] - 1.0).norm() < 1e-15);
        assert!((g.coeffs[1] + 0.25).norm() < 1e-15);
        assert!(g.coeffs[2..41].iter().all(|b| b.norm() < 1e-15));
        assert!(tail < 1e-12);
    }

    #[test]
    fn geometric_inverse_spec() {
        let inv = discrete_inverse(&geometric_spec(), DEFAULT_TERMS).unwrap();
        assert!((inv.inf_f - 0.8).abs() < 1e-10);
        // F is the K = 40 truncation, so G = 1 − z/4 up to z^41 terms.
        assert!((inv.b[0] - 1.0).norm() < 1e-15);
        assert!((inv.b[1] + 0.25).norm() < 1e-15);
        let KernelForm::Table(w) = &inv.spec.kernel.form else { panic!() };
        assert!((w[1] + 0.5).norm() < 1e-14);
    }

    #[test]
    fn non_invertible_series_is_refused() {
        let spec = OperatorSpec::new(
            2.0,
            MeasureSpace::counting(2),
            KernelSpec::new(KernelForm::Table(vec![c(1.0, 0.0), c(-2.0, 0.0)])),
            CommutingFamily::diagonal(vec![EigenForm::Geometric(4.0)]),
        )
        .unwrap();
        assert!(matches!(discrete_inverse(&spec, 64), Err(Error::NotInvertible { .. })));
    }

    #[test]
    fn slowly_decaying_reciprocal_is_truncated() {
        // F = 1 − 0.9z: G has ratio 0.9, far from the tail target at K = 8.
        let spec = OperatorSpec::new(
            2.0,
            MeasureSpace::counting(2),
            KernelSpec::new(KernelForm::Table(vec![c(1.0, 0.0), c(-1.8, 0.0)])),
            CommutingFamily::diagonal(vec![EigenForm::Geometric(4.0)]),
        )
        .unwrap();
        assert!(matches!(discrete_inverse(&spec, 8), Err(Error::Truncation { .. })));
    }
}
