//! Action of `H_{Φ,A}` and its adjoint, and the direct checks built on it.
//!
//! [`Applied`] is the lazy function `x ↦ (Hf)(x)`. It distributes over
//! linear combinations, factors over tensor products when the spec is
//! separable, and otherwise sums `Φ(u) f(A(u)x)` over the spec's nodes with
//! panel boundaries placed where `A(u)x` crosses a breakpoint of `f`.
//!
//! Integrals over `ℝ^n` use [`LogGrid`]: composite Gauss–Legendre panels in
//! `t = ln|x_j|` on every hyperoctant, with panel boundaries at the
//! breakpoints of the integrand.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::function::{FnRef, Function, Support};
use crate::grid::{Axis, GridFunction};
use crate::quadrature::{gauss_legendre, AxisRule};
use crate::spec::{validate_spec, EigenForm, MeasureSpace, NodeOptions, NodeSet, OperatorSpec};

/// Kernel-mass fraction times boundary level above which leaving a sampled
/// input's domain is an error.
pub const TRUNCATION_THRESHOLD: f64 = 1e-8;

/// Smallest graded gap used when applying an operator. The innermost panel
/// carries at most this fraction of a bounded kernel's mass, far below the
/// accuracy of an application; symbols keep the spec's deeper grading.
pub const APPLY_GRADING_DEPTH: f64 = 1e-16;

/// Gauss–Legendre order of the panels in `t`.
pub const LINE_ORDER: usize = 16;

/// Range and resolution in `t = ln|x|` used on every hyperoctant. Sampled
/// grids have `n` uniform nodes; integrals use `n / 16` Gauss–Legendre panels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub n: usize,
}

impl Default for LogGrid {
    fn default() -> Self {
        Self { t_min: -40.0, t_max: 40.0, n: 4096 }
    }
}

impl LogGrid {
    pub fn new(t_min: f64, t_max: f64, n: usize) -> Self {
        Self { t_min, t_max, n }
    }

    pub fn axis(&self, sign: f64) -> Axis {
        Axis::log(sign, self.t_min, self.t_max, self.n)
    }

    pub fn axes(&self, signs: &[f64]) -> Vec<Axis> {
        signs.iter().map(|s| self.axis(*s)).collect()
    }

    /// Nodes `|x|` and weights `dx` on one half-line, with panel boundaries
    /// at the given values of `|x|`.
    pub fn line_rule(&self, breaks: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (gx, gw) = gauss_legendre(LINE_ORDER);
        let panels = (self.n / LINE_ORDER).max(1);
        let h = (self.t_max - self.t_min) / panels as f64;
        let mut cuts: Vec<f64> = (0..=panels).map(|k| self.t_min + k as f64 * h).collect();
        for b in breaks {
            let t = b.abs().ln();
            if t > self.t_min && t < self.t_max {
                cuts.push(t);
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let mut x = Vec::with_capacity(cuts.len() * LINE_ORDER);
        let mut w = Vec::with_capacity(cuts.len() * LINE_ORDER);
        for c in cuts.windows(2) {
            let (mid, half) = (0.5 * (c[0] + c[1]), 0.5 * (c[1] - c[0]));
            for (xi, wi) in gx.iter().zip(&gw) {
                let t = mid + half * xi;
                x.push(t.exp());
                w.push(wi * half * t.exp());
            }
        }
        (x, w)
    }
}

/// All `2^n` sign vectors.
pub fn octants(n: usize) -> Vec<Vec<f64>> {
    (0..1usize << n)
        .map(|bits| (0..n).map(|j| if bits >> j & 1 == 1 { -1.0 } else { 1.0 }).collect())
        .collect()
}

enum Plan {
    Terms(Vec<(Complex64, Applied)>),
    Factors(Vec<Applied>),
    Direct(Box<Direct>),
}

struct Direct {
    rules: Vec<AxisRule>,
    /// Node set shared by every `x` when no splitting is needed.
    fixed: Option<NodeSet>,
    /// Per `x` axis: box axis of its eigenvalue, power, and the breakpoints of `f`.
    splits: Vec<Option<(usize, f64, Vec<f64>)>>,
    basis: Option<DMatrix<f64>>,
    support: Option<Support>,
}

/// The lazy function `Hf`.
pub struct Applied {
    spec: Arc<OperatorSpec>,
    f: FnRef,
    plan: Plan,
}

impl Applied {
    pub fn new(spec: &OperatorSpec, f: FnRef) -> Result<Self> {
        Self::with_spec(Arc::new(spec.clone()), f)
    }

    fn with_spec(spec: Arc<OperatorSpec>, f: FnRef) -> Result<Self> {
        if f.dim() != spec.dimension {
            return Err(Error::DimensionMismatch { expected: spec.dimension, found: f.dim() });
        }
        if let Some(terms) = f.terms() {
            let parts = terms
                .into_iter()
                .map(|(c, g)| Ok((c, Self::with_spec(spec.clone(), g)?)))
                .collect::<Result<Vec<_>>>()?;
            return Ok(Self { spec, f, plan: Plan::Terms(parts) });
        }
        if spec.dimension > 1 {
            if let (Some(specs), Some(fs)) = (spec.factorize(), f.factors()) {
                let parts = specs
                    .into_iter()
                    .zip(fs)
                    .map(|(s, g)| Self::with_spec(Arc::new(s), g))
                    .collect::<Result<Vec<_>>>()?;
                return Ok(Self { spec, f, plan: Plan::Factors(parts) });
            }
        }
        let coarse = spec.with_min_grading_depth(APPLY_GRADING_DEPTH);
        let rules = coarse.axis_rules();
        let identity = spec.family.is_identity_basis();
        let splits: Vec<_> = spec
            .family
            .eigen
            .iter()
            .enumerate()
            .map(|(j, e)| match e {
                EigenForm::Coord { index, power } if identity => {
                    let b = f.breakpoints(j);
                    (!b.is_empty()).then_some((*index, *power, b))
                }
                _ => None,
            })
            .collect();
        let fixed = if splits.iter().all(Option::is_none) { Some(coarse.nodes(&NodeOptions::default())?) } else { None };
        let basis = (!identity).then(|| spec.family.basis_matrix());
        let support = f.support();
        let direct = Direct { rules, fixed, splits, basis, support };
        Ok(Self { spec, f, plan: Plan::Direct(Box::new(direct)) })
    }

    pub fn spec(&self) -> &OperatorSpec {
        &self.spec
    }

    fn eval_direct(&self, d: &Direct, x: &[f64]) -> Result<Complex64> {
        let owned;
        let set = match &d.fixed {
            Some(set) => set,
            None => {
                let mut rules = d.rules.clone();
                for (j, split) in d.splits.iter().enumerate() {
                    let Some((axis, power, bps)) = split else { continue };
                    let xj = x[j].abs();
                    if xj == 0.0 {
                        continue;
                    }
                    for b in bps {
                        rules[*axis].split_at((b / xj).powf(1.0 / power));
                    }
                }
                owned = self.spec.nodes_from_rules(&rules);
                &owned
            }
        };
        let n = self.spec.dimension;
        let z: Vec<f64> = match &d.basis {
            Some(c) => (c.transpose() * nalgebra::DVector::from_column_slice(x)).iter().copied().collect(),
            None => x.to_vec(),
        };
        let mut y = vec![0.0; n];
        let mut acc = Complex64::new(0.0, 0.0);
        let mut escaped = 0.0;
        let mut total = 0.0;
        // Kernel mass leaving the support, weighted by the boundary level it crosses.
        for i in 0..set.len() {
            let m = set.mass[i];
            if m == Complex64::new(0.0, 0.0) {
                continue;
            }
            let a = set.eig(i);
            match &d.basis {
                Some(c) => {
                    for r in 0..n {
                        y[r] = (0..n).map(|k| c[(r, k)] * a[k] * z[k]).sum();
                    }
                }
                None => {
                    for r in 0..n {
                        y[r] = a[r] * z[r];
                    }
                }
            }
            if let Some(sup) = &d.support {
                total += m.norm();
                if let Some(level) = sup.escape_level(&y) {
                    escaped += m.norm() * level;
                    continue;
                }
            }
            acc += m * self.f.try_eval(&y)?;
        }
        if d.support.is_some() {
            let lost = if total > 0.0 { escaped / total } else { 0.0 };
            if lost > TRUNCATION_THRESHOLD {
                return Err(Error::DomainTruncation { point: x.to_vec(), mass: lost });
            }
        }
        Ok(acc)
    }

    /// Extreme eigenvalues of each axis over `Ω`, used to propagate breakpoints.
    fn eigen_extremes(&self, j: usize) -> Vec<f64> {
        match &self.spec.measure {
            MeasureSpace::Box { lower, upper, .. } => match &self.spec.family.eigen[j] {
                EigenForm::Coord { index, power } => {
                    vec![lower[*index].powf(*power), upper[*index].powf(*power)]
                }
                EigenForm::Constant(c) => vec![*c],
                _ => Vec::new(),
            },
            MeasureSpace::Discrete { atoms, .. } => {
                atoms.iter().enumerate().map(|(k, a)| self.spec.family.eigen[j].eval(a, k)).collect()
            }
        }
    }
}

impl Function for Applied {
    fn dim(&self) -> usize {
        self.spec.dimension
    }

    fn eval(&self, x: &[f64]) -> Complex64 {
        self.try_eval(x).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    }

    fn try_eval(&self, x: &[f64]) -> Result<Complex64> {
        match &self.plan {
            Plan::Terms(parts) => parts.iter().map(|(c, h)| Ok(c * h.try_eval(x)?)).sum(),
            Plan::Factors(parts) => parts.iter().zip(x).map(|(h, xi)| h.try_eval(std::slice::from_ref(xi))).product(),
            Plan::Direct(d) => self.eval_direct(d, x),
        }
    }

    fn breakpoints(&self, axis: usize) -> Vec<f64> {
        if !self.spec.family.is_identity_basis() {
            return Vec::new();
        }
        let mut out: Vec<f64> = Vec::new();
        let extremes = self.eigen_extremes(axis);
        for b in self.f.breakpoints(axis) {
            for a in &extremes {
                let v = b / a;
                if v.is_finite() && v > 1e-12 && v < 1e12 {
                    out.push(v);
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
        if out.len() > 64 {
            out.clear();
        }
        out
    }

    fn factors(&self) -> Option<Vec<FnRef>> {
        match &self.plan {
            Plan::Factors(_) => {
                let specs = self.spec.factorize()?;
                let fs = self.f.factors()?;
                specs
                    .into_iter()
                    .zip(fs)
                    .map(|(s, g)| Applied::new(&s, g).ok().map(|a| Arc::new(a) as FnRef))
                    .collect()
            }
            _ => None,
        }
    }

    fn terms(&self) -> Option<Vec<(Complex64, FnRef)>> {
        let terms = self.f.terms()?;
        terms
            .into_iter()
            .map(|(c, g)| Applied::with_spec(self.spec.clone(), g).ok().map(|a| (c, Arc::new(a) as FnRef)))
            .collect()
    }
}

/// Samples `g` on `axes`, propagating the first evaluation failure.
pub fn sample(g: &dyn Function, axes: &[Axis]) -> Result<GridFunction> {
    if g.dim() != axes.len() {
        return Err(Error::DimensionMismatch { expected: axes.len(), found: g.dim() });
    }
    let mut out = GridFunction::zeros(axes.to_vec());
    let values = (0..out.len())
        .into_par_iter()
        .map(|i| g.try_eval(&out.point(i)))
        .collect::<Result<Vec<_>>>()?;
    out.values = values;
    Ok(out)
}

/// `Hf` sampled on the tensor grid `axes`.
pub fn apply(spec: &OperatorSpec, f: FnRef, axes: &[Axis]) -> Result<GridFunction> {
    sample(&Applied::new(spec, f)?, axes)
}

/// `H*f`, computed as `apply` with the adjoint spec.
pub fn apply_adjoint(spec: &OperatorSpec, f: FnRef, axes: &[Axis]) -> Result<GridFunction> {
    apply(&spec.adjoint(), f, axes)
}

/// `∫_Ω |Φ(u)| det A(u)^{-1/p} dμ(u)`, an upper bound for `‖H‖_{p→p}`.
pub fn norm_bound_lp(spec: &OperatorSpec) -> Result<f64> {
    let report = validate_spec(spec)?;
    if !report.is_valid() {
        let names: Vec<_> = report.failures().iter().map(|c| c.name).collect();
        return Err(Error::Invalid(format!("failed checks: {}", names.join(", "))));
    }
    Ok(report.l1_bound)
}

type Integrand<'a> = &'a (dyn Fn(&[f64]) -> Result<Complex64> + Sync);

/// `∫ h` over `ℝ^n`, all hyperoctants; `breaks[j]` are the values of `|x_j|`
/// where `h` is not smooth.
fn space_sum(grid: &LogGrid, breaks: &[Vec<f64>], h: Integrand<'_>) -> Result<Complex64> {
    let n = breaks.len();
    let rules: Vec<_> = breaks.iter().map(|b| grid.line_rule(b)).collect();
    let shape: Vec<usize> = rules.iter().map(|r| r.0.len()).collect();
    let total: usize = shape.iter().product();
    let mut acc = Complex64::new(0.0, 0.0);
    for signs in octants(n) {
        let part: Complex64 = (0..total)
            .into_par_iter()
            .map(|flat| {
                let mut x = vec![0.0; n];
                let mut w = 1.0;
                let mut rem = flat;
                for j in (0..n).rev() {
                    let k = rem % shape[j];
                    rem /= shape[j];
                    x[j] = signs[j] * rules[j].0[k];
                    w *= rules[j].1[k];
                }
                Ok(w * h(&x)?)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .sum();
        acc += part;
    }
    Ok(acc)
}

fn merged_breaks(fs: &[&dyn Function]) -> Vec<Vec<f64>> {
    let n = fs[0].dim();
    (0..n)
        .map(|j| {
            let mut b: Vec<f64> = fs.iter().flat_map(|f| f.breakpoints(j)).collect();
            b.sort_by(f64::total_cmp);
            b.dedup();
            b
        })
        .collect()
}

/// `⟨f, g⟩ = ∫ f ḡ` over `ℝ^n`; factorizes over tensor products.
pub fn inner_product(f: &dyn Function, g: &dyn Function, grid: &LogGrid) -> Result<Complex64> {
    let n = f.dim();
    if g.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: g.dim() });
    }
    if n > 1 {
        if let (Some(fs), Some(gs)) = (f.factors(), g.factors()) {
            return fs.iter().zip(&gs).map(|(a, b)| inner_product(a.as_ref(), b.as_ref(), grid)).product();
        }
    }
    let h = |x: &[f64]| Ok(f.try_eval(x)? * g.try_eval(x)?.conj());
    space_sum(grid, &merged_breaks(&[f, g]), &h)
}

pub fn lp_norm(f: &dyn Function, p: f64, grid: &LogGrid) -> Result<f64> {
    let n = f.dim();
    if n > 1 {
        if let Some(fs) = f.factors() {
            return fs.iter().map(|a| lp_norm(a.as_ref(), p, grid)).product();
        }
    }
    let h = |x: &[f64]| Ok(Complex64::new(f.try_eval(x)?.norm().powf(p), 0.0));
    Ok(space_sum(grid, &merged_breaks(&[f]), &h)?.re.powf(1.0 / p))
}

pub fn l2_norm(f: &dyn Function, grid: &LogGrid) -> Result<f64> {
    lp_norm(f, 2.0, grid)
}

/// `‖f − g‖₂`. Tensor products use `‖f‖² + ‖g‖² − 2 Re⟨f, g⟩`.
pub fn l2_distance(f: &dyn Function, g: &dyn Function, grid: &LogGrid) -> Result<f64> {
    let n = f.dim();
    if n > 1 && f.factors().is_some() && g.factors().is_some() {
        let ff = inner_product(f, f, grid)?.re;
        let gg = inner_product(g, g, grid)?.re;
        let fg = inner_product(f, g, grid)?.re;
        return Ok((ff + gg - 2.0 * fg).max(0.0).sqrt());
    }
    let h = |x: &[f64]| Ok(Complex64::new((f.try_eval(x)? - g.try_eval(x)?).norm_sqr(), 0.0));
    Ok(space_sum(grid, &merged_breaks(&[f, g]), &h)?.re.sqrt())
}

/// `‖Hf‖_p / ‖f‖_p`.
pub fn rayleigh_quotient(spec: &OperatorSpec, f: FnRef, grid: &LogGrid) -> Result<f64> {
    let p = spec.exponent_p;
    let hf = Applied::new(spec, f.clone())?;
    Ok(lp_norm(&hf, p, grid)? / lp_norm(f.as_ref(), p, grid)?)
}

/// The sampled function on every hyperoctant, dispatched by sign pattern.
struct Patchwork {
    n: usize,
    patches: Vec<GridFunction>,
}

impl Function for Patchwork {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &[f64]) -> Complex64 {
        let idx = x.iter().enumerate().fold(0usize, |acc, (j, v)| acc | (usize::from(*v < 0.0) << j));
        if x.contains(&0.0) {
            return Complex64::new(0.0, 0.0);
        }
        self.patches[idx].eval(x)
    }

    fn support(&self) -> Option<Support> {
        let mut sup = self.patches[0].support()?;
        sup.magnitude = vec![true; self.n];
        for p in &self.patches[1..] {
            let other = p.support()?;
            for j in 0..self.n {
                sup.lower_level[j] = sup.lower_level[j].max(other.lower_level[j]);
                sup.upper_level[j] = sup.upper_level[j].max(other.upper_level[j]);
            }
        }
        Some(sup)
    }
}

/// `H(Kf)` with `Kf` first sampled on `grid` in every hyperoctant. Sampling
/// the inner result keeps the cost of a composition linear in the number of
/// quadrature nodes.
fn compose(outer: &OperatorSpec, inner: &OperatorSpec, f: FnRef, grid: &LogGrid) -> Result<Applied> {
    let n = inner.dimension;
    let k = Applied::new(inner, f.clone())?;
    let patches = octants(n)
        .iter()
        .map(|signs| {
            let axes = grid.axes(signs);
            // Diagonal families keep every hyperoctant invariant.
            if sample(f.as_ref(), &axes)?.max_abs() == 0.0 {
                return Ok(GridFunction::zeros(axes));
            }
            sample(&k, &axes)
        })
        .collect::<Result<Vec<_>>>()?;
    Applied::new(outer, Arc::new(Patchwork { n, patches }))
}

/// `‖HH*f − H*Hf‖₂ / ‖f‖₂`.
///
/// Inner applications are sampled on `inner_grid` and interpolated; the
/// outer ones and the norm use `grid`. Separable specs with product inputs
/// are handled one axis at a time.
pub fn normality_residual(spec: &OperatorSpec, f: FnRef, grid: &LogGrid, inner_grid: &LogGrid) -> Result<f64> {
    if spec.exponent_p != 2.0 {
        return Err(Error::RequiresL2(spec.exponent_p));
    }
    let n = spec.dimension;
    if n > 1 {
        if let (Some(specs), Some(fs)) = (spec.factorize(), f.factors()) {
            let mut hh: Vec<FnRef> = Vec::with_capacity(n);
            let mut hs: Vec<FnRef> = Vec::with_capacity(n);
            for (j, (s, g)) in specs.iter().zip(&fs).enumerate() {
                let seen = (0..j).find(|&i| specs[i] == *s && Arc::ptr_eq(&fs[i], g));
                if let Some(i) = seen {
                    hh.push(hh[i].clone());
                    hs.push(hs[i].clone());
                    continue;
                }
                let adj = s.adjoint();
                hh.push(Arc::new(compose(s, &adj, g.clone(), inner_grid)?));
                hs.push(Arc::new(compose(&adj, s, g.clone(), inner_grid)?));
            }
            let a = crate::function::Product::new(hh);
            let b = crate::function::Product::new(hs);
            return Ok(l2_distance(&a, &b, grid)? / l2_norm(f.as_ref(), grid)?);
        }
    }
    let adj = spec.adjoint();
    if spec.family.is_identity_basis() {
        let a = compose(spec, &adj, f.clone(), inner_grid)?;
        let b = compose(&adj, spec, f.clone(), inner_grid)?;
        Ok(l2_distance(&a, &b, grid)? / l2_norm(f.as_ref(), grid)?)
    } else {
        let a = Applied::new(spec, Arc::new(Applied::new(&adj, f.clone())?))?;
        let b = Applied::new(&adj, Arc::new(Applied::new(spec, f.clone())?))?;
        Ok(l2_distance(&a, &b, grid)? / l2_norm(f.as_ref(), grid)?)
    }
}

#[derive(Clone, Debug)]
pub struct RegularityProbe {
    pub x: Vec<f64>,
    pub value: Complex64,
    /// `|Hf(x) − l|`.
    pub deviation: f64,
}

#[derive(Clone, Debug)]
pub struct RegularityReport {
    /// `∫ Φ dμ`.
    pub kernel_mass: Complex64,
    pub limit: Complex64,
    /// `|∫Φ dμ · l − l|`, the limiting deviation.
    pub expected_deviation: f64,
    pub probes: Vec<RegularityProbe>,
}

impl RegularityReport {
    /// Deviations shrink toward the expected limit along the probes.
    pub fn is_decreasing(&self) -> bool {
        self.probes.windows(2).all(|w| {
            (w[1].deviation - self.expected_deviation).abs() <= (w[0].deviation - self.expected_deviation).abs() + 1e-12
        })
    }
}

/// Evaluates `Hf` at probe points for an `f` with limit `l` at infinity.
pub fn regularity_check(spec: &OperatorSpec, f: FnRef, limit: Complex64, probes: &[Vec<f64>]) -> Result<RegularityReport> {
    let kernel_mass = spec.kernel_mass()?;
    let h = Applied::new(spec, f)?;
    let probes = probes
        .iter()
        .map(|x| {
            let value = h.try_eval(x)?;
            Ok(RegularityProbe { x: x.clone(), value, deviation: (value - limit).norm() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegularityReport { kernel_mass, limit, expected_deviation: (kernel_mass * limit - limit).norm(), probes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{builtin_cesaro, builtin_ck, geometric_spec, identity_spec};
    use crate::function::{cesaro_oracle, GaussianBump, Indicator, PowerExp, Product, Saturating};

    fn unit() -> FnRef {
        Arc::new(Indicator::unit())
    }

    #[test]
    fn cesaro_of_indicator() {
        let axes = [Axis::gauss(0.01, 20.0, 512)];
        let h = apply(&builtin_cesaro(1), unit(), &axes).unwrap();
        for i in 0..h.len() {
            let x = h.point(i)[0];
            assert!((h.values[i].re - cesaro_oracle::indicator(x)).abs() < 1e-6, "x = {x}");
        }
    }

    #[test]
    fn adjoint_cesaro_of_indicator() {
        let axes = [Axis::gauss(0.01, 20.0, 512)];
        let h = apply_adjoint(&builtin_cesaro(1), unit(), &axes).unwrap();
        for i in 0..h.len() {
            let x = h.point(i)[0];
            assert!((h.values[i].re - cesaro_oracle::indicator_adjoint(x)).abs() < 1e-6, "x = {x}");
        }
    }

    #[test]
    fn two_dimensional_cesaro_separates() {
        let f: FnRef = Arc::new(Product::power(unit(), 2));
        let axes = [Axis::gauss(0.1, 5.0, 24), Axis::gauss(0.1, 5.0, 24)];
        let h = apply(&builtin_cesaro(2), f, &axes).unwrap();
        for i in 0..h.len() {
            let x = h.point(i);
            let want = cesaro_oracle::indicator(x[0]) * cesaro_oracle::indicator(x[1]);
            assert!((h.values[i].re - want).abs() < 1e-6);
        }
    }

    #[test]
    fn identity_is_exact() {
        let f: FnRef = Arc::new(GaussianBump::default());
        let axes = [LogGrid::new(-5.0, 5.0, 64).axis(1.0)];
        let h = apply(&identity_spec(1), f.clone(), &axes).unwrap();
        let g = apply_adjoint(&identity_spec(1), f.clone(), &axes).unwrap();
        for i in 0..h.len() {
            let want = f.eval(&h.point(i));
            assert_eq!(h.values[i], want);
            assert_eq!(g.values[i], want);
        }
    }

    #[test]
    fn norm_bounds() {
        assert!((norm_bound_lp(&builtin_cesaro(1)).unwrap() - 2.0).abs() < 1e-12);
        let mut p4 = builtin_cesaro(1);
        p4.exponent_p = 4.0;
        assert!((norm_bound_lp(&p4).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        assert!((norm_bound_lp(&geometric_spec()).unwrap() - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn duality_with_exponential() {
        // ⟨C 1_(0,1), e^{-x}⟩ against ⟨1_(0,1), C* e^{-x}⟩.
        let grid = LogGrid::default();
        let spec = builtin_cesaro(1);
        let g: FnRef = Arc::new(PowerExp { power: 0.0, rate: 1.0 });
        let lhs = inner_product(&Applied::new(&spec, unit()).unwrap(), g.as_ref(), &grid).unwrap();
        let rhs = inner_product(unit().as_ref(), &Applied::new(&spec.adjoint(), g.clone()).unwrap(), &grid).unwrap();
        let scale = l2_norm(unit().as_ref(), &grid).unwrap() * l2_norm(g.as_ref(), &grid).unwrap();
        assert!((lhs - rhs).norm() < 1e-6 * scale, "{lhs} vs {rhs}");
    }

    #[test]
    fn regularity_of_saturating_profile() {
        let spec = builtin_cesaro(1);
        let probes: Vec<Vec<f64>> = [10.0, 100.0, 1000.0].iter().map(|x| vec![*x]).collect();
        let r = regularity_check(&spec, Arc::new(Saturating), Complex64::new(1.0, 0.0), &probes).unwrap();
        assert!((r.kernel_mass.re - 1.0).abs() < 1e-13);
        assert!(r.is_decreasing());
        for p in &r.probes {
            assert!((p.value.re - cesaro_oracle::saturating(p.x[0])).abs() < 1e-8);
        }
        assert!(r.probes[2].deviation < 8e-3);
    }

    #[test]
    fn doubled_kernel_is_not_regular() {
        let mut spec = builtin_cesaro(1);
        spec.kernel.form = crate::spec::KernelForm::Cesaro { scale: 2.0 };
        let r = regularity_check(&spec, Arc::new(Saturating), Complex64::new(1.0, 0.0), &[vec![1e6]]).unwrap();
        assert!((r.expected_deviation - 1.0).abs() < 1e-12);
        assert!((r.probes[0].value.re - 2.0).abs() < 1e-4);
    }

    #[test]
    fn sampled_input_truncation_is_reported() {
        // A constant sampled on a short grid cannot feed the adjoint Cesàro
        // operator, whose arguments run off to infinity.
        let axes = vec![Axis::log(1.0, -2.0, 2.0, 64)];
        let g = GridFunction::sample_with(axes.clone(), |_| Complex64::new(1.0, 0.0));
        let err = apply_adjoint(&builtin_cesaro(1), Arc::new(g), &axes).unwrap_err();
        assert!(matches!(err, Error::DomainTruncation { .. }));
    }

    #[test]
    fn normality_of_cesaro() {
        let grid = LogGrid::new(-40.0, 40.0, 256);
        let inner = LogGrid::new(-60.0, 60.0, 32768);
        let r = normality_residual(&builtin_cesaro(1), Arc::new(GaussianBump::default()), &grid, &inner).unwrap();
        assert!(r < 1e-5, "{r}");
    }

    #[test]
    fn normality_requires_l2() {
        let mut spec = builtin_ck(2.0).unwrap();
        spec.exponent_p = 3.0;
        let grid = LogGrid::new(-10.0, 10.0, 16);
        assert!(matches!(
            normality_residual(&spec, unit(), &grid, &grid),
            Err(Error::RequiresL2(_))
        ));
    }
}
