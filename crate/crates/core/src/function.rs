//! Evaluable functions on ℝⁿ and the shipped test-function library.
//!
//! Every closed-form oracle in the crate is stated for one of these
//! functions, so they live next to the library code rather than in tests.
//! One-dimensional profiles are defined on all of ℝ; most vanish on the
//! negative half-line.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

/// Region on which a sampled function is represented. Bounds on axes with
/// `magnitude` set apply to `|x_j|` (logarithmic axes). The levels are the
/// largest magnitudes on the lower and upper boundary faces relative to the
/// overall maximum.
#[derive(Clone, Debug)]
pub struct Support {
    pub magnitude: Vec<bool>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub lower_level: Vec<f64>,
    pub upper_level: Vec<f64>,
}

impl Support {
    /// Boundary level crossed by `y`, or `None` when `y` is represented.
    pub fn escape_level(&self, y: &[f64]) -> Option<f64> {
        let mut level: Option<f64> = None;
        for (j, &v) in y.iter().enumerate() {
            let c = if self.magnitude[j] { v.abs() } else { v };
            let l = if c < self.lower[j] {
                self.lower_level[j]
            } else if c > self.upper[j] {
                self.upper_level[j]
            } else {
                continue;
            };
            level = Some(level.map_or(l, |m| m.max(l)));
        }
        level
    }
}

pub trait Function: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[f64]) -> Complex64;

    /// Evaluation that can report numerical failure.
    fn try_eval(&self, x: &[f64]) -> crate::Result<Complex64> {
        Ok(self.eval(x))
    }

    /// Values of `|x_axis|` where the function is not smooth along `axis`, or
    /// where a quadrature panel boundary helps resolve a narrow feature.
    fn breakpoints(&self, _axis: usize) -> Vec<f64> {
        Vec::new()
    }

    /// One-dimensional factors, when the function is a tensor product.
    fn factors(&self) -> Option<Vec<Arc<dyn Function>>> {
        None
    }

    /// Terms `(c_i, f_i)` when the function is the linear combination `Σ c_i f_i`.
    fn terms(&self) -> Option<Vec<(Complex64, Arc<dyn Function>)>> {
        None
    }

    /// Bounded representable region, for sampled functions.
    fn support(&self) -> Option<Support> {
        None
    }
}

pub type FnRef = Arc<dyn Function>;

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// Relative distance from an endpoint at which [`Indicator`] reports the
/// jump value, so that `λ^k · λ^{-k} x` still hits it after rounding.
pub const JUMP_TOLERANCE: f64 = 1e-12;

/// Indicator of the open interval `(a, b)`, taking the value `1/2` at the
/// endpoints so that sampled transforms see the mean of the jump.
#[derive(Clone, Copy, Debug)]
pub struct Indicator {
    pub a: f64,
    pub b: f64,
}

impl Indicator {
    pub fn unit() -> Self {
        Self { a: 0.0, b: 1.0 }
    }
}

impl Function for Indicator {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, x: &[f64]) -> Complex64 {
        let t = x[0];
        let at = |e: f64| (t - e).abs() <= JUMP_TOLERANCE * e.abs();
        real(if at(self.a) || at(self.b) {
            0.5
        } else if t > self.a && t < self.b {
            1.0
        } else {
            0.0
        })
    }

    fn breakpoints(&self, _axis: usize) -> Vec<f64> {
        [self.a, self.b].iter().filter(|v| **v != 0.0).map(|v| v.abs()).collect()
    }
}

/// `exp(-(x - c)^2 / (2 w^2))` on `x > 0`, zero on `x <= 0`.
#[derive(Clone, Copy, Debug)]
pub struct GaussianBump {
    pub center: f64,
    pub width: f64,
}

impl Default for GaussianBump {
    fn default() -> Self {
        Self { center: 1.0, width: 0.125 }
    }
}

impl Function for GaussianBump {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, x: &[f64]) -> Complex64 {
        let t = x[0];
        if t <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let z = (t - self.center) / self.width;
        real((-0.5 * z * z).exp())
    }

    fn breakpoints(&self, _axis: usize) -> Vec<f64> {
        [-7.0, -5.0, -3.5, -2.0, -1.0, 0.0, 1.0, 2.0, 3.5, 5.0, 7.0]
            .iter()
            .map(|k| self.center + k * self.width)
            .filter(|v| *v > 0.0)
            .collect()
    }
}

/// `x^a exp(-b x)` on `x > 0`, zero on `x <= 0`.
#[derive(Clone, Copy, Debug)]
pub struct PowerExp {
    pub power: f64,
    pub rate: f64,
}

impl Default for PowerExp {
    fn default() -> Self {
        Self { power: 1.0, rate: 1.0 }
    }
}

impl Function for PowerExp {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, x: &[f64]) -> Complex64 {
        let t = x[0];
        if t <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        real(t.powf(self.power) * (-self.rate * t).exp())
    }

    fn breakpoints(&self, _axis: usize) -> Vec<f64> {
        [0.25, 0.5, 1.0, 2.0, 3.0, 4.5, 6.5, 9.0, 13.0, 18.0, 25.0, 35.0, 50.0]
            .iter()
            .map(|v| v / self.rate)
            .collect()
    }
}

/// `x^a exp(-(ln x - m)^2 / (2 σ^2))` on `x > 0`. With `a = -1/2` and a wide
/// `σ` its Mellin transform concentrates near `s = 0`, which makes it a
/// near-extremal probe for Hardy-type inequalities.
#[derive(Clone, Copy, Debug)]
pub struct LogGaussian {
    pub power: f64,
    pub mean: f64,
    pub sigma: f64,
}

impl Function for LogGaussian {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, x: &[f64]) -> Complex64 {
        let t = x[0];
        if t <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let l = t.ln();
        let z = (l - self.mean) / self.sigma;
        real((self.power * l - 0.5 * z * z).exp())
    }

    fn breakpoints(&self, _axis: usize) -> Vec<f64> {
        (-12..=12)
            .map(|k| (self.mean + 0.5 * k as f64 * self.sigma.min(2.0)).exp())
            .collect()
    }
}

/// `x / (1 + x)` on `x > 0`, zero on `x <= 0`. Tends to 1 at infinity.
#[derive(Clone, Copy, Debug, Default)]
pub struct Saturating;

impl Function for Saturating {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, x: &[f64]) -> Complex64 {
        let t = x[0];
        real(if t > 0.0 { t / (1.0 + t) } else { 0.0 })
    }

    fn breakpoints(&self, _axis: usize) -> Vec<f64> {
        vec![0.25, 1.0, 4.0, 16.0, 64.0]
    }
}

/// A constant on all of ℝⁿ.
#[derive(Clone, Copy, Debug)]
pub struct Constant {
    pub dim: usize,
    pub value: Complex64,
}

impl Function for Constant {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, _x: &[f64]) -> Complex64 {
        self.value
    }
}

/// `f(-x)` for a one-dimensional `f`: moves a profile to the negative half-line.
#[derive(Clone)]
pub struct Reflected(pub FnRef);

impl Function for Reflected {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, x: &[f64]) -> Complex64 {
        self.0.eval(&[-x[0]])
    }

    fn try_eval(&self, x: &[f64]) -> crate::Result<Complex64> {
        self.0.try_eval(&[-x[0]])
    }

    fn breakpoints(&self, axis: usize) -> Vec<f64> {
        self.0.breakpoints(axis)
    }
}

/// Tensor product of one-dimensional factors.
#[derive(Clone)]
pub struct Product {
    factors: Vec<FnRef>,
}

impl Product {
    pub fn new(factors: Vec<FnRef>) -> Self {
        assert!(factors.iter().all(|f| f.dim() == 1), "product factors must be one-dimensional");
        Self { factors }
    }

    /// The same profile along every axis.
    pub fn power(profile: FnRef, n: usize) -> Self {
        Self::new(vec![profile; n])
    }
}

impl Function for Product {
    fn dim(&self) -> usize {
        self.factors.len()
    }

    fn eval(&self, x: &[f64]) -> Complex64 {
        self.factors
            .iter()
            .zip(x)
            .map(|(f, xi)| f.eval(std::slice::from_ref(xi)))
            .product()
    }

    fn try_eval(&self, x: &[f64]) -> crate::Result<Complex64> {
        self.factors.iter().zip(x).map(|(f, xi)| f.try_eval(std::slice::from_ref(xi))).product()
    }

    fn breakpoints(&self, axis: usize) -> Vec<f64> {
        self.factors[axis].breakpoints(0)
    }

    fn factors(&self) -> Option<Vec<FnRef>> {
        Some(self.factors.clone())
    }
}

/// Linear combination `Σ c_i f_i`.
#[derive(Clone)]
pub struct Combination {
    pub terms: Vec<(Complex64, FnRef)>,
}

impl Function for Combination {
    fn dim(&self) -> usize {
        self.terms.first().map_or(1, |(_, f)| f.dim())
    }

    fn eval(&self, x: &[f64]) -> Complex64 {
        self.terms.iter().map(|(c, f)| c * f.eval(x)).sum()
    }

    fn try_eval(&self, x: &[f64]) -> crate::Result<Complex64> {
        self.terms.iter().map(|(c, f)| Ok(c * f.try_eval(x)?)).sum()
    }

    fn terms(&self) -> Option<Vec<(Complex64, FnRef)>> {
        Some(self.terms.clone())
    }

    fn breakpoints(&self, axis: usize) -> Vec<f64> {
        let mut out: Vec<f64> = self.terms.iter().flat_map(|(_, f)| f.breakpoints(axis)).collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

/// Wraps a closure.
pub struct FromFn<F> {
    dim: usize,
    f: F,
}

impl<F> FromFn<F>
where
    F: Fn(&[f64]) -> Complex64 + Send + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> Function for FromFn<F>
where
    F: Fn(&[f64]) -> Complex64 + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64]) -> Complex64 {
        (self.f)(x)
    }
}

/// Identifiers of the shipped one-dimensional profiles.
pub const LIBRARY_IDS: &[&str] = &["indicator01", "gaussian", "xexp", "loggauss", "saturating", "one"];

/// Looks up a shipped profile by identifier and lifts it to a tensor product
/// in dimension `n`.
pub fn library(id: &str, n: usize) -> Option<FnRef> {
    let profile: FnRef = match id {
        "indicator01" => Arc::new(Indicator::unit()),
        "gaussian" => Arc::new(GaussianBump::default()),
        "xexp" => Arc::new(PowerExp::default()),
        "loggauss" => Arc::new(LogGaussian { power: -0.5, mean: 0.0, sigma: 5.0 }),
        "saturating" => Arc::new(Saturating),
        "one" => Arc::new(Constant { dim: 1, value: real(1.0) }),
        _ => return None,
    };
    Some(if n == 1 { profile } else { Arc::new(Product::power(profile, n)) })
}

/// Closed forms used as oracles for the one-dimensional Cesàro average
/// `(1/x) ∫_0^x f` of the library profiles.
pub mod cesaro_oracle {
    /// Average of `1_{(0,1)}`.
    pub fn indicator(x: f64) -> f64 {
        if x <= 1.0 {
            1.0
        } else {
            1.0 / x
        }
    }

    /// Adjoint average `∫_x^∞ 1_{(0,1)}(t) dt / t`.
    pub fn indicator_adjoint(x: f64) -> f64 {
        if x < 1.0 {
            -x.ln()
        } else {
            0.0
        }
    }

    /// Average of `t e^{-t}`.
    pub fn xexp(x: f64) -> f64 {
        // 1 - e^{-x}(1 + x), written to avoid cancellation for small x.
        let num = if x < 1e-3 {
            x * x / 2.0 - x * x * x / 3.0 + x.powi(4) / 8.0
        } else {
            -(-x).exp_m1() - x * (-x).exp()
        };
        num / x
    }

    /// Average of `t / (1 + t)`.
    pub fn saturating(x: f64) -> f64 {
        1.0 - x.ln_1p() / x
    }
}

/// L² norm of a product of one-dimensional factors over the line, by
/// adaptive Simpson on `log|x|` (independent of the grid machinery).
pub fn l2_norm_sq_1d(f: &dyn Function, t_lo: f64, t_hi: f64) -> f64 {
    let g = |t: f64| {
        let x = t.exp();
        (f.eval(&[x]).norm_sqr() + f.eval(&[-x]).norm_sqr()) * x
    };
    let mut knots = vec![t_lo, t_hi];
    for b in f.breakpoints(0) {
        if b > 0.0 {
            let l = b.ln();
            if l > t_lo && l < t_hi {
                knots.push(l);
            }
        }
    }
    knots.sort_by(f64::total_cmp);
    knots
        .windows(2)
        .map(|w| adaptive_simpson(&g, w[0], w[1], 1e-14, 40))
        .sum()
}

fn adaptive_simpson<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    fn rec<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (g(lm), g(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (g(a), g(b), g(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(g, a, b, fa, fm, fb, whole, tol, depth)
}

/// Closed-form squared L² norms of library profiles on (0, ∞).
pub mod norms {
    use super::*;

    pub fn indicator_unit() -> f64 {
        1.0
    }

    /// `∫_0^∞ t^2 e^{-2t} dt = 2 / 2^3`.
    pub fn xexp_unit() -> f64 {
        2.0 / 8.0
    }

    /// `∫_0^∞ t^{2a} exp(-(ln t - m)^2/σ^2) dt = σ √π exp((2a+1) m + (2a+1)^2 σ^2 / 4)`.
    pub fn log_gaussian(g: &LogGaussian) -> f64 {
        let c = 2.0 * g.power + 1.0;
        g.sigma * PI.sqrt() * (c * g.mean + c * c * g.sigma * g.sigma / 4.0).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_takes_midpoint_at_jumps() {
        let f = Indicator::unit();
        assert_eq!(f.eval(&[0.5]).re, 1.0);
        assert_eq!(f.eval(&[1.0]).re, 0.5);
        assert_eq!(f.eval(&[1.5]).re, 0.0);
        assert_eq!(f.breakpoints(0), vec![1.0]);
    }

    #[test]
    fn product_factorises() {
        let f = Product::power(Arc::new(PowerExp::default()), 2);
        let v = f.eval(&[1.0, 2.0]);
        assert!((v.re - (-1.0f64).exp() * 2.0 * (-2.0f64).exp()).abs() < 1e-15);
        assert_eq!(f.factors().unwrap().len(), 2);
    }

    #[test]
    fn simpson_norms_match_closed_forms() {
        let t = |f: &dyn Function| l2_norm_sq_1d(f, -45.0, 6.0);
        assert!((t(&PowerExp::default()) - norms::xexp_unit()).abs() < 1e-11);
        assert!((t(&Indicator::unit()) - norms::indicator_unit()).abs() < 1e-11);
        let g = LogGaussian { power: -0.5, mean: 0.0, sigma: 1.0 };
        assert!((l2_norm_sq_1d(&g, -20.0, 20.0) - norms::log_gaussian(&g)).abs() < 1e-11);
    }

    #[test]
    fn library_lookup() {
        for id in LIBRARY_IDS {
            assert_eq!(library(id, 2).unwrap().dim(), 2);
        }
        assert!(library("nope", 1).is_none());
    }

    #[test]
    fn cesaro_closed_forms_are_consistent() {
        // Small-x branch and the direct formula agree at the switch point.
        let x: f64 = 1e-3;
        let direct = (1.0 - (-x).exp() * (1.0 + x)) / x;
        assert!((cesaro_oracle::xexp(x) - direct).abs() < 1e-12);
        assert!((cesaro_oracle::saturating(1e3) - (1.0 - 1001f64.ln() / 1e3)).abs() < 1e-15);
    }
}
