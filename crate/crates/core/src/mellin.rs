//! Modified Mellin transform on a hyperoctant.
//!
//! With `x_j = ε_j e^{t_j}` the transform
//! `(M f)(s) = (2π)^{-n/2} ∫ |x|^{-1/q + is} f(x) dx` becomes a Fourier
//! integral of `e^{t(1 − 1/q)} f(ε e^t)`, computed by FFT on a uniform
//! `t`-grid. The dual frequencies are `s_m = (m − N/2) Δs` with
//! `Δs = 2π/(N Δt)`. At `q = 2` the discrete pair is exactly unitary.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::function::{FnRef, Function};
use crate::grid::{Axis, AxisKind, GridFunction};
use crate::operator::{octants, sample, Applied};
use crate::spec::OperatorSpec;
use crate::symbol::Symbol;

/// Largest edge level of `e^{t(1-1/q)} f` accepted by the forward transform.
pub const EDGE_TOLERANCE: f64 = 1e-6;
/// Highest dimension handled by the tensor transform.
pub const MAX_DIM: usize = 3;
/// Nodes per axis of the one-dimensional transforms used for tensor products.
pub const LINE_NODES: usize = 4096;
/// `t`-refinement used by [`diagonalization_residual`] on one-dimensional
/// transforms. The frequency nodes are unchanged; aliasing moves out by
/// this factor.
pub const OVERSAMPLE: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct MellinGrid {
    pub t_min: f64,
    pub dt: f64,
    /// Nodes per axis, a power of two.
    pub n: usize,
    pub signs: Vec<f64>,
}

impl MellinGrid {
    pub fn new(t_min: f64, t_max: f64, n: usize, signs: Vec<f64>) -> Result<Self> {
        if !n.is_power_of_two() || n < 2 {
            return Err(Error::GridMismatch(format!("node count {n} is not a power of two")));
        }
        if !(t_max > t_min) || !t_min.is_finite() || !t_max.is_finite() {
            return Err(Error::GridMismatch(format!("empty range [{t_min}, {t_max}]")));
        }
        if signs.is_empty() || signs.len() > MAX_DIM {
            return Err(Error::GridMismatch(format!("dimension {} outside 1..={MAX_DIM}", signs.len())));
        }
        let signs = signs.into_iter().map(|s| if s < 0.0 { -1.0 } else { 1.0 }).collect();
        Ok(Self { t_min, dt: (t_max - t_min) / n as f64, n, signs })
    }

    /// `t ∈ [−40, 40]` on the positive hyperoctant, with `4096`, `1024` or
    /// `128` nodes per axis in dimension 1, 2 or 3.
    pub fn default_for(dim: usize) -> Result<Self> {
        let n = match dim {
            1 => 4096,
            2 => 1024,
            _ => 128,
        };
        Self::new(-40.0, 40.0, n, vec![1.0; dim])
    }

    /// Default grid for a spec. For single-generator discrete specs the
    /// spacing divides `ln λ`, so that the jumps `f(λ^k x)` inherits from a
    /// discontinuous `f` land on nodes like those of `f` itself.
    pub fn for_spec(spec: &OperatorSpec) -> Result<Self> {
        let mut grid = Self::default_for(spec.dimension)?;
        let generators: Option<Vec<f64>> = spec.family.eigen.iter().map(|e| e.generator()).collect();
        if let Some(g) = generators.filter(|_| spec.measure.is_counting()) {
            let step = g.iter().map(|l| l.ln().abs()).fold(0.0, f64::max);
            if step > 0.0 && g.iter().all(|l| l.ln().abs() == step || *l == 1.0) {
                let per = (step / grid.dt).round().max(1.0);
                grid.dt = step / per;
                grid.t_min = -(grid.n as f64 / 2.0) * grid.dt;
            }
        }
        Ok(grid)
    }

    pub fn t_max(&self) -> f64 {
        self.t_min + self.n as f64 * self.dt
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    pub fn with_signs(&self, signs: &[f64]) -> Self {
        Self { signs: signs.to_vec(), ..self.clone() }
    }

    /// One-dimensional grid over the same `t`-range with at least
    /// [`LINE_NODES`] nodes.
    pub fn line(&self, sign: f64) -> Self {
        let n = self.n.max(LINE_NODES);
        let dt = self.dt * self.n as f64 / n as f64;
        Self { t_min: self.t_min, dt, n, signs: vec![sign] }
    }

    /// Same `t`-range and frequency spacing, `r` times finer in `t`.
    pub fn refined(&self, r: usize) -> Self {
        Self { dt: self.dt / r as f64, n: self.n * r, ..self.clone() }
    }

    pub fn log_axes(&self) -> Vec<Axis> {
        self.signs.iter().map(|&s| self.log_axis(s)).collect()
    }

    fn log_axis(&self, sign: f64) -> Axis {
        let t: Vec<f64> = (0..self.n).map(|k| self.t_min + k as f64 * self.dt).collect();
        Axis {
            kind: AxisKind::Log { t_min: self.t_min, dt: self.dt },
            sign,
            nodes: t.iter().map(|t| sign * t.exp()).collect(),
            weights: t.iter().map(|t| self.dt * t.exp()).collect(),
        }
    }

    pub fn frequency_axes(&self) -> Vec<Axis> {
        vec![Axis::frequency(self.n, self.dt); self.dim()]
    }

    pub fn sample(&self, f: &dyn Function) -> Result<GridFunction> {
        sample(f, &self.log_axes())
    }

    /// Reads the grid back from logarithmic axes.
    pub fn from_axes(axes: &[Axis]) -> Result<Self> {
        let first = axes.first().ok_or_else(|| Error::GridMismatch("no axes".into()))?;
        let AxisKind::Log { t_min, dt } = first.kind else {
            return Err(Error::GridMismatch("Mellin transform needs logarithmic axes".into()));
        };
        let n = first.len();
        let grid = Self::new(t_min, t_min + n as f64 * dt, n, axes.iter().map(|a| a.sign).collect())?;
        for a in axes {
            if a.kind != first.kind || a.len() != n {
                return Err(Error::GridMismatch("axes differ in range or node count".into()));
            }
        }
        Ok(Self { dt, ..grid })
    }
}

/// Applies the 1-D FFT along every axis of a row-major array.
fn fft_all_axes(values: &mut [Complex64], shape: &[usize], direction: FftDirection) {
    let mut planner = FftPlanner::new();
    let total = values.len();
    let mut stride = 1;
    for &len in shape.iter().rev() {
        let fft = planner.plan_fft(len, direction);
        let mut line = vec![Complex64::new(0.0, 0.0); len];
        let block = stride * len;
        for start in (0..total).step_by(block) {
            for offset in 0..stride {
                for (k, v) in line.iter_mut().enumerate() {
                    *v = values[start + offset + k * stride];
                }
                fft.process(&mut line);
                for (k, v) in line.iter().enumerate() {
                    values[start + offset + k * stride] = *v;
                }
            }
        }
        stride *= len;
    }
}

/// Multi-indices of a row-major array, last index fastest.
fn index_of(flat: usize, n: usize, dim: usize, out: &mut [usize]) {
    let mut rem = flat;
    for j in (0..dim).rev() {
        out[j] = rem % n;
        rem /= n;
    }
}

/// Largest `|v|` on the grid boundary relative to the maximum.
fn edge_level(values: &[Complex64], n: usize, dim: usize) -> f64 {
    let max = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    let mut idx = vec![0; dim];
    let mut edge: f64 = 0.0;
    for (i, v) in values.iter().enumerate() {
        index_of(i, n, dim, &mut idx);
        if idx.iter().any(|&k| k == 0 || k + 1 == n) {
            edge = edge.max(v.norm());
        }
    }
    edge / max
}

/// `(M f)(s)` for `f` sampled on a logarithmic grid, with the weight
/// `|x|^{-1/q}`. Fails when `e^{t(1−1/q)} f` is not negligible at the edge of
/// the `t`-range.
pub fn mellin_forward(f: &GridFunction, q: f64) -> Result<GridFunction> {
    if !(q >= 1.0) {
        return Err(Error::Invalid(format!("Mellin exponent q = {q} below 1")));
    }
    let grid = MellinGrid::from_axes(&f.axes)?;
    let (n, dim, dt) = (grid.n, grid.dim(), grid.dt);
    let power = 1.0 - 1.0 / q;
    let mut idx = vec![0; dim];
    let mut h: Vec<Complex64> = f
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            index_of(i, n, dim, &mut idx);
            let t: f64 = idx.iter().map(|&k| grid.t_min + k as f64 * dt).sum();
            v * (power * t).exp()
        })
        .collect();
    let level = edge_level(&h, n, dim);
    if level > EDGE_TOLERANCE {
        return Err(Error::TruncationMass { mass: level });
    }
    for (i, v) in h.iter_mut().enumerate() {
        index_of(i, n, dim, &mut idx);
        if idx.iter().sum::<usize>() % 2 == 1 {
            *v = -*v;
        }
    }
    fft_all_axes(&mut h, &vec![n; dim], FftDirection::Inverse);
    let freq = Axis::frequency(n, dt);
    let scale = (dt / (2.0 * PI).sqrt()).powi(dim as i32);
    for (i, v) in h.iter_mut().enumerate() {
        index_of(i, n, dim, &mut idx);
        let phase: f64 = idx.iter().map(|&m| freq.nodes[m] * grid.t_min).sum();
        *v *= Complex64::from_polar(scale, phase);
    }
    GridFunction::new(grid.frequency_axes(), h)
}

/// Inverse of the `q = 2` transform, back onto the logarithmic grid.
pub fn mellin_inverse(g: &GridFunction, grid: &MellinGrid) -> Result<GridFunction> {
    if g.axes != grid.frequency_axes() {
        return Err(Error::GridMismatch("frequency axes do not match the Mellin grid".into()));
    }
    let (n, dim, dt) = (grid.n, grid.dim(), grid.dt);
    let freq = &g.axes[0];
    let ds = 2.0 * PI / (n as f64 * dt);
    let mut idx = vec![0; dim];
    let mut h: Vec<Complex64> = g
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            index_of(i, n, dim, &mut idx);
            let phase: f64 = idx.iter().map(|&m| freq.nodes[m] * grid.t_min).sum();
            v * Complex64::from_polar(1.0, -phase)
        })
        .collect();
    fft_all_axes(&mut h, &vec![n; dim], FftDirection::Forward);
    let scale = (ds / (2.0 * PI).sqrt()).powi(dim as i32);
    for (i, v) in h.iter_mut().enumerate() {
        index_of(i, n, dim, &mut idx);
        let t: f64 = idx.iter().map(|&k| grid.t_min + k as f64 * dt).sum();
        let sign = if idx.iter().sum::<usize>() % 2 == 1 { -scale } else { scale };
        *v *= sign * (-0.5 * t).exp();
    }
    GridFunction::new(grid.log_axes(), h)
}

/// `x ↦ f(Cx)` for orthogonal `C`.
pub struct Rotated {
    f: FnRef,
    c: DMatrix<f64>,
}

impl Function for Rotated {
    fn dim(&self) -> usize {
        self.f.dim()
    }

    fn eval(&self, x: &[f64]) -> Complex64 {
        let y = &self.c * nalgebra::DVector::from_column_slice(x);
        self.f.eval(y.as_slice())
    }

    fn try_eval(&self, x: &[f64]) -> Result<Complex64> {
        let y = &self.c * nalgebra::DVector::from_column_slice(x);
        self.f.try_eval(y.as_slice())
    }
}

/// `x ↦ f(Cx)` with `C` row-major; `C` must be orthogonal to `1e-10`.
pub fn rotate_frame(f: FnRef, c: &[f64]) -> Result<FnRef> {
    let n = f.dim();
    if c.len() != n * n {
        return Err(Error::DimensionMismatch { expected: n * n, found: c.len() });
    }
    let m = DMatrix::from_row_slice(n, n, c);
    let defect = (m.transpose() * &m - DMatrix::identity(n, n)).amax();
    if defect > 1e-10 {
        return Err(Error::NotOrthogonal(defect));
    }
    Ok(Arc::new(Rotated { f, c: m }))
}

/// The central `n` frequencies along every axis of a transform computed on
/// a refined grid.
fn central(g: &GridFunction, n: usize, dt: f64) -> Result<GridFunction> {
    let big = g.axes[0].len();
    let dim = g.dim();
    let off = (big - n) / 2;
    let mut idx = vec![0; dim];
    let total = n.pow(dim as u32);
    let values = (0..total)
        .map(|i| {
            index_of(i, n, dim, &mut idx);
            let flat = idx.iter().fold(0, |acc, &k| acc * big + k + off);
            g.values[flat]
        })
        .collect();
    GridFunction::new(vec![Axis::frequency(n, dt); dim], values)
}

/// `M f` on the frequency nodes of `grid`, computed from samples `r` times
/// finer in `t`.
fn transform_on(f: &dyn Function, grid: &MellinGrid, r: usize) -> Result<GridFunction> {
    if r == 1 {
        return mellin_forward(&grid.sample(f)?, 2.0);
    }
    let fine = grid.refined(r);
    central(&mellin_forward(&fine.sample(f)?, 2.0)?, grid.n, grid.dt)
}

/// Symbol values on the frequency grid, row-major.
fn symbol_on(sym: &Symbol, axes: &[Axis]) -> Result<Vec<Complex64>> {
    let g = GridFunction::zeros(axes.to_vec());
    let points: Vec<Vec<f64>> = (0..g.len()).map(|i| g.point(i)).collect();
    sym.eval_many(&points)
}

/// `(M(Hg), φ·Mg, Mg)` on one half-line pair, scaled by `√Δs` and with the
/// negative half-line appended.
fn line_pieces(spec: &OperatorSpec, g: FnRef, grid: &MellinGrid) -> Result<[Vec<Complex64>; 3]> {
    let sym = Symbol::from_spec(spec)?;
    let phi = symbol_on(&sym, &grid.line(1.0).frequency_axes())?;
    let hg: FnRef = Arc::new(Applied::new(spec, g.clone())?);
    let mut out = [Vec::new(), Vec::new(), Vec::new()];
    for sign in [1.0, -1.0] {
        let line = grid.line(sign);
        if line.sample(g.as_ref())?.max_abs() == 0.0 {
            continue;
        }
        let mf = transform_on(g.as_ref(), &line, OVERSAMPLE)?;
        let mh = transform_on(hg.as_ref(), &line, OVERSAMPLE)?;
        let w = mf.axes[0].weights[0].sqrt();
        out[0].extend(mh.values.iter().map(|v| v * w));
        out[1].extend(mf.values.iter().zip(&phi).map(|(v, p)| v * p * w));
        out[2].extend(mf.values.iter().map(|v| v * w));
    }
    Ok(out)
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// `‖⊗a_j − ⊗b_j‖²` through the telescoping sum
/// `Σ_j a_1⊗…⊗a_{j−1}⊗(a_j − b_j)⊗b_{j+1}⊗…⊗b_n`.
fn tensor_distance_sq(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    let n = a.len();
    let d: Vec<Vec<Complex64>> = a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(u, v)| u - v).collect()).collect();
    let pick = |j: usize, i: usize| -> &[Complex64] {
        if i < j {
            &a[i]
        } else if i == j {
            &d[i]
        } else {
            &b[i]
        }
    };
    let mut total = Complex64::new(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            total += (0..n).map(|i| dot(pick(j, i), pick(k, i))).product::<Complex64>();
        }
    }
    total.re.max(0.0)
}

/// `‖M(Hf) − φ·Mf‖₂ / ‖Mf‖₂` over the frequency nodes of `grid`, summed over
/// all hyperoctants. One-dimensional transforms (including the factors of
/// separable specs and inputs) are sampled [`OVERSAMPLE`] times finer in
/// `t`. Families with a non-trivial frame are checked in the rotated frame:
/// `Ĉ(Hf)` against `φ · M(Ĉf)`.
pub fn diagonalization_residual(spec: &OperatorSpec, f: FnRef, grid: &MellinGrid) -> Result<f64> {
    if spec.p() != 2.0 {
        return Err(Error::RequiresL2(spec.p()));
    }
    let n = spec.dimension;
    if f.dim() != n || grid.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: if f.dim() != n { f.dim() } else { grid.dim() } });
    }
    if n > 1 {
        if let (Some(specs), Some(fs)) = (spec.factorize(), f.factors()) {
            let mut a = Vec::with_capacity(n);
            let mut b = Vec::with_capacity(n);
            let mut norm = 1.0;
            for (s, g) in specs.iter().zip(fs) {
                let [mh, pm, m] = line_pieces(s, g, grid)?;
                norm *= dot(&m, &m).re;
                a.push(mh);
                b.push(pm);
            }
            return Ok((tensor_distance_sq(&a, &b) / norm).sqrt());
        }
    }
    let sym = Symbol::from_spec(spec)?;
    let phi = symbol_on(&sym, &grid.frequency_axes())?;
    let identity = spec.family.is_identity_basis();
    let (f, hf): (FnRef, FnRef) = if identity {
        (f.clone(), Arc::new(Applied::new(spec, f)?))
    } else {
        let c = &spec.family.basis;
        (rotate_frame(f.clone(), c)?, rotate_frame(Arc::new(Applied::new(spec, f)?), c)?)
    };
    let mut num = 0.0;
    let mut den = 0.0;
    for signs in octants(n) {
        let g = grid.with_signs(&signs);
        let fs = g.sample(f.as_ref())?;
        if identity && fs.max_abs() == 0.0 {
            continue;
        }
        let r = if n == 1 { OVERSAMPLE } else { 1 };
        let mf = transform_on(f.as_ref(), &g, r)?;
        let mh = transform_on(hf.as_ref(), &g, r)?;
        let w = mf.weight(0);
        num += w * mh.values.iter().zip(&mf.values).zip(&phi).map(|((h, v), p)| (h - p * v).norm_sqr()).sum::<f64>();
        den += w * mf.values.iter().map(|v| v.norm_sqr()).sum::<f64>();
    }
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok((num / den).sqrt())
}
