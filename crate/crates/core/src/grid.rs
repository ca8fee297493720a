//! Sampled functions on tensor grids.
//!
//! A [`GridFunction`] holds complex samples at the tensor nodes of its
//! axes, with one quadrature weight per node and axis. Logarithmic axes
//! live in a single hyperoctant (`x = ε e^t`, uniform `t`) and carry the
//! weights `Δt · e^t` of the substituted integral. Off-grid evaluation
//! interpolates cubically in `t` and extends by zero outside the sampled
//! range.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::function::{Function, Support};
use crate::quadrature::gauss_legendre;

#[derive(Clone, Debug, PartialEq)]
pub enum AxisKind {
    /// `x_k = sign · exp(t_min + k Δt)`.
    Log { t_min: f64, dt: f64 },
    /// `s_m = (m - N/2) Δs`.
    Frequency { ds: f64 },
    Custom,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub kind: AxisKind,
    /// Hyperoctant sign `ε` for logarithmic axes, `+1` otherwise.
    pub sign: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Axis {
    /// `n` nodes `t_k = t_min + kΔt`, `Δt = (t_max - t_min)/n`.
    pub fn log(sign: f64, t_min: f64, t_max: f64, n: usize) -> Self {
        assert!(n >= 2 && t_max > t_min, "log axis needs n ≥ 2 and t_max > t_min");
        let sign = if sign < 0.0 { -1.0 } else { 1.0 };
        let dt = (t_max - t_min) / n as f64;
        let t: Vec<f64> = (0..n).map(|k| t_min + k as f64 * dt).collect();
        Self {
            kind: AxisKind::Log { t_min, dt },
            sign,
            nodes: t.iter().map(|t| sign * t.exp()).collect(),
            weights: t.iter().map(|t| dt * t.exp()).collect(),
        }
    }

    /// The frequency grid dual to a logarithmic axis of `n` nodes and spacing `dt`.
    pub fn frequency(n: usize, dt: f64) -> Self {
        let ds = 2.0 * std::f64::consts::PI / (n as f64 * dt);
        let half = (n / 2) as f64;
        Self {
            kind: AxisKind::Frequency { ds },
            sign: 1.0,
            nodes: (0..n).map(|m| (m as f64 - half) * ds).collect(),
            weights: vec![ds; n],
        }
    }

    /// Gauss–Legendre nodes on `[a, b]`.
    pub fn gauss(a: f64, b: f64, n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        Self {
            kind: AxisKind::Custom,
            sign: 1.0,
            nodes: x.iter().map(|x| c + h * x).collect(),
            weights: w.iter().map(|w| h * w).collect(),
        }
    }

    pub fn custom(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() || nodes.is_empty() {
            return Err(Error::GridMismatch("axis needs one weight per node".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::GridMismatch("axis nodes must be strictly increasing".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::GridMismatch("axis weights must be positive".into()));
        }
        Ok(Self { kind: AxisKind::Custom, sign: 1.0, nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Interpolation coordinate of a node: `t` on log axes, `x` otherwise.
    fn coord(&self, k: usize) -> f64 {
        match self.kind {
            AxisKind::Log { t_min, dt } => t_min + k as f64 * dt,
            _ => self.nodes[k],
        }
    }

    /// Four-point Lagrange stencil at `x`; `None` outside the sampled range.
    fn stencil(&self, x: f64) -> Option<(usize, [f64; 4], usize)> {
        let n = self.len();
        let (pos, c) = match self.kind {
            AxisKind::Log { t_min, dt } => {
                if x * self.sign <= 0.0 {
                    return None;
                }
                let t = (x * self.sign).ln();
                ((t - t_min) / dt, t)
            }
            _ => {
                let i = self.nodes.partition_point(|v| *v <= x);
                if i == 0 {
                    if x == self.nodes[0] {
                        (0.0, x)
                    } else {
                        return None;
                    }
                } else if i == n {
                    if x == self.nodes[n - 1] {
                        ((n - 1) as f64, x)
                    } else {
                        return None;
                    }
                } else {
                    let (a, b) = (self.nodes[i - 1], self.nodes[i]);
                    ((i - 1) as f64 + (x - a) / (b - a), x)
                }
            }
        };
        let last = (n - 1) as f64;
        if !(pos >= -1e-9 && pos <= last + 1e-9) {
            return None;
        }
        if n < 4 {
            // Linear interpolation on tiny axes.
            let i = (pos.floor().max(0.0) as usize).min(n.saturating_sub(2));
            if n == 1 {
                return Some((0, [1.0, 0.0, 0.0, 0.0], 1));
            }
            let f = (pos - i as f64).clamp(0.0, 1.0);
            return Some((i, [1.0 - f, f, 0.0, 0.0], 2));
        }
        let i = pos.floor().max(0.0) as usize;
        let start = i.saturating_sub(1).min(n - 4);
        let xs: [f64; 4] = std::array::from_fn(|j| self.coord(start + j));
        let mut w = [0.0; 4];
        for j in 0..4 {
            let mut l = 1.0;
            for m in 0..4 {
                if m != j {
                    l *= (c - xs[m]) / (xs[j] - xs[m]);
                }
            }
            w[j] = l;
        }
        Some((start, w, 4))
    }
}

#[derive(Clone, Debug)]
pub struct GridFunction {
    pub axes: Vec<Axis>,
    /// Row-major, last axis fastest.
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(axes: Vec<Axis>, values: Vec<Complex64>) -> Result<Self> {
        let len: usize = axes.iter().map(Axis::len).product();
        if values.len() != len {
            return Err(Error::GridMismatch(format!("{} values for a grid of {len} nodes", values.len())));
        }
        Ok(Self { axes, values })
    }

    pub fn zeros(axes: Vec<Axis>) -> Self {
        let len = axes.iter().map(Axis::len).product();
        Self { axes, values: vec![Complex64::new(0.0, 0.0); len] }
    }

    /// Samples `f` at every node, in parallel.
    pub fn sample(axes: Vec<Axis>, f: &dyn Function) -> Result<Self> {
        if f.dim() != axes.len() {
            return Err(Error::DimensionMismatch { expected: axes.len(), found: f.dim() });
        }
        Ok(Self::sample_with(axes, |x| f.eval(x)))
    }

    pub fn sample_with<F>(axes: Vec<Axis>, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Send + Sync,
    {
        let mut g = Self::zeros(axes);
        let axes = &g.axes;
        g.values.par_iter_mut().enumerate().for_each(|(i, v)| {
            *v = f(&point_of(axes, i));
        });
        g
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Axis::len).collect()
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        point_of(&self.axes, flat)
    }

    pub fn weight(&self, flat: usize) -> f64 {
        let mut rem = flat;
        let mut w = 1.0;
        for axis in self.axes.iter().rev() {
            w *= axis.weights[rem % axis.len()];
            rem /= axis.len();
        }
        w
    }

    fn weights(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.weight(i)).collect()
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.axes == other.axes
    }

    fn check_grid(&self, other: &Self) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch("functions live on different grids".into()))
        }
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        let w = self.weights();
        let s: f64 = self.values.iter().zip(&w).map(|(v, w)| w * v.norm().powf(p)).sum();
        s.powf(1.0 / p)
    }

    pub fn l2_norm(&self) -> f64 {
        let w = self.weights();
        self.values.iter().zip(&w).map(|(v, w)| w * v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `Σ w f ḡ`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_grid(other)?;
        let w = self.weights();
        Ok(self.values.iter().zip(&other.values).zip(&w).map(|((a, b), w)| w * a * b.conj()).sum())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        Ok(Self { axes: self.axes.clone(), values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect() })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        Ok(Self { axes: self.axes.clone(), values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { axes: self.axes.clone(), values: self.values.iter().map(|v| c * v).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest `|v|` on the boundary of the grid, relative to the overall maximum.
    pub fn edge_level(&self) -> f64 {
        let max = self.max_abs();
        if max == 0.0 {
            return 0.0;
        }
        let shape = self.shape();
        let mut edge: f64 = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            let mut rem = i;
            let mut on_edge = false;
            for &n in shape.iter().rev() {
                let k = rem % n;
                rem /= n;
                on_edge |= k == 0 || k + 1 == n;
            }
            if on_edge {
                edge = edge.max(v.norm());
            }
        }
        edge / max
    }
}

fn point_of(axes: &[Axis], flat: usize) -> Vec<f64> {
    let mut x = vec![0.0; axes.len()];
    let mut rem = flat;
    for (j, axis) in axes.iter().enumerate().rev() {
        x[j] = axis.nodes[rem % axis.len()];
        rem /= axis.len();
    }
    x
}

impl Function for GridFunction {
    fn dim(&self) -> usize {
        self.axes.len()
    }

    fn eval(&self, x: &[f64]) -> Complex64 {
        let n = self.dim();
        let mut stencils = Vec::with_capacity(n);
        for (axis, &xi) in self.axes.iter().zip(x) {
            match axis.stencil(xi) {
                Some(s) => stencils.push(s),
                None => return Complex64::new(0.0, 0.0),
            }
        }
        let shape = self.shape();
        let total: usize = stencils.iter().map(|s| s.2).product();
        let mut acc = Complex64::new(0.0, 0.0);
        for c in 0..total {
            let mut rem = c;
            let mut flat = 0;
            let mut w = 1.0;
            for (j, (start, weights, width)) in stencils.iter().enumerate() {
                let o = rem % width;
                rem /= width;
                flat = flat * shape[j] + start + o;
                w *= weights[o];
            }
            acc += w * self.values[flat];
        }
        acc
    }

    fn support(&self) -> Option<Support> {
        let max = self.max_abs();
        let shape = self.shape();
        let n = self.dim();
        let mut lower_level = vec![0.0f64; n];
        let mut upper_level = vec![0.0f64; n];
        if max > 0.0 {
            for (i, v) in self.values.iter().enumerate() {
                let mut rem = i;
                for j in (0..n).rev() {
                    let k = rem % shape[j];
                    rem /= shape[j];
                    if k == 0 {
                        lower_level[j] = lower_level[j].max(v.norm() / max);
                    }
                    if k + 1 == shape[j] {
                        upper_level[j] = upper_level[j].max(v.norm() / max);
                    }
                }
            }
        }
        let mut sup = Support {
            magnitude: Vec::with_capacity(n),
            lower: Vec::with_capacity(n),
            upper: Vec::with_capacity(n),
            lower_level,
            upper_level,
        };
        for a in &self.axes {
            let (first, last) = (a.nodes[0], a.nodes[a.len() - 1]);
            let log = matches!(a.kind, AxisKind::Log { .. });
            sup.magnitude.push(log);
            if log {
                sup.lower.push(first.abs());
                sup.upper.push(last.abs());
            } else {
                sup.lower.push(first);
                sup.upper.push(last);
            }
        }
        Some(sup)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{GaussianBump, Indicator};

    #[test]
    fn log_axis_weights_integrate_exponential() {
        // ∫_0^∞ e^{-x} dx on a log grid.
        let axis = Axis::log(1.0, -40.0, 6.0, 4096);
        let g = GridFunction::sample_with(vec![axis], |x| Complex64::new((-x[0]).exp(), 0.0));
        let sum: Complex64 = (0..g.len()).map(|i| g.weight(i) * g.values[i]).sum();
        assert!((sum.re - 1.0).abs() < 1e-10, "{}", sum.re);
    }

    #[test]
    fn indicator_norm_on_log_grid() {
        // Trapezoid sum of e^t up to t = 0 with the half value at the jump.
        let g = GridFunction::sample(vec![Axis::log(1.0, -40.0, 40.0, 4096)], &Indicator::unit()).unwrap();
        let dt: f64 = 80.0 / 4096.0;
        let exact = dt / (1.0 - (-dt).exp()) - 0.75 * dt;
        assert!((g.l2_norm().powi(2) - exact).abs() < 1e-12);
    }

    #[test]
    fn interpolation_is_exact_at_nodes_and_cubic_between() {
        let f = GaussianBump::default();
        let g = GridFunction::sample(vec![Axis::log(1.0, -12.0, 4.0, 8192)], &f).unwrap();
        for i in (0..g.len()).step_by(97) {
            let x = g.point(i);
            assert!((g.eval(&x) - g.values[i]).norm() < 1e-14);
        }
        for x in [0.3, 0.77, 1.0, 1.21, 2.0] {
            assert!((g.eval(&[x]) - f.eval(&[x])).norm() < 1e-7, "x = {x}");
        }
        assert_eq!(g.eval(&[-1.0]), Complex64::new(0.0, 0.0));
        assert_eq!(g.eval(&[1e3]), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn custom_axis_validation() {
        assert!(Axis::custom(vec![0.0, 1.0, 1.0], vec![1.0; 3]).is_err());
        assert!(Axis::custom(vec![0.0, 1.0], vec![1.0, 0.0]).is_err());
        assert!(Axis::custom(vec![0.0, 1.0], vec![1.0, 1.0]).is_ok());
    }

    #[test]
    fn edge_level_detects_truncation() {
        let axes = vec![Axis::log(1.0, -3.0, 3.0, 64)];
        let g = GridFunction::sample_with(axes.clone(), |_| Complex64::new(1.0, 0.0));
        assert_eq!(g.edge_level(), 1.0);
        let h = GridFunction::sample_with(vec![Axis::log(1.0, -6.0, 6.0, 64)], |x| Complex64::new((-x[0].ln().powi(2)).exp(), 0.0));
        assert!(h.edge_level() < 1e-14);
    }

    #[test]
    fn two_dimensional_interpolation() {
        let axes = vec![Axis::log(1.0, -3.0, 3.0, 256), Axis::log(-1.0, -3.0, 3.0, 256)];
        let f = |x: &[f64]| Complex64::new(x[0].ln().sin() * (-x[1]).ln().cos(), 0.0);
        let g = GridFunction::sample_with(axes, f);
        let x = [0.9, -1.7];
        assert!((g.eval(&x) - f(&x)).norm() < 1e-7);
        assert_eq!(g.eval(&[0.9, 1.7]), Complex64::new(0.0, 0.0));
    }
}
