//! Composite Gauss–Legendre rules on box axes.
//!
//! Each axis `[lo, hi]` is covered by panels carrying a fixed-order
//! Gauss–Legendre rule. Panels next to an endpoint where the integrand is
//! singular (or where an eigenvalue function tends to zero and the symbol
//! integrand oscillates like `u^{-is}`) are graded geometrically, so the
//! rule is uniform in `log(u - lo)` or `log(hi - u)` there.
//!
//! Panels anchored at an endpoint store their coordinates as *gaps* from that
//! endpoint. This keeps `hi - u` exact near `hi`, where a kernel such as
//! `k (1 - u)^{k-1}` must be evaluated from the gap rather than from `u`.

use serde::{Deserialize, Serialize};

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "Gauss-Legendre order must be positive");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P_n'(x).
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Quadrature descriptor for one box axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxRule {
    /// Gauss–Legendre nodes per panel.
    pub gauss_order: usize,
    /// Ratio between consecutive graded panels, in `(0, 1)`.
    pub grading_ratio: f64,
    /// Smallest graded gap, relative to the axis length.
    pub grading_depth: f64,
}

impl Default for BoxRule {
    fn default() -> Self {
        Self {
            gauss_order: 16,
            grading_ratio: 0.25,
            grading_depth: 1e-30,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Anchor {
    /// Coordinates are gaps `u - lo`.
    Lower,
    /// Coordinates are gaps `hi - u`.
    Upper,
    /// Coordinates are `u` itself.
    Free,
}

#[derive(Clone, Copy, Debug)]
pub struct Panel {
    pub anchor: Anchor,
    pub a: f64,
    pub b: f64,
    /// Innermost graded panel touching the endpoint. Excluded from
    /// oscillation refinement: its total mass is below the grading depth.
    pub tail: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct AxisNode {
    pub u: f64,
    pub gap_hi: f64,
    pub weight: f64,
}

#[derive(Clone, Debug)]
pub struct AxisRule {
    lo: f64,
    hi: f64,
    panels: Vec<Panel>,
    gl_nodes: Vec<f64>,
    gl_weights: Vec<f64>,
}

impl AxisRule {
    pub fn new(lo: f64, hi: f64, rule: &BoxRule, grade_lo: bool, grade_hi: bool) -> Self {
        let (gl_nodes, gl_weights) = gauss_legendre(rule.gauss_order);
        let w = hi - lo;
        let half = 0.5 * w;
        let floor = rule.grading_depth * w;
        let mut panels = Vec::new();
        let graded = |anchor: Anchor, panels: &mut Vec<Panel>| {
            let mut g = half;
            while g > floor {
                let next = g * rule.grading_ratio;
                panels.push(Panel { anchor, a: next, b: g, tail: false });
                g = next;
            }
            panels.push(Panel { anchor, a: 0.0, b: g, tail: true });
        };
        let free = |a: f64, b: f64, pieces: usize, panels: &mut Vec<Panel>| {
            let h = (b - a) / pieces as f64;
            for i in 0..pieces {
                let pa = a + h * i as f64;
                let pb = if i + 1 == pieces { b } else { a + h * (i + 1) as f64 };
                panels.push(Panel { anchor: Anchor::Free, a: pa, b: pb, tail: false });
            }
        };
        match (grade_lo, grade_hi) {
            (true, true) => {
                graded(Anchor::Lower, &mut panels);
                graded(Anchor::Upper, &mut panels);
            }
            (true, false) => {
                graded(Anchor::Lower, &mut panels);
                free(lo + half, hi, 2, &mut panels);
            }
            (false, true) => {
                free(lo, lo + half, 2, &mut panels);
                graded(Anchor::Upper, &mut panels);
            }
            (false, false) => free(lo, hi, 4, &mut panels),
        }
        Self { lo, hi, panels, gl_nodes, gl_weights }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub fn node_count(&self) -> usize {
        self.panels.len() * self.gl_nodes.len()
    }

    /// `u`-interval covered by a panel.
    pub fn u_range(&self, p: &Panel) -> (f64, f64) {
        match p.anchor {
            Anchor::Lower => (self.lo + p.a, self.lo + p.b),
            Anchor::Upper => (self.hi - p.b, self.hi - p.a),
            Anchor::Free => (p.a, p.b),
        }
    }

    fn coordinate(&self, anchor: Anchor, u: f64) -> f64 {
        match anchor {
            Anchor::Lower => u - self.lo,
            Anchor::Upper => self.hi - u,
            Anchor::Free => u,
        }
    }

    /// Splits the panel containing `u` so that `u` becomes a panel boundary.
    pub fn split_at(&mut self, u: f64) {
        if !(u > self.lo && u < self.hi) || !u.is_finite() {
            return;
        }
        for idx in 0..self.panels.len() {
            let p = self.panels[idx];
            let c = self.coordinate(p.anchor, u);
            let len = p.b - p.a;
            if c > p.a + 1e-13 * len && c < p.b - 1e-13 * len {
                self.panels[idx] = Panel { b: c, ..p };
                self.panels.push(Panel { a: c, tail: false, ..p });
                return;
            }
        }
    }

    /// Subdivides every non-tail panel so that `phase(u_a, u_b) / pieces`
    /// stays below `max_phase`. Geometric subdivision is used on panels that
    /// span a wide range in their coordinate.
    pub fn refine<F>(&mut self, phase: F, max_phase: f64)
    where
        F: Fn(f64, f64) -> f64,
    {
        let mut out = Vec::with_capacity(self.panels.len());
        for p in &self.panels {
            if p.tail {
                out.push(*p);
                continue;
            }
            let (ua, ub) = self.u_range(p);
            let ph = phase(ua, ub);
            let pieces = if ph.is_finite() && ph > max_phase {
                (ph / max_phase).ceil() as usize
            } else {
                1
            };
            if pieces == 1 {
                out.push(*p);
                continue;
            }
            let geometric = p.a > 0.0 && p.b / p.a > 1.5;
            for i in 0..pieces {
                let (t0, t1) = (i as f64 / pieces as f64, (i + 1) as f64 / pieces as f64);
                let (a, b) = if geometric {
                    let r = p.b / p.a;
                    (p.a * r.powf(t0), if i + 1 == pieces { p.b } else { p.a * r.powf(t1) })
                } else {
                    (p.a + (p.b - p.a) * t0, if i + 1 == pieces { p.b } else { p.a + (p.b - p.a) * t1 })
                };
                out.push(Panel { a, b, ..*p });
            }
        }
        self.panels = out;
    }

    /// Number of nodes `refine` would produce, without building the panels.
    pub fn refined_count<F>(&self, phase: F, max_phase: f64) -> usize
    where
        F: Fn(f64, f64) -> f64,
    {
        self.panels
            .iter()
            .map(|p| {
                if p.tail {
                    return 1;
                }
                let (ua, ub) = self.u_range(p);
                let ph = phase(ua, ub);
                if ph.is_finite() && ph > max_phase {
                    (ph / max_phase).ceil() as usize
                } else {
                    1
                }
            })
            .sum::<usize>()
            * self.gl_nodes.len()
    }

    pub fn nodes(&self) -> Vec<AxisNode> {
        let mut out = Vec::with_capacity(self.node_count());
        for p in &self.panels {
            let mid = 0.5 * (p.a + p.b);
            let half = 0.5 * (p.b - p.a);
            for (xi, wi) in self.gl_nodes.iter().zip(&self.gl_weights) {
                let c = mid + half * xi;
                let weight = wi * half;
                let (u, gap_hi) = match p.anchor {
                    Anchor::Lower => {
                        let u = self.lo + c;
                        (u, self.hi - u)
                    }
                    Anchor::Upper => (self.hi - c, c),
                    Anchor::Free => (c, self.hi - c),
                };
                out.push(AxisNode { u, gap_hi, weight });
            }
        }
        out
    }

    /// Nodes belonging to the innermost graded panels only.
    pub fn tail_nodes(&self) -> Vec<AxisNode> {
        let mut copy = self.clone();
        copy.panels.retain(|p| p.tail);
        copy.nodes()
    }
}
