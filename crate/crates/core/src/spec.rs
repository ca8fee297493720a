//! Operator specifications: measure space, kernel, commuting matrix family.
//!
//! An [`OperatorSpec`] describes `(Hf)(x) = ∫_Ω Φ(u) f(A(u)x) dμ(u)` with
//! `A(u) = C diag[a_1(u), …, a_n(u)] Cᵀ`. Every numerical routine in the
//! crate consumes a spec through its discretization into a [`NodeSet`]: a
//! list of quadrature masses `μ-weight · Φ(u)` paired with the eigenvalues
//! `a(u)` at the node.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gamma::real_gamma;
use crate::quadrature::{AxisRule, BoxRule};

/// Relative tolerance for `CᵀC = I`.
pub const ORTHOGONALITY_TOL: f64 = 1e-12;
/// Largest admissible L¹ bound before a spec is considered divergent.
pub const L1_CAP: f64 = 1e12;
/// Fraction of the L¹ integral allowed in the innermost graded panels.
pub const TAIL_FRACTION_LIMIT: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub enum MeasureSpace {
    /// Atoms `u_k ∈ ℝ^m` with weights `μ_k ≥ 0`.
    Discrete { atoms: Vec<Vec<f64>>, weights: Vec<f64> },
    /// Lebesgue measure on `∏[lower_i, upper_i]`.
    Box { lower: Vec<f64>, upper: Vec<f64>, rule: BoxRule },
}

impl MeasureSpace {
    /// Unit weights on `{0, 1, …, count - 1}`.
    pub fn counting(count: usize) -> Self {
        MeasureSpace::Discrete {
            atoms: (0..count).map(|k| vec![k as f64]).collect(),
            weights: vec![1.0; count],
        }
    }

    pub fn unit_box(m: usize) -> Self {
        MeasureSpace::Box { lower: vec![0.0; m], upper: vec![1.0; m], rule: BoxRule::default() }
    }

    pub fn dim(&self) -> usize {
        match self {
            MeasureSpace::Discrete { atoms, .. } => atoms.first().map_or(1, Vec::len),
            MeasureSpace::Box { lower, .. } => lower.len(),
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, MeasureSpace::Discrete { .. })
    }

    /// True when the atoms are exactly `0, 1, …, K` with unit weights.
    pub fn is_counting(&self) -> bool {
        match self {
            MeasureSpace::Discrete { atoms, weights } => atoms
                .iter()
                .zip(weights)
                .enumerate()
                .all(|(k, (a, w))| a.len() == 1 && a[0] == k as f64 && *w == 1.0),
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DiscreteLaw {
    /// `scale · ratio^k`.
    Geometric { ratio: f64, scale: f64 },
    /// `1 / k!`.
    InverseFactorial,
    /// `1` at `k = 0`, zero elsewhere.
    Delta,
}

impl DiscreteLaw {
    fn eval(&self, k: f64) -> f64 {
        match self {
            DiscreteLaw::Geometric { ratio, scale } => scale * ratio.powf(k),
            DiscreteLaw::InverseFactorial => 1.0 / real_gamma(k + 1.0),
            DiscreteLaw::Delta => {
                if k == 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum KernelForm {
    /// Constant `scale` on a box.
    Cesaro { scale: f64 },
    /// `k (1 - u)^{k-1}` on `[0, 1]`.
    Ck { k: f64 },
    /// Closed-form law over the atom coordinate `k`.
    Discrete(DiscreteLaw),
    /// Explicit values, one per discrete atom.
    Table(Vec<Complex64>),
}

/// `Φ_eff(u) = base(u) · det A(u)^{det_power}`, conjugated when `conjugate`
/// is set. Adjoint specs are expressed with the last two fields.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSpec {
    pub form: KernelForm,
    pub conjugate: bool,
    pub det_power: f64,
    /// Claimed nonnegativity; validated at every node.
    pub nonnegative: bool,
}

impl KernelSpec {
    pub fn new(form: KernelForm) -> Self {
        let nonnegative = match &form {
            KernelForm::Cesaro { scale } => *scale >= 0.0,
            KernelForm::Ck { k } => *k > 0.0,
            KernelForm::Discrete(DiscreteLaw::Geometric { ratio, scale }) => *ratio >= 0.0 && *scale >= 0.0,
            KernelForm::Discrete(_) => true,
            KernelForm::Table(v) => v.iter().all(|c| c.im == 0.0 && c.re >= 0.0),
        };
        Self { form, conjugate: false, det_power: 0.0, nonnegative }
    }

    /// Kernel value before conjugation and the determinant factor.
    pub fn base(&self, point: &[f64], gap_hi: &[f64], index: usize) -> Complex64 {
        match &self.form {
            KernelForm::Cesaro { scale } => Complex64::new(*scale, 0.0),
            KernelForm::Ck { k } => Complex64::new(k * gap_hi[0].powf(k - 1.0), 0.0),
            KernelForm::Discrete(law) => Complex64::new(law.eval(point[0]), 0.0),
            KernelForm::Table(values) => values[index],
        }
    }

    pub fn eval(&self, point: &[f64], gap_hi: &[f64], index: usize, det: f64) -> Complex64 {
        let mut v = self.base(point, gap_hi, index);
        if self.conjugate {
            v = v.conj();
        }
        if self.det_power != 0.0 {
            v *= det.powf(self.det_power);
        }
        v
    }

    /// Exponent of an integrable singularity at the upper end of a box axis.
    fn upper_singularity(&self) -> bool {
        matches!(self.form, KernelForm::Ck { k } if k.fract() != 0.0)
    }
}

/// Eigenvalue function `a_j` of the commuting family.
#[derive(Clone, Debug, PartialEq)]
pub enum EigenForm {
    /// `u_index^power` on a box.
    Coord { index: usize, power: f64 },
    Constant(f64),
    /// `base^k` over the atom coordinate `k`.
    Geometric(f64),
    /// Explicit values, one per discrete atom.
    Table(Vec<f64>),
}

impl EigenForm {
    pub fn eval(&self, point: &[f64], index: usize) -> f64 {
        match self {
            EigenForm::Coord { index: i, power } => {
                if *power == 1.0 {
                    point[*i]
                } else {
                    point[*i].powf(*power)
                }
            }
            EigenForm::Constant(c) => *c,
            EigenForm::Geometric(base) => base.powf(point[0]),
            EigenForm::Table(values) => values[index],
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            EigenForm::Coord { index, power } => EigenForm::Coord { index: *index, power: -power },
            EigenForm::Constant(c) => EigenForm::Constant(1.0 / c),
            EigenForm::Geometric(b) => EigenForm::Geometric(1.0 / b),
            EigenForm::Table(v) => EigenForm::Table(v.iter().map(|x| 1.0 / x).collect()),
        }
    }

    /// Generator `λ` when `a(k) = λ^k` on the counting measure.
    pub fn generator(&self) -> Option<f64> {
        match self {
            EigenForm::Geometric(b) => Some(*b),
            EigenForm::Constant(c) if *c == 1.0 => Some(1.0),
            _ => None,
        }
    }
}

/// `A(u) = C diag[a_1(u), …, a_n(u)] Cᵀ` with orthogonal `C`.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutingFamily {
    /// Row-major `n × n` change of basis.
    pub basis: Vec<f64>,
    pub eigen: Vec<EigenForm>,
}

impl CommutingFamily {
    pub fn diagonal(eigen: Vec<EigenForm>) -> Self {
        let n = eigen.len();
        let mut basis = vec![0.0; n * n];
        for i in 0..n {
            basis[i * n + i] = 1.0;
        }
        Self { basis, eigen }
    }

    pub fn new(basis: Vec<f64>, eigen: Vec<EigenForm>) -> Self {
        Self { basis, eigen }
    }

    pub fn dim(&self) -> usize {
        self.eigen.len()
    }

    pub fn basis_matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_row_slice(n, n, &self.basis)
    }

    pub fn is_identity_basis(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| self.basis[i * n + j] == if i == j { 1.0 } else { 0.0 }))
    }

    /// `max |CᵀC − I|` entrywise.
    pub fn orthogonality_defect(&self) -> f64 {
        let c = self.basis_matrix();
        let g = c.transpose() * &c;
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// Reconstructs `A = C diag(eig) Cᵀ`.
    pub fn matrix(&self, eig: &[f64]) -> DMatrix<f64> {
        let c = self.basis_matrix();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(eig));
        &c * d * c.transpose()
    }

    pub fn inverse(&self) -> Self {
        Self { basis: self.basis.clone(), eigen: self.eigen.iter().map(EigenForm::inverse).collect() }
    }

    /// Converts raw symmetric matrices (one per discrete atom) into the
    /// simultaneously diagonalized representation. The frame is taken from a
    /// generic linear combination of the inputs and must diagonalize every
    /// input to within `1e-8`.
    pub fn from_matrices(n: usize, matrices: &[Vec<f64>]) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::Malformed("family needs at least one matrix".into()));
        }
        let mats: Vec<DMatrix<f64>> = matrices
            .iter()
            .map(|m| {
                if m.len() != n * n {
                    return Err(Error::Malformed(format!("matrix has {} entries, expected {}", m.len(), n * n)));
                }
                Ok(DMatrix::from_row_slice(n, n, m))
            })
            .collect::<Result<_>>()?;
        for m in &mats {
            let asym = (m - m.transpose()).amax();
            if asym > 1e-12 * m.amax().max(1.0) {
                return Err(Error::JointDiagonalization(asym));
            }
        }
        let mut mix = DMatrix::<f64>::zeros(n, n);
        for (k, m) in mats.iter().enumerate() {
            // Weyl sequence coefficients: distinct and irrational-ish.
            let c = 1.0 + ((k as f64 + 1.0) * 0.618_033_988_749_895).fract();
            mix += m * c;
        }
        let eig = SymmetricEigen::new(mix);
        let c = eig.eigenvectors;
        let mut tables = vec![Vec::with_capacity(mats.len()); n];
        let mut worst: f64 = 0.0;
        for m in &mats {
            let d = c.transpose() * m * &c;
            let scale = m.amax().max(1.0);
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        worst = worst.max(d[(i, j)].abs() / scale);
                    }
                }
                tables[i].push(d[(i, i)]);
            }
        }
        if worst > 1e-8 {
            return Err(Error::JointDiagonalization(worst));
        }
        let mut basis = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                basis[i * n + j] = c[(i, j)];
            }
        }
        Ok(Self { basis, eigen: tables.into_iter().map(EigenForm::Table).collect() })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSpec {
    pub dimension: usize,
    pub exponent_p: f64,
    pub measure: MeasureSpace,
    pub kernel: KernelSpec,
    pub family: CommutingFamily,
}

/// Discretization of a spec: masses `μ-weight · Φ_eff(u)` and eigenvalues.
#[derive(Clone, Debug)]
pub struct NodeSet {
    pub n: usize,
    pub mass: Vec<Complex64>,
    /// Row-major, `n` eigenvalues per node.
    pub eig: Vec<f64>,
    /// Node lies in an innermost graded panel.
    pub tail: Vec<bool>,
}

impl NodeSet {
    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn eig(&self, i: usize) -> &[f64] {
        &self.eig[i * self.n..(i + 1) * self.n]
    }

    pub fn det(&self, i: usize) -> f64 {
        self.eig(i).iter().product()
    }

    /// `Σ |mass| det^{-1/p}`.
    pub fn l1_bound(&self, p: f64) -> f64 {
        (0..self.len()).map(|i| self.mass[i].norm() * self.det(i).powf(-1.0 / p)).sum()
    }
}

/// Extra structure requested from [`OperatorSpec::nodes`].
#[derive(Clone, Debug, Default)]
pub struct NodeOptions<'a> {
    /// Per box axis, values of `u` that must be panel boundaries.
    pub splits: Option<&'a [Vec<f64>]>,
    /// Frequencies `s` whose oscillation `a(u)^{-is}` must be resolved.
    pub oscillation: Option<&'a [f64]>,
    /// Nodes allowed after refinement; zero means unlimited.
    pub budget: usize,
}

/// Gauss–Legendre nodes per oscillation period demanded by refinement.
pub const NODES_PER_PERIOD: f64 = 8.0;

impl OperatorSpec {
    pub fn new(exponent_p: f64, measure: MeasureSpace, kernel: KernelSpec, family: CommutingFamily) -> Result<Self> {
        let spec = Self { dimension: family.dim(), exponent_p, measure, kernel, family };
        spec.check_shapes()?;
        Ok(spec)
    }

    /// Structural consistency; violations here are malformed input, not
    /// validation failures.
    pub fn check_shapes(&self) -> Result<()> {
        let n = self.dimension;
        if n == 0 {
            return Err(Error::Malformed("dimension must be at least 1".into()));
        }
        if self.family.eigen.len() != n {
            return Err(Error::Malformed(format!(
                "family has {} eigenvalue forms for dimension {n}",
                self.family.eigen.len()
            )));
        }
        if self.family.basis.len() != n * n {
            return Err(Error::Malformed(format!("basis has {} entries, expected {}", self.family.basis.len(), n * n)));
        }
        if !(self.exponent_p >= 1.0 && self.exponent_p.is_finite()) {
            return Err(Error::Malformed(format!("exponent p = {} outside [1, ∞)", self.exponent_p)));
        }
        match &self.measure {
            MeasureSpace::Discrete { atoms, weights } => {
                if atoms.is_empty() || atoms.len() != weights.len() {
                    return Err(Error::Malformed("discrete measure needs one weight per atom".into()));
                }
                let m = atoms[0].len();
                if m == 0 || atoms.iter().any(|a| a.len() != m) {
                    return Err(Error::Malformed("atoms must share one positive dimension".into()));
                }
                if let KernelForm::Table(v) = &self.kernel.form {
                    if v.len() != atoms.len() {
                        return Err(Error::Malformed(format!("kernel table has {} values for {} atoms", v.len(), atoms.len())));
                    }
                }
                if matches!(self.kernel.form, KernelForm::Cesaro { .. } | KernelForm::Ck { .. }) {
                    return Err(Error::Malformed("continuous kernel on a discrete measure".into()));
                }
                for e in &self.family.eigen {
                    match e {
                        EigenForm::Table(v) if v.len() != atoms.len() => {
                            return Err(Error::Malformed("eigenvalue table length differs from atom count".into()))
                        }
                        EigenForm::Coord { .. } => {
                            return Err(Error::Malformed("coordinate eigenvalue form on a discrete measure".into()))
                        }
                        _ => {}
                    }
                }
            }
            MeasureSpace::Box { lower, upper, .. } => {
                if lower.is_empty() || lower.len() != upper.len() {
                    return Err(Error::Malformed("box bounds must have equal positive length".into()));
                }
                let m = lower.len();
                match &self.kernel.form {
                    KernelForm::Discrete(_) | KernelForm::Table(_) => {
                        return Err(Error::Malformed("discrete kernel on a box measure".into()))
                    }
                    KernelForm::Ck { .. } if m != 1 => {
                        return Err(Error::Malformed("(C,k) kernel needs a one-dimensional box".into()))
                    }
                    _ => {}
                }
                for e in &self.family.eigen {
                    match e {
                        EigenForm::Coord { index, .. } if *index >= m => {
                            return Err(Error::Malformed(format!("eigenvalue form refers to box axis {index} of {m}")))
                        }
                        EigenForm::Table(_) | EigenForm::Geometric(_) => {
                            return Err(Error::Malformed("discrete eigenvalue form on a box measure".into()))
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok(())
    }

    pub fn p(&self) -> f64 {
        self.exponent_p
    }

    /// The spec of `H*` (in the L^p–L^q pairing): kernel `Φ̄ |det A|^{-1}`,
    /// family `A^{-1}`.
    pub fn adjoint(&self) -> Self {
        let mut kernel = self.kernel.clone();
        kernel.conjugate = !kernel.conjugate;
        // Φ' = conj(Φ_base) det^{e-1} = conj(Φ_base) det'^{1-e} with det' = 1/det.
        kernel.det_power = 1.0 - kernel.det_power;
        kernel.nonnegative = self.kernel.nonnegative;
        Self {
            dimension: self.dimension,
            exponent_p: self.exponent_p,
            measure: self.measure.clone(),
            kernel,
            family: self.family.inverse(),
        }
    }

    /// Splits a spec on a box into one-dimensional factors when the kernel,
    /// the eigenvalue functions and the frame all separate:
    /// `H = H_1 ⊗ … ⊗ H_n`. One-dimensional specs factor trivially.
    pub fn factorize(&self) -> Option<Vec<OperatorSpec>> {
        let n = self.dimension;
        if n == 1 {
            return Some(vec![self.clone()]);
        }
        let MeasureSpace::Box { lower, upper, rule } = &self.measure else {
            return None;
        };
        if lower.len() != n || !self.family.is_identity_basis() {
            return None;
        }
        let KernelForm::Cesaro { scale } = self.kernel.form else {
            return None;
        };
        let mut used = vec![false; n];
        let mut axes = Vec::with_capacity(n);
        for e in &self.family.eigen {
            let EigenForm::Coord { index, power } = e else {
                return None;
            };
            if used[*index] {
                return None;
            }
            used[*index] = true;
            axes.push((*index, *power));
        }
        Some(
            axes.iter()
                .enumerate()
                .map(|(j, (i, power))| OperatorSpec {
                    dimension: 1,
                    exponent_p: self.exponent_p,
                    measure: MeasureSpace::Box { lower: vec![lower[*i]], upper: vec![upper[*i]], rule: *rule },
                    kernel: KernelSpec {
                        form: KernelForm::Cesaro { scale: if j == 0 { scale } else { 1.0 } },
                        conjugate: self.kernel.conjugate,
                        det_power: self.kernel.det_power,
                        nonnegative: self.kernel.nonnegative,
                    },
                    family: CommutingFamily::diagonal(vec![EigenForm::Coord { index: 0, power: *power }]),
                })
                .collect(),
        )
    }

    /// Copy whose box rule grades no deeper than `depth`.
    pub fn with_min_grading_depth(&self, depth: f64) -> Self {
        let mut out = self.clone();
        if let MeasureSpace::Box { rule, .. } = &mut out.measure {
            rule.grading_depth = rule.grading_depth.max(depth);
        }
        out
    }

    /// Base panel layout of every box axis.
    pub fn axis_rules(&self) -> Vec<AxisRule> {
        let MeasureSpace::Box { lower, upper, rule } = &self.measure else {
            return Vec::new();
        };
        (0..lower.len())
            .map(|i| {
                let depends = self.family.eigen.iter().any(|e| matches!(e, EigenForm::Coord { index, .. } if *index == i));
                let grade_lo = depends && lower[i] == 0.0;
                let grade_hi = i == 0 && self.kernel.upper_singularity();
                AxisRule::new(lower[i], upper[i], rule, grade_lo, grade_hi)
            })
            .collect()
    }

    /// Oscillation rate of `a(u)^{-is}` per unit of `log u` along box axis `i`.
    fn log_rate(&self, axis: usize, s: &[f64]) -> f64 {
        self.family
            .eigen
            .iter()
            .zip(s)
            .map(|(e, sj)| match e {
                EigenForm::Coord { index, power } if *index == axis => (sj * power).abs(),
                _ => 0.0,
            })
            .sum()
    }

    pub fn nodes(&self, opts: &NodeOptions<'_>) -> Result<NodeSet> {
        let n = self.dimension;
        match &self.measure {
            MeasureSpace::Discrete { atoms, weights } => {
                let mut set = NodeSet { n, mass: Vec::with_capacity(atoms.len()), eig: Vec::with_capacity(atoms.len() * n), tail: vec![false; atoms.len()] };
                for (k, (atom, w)) in atoms.iter().zip(weights).enumerate() {
                    let start = set.eig.len();
                    set.eig.extend(self.family.eigen.iter().map(|e| e.eval(atom, k)));
                    let det: f64 = set.eig[start..].iter().product();
                    set.mass.push(*w * self.kernel.eval(atom, &[], k, det));
                }
                Ok(set)
            }
            MeasureSpace::Box { .. } => {
                let mut rules = self.axis_rules();
                if let Some(splits) = opts.splits {
                    for (r, cuts) in rules.iter_mut().zip(splits) {
                        for &u in cuts {
                            r.split_at(u);
                        }
                    }
                }
                if let Some(s) = opts.oscillation {
                    let required = self.refined_count(&rules, s, NODES_PER_PERIOD);
                    if opts.budget > 0 && required > opts.budget {
                        return Err(Error::RefinementFailure {
                            s: s.to_vec(),
                            required,
                            budget: opts.budget,
                            error_estimate: f64::NAN,
                        });
                    }
                    self.refine(&mut rules, s, NODES_PER_PERIOD);
                }
                Ok(self.nodes_from_rules(&rules))
            }
        }
    }

    fn max_phase(&self, per_period: f64) -> f64 {
        let order = match &self.measure {
            MeasureSpace::Box { rule, .. } => rule.gauss_order,
            MeasureSpace::Discrete { .. } => 1,
        };
        std::f64::consts::TAU * order as f64 / per_period
    }

    /// Node count after refining `rules` for frequency `s` at `per_period`
    /// nodes per oscillation.
    pub fn refined_count(&self, rules: &[AxisRule], s: &[f64], per_period: f64) -> usize {
        let max_phase = self.max_phase(per_period);
        rules
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let rate = self.log_rate(i, s);
                r.refined_count(|a: f64, b: f64| rate * (b.ln() - a.ln()).abs(), max_phase)
            })
            .product()
    }

    pub fn refine(&self, rules: &mut [AxisRule], s: &[f64], per_period: f64) {
        let max_phase = self.max_phase(per_period);
        for (i, r) in rules.iter_mut().enumerate() {
            let rate = self.log_rate(i, s);
            r.refine(|a: f64, b: f64| rate * (b.ln() - a.ln()).abs(), max_phase);
        }
    }

    /// Tensor-product nodes of the given axis rules.
    pub fn nodes_from_rules(&self, rules: &[AxisRule]) -> NodeSet {
        let n = self.dimension;
        let m = rules.len();
        let axis_nodes: Vec<_> = rules.iter().map(|r| r.nodes()).collect();
        let axis_tail: Vec<Vec<bool>> = rules
            .iter()
            .zip(&axis_nodes)
            .map(|(r, nodes)| {
                let per_panel = nodes.len() / r.panels().len().max(1);
                r.panels().iter().flat_map(|p| std::iter::repeat_n(p.tail, per_panel)).collect()
            })
            .collect();
        let total: usize = axis_nodes.iter().map(Vec::len).product();
        let mut set = NodeSet { n, mass: Vec::with_capacity(total), eig: Vec::with_capacity(total * n), tail: Vec::with_capacity(total) };
        let mut idx = vec![0usize; m];
        let mut point = vec![0.0; m];
        let mut gap = vec![0.0; m];
        for _ in 0..total {
            let mut w = 1.0;
            let mut tail = false;
            for a in 0..m {
                let node = axis_nodes[a][idx[a]];
                point[a] = node.u;
                gap[a] = node.gap_hi;
                w *= node.weight;
                tail |= axis_tail[a][idx[a]];
            }
            let start = set.eig.len();
            set.eig.extend(self.family.eigen.iter().map(|e| e.eval(&point, 0)));
            let det: f64 = set.eig[start..].iter().product();
            set.mass.push(w * self.kernel.eval(&point, &gap, 0, det));
            set.tail.push(tail);
            for a in (0..m).rev() {
                idx[a] += 1;
                if idx[a] < axis_nodes[a].len() {
                    break;
                }
                idx[a] = 0;
            }
        }
        set
    }

    /// `∫ Φ dμ` (with the kernel's conjugation and determinant factor).
    pub fn kernel_mass(&self) -> Result<Complex64> {
        if let Some(factors) = self.factorize().filter(|f| f.len() > 1) {
            return factors.iter().map(|f| f.kernel_mass()).product();
        }
        Ok(self.nodes(&NodeOptions::default())?.mass.iter().sum())
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    /// `∫ |Φ| (det A)^{-1/p} dμ` on the discretization.
    pub l1_bound: f64,
    /// Ratio-test estimate of the neglected series tail, for discrete specs.
    pub tail_bound: Option<f64>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    fn push(&mut self, name: &'static str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name, passed, detail: detail.into() });
    }
}

struct NodeStats {
    l1: f64,
    tail_l1: f64,
    abs_mass: f64,
    min_eig: f64,
    nonfinite: bool,
    negative_kernel: usize,
}

fn node_stats(spec: &OperatorSpec) -> Result<NodeStats> {
    let set = spec.nodes(&NodeOptions::default())?;
    let p = spec.exponent_p;
    let mut st = NodeStats { l1: 0.0, tail_l1: 0.0, abs_mass: 0.0, min_eig: f64::INFINITY, nonfinite: false, negative_kernel: 0 };
    for i in 0..set.len() {
        let m = set.mass[i];
        let eig = set.eig(i);
        for &a in eig {
            st.min_eig = st.min_eig.min(a);
            st.nonfinite |= !a.is_finite();
        }
        st.nonfinite |= !m.re.is_finite() || !m.im.is_finite();
        let term = m.norm() * set.det(i).powf(-1.0 / p);
        st.l1 += term;
        if set.tail[i] {
            st.tail_l1 += term;
        }
        st.abs_mass += m.norm();
        if m.re < 0.0 || m.im.abs() > 1e-14 * m.norm().max(f64::MIN_POSITIVE) {
            st.negative_kernel += 1;
        }
    }
    Ok(st)
}

/// Ratio-test estimate of `Σ_{k>K} |Φ(k)| det A(k)^{-1/p}` from the last terms.
fn series_tail(spec: &OperatorSpec) -> Result<Option<f64>> {
    if !spec.measure.is_discrete() {
        return Ok(None);
    }
    let set = spec.nodes(&NodeOptions::default())?;
    let p = spec.exponent_p;
    let terms: Vec<f64> = (0..set.len()).map(|i| set.mass[i].norm() * set.det(i).powf(-1.0 / p)).collect();
    let k = terms.len();
    if k < 2 {
        return Ok(Some(0.0));
    }
    let (last, prev) = (terms[k - 1], terms[k - 2]);
    if last == 0.0 {
        return Ok(Some(0.0));
    }
    if prev == 0.0 {
        return Ok(None);
    }
    let ratio = last / prev;
    Ok(Some(if ratio < 1.0 { last * ratio / (1.0 - ratio) } else { f64::INFINITY }))
}

/// Checks every invariant of a spec and computes its L¹ bound. Violations are
/// reported, not raised; only malformed shapes produce an error.
pub fn validate_spec(spec: &OperatorSpec) -> Result<ValidationReport> {
    spec.check_shapes()?;
    let mut report = ValidationReport { checks: Vec::new(), l1_bound: f64::NAN, tail_bound: None };

    match &spec.measure {
        MeasureSpace::Discrete { weights, .. } => {
            let ok = weights.iter().all(|w| w.is_finite() && *w >= 0.0);
            report.push("measure_weights", ok, "weights finite and nonnegative");
        }
        MeasureSpace::Box { lower, upper, rule } => {
            let ok = lower.iter().zip(upper).all(|(l, h)| l.is_finite() && h.is_finite() && l < h);
            report.push("box_nondegenerate", ok, format!("lower {lower:?}, upper {upper:?}"));
            report.push("quadrature_nodes", rule.gauss_order >= 2, format!("{} Gauss nodes per panel", rule.gauss_order));
            let grading = rule.grading_ratio > 0.0 && rule.grading_ratio < 1.0 && rule.grading_depth > 0.0 && rule.grading_depth < 1.0;
            report.push("grading", grading, format!("ratio {}, depth {:e}", rule.grading_ratio, rule.grading_depth));
            if !(ok && rule.gauss_order >= 2 && grading) {
                return Ok(report);
            }
        }
    }

    let defect = spec.family.orthogonality_defect();
    report.push("basis_orthogonal", defect <= ORTHOGONALITY_TOL, format!("max |CᵀC − I| = {defect:.3e}"));

    let factors = spec.factorize().unwrap_or_else(|| vec![spec.clone()]);
    let stats: Vec<NodeStats> = factors.iter().map(node_stats).collect::<Result<_>>()?;
    let min_eig = stats.iter().map(|s| s.min_eig).fold(f64::INFINITY, f64::min);
    let nonfinite = stats.iter().any(|s| s.nonfinite);
    report.push(
        "eigenvalues_positive",
        min_eig > 0.0 && !nonfinite,
        format!("min a_j(u) = {min_eig:.3e} over all nodes"),
    );
    let abs_mass: f64 = stats.iter().map(|s| s.abs_mass).product();
    report.push("kernel_integrable", abs_mass.is_finite(), format!("Σ μ|Φ| = {abs_mass:.6e}"));
    if spec.kernel.nonnegative {
        let bad: usize = stats.iter().map(|s| s.negative_kernel).sum();
        report.push("kernel_nonnegative", bad == 0, format!("{bad} nodes with Φ < 0 or complex"));
    }

    let l1: f64 = stats.iter().map(|s| s.l1).product();
    let tail_fraction = stats.iter().map(|s| s.tail_l1 / s.l1).fold(0.0, f64::max);
    report.l1_bound = l1;
    report.tail_bound = series_tail(spec)?;
    let tail_ok = report.tail_bound.is_none_or(|t| t.is_finite() && t < 1e-6 * l1.max(1.0));
    let l1_ok = l1.is_finite() && l1 < L1_CAP && tail_fraction < TAIL_FRACTION_LIMIT && tail_ok;
    report.push(
        "l1_condition",
        l1_ok,
        format!(
            "∫|Φ|(det A)^(-1/p) dμ = {l1:.12e}, endpoint fraction {tail_fraction:.3e}, series tail {:?}",
            report.tail_bound
        ),
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{builtin_cesaro, builtin_ck, geometric_spec};

    #[test]
    fn cesaro_bound_is_two_at_p2() {
        let r = validate_spec(&builtin_cesaro(1)).unwrap();
        assert!(r.is_valid(), "{:?}", r.failures());
        assert!((r.l1_bound - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cesaro_bound_is_two_to_the_n() {
        for n in 1..=3 {
            let r = validate_spec(&builtin_cesaro(n)).unwrap();
            assert!((r.l1_bound - 2f64.powi(n as i32)).abs() < 1e-9, "n = {n}: {}", r.l1_bound);
        }
    }

    #[test]
    fn cesaro_at_p1_is_rejected() {
        let mut spec = builtin_cesaro(1);
        spec.exponent_p = 1.0;
        let r = validate_spec(&spec).unwrap();
        assert!(!r.is_valid());
        assert_eq!(r.failures()[0].name, "l1_condition");
    }

    #[test]
    fn zero_eigenvalue_is_a_positivity_violation() {
        let family = CommutingFamily::diagonal(vec![EigenForm::Table(vec![1.0, 0.0])]);
        let kernel = KernelSpec::new(KernelForm::Table(vec![Complex64::new(1.0, 0.0); 2]));
        let spec = OperatorSpec::new(2.0, MeasureSpace::counting(2), kernel, family).unwrap();
        let r = validate_spec(&spec).unwrap();
        assert!(!r.is_valid());
        assert!(r.failures().iter().any(|c| c.name == "eigenvalues_positive"));
    }

    #[test]
    fn geometric_bound_is_four_thirds() {
        let r = validate_spec(&geometric_spec()).unwrap();
        assert!(r.is_valid(), "{:?}", r.failures());
        assert!((r.l1_bound - 4.0 / 3.0).abs() < 1e-14);
        assert!(r.tail_bound.unwrap() < 1e-12);
    }

    #[test]
    fn inverse_factorial_bound() {
        let spec = OperatorSpec::new(
            2.0,
            MeasureSpace::counting(41),
            KernelSpec::new(KernelForm::Discrete(DiscreteLaw::InverseFactorial)),
            CommutingFamily::diagonal(vec![EigenForm::Geometric(2.0)]),
        )
        .unwrap();
        let r = validate_spec(&spec).unwrap();
        assert!(r.is_valid());
        assert!((r.l1_bound - std::f64::consts::FRAC_1_SQRT_2.exp()).abs() < 1e-14);
    }

    #[test]
    fn ck_kernels_validate() {
        for k in [0.5, 1.0, 1.5, 2.0, 3.0] {
            let r = validate_spec(&builtin_ck(k).unwrap()).unwrap();
            assert!(r.is_valid(), "k = {k}: {:?}", r.failures());
        }
    }

    #[test]
    fn malformed_shapes_are_errors() {
        let mut spec = builtin_cesaro(2);
        spec.family.basis.pop();
        assert!(matches!(validate_spec(&spec), Err(Error::Malformed(_))));
    }

    #[test]
    fn adjoint_twice_is_identity() {
        for spec in [builtin_cesaro(2), builtin_ck(0.5).unwrap(), geometric_spec()] {
            let back = spec.adjoint().adjoint();
            let a = spec.nodes(&NodeOptions::default()).unwrap();
            let b = back.nodes(&NodeOptions::default()).unwrap();
            for i in 0..a.len() {
                assert!((a.mass[i] - b.mass[i]).norm() <= 1e-12 * a.mass[i].norm().max(1.0));
                for (x, y) in a.eig(i).iter().zip(b.eig(i)) {
                    assert!((x - y).abs() <= 1e-12 * x.abs());
                }
            }
        }
    }

    #[test]
    fn joint_diagonalization_recovers_frame() {
        let (c, s) = (0.6f64, 0.8f64);
        let basis = [c, -s, s, c];
        let fam = CommutingFamily::new(basis.to_vec(), vec![EigenForm::Constant(1.0), EigenForm::Constant(1.0)]);
        let mats: Vec<Vec<f64>> = [(2.0, 3.0), (5.0, 0.5), (1.0, 7.0)]
            .iter()
            .map(|(a, b)| fam.matrix(&[*a, *b]).as_slice().to_vec())
            .collect();
        let got = CommutingFamily::from_matrices(2, &mats).unwrap();
        for (k, m) in mats.iter().enumerate() {
            let eig: Vec<f64> = got.eigen.iter().map(|e| e.eval(&[k as f64], k)).collect();
            let rebuilt = got.matrix(&eig);
            let orig = DMatrix::from_column_slice(2, 2, m);
            assert!((rebuilt - orig).amax() < 1e-12);
        }
        assert!(got.orthogonality_defect() < 1e-12);
    }

    #[test]
    fn non_commuting_matrices_fail_loudly() {
        let mats = vec![vec![2.0, 0.0, 0.0, 1.0], vec![1.0, 1.0, 1.0, 3.0]];
        assert!(matches!(CommutingFamily::from_matrices(2, &mats), Err(Error::JointDiagonalization(_))));
    }
}
