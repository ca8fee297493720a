use std::path::PathBuf;
use std::sync::Arc;

use clap::ValueEnum;
use hausdorff::function::{LogGaussian, Product, Saturating};
use hausdorff::operator::{inner_product, l2_distance, l2_norm, regularity_check};
use hausdorff::spectral::DEFAULT_TERMS;
use hausdorff::{
    diagonalization_residual, discrete_inverse, library, normality_residual, Applied, Error, FnRef, Function, LogGrid,
    MellinGrid, OperatorSpec,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{is_refusal, CliError, CliResult};
use crate::output::{emit, load};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Diag,
    Adjoint,
    Normality,
    Regularity,
    Inverse,
    All,
}

pub struct VerifyArgs {
    pub spec: PathBuf,
    pub suite: Suite,
    pub tol: Option<f64>,
    pub pairs: usize,
    pub out: Option<PathBuf>,
}

pub const DIAG_TOL: f64 = 1e-3;
pub const ADJOINT_TOL: f64 = 1e-6;
pub const NORMALITY_TOL: f64 = 1e-5;
pub const REGULARITY_TOL: f64 = 1e-2;
pub const INVERSE_TOL: f64 = 1e-6;

#[derive(Serialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
    Refused,
}

#[derive(Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

impl Check {
    fn measured(name: &'static str, residual: f64, tolerance: f64, details: Value) -> Self {
        let status = if residual < tolerance { Status::Pass } else { Status::Fail };
        Self { name, status, residual: Some(residual), tolerance: Some(tolerance), reason: None, details }
    }

    fn skip(name: &'static str, reason: impl Into<String>) -> Self {
        Self { name, status: Status::Skip, residual: None, tolerance: None, reason: Some(reason.into()), details: Value::Null }
    }

    /// Inapplicable inputs become skips; resource limits become refusals.
    fn from_error(name: &'static str, e: Error) -> Self {
        let status = if is_refusal(&e) { Status::Refused } else { Status::Skip };
        Self { name, status, residual: None, tolerance: None, reason: Some(e.to_string()), details: Value::Null }
    }
}

type Outcome = Result<Check, Error>;

fn settle(name: &'static str, outcome: Outcome) -> Check {
    outcome.unwrap_or_else(|e| Check::from_error(name, e))
}

pub fn run(args: &VerifyArgs) -> CliResult<()> {
    let loaded = load(&args.spec)?;
    let spec = &loaded.spec;
    let suites: Vec<Suite> = match args.suite {
        Suite::All => vec![Suite::Diag, Suite::Adjoint, Suite::Normality, Suite::Regularity, Suite::Inverse],
        s => vec![s],
    };
    let checks: Vec<Check> = suites
        .iter()
        .map(|s| match s {
            Suite::Diag => settle("diag", diag(spec, args.tol.unwrap_or(DIAG_TOL))),
            Suite::Adjoint => settle("adjoint", adjoint(spec, args.tol.unwrap_or(ADJOINT_TOL), args.pairs)),
            Suite::Normality => settle("normality", normality(spec, args.tol.unwrap_or(NORMALITY_TOL))),
            Suite::Regularity => settle("regularity", regularity(spec, args.tol.unwrap_or(REGULARITY_TOL))),
            Suite::Inverse => settle("inverse", inverse(spec, args.tol.unwrap_or(INVERSE_TOL))),
            Suite::All => unreachable!(),
        })
        .collect();

    let failed = checks.iter().filter(|c| c.status == Status::Fail).count();
    let refused = checks.iter().filter(|c| c.status == Status::Refused).count();
    let report = json!({
        "spec": loaded.file_name,
        "spec_sha256": loaded.sha256,
        "suite": format!("{:?}", args.suite).to_lowercase(),
        "checks": checks,
        "passed": failed == 0 && refused == 0,
    });
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    emit(args.out.as_ref(), text.as_bytes())?;
    if failed > 0 {
        return Err(CliError::Check(format!("{failed} check(s) failed")));
    }
    if refused > 0 {
        return Err(CliError::Refusal(format!("{refused} check(s) refused")));
    }
    Ok(())
}

fn diag(spec: &OperatorSpec, tol: f64) -> Outcome {
    let grid = MellinGrid::for_spec(spec)?;
    let mut items = Vec::new();
    let mut worst = 0.0f64;
    for id in ["indicator01", "gaussian", "xexp"] {
        let f = library(id, spec.dimension).expect("library id");
        let r = diagonalization_residual(spec, f, &grid)?;
        worst = worst.max(r);
        items.push(json!({"function": id, "residual": r}));
    }
    Ok(Check::measured("diag", worst, tol, json!({"inputs": items, "grid_n": grid.n, "dt": grid.dt})))
}

/// `Σ c_i g_i(|x|)` over log-normal bumps, with separate coefficients on
/// each half-line. Smooth, so it reports no breakpoints.
struct RandomProfile {
    bumps: Vec<(LogGaussian, Complex64, Complex64)>,
}

impl Function for RandomProfile {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, x: &[f64]) -> Complex64 {
        let t = x[0].abs();
        self.bumps
            .iter()
            .map(|(g, pos, neg)| if x[0] > 0.0 { pos } else { neg } * g.eval(&[t]))
            .sum()
    }
}

fn random_profile(rng: &mut ChaCha8Rng) -> FnRef {
    let coeff = |rng: &mut ChaCha8Rng| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let bumps = (0..2)
        .map(|_| {
            let g = LogGaussian {
                power: rng.random_range(-0.4..0.4),
                mean: rng.random_range(-2.0..2.0),
                sigma: rng.random_range(0.6..1.5),
            };
            (g, coeff(rng), coeff(rng))
        })
        .collect();
    Arc::new(RandomProfile { bumps })
}

fn random_function(rng: &mut ChaCha8Rng, n: usize) -> FnRef {
    if n == 1 {
        return random_profile(rng);
    }
    Arc::new(Product::new((0..n).map(|_| random_profile(rng)).collect()))
}

/// Duality gap over seeded random pairs of smooth functions.
fn adjoint(spec: &OperatorSpec, tol: f64, pairs: usize) -> Outcome {
    let grid = LogGrid::new(-30.0, 30.0, 1024);
    let adj = spec.adjoint();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let f = random_function(&mut rng, spec.dimension);
        let g = random_function(&mut rng, spec.dimension);
        let lhs = inner_product(&Applied::new(spec, f.clone())?, g.as_ref(), &grid)?;
        let rhs = inner_product(f.as_ref(), &Applied::new(&adj, g.clone())?, &grid)?;
        let scale = l2_norm(f.as_ref(), &grid)? * l2_norm(g.as_ref(), &grid)?;
        worst = worst.max((lhs - rhs).norm() / scale);
    }
    Ok(Check::measured("adjoint", worst, tol, json!({"pairs": pairs, "seed": 0})))
}

fn normality(spec: &OperatorSpec, tol: f64) -> Outcome {
    if spec.exponent_p != 2.0 {
        return Ok(Check::skip("normality", format!("defined on L^2 only, spec has p = {}", spec.exponent_p)));
    }
    let grid = LogGrid::new(-40.0, 40.0, 256);
    let inner = LogGrid::new(-60.0, 60.0, 32768);
    let f = library("gaussian", spec.dimension).expect("library id");
    let r = normality_residual(spec, f, &grid, &inner)?;
    Ok(Check::measured("normality", r, tol, json!({"function": "gaussian"})))
}

/// `Hf(x) → l ∫Φ` for `f = x/(1+x)` per axis, `l = 1`. The residual is the
/// distance to that limit at the farthest probe.
fn regularity(spec: &OperatorSpec, tol: f64) -> Outcome {
    let n = spec.dimension;
    let f: FnRef = if n == 1 { Arc::new(Saturating) } else { Arc::new(Product::power(Arc::new(Saturating), n)) };
    let probes: Vec<Vec<f64>> = [1e1, 1e2, 1e3, 1e4, 1e5, 1e6].iter().map(|x| vec![*x; n]).collect();
    let one = Complex64::new(1.0, 0.0);
    let report = regularity_check(spec, f, one, &probes)?;
    let target = report.kernel_mass * one;
    let last = report.probes.last().expect("probes");
    let residual = (last.value - target).norm();
    let mut check = Check::measured(
        "regularity",
        residual,
        tol,
        json!({
            "kernel_mass": [report.kernel_mass.re, report.kernel_mass.im],
            "probes": report.probes.iter().map(|p| json!({"x": p.x[0], "re": p.value.re, "im": p.value.im})).collect::<Vec<_>>(),
            "monotone": report.is_decreasing(),
        }),
    );
    if !report.is_decreasing() {
        check.status = Status::Fail;
    }
    Ok(check)
}

fn inverse(spec: &OperatorSpec, tol: f64) -> Outcome {
    if !spec.measure.is_discrete() {
        return Ok(Check::skip("inverse", "needs a discrete measure with A(k) = A^k"));
    }
    let inv = discrete_inverse(spec, DEFAULT_TERMS)?;
    let grid = LogGrid::default();
    let n = spec.dimension;
    let mut worst = 0.0f64;
    for id in ["gaussian", "xexp"] {
        let f = library(id, n).expect("library id");
        let hf: FnRef = Arc::new(Applied::new(spec, f.clone())?);
        let back = Applied::new(&inv.spec, hf)?;
        worst = worst.max(l2_distance(&back, f.as_ref(), &grid)? / l2_norm(f.as_ref(), &grid)?);
    }
    let shown = inv.b.len().min(8);
    let b: Vec<Value> = inv.b[..shown]
        .iter()
        // `+ 0.0` folds negative zeros.
        .map(|c| if c.im == 0.0 { json!(c.re + 0.0) } else { json!([c.re + 0.0, c.im + 0.0]) })
        .collect();
    Ok(Check::measured(
        "inverse",
        worst,
        tol,
        json!({
            "b": b,
            "terms": inv.b.len(),
            "inf_abs_f": inv.inf_f,
            "tail_estimate": inv.tail,
            "inverse_spec": serde_json::from_str::<Value>(&hausdorff::spec_to_json(&inv.spec)).expect("spec json"),
        }),
    ))
}
