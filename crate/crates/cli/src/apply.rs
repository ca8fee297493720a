use std::path::{Path, PathBuf};
use std::sync::Arc;

use hausdorff::grid::{Axis, GridFunction};
use hausdorff::quadrature::BoxRule;
use hausdorff::{library, Applied, FnRef, Function, MeasureSpace, OperatorSpec};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::output::{axis_names, emit, kernel_summary, linspace, load, tensor, Table};

pub struct ApplyArgs {
    pub spec: PathBuf,
    pub function: String,
    pub grid_n: Option<usize>,
    pub t_range: (f64, f64),
    pub out: Option<PathBuf>,
}

/// Default points per axis by dimension.
pub const DEFAULT_GRID_N: [usize; 3] = [129, 33, 9];

pub fn run(args: &ApplyArgs) -> CliResult<()> {
    let loaded = load(&args.spec)?;
    let spec = &loaded.spec;
    let n = spec.dimension;
    let f = resolve_function(&args.function, n)?;
    let grid_n = args.grid_n.unwrap_or(DEFAULT_GRID_N[(n - 1).min(2)]);
    let (a, b) = args.t_range;
    let points = tensor(&linspace(a, b, grid_n).iter().map(|t| t.exp()).collect::<Vec<_>>(), n);

    let h = Applied::new(spec, f.clone())?;
    let values = evaluate(&h, &points)?;
    let estimate = match coarse(spec) {
        Some(c) => {
            let hc = Applied::new(&c, f)?;
            let coarse_values = evaluate(&hc, &points)?;
            values.iter().zip(&coarse_values).map(|(v, w)| (v - w).norm()).fold(0.0, f64::max)
        }
        None => 0.0,
    };

    let mut columns = axis_names("x", n);
    columns.extend(["re".to_string(), "im".to_string()]);
    let mut table = Table::new(columns);
    table.meta("command", "apply");
    table.meta("spec", &loaded.file_name);
    table.meta("spec_sha256", &loaded.sha256);
    table.meta("dimension", n);
    table.meta("p", spec.exponent_p);
    table.meta("kernel", kernel_summary(spec));
    table.meta("function", &args.function);
    table.meta("grid", format!("x = exp(t), t in [{a}, {b}], {grid_n} points per axis"));
    table.meta("quadrature_error_estimate", format!("{estimate:.3e}"));
    for (x, v) in points.iter().zip(&values) {
        let mut row = x.clone();
        row.extend([v.re, v.im]);
        table.push(row);
    }
    emit(args.out.as_ref(), &table.render()?)
}

fn evaluate(h: &Applied, points: &[Vec<f64>]) -> CliResult<Vec<Complex64>> {
    Ok(points.par_iter().map(|x| h.try_eval(x)).collect::<hausdorff::Result<Vec<_>>>()?)
}

/// The same spec on a box rule of half the Gauss order, for the error estimate.
fn coarse(spec: &OperatorSpec) -> Option<OperatorSpec> {
    let MeasureSpace::Box { lower, upper, rule } = &spec.measure else { return None };
    let mut c = spec.clone();
    c.measure = MeasureSpace::Box {
        lower: lower.clone(),
        upper: upper.clone(),
        rule: BoxRule { gauss_order: (rule.gauss_order / 2).max(2), ..*rule },
    };
    Some(c)
}

/// A library identifier, or a file of `x,value` or `x,re,im` rows.
pub fn resolve_function(id: &str, n: usize) -> CliResult<FnRef> {
    if let Some(f) = library(id, n) {
        return Ok(f);
    }
    let path = Path::new(id);
    if !path.exists() {
        let ids = hausdorff::function::LIBRARY_IDS.join(", ");
        return Err(CliError::Validation(format!("unknown function `{id}`; expected one of {ids} or a file")));
    }
    if n != 1 {
        return Err(CliError::Validation("tabulated functions are one-dimensional".into()));
    }
    Ok(Arc::new(tabulated(path)?))
}

fn tabulated(path: &Path) -> CliResult<GridFunction> {
    let bad = |msg: String| CliError::Validation(format!("{}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let (mut x, mut v) = (Vec::new(), Vec::new());
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let nums: Vec<f64> = match rec.iter().map(str::parse).collect() {
            Ok(nums) => nums,
            // Tolerate one header line.
            Err(_) if i == 0 => continue,
            Err(_) => return Err(bad(format!("row {} is not numeric", i + 1))),
        };
        match nums[..] {
            [_, re] => v.push(Complex64::new(re, 0.0)),
            [_, re, im] => v.push(Complex64::new(re, im)),
            _ => return Err(bad(format!("row {} needs 2 or 3 columns", i + 1))),
        }
        x.push(nums[0]);
    }
    if x.len() < 2 {
        return Err(bad("need at least two rows".into()));
    }
    let weights: Vec<f64> = (0..x.len())
        .map(|k| 0.5 * (x[(k + 1).min(x.len() - 1)] - x[k.saturating_sub(1)]))
        .collect();
    let axis = Axis::custom(x, weights).map_err(|e| bad(e.to_string()))?;
    GridFunction::new(vec![axis], v).map_err(|e| bad(e.to_string()))
}
