use std::path::PathBuf;

use clap::ValueEnum;
use hausdorff::symbol::symbol_quadrature;
use hausdorff::{Error, Symbol};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::output::{axis_names, emit, kernel_summary, linspace, load, tensor, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Closed,
    Quadrature,
    Both,
}

pub struct SymbolArgs {
    pub spec: PathBuf,
    pub s_range: (f64, f64),
    pub grid_n: Option<usize>,
    pub mode: Mode,
    pub tol: f64,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_GRID_N: [usize; 3] = [201, 41, 11];

pub fn run(args: &SymbolArgs) -> CliResult<()> {
    let loaded = load(&args.spec)?;
    let spec = &loaded.spec;
    let n = spec.dimension;
    let sym = Symbol::from_spec(spec)?;
    if args.mode != Mode::Quadrature && !sym.is_closed_form() {
        return Err(CliError::Validation(format!(
            "no closed form for {}; use --mode quadrature",
            kernel_summary(spec)
        )));
    }
    let grid_n = args.grid_n.unwrap_or(DEFAULT_GRID_N[(n - 1).min(2)]);
    let points = tensor(&linspace(args.s_range.0, args.s_range.1, grid_n), n);

    let closed = match args.mode {
        Mode::Quadrature => None,
        _ => Some(sym.eval_many(&points)?),
    };
    let quad: Option<Vec<Result<Complex64, Error>>> = match args.mode {
        Mode::Closed => None,
        _ => Some(points.par_iter().map(|s| symbol_quadrature(spec, s)).collect()),
    };

    let mut refused = Vec::new();
    if let Some(q) = &quad {
        for r in q {
            match r {
                Err(e @ Error::RefinementFailure { .. }) => refused.push(e.to_string()),
                Err(e) => return Err(CliError::Validation(e.to_string())),
                Ok(_) => {}
            }
        }
    }
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let quad_at = |i: usize| quad.as_ref().map(|q| q[i].as_ref().copied().unwrap_or(nan));

    let mut columns = axis_names("s", n);
    columns.extend(["re".to_string(), "im".to_string()]);
    if args.mode == Mode::Both {
        columns.push("agreement".into());
    }
    let mut table = Table::new(columns);
    table.meta("command", "symbol");
    table.meta("spec", &loaded.file_name);
    table.meta("spec_sha256", &loaded.sha256);
    table.meta("dimension", n);
    table.meta("p", spec.exponent_p);
    table.meta("kernel", kernel_summary(spec));
    table.meta("symbol", sym.describe());
    table.meta("mode", format!("{:?}", args.mode).to_lowercase());
    table.meta("grid", format!("s in [{}, {}], {grid_n} points per axis", args.s_range.0, args.s_range.1));

    let mut worst = 0.0f64;
    for (i, s) in points.iter().enumerate() {
        let mut row = s.clone();
        let value = match (&closed, quad_at(i)) {
            (Some(c), _) => c[i],
            (None, Some(q)) => q,
            (None, None) => unreachable!(),
        };
        row.extend([value.re, value.im]);
        if let (Some(c), Some(q)) = (&closed, quad_at(i)) {
            let d = (c[i] - q).norm();
            if d.is_finite() {
                worst = worst.max(d);
            }
            row.push(d);
        }
        table.push(row);
    }
    if args.mode == Mode::Both {
        table.meta("max_agreement", format!("{worst:.3e}"));
        table.meta("tolerance", format!("{:e}", args.tol));
    }
    emit(args.out.as_ref(), &table.render()?)?;

    if !refused.is_empty() {
        for msg in refused.iter().take(5) {
            eprintln!("warning: {msg}");
        }
        return Err(CliError::Refusal(format!("{} of {} quadrature rows refused", refused.len(), points.len())));
    }
    if args.mode == Mode::Both && worst > args.tol {
        return Err(CliError::Check(format!("closed form and quadrature differ by {worst:.3e} > {}", args.tol)));
    }
    Ok(())
}
