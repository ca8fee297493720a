use std::path::PathBuf;

use hausdorff::spectral::{Predicate, CLOUD_TOLERANCE};
use hausdorff::{invertibility, operator_norm, spectrum_cloud, Invertibility, SGrid, Symbol};
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::output::{axis_names, emit, kernel_summary, load, Table};

pub struct SpectrumArgs {
    pub spec: PathBuf,
    pub s_range: Option<(f64, f64)>,
    pub grid_n: Option<usize>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub summary: Option<PathBuf>,
}

/// Below this `|φ|` a sampled point witnesses non-invertibility.
pub const INVERTIBILITY_FLOOR: f64 = 1e-6;

pub fn run(args: &SpectrumArgs) -> CliResult<()> {
    let loaded = load(&args.spec)?;
    let spec = &loaded.spec;
    let n = spec.dimension;
    let sym = Symbol::from_spec(spec)?;
    let d = SGrid::default_for(n);
    let (lo, hi) = args.s_range.unwrap_or((d.lower[0], d.upper[0]));
    let grid = SGrid::cube(n, lo, hi, args.grid_n.unwrap_or(d.points));
    let tol = args.tol.unwrap_or(CLOUD_TOLERANCE);

    let cloud = spectrum_cloud(&sym, &grid)?;
    let norm = operator_norm(&sym, &grid, 3)?;
    let verdict = invertibility(&sym, &grid, INVERTIBILITY_FLOOR)?;
    let violations = cloud.violations(tol);

    let mut columns = axis_names("s", n);
    columns.extend(["re".to_string(), "im".to_string()]);
    let mut table = Table::new(columns);
    table.meta("command", "spectrum");
    table.meta("spec", &loaded.file_name);
    table.meta("spec_sha256", &loaded.sha256);
    table.meta("dimension", n);
    table.meta("kernel", kernel_summary(spec));
    table.meta("grid", format!("s in [{lo}, {hi}], {} points per axis", grid.points));
    for (s, z) in cloud.s.iter().zip(&cloud.points) {
        let mut row = s.clone();
        row.extend([z.re, z.im]);
        table.push(row);
    }
    emit(args.out.as_ref(), &table.render()?)?;

    let predicate = match &cloud.predicate {
        Predicate::Circle { center, radius } => json!({"kind": "circle", "center": [center.re, center.im], "radius": radius}),
        Predicate::CesaroRegion { n } => json!({"kind": "cesaro_region", "dimension": n}),
        Predicate::None => json!({"kind": "none"}),
    };
    let inv = match &verdict {
        Invertibility::Invertible { inf, exact } => json!({"verdict": verdict.label(), "inf": inf, "exact": exact}),
        Invertibility::NotInvertible { witness, analytic } => {
            json!({"verdict": verdict.label(), "witness": witness, "analytic": analytic})
        }
        Invertibility::Inconclusive { inf_estimate } => json!({"verdict": verdict.label(), "inf_estimate": inf_estimate}),
    };
    let summary = json!({
        "spec": loaded.file_name,
        "spec_sha256": loaded.sha256,
        "operator_norm": {"value": norm.value, "at": norm.at, "exact": norm.exact, "boundary": norm.boundary},
        "invertibility": inv,
        "predicate": predicate,
        "points": cloud.points.len(),
        "max_modulus": cloud.max_modulus(),
        "tolerance": tol,
        "violations": violations,
    });
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
    match &args.summary {
        Some(p) => std::fs::write(p, text)?,
        None => eprint!("{text}"),
    }
    if violations > 0 {
        return Err(CliError::Check(format!("{violations} cloud points violate the membership predicate")));
    }
    Ok(())
}
