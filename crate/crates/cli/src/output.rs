use std::io::Write;
use std::path::{Path, PathBuf};

use hausdorff::{spec_from_json, validate_spec, OperatorSpec};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub struct LoadedSpec {
    pub spec: OperatorSpec,
    pub sha256: String,
    pub file_name: String,
}

/// Reads, parses and validates a spec document.
pub fn load(path: &Path) -> CliResult<LoadedSpec> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::Validation(format!("{} is not UTF-8", path.display())))?;
    let spec = spec_from_json(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let report = validate_spec(&spec).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    if !report.is_valid() {
        let msgs: Vec<String> = report.failures().iter().map(|c| format!("{}: {}", c.name, c.detail)).collect();
        return Err(CliError::Validation(format!("{}: {}", path.display(), msgs.join("; "))));
    }
    Ok(LoadedSpec {
        spec,
        sha256: hex::encode(Sha256::digest(&bytes)),
        file_name: path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
    })
}

/// Human-readable kernel parameters for CSV headers.
pub fn kernel_summary(spec: &OperatorSpec) -> String {
    use hausdorff::spec::{DiscreteLaw, KernelForm};
    let mut s = match &spec.kernel.form {
        KernelForm::Cesaro { scale } => format!("cesaro scale={scale}"),
        KernelForm::Ck { k } => format!("ck k={k}"),
        KernelForm::Discrete(DiscreteLaw::Geometric { ratio, scale }) => {
            format!("discrete geometric ratio={ratio} scale={scale}")
        }
        KernelForm::Discrete(DiscreteLaw::InverseFactorial) => "discrete inverse_factorial".into(),
        KernelForm::Discrete(DiscreteLaw::Delta) => "discrete delta".into(),
        KernelForm::Table(v) => format!("table values={}", v.len()),
    };
    if spec.kernel.conjugate {
        s.push_str(" conjugate");
    }
    if spec.kernel.det_power != 0.0 {
        s.push_str(&format!(" det_power={}", spec.kernel.det_power));
    }
    s
}

/// CSV body preceded by `# key: value` metadata lines.
pub struct Table {
    meta: Vec<(String, String)>,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self { meta: Vec::new(), columns, rows: Vec::new() }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<f64>) {
        self.rows.push(row);
    }

    pub fn render(&self) -> CliResult<Vec<u8>> {
        let mut out = Vec::new();
        for (k, v) in &self.meta {
            writeln!(out, "# {k}: {v}")?;
        }
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| number(*v)))?;
        }
        w.flush()?;
        drop(w);
        Ok(out)
    }
}

/// Shortest round-trip form, in exponent notation away from `[1e-4, 1e15)`.
pub fn number(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Writes to `path`, or stdout when absent.
pub fn emit(path: Option<&PathBuf>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// Inclusive uniform points on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// Tensor points with the last axis varying fastest.
pub fn tensor(axis: &[f64], dim: usize) -> Vec<Vec<f64>> {
    let m = axis.len();
    (0..m.pow(dim as u32))
        .map(|flat| {
            let mut rem = flat;
            let mut x = vec![0.0; dim];
            for j in (0..dim).rev() {
                x[j] = axis[rem % m];
                rem /= m;
            }
            x
        })
        .collect()
}

pub fn axis_names(prefix: &str, dim: usize) -> Vec<String> {
    if dim == 1 {
        vec![prefix.to_string()]
    } else {
        (1..=dim).map(|j| format!("{prefix}{j}")).collect()
    }
}
