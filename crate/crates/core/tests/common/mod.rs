#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use hausdorff::function::{LogGaussian, Product};
use hausdorff::{load_spec, FnRef, Function, OperatorSpec};
use num_complex::Complex64;
use rand::Rng;

pub const FIXTURES: &[&str] =
    &["cesaro1", "cesaro2", "cesaro3", "ck0_5", "ck1", "ck2", "ck3", "geometric", "identity"];

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture(name: &str) -> OperatorSpec {
    load_spec(fixture_dir().join(format!("{name}.json"))).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn fixtures() -> Vec<(&'static str, OperatorSpec)> {
    FIXTURES.iter().map(|n| (*n, fixture(n))).collect()
}

/// Smooth profile on both half-lines: `Σ c_i g_i(|x|)` with log-normal
/// bumps `g_i` and separate coefficients for `x > 0` and `x < 0`. Reports no
/// breakpoints, so operators keep a single fixed rule.
pub struct RandomProfile {
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

pub fn random_profile<R: Rng>(rng: &mut R) -> FnRef {
    let coeff = |rng: &mut R| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
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

pub fn random_function<R: Rng>(rng: &mut R, n: usize) -> FnRef {
    if n == 1 {
        return random_profile(rng);
    }
    Arc::new(Product::new((0..n).map(|_| random_profile(rng)).collect()))
}
