//! Complex gamma function.
//!
//! Lanczos approximation with `g = 7` and the nine-term coefficient set
//! below, plus the reflection formula `Γ(z)Γ(1-z) = π / sin(πz)` for
//! `Re z < 1/2`. Relative error stays below `1e-12` on
//! `Re z ∈ [-10, 50]`, `|Im z| ≤ 50`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const LANCZOS_G: f64 = 7.0;

/// Godfrey's coefficients for `g = 7`, `n = 9`.
pub const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

fn lanczos(z: Complex64) -> Complex64 {
    // Valid for Re z ≥ 1/2.
    let z = z - 1.0;
    let mut sum = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    let log = (z + 0.5) * t.ln() - t;
    (2.0 * PI).sqrt() * log.exp() * sum
}

/// `Γ(z)`; nonpositive integers are rejected.
pub fn complex_gamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::GammaPole(z));
    }
    if z.re < 0.5 {
        let s = (PI * z).sin();
        Ok(PI / (s * lanczos(1.0 - z)))
    } else {
        Ok(lanczos(z))
    }
}

/// Real gamma function; `+∞` at poles.
pub fn real_gamma(x: f64) -> f64 {
    complex_gamma(Complex64::new(x, 0.0)).map_or(f64::INFINITY, |g| g.re)
}

/// `Γ(a) / Γ(b)` evaluated through logarithms of the Lanczos sums so that
/// large arguments do not overflow.
pub fn gamma_ratio(a: Complex64, b: Complex64) -> Result<Complex64> {
    if a.re >= 0.5 && b.re >= 0.5 {
        Ok((ln_gamma_right(a) - ln_gamma_right(b)).exp())
    } else {
        Ok(complex_gamma(a)? / complex_gamma(b)?)
    }
}

fn ln_gamma_right(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut sum = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + sum.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn classical_values() {
        assert!((complex_gamma(c(1.0, 0.0)).unwrap() - 1.0).norm() < 1e-14);
        assert!((complex_gamma(c(0.5, 0.0)).unwrap() - PI.sqrt()).norm() < 1e-14);
        assert!((complex_gamma(c(5.0, 0.0)).unwrap() - 24.0).norm() < 1e-12);
        assert!((complex_gamma(c(-0.5, 0.0)).unwrap() + 2.0 * PI.sqrt()).norm() < 1e-13);
    }

    #[test]
    fn modulus_on_critical_line() {
        let g = complex_gamma(c(0.5, 1.0)).unwrap();
        assert!((g.norm_sqr() - PI / PI.cosh()).abs() < 1e-10);
    }

    #[test]
    fn poles_are_rejected() {
        for k in 0..5 {
            assert!(matches!(complex_gamma(c(-(k as f64), 0.0)), Err(Error::GammaPole(_))));
        }
    }

    #[test]
    fn ratio_matches_direct_quotient() {
        let a = c(2.5, -3.0);
        let b = c(3.0, -3.0);
        let direct = complex_gamma(a).unwrap() / complex_gamma(b).unwrap();
        assert!((gamma_ratio(a, b).unwrap() - direct).norm() < 1e-13 * direct.norm());
    }
}
