mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use hausdorff::function::{Combination, LogGaussian};
use hausdorff::operator::{norm_bound_lp, rayleigh_quotient};
use hausdorff::spectral::PowerSeries;
use hausdorff::{
    adjoint_symbol, geometric, mellin_forward, mellin_inverse, spec_from_json, spec_to_json, Applied,
    CommutingFamily, FnRef, Function, LogGrid, MellinGrid, Symbol,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn log_gaussian() -> impl Strategy<Value = LogGaussian> {
    (-0.4..0.4f64, -2.0..2.0f64, 0.5..2.0f64).prop_map(|(power, mean, sigma)| LogGaussian { power, mean, sigma })
}

fn coeff() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn operators_are_linear(f in log_gaussian(), g in log_gaussian(), a in coeff(), b in coeff(), x in 0.01..50.0f64) {
        for name in ["cesaro1", "ck2", "geometric"] {
            let spec = common::fixture(name);
            let (f, g): (FnRef, FnRef) = (Arc::new(f), Arc::new(g));
            let mix: FnRef = Arc::new(Combination { terms: vec![(a, f.clone()), (b, g.clone())] });
            let lhs = Applied::new(&spec, mix).unwrap().eval(&[x]);
            let rhs = a * Applied::new(&spec, f).unwrap().eval(&[x]) + b * Applied::new(&spec, g).unwrap().eval(&[x]);
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()), "{name}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn symbol_is_bounded_by_kernel_norm(s in -30.0..30.0f64, t in -5.0..5.0f64) {
        for (name, spec) in common::fixtures() {
            let sym = Symbol::from_spec(&spec).unwrap();
            let point: Vec<f64> = (0..spec.dimension).map(|j| if j == 0 { s } else { t * j as f64 }).collect();
            let bound = norm_bound_lp(&spec).unwrap();
            prop_assert!(sym.eval(&point).unwrap().norm() <= bound * (1.0 + 1e-12), "{name}");
        }
    }

    #[test]
    fn adjoint_symbol_is_conjugate(s in -30.0..30.0f64) {
        for name in ["cesaro1", "ck0_5", "ck3", "geometric"] {
            let sym = Symbol::from_spec(&common::fixture(name)).unwrap();
            let adj = adjoint_symbol(&sym).unwrap();
            let (a, b) = (adj.eval(&[s]).unwrap(), sym.eval(&[s]).unwrap().conj());
            prop_assert!((a - b).norm() < 1e-14, "{name}");
            // Real kernels on real arguments: φ(−s) = conj φ(s).
            prop_assert!((sym.eval(&[-s]).unwrap() - b).norm() < 1e-13, "{name}");
        }
    }

    #[test]
    fn geometric_symbol_is_periodic(s in -20.0..20.0f64, k in -3i32..3) {
        let sym = Symbol::from_spec(&common::fixture("geometric")).unwrap();
        let shift = 2.0 * PI / 4f64.ln() * k as f64;
        let (a, b) = (sym.eval(&[s]).unwrap(), sym.eval(&[s + shift]).unwrap());
        prop_assert!((a - b).norm() < 1e-11);
    }

    #[test]
    fn ck_symbol_recurrence(k in 0.1..5.0f64, s in -25.0..25.0f64) {
        // φ_k / φ_{k+1} = (k + 1/2 − is) / (k + 1).
        let a = Symbol::ck(k).eval(&[s]).unwrap();
        let b = Symbol::ck(k + 1.0).eval(&[s]).unwrap();
        let want = Complex64::new(k + 0.5, -s) / (k + 1.0);
        prop_assert!((a / b - want).norm() < 1e-10 * want.norm());
    }

    #[test]
    fn cesaro_symbol_lies_on_circle(s in -1e3..1e3f64) {
        let z = Symbol::cesaro(1).eval(&[s]).unwrap();
        prop_assert!(((z - 1.0).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mellin_round_trip_and_plancherel(g in log_gaussian()) {
        let grid = MellinGrid::new(-40.0, 40.0, 2048, vec![1.0]).unwrap();
        let f = grid.sample(&g).unwrap();
        let m = mellin_forward(&f, 2.0).unwrap();
        prop_assert!((m.l2_norm() - f.l2_norm()).abs() < 1e-12 * f.l2_norm());
        let back = mellin_inverse(&m, &grid).unwrap();
        prop_assert!(back.sub(&f).unwrap().l2_norm() < 1e-12 * f.l2_norm());
    }

    #[test]
    fn reciprocal_convolves_to_delta(c in prop::collection::vec(coeff(), 1..8)) {
        let mut coeffs = vec![Complex64::new(20.0, 0.0)];
        coeffs.extend(c);
        let f = PowerSeries::new(coeffs).unwrap();
        let (g, _) = f.reciprocal(40).unwrap();
        for (k, v) in f.convolve(&g, 41).iter().enumerate() {
            let want = if k == 0 { 1.0 } else { 0.0 };
            prop_assert!((v - want).norm() < 1e-13, "k = {k}: {v}");
        }
    }

    #[test]
    fn schema_round_trip(ratio in 0.01..0.99f64, base in 1.1..8.0f64, k in 1usize..60, p in 1.0..4.0f64) {
        let spec = geometric(ratio, base, k, p);
        prop_assert_eq!(spec_from_json(&spec_to_json(&spec)).unwrap(), spec);
    }

    #[test]
    fn commuting_matrices_are_diagonalized(angle in 0.0..PI, e in prop::collection::vec((0.1..10.0f64, 0.1..10.0f64), 1..5)) {
        // A_k = R diag(a_k, b_k) Rᵀ.
        let (c, s) = (angle.cos(), angle.sin());
        let mats: Vec<Vec<f64>> = e
            .iter()
            .map(|(a, b)| vec![a * c * c + b * s * s, (a - b) * c * s, (a - b) * c * s, a * s * s + b * c * c])
            .collect();
        let fam = CommutingFamily::from_matrices(2, &mats).unwrap();
        prop_assert!(fam.orthogonality_defect() < 1e-12);
        for (k, m) in mats.iter().enumerate() {
            let eig: Vec<f64> = fam.eigen.iter().map(|f| f.eval(&[k as f64], k)).collect();
            let back = fam.matrix(&eig);
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert!((back[(i, j)] - m[i * 2 + j]).abs() < 1e-9 * 10.0);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn rayleigh_quotient_respects_bound(g in log_gaussian()) {
        let spec = common::fixture("cesaro1");
        let r = rayleigh_quotient(&spec, Arc::new(g), &LogGrid::new(-40.0, 40.0, 1024)).unwrap();
        prop_assert!(r > 0.0 && r <= norm_bound_lp(&spec).unwrap() + 1e-6, "{r}");
    }
}

#[test]
fn fixtures_match_builtins() {
    use hausdorff::{builtin_cesaro, builtin_ck, geometric_spec, identity_spec};
    for n in 1..=3 {
        assert_eq!(common::fixture(&format!("cesaro{n}")), builtin_cesaro(n));
    }
    for (name, k) in [("ck0_5", 0.5), ("ck1", 1.0), ("ck2", 2.0), ("ck3", 3.0)] {
        assert_eq!(common::fixture(name), builtin_ck(k).unwrap());
    }
    assert_eq!(common::fixture("geometric"), geometric_spec());
    assert_eq!(common::fixture("identity"), identity_spec(1));
}
