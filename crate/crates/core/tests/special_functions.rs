//! Φ1, Φ2 and Θ1–Θ7 against an independent double-exponential quadrature of
//! their defining integrals, 50 random parameter sets each.

mod common;

use common::kernels::{failures, KERNELS, SETS};
use swarmsec::specfun::*;

#[test]
fn every_kernel_matches_reference() {
    for (name, cases) in KERNELS {
        let cases = cases();
        assert_eq!(cases.len(), SETS);
        let bad = failures(&cases);
        assert!(bad.is_empty(), "{name}: {} of {SETS} sets disagree, e.g. {}", bad.len(), bad[0]);
    }
}

#[test]
fn series_paths_run_without_fallback_at_moderate_parameters() {
    // A quadrature budget of one subdivision at an unreachable tolerance makes
    // any fallback fail, so success proves the closed-form path was taken.
    let mut strict = Numerics::default();
    strict.quad.max_subdivisions = 1;
    strict.quad.rel_tol = 1e-300;
    strict.quad.abs_tol = 0.0;
    assert!(theta1(3, 4, 1.3, 2.5, 0.4, &strict).is_ok());
    assert!(theta2(3, 2, 1.79, 2.1, 0.33, &strict).is_ok());
    assert!(theta3(2, 3, 2, 1.79, 2.1, 1.03, 0.12, 0.33, &strict).is_ok());
    assert!(theta4(0.7, 2, 1, 1.2, 0.3, 2.0, &strict).is_ok());
    assert!(theta5(0.4, 3, 5, 1.79, 1.03, 0.12, &strict).is_ok());
    assert!(theta6(0.4, 3, 5, 1.79, 1.03, 0.12, &strict).is_ok());
    assert!(theta7(2, 3, 1.79, 0.8, 0.5, &strict).is_ok());
}
