mod common;

use entropy_perturb::series::multi::{compositions, order_breakdown};
use entropy_perturb::*;
use proptest::prelude::*;

fn brute_compositions(k: usize, min_parts: usize) -> Vec<Vec<usize>> {
    // bit i of the mask marks a cut after position i + 1
    let mut out = Vec::new();
    for mask in 0u32..1 << (k - 1) {
        let mut parts = Vec::new();
        let mut last = 0;
        for i in 0..k - 1 {
            if mask >> i & 1 == 1 {
                parts.push(i + 1 - last);
                last = i + 1;
            }
        }
        parts.push(k - last);
        if parts.len() >= min_parts {
            out.push(parts);
        }
    }
    out.sort();
    out
}

fn random_series(seed: u64, dim: usize, terms: usize) -> (DensityMatrix, PerturbationSeries) {
    let inst = common::random_instance(seed, dim, false);
    let mut r = common::rng(seed.wrapping_add(1));
    let mut ops = vec![inst.h];
    for _ in 1..terms {
        let h = common::random_hermitian(&mut r, dim, 0.02, false).conjugate_by(&inst.unitary);
        ops.push(PerturbationOp::new(common::hermitize(&h)).unwrap());
    }
    (inst.rho0, PerturbationSeries::new(ops).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn compositions_match_enumeration(k in 1usize..10, min_parts in 1usize..4) {
        let mut got = compositions(k, min_parts);
        got.sort();
        prop_assert_eq!(got, brute_compositions(k, min_parts));
    }

    #[test]
    fn multi_series_tracks_folded_entropy(seed in any::<u64>(), dim in 2usize..6) {
        let (rho, ps) = random_series(seed, dim, 3);
        let s = entropy_series_multi(&rho, &ps, 3, &SeriesOptions::default()).unwrap();
        let exact = |eps: f64| entropy_exact(&DensityMatrix::new(rho.matrix().add(&ps.fold(eps)), 0.0).unwrap()).unwrap();
        let rem = |eps: f64| (exact(eps) - s.evaluate(eps)).abs();
        let (a, b) = (rem(2e-2), rem(1e-2));
        prop_assert!(b < 1e-6);
        prop_assert!(a / b > 8.0 || a < 1e-12, "ratio {}", a / b);
    }

    #[test]
    fn single_term_reduces_to_plain_series(seed in any::<u64>(), dim in 2usize..7) {
        let (rho, ps) = random_series(seed, dim, 1);
        let a = entropy_series_multi(&rho, &ps, 4, &SeriesOptions::default()).unwrap();
        let b = entropy_series(&rho, &ps.terms()[0], 4, &SeriesOptions::default()).unwrap();
        for k in 0..=4 {
            prop_assert!((a.coeff(k) - b.coeff(k)).abs() < 1e-9);
        }
    }

    #[test]
    fn rebase_reconstructs_exactly(seed in any::<u64>(), dim in 2usize..7, eps in 0.01f64..0.5) {
        let inst = common::random_instance(seed, dim, false);
        let (rho1, h1) = rebase_diagonal(&inst.rho0, &inst.h, eps).unwrap();
        let before = inst.rho0.matrix().add_scaled(inst.h.matrix(), eps);
        let after = rho1.matrix().add_scaled(h1.matrix(), eps);
        prop_assert!(before.max_abs_diff(&after) < 1e-14);
    }
}

#[test]
fn breakdown_orders_and_methods() {
    let (rho, ps) = random_series(9, 4, 2);
    let (_, rows) = order_breakdown(&rho, &ps, 4, &SeriesOptions::default()).unwrap();
    assert_eq!(rows.iter().map(|r| r.order).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
    assert_eq!(rows[0].resolvent_term, 0.0);
    assert_eq!(rows[3].log_term, 0.0);
    let s = entropy_series_multi(&rho, &ps, 2, &SeriesOptions::default()).unwrap();
    assert_eq!(s.methods, vec![Method::ClosedForm, Method::Quadrature]);
}

#[test]
fn series_json_is_strict() {
    let (_, ps) = random_series(3, 3, 2);
    let back = PerturbationSeries::from_json(&ps.to_json()).unwrap();
    assert_eq!(back.max_order(), 2);
    assert!(back.fold(0.1).max_abs_diff(&ps.fold(0.1)) < 1e-15);
    assert!(PerturbationSeries::from_json(r#"{"terms":[]}"#).is_err());
    assert!(PerturbationSeries::from_json(r#"{"terms":[[[1,0],[0,0]]],"x":1}"#).is_err());
}

#[test]
fn pure_state_needs_rebase() {
    let rho = DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[1.0, 0.0]), 0.0).unwrap();
    let h = PerturbationOp::new(ComplexMatrix::from_real_rows(&[&[-0.5, 0.1], &[0.1, 0.5]]).unwrap()).unwrap();
    assert!(entropy_series(&rho, &h, 2, &SeriesOptions::default()).is_err());
    assert!(matches!(rebase_diagonal(&rho, &h, 3.0), Err(Error::RebaseNotPositive { .. })));
}
