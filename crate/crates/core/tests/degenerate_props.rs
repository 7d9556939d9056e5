mod common;

use entropy_perturb::cv::{twomode_state_and_perturbation, FockStateSpec};
use entropy_perturb::spectral::DEFAULT_CLUSTER_TOL;
use entropy_perturb::*;
use num_complex::Complex64;
use proptest::prelude::*;

/// Diagonal state whose i-th level has weight ∝ (k+1−i) and multiplicity sizes[i].
fn degenerate_state(sizes: &[usize]) -> DensityMatrix {
    let k = sizes.len();
    let diag: Vec<f64> = sizes.iter().enumerate().flat_map(|(i, &s)| std::iter::repeat_n((k + 1 - i) as f64, s)).collect();
    let sum: f64 = diag.iter().sum();
    DensityMatrix::new(ComplexMatrix::from_real_diagonal(&diag.iter().map(|x| x / sum).collect::<Vec<_>>()), 0.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn block_form_is_basis_independent_within_clusters(seed in any::<u64>(), sizes in prop::collection::vec(1usize..4, 1..4)) {
        let rho = degenerate_state(&sizes);
        let dim = rho.dim();
        prop_assume!(dim >= 2);
        let sd = decompose(&rho, DEFAULT_CLUSTER_TOL).unwrap();
        let mut r = common::rng(seed);
        let hb = to_eigenbasis(&PerturbationOp::new(common::random_hermitian(&mut r, dim, 0.01, false)).unwrap(), &sd).unwrap();
        let mut w = nalgebra::DMatrix::zeros(dim, dim);
        for c in sd.clusters() {
            let u = common::random_unitary(&mut r, c.len());
            for (i, a) in c.range.clone().enumerate() {
                for (j, b) in c.range.clone().enumerate() {
                    w[(a, b)] = u.get(i, j);
                }
            }
        }
        let rotated = hb.conjugate_by(&ComplexMatrix::from_dmatrix(w).unwrap());
        let a = block_decompose(&sd, &hb).unwrap();
        let b = block_decompose(&sd, &rotated).unwrap();
        prop_assert!((derivative1_degenerate(&a).unwrap() - derivative1_degenerate(&b).unwrap()).abs() < 1e-9);
        prop_assert!((derivative2_degenerate(&a).unwrap() - derivative2_degenerate(&b).unwrap()).abs() < 1e-9);
        for n in 0..a.len() {
            for m in 0..a.len() {
                prop_assert!((a.block_weight(n, m) - b.block_weight(n, m)).abs() < 1e-14);
            }
        }
        prop_assert!(a.reassemble().max_abs_diff(&hb) == 0.0);
    }

    #[test]
    fn singleton_clusters_reduce_to_pairwise_forms(seed in any::<u64>(), dim in 2usize..9) {
        let inst = common::random_instance(seed, dim, false);
        let sd = decompose(&inst.rho0, DEFAULT_CLUSTER_TOL).unwrap();
        let hb = to_eigenbasis(&inst.h, &sd).unwrap();
        let bd = block_decompose(&sd, &hb).unwrap();
        prop_assert!((derivative1_degenerate(&bd).unwrap() - derivative1(&sd, &hb).unwrap()).abs() < 1e-12);
        prop_assert!((derivative2_degenerate(&bd).unwrap() - derivative2(&sd, &hb, true).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn degenerate_second_derivative_matches_differences(seed in any::<u64>(), sizes in prop::collection::vec(1usize..4, 2..4)) {
        let rho = degenerate_state(&sizes);
        let dim = rho.dim();
        let sd = decompose(&rho, DEFAULT_CLUSTER_TOL).unwrap();
        let mut r = common::rng(seed);
        let h = common::random_hermitian(&mut r, dim, 0.01, true);
        let hb = to_eigenbasis(&PerturbationOp::new(h.clone()).unwrap(), &sd).unwrap();
        // the block formula needs vanishing intra-cluster blocks
        let mut hz = hb.clone();
        for c in sd.clusters() {
            for a in c.range.clone() {
                for b in c.range.clone() {
                    hz.set(a, b, Complex64::new(0.0, 0.0));
                }
            }
        }
        let bd = block_decompose(&sd, &hz).unwrap();
        let op = PerturbationOp::new(hz.conjugate_by(&sd.eigenvectors())).unwrap();
        let fd = entropy_perturb::oracle::fd_derivative(&rho, &op, 2, 1e-2).unwrap();
        prop_assert!((derivative2_degenerate(&bd).unwrap() - fd.value).abs() < 1e-6);
    }
}

#[test]
fn two_mode_second_order_at_several_v() {
    for v in [0.2, 0.4, 0.5] {
        let spec = FockStateSpec::with_default_dim(v, Complex64::new(1.0, 0.0)).unwrap();
        let (rho, h) = twomode_state_and_perturbation(&spec).unwrap();
        let sd = decompose(&rho, DEFAULT_CLUSTER_TOL).unwrap();
        let bd = block_decompose(&sd, &to_eigenbasis(&h, &sd).unwrap()).unwrap();
        let want = -2.0 * (1.0 - v) / (1.0 + v) * (1.0 / v).ln();
        let got = derivative2_degenerate(&bd).unwrap() / 2.0;
        assert!((got - want).abs() < 1e-8, "v={v}: {got} vs {want}");
        assert!(derivative1_degenerate(&bd).unwrap().abs() < 1e-12);
    }
}

#[test]
fn two_mode_second_order_against_differences() {
    let v = 0.2;
    let spec = FockStateSpec::new(v, Complex64::new(1.0, 0.0), 14).unwrap().with_tail_tol(1e-9).unwrap();
    let (rho, h) = twomode_state_and_perturbation(&spec).unwrap();
    let fd = entropy_perturb::oracle::fd_derivative(&rho, &h, 2, 1e-2).unwrap();
    let s = entropy_series(&rho, &h, 2, &SeriesOptions::default()).unwrap();
    assert!((fd.value - 2.0 * s.coeff(2)).abs() < 1e-6);
    assert!((s.coeff(2) + 2.0 * 0.8 / 1.2 * 5f64.ln()).abs() < 1e-6);
}
