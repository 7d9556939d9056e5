#![allow(dead_code)]

use entropy_perturb::{ComplexMatrix, DensityMatrix, PerturbationOp};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub struct Instance {
    pub energies: Vec<f64>,
    pub unitary: ComplexMatrix,
    pub rho0: DensityMatrix,
    pub h: PerturbationOp,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    let g = DMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    ComplexMatrix::from_dmatrix(g.qr().q()).unwrap()
}

/// Separated spectrum summing to one, smallest value 0.3/dim.
pub fn random_spectrum(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    let floor = 0.3 / dim as f64;
    let raw: Vec<f64> = (0..dim).map(|i| i as f64 + 0.3 * rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let c = if total > 0.0 { (1.0 - floor * dim as f64) / total } else { 0.0 };
    let mut e: Vec<f64> = raw.iter().map(|r| floor + c * r).collect();
    if dim == 1 {
        e[0] = 1.0;
    }
    e
}

/// Hermitian matrix with independent complex Gaussian entries of the given
/// scale, zero diagonal when `off_diagonal`, trace removed otherwise.
pub fn random_hermitian(rng: &mut impl Rng, dim: usize, scale: f64, off_diagonal: bool) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in i + 1..dim {
            let z = gaussian(rng) * scale;
            h.set(i, j, z);
            h.set(j, i, z.conj());
        }
    }
    if !off_diagonal {
        let d: Vec<f64> = (0..dim).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
        let mean = d.iter().sum::<f64>() / dim as f64;
        for (i, x) in d.iter().enumerate() {
            h.set(i, i, Complex64::new(x - mean, 0.0));
        }
    }
    h
}

/// Non-degenerate ρ₀ = U diag(E) U† and H = U Hb U†, where Hb is the
/// perturbation written in the eigenbasis of ρ₀.
pub fn random_instance(seed: u64, dim: usize, off_diagonal: bool) -> Instance {
    let mut r = rng(seed);
    let energies = random_spectrum(&mut r, dim);
    let unitary = random_unitary(&mut r, dim);
    let hb = random_hermitian(&mut r, dim, 0.02, off_diagonal);
    let rho_m = ComplexMatrix::from_real_diagonal(&energies).conjugate_by(&unitary);
    let h_m = hb.conjugate_by(&unitary);
    Instance {
        energies,
        unitary,
        rho0: DensityMatrix::new(hermitize(&rho_m), 0.0).unwrap(),
        h: PerturbationOp::new(hermitize(&h_m)).unwrap(),
    }
}

pub fn hermitize(m: &ComplexMatrix) -> ComplexMatrix {
    m.add(&m.adjoint()).scale(0.5)
}
