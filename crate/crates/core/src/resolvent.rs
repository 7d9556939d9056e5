//! Resolvent trace integrals ∫₀^∞ t·Tr{R A₁ R A₂ ⋯ R Aⱼ R} dt with
//! R = (ρ₀ + t)⁻¹, evaluated in the eigenbasis of ρ₀ where R is diagonal.
//!
//! Operators are restricted to the active (non-null) eigenvectors and held
//! in a compressed-row layout; the example perturbations are banded.

use num_complex::Complex64;

use crate::error::Result;
use crate::matrix::ComplexMatrix;
use crate::quadrature::{integrate_semi_infinite, QuadratureOptions, QuadratureResult};
use crate::spectral::SpectralData;

/// Compressed sparse rows with sorted column indices.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SparseOp {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseOp {
    /// Restriction of `m` to the rows/columns listed in `keep`.
    pub(crate) fn restricted(m: &ComplexMatrix, keep: &[usize]) -> Self {
        let n = keep.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for &i in keep {
            for (jj, &j) in keep.iter().enumerate() {
                let z = m.get(i, j);
                if z != Complex64::new(0.0, 0.0) {
                    cols.push(jj);
                    vals.push(z);
                }
            }
            row_ptr.push(cols.len());
        }
        SparseOp { n, row_ptr, cols, vals }
    }

    fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    fn get(&self, i: usize, j: usize) -> Complex64 {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[span.clone()].binary_search(&j) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// self · diag(r)
    fn scale_columns(&self, r: &[f64]) -> SparseOp {
        let vals = self.cols.iter().zip(&self.vals).map(|(&j, &v)| v * r[j]).collect();
        SparseOp { n: self.n, row_ptr: self.row_ptr.clone(), cols: self.cols.clone(), vals }
    }

    fn matmul(&self, other: &SparseOp) -> SparseOp {
        let n = self.n;
        let mut acc = vec![Complex64::new(0.0, 0.0); n];
        let mut mark = vec![false; n];
        let mut touched = Vec::new();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for i in 0..n {
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    if !mark[j] {
                        mark[j] = true;
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                cols.push(j);
                vals.push(acc[j]);
                acc[j] = Complex64::new(0.0, 0.0);
                mark[j] = false;
            }
            touched.clear();
            row_ptr.push(cols.len());
        }
        SparseOp { n, row_ptr, cols, vals }
    }
}

/// The active spectrum of ρ₀ together with eigenbasis operators restricted
/// to it.
pub(crate) struct ResolventContext {
    energies: Vec<f64>,
    scales: Vec<f64>,
    ops: Vec<SparseOp>,
}

impl ResolventContext {
    /// `ops` must already be in the eigenbasis of ρ₀.
    pub(crate) fn new(spec: &SpectralData, ops: &[&ComplexMatrix]) -> Self {
        let active = spec.active_indices();
        let energies: Vec<f64> = active.iter().map(|&i| spec.eigenvalues()[i]).collect();
        let mut scales: Vec<f64> = spec.clusters().iter().filter(|c| !c.null).map(|c| c.eigenvalue).collect();
        if scales.len() > 256 {
            let step = scales.len() as f64 / 256.0;
            scales = (0..256).map(|k| scales[(k as f64 * step) as usize]).collect();
        }
        let ops = ops.iter().map(|m| SparseOp::restricted(m, &active)).collect();
        ResolventContext { energies, scales, ops }
    }

    /// Tr{R A_{c₁} R A_{c₂} ⋯ R A_{cⱼ} R} at t, `chain` indexing into the
    /// operator list.
    fn trace_chain(&self, chain: &[usize], r: &[f64]) -> Complex64 {
        let n = self.energies.len();
        if chain.is_empty() || n == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let g: Vec<SparseOp> = chain.iter().map(|&c| self.ops[c].scale_columns(r)).collect();
        if g.len() == 1 {
            return (0..n).map(|i| g[0].get(i, i) * r[i]).sum();
        }
        let split = g.len().div_ceil(2);
        let product = |part: &[SparseOp]| {
            let mut it = part.iter();
            let first = it.next().expect("non-empty").clone();
            it.fold(first, |acc, m| acc.matmul(m))
        };
        let left = product(&g[..split]);
        let right = product(&g[split..]);
        let mut sum = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for (k, a) in left.row(i) {
                let b = right.get(k, i);
                if b != Complex64::new(0.0, 0.0) {
                    sum += a * b * r[i];
                }
            }
        }
        sum
    }

    /// ∫₀^∞ t Σ_c w_c Re Tr{chain_c} dt.
    pub(crate) fn integrate(&self, chains: &[(f64, Vec<usize>)], opts: &QuadratureOptions) -> Result<QuadratureResult> {
        if self.energies.is_empty() || chains.is_empty() {
            return Ok(QuadratureResult { value: 0.0, error: 0.0, panels: 0 });
        }
        let f = |t: f64| {
            let r: Vec<f64> = self.energies.iter().map(|e| 1.0 / (e + t)).collect();
            let tr: f64 = chains.iter().map(|(w, c)| w * self.trace_chain(c, &r).re).sum();
            t * tr
        };
        integrate_semi_infinite(f, &self.scales, opts)
    }
}
