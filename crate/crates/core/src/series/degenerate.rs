//! First and second entropy derivatives on degenerate spectra, through the
//! blocks of H between eigenvalue clusters.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::divdiff::log_slope;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::spectral::{Cluster, SpectralData, COUPLING_TOL};

/// H partitioned into cluster blocks: `block(n, m)` has the entries between
/// the eigenvectors of cluster n and those of cluster m.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecomposition {
    clusters: Vec<Cluster>,
    blocks: Vec<Vec<DMatrix<Complex64>>>,
    cluster_eigenvalues: Vec<f64>,
}

impl BlockDecomposition {
    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn cluster_eigenvalues(&self) -> &[f64] {
        &self.cluster_eigenvalues
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn block(&self, n: usize, m: usize) -> &DMatrix<Complex64> {
        &self.blocks[n][m]
    }

    /// Σᵢⱼ |entry|² of block (n, m).
    pub fn block_weight(&self, n: usize, m: usize) -> f64 {
        self.blocks[n][m].iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn reassemble(&self) -> ComplexMatrix {
        let dim = self.clusters.last().map_or(0, |c| c.range.end);
        let mut out = ComplexMatrix::zeros(dim.max(1));
        for (n, cn) in self.clusters.iter().enumerate() {
            for (m, cm) in self.clusters.iter().enumerate() {
                let b = &self.blocks[n][m];
                for (i, r) in cn.range.clone().enumerate() {
                    for (j, c) in cm.range.clone().enumerate() {
                        out.set(r, c, b[(i, j)]);
                    }
                }
            }
        }
        out
    }

    fn check_null(&self, diagonal_only: bool) -> Result<()> {
        for (n, cn) in self.clusters.iter().enumerate().filter(|(_, c)| c.null) {
            for (m, cm) in self.clusters.iter().enumerate() {
                let b = &self.blocks[n][m];
                for i in 0..b.nrows() {
                    for j in 0..b.ncols() {
                        if diagonal_only && (m != n || i != j) {
                            continue;
                        }
                        let coupling = b[(i, j)].norm();
                        if coupling > COUPLING_TOL {
                            return Err(Error::NullSpaceCoupling {
                                row: cn.range.start + i,
                                col: cm.range.start + j,
                                eigenvalue: cn.eigenvalue,
                                coupling,
                                bound: COUPLING_TOL,
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn block_decompose(spec: &SpectralData, hb: &ComplexMatrix) -> Result<BlockDecomposition> {
    if hb.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), found: hb.dim() });
    }
    let clusters = spec.clusters().to_vec();
    let m = hb.as_dmatrix();
    let blocks = clusters
        .iter()
        .map(|cn| {
            clusters
                .iter()
                .map(|cm| m.view((cn.range.start, cm.range.start), (cn.len(), cm.len())).into_owned())
                .collect()
        })
        .collect();
    let cluster_eigenvalues = clusters.iter().map(|c| c.eigenvalue).collect();
    Ok(BlockDecomposition { clusters, blocks, cluster_eigenvalues })
}

/// dS/dε = −Σₙ Tr(H_nn) log Eₙ over clusters.
pub fn derivative1_degenerate(bd: &BlockDecomposition) -> Result<f64> {
    bd.check_null(true)?;
    let mut sum = 0.0;
    for (n, c) in bd.clusters.iter().enumerate().filter(|(_, c)| !c.null) {
        sum += bd.blocks[n][n].trace().re * c.eigenvalue.ln();
    }
    Ok(-sum)
}

/// d²S/dε² = −Σₙ ‖H_nn‖²/Eₙ − 2Σ_{n<m} ‖H_nm‖²·L(Eₙ, Eₘ), Frobenius norms.
pub fn derivative2_degenerate(bd: &BlockDecomposition) -> Result<f64> {
    bd.check_null(false)?;
    let active: Vec<usize> = (0..bd.len()).filter(|&n| !bd.clusters[n].null).collect();
    let e = &bd.cluster_eigenvalues;
    let mut sum = 0.0;
    for (i, &n) in active.iter().enumerate() {
        sum += bd.block_weight(n, n) / e[n];
        for &m in &active[i + 1..] {
            let w = bd.block_weight(n, m);
            if w != 0.0 {
                sum += 2.0 * w * log_slope(e[n], e[m]);
            }
        }
    }
    Ok(-sum)
}
