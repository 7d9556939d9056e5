//! Hermitian foundation: state validation, eigendecomposition with
//! degeneracy clustering, exact entropy and change of basis.

use std::ops::Range;

use nalgebra::linalg::SymmetricEigen;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Allowed |A - A†| for states and perturbations.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Slack on top of the declared trace deficit.
pub const TRACE_TOL: f64 = 1e-12;
/// Most negative eigenvalue tolerated in a density matrix.
pub const NEGATIVE_TOL: f64 = 1e-12;
/// Eigenvalues at or below this are treated as exactly zero.
pub const ZERO_FLOOR: f64 = 1e-15;
/// Couplings into the null space larger than this make a formula inapplicable.
pub const COUPLING_TOL: f64 = 1e-12;
/// Default relative gap below which adjacent eigenvalues are one level.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

/// A validated density matrix: Hermitian, PSD, trace one up to the declared
/// deficit (truncated Fock states are not renormalised).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    trace_deficit: f64,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix, trace_deficit: f64) -> Result<Self> {
        validate_density(&mat, trace_deficit)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn trace_deficit(&self) -> f64 {
        self.trace_deficit
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }
}

/// Checks every density-matrix invariant without modifying the input.
pub fn validate_density(mat: &ComplexMatrix, trace_deficit: f64) -> Result<DensityMatrix> {
    if !(trace_deficit >= 0.0 && trace_deficit.is_finite()) {
        return Err(Error::InvalidParameter(format!("trace deficit must be finite and >= 0, got {trace_deficit}")));
    }
    let defect = mat.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { observed: defect, bound: HERMITIAN_TOL });
    }
    let tr = mat.trace().re;
    let bound = trace_deficit + TRACE_TOL;
    if (tr - 1.0).abs() > bound {
        return Err(Error::TraceOutOfRange { observed: tr, bound });
    }
    let eig = hermitian_eigen(mat)?;
    let min = eig.values.last().copied().unwrap_or(0.0);
    if min < -NEGATIVE_TOL {
        return Err(Error::NegativeEigenvalue { observed: min, bound: NEGATIVE_TOL });
    }
    Ok(DensityMatrix { mat: mat.clone(), trace_deficit })
}

/// A Hermitian, traceless perturbation H (or one term H⁽ⁿ⁾).
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationOp {
    mat: ComplexMatrix,
}

impl PerturbationOp {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        Self::with_trace_allowance(mat, 0.0)
    }

    /// Like [`PerturbationOp::new`] but tolerates |Tr H| up to
    /// `allowance + 1e-12`, for operators built in a truncated basis.
    pub fn with_trace_allowance(mat: ComplexMatrix, allowance: f64) -> Result<Self> {
        let defect = mat.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian { observed: defect, bound: HERMITIAN_TOL });
        }
        let tr = mat.trace().norm();
        let bound = allowance + TRACE_TOL;
        if tr > bound {
            return Err(Error::NotTraceless { observed: tr, bound });
        }
        Ok(PerturbationOp { mat })
    }

    pub fn zero(dim: usize) -> Self {
        PerturbationOp { mat: ComplexMatrix::zeros(dim) }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }
}

/// One group of eigenvalues equal within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub range: Range<usize>,
    /// Mean of the member eigenvalues.
    pub eigenvalue: f64,
    /// All members are at or below [`ZERO_FLOOR`].
    pub null: bool,
}

impl Cluster {
    pub fn len(&self) -> usize {
        self.range.len()
    }

    pub fn is_empty(&self) -> bool {
        self.range.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Basis {
    /// Column `i` of the eigenvector matrix is the unit vector `e_{perm[i]}`.
    Permutation(Vec<usize>),
    Dense(ComplexMatrix),
}

/// Eigenvalues (descending), eigenvectors and the cluster partition of ρ₀.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    eigenvalues: Vec<f64>,
    basis: Basis,
    clusters: Vec<Cluster>,
    cluster_tol: f64,
}

impl SpectralData {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn cluster_tol(&self) -> f64 {
        self.cluster_tol
    }

    /// Unitary whose columns are the eigenvectors, in eigenvalue order.
    pub fn eigenvectors(&self) -> ComplexMatrix {
        match &self.basis {
            Basis::Dense(v) => v.clone(),
            Basis::Permutation(p) => {
                let mut v = ComplexMatrix::zeros(p.len());
                for (col, &row) in p.iter().enumerate() {
                    v.set(row, col, Complex64::new(1.0, 0.0));
                }
                v
            }
        }
    }

    pub fn is_null(&self, i: usize) -> bool {
        self.eigenvalues[i] <= ZERO_FLOOR
    }

    /// Indices with eigenvalue above the zero floor.
    pub fn active_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| !self.is_null(i)).collect()
    }

    /// True when every non-null cluster is a single eigenvalue.
    pub fn is_nondegenerate(&self) -> bool {
        self.clusters.iter().all(|c| c.null || c.len() == 1)
    }

    /// First non-null cluster with more than one member.
    pub fn first_degenerate(&self) -> Option<(usize, &Cluster)> {
        self.clusters.iter().enumerate().find(|(_, c)| !c.null && c.len() > 1)
    }

    pub(crate) fn require_nondegenerate(&self) -> Result<()> {
        match self.first_degenerate() {
            Some((k, c)) => Err(Error::DegenerateSpectrum { cluster: k, size: c.len() }),
            None => Ok(()),
        }
    }

    /// V·diag(E)·V†.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = ComplexMatrix::from_real_diagonal(&self.eigenvalues);
        d.conjugate_by(&self.eigenvectors())
    }

    /// Fails if a floored eigenvalue couples to anything through `hb`.
    /// With `diagonal_only`, only the diagonal elements are inspected.
    pub(crate) fn check_null_coupling(&self, hb: &ComplexMatrix, diagonal_only: bool) -> Result<()> {
        let n = self.dim();
        for i in (0..n).filter(|&i| self.is_null(i)) {
            let cols: Box<dyn Iterator<Item = usize>> = if diagonal_only { Box::new(i..=i) } else { Box::new(0..n) };
            for j in cols {
                let c = hb.get(i, j).norm();
                if c > COUPLING_TOL {
                    return Err(Error::NullSpaceCoupling {
                        row: i,
                        col: j,
                        eigenvalue: self.eigenvalues[i],
                        coupling: c,
                        bound: COUPLING_TOL,
                    });
                }
            }
        }
        Ok(())
    }
}

struct Eigen {
    values: Vec<f64>,
    basis: Basis,
}

/// Eigendecomposition sorted by descending eigenvalue. Diagonal input is
/// handled exactly, without the iterative solver.
fn hermitian_eigen(mat: &ComplexMatrix) -> Result<Eigen> {
    let n = mat.dim();
    if mat.max_off_diagonal() == 0.0 {
        let diag: Vec<f64> = (0..n).map(|i| mat.get(i, i).re).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.sort_by(|&a, &b| diag[b].total_cmp(&diag[a]).then(a.cmp(&b)));
        let values = perm.iter().map(|&i| diag[i]).collect();
        return Ok(Eigen { values, basis: Basis::Permutation(perm) });
    }
    let m = mat.as_dmatrix();
    let sym: DMatrix<Complex64> = (m + m.adjoint()).map(|z| z * 0.5);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 0).ok_or(Error::EigensolverFailure { dim: n })?;
    if eig.eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigensolverFailure { dim: n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut v = DMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        v.set_column(col, &eig.eigenvectors.column(src));
    }
    Ok(Eigen { values, basis: Basis::Dense(ComplexMatrix::from_dmatrix(v)?) })
}

/// Eigenvalues of a Hermitian matrix in descending order.
pub fn eigenvalues(mat: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(mat)?.values)
}

/// Gap-groups a descending list. Two neighbours share a cluster when their
/// gap is at most `tol` times the larger modulus, or when both are null.
fn cluster_eigenvalues(values: &[f64], tol: f64) -> Vec<Cluster> {
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 0..values.len() {
        let last = i + 1 == values.len();
        let split = last || {
            let (a, b) = (values[i], values[i + 1]);
            let both_null = a <= ZERO_FLOOR && b <= ZERO_FLOOR;
            let one_null = (a <= ZERO_FLOOR) != (b <= ZERO_FLOOR);
            one_null || (!both_null && (a - b) > tol * a.abs().max(b.abs()))
        };
        if split {
            let members = &values[start..=i];
            let mean = members.iter().sum::<f64>() / members.len() as f64;
            clusters.push(Cluster { range: start..i + 1, eigenvalue: mean, null: members[0] <= ZERO_FLOOR });
            start = i + 1;
        }
    }
    clusters
}

/// Eigendecomposition of ρ₀ with eigenvalues sorted descending and grouped by
/// relative gap `cluster_tol`.
pub fn decompose(rho0: &DensityMatrix, cluster_tol: f64) -> Result<SpectralData> {
    decompose_hermitian(rho0.matrix(), cluster_tol)
}

pub(crate) fn decompose_hermitian(mat: &ComplexMatrix, cluster_tol: f64) -> Result<SpectralData> {
    if !(cluster_tol > 0.0 && cluster_tol.is_finite()) {
        return Err(Error::InvalidParameter(format!("cluster tolerance must be > 0, got {cluster_tol}")));
    }
    let eig = hermitian_eigen(mat)?;
    let clusters = cluster_eigenvalues(&eig.values, cluster_tol);
    Ok(SpectralData { eigenvalues: eig.values, basis: eig.basis, clusters, cluster_tol })
}

/// −Σ λ log λ in nats, skipping eigenvalues at or below [`ZERO_FLOOR`].
pub fn entropy_of_eigenvalues(values: &[f64]) -> f64 {
    -values.iter().filter(|&&l| l > ZERO_FLOOR).map(|&l| l * l.ln()).sum::<f64>()
}

/// Von Neumann entropy −Tr ρ log ρ in nats.
pub fn entropy_exact(rho: &DensityMatrix) -> Result<f64> {
    Ok(entropy_of_eigenvalues(&eigenvalues(rho.matrix())?))
}

/// H expressed in the eigenbasis of ρ₀: V†·H·V.
pub fn to_eigenbasis(h: &PerturbationOp, spec: &SpectralData) -> Result<ComplexMatrix> {
    matrix_to_eigenbasis(h.matrix(), spec)
}

pub(crate) fn matrix_to_eigenbasis(h: &ComplexMatrix, spec: &SpectralData) -> Result<ComplexMatrix> {
    if h.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), found: h.dim() });
    }
    match &spec.basis {
        Basis::Permutation(p) => {
            let n = p.len();
            let mut out = ComplexMatrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    out.set(i, j, h.get(p[i], p[j]));
                }
            }
            Ok(out)
        }
        Basis::Dense(v) => Ok(v.adjoint().mul(h).mul(v)),
    }
}

/// Inverse of [`to_eigenbasis`]: V·A·V†.
pub(crate) fn from_eigenbasis(a: &ComplexMatrix, spec: &SpectralData) -> ComplexMatrix {
    match &spec.basis {
        Basis::Permutation(p) => {
            let n = p.len();
            let mut out = ComplexMatrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    out.set(p[i], p[j], a.get(i, j));
                }
            }
            out
        }
        Basis::Dense(v) => a.conjugate_by(v),
    }
}
