//! Continuous-variable example instances in a truncated Fock basis.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::series::multi::PerturbationSeries;
use crate::spectral::{decompose_hermitian, DensityMatrix, PerturbationOp, TRACE_TOL};

/// Default bound on the probability mass cut off by truncation.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;
/// Largest truncation chosen automatically.
pub const MAX_DEFAULT_DIM: usize = 200;

fn default_tail_tol() -> f64 {
    DEFAULT_TAIL_TOL
}

/// Thermal ratio v = N/(N+1), amplitude α and Fock cutoff D per mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockStateSpec {
    pub v: f64,
    #[serde(with = "complex_pair")]
    pub alpha: Complex64,
    #[serde(rename = "D")]
    pub dim: usize,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
}

mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

impl FockStateSpec {
    pub fn new(v: f64, alpha: Complex64, dim: usize) -> Result<Self> {
        let s = FockStateSpec { v, alpha, dim, tail_tol: DEFAULT_TAIL_TOL };
        s.validate()?;
        Ok(s)
    }

    /// Uses [`default_dim`] for the cutoff.
    pub fn with_default_dim(v: f64, alpha: Complex64) -> Result<Self> {
        check_v(v)?;
        Self::new(v, alpha, default_dim(v))
    }

    pub fn with_tail_tol(mut self, tail_tol: f64) -> Result<Self> {
        self.tail_tol = tail_tol;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        check_v(self.v)?;
        if !(self.alpha.re.is_finite() && self.alpha.im.is_finite()) {
            return Err(Error::InvalidParameter("alpha must be finite".into()));
        }
        check_dim(self.dim)?;
        if !(self.tail_tol > 0.0 && self.tail_tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("tail tolerance must be > 0, got {}", self.tail_tol)));
        }
        Ok(())
    }

    /// v^D, the one-mode probability lost to truncation.
    pub fn tail_mass(&self) -> f64 {
        self.v.powi(self.dim as i32)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: FockStateSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    fn check_tail(&self, tail: f64) -> Result<()> {
        if tail > self.tail_tol {
            return Err(Error::TruncationTooCoarse { tail, bound: self.tail_tol });
        }
        Ok(())
    }
}

fn check_v(v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::InvalidParameter(format!("v must lie in (0, 1), got {v}")));
    }
    Ok(())
}

fn check_dim(dim: usize) -> Result<()> {
    if !(2..=crate::matrix::MAX_DIM).contains(&dim) {
        return Err(Error::InvalidParameter(format!("truncation D must be in 2..={}, got {dim}", crate::matrix::MAX_DIM)));
    }
    Ok(())
}

/// Smallest D with v^D < 1e-12, capped at [`MAX_DEFAULT_DIM`].
pub fn default_dim(v: f64) -> usize {
    let d = (DEFAULT_TAIL_TOL.ln() / v.ln()).ceil();
    if !d.is_finite() {
        return MAX_DEFAULT_DIM;
    }
    let mut d = (d as usize).clamp(2, MAX_DEFAULT_DIM);
    while d < MAX_DEFAULT_DIM && v.powi(d as i32) >= DEFAULT_TAIL_TOL {
        d += 1;
    }
    d
}

fn thermal_populations(v: f64, dim: usize) -> Vec<f64> {
    (0..dim).map(|n| (1.0 - v) * v.powi(n as i32)).collect()
}

/// (1−v)Σ vⁿ|n⟩⟨n| for n < D, not renormalised; the deficit is v^D.
pub fn thermal_state(v: f64, dim: usize, tail_tol: f64) -> Result<DensityMatrix> {
    let spec = FockStateSpec::new(v, Complex64::new(0.0, 0.0), dim)?.with_tail_tol(tail_tol)?;
    spec.check_tail(spec.tail_mass())?;
    DensityMatrix::new(ComplexMatrix::from_real_diagonal(&thermal_populations(v, dim)), spec.tail_mass())
}

/// The one-mode thermal state at `spec`.
pub fn onemode_state(spec: &FockStateSpec) -> Result<DensityMatrix> {
    thermal_state(spec.v, spec.dim, spec.tail_tol)
}

/// H = (1−v)(α a†ρ_T + α* ρ_T a): Hₙ,ₙ₋₁ = (1−v)α√n Eₙ₋₁ and
/// Hₙ,ₙ₊₁ = (1−v)α*√(n+1) Eₙ.
pub fn onemode_perturbation(spec: &FockStateSpec) -> Result<PerturbationOp> {
    spec.validate()?;
    spec.check_tail(spec.tail_mass())?;
    let e = thermal_populations(spec.v, spec.dim);
    let w = 1.0 - spec.v;
    let mut h = ComplexMatrix::zeros(spec.dim);
    for n in 0..spec.dim - 1 {
        let amp = w * ((n + 1) as f64).sqrt() * e[n];
        h.set(n + 1, n, spec.alpha * amp);
        h.set(n, n + 1, spec.alpha.conj() * amp);
    }
    PerturbationOp::new(h)
}

/// ρ_T ⊗ ρ_T and H = (1−v)²(α* a₁†a₂†ρ₂ + α ρ₂a₁a₂) on D² states, flat
/// index j·D + k for |j⟩⊗|k⟩.
pub fn twomode_state_and_perturbation(spec: &FockStateSpec) -> Result<(DensityMatrix, PerturbationOp)> {
    spec.validate()?;
    let d = spec.dim;
    // the gate is per mode; the carried deficit is the joint one
    spec.check_tail(spec.tail_mass())?;
    let tail = 1.0 - (1.0 - spec.tail_mass()).powi(2);
    let dim = d.checked_mul(d).filter(|&n| n <= crate::matrix::MAX_DIM).ok_or_else(|| {
        Error::InvalidParameter(format!("two-mode dimension D² exceeds {}", crate::matrix::MAX_DIM))
    })?;
    let w = (1.0 - spec.v) * (1.0 - spec.v);
    let pop = |j: usize, k: usize| w * spec.v.powi((j + k) as i32);
    let idx = |j: usize, k: usize| j * d + k;
    let mut diag = vec![0.0; dim];
    let mut h = ComplexMatrix::zeros(dim);
    for j in 0..d {
        for k in 0..d {
            diag[idx(j, k)] = pop(j, k);
            if j + 1 < d && k + 1 < d {
                let amp = w * (((j + 1) * (k + 1)) as f64).sqrt() * pop(j, k);
                h.set(idx(j + 1, k + 1), idx(j, k), spec.alpha.conj() * amp);
                h.set(idx(j, k), idx(j + 1, k + 1), spec.alpha * amp);
            }
        }
    }
    let rho = DensityMatrix::new(ComplexMatrix::from_real_diagonal(&diag), tail)?;
    Ok((rho, PerturbationOp::new(h)?))
}

/// Truncated annihilation operator, a|n⟩ = √n|n−1⟩.
pub fn annihilation(dim: usize) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(dim);
    for n in 1..dim {
        a.set(n - 1, n, Complex64::new((n as f64).sqrt(), 0.0));
    }
    a
}

/// |Tr H⁽²⁾| of the truncated displaced-thermal second-order term,
/// (1−v)²|α|²·D·v^(D−1).
pub fn displaced_trace_defect(spec: &FockStateSpec) -> f64 {
    let w = 1.0 - spec.v;
    w * w * spec.alpha.norm_sqr() * spec.dim as f64 * spec.v.powi(spec.dim as i32 - 1)
}

/// {H⁽¹⁾, H⁽²⁾} for the displaced thermal state D(εα)ρ_T D(εα)†, with
/// H⁽²⁾ = ½(1−v)²[α²a†²ρ_T + α*²ρ_T a² + 2|α|²a†ρ_T a] − (1−v)|α|²ρ_T.
pub fn displaced_thermal_terms(spec: &FockStateSpec) -> Result<PerturbationSeries> {
    let h1 = onemode_perturbation(spec)?;
    let d = spec.dim;
    let rho = ComplexMatrix::from_real_diagonal(&thermal_populations(spec.v, d));
    let a = annihilation(d);
    let ad = a.adjoint();
    let (al, w) = (spec.alpha, 1.0 - spec.v);
    let mut bracket = ad.mul(&ad).mul(&rho).as_dmatrix() * (al * al);
    bracket += rho.mul(&a).mul(&a).as_dmatrix() * (al.conj() * al.conj());
    bracket += ad.mul(&rho).mul(&a).as_dmatrix() * Complex64::new(2.0 * al.norm_sqr(), 0.0);
    let h2 = ComplexMatrix::from_dmatrix(bracket)?.scale(0.5 * w * w).add_scaled(&rho, -w * al.norm_sqr());
    let h2 = PerturbationOp::with_trace_allowance(h2, displaced_trace_defect(spec) + TRACE_TOL)?;
    PerturbationSeries::new(vec![h1, h2])
}

/// exp(αa† − α*a) on the truncated space, from the eigendecomposition of
/// the Hermitian generator i(αa† − α*a).
pub fn displacement_matrix(alpha: Complex64, dim: usize) -> Result<ComplexMatrix> {
    check_dim(dim)?;
    let a = annihilation(dim);
    let g = a.adjoint().as_dmatrix() * alpha - a.as_dmatrix() * alpha.conj();
    let herm = ComplexMatrix::from_dmatrix(g * Complex64::new(0.0, 1.0))?;
    let spec = decompose_hermitian(&herm, crate::spectral::DEFAULT_CLUSTER_TOL)?;
    let v = spec.eigenvectors();
    let mut phase = ComplexMatrix::zeros(dim);
    for (i, &l) in spec.eigenvalues().iter().enumerate() {
        phase.set(i, i, Complex64::new(0.0, -l).exp());
    }
    Ok(phase.conjugate_by(&v))
}
