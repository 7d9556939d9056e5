use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not Hermitian: max |A - A^dagger| = {observed:e} exceeds {bound:e}")]
    NotHermitian { observed: f64, bound: f64 },

    #[error("trace {observed} outside 1 +/- {bound:e}")]
    TraceOutOfRange { observed: f64, bound: f64 },

    #[error("perturbation not traceless: |Tr H| = {observed:e} exceeds {bound:e}")]
    NotTraceless { observed: f64, bound: f64 },

    #[error("negative eigenvalue {observed:e} below -{bound:e}")]
    NegativeEigenvalue { observed: f64, bound: f64 },

    #[error("eigensolver did not converge for dimension {dim}")]
    EigensolverFailure { dim: usize },

    #[error("degenerate spectrum: cluster {cluster} has {size} eigenvalues")]
    DegenerateSpectrum { cluster: usize, size: usize },

    #[error("null-space coupling: |H[{row},{col}]| = {coupling:e} exceeds {bound:e} at floored eigenvalue {eigenvalue:e}")]
    NullSpaceCoupling { row: usize, col: usize, eigenvalue: f64, coupling: f64, bound: f64 },

    #[error("diagonal not zero in eigenbasis: |H[{index},{index}]| = {value:e}")]
    DiagonalNotZero { index: usize, value: f64 },

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} after {panels} panels (requested rel {rel_tol:e})")]
    QuadratureNoConvergence { estimate: f64, error: f64, panels: usize, rel_tol: f64 },

    #[error("internal consistency check {check} failed: {lhs} vs {rhs}")]
    ConsistencyCheck { check: &'static str, lhs: f64, rhs: f64 },

    #[error("rebased state not positive: eigenvalue {observed:e}")]
    RebaseNotPositive { observed: f64 },

    #[error("Fock truncation too coarse: tail mass {tail:e} exceeds {bound:e}")]
    TruncationTooCoarse { tail: f64, bound: f64 },

    #[error("finite-difference stencil leaves the PSD cone: eigenvalue {observed:e} at step {step:e}")]
    StencilLeavesPsdCone { observed: f64, step: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short category tag used by the command-line front end.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::InvalidParameter(_) => "usage",
            Error::NotSquare { .. }
            | Error::DimensionMismatch { .. }
            | Error::NotHermitian { .. }
            | Error::TraceOutOfRange { .. }
            | Error::NotTraceless { .. }
            | Error::NegativeEigenvalue { .. } => "input",
            _ => "domain",
        }
    }
}
