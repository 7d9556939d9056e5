//! Perturbative expansion of the von Neumann entropy S(ρ₀ + εH) as a Taylor
//! series in ε: spectral closed forms through fourth order, degenerate
//! block formulas, a resolvent-integral route to any order, multi-order
//! perturbations and the continuous-variable example instances.

pub mod cv;
pub mod divdiff;
pub mod error;
pub mod matrix;
pub mod oracle;
pub mod quadrature;
mod resolvent;
pub mod series;
pub mod spectral;

pub use error::{Error, Result};
pub use matrix::ComplexMatrix;
pub use series::degenerate::{block_decompose, derivative1_degenerate, derivative2_degenerate, BlockDecomposition};
pub use series::multi::{entropy_series_multi, rebase_diagonal, PerturbationSeries};
pub use series::nondegenerate::{
    derivative1, derivative2, derivative_n_quadrature, eigenvalue_perturbation, entropy_series, q3, q4_terms,
    EigenvaluePerturbation, Q4Terms,
};
pub use series::{EntropySeries, Method, SeriesOptions};
pub use spectral::{
    decompose, entropy_exact, to_eigenbasis, validate_density, DensityMatrix, PerturbationOp, SpectralData,
};
