//! Dense complex matrices and the shared JSON matrix format.
//!
//! On disk a matrix is `{"dim": d, "entries": [[re, im], ...]}` with exactly
//! `d*d` pairs in row-major order.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest dimension accepted from external input.
pub const MAX_DIM: usize = 4096;

/// Square complex matrix. The dimension is always at least one.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        ComplexMatrix(DMatrix::identity(dim, dim))
    }

    /// Wraps a square nalgebra matrix.
    pub fn from_dmatrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        Ok(ComplexMatrix(m))
    }

    /// Builds a matrix from row-major complex entries.
    pub fn from_row_major(dim: usize, entries: &[Complex64]) -> Result<Self> {
        let expected = dim.checked_mul(dim).ok_or_else(|| Error::Parse(format!("dimension {dim} overflows")))?;
        if dim == 0 {
            return Err(Error::Parse("dimension must be positive".into()));
        }
        if entries.len() != expected {
            return Err(Error::Parse(format!("expected {expected} entries for dim {dim}, found {}", entries.len())));
        }
        Ok(ComplexMatrix(DMatrix::from_row_slice(dim, dim, entries)))
    }

    /// Real diagonal matrix.
    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(*d, 0.0);
        }
        ComplexMatrix(m)
    }

    /// Real matrix given as rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::NotSquare { rows: dim, cols: r.len() });
            }
            entries.extend(r.iter().map(|x| Complex64::new(*x, 0.0)));
        }
        Self::from_row_major(dim, &entries)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.0[(i, j)] = z;
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// max |A - A†| over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.0[(i, j)] - self.0[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Largest off-diagonal modulus.
    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    worst = worst.max(self.0[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// max |A - B| over all entries.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: f64) -> Self {
        ComplexMatrix(self.0.map(|z| z * s))
    }

    pub fn add(&self, other: &ComplexMatrix) -> Self {
        ComplexMatrix(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Self {
        ComplexMatrix(&self.0 - &other.0)
    }

    pub fn mul(&self, other: &ComplexMatrix) -> Self {
        ComplexMatrix(&self.0 * &other.0)
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &ComplexMatrix, s: f64) -> Self {
        let mut out = self.0.clone();
        for (o, b) in out.iter_mut().zip(other.0.iter()) {
            *o += b * s;
        }
        ComplexMatrix(out)
    }

    /// `U * self * U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        ComplexMatrix(&u.0 * &self.0 * u.0.adjoint())
    }

    /// Row-major entries.
    pub fn row_major(&self) -> Vec<Complex64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    /// Parses the shared JSON format.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix serialization cannot fail")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix({}x{}) {:?}", self.dim(), self.dim(), self.row_major())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixRepr {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = MatrixRepr {
            dim: self.dim(),
            entries: self.row_major().into_iter().map(|z| [z.re, z.im]).collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(deserializer)?;
        if repr.dim == 0 || repr.dim > MAX_DIM {
            return Err(de::Error::custom(format!("dim must be in 1..={MAX_DIM}, got {}", repr.dim)));
        }
        let expected = repr.dim * repr.dim;
        if repr.entries.len() != expected {
            return Err(de::Error::custom(format!(
                "expected {expected} entries for dim {}, found {}",
                repr.dim,
                repr.entries.len()
            )));
        }
        if repr.entries.iter().flatten().any(|x| !x.is_finite()) {
            return Err(de::Error::custom("entries must be finite"));
        }
        let entries: Vec<Complex64> = repr.entries.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        Ok(ComplexMatrix(DMatrix::from_row_slice(repr.dim, repr.dim, &entries)))
    }
}
