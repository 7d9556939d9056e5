//! Taylor coefficients s_k = (1/k!)·dᵏS/dεᵏ of the entropy of a perturbed
//! state.

pub mod degenerate;
pub mod multi;
pub mod nondegenerate;

use serde::{Deserialize, Serialize};

use crate::quadrature::QuadratureOptions;
use crate::spectral::DEFAULT_CLUSTER_TOL;

/// How one coefficient was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
}

/// S(ρ₀ + εH) ≈ s₀ + Σ_{k=1}^{K} s_k ε^k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropySeries {
    #[serde(rename = "s0")]
    pub base_entropy: f64,
    /// s₁ … s_K
    pub coeffs: Vec<f64>,
    pub methods: Vec<Method>,
}

impl EntropySeries {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// s_k, with s₀ at k = 0 and zero beyond the stored order.
    pub fn coeff(&self, k: usize) -> f64 {
        match k {
            0 => self.base_entropy,
            k => self.coeffs.get(k - 1).copied().unwrap_or(0.0),
        }
    }

    /// Truncated sum at ε (Horner).
    pub fn evaluate(&self, eps: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, s| (acc + s) * eps) + self.base_entropy
    }

    /// Same series with every coefficient divided by log 2.
    pub fn in_bits(&self) -> EntropySeries {
        let f = std::f64::consts::LN_2;
        EntropySeries {
            base_entropy: self.base_entropy / f,
            coeffs: self.coeffs.iter().map(|s| s / f).collect(),
            methods: self.methods.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("series serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOptions {
    pub cluster_tol: f64,
    pub quadrature: QuadratureOptions,
    /// Evaluate both second-order forms and fail when they disagree.
    pub cross_check: bool,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions { cluster_tol: DEFAULT_CLUSTER_TOL, quadrature: QuadratureOptions::default(), cross_check: true }
    }
}
