use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::nondegenerate::{coefficient_quadrature, derivative2, q3, q4_terms};
use crate::series::SeriesOptions;
use crate::spectral::{decompose, to_eigenbasis, DensityMatrix, PerturbationOp};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrosscheckRow {
    pub order: usize,
    /// s_k from the spectral closed form.
    pub closed_form: f64,
    /// s_k from the resolvent integral.
    pub quadrature: f64,
    pub difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrosscheckReport {
    pub rows: Vec<CrosscheckRow>,
}

impl CrosscheckReport {
    pub fn max_difference(&self) -> f64 {
        self.rows.iter().map(|r| r.difference).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("{:>5}  {:>24}  {:>24}  {:>10}\n", "order", "closed_form", "quadrature", "abs_diff");
        for r in &self.rows {
            let _ = writeln!(out, "{:>5}  {:>24.16e}  {:>24.16e}  {:>10.3e}", r.order, r.closed_form, r.quadrature, r.difference);
        }
        out
    }
}

/// Closed-form and quadrature values of s_k for each requested k in 2..=4.
pub fn quadrature_crosscheck(
    rho0: &DensityMatrix,
    h: &PerturbationOp,
    orders: &[usize],
    opts: &SeriesOptions,
) -> Result<CrosscheckReport> {
    let spec = decompose(rho0, opts.cluster_tol)?;
    let hb = to_eigenbasis(h, &spec)?;
    let mut rows = Vec::with_capacity(orders.len());
    for &k in orders {
        let closed_form = match k {
            2 => derivative2(&spec, &hb, opts.cross_check)? / 2.0,
            3 => q3(&spec, &hb)?,
            4 => q4_terms(&spec, &hb)?.coefficient(),
            _ => return Err(Error::InvalidParameter(format!("cross-check orders are 2..=4, got {k}"))),
        };
        let quadrature = coefficient_quadrature(&spec, &hb, k, &opts.quadrature)?;
        rows.push(CrosscheckRow { order: k, closed_form, quadrature, difference: (closed_form - quadrature).abs() });
    }
    Ok(CrosscheckReport { rows })
}
