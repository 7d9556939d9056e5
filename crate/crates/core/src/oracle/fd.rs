use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::extended::entropy_shift;
use crate::spectral::{DensityMatrix, PerturbationOp};

/// Richardson-extrapolated derivative of ε ↦ S(ρ₀ + εH) at 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeEstimate {
    pub order: usize,
    pub value: f64,
    pub error_estimate: f64,
    pub steps_used: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdOptions {
    pub levels: usize,
    /// Halvings of the initial step tried when a stencil point is not PSD.
    pub max_shrinks: usize,
}

impl Default for FdOptions {
    fn default() -> Self {
        FdOptions { levels: 4, max_shrinks: 8 }
    }
}

// Centred stencils (offset, weight) with scale 1/h^order.
fn stencil(order: usize) -> &'static [(f64, f64)] {
    match order {
        1 => &[(1.0, 0.5), (-1.0, -0.5)],
        2 => &[(1.0, 1.0), (-1.0, 1.0)],
        3 => &[(2.0, 0.5), (1.0, -1.0), (-1.0, 1.0), (-2.0, -0.5)],
        _ => &[(2.0, 1.0), (1.0, -4.0), (-1.0, -4.0), (-2.0, 1.0)],
    }
}

pub fn fd_derivative(rho0: &DensityMatrix, h: &PerturbationOp, order: usize, eps0: f64) -> Result<DerivativeEstimate> {
    fd_derivative_with(rho0, h, order, eps0, &FdOptions::default())
}

pub fn fd_derivative_with(
    rho0: &DensityMatrix,
    h: &PerturbationOp,
    order: usize,
    eps0: f64,
    opts: &FdOptions,
) -> Result<DerivativeEstimate> {
    if !(1..=4).contains(&order) {
        return Err(Error::InvalidParameter(format!("finite-difference order must be 1..=4, got {order}")));
    }
    if !(eps0 > 0.0 && eps0.is_finite()) || opts.levels == 0 {
        return Err(Error::InvalidParameter("eps0 must be > 0 and levels >= 1".into()));
    }
    let mut eps = eps0;
    let mut last_err = None;
    for _ in 0..=opts.max_shrinks {
        match richardson(rho0, h, order, eps, opts.levels) {
            Ok(est) => return Ok(est),
            Err(e @ Error::StencilLeavesPsdCone { .. }) => {
                last_err = Some(e);
                eps *= 0.5;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

fn richardson(rho0: &DensityMatrix, h: &PerturbationOp, order: usize, eps0: f64, levels: usize) -> Result<DerivativeEstimate> {
    let mut steps = Vec::with_capacity(levels);
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(levels);
    for i in 0..levels {
        let step = eps0 / 2f64.powi(i as i32);
        let mut d = 0.0;
        for &(off, w) in stencil(order) {
            d += w * entropy_shift(rho0, h.matrix(), off * step)?;
        }
        d /= step.powi(order as i32);
        let mut row = vec![d];
        for j in 1..=i {
            let f = 4f64.powi(j as i32);
            let prev: &[f64] = &table[i - 1];
            row.push((f * row[j - 1] - prev[j - 1]) / (f - 1.0));
        }
        steps.push(step);
        table.push(row);
    }
    let last = &table[levels - 1];
    let value = last[levels - 1];
    let error_estimate = if levels > 1 {
        (value - last[levels - 2]).abs().max((value - table[levels - 2][levels - 2]).abs())
    } else {
        value.abs()
    };
    Ok(DerivativeEstimate { order, value, error_estimate, steps_used: steps })
}
