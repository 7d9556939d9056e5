//! Expansion for ρ = ρ₀ + Σₙ εⁿH⁽ⁿ⁾ and the diagonal rebase ρ₀′ = ρ₀ + εH₀.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::resolvent::ResolventContext;
use crate::series::{EntropySeries, Method, SeriesOptions};
use crate::spectral::{
    decompose, entropy_of_eigenvalues, from_eigenbasis, matrix_to_eigenbasis, validate_density, DensityMatrix,
    PerturbationOp, SpectralData, NEGATIVE_TOL,
};

/// H⁽¹⁾, H⁽²⁾, …; missing higher orders are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSeries {
    terms: Vec<PerturbationOp>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesRepr {
    terms: Vec<ComplexMatrix>,
}

impl PerturbationSeries {
    pub fn new(terms: Vec<PerturbationOp>) -> Result<Self> {
        let Some(first) = terms.first() else {
            return Err(Error::InvalidParameter("perturbation series needs at least one term".into()));
        };
        let dim = first.dim();
        if let Some(t) = terms.iter().find(|t| t.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: t.dim() });
        }
        Ok(PerturbationSeries { terms })
    }

    pub fn terms(&self) -> &[PerturbationOp] {
        &self.terms
    }

    pub fn max_order(&self) -> usize {
        self.terms.len()
    }

    pub fn dim(&self) -> usize {
        self.terms[0].dim()
    }

    /// Σₙ εⁿH⁽ⁿ⁾.
    pub fn fold(&self, eps: f64) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim());
        let mut p = 1.0;
        for t in &self.terms {
            p *= eps;
            out = out.add_scaled(t.matrix(), p);
        }
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: SeriesRepr = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(repr.terms.into_iter().map(PerturbationOp::new).collect::<Result<_>>()?)
    }

    pub fn to_json(&self) -> String {
        let repr = SeriesRepr { terms: self.terms.iter().map(|t| t.matrix().clone()).collect() };
        serde_json::to_string(&repr).expect("series serializes")
    }
}

/// Ordered compositions of `k` into at least `min_parts` positive parts.
pub fn compositions(k: usize, min_parts: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in 1..=left {
            prefix.push(part);
            rec(left - part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        rec(k, &mut Vec::new(), &mut out);
    }
    out.retain(|c| c.len() >= min_parts);
    out
}

/// The two contributions to one coefficient: s_k = log_term + resolvent_term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderBreakdown {
    pub order: usize,
    /// −Tr[H⁽ᵏ⁾ log ρ₀]
    pub log_term: f64,
    /// −Σ_{j≥2} (−1)ʲ Σ_{i₁+…+iⱼ=k} ∫₀^∞ t·Tr{R H⁽ⁱ¹⁾ R ⋯ H⁽ⁱʲ⁾ R} dt
    pub resolvent_term: f64,
}

impl OrderBreakdown {
    pub fn total(&self) -> f64 {
        self.log_term + self.resolvent_term
    }
}

pub fn order_breakdown(
    rho0: &DensityMatrix,
    ps: &PerturbationSeries,
    order: usize,
    opts: &SeriesOptions,
) -> Result<(SpectralData, Vec<OrderBreakdown>)> {
    if order < 1 {
        return Err(Error::InvalidParameter("series order must be >= 1".into()));
    }
    let spec = decompose(rho0, opts.cluster_tol)?;
    let used = ps.max_order().min(order);
    let hbs: Vec<ComplexMatrix> =
        ps.terms[..used].iter().map(|t| matrix_to_eigenbasis(t.matrix(), &spec)).collect::<Result<_>>()?;
    for (n, hb) in hbs.iter().enumerate() {
        // the first order never enters a resolvent alone, higher ones only from order n+2 on
        let in_resolvent = order >= n + 2;
        spec.check_null_coupling(hb, !in_resolvent)?;
    }
    let e = spec.eigenvalues();
    let active = spec.active_indices();
    let log_term = |k: usize| -> f64 {
        hbs.get(k - 1).map_or(0.0, |hb| -active.iter().map(|&n| hb.get(n, n).re * e[n].ln()).sum::<f64>())
    };
    let refs: Vec<&ComplexMatrix> = hbs.iter().collect();
    let ctx = ResolventContext::new(&spec, &refs);
    let rows = (1..=order)
        .into_par_iter()
        .map(|k| {
            let chains: Vec<(f64, Vec<usize>)> = compositions(k, 2)
                .into_iter()
                .filter(|c| c.iter().all(|&i| i <= used))
                .map(|c| {
                    let w = if c.len() % 2 == 0 { -1.0 } else { 1.0 };
                    (w, c.into_iter().map(|i| i - 1).collect())
                })
                .collect();
            let resolvent_term = ctx.integrate(&chains, &opts.quadrature)?.value;
            Ok(OrderBreakdown { order: k, log_term: log_term(k), resolvent_term })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((spec, rows))
}

pub fn entropy_series_multi(
    rho0: &DensityMatrix,
    ps: &PerturbationSeries,
    order: usize,
    opts: &SeriesOptions,
) -> Result<EntropySeries> {
    let (spec, rows) = order_breakdown(rho0, ps, order, opts)?;
    Ok(EntropySeries {
        base_entropy: entropy_of_eigenvalues(spec.eigenvalues()),
        coeffs: rows.iter().map(OrderBreakdown::total).collect(),
        methods: rows.iter().map(|r| if r.order == 1 { Method::ClosedForm } else { Method::Quadrature }).collect(),
    })
}

/// Moves the eigenbasis diagonal of H into the base state:
/// ρ₀′ = ρ₀ + εH₀ and H′ = H − H₀, so that ρ₀′ + εH′ = ρ₀ + εH.
pub fn rebase_diagonal(rho0: &DensityMatrix, h: &PerturbationOp, eps: f64) -> Result<(DensityMatrix, PerturbationOp)> {
    if !eps.is_finite() {
        return Err(Error::InvalidParameter(format!("eps must be finite, got {eps}")));
    }
    let spec = decompose(rho0, crate::spectral::DEFAULT_CLUSTER_TOL)?;
    let hb = matrix_to_eigenbasis(h.matrix(), &spec)?;
    let n = spec.dim();
    let diag: Vec<f64> = (0..n).map(|i| hb.get(i, i).re).collect();
    if let Some(min) = (0..n).map(|i| spec.eigenvalues()[i] + eps * diag[i]).reduce(f64::min) {
        if min < -NEGATIVE_TOL {
            return Err(Error::RebaseNotPositive { observed: min });
        }
    }
    let h0 = from_eigenbasis(&ComplexMatrix::from_real_diagonal(&diag), &spec);
    let rho0p = validate_density(&rho0.matrix().add_scaled(&h0, eps), rho0.trace_deficit())?;
    let hp = PerturbationOp::new(h.matrix().sub(&h0))?;
    Ok((rho0p, hp))
}
