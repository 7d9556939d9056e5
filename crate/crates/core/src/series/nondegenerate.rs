//! Closed forms for orders 1–4 on a non-degenerate spectrum, and the
//! resolvent-integral route to any order.

use crate::divdiff::{log_dd_double, log_slope, q43_bracket, quartic_double_node_integral};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::quadrature::QuadratureOptions;
use crate::resolvent::ResolventContext;
use crate::series::{degenerate, EntropySeries, Method, SeriesOptions};
use crate::spectral::{decompose, entropy_of_eigenvalues, to_eigenbasis, DensityMatrix, PerturbationOp, SpectralData};

/// Diagonal entries of H in the eigenbasis at or below this count as zero.
pub const DIAGONAL_TOL: f64 = 1e-12;
/// Agreement required between the two second-order forms, relative to the
/// size of their summands.
pub const CROSS_CHECK_TOL: f64 = 1e-10;

/// First and second order shifts of each eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvaluePerturbation {
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

pub fn eigenvalue_perturbation(spec: &SpectralData, hb: &ComplexMatrix) -> Result<EigenvaluePerturbation> {
    check_dim(spec, hb)?;
    spec.require_nondegenerate()?;
    spec.check_null_coupling(hb, false)?;
    let e = spec.eigenvalues();
    let active = spec.active_indices();
    let first = (0..spec.dim()).map(|n| hb.get(n, n).re).collect();
    let mut second = vec![0.0; spec.dim()];
    for &n in &active {
        second[n] = active
            .iter()
            .filter(|&&m| m != n)
            .map(|&m| hb.get(n, m).norm_sqr() / (e[n] - e[m]))
            .sum();
    }
    Ok(EigenvaluePerturbation { first, second })
}

/// dS/dε = −Σₙ Hₙₙ log Eₙ. Valid for any spectrum.
pub fn derivative1(spec: &SpectralData, hb: &ComplexMatrix) -> Result<f64> {
    check_dim(spec, hb)?;
    spec.check_null_coupling(hb, true)?;
    let e = spec.eigenvalues();
    Ok(-spec.active_indices().iter().map(|&n| hb.get(n, n).re * e[n].ln()).sum::<f64>())
}

/// d²S/dε², evaluated pairwise as −Σₙ|Hₙₙ|²/Eₙ − 2Σ_{n<m}|Hₙₘ|²·L(Eₙ, Eₘ)
/// with L the log slope. With `cross_check`, the eigenvalue-shift form
/// −Σ Hₙₙ²/Eₙ − 2Σ Eₙ⁽²⁾ log Eₙ is evaluated too and must agree.
pub fn derivative2(spec: &SpectralData, hb: &ComplexMatrix, cross_check: bool) -> Result<f64> {
    check_dim(spec, hb)?;
    spec.require_nondegenerate()?;
    spec.check_null_coupling(hb, false)?;
    let e = spec.eigenvalues();
    let active = spec.active_indices();
    let mut diag = 0.0;
    let mut pairs = 0.0;
    for (i, &n) in active.iter().enumerate() {
        diag += hb.get(n, n).norm_sqr() / e[n];
        for &m in &active[i + 1..] {
            pairs += hb.get(n, m).norm_sqr() * log_slope(e[n], e[m]);
        }
    }
    let value = -diag - 2.0 * pairs;
    if cross_check {
        let shifts = eigenvalue_perturbation(spec, hb)?;
        let mut alt = 0.0;
        let mut scale = 0.0;
        for &n in &active {
            let h = shifts.first[n];
            alt -= h * h / e[n] + 2.0 * shifts.second[n] * e[n].ln();
            scale += h * h / e[n];
            for &m in active.iter().filter(|&&m| m != n) {
                scale += 2.0 * (hb.get(n, m).norm_sqr() / (e[n] - e[m]) * e[n].ln()).abs();
            }
        }
        if (alt - value).abs() > CROSS_CHECK_TOL * scale.max(1.0) {
            return Err(Error::ConsistencyCheck { check: "second derivative forms", lhs: value, rhs: alt });
        }
    }
    Ok(value)
}

/// Third-order coefficient s₃ for an off-diagonal perturbation:
/// Σ_{n<m<k} 2Re(HₙₘHₘₖHₖₙ)/(Eₘ−Eₖ)·[L(Eₙ,Eₖ) − L(Eₙ,Eₘ)].
pub fn q3(spec: &SpectralData, hb: &ComplexMatrix) -> Result<f64> {
    check_closed_form(spec, hb)?;
    let e = spec.eigenvalues();
    let active = spec.active_indices();
    let mut sum = 0.0;
    for (i, &n) in active.iter().enumerate() {
        for (j, &m) in active.iter().enumerate().skip(i + 1) {
            let hnm = hb.get(n, m);
            if hnm.norm_sqr() == 0.0 {
                continue;
            }
            for &k in &active[j + 1..] {
                let cyc = (hnm * hb.get(m, k) * hb.get(k, n)).re;
                if cyc == 0.0 {
                    continue;
                }
                sum += 2.0 * cyc / (e[m] - e[k]) * (log_slope(e[n], e[k]) - log_slope(e[n], e[m]));
            }
        }
    }
    Ok(sum)
}

/// The three pieces of the fourth-order resolvent integral; s₄ = −(q41 + q42 + q43).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Q4Terms {
    /// All four indices distinct.
    pub q41: f64,
    /// Walks n→m→n→k with m ≠ k.
    pub q42: f64,
    /// Walks n→m→n→m.
    pub q43: f64,
}

impl Q4Terms {
    pub fn coefficient(&self) -> f64 {
        -(self.q41 + self.q42 + self.q43)
    }
}

pub fn q4_terms(spec: &SpectralData, hb: &ComplexMatrix) -> Result<Q4Terms> {
    check_closed_form(spec, hb)?;
    let e = spec.eigenvalues();
    let act = spec.active_indices();
    let w = |a: usize, b: usize| hb.get(a, b).norm_sqr();

    let mut q43 = 0.0;
    for (i, &n) in act.iter().enumerate() {
        for &m in &act[i + 1..] {
            let h = w(n, m);
            if h != 0.0 {
                q43 += h * h * q43_bracket(e[n], e[m]);
            }
        }
    }

    let mut q42 = 0.0;
    for &c in &act {
        let leaves: Vec<usize> = act.iter().copied().filter(|&p| p != c && w(c, p) != 0.0).collect();
        for (i, &p) in leaves.iter().enumerate() {
            for &q in &leaves[i + 1..] {
                q42 += w(c, p) * w(c, q) * log_dd_double(e[c], e[p], e[q]);
            }
        }
    }

    let mut q41 = 0.0;
    for &a in &act {
        for &b in &act {
            let hab = hb.get(a, b);
            if b == a || hab.norm_sqr() == 0.0 {
                continue;
            }
            for &c in &act {
                let hbc = hb.get(b, c);
                if c == a || c == b || hbc.norm_sqr() == 0.0 {
                    continue;
                }
                let habc = hab * hbc;
                for &d in &act {
                    if d == a || d == b || d == c {
                        continue;
                    }
                    let walk = (habc * hb.get(c, d) * hb.get(d, a)).re;
                    if walk != 0.0 {
                        q41 += walk * quartic_double_node_integral(e[a], [e[b], e[c], e[d]]);
                    }
                }
            }
        }
    }
    Ok(Q4Terms { q41, q42, q43 })
}

/// dⁿS/dεⁿ = −(−1)ⁿ n! ∫₀^∞ t·Tr{R(HR)ⁿ} dt, R = (ρ₀ + t)⁻¹.
pub fn derivative_n_quadrature(spec: &SpectralData, hb: &ComplexMatrix, n: usize, opts: &QuadratureOptions) -> Result<f64> {
    let factorial: f64 = (1..=n).map(|i| i as f64).product();
    Ok(factorial * coefficient_quadrature(spec, hb, n, opts)?)
}

/// s_k by quadrature, k ≥ 2.
pub fn coefficient_quadrature(spec: &SpectralData, hb: &ComplexMatrix, k: usize, opts: &QuadratureOptions) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("quadrature order must be >= 2, got {k}")));
    }
    check_dim(spec, hb)?;
    spec.check_null_coupling(hb, false)?;
    let ctx = ResolventContext::new(spec, &[hb]);
    let integral = ctx.integrate(&[(1.0, vec![0; k])], opts)?.value;
    Ok(if k % 2 == 0 { -integral } else { integral })
}

/// True when every active diagonal element of `hb` is zero within tolerance.
pub fn diagonal_vanishes(spec: &SpectralData, hb: &ComplexMatrix) -> bool {
    spec.active_indices().iter().all(|&n| hb.get(n, n).norm() <= DIAGONAL_TOL)
}

/// Coefficients s₀…s_K. Degenerate spectra take the block route at order
/// two; orders three and four use the closed forms only when the spectrum is
/// non-degenerate and H has no diagonal in the eigenbasis.
pub fn entropy_series(rho0: &DensityMatrix, h: &PerturbationOp, order: usize, opts: &SeriesOptions) -> Result<EntropySeries> {
    if order < 1 {
        return Err(Error::InvalidParameter("series order must be >= 1".into()));
    }
    let spec = decompose(rho0, opts.cluster_tol)?;
    let hb = to_eigenbasis(h, &spec)?;
    series_in_eigenbasis(&spec, &hb, order, opts)
}

pub(crate) fn series_in_eigenbasis(spec: &SpectralData, hb: &ComplexMatrix, order: usize, opts: &SeriesOptions) -> Result<EntropySeries> {
    let nondegenerate = spec.is_nondegenerate();
    let closed_high = nondegenerate && diagonal_vanishes(spec, hb);
    let mut coeffs = Vec::with_capacity(order);
    let mut methods = Vec::with_capacity(order);
    coeffs.push(derivative1(spec, hb)?);
    methods.push(Method::ClosedForm);
    let mut q4 = None;
    for k in 2..=order {
        let (value, method) = match k {
            2 if nondegenerate => (derivative2(spec, hb, opts.cross_check)? / 2.0, Method::ClosedForm),
            2 => {
                let bd = degenerate::block_decompose(spec, hb)?;
                (degenerate::derivative2_degenerate(&bd)? / 2.0, Method::ClosedForm)
            }
            3 if closed_high => (q3(spec, hb)?, Method::ClosedForm),
            4 if closed_high => {
                let terms = *q4.get_or_insert(q4_terms(spec, hb)?);
                (terms.coefficient(), Method::ClosedForm)
            }
            _ => (coefficient_quadrature(spec, hb, k, &opts.quadrature)?, Method::Quadrature),
        };
        coeffs.push(value);
        methods.push(method);
    }
    Ok(EntropySeries { base_entropy: entropy_of_eigenvalues(spec.eigenvalues()), coeffs, methods })
}

fn check_dim(spec: &SpectralData, hb: &ComplexMatrix) -> Result<()> {
    if hb.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), found: hb.dim() });
    }
    Ok(())
}

fn check_closed_form(spec: &SpectralData, hb: &ComplexMatrix) -> Result<()> {
    check_dim(spec, hb)?;
    spec.require_nondegenerate()?;
    spec.check_null_coupling(hb, false)?;
    for n in spec.active_indices() {
        let value = hb.get(n, n).norm();
        if value > DIAGONAL_TOL {
            return Err(Error::DiagonalNotZero { index: n, value });
        }
    }
    Ok(())
}
