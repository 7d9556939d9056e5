use entropy_perturb::oracle::{entropy_shift, fd_derivative};
use entropy_perturb::series::nondegenerate::coefficient_quadrature;
use entropy_perturb::spectral::eigenvalues;
use entropy_perturb::{
    decompose, entropy_exact, entropy_series, entropy_series_multi, to_eigenbasis, EntropySeries, Method,
    SeriesOptions,
};

use crate::args::{Base, ConvergenceArgs, Format, Numerics, SeriesArgs, ValidateArgs};
use crate::instance::{load, options, Instance, Perturbation};
use crate::report::{Check, ConvergenceReport, ExactReport, SeriesReport, SweepRow, ValidateReport};
use crate::CliError;

/// Above this dimension exact entropies come from the f64 eigensolver
/// instead of the double-double one.
const EXTENDED_MAX_DIM: usize = 128;

const QUADRATURE_TOL: f64 = 1e-8;

fn unit(base: Base) -> (f64, &'static str) {
    match base {
        Base::Nats => (1.0, "nats"),
        Base::Bits => (std::f64::consts::LN_2, "bits"),
    }
}

fn series_for(inst: &Instance, order: usize, opts: &SeriesOptions) -> entropy_perturb::Result<EntropySeries> {
    match &inst.perturbation {
        Perturbation::Single(h) => entropy_series(&inst.rho0, h, order, opts),
        Perturbation::Multi(ps) => entropy_series_multi(&inst.rho0, ps, order, opts),
    }
}

/// S(ε) − S(0), in double-double when the instance is small and linear in ε.
fn entropy_change(inst: &Instance, s0: f64, eps: f64) -> entropy_perturb::Result<f64> {
    match &inst.perturbation {
        Perturbation::Single(h) if inst.dim() <= EXTENDED_MAX_DIM => entropy_shift(&inst.rho0, h.matrix(), eps),
        _ => Ok(entropy_exact(&inst.perturbed(eps)?)? - s0),
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::ClosedForm => "closed_form",
        Method::Quadrature => "quadrature",
    }
}

fn format_or(n: &Numerics, default: Format) -> Format {
    n.format.unwrap_or(default)
}

pub fn series(args: &SeriesArgs, require_name: bool) -> Result<String, CliError> {
    if require_name && args.instance.name.is_none() {
        return Err(CliError::usage("--name is required (onemode-thermal, twomode-thermal, displaced-thermal)"));
    }
    let inst = load(&args.instance)?;
    let order = args.numerics.order as usize;
    let s = series_for(&inst, order, &options(&args.numerics))?;
    let (scale, base) = unit(args.numerics.base);
    let exact = match args.exact_at {
        Some(eps) => {
            let change = entropy_change(&inst, s.base_entropy, eps)?;
            let poly: f64 = s.coeffs.iter().rev().fold(0.0, |acc, c| (acc + c) * eps);
            Some(ExactReport {
                eps,
                entropy: (s.base_entropy + change) / scale,
                series: s.evaluate(eps) / scale,
                residual: (change - poly).abs() / scale,
            })
        }
        None => None,
    };
    let mut methods = vec!["exact"];
    methods.extend(s.methods.iter().map(|m| method_name(*m)));
    let report = SeriesReport {
        instance: inst.label.clone(),
        dim: inst.dim(),
        base,
        order,
        coefficients: (0..=order).map(|k| s.coeff(k) / scale).collect(),
        methods,
        exact,
    };
    Ok(report.render(format_or(&args.numerics, Format::Json)))
}

/// Report plus whether every check passed.
pub fn validate(args: &ValidateArgs) -> Result<(String, bool), CliError> {
    let inst = load(&args.instance)?;
    let Perturbation::Single(h) = &inst.perturbation else {
        return Err(CliError::usage("validate takes a single first-order perturbation"));
    };
    let opts = options(&args.numerics);
    let order = args.numerics.order as usize;
    let spec = decompose(&inst.rho0, opts.cluster_tol)?;
    let hb = to_eigenbasis(h, &spec)?;
    let s = entropy_series(&inst.rho0, h, order, &opts)?;
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    for k in 2..=order {
        if s.methods[k - 1] != Method::ClosedForm {
            continue;
        }
        let q = coefficient_quadrature(&spec, &hb, k, &opts.quadrature)?;
        checks.push(check("quadrature", k, s.coeff(k), q, QUADRATURE_TOL));
    }
    if inst.dim() <= EXTENDED_MAX_DIM {
        let mut factorial = 1.0;
        for k in 1..=order.min(4) {
            factorial *= k as f64;
            let fd = fd_derivative(&inst.rho0, h, k, args.eps)?;
            let tol = if k == 4 { 1e-4 } else { 1e-6 };
            checks.push(check("finite_difference", k, fd.value, factorial * s.coeff(k), tol));
        }
    } else {
        notes.push(format!("finite differences skipped above dimension {EXTENDED_MAX_DIM}"));
    }
    if order > 4 {
        notes.push("finite differences cover orders 1 to 4".into());
    }
    let values = eigenvalues(inst.rho0.matrix())?;
    let pass = checks.iter().all(|c| c.pass);
    let report = ValidateReport {
        instance: inst.label.clone(),
        dim: inst.dim(),
        trace: inst.rho0.matrix().trace().re,
        trace_deficit: inst.rho0.trace_deficit(),
        min_eigenvalue: values.last().copied().unwrap_or(0.0),
        clusters: spec.clusters().len(),
        largest_cluster: spec.clusters().iter().map(|c| c.len()).max().unwrap_or(0),
        nondegenerate: spec.is_nondegenerate(),
        entropy: s.base_entropy,
        checks,
        notes,
        pass,
    };
    Ok((report.render(format_or(&args.numerics, Format::Json)), pass))
}

fn check(name: &'static str, order: usize, value: f64, reference: f64, tolerance: f64) -> Check {
    let difference = (value - reference).abs();
    Check { check: name, order, value, reference, difference, tolerance, pass: difference <= tolerance }
}

pub fn convergence(args: &ConvergenceArgs) -> Result<String, CliError> {
    let inst = load(&args.instance)?;
    let order = args.numerics.order as usize;
    let s = series_for(&inst, order, &options(&args.numerics))?;
    let (scale, base) = unit(args.numerics.base);
    let mut rows: Vec<SweepRow> = Vec::with_capacity(args.steps as usize + 1);
    let mut eps = args.eps;
    for _ in 0..=args.steps {
        let change = entropy_change(&inst, s.base_entropy, eps)?;
        let poly: f64 = s.coeffs.iter().rev().fold(0.0, |acc, c| (acc + c) * eps);
        let residual = (change - poly).abs() / scale;
        let ratio = rows.last().and_then(|r| (residual > 0.0).then(|| r.residual / residual));
        rows.push(SweepRow {
            eps,
            exact: (s.base_entropy + change) / scale,
            series: s.evaluate(eps) / scale,
            residual,
            ratio,
        });
        eps *= 0.5;
    }
    let report = ConvergenceReport { instance: inst.label.clone(), dim: inst.dim(), base, order, rows };
    Ok(report.render(format_or(&args.numerics, Format::Csv)))
}
