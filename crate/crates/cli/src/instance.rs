use std::fs;
use std::path::Path;

use entropy_perturb::cv::{
    default_dim, displaced_thermal_terms, onemode_perturbation, onemode_state, twomode_state_and_perturbation,
    FockStateSpec,
};
use entropy_perturb::{ComplexMatrix, DensityMatrix, PerturbationOp, PerturbationSeries, SeriesOptions};

use crate::args::{ExampleName, InstanceArgs, Numerics};
use crate::CliError;

pub enum Perturbation {
    Single(PerturbationOp),
    Multi(PerturbationSeries),
}

pub struct Instance {
    pub label: String,
    pub rho0: DensityMatrix,
    pub perturbation: Perturbation,
}

impl Instance {
    pub fn dim(&self) -> usize {
        self.rho0.dim()
    }

    /// ρ₀ + Σ εᵏ H⁽ᵏ⁾ as a density matrix, carrying the traces of both.
    pub fn perturbed(&self, eps: f64) -> entropy_perturb::Result<DensityMatrix> {
        let shift = match &self.perturbation {
            Perturbation::Single(h) => h.matrix().scale(eps),
            Perturbation::Multi(ps) => ps.fold(eps),
        };
        let deficit = self.rho0.trace_deficit() + shift.trace().norm();
        DensityMatrix::new(self.rho0.matrix().add(&shift), deficit)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

fn matrix(path: &Path) -> Result<ComplexMatrix, CliError> {
    ComplexMatrix::from_json(&read(path)?).map_err(|e| CliError::from(e).context(&path.display().to_string()))
}

pub fn load(args: &InstanceArgs) -> Result<Instance, CliError> {
    if let Some(name) = args.name {
        return example(name, args);
    }
    let rho_path = args.rho0.as_deref().ok_or_else(|| CliError::usage("--rho0 FILE or --name EXAMPLE is required"))?;
    let rho0 = DensityMatrix::new(matrix(rho_path)?, args.trace_deficit)?;
    let perturbation = if let Some(p) = &args.terms {
        Perturbation::Multi(PerturbationSeries::from_json(&read(p)?).map_err(|e| CliError::from(e).context(&p.display().to_string()))?)
    } else {
        let h = args.h.as_deref().ok_or_else(|| CliError::usage("--H FILE or --terms FILE is required"))?;
        let extra: Vec<&Path> = [&args.h2, &args.h3, &args.h4].into_iter().flatten().map(|p| p.as_path()).collect();
        let first = PerturbationOp::new(matrix(h)?)?;
        if extra.is_empty() {
            Perturbation::Single(first)
        } else {
            let mut terms = vec![first];
            for p in extra {
                terms.push(PerturbationOp::new(matrix(p)?)?);
            }
            Perturbation::Multi(PerturbationSeries::new(terms)?)
        }
    };
    Ok(Instance { label: rho_path.display().to_string(), rho0, perturbation })
}

fn example(name: ExampleName, args: &InstanceArgs) -> Result<Instance, CliError> {
    let spec = FockStateSpec::new(args.v, args.alpha, args.dim.unwrap_or_else(|| default_dim(args.v)))?.with_tail_tol(args.tail_tol)?;
    let (label, rho0, perturbation) = match name {
        ExampleName::OnemodeThermal => {
            ("onemode-thermal", onemode_state(&spec)?, Perturbation::Single(onemode_perturbation(&spec)?))
        }
        ExampleName::TwomodeThermal => {
            let (rho, h) = twomode_state_and_perturbation(&spec)?;
            ("twomode-thermal", rho, Perturbation::Single(h))
        }
        ExampleName::DisplacedThermal => {
            ("displaced-thermal", onemode_state(&spec)?, Perturbation::Multi(displaced_thermal_terms(&spec)?))
        }
    };
    Ok(Instance { label: label.to_string(), rho0, perturbation })
}

pub fn options(n: &Numerics) -> SeriesOptions {
    let mut opts = SeriesOptions::default();
    if let Some(t) = n.cluster_tol {
        opts.cluster_tol = t;
    }
    if let Some(t) = n.quad_tol {
        opts.quadrature.rel_tol = t;
    }
    opts
}
