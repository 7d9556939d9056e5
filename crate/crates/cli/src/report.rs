use std::fmt::Write as _;

use serde::Serialize;

use crate::args::Format;

#[derive(Debug, Serialize)]
pub struct ExactReport {
    pub eps: f64,
    pub entropy: f64,
    pub series: f64,
    pub residual: f64,
}

#[derive(Debug, Serialize)]
pub struct SeriesReport {
    pub instance: String,
    pub dim: usize,
    pub base: &'static str,
    pub order: usize,
    /// s₀ … s_K
    pub coefficients: Vec<f64>,
    pub methods: Vec<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactReport>,
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub check: &'static str,
    pub order: usize,
    pub value: f64,
    pub reference: f64,
    pub difference: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct ValidateReport {
    pub instance: String,
    pub dim: usize,
    pub trace: f64,
    pub trace_deficit: f64,
    pub min_eigenvalue: f64,
    pub clusters: usize,
    pub largest_cluster: usize,
    pub nondegenerate: bool,
    pub entropy: f64,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    pub exact: f64,
    pub series: f64,
    pub residual: f64,
    /// residual at the previous (twice larger) ε over this one
    pub ratio: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct ConvergenceReport {
    pub instance: String,
    pub dim: usize,
    pub base: &'static str,
    pub order: usize,
    pub rows: Vec<SweepRow>,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("reports serialize");
    s.push('\n');
    s
}

impl SeriesReport {
    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Json => return json(self),
            Format::Csv => {
                out.push_str("k,value,method\n");
                for (k, (c, m)) in self.coefficients.iter().zip(&self.methods).enumerate() {
                    let _ = writeln!(out, "{k},{},{m}", num(*c));
                }
                if let Some(e) = &self.exact {
                    let tag = format!("eps={}", num(e.eps));
                    let _ = writeln!(out, "exact,{},{tag}", num(e.entropy));
                    let _ = writeln!(out, "series,{},{tag}", num(e.series));
                    let _ = writeln!(out, "residual,{},{tag}", num(e.residual));
                }
            }
            Format::Table => {
                let _ = writeln!(out, "instance  {} (dim {})", self.instance, self.dim);
                let _ = writeln!(out, "base      {}", self.base);
                let _ = writeln!(out, "{:>3}  {:>24}  method", "k", "s_k");
                for (k, (c, m)) in self.coefficients.iter().zip(&self.methods).enumerate() {
                    let _ = writeln!(out, "{k:>3}  {:>24}  {m}", num(*c));
                }
                if let Some(e) = &self.exact {
                    let _ = writeln!(out, "at eps = {}", num(e.eps));
                    let _ = writeln!(out, "  exact     {}", num(e.entropy));
                    let _ = writeln!(out, "  series    {}", num(e.series));
                    let _ = writeln!(out, "  residual  {}", num(e.residual));
                }
            }
        }
        out
    }
}

impl ValidateReport {
    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Json => return json(self),
            Format::Csv => {
                out.push_str("check,order,value,reference,difference,tolerance,pass\n");
                for c in &self.checks {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{}",
                        c.check,
                        c.order,
                        num(c.value),
                        num(c.reference),
                        num(c.difference),
                        num(c.tolerance),
                        c.pass
                    );
                }
            }
            Format::Table => {
                let _ = writeln!(out, "instance        {} (dim {})", self.instance, self.dim);
                let _ = writeln!(out, "trace           {} (deficit {})", num(self.trace), num(self.trace_deficit));
                let _ = writeln!(out, "min eigenvalue  {}", num(self.min_eigenvalue));
                let _ = writeln!(out, "clusters        {} (largest {})", self.clusters, self.largest_cluster);
                let _ = writeln!(out, "entropy         {}", num(self.entropy));
                let _ = writeln!(
                    out,
                    "{:<18} {:>5}  {:>24}  {:>24}  {:>10}  {:>8}  ok",
                    "check", "order", "value", "reference", "diff", "tol"
                );
                for c in &self.checks {
                    let _ = writeln!(
                        out,
                        "{:<18} {:>5}  {:>24}  {:>24}  {:>10.3e}  {:>8.0e}  {}",
                        c.check,
                        c.order,
                        num(c.value),
                        num(c.reference),
                        c.difference,
                        c.tolerance,
                        if c.pass { "yes" } else { "NO" }
                    );
                }
                for n in &self.notes {
                    let _ = writeln!(out, "note: {n}");
                }
            }
        }
        out
    }
}

impl ConvergenceReport {
    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        let ratio = |r: Option<f64>| r.map(num).unwrap_or_default();
        match format {
            Format::Json => return json(self),
            Format::Csv => {
                out.push_str("eps,exact,series,residual,ratio\n");
                for r in &self.rows {
                    let _ = writeln!(out, "{},{},{},{},{}", num(r.eps), num(r.exact), num(r.series), num(r.residual), ratio(r.ratio));
                }
            }
            Format::Table => {
                let _ = writeln!(out, "instance  {} (dim {}), order {}, base {}", self.instance, self.dim, self.order, self.base);
                let _ = writeln!(out, "{:>10}  {:>24}  {:>24}  {:>10}  {:>8}", "eps", "exact", "series", "residual", "ratio");
                for r in &self.rows {
                    let rr = r.ratio.map(|x| format!("{x:.2}")).unwrap_or_default();
                    let _ = writeln!(out, "{:>10.3e}  {:>24}  {:>24}  {:>10.3e}  {:>8}", r.eps, num(r.exact), num(r.series), r.residual, rr);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SeriesReport {
        SeriesReport {
            instance: "t".into(),
            dim: 2,
            base: "nats",
            order: 1,
            coefficients: vec![0.5, -0.25],
            methods: vec!["exact", "closed_form"],
            exact: None,
        }
    }

    #[test]
    fn series_json_field_order() {
        assert_eq!(
            sample().render(Format::Json),
            "{\"instance\":\"t\",\"dim\":2,\"base\":\"nats\",\"order\":1,\"coefficients\":[0.5,-0.25],\"methods\":[\"exact\",\"closed_form\"]}\n"
        );
    }

    #[test]
    fn csv_round_trips_doubles() {
        let mut r = sample();
        r.coefficients[1] = 0.1 + 0.2;
        let csv = r.render(Format::Csv);
        let v: f64 = csv.lines().nth(2).unwrap().split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(v, 0.1 + 0.2);
    }
}
