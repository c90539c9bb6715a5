//! Check records and their JSON and table renderings.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub kind: String,
    pub tol: f64,
    pub max_residual: f64,
    pub witness: Vec<f64>,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, kind: impl Into<String>, tol: f64, max_residual: f64, witness: Vec<f64>) -> Self {
        Check { name: name.into(), kind: kind.into(), tol, max_residual, witness, pass: max_residual <= tol }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Output {
    pub name: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub model: String,
    pub model_digest: String,
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<Output>,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn output(&mut self, name: impl Into<String>, value: impl Into<String>) {
        self.outputs.push(Output { name: name.into(), value: value.into() });
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_table(&self) -> String {
        let mut lines = vec![format!("command: {}", self.command)];
        if !self.model_digest.is_empty() {
            lines.push(format!("model:   {} ({})", self.model, self.model_digest));
            lines.push(format!("samples: {} (seed {})", self.samples, self.seed));
        }
        if !self.checks.is_empty() {
            let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0).max(5);
            lines.push(format!("{:<width$}  {:<15}  {:>9}  {:>12}  result", "check", "kind", "tol", "residual"));
            for c in &self.checks {
                lines.push(format!(
                    "{:<width$}  {:<15}  {:>9.1e}  {:>12.3e}  {}",
                    c.name,
                    c.kind,
                    c.tol,
                    c.max_residual,
                    if c.pass { "pass" } else { "FAIL" }
                ));
                if !c.pass && !c.witness.is_empty() {
                    lines.push(format!("{:width$}  witness {:?}", "", c.witness));
                }
            }
        }
        for o in &self.outputs {
            lines.push(format!("{} = {}", o.name, o.value));
        }
        lines.push(format!("elapsed: {} ms", self.elapsed_ms));
        lines.join("\n") + "\n"
    }
}
