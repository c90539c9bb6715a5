//! Model files: line-oriented `key = value` sections.
//!
//! ```text
//! [model]
//! name = free_particle
//! kind = lagrangian        # lagrangian | hamiltonian | ode
//! n = 1
//! k = 2
//! function = 0.5*(v_1_1^2 + v_2_1^2)
//! evolution = gamma1, gamma2
//!
//! [params]
//! m = 1
//!
//! [field ddx]
//! c_x_1 = 1
//!
//! [law momentum]
//! Phi_1 = v_1_1
//! Phi_2 = v_2_1
//! ```

use std::collections::BTreeMap;

use ksym_core::chart::ChartSpace;
use ksym_core::conservation::ConservationLaw;
use ksym_core::dynamics::{build_system, FieldSystem, KVectorField, SystemKind};
use ksym_core::expr::parse_with_params;
use ksym_core::{Chart, Expr, VectorField};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Expression { line: usize, source: ksym_core::expr::ParseError },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Dynamics(#[from] ksym_core::dynamics::DynamicsError),
    #[error(transparent)]
    Chart(#[from] ksym_core::chart::ChartError),
    #[error(transparent)]
    Calculus(#[from] ksym_core::calculus::CalculusError),
    #[error(transparent)]
    Conservation(#[from] ksym_core::conservation::ConservationError),
}

fn syntax(line: usize, message: impl Into<String>) -> ModelError {
    ModelError::Syntax { line, message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Lagrangian,
    Hamiltonian,
    /// A plain dynamical system on `R^n` given by its fields.
    Ode,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Lagrangian => "lagrangian",
            ModelKind::Hamiltonian => "hamiltonian",
            ModelKind::Ode => "ode",
        }
    }
}

/// An entry together with the line it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Located<T> {
    pub line: usize,
    pub value: T,
}

/// A named `[field]` or `[law]` section: its `key = expression` lines.
pub type Block = (String, Vec<(String, Located<String>)>);

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub name: String,
    pub kind: ModelKind,
    pub n: usize,
    pub k: usize,
    pub function: Option<Located<String>>,
    pub evolution: Option<Located<Vec<String>>>,
    pub params: BTreeMap<String, f64>,
    pub fields: Vec<Block>,
    pub laws: Vec<Block>,
}

enum Section {
    None,
    Model,
    Params,
    Field(usize),
    Law(usize),
}

fn parse_count(value: &str, line: usize, key: &str) -> Result<usize, ModelError> {
    value.parse().map_err(|_| syntax(line, format!("`{key}` must be a positive integer, got `{value}`")))
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let mut section = Section::None;
        let mut seen_model = false;
        let mut model: BTreeMap<&str, Located<String>> = BTreeMap::new();
        let mut params = BTreeMap::new();
        let mut fields: Vec<Block> = Vec::new();
        let mut laws: Vec<Block> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(header) = content.strip_prefix('[') {
                let header = header
                    .strip_suffix(']')
                    .ok_or_else(|| syntax(line, "section header is missing `]`"))?
                    .trim();
                let mut parts = header.split_whitespace();
                let head = parts.next().unwrap_or("");
                let name = parts.next();
                if parts.next().is_some() {
                    return Err(syntax(line, "section header has too many words"));
                }
                section = match (head, name) {
                    ("model", None) => {
                        if seen_model {
                            return Err(syntax(line, "duplicate [model] section"));
                        }
                        seen_model = true;
                        Section::Model
                    }
                    ("params", None) => Section::Params,
                    ("field", Some(n)) | ("law", Some(n)) => {
                        let list = if head == "field" { &mut fields } else { &mut laws };
                        if list.iter().any(|(m, _)| m == n) {
                            return Err(syntax(line, format!("duplicate {head} `{n}`")));
                        }
                        list.push((n.to_string(), Vec::new()));
                        if head == "field" {
                            Section::Field(list.len() - 1)
                        } else {
                            Section::Law(list.len() - 1)
                        }
                    }
                    _ => return Err(syntax(line, format!("unknown section `[{header}]`"))),
                };
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| syntax(line, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            if value.is_empty() {
                return Err(syntax(line, format!("`{key}` has no value")));
            }
            let located = Located { line, value: value.to_string() };
            match section {
                Section::None => return Err(syntax(line, "entry outside any section")),
                Section::Model => {
                    const KEYS: [&str; 6] = ["name", "kind", "n", "k", "function", "evolution"];
                    let Some(&known) = KEYS.iter().find(|&&k| k == key) else {
                        return Err(syntax(line, format!("unknown key `{key}` in [model]")));
                    };
                    if model.insert(known, located).is_some() {
                        return Err(syntax(line, format!("duplicate key `{key}`")));
                    }
                }
                Section::Params => {
                    let v: f64 = value.parse().map_err(|_| syntax(line, format!("parameter `{key}` is not a number")))?;
                    if params.insert(key.to_string(), v).is_some() {
                        return Err(syntax(line, format!("duplicate parameter `{key}`")));
                    }
                }
                Section::Field(i) => {
                    let coord = key
                        .strip_prefix("c_")
                        .ok_or_else(|| syntax(line, format!("unknown key `{key}`; field entries are `c_<coordinate>`")))?;
                    let entries = &mut fields[i].1;
                    if entries.iter().any(|(c, _)| c == coord) {
                        return Err(syntax(line, format!("duplicate component `{key}`")));
                    }
                    entries.push((coord.to_string(), located));
                }
                Section::Law(i) => {
                    if !key.strip_prefix("Phi_").is_some_and(|a| a.parse::<usize>().is_ok()) {
                        return Err(syntax(line, format!("unknown key `{key}`; law entries are `Phi_<A>`")));
                    }
                    let entries = &mut laws[i].1;
                    if entries.iter().any(|(c, _)| c == key) {
                        return Err(syntax(line, format!("duplicate component `{key}`")));
                    }
                    entries.push((key.to_string(), located));
                }
            }
        }
        if !seen_model {
            return Err(ModelError::Invalid("missing [model] section".into()));
        }
        let take = |key: &str| -> Result<&Located<String>, ModelError> {
            model.get(key).ok_or_else(|| ModelError::Invalid(format!("[model] is missing `{key}`")))
        };
        let name = take("name")?.value.clone();
        let kind_entry = take("kind")?;
        let kind = match kind_entry.value.as_str() {
            "lagrangian" => ModelKind::Lagrangian,
            "hamiltonian" => ModelKind::Hamiltonian,
            "ode" => ModelKind::Ode,
            other => return Err(syntax(kind_entry.line, format!("unknown kind `{other}`"))),
        };
        let n_entry = take("n")?;
        let n = parse_count(&n_entry.value, n_entry.line, "n")?;
        let k = match model.get("k") {
            Some(e) => parse_count(&e.value, e.line, "k")?,
            None if kind == ModelKind::Ode => 1,
            None => return Err(ModelError::Invalid("[model] is missing `k`".into())),
        };
        if kind == ModelKind::Ode && k != 1 {
            return Err(syntax(model["k"].line, "ode models have k = 1"));
        }
        let function = model.get("function").cloned();
        match (kind, &function) {
            (ModelKind::Ode, Some(f)) => return Err(syntax(f.line, "ode models take no `function`")),
            (ModelKind::Lagrangian | ModelKind::Hamiltonian, None) => {
                return Err(ModelError::Invalid("[model] is missing `function`".into()))
            }
            _ => {}
        }
        let evolution = model.get("evolution").map(|e| Located {
            line: e.line,
            value: e.value.split(',').map(|s| s.trim().to_string()).collect(),
        });
        Ok(ModelFile { name, kind, n, k, function, evolution, params, fields, laws })
    }
}

/// A model with every expression parsed on its chart.
#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub file: ModelFile,
    pub chart: Chart,
    pub system: Option<FieldSystem>,
    pub fields: BTreeMap<String, VectorField>,
    pub laws: BTreeMap<String, ConservationLaw>,
    pub digest: String,
}

fn parse_at(src: &Located<String>, chart: &Chart, params: &BTreeMap<String, f64>) -> Result<Expr, ModelError> {
    parse_with_params(&src.value, chart, params)
        .map(|e| e.simplify())
        .map_err(|source| ModelError::Expression { line: src.line, source })
}

/// First 16 hex digits of the SHA-256 of the model source.
pub fn digest(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().take(8).map(|b| format!("{b:02x}")).collect()
}

impl LoadedModel {
    pub fn load(text: &str, overrides: &BTreeMap<String, f64>) -> Result<Self, ModelError> {
        let mut file = ModelFile::parse(text)?;
        for (k, v) in overrides {
            file.params.insert(k.clone(), *v);
        }
        let params = &file.params;
        let chart = match file.kind {
            ModelKind::Lagrangian => ChartSpace::k_tangent(file.n, file.k)?,
            ModelKind::Hamiltonian => ChartSpace::k_cotangent(file.n, file.k)?,
            ModelKind::Ode => ChartSpace::base(file.n)?,
        };
        let system = match (&file.function, file.kind) {
            (Some(src), ModelKind::Lagrangian | ModelKind::Hamiltonian) => {
                let kind = if file.kind == ModelKind::Lagrangian { SystemKind::Lagrangian } else { SystemKind::Hamiltonian };
                // parse first for a located error message
                parse_at(src, &chart, params)?;
                Some(build_system(kind, file.n, file.k, &src.value, params)?)
            }
            _ => None,
        };
        let mut fields = BTreeMap::new();
        for (name, entries) in &file.fields {
            let mut comps = vec![Expr::ZERO; chart.dim()];
            for (coord, src) in entries {
                let index = chart
                    .index_of(coord)
                    .ok_or_else(|| syntax(src.line, format!("`{coord}` is not a coordinate of {}", chart.describe())))?;
                comps[index] = parse_at(src, &chart, params)?;
            }
            fields.insert(name.clone(), VectorField::new(chart.clone(), comps)?);
        }
        let mut laws = BTreeMap::new();
        for (name, entries) in &file.laws {
            let mut comps = vec![None; file.k];
            for (key, src) in entries {
                let a: usize = key["Phi_".len()..].parse().expect("validated");
                if a == 0 || a > file.k {
                    return Err(syntax(src.line, format!("`{key}` is outside 1..={}", file.k)));
                }
                comps[a - 1] = Some(parse_at(src, &chart, params)?);
            }
            if let Some(missing) = comps.iter().position(Option::is_none) {
                return Err(ModelError::Invalid(format!("law `{name}` is missing Phi_{}", missing + 1)));
            }
            let law = ConservationLaw::user(chart.clone(), comps.into_iter().map(Option::unwrap).collect())?;
            laws.insert(name.clone(), law);
        }
        if let Some(evo) = &file.evolution {
            if evo.value.len() != file.k {
                return Err(syntax(evo.line, format!("`evolution` needs {} fields", file.k)));
            }
            if let Some(bad) = evo.value.iter().find(|f| !fields.contains_key(*f)) {
                return Err(syntax(evo.line, format!("unknown field `{bad}`")));
            }
        }
        Ok(LoadedModel { file, chart, system, fields, laws, digest: digest(text) })
    }

    pub fn field(&self, name: &str) -> Result<&VectorField, ModelError> {
        self.fields.get(name).ok_or_else(|| {
            let known: Vec<&str> = self.fields.keys().map(String::as_str).collect();
            ModelError::Invalid(format!("no field `{name}` (known: {})", known.join(", ")))
        })
    }

    pub fn law(&self, name: &str) -> Result<&ConservationLaw, ModelError> {
        self.laws.get(name).ok_or_else(|| {
            let known: Vec<&str> = self.laws.keys().map(String::as_str).collect();
            ModelError::Invalid(format!("no law `{name}` (known: {})", known.join(", ")))
        })
    }

    /// The named fields as a tuple, or the model's `evolution` entry.
    pub fn tuple(&self, names: Option<&[String]>) -> Result<KVectorField, ModelError> {
        let names: Vec<String> = match (names, &self.file.evolution) {
            (Some(n), _) => n.to_vec(),
            (None, Some(e)) => e.value.clone(),
            (None, None) => {
                return Err(ModelError::Invalid("model has no `evolution` entry; pass --against".into()))
            }
        };
        let fs = names.iter().map(|n| self.field(n).cloned()).collect::<Result<Vec<_>, _>>()?;
        Ok(KVectorField::new(fs)?)
    }

    pub fn system(&self) -> Result<&FieldSystem, ModelError> {
        self.system
            .as_ref()
            .ok_or_else(|| ModelError::Invalid(format!("`{}` is an ode model without a field system", self.file.name)))
    }
}
