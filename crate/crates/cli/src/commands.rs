//! Argument parsing and command dispatch.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ksym_core::conservation::{self, ConservationError, ConservationLaw, LawComponent};
use ksym_core::dynamics::{self, DynamicsError, KVectorField, SystemKind};
use ksym_core::sampling::SampleSpec;
use ksym_core::sections::{self, SectionError, SectionGrid};
use ksym_core::symmetry::{self, SymmetryError, SymmetryVerdict};
use ksym_core::{Expr, Residual, VectorField};
use thiserror::Error;

use crate::model::{LoadedModel, ModelError};
use crate::registry;
use crate::report::{Check, Report};

/// Pointwise tolerance for `verify evolution` and `verify law`.
pub const VERIFY_TOL: f64 = 1e-9;
/// Pointwise tolerance for laws whose potential comes from quadrature.
pub const QUADRATURE_TOL: f64 = 1e-6;
/// Regularity records `1 / min|det|` against this bound.
pub const REGULARITY_BOUND: f64 = 1.0 / dynamics::REGULARITY_TOL;
/// Absolute floor of the divergence tolerance.
pub const DIVERGENCE_FLOOR: f64 = 1e-8;
/// Required shrink of the divergence residual per halving of the step.
pub const DIVERGENCE_SHRINK: f64 = 3.5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    Conservation(#[from] ConservationError),
    #[error(transparent)]
    Section(#[from] SectionError),
}

#[derive(Debug, Parser)]
#[command(name = "ksym", about = "Symmetries and conservation laws of first-order field theories", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the bundled models.
    ListModels {
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    #[command(subcommand)]
    Check(CheckCommand),
    #[command(subcommand)]
    Solve(SolveCommand),
    #[command(subcommand)]
    Verify(VerifyCommand),
    #[command(subcommand)]
    Build(BuildCommand),
    #[command(subcommand)]
    Integrate(IntegrateCommand),
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    /// Hessian regularity of the model function.
    Regularity(Common),
    /// `[X_A, Y] = 0`.
    Symmetry(FieldAgainst),
    /// `[X_A, Y] = λ_A^B Z_B` with a fitted `λ`.
    Pseudosymmetry {
        #[command(flatten)]
        args: FieldAgainst,
        /// Fields of the divisor tuple `Z`.
        #[arg(long, value_delimiter = ',', conflicts_with = "y_tuple")]
        z: Option<Vec<String>>,
        /// Use `(F, ..., F)` as the divisor tuple.
        #[arg(long)]
        y_tuple: Option<String>,
    },
    /// `L_Y ω_A = 0` and `Y(E) = 0`.
    Cartan(FieldOnly),
    /// `[X_A, X_B] = 0` for the tuple.
    Integrability(Against),
    /// Exactness and conservation of a law relative to a field.
    Converse {
        #[command(flatten)]
        args: FieldAgainst,
        #[arg(long)]
        law: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum SolveCommand {
    /// Solve the field equations for an evolution tuple.
    Evolution {
        #[command(flatten)]
        common: Common,
        /// Solve at this point only and print the components.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Option<Vec<f64>>,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Residual of the field equations for a tuple.
    Evolution(Against),
    /// `Σ_A X_A(Φ_A) = 0` at the samples.
    Law {
        #[command(flatten)]
        args: Against,
        #[arg(long)]
        law: String,
    },
    /// Divergence of `Φ ∘ ψ` on an integral section.
    Divergence {
        #[command(flatten)]
        args: Against,
        #[arg(long)]
        law: String,
        #[command(flatten)]
        section: SectionArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum BuildCommand {
    /// Noether momenta of a Cartan symmetry.
    Noether {
        #[command(flatten)]
        args: FieldOnly,
        /// Base point where the potentials vanish (default: origin).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        base: Option<Vec<f64>>,
    },
    /// `Φ_A = ω_A(S_1, ..., S_{p-1}, Y)`.
    BracketLaw {
        #[command(flatten)]
        args: FieldAgainst,
        /// The pseudosymmetries `S_j`.
        #[arg(long, value_delimiter = ',', required = true)]
        s: Vec<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum IntegrateCommand {
    /// Integral section of an integrable tuple by composed RK4 flows.
    Section {
        #[command(flatten)]
        args: Against,
        #[command(flatten)]
        section: SectionArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Bundled model name or path to a model file.
    #[arg(long)]
    pub model: String,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    /// Override the per-check default tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Half-width of the sampling box.
    #[arg(long = "box", default_value_t = 1.0)]
    pub half_width: f64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Parameter override `name=value`, repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
    /// Report elapsed_ms as 0.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Args)]
pub struct Against {
    #[command(flatten)]
    pub common: Common,
    /// Fields of the tuple `X` (default: the model's evolution entry).
    #[arg(long, value_delimiter = ',')]
    pub against: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct FieldOnly {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub field: String,
}

#[derive(Debug, Args)]
pub struct FieldAgainst {
    #[command(flatten)]
    pub args: Against,
    #[arg(long)]
    pub field: String,
}

#[derive(Debug, Args)]
pub struct SectionArgs {
    /// Initial point `ψ(0)`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub origin: Vec<f64>,
    /// Parameter range per axis; one value applies to every axis.
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    pub range: Vec<f64>,
    /// Step per axis; one value applies to every axis (default 1/128).
    #[arg(long, value_delimiter = ',', default_value = "0.0078125")]
    pub step: Vec<f64>,
    /// Write the grid as CSV to this path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let value: f64 = value.trim().parse().map_err(|e| format!("bad value in `{s}`: {e}"))?;
    Ok((name.trim().to_string(), value))
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parse `argv` (program name first) and run the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = if e.use_stderr() { 2 } else { 0 };
            return if code == 0 {
                Outcome { stdout: text, stderr: String::new(), code }
            } else {
                Outcome { stdout: String::new(), stderr: text, code }
            };
        }
    };
    let echo = argv.iter().skip(1).cloned().collect::<Vec<_>>().join(" ");
    match execute(cli.command, echo) {
        Ok((report, format)) => {
            let stdout = match format {
                Format::Json => report.to_json(),
                Format::Table => report.to_table(),
            };
            Outcome { stdout, stderr: String::new(), code: if report.all_pass() { 0 } else { 1 } }
        }
        Err(e) => Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), code: 2 },
    }
}

struct Session {
    model: LoadedModel,
    points: Vec<Vec<f64>>,
    report: Report,
    tol: Option<f64>,
    started: Instant,
    no_timing: bool,
}

impl Session {
    fn open(common: &Common, echo: String) -> Result<Self, CliError> {
        let started = Instant::now();
        let (label, text) = registry::read_model(&common.model)?;
        let overrides: BTreeMap<String, f64> = common.params.iter().cloned().collect();
        let model = LoadedModel::load(&text, &overrides)?;
        if common.samples == 0 {
            return Err(CliError::Usage("--samples must be positive".into()));
        }
        if !(common.half_width.is_finite() && common.half_width > 0.0) {
            return Err(CliError::Usage("--box must be a positive number".into()));
        }
        let points = SampleSpec::new(common.samples, common.seed, common.half_width).draw(model.chart.dim());
        let report = Report {
            command: echo,
            model: label,
            model_digest: model.digest.clone(),
            seed: common.seed,
            samples: common.samples,
            checks: Vec::new(),
            outputs: Vec::new(),
            elapsed_ms: 0,
        };
        Ok(Session { model, points, report, tol: common.tol, started, no_timing: common.no_timing })
    }

    fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    /// Symbolic tolerance from the sqrt content of the model's expressions.
    fn symbolic_tol(&self) -> f64 {
        let mut exprs: Vec<&Expr> = self.model.fields.values().flat_map(|f| f.components().iter()).collect();
        if let Some(sys) = &self.model.system {
            exprs.push(sys.function().expr());
        }
        self.tol_or(symmetry::default_tolerance(exprs))
    }

    fn verdict(&mut self, name: &str, v: &SymmetryVerdict) {
        self.report.checks.push(Check {
            name: name.to_string(),
            kind: v.kind.to_string(),
            tol: v.tolerance,
            max_residual: v.max_residual,
            witness: v.witness.clone(),
            pass: v.holds,
        });
    }

    fn residual(&mut self, name: &str, kind: &str, tol: f64, r: &Residual) {
        self.report.checks.push(Check::new(name, kind, tol, r.max, r.witness.clone()));
    }

    fn finish(mut self) -> Report {
        if !self.no_timing {
            self.report.elapsed_ms = self.started.elapsed().as_millis() as u64;
        }
        self.report
    }
}

fn execute(command: Command, echo: String) -> Result<(Report, Format), CliError> {
    match command {
        Command::ListModels { format } => Ok((list_models(echo), format)),
        Command::Check(c) => check(c, echo),
        Command::Solve(SolveCommand::Evolution { common, point }) => {
            let format = common.format;
            let mut s = Session::open(&common, echo)?;
            solve_evolution(&mut s, point)?;
            Ok((s.finish(), format))
        }
        Command::Verify(v) => verify(v, echo),
        Command::Build(b) => build(b, echo),
        Command::Integrate(IntegrateCommand::Section { args, section }) => {
            let format = args.common.format;
            let mut s = Session::open(&args.common, echo)?;
            let x = s.model.tuple(args.against.as_deref())?;
            let grid = section_grid(&x, &section)?;
            s.residual("commutation", "integrability", s.tol_or(sections::INTEGRABILITY_TOL), grid.commutator());
            let shape = grid.grid().shape().iter().map(usize::to_string).collect::<Vec<_>>().join("x");
            s.report.output("grid", shape);
            let last = grid.grid().values().last().map(|p| fmt_vec(p)).unwrap_or_default();
            s.report.output("final_point", last);
            s.report.output("defining_equation_residual", fmt_f64(sections::defining_equation_residual(&x, &grid)?.max));
            write_csv(&mut s, &grid, &section)?;
            Ok((s.finish(), format))
        }
    }
}

fn list_models(echo: String) -> Report {
    let mut report = Report {
        command: echo,
        model: "bundled".into(),
        model_digest: String::new(),
        seed: 0,
        samples: 0,
        checks: Vec::new(),
        outputs: Vec::new(),
        elapsed_ms: 0,
    };
    for b in registry::BUNDLED {
        report.output(b.name, registry::summary(b.source));
    }
    report
}

fn check(c: CheckCommand, echo: String) -> Result<(Report, Format), CliError> {
    match c {
        CheckCommand::Regularity(common) => {
            let format = common.format;
            let mut s = Session::open(&common, echo)?;
            let sys = s.model.system()?;
            let reg = dynamics::check_regularity(sys, &s.points)?;
            let inverse = if reg.min_abs_det > 0.0 { 1.0 / reg.min_abs_det } else { f64::MAX };
            let tol = s.tol_or(REGULARITY_BOUND);
            let mut record = Check::new("hessian", "regularity", tol, inverse.min(f64::MAX), reg.witness.clone());
            record.pass = record.pass && reg.regular;
            s.report.checks.push(record);
            s.report.output("min_abs_det", fmt_f64(reg.min_abs_det));
            Ok((s.finish(), format))
        }
        CheckCommand::Symmetry(FieldAgainst { args, field }) => {
            let format = args.common.format;
            let mut s = Session::open(&args.common, echo)?;
            let x = s.model.tuple(args.against.as_deref())?;
            let y = s.model.field(&field)?;
            let v = symmetry::is_symmetry(&x, y, &s.points, s.symbolic_tol())?;
            s.verdict(&field, &v);
            Ok((s.finish(), format))
        }
        CheckCommand::Pseudosymmetry { args: FieldAgainst { args, field }, z, y_tuple } => {
            let format = args.common.format;
            let mut s = Session::open(&args.common, echo)?;
            let x = s.model.tuple(args.against.as_deref())?;
            let y = s.model.field(&field)?;
            let z = match (z, y_tuple) {
                (Some(names), _) => s.model.tuple(Some(&names))?,
                (None, Some(name)) => KVectorField::repeated(s.model.field(&name)?, x.k())?,
                (None, None) => x.clone(),
            };
            let v = symmetry::solve_pseudosymmetry(&x, y, &z, &s.points, s.symbolic_tol())?;
            s.verdict(&field, &v);
            if let Some(rank) = v.min_rank() {
                s.report.output("min_rank", rank.to_string());
            }
            match &v.lambda_fit {
                Some(fit) => {
                    for (a, row) in fit.entries.iter().enumerate() {
                        for (b, e) in row.iter().enumerate() {
                            s.report.output(format!("lambda_{}^{}", a + 1, b + 1), e.to_source(&s.model.chart));
                        }
                    }
                    s.report.output("lambda_fit_residual", fmt_f64(fit.max_residual));
                }
                None => s.report.output("lambda_fit", "none"),
            }
            Ok((s.finish(), format))
        }
        CheckCommand::Cartan(FieldOnly { common, field }) => {
            let format = common.format;
            let mut s = Session::open(&common, echo)?;
            let v = symmetry::is_cartan_symmetry(s.model.system()?, s.model.field(&field)?, &s.points, s.symbolic_tol())?;
            s.verdict(&field, &v);
            Ok((s.finish(), format))
        }
        CheckCommand::Integrability(Against { common, against }) => {
            let format = common.format;
            let mut s = Session::open(&common, echo)?;
            let x = s.model.tuple(against.as_deref())?;
            let r = sections::check_integrability(&x, &s.points)?;
            s.residual("commutators", "integrability", s.tol_or(sections::INTEGRABILITY_TOL), &r.commutator);
            Ok((s.finish(), format))
        }
        CheckCommand::Converse { args: FieldAgainst { args, field }, law } => {
            let format = args.common.format;
            let mut s = Session::open(&args.common, echo)?;
            let x = s.model.tuple(args.against.as_deref())?;
            let tol = s.symbolic_tol();
            let m = conservation::check_momentum_converse(
                s.model.system()?,
                s.model.field(&field)?,
                s.model.law(&law)?,
                &x,
                &s.points,
                tol,
            )?;
            s.residual("exactness", "exactness", m.tolerance, &m.exactness);
            s.residual("conserved", "law", m.tolerance, &m.conserved);
            s.verdict("cartan", &m.cartan);
            s.report.output("noether_induced", m.noether_induced().to_string());
            s.report.output("biconditional_consistent", m.biconditional_consistent().to_string());
            Ok((s.finish(), format))
        }
    }
}

fn solve_evolution(s: &mut Session, point: Option<Vec<f64>>) -> Result<(), CliError> {
    let sys = s.model.system()?.clone();
    let tol = s.tol_or(VERIFY_TOL);
    let points = match &point {
        Some(p) => {
            s.model.chart.check_point(p).map_err(ModelError::from)?;
            vec![p.clone()]
        }
        None => s.points.clone(),
    };
    let mut worst = Residual::zero();
    let mut min_rank = usize::MAX;
    let mut last = Vec::new();
    for p in &points {
        let (components, residual, rank) = match sys.kind() {
            SystemKind::Hamiltonian => {
                let v = dynamics::solve_evolution_hamiltonian(&sys, p)?;
                (v.components, v.residual, v.rank)
            }
            SystemKind::Lagrangian => {
                let v = dynamics::solve_evolution_lagrangian(&sys, p)?;
                (v.components, v.residual, v.rank)
            }
        };
        worst.merge(Residual { max: residual, witness: p.clone() });
        min_rank = min_rank.min(rank);
        last = components;
    }
    s.residual("field_equations", "evolution", tol, &worst);
    s.report.output("min_rank", min_rank.to_string());
    if point.is_some() {
        for (a, row) in last.iter().enumerate() {
            s.report.output(format!("X_{}", a + 1), fmt_vec(row));
        }
    }
    Ok(())
}

fn verify(v: VerifyCommand, echo: String) -> Result<(Report, Format), CliError> {
    match v {
        VerifyCommand::Evolution(Against { common, against }) => {
            let format = common.format;
            let mut s = Session::open(&common, echo)?;
            let x = s.model.tuple(against.as_deref())?;
            let r = dynamics::verify_evolution(s.model.system()?, &x, &s.points)?;
            s.residual("field_equations", "evolution", s.tol_or(VERIFY_TOL), &r);
            Ok((s.finish(), format))
        }
        VerifyCommand::Law { args: Against { common, against }, law } => {
            let format = common.format;
            let mut s = Session::open(&common, echo)?;
            let x = s.model.tuple(against.as_deref())?;
            let phi = s.model.law(&law)?;
            let r = conservation::verify_law_pointwise(&x, phi, &s.points)?;
            let tol = s.tol_or(law_tol(phi));
            s.residual(&law, "law", tol, &r);
            Ok((s.finish(), format))
        }
        VerifyCommand::Divergence { args: Against { common, against }, law, section } => {
            let format = common.format;
            let mut s = Session::open(&common, echo)?;
            let x = s.model.tuple(against.as_deref())?;
            let phi = s.model.law(&law)?.clone();
            let grid = section_grid(&x, &section)?;
            s.residual("commutation", "integrability", sections::INTEGRABILITY_TOL, grid.commutator());
            let fine = sections::verify_law_divergence(&phi, &grid)?;
            let coarse_steps: Vec<f64> = grid.grid().steps().iter().map(|h| 2.0 * h).collect();
            let ranges = axis_values(&section.range, x.k(), "--range")?;
            let coarse = sections::integrate_section(&x, grid.origin(), &ranges, &coarse_steps)
                .and_then(|g| sections::verify_law_divergence(&phi, &g));
            let tol = match (s.tol, &coarse) {
                (Some(t), _) => t,
                (None, Ok(c)) => DIVERGENCE_FLOOR.max(c.residual.max / DIVERGENCE_SHRINK),
                (None, Err(_)) => DIVERGENCE_FLOOR,
            };
            s.residual(&law, "divergence", tol, &fine.residual);
            s.report.output("t_witness", fmt_vec(&fine.t_witness));
            s.report.output("h2_scale", fmt_f64(fine.h2_scale));
            if let Ok(c) = &coarse {
                s.report.output("coarse_residual", fmt_f64(c.residual.max));
            }
            write_csv(&mut s, &grid, &section)?;
            Ok((s.finish(), format))
        }
    }
}

fn build(b: BuildCommand, echo: String) -> Result<(Report, Format), CliError> {
    match b {
        BuildCommand::Noether { args: FieldOnly { common, field }, base } => {
            let format = common.format;
            let mut s = Session::open(&common, echo)?;
            let sys = s.model.system()?.clone();
            let y = s.model.field(&field)?.clone();
            let base = base.unwrap_or_else(|| vec![0.0; s.model.chart.dim()]);
            s.model.chart.check_point(&base).map_err(ModelError::from)?;
            let tol = s.symbolic_tol();
            let cartan = symmetry::is_cartan_symmetry(&sys, &y, &s.points, tol)?;
            s.verdict(&field, &cartan);
            if !cartan.holds {
                return Ok((s.finish(), format));
            }
            let law = conservation::build_noether_law(&sys, &y, &base, &s.points, tol)?;
            if let Ok(x) = s.model.tuple(None) {
                let r = conservation::verify_law_pointwise(&x, &law, &s.points)?;
                s.residual("conserved", "law", s.tol_or(law_tol(&law)), &r);
            }
            describe_law(&mut s, &law);
            Ok((s.finish(), format))
        }
        BuildCommand::BracketLaw { args: FieldAgainst { args, field }, s: s_names } => {
            let format = args.common.format;
            let mut s = Session::open(&args.common, echo)?;
            let sys = s.model.system()?.clone();
            let x = s.model.tuple(args.against.as_deref())?;
            let y = s.model.field(&field)?.clone();
            let s_fields: Vec<VectorField> =
                s_names.iter().map(|n| s.model.field(n).cloned()).collect::<Result<_, _>>()?;
            let tol = s.symbolic_tol();
            let v = symmetry::is_symmetry(&x, &y, &s.points, tol)?;
            s.verdict(&field, &v);
            let y_tuple = KVectorField::repeated(&y, x.k())?;
            for (name, sj) in s_names.iter().zip(&s_fields) {
                let v = symmetry::solve_pseudosymmetry(&x, sj, &y_tuple, &s.points, tol)?;
                s.verdict(name, &v);
            }
            let v = symmetry::is_invariant_form(&x, sys.omegas(), &s.points, tol)?;
            s.verdict("omegas", &v);
            let law = conservation::build_bracket_law(sys.omegas(), &s_fields, &y)?;
            let r = conservation::verify_law_pointwise(&x, &law, &s.points)?;
            s.residual("conserved", "law", s.tol_or(VERIFY_TOL), &r);
            describe_law(&mut s, &law);
            Ok((s.finish(), format))
        }
    }
}

fn law_tol(law: &ConservationLaw) -> f64 {
    if law.symbolic().is_some() {
        VERIFY_TOL
    } else {
        QUADRATURE_TOL
    }
}

fn describe_law(s: &mut Session, law: &ConservationLaw) {
    s.report.output("provenance", law.provenance().to_string());
    for (a, c) in law.components().iter().enumerate() {
        let text = match c {
            LawComponent::Symbolic(f) => f.expr().simplify().to_source(&s.model.chart),
            other => other.describe(),
        };
        s.report.output(format!("Phi_{}", a + 1), text);
    }
}

fn axis_values(values: &[f64], k: usize, flag: &str) -> Result<Vec<f64>, CliError> {
    match values.len() {
        1 => Ok(vec![values[0]; k]),
        n if n == k => Ok(values.to_vec()),
        n => Err(CliError::Usage(format!("{flag} takes 1 or {k} values, got {n}"))),
    }
}

fn section_grid(x: &KVectorField, args: &SectionArgs) -> Result<SectionGrid, CliError> {
    let ranges = axis_values(&args.range, x.k(), "--range")?;
    let steps = axis_values(&args.step, x.k(), "--step")?;
    Ok(sections::integrate_section(x, &args.origin, &ranges, &steps)?)
}

fn write_csv(s: &mut Session, grid: &SectionGrid, args: &SectionArgs) -> Result<(), CliError> {
    if let Some(path) = &args.csv {
        std::fs::write(path, grid.to_csv())?;
        s.report.output("csv", path.display().to_string());
    }
    Ok(())
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.6e}")
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(", ")
}
