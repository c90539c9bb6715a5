use std::collections::BTreeMap;

use ksym_cli::model::LoadedModel;
use ksym_cli::registry;
use ksym_core::conservation::{build_noether_law, LawComponent};
use ksym_core::sampling::SampleSpec;
use ksym_core::sections::{integrate_section, verify_law_divergence};
use ksym_core::symmetry::{default_tolerance, is_cartan_symmetry, solve_pseudosymmetry};
use ksym_core::Expr;
use serde_json::{json, Value};

fn load(text: &str) -> Result<LoadedModel, String> {
    LoadedModel::load(text, &BTreeMap::new()).map_err(|e| e.to_string())
}

fn tolerance(model: &LoadedModel) -> f64 {
    let mut exprs: Vec<&Expr> = model.fields.values().flat_map(|f| f.components().iter()).collect();
    if let Some(sys) = &model.system {
        exprs.push(sys.function().expr());
    }
    default_tolerance(exprs)
}

fn names(csv: &str) -> Option<Vec<String>> {
    let list: Vec<String> = csv.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect();
    (!list.is_empty()).then_some(list)
}

fn finite(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

pub fn bundled_models() -> String {
    Value::from(registry::BUNDLED.iter().map(|b| b.name).collect::<Vec<_>>()).to_string()
}

pub fn bundled_source(name: &str) -> Result<String, String> {
    registry::bundled(name).map(|b| b.source.to_string()).ok_or_else(|| format!("no bundled model `{name}`"))
}

/// Cartan check of `field` and, when it passes, the Noether momenta.
pub fn noether(model: &str, field: &str, samples: usize, seed: u64) -> Result<String, String> {
    let m = load(model)?;
    let sys = m.system().map_err(|e| e.to_string())?;
    let y = m.field(field).map_err(|e| e.to_string())?;
    let pts = SampleSpec::new(samples.max(1), seed, 1.0).draw(m.chart.dim());
    let tol = tolerance(&m);
    let cartan = is_cartan_symmetry(sys, y, &pts, tol).map_err(|e| e.to_string())?;
    let mut out = json!({
        "cartan": cartan.holds,
        "residual": finite(cartan.max_residual),
        "tol": tol,
        "witness": cartan.witness,
    });
    if cartan.holds {
        let origin = vec![0.0; m.chart.dim()];
        let law = build_noether_law(sys, y, &origin, &pts, tol).map_err(|e| e.to_string())?;
        let phi: Vec<String> = law
            .components()
            .iter()
            .map(|c| match c {
                LawComponent::Symbolic(f) => f.expr().simplify().to_source(&m.chart),
                other => other.describe(),
            })
            .collect();
        out["phi"] = json!(phi);
    }
    Ok(out.to_string())
}

/// Least-squares `λ` with `[X_A, Y] = λ_A^B X_B`.
pub fn pseudosymmetry(model: &str, field: &str, against: &str, samples: usize, seed: u64) -> Result<String, String> {
    let m = load(model)?;
    let x = m.tuple(names(against).as_deref()).map_err(|e| e.to_string())?;
    let y = m.field(field).map_err(|e| e.to_string())?;
    let pts = SampleSpec::new(samples.max(1), seed, 1.0).draw(m.chart.dim());
    let v = solve_pseudosymmetry(&x, y, &x, &pts, tolerance(&m)).map_err(|e| e.to_string())?;
    let lambda = v.lambda_fit.as_ref().map(|fit| {
        fit.entries.iter().map(|row| row.iter().map(|e| e.to_source(&m.chart)).collect::<Vec<_>>()).collect::<Vec<_>>()
    });
    Ok(json!({
        "holds": v.holds,
        "residual": finite(v.max_residual),
        "tol": v.tolerance,
        "min_rank": v.min_rank(),
        "lambda": lambda,
    })
    .to_string())
}

/// Integral section of the evolution tuple from `origin` and the divergence
/// of `law` along it. `base` holds the first base coordinate on the grid.
pub fn section_divergence(model: &str, law: &str, origin: &str, range: f64, step: f64) -> Result<String, String> {
    let m = load(model)?;
    let x = m.tuple(None).map_err(|e| e.to_string())?;
    let phi = m.law(law).map_err(|e| e.to_string())?;
    let origin: Vec<f64> = origin
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("bad origin entry `{s}`: {e}")))
        .collect::<Result<_, _>>()?;
    let k = x.k();
    let section = integrate_section(&x, &origin, &vec![range; k], &vec![step; k]).map_err(|e| e.to_string())?;
    let div = verify_law_divergence(phi, &section).map_err(|e| e.to_string())?;
    let grid = section.grid();
    let base: Vec<f64> = grid.values().iter().map(|p| p[0]).collect();
    Ok(json!({
        "shape": grid.shape(),
        "commutator": finite(section.commutator().max),
        "residual": finite(div.residual.max),
        "t_witness": div.t_witness,
        "h2_scale": div.h2_scale,
        "base": base,
    })
    .to_string())
}
