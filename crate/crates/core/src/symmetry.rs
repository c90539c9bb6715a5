//! Symmetries, pseudosymmetries, Cartan symmetries and invariant forms of
//! k-vector fields, tested on sample sets.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::calculus::{lie_bracket, lie_derivative_form, CalculusError, PForm, VectorField};
use crate::chart::{ensure_same, Chart, ChartError};
use crate::dynamics::{FieldSystem, KVectorField};
use crate::expr::{Expr, Func};
use crate::linalg::min_norm_solve;
use crate::residual::Residual;

/// Tolerance for polynomial data.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Tolerance for data involving square roots.
pub const SQRT_TOL: f64 = 1e-6;
/// Acceptance threshold for the degree-2 fit of λ.
pub const FIT_TOL: f64 = 1e-8;
const SNAP: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymmetryError {
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error("expected a {expected}-tuple, got {found}")]
    TupleLength { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymmetryKind {
    Symmetry,
    Pseudosymmetry,
    Cartan,
    InvariantForm,
}

impl fmt::Display for SymmetryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymmetryKind::Symmetry => "symmetry",
            SymmetryKind::Pseudosymmetry => "pseudosymmetry",
            SymmetryKind::Cartan => "cartan",
            SymmetryKind::InvariantForm => "invariant-form",
        })
    }
}

/// `λ_A^B` at one sample: `lambda[A][B]`, and the rank of `{Z_B(p)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSample {
    pub point: Vec<f64>,
    pub lambda: Vec<Vec<f64>>,
    pub rank: usize,
}

/// Closed-form `λ_A^B` as polynomials of degree at most 2 in the chart
/// coordinates, with coefficients within 1e-9 of an integer snapped to it.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaFit {
    pub entries: Vec<Vec<Expr>>,
    pub max_residual: f64,
}

impl LambdaFit {
    /// The common constant value when every entry is the same literal.
    pub fn constant(&self) -> Option<f64> {
        let first = self.entries.first()?.first()?.as_num()?;
        self.entries.iter().flatten().all(|e| e.as_num() == Some(first)).then_some(first)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryVerdict {
    pub kind: SymmetryKind,
    pub holds: bool,
    pub max_residual: f64,
    pub tolerance: f64,
    pub witness: Vec<f64>,
    pub lambda_samples: Vec<LambdaSample>,
    pub lambda_fit: Option<LambdaFit>,
}

impl SymmetryVerdict {
    fn from_residual(kind: SymmetryKind, r: Residual, tolerance: f64) -> Self {
        SymmetryVerdict {
            kind,
            holds: r.within(tolerance),
            max_residual: r.max,
            tolerance,
            witness: r.witness,
            lambda_samples: Vec::new(),
            lambda_fit: None,
        }
    }

    /// Smallest rank of `{Z_B(p)}` over the samples.
    pub fn min_rank(&self) -> Option<usize> {
        self.lambda_samples.iter().map(|s| s.rank).min()
    }
}

fn uses_sqrt(e: &Expr) -> bool {
    match e {
        Expr::Num(_) | Expr::Var(_) => false,
        Expr::Call(Func::Sqrt, _) => true,
        Expr::Call(_, a) | Expr::Neg(a) | Expr::Pow(a, _) => uses_sqrt(a),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => uses_sqrt(a) || uses_sqrt(b),
    }
}

/// [`SQRT_TOL`] when any expression takes a square root, else [`DEFAULT_TOL`].
pub fn default_tolerance<'a>(exprs: impl IntoIterator<Item = &'a Expr>) -> f64 {
    if exprs.into_iter().any(uses_sqrt) {
        SQRT_TOL
    } else {
        DEFAULT_TOL
    }
}

fn field_sup(v: &VectorField, p: &[f64]) -> Result<f64, CalculusError> {
    Ok(v.at(p)?.iter().fold(0.0, |m, x| m.max(x.abs())))
}

fn brackets(x: &KVectorField, y: &VectorField) -> Result<Vec<VectorField>, SymmetryError> {
    ensure_same(x.chart(), y.chart())?;
    Ok(x.fields().iter().map(|xa| lie_bracket(xa, y)).collect::<Result<_, _>>()?)
}

/// `[X_A, Y] = 0` for every `A`.
pub fn is_symmetry(
    x: &KVectorField,
    y: &VectorField,
    points: &[Vec<f64>],
    tolerance: f64,
) -> Result<SymmetryVerdict, SymmetryError> {
    let br = brackets(x, y)?;
    let r = Residual::over(points, |p| {
        br.iter().try_fold(0.0, |m: f64, b| Ok::<_, CalculusError>(m.max(field_sup(b, p)?)))
    })?;
    Ok(SymmetryVerdict::from_residual(SymmetryKind::Symmetry, r, tolerance))
}

/// Pointwise least-squares `[X_A, Y] = Σ_B λ_A^B Z_B`.
pub fn solve_pseudosymmetry(
    x: &KVectorField,
    y: &VectorField,
    z: &KVectorField,
    points: &[Vec<f64>],
    tolerance: f64,
) -> Result<SymmetryVerdict, SymmetryError> {
    ensure_same(x.chart(), z.chart())?;
    let br = brackets(x, y)?;
    let dim = x.chart().dim();
    let (k, kz) = (x.k(), z.k());
    let mut worst = Residual::zero();
    let mut samples = Vec::with_capacity(points.len());
    for p in points {
        let zs = z.at(p)?;
        let zmat = DMatrix::from_fn(dim, kz, |r, c| zs[c][r]);
        let degenerate = zs.iter().flatten().all(|&v| v == 0.0);
        let mut lambda = vec![vec![0.0; kz]; k];
        let mut rank = 0;
        let mut defect: f64 = 0.0;
        for (a, b) in br.iter().enumerate() {
            let rhs = DVector::from_vec(b.at(p)?);
            if degenerate {
                defect = defect.max(rhs.amax());
                continue;
            }
            let ls = min_norm_solve(&zmat, &rhs);
            rank = ls.rank;
            defect = defect.max(ls.residual);
            lambda[a] = ls.solution.iter().copied().collect();
        }
        worst.merge(Residual { max: defect, witness: p.clone() });
        samples.push(LambdaSample { point: p.clone(), lambda, rank });
    }
    let mut verdict = SymmetryVerdict::from_residual(SymmetryKind::Pseudosymmetry, worst, tolerance);
    verdict.lambda_fit = fit_lambda(x.chart(), &samples, k, kz);
    verdict.lambda_samples = samples;
    Ok(verdict)
}

fn monomials(dim: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    out.extend((0..dim).map(|i| vec![i]));
    for i in 0..dim {
        out.extend((i..dim).map(|j| vec![i, j]));
    }
    out
}

fn snap(c: f64) -> f64 {
    let r = c.round();
    if (c - r).abs() <= SNAP {
        r
    } else {
        c
    }
}

fn fit_lambda(chart: &Chart, samples: &[LambdaSample], k: usize, kz: usize) -> Option<LambdaFit> {
    let basis = monomials(chart.dim());
    if samples.len() <= basis.len() {
        return None;
    }
    let design = DMatrix::from_fn(samples.len(), basis.len(), |r, c| {
        basis[c].iter().map(|&i| samples[r].point[i]).product::<f64>()
    });
    let mut entries = vec![vec![Expr::ZERO; kz]; k];
    let mut max_residual: f64 = 0.0;
    for (a, row) in entries.iter_mut().enumerate() {
        for (b, entry) in row.iter_mut().enumerate() {
            let rhs = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.lambda[a][b]));
            let ls = min_norm_solve(&design, &rhs);
            let coeffs: Vec<f64> = ls.solution.iter().map(|&c| snap(c)).collect();
            let snapped = DVector::from_vec(coeffs.clone());
            max_residual = max_residual.max((&design * snapped - &rhs).amax());
            let terms = basis.iter().zip(&coeffs).filter(|(_, &c)| c != 0.0).map(|(m, &c)| {
                m.iter().fold(Expr::Num(c), |acc, &i| acc * Expr::Var(i))
            });
            *entry = Expr::sum(terms).simplify();
        }
    }
    (max_residual <= FIT_TOL).then_some(LambdaFit { entries, max_residual })
}

/// `L_Y ω_A = 0` for every `A` and `Y(E) = 0`, with `E` the system's energy.
pub fn is_cartan_symmetry(
    sys: &FieldSystem,
    y: &VectorField,
    points: &[Vec<f64>],
    tolerance: f64,
) -> Result<SymmetryVerdict, SymmetryError> {
    ensure_same(sys.chart(), y.chart())?;
    let mut defects: Vec<PForm> =
        sys.omegas().iter().map(|w| lie_derivative_form(y, w)).collect::<Result<_, _>>()?;
    defects.push(lie_derivative_form(y, &sys.energy().to_form())?);
    max_over_forms(SymmetryKind::Cartan, &defects, points, tolerance)
}

/// `L_{X_A} ω_A = 0` for every `A`.
pub fn is_invariant_form(
    x: &KVectorField,
    omegas: &[PForm],
    points: &[Vec<f64>],
    tolerance: f64,
) -> Result<SymmetryVerdict, SymmetryError> {
    if omegas.len() != x.k() {
        return Err(SymmetryError::TupleLength { expected: x.k(), found: omegas.len() });
    }
    let defects: Vec<PForm> =
        x.fields().iter().zip(omegas).map(|(xa, w)| lie_derivative_form(xa, w)).collect::<Result<_, _>>()?;
    max_over_forms(SymmetryKind::InvariantForm, &defects, points, tolerance)
}

fn max_over_forms(
    kind: SymmetryKind,
    forms: &[PForm],
    points: &[Vec<f64>],
    tolerance: f64,
) -> Result<SymmetryVerdict, SymmetryError> {
    let r = Residual::over(points, |p| {
        forms.iter().try_fold(0.0, |m: f64, f| Ok::<_, CalculusError>(m.max(f.sup_norm_at(p)?)))
    })?;
    Ok(SymmetryVerdict::from_residual(kind, r, tolerance))
}
