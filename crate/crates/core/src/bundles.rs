//! Canonical geometry of the k-cotangent and k-tangent bundles of `R^n`.
//!
//! Base coordinates `x_1..x_n` come first in every bundle chart, so a base
//! expression is re-read on a bundle chart without any index shuffling.

use thiserror::Error;

use crate::calculus::{exterior_derivative, CalculusError, PForm, ScalarField, VectorField};
use crate::chart::{Chart, ChartError, ChartKind, ChartSpace};
use crate::expr::Expr;
use crate::grid::{Grid, GridError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BundleError {
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("expected a field on the base chart of dimension {n}, got {found}")]
    NotOnBase { n: usize, found: String },
    #[error("prolongation needs {expected} component maps, got {found}")]
    Components { expected: usize, found: usize },
}

fn ensure_base(z: &VectorField, n: usize) -> Result<(), BundleError> {
    let c = z.chart();
    if c.kind() == ChartKind::Base && c.n() == n {
        Ok(())
    } else {
        Err(BundleError::NotOnBase { n, found: c.describe() })
    }
}

fn copy_index(a: usize, k: usize) -> Result<(), BundleError> {
    if a == 0 || a > k {
        Err(ChartError::CopyIndex { index: a, k }.into())
    } else {
        Ok(())
    }
}

/// `(T^1_k)^* R^n` with its canonical forms `θ_A = p_A_i dx_i` and
/// `ω_A = -dθ_A = dx_i ∧ dp_A_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct KCotangentChart {
    chart: Chart,
    thetas: Vec<PForm>,
    omegas: Vec<PForm>,
}

impl KCotangentChart {
    pub fn new(n: usize, k: usize) -> Result<Self, BundleError> {
        let chart = ChartSpace::k_cotangent(n, k)?;
        let mut thetas = Vec::with_capacity(k);
        let mut omegas = Vec::with_capacity(k);
        for a in 1..=k {
            let comps = (1..=n).map(|i| (vec![chart.x_index(i)], Expr::Var(chart.fiber_index(a, i))));
            let theta = PForm::from_components(chart.clone(), 1, comps)?;
            omegas.push(exterior_derivative(&theta)?.scale(-1.0));
            thetas.push(theta);
        }
        Ok(KCotangentChart { chart, thetas, omegas })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn n(&self) -> usize {
        self.chart.n()
    }

    pub fn k(&self) -> usize {
        self.chart.k()
    }

    pub fn thetas(&self) -> &[PForm] {
        &self.thetas
    }

    pub fn omegas(&self) -> &[PForm] {
        &self.omegas
    }

    /// Frame `{∂/∂p_A_i}` of the vertical distribution.
    pub fn vertical_frame(&self) -> Vec<VectorField> {
        (self.n()..self.chart.dim()).map(|c| VectorField::coordinate(self.chart.clone(), c)).collect()
    }
}

/// The (1,1)-tensor `S^A = ∂/∂v_A_i ⊗ dx_i`, stored as the pairs
/// `(x_i, v_A_i)` of chart indices.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentStructure {
    chart: Chart,
    copy: usize,
    pairs: Vec<(usize, usize)>,
}

impl TangentStructure {
    pub fn copy(&self) -> usize {
        self.copy
    }

    /// `S^A(X) = X^{x_i} ∂/∂v_A_i`.
    pub fn apply(&self, x: &VectorField) -> Result<VectorField, BundleError> {
        crate::chart::ensure_same(&self.chart, x.chart())?;
        let mut comps = vec![Expr::ZERO; self.chart.dim()];
        for &(xi, vi) in &self.pairs {
            comps[vi] = x.component(xi).clone();
        }
        Ok(VectorField::new(self.chart.clone(), comps)?)
    }

    /// `α ∘ S^A`: the 1-form whose `dx_i` component is `α_{v_A_i}`.
    pub fn compose(&self, alpha: &PForm) -> Result<PForm, BundleError> {
        crate::chart::ensure_same(&self.chart, alpha.chart())?;
        if alpha.degree() != 1 {
            return Err(CalculusError::Arity { expected: 1, found: alpha.degree() }.into());
        }
        let comps = self.pairs.iter().map(|&(xi, vi)| (vec![xi], alpha.get(&[vi])));
        Ok(PForm::from_components(self.chart.clone(), 1, comps)?)
    }
}

/// `T^1_k R^n` with its Liouville field and k-tangent structure.
#[derive(Debug, Clone, PartialEq)]
pub struct KTangentChart {
    chart: Chart,
    liouville: VectorField,
    structures: Vec<TangentStructure>,
}

impl KTangentChart {
    pub fn new(n: usize, k: usize) -> Result<Self, BundleError> {
        let chart = ChartSpace::k_tangent(n, k)?;
        let comps = (0..chart.dim()).map(|c| if chart.is_fiber(c) { Expr::Var(c) } else { Expr::ZERO }).collect();
        let liouville = VectorField::new(chart.clone(), comps)?;
        let structures = (1..=k)
            .map(|a| TangentStructure {
                chart: chart.clone(),
                copy: a,
                pairs: (1..=n).map(|i| (chart.x_index(i), chart.fiber_index(a, i))).collect(),
            })
            .collect();
        Ok(KTangentChart { chart, liouville, structures })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn n(&self) -> usize {
        self.chart.n()
    }

    pub fn k(&self) -> usize {
        self.chart.k()
    }

    /// `Δ = Σ_A v_A_i ∂/∂v_A_i`.
    pub fn liouville(&self) -> &VectorField {
        &self.liouville
    }

    /// `S^A` for `1 <= A <= k`.
    pub fn tangent_structure(&self, a: usize) -> Result<&TangentStructure, BundleError> {
        copy_index(a, self.k())?;
        Ok(&self.structures[a - 1])
    }

    pub fn tangent_structures(&self) -> &[TangentStructure] {
        &self.structures
    }

    pub fn vertical_frame(&self) -> Vec<VectorField> {
        (self.n()..self.chart.dim()).map(|c| VectorField::coordinate(self.chart.clone(), c)).collect()
    }
}

/// `Z^{C*} = Z^i ∂/∂x_i - p_A_j (∂Z^j/∂x_k) ∂/∂p_A_k`.
pub fn canonical_cotangent_lift(z: &VectorField, bundle: &KCotangentChart) -> Result<VectorField, BundleError> {
    let (n, k) = (bundle.n(), bundle.k());
    ensure_base(z, n)?;
    let chart = bundle.chart();
    let mut comps = vec![Expr::ZERO; chart.dim()];
    comps[..n].clone_from_slice(z.components());
    for a in 1..=k {
        for kk in 1..=n {
            let terms = (1..=n).map(|j| {
                Expr::Var(chart.fiber_index(a, j)) * z.component(chart.x_index(j)).diff(chart.x_index(kk))
            });
            comps[chart.fiber_index(a, kk)] = (-Expr::sum(terms)).simplify();
        }
    }
    Ok(VectorField::new(chart.clone(), comps)?)
}

/// `Z^C = Z^i ∂/∂x_i + v_A_j (∂Z^k/∂x_j) ∂/∂v_A_k`.
pub fn canonical_tangent_lift(z: &VectorField, bundle: &KTangentChart) -> Result<VectorField, BundleError> {
    let (n, k) = (bundle.n(), bundle.k());
    ensure_base(z, n)?;
    let chart = bundle.chart();
    let mut comps = vec![Expr::ZERO; chart.dim()];
    comps[..n].clone_from_slice(z.components());
    for a in 1..=k {
        for kk in 1..=n {
            let terms = (1..=n).map(|j| {
                Expr::Var(chart.fiber_index(a, j)) * z.component(chart.x_index(kk)).diff(chart.x_index(j))
            });
            comps[chart.fiber_index(a, kk)] = Expr::sum(terms);
        }
    }
    Ok(VectorField::new(chart.clone(), comps)?)
}

/// Vertical `A`-lift: the components of `Z` moved into the `A`-th fibre block.
pub fn vertical_lift(z: &VectorField, a: usize, bundle: &KTangentChart) -> Result<VectorField, BundleError> {
    let n = bundle.n();
    ensure_base(z, n)?;
    copy_index(a, bundle.k())?;
    let chart = bundle.chart();
    let mut comps = vec![Expr::ZERO; chart.dim()];
    for i in 1..=n {
        comps[chart.fiber_index(a, i)] = z.component(chart.x_index(i)).clone();
    }
    Ok(VectorField::new(chart.clone(), comps)?)
}

/// Closed-form first prolongation `φ^(1)(t) = (φ(t), ∂φ/∂t^1, ..., ∂φ/∂t^k)`
/// of a map `φ: R^k -> R^n` given by component expressions over `t_1..t_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Prolongation {
    params: Chart,
    target: Chart,
    /// Expressions in target-chart order.
    coords: Vec<Expr>,
}

impl Prolongation {
    pub fn target(&self) -> &Chart {
        &self.target
    }

    pub fn params(&self) -> &Chart {
        &self.params
    }

    pub fn eval(&self, t: &[f64]) -> Result<Vec<f64>, BundleError> {
        self.params.check_point(t)?;
        self.coords
            .iter()
            .map(|e| Ok(ScalarField::new(self.params.clone(), e.clone())?.value(t)?))
            .collect()
    }
}

pub fn first_prolongation(phi: &[Expr], params: &Chart, bundle: &KTangentChart) -> Result<Prolongation, BundleError> {
    let (n, k) = (bundle.n(), bundle.k());
    if params.kind() != ChartKind::Parameter || params.dim() != k {
        return Err(ChartError::Mismatch {
            expected: ChartSpace::parameters(k)?.describe(),
            found: params.describe(),
        }
        .into());
    }
    if phi.len() != n {
        return Err(BundleError::Components { expected: n, found: phi.len() });
    }
    let mut coords = phi.to_vec();
    for a in 0..k {
        coords.extend(phi.iter().map(|e| e.diff(a)));
    }
    Ok(Prolongation { params: params.clone(), target: bundle.chart().clone(), coords })
}

/// Grid first prolongation from samples of `φ` on a rectangular parameter
/// grid (values of length `n`). Derivatives use second-order stencils.
pub fn first_prolongation_grid(phi: &Grid, bundle: &KTangentChart) -> Result<Grid, BundleError> {
    let (n, k) = (bundle.n(), bundle.k());
    if phi.shape().len() != k {
        return Err(BundleError::Components { expected: k, found: phi.shape().len() });
    }
    phi.require_fine()?;
    if let Some(v) = phi.values().iter().find(|v| v.len() != n) {
        return Err(BundleError::Components { expected: n, found: v.len() });
    }
    let columns: Vec<Vec<f64>> = (0..n).map(|i| phi.values().iter().map(|v| v[i]).collect()).collect();
    let values = (0..phi.len())
        .map(|flat| {
            let mut point = phi.values()[flat].clone();
            for a in 0..k {
                point.extend(columns.iter().map(|col| phi.derivative(col, a, flat)));
            }
            point
        })
        .collect();
    Ok(Grid::new(phi.shape().to_vec(), phi.steps().to_vec(), values)?)
}
