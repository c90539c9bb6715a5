//! Integral sections of k-vector fields by composing fixed-step RK4 flows,
//! and conservation laws checked in divergence form along them.

use std::fmt::Write as _;

use thiserror::Error;

use crate::calculus::{lie_bracket, CalculusError, VectorField};
use crate::chart::{Chart, ChartError};
use crate::conservation::ConservationLaw;
use crate::dynamics::KVectorField;
use crate::grid::{Grid, GridError};
use crate::residual::Residual;

pub const INTEGRABILITY_TOL: f64 = 1e-8;
pub const DEFAULT_RANGE: f64 = 0.5;
pub const DEFAULT_STEP: f64 = 1.0 / 128.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SectionError {
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("flow of X_{field} left the domain at t = {t}: {source}")]
    Domain { field: usize, t: f64, source: CalculusError },
    #[error("flow of X_{field} produced a non-finite value at t = {t}, point {point:?}")]
    NonFinite { field: usize, t: f64, point: Vec<f64> },
    #[error("range {range} is not a positive whole multiple of step {step}")]
    Range { range: f64, step: f64 },
    #[error("expected {expected} entries, got {found}")]
    Arity { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrabilityReport {
    pub commutator: Residual,
    pub integrable: bool,
}

fn brackets(x: &KVectorField) -> Result<Vec<VectorField>, CalculusError> {
    let f = x.fields();
    let mut out = Vec::new();
    for a in 0..f.len() {
        for b in a + 1..f.len() {
            out.push(lie_bracket(&f[a], &f[b])?);
        }
    }
    Ok(out)
}

fn commutator_residual(x: &KVectorField, points: &[Vec<f64>]) -> Result<Residual, CalculusError> {
    let br = brackets(x)?;
    Residual::over(points, |p| {
        br.iter().try_fold(0.0, |m: f64, b| Ok(b.at(p)?.iter().fold(m, |m, v| m.max(v.abs()))))
    })
}

/// `max |[X_A, X_B]|` over `A < B` and the samples.
pub fn check_integrability(x: &KVectorField, points: &[Vec<f64>]) -> Result<IntegrabilityReport, SectionError> {
    let commutator = commutator_residual(x, points)?;
    Ok(IntegrabilityReport { integrable: commutator.within(INTEGRABILITY_TOL), commutator })
}

/// `steps` classical RK4 steps of size `h` along `field`, returning every
/// node including the start.
pub fn rk4_trajectory(
    field: &VectorField,
    index: usize,
    start: &[f64],
    h: f64,
    steps: usize,
) -> Result<Vec<Vec<f64>>, SectionError> {
    let eval = |p: &[f64], t: f64| field.at(p).map_err(|source| SectionError::Domain { field: index, t, source });
    let axpy = |y: &[f64], s: f64, k: &[f64]| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + s * b).collect() };
    let mut out = Vec::with_capacity(steps + 1);
    out.push(start.to_vec());
    let mut y = start.to_vec();
    for step in 0..steps {
        let t = step as f64 * h;
        let k1 = eval(&y, t)?;
        let k2 = eval(&axpy(&y, h / 2.0, &k1), t)?;
        let k3 = eval(&axpy(&y, h / 2.0, &k2), t)?;
        let k4 = eval(&axpy(&y, h, &k3), t)?;
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(SectionError::NonFinite { field: index, t: t + h, point: y });
        }
        out.push(y.clone());
    }
    Ok(out)
}

/// `ψ` sampled on `[0, T_1] × ... × [0, T_k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionGrid {
    chart: Chart,
    grid: Grid,
    origin: Vec<f64>,
    commutator: Residual,
}

impl SectionGrid {
    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    /// `max |[X_A, X_B]|` over the grid nodes.
    pub fn commutator(&self) -> &Residual {
        &self.commutator
    }

    pub fn is_integrable(&self) -> bool {
        self.commutator.within(INTEGRABILITY_TOL)
    }

    /// `τ ∘ ψ`: the first `n` coordinates at every node.
    pub fn base_projection(&self) -> Grid {
        let n = self.chart.n();
        let values = self.grid.values().iter().map(|v| v[..n].to_vec()).collect();
        Grid::new(self.grid.shape().to_vec(), self.grid.steps().to_vec(), values).expect("same shape")
    }

    /// Header `t_1,...,t_k,<coordinates>`, then one row per node in grid
    /// order, numbers with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let k = self.grid.shape().len();
        let mut out = String::new();
        let header: Vec<String> =
            (1..=k).map(|a| format!("t_{a}")).chain(self.chart.names().iter().cloned()).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for (flat, v) in self.grid.values().iter().enumerate() {
            let row: Vec<String> =
                self.grid.parameters(flat).iter().chain(v).map(|x| format!("{x:.16e}")).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

fn node_count(range: f64, step: f64) -> Result<usize, SectionError> {
    let ratio = range / step;
    let m = ratio.round();
    if !ratio.is_finite() || step <= 0.0 || m < 1.0 || (ratio - m).abs() > 1e-9 * m.max(1.0) {
        return Err(SectionError::Range { range, step });
    }
    Ok(m as usize + 1)
}

/// `ψ(t) = Flow_{X_1}^{t_1} ∘ ... ∘ Flow_{X_k}^{t_k}(p_0)`: march `X_k`
/// from `p_0`, then `X_{k-1}` from every node of that line, and so on.
pub fn integrate_section(
    x: &KVectorField,
    origin: &[f64],
    ranges: &[f64],
    steps: &[f64],
) -> Result<SectionGrid, SectionError> {
    let chart = x.chart().clone();
    chart.check_point(origin)?;
    let k = x.k();
    for len in [ranges.len(), steps.len()] {
        if len != k {
            return Err(SectionError::Arity { expected: k, found: len });
        }
    }
    let shape: Vec<usize> = ranges.iter().zip(steps).map(|(&r, &h)| node_count(r, h)).collect::<Result<_, _>>()?;
    let mut layer = vec![origin.to_vec()];
    for a in (0..k).rev() {
        let m = shape[a];
        let mut next = vec![Vec::new(); m * layer.len()];
        for (idx, start) in layer.iter().enumerate() {
            let line = rk4_trajectory(&x.fields()[a], a + 1, start, steps[a], m - 1)?;
            for (j, p) in line.into_iter().enumerate() {
                next[j * layer.len() + idx] = p;
            }
        }
        layer = next;
    }
    let commutator = commutator_residual(x, &layer)?;
    let grid = Grid::new(shape, steps.to_vec(), layer)?;
    Ok(SectionGrid { chart, grid, origin: origin.to_vec(), commutator })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport {
    /// Worst `|Σ_A ∂(Φ_A ∘ ψ)/∂t^A|` over interior nodes; the witness is the
    /// chart point `ψ(t)`.
    pub residual: Residual,
    /// Parameter value of the witness node.
    pub t_witness: Vec<f64>,
    /// `max_A h_A²`, the scale of the stencil error.
    pub h2_scale: f64,
}

/// Central-difference divergence of `Φ ∘ ψ` at the interior nodes.
pub fn verify_law_divergence(law: &ConservationLaw, section: &SectionGrid) -> Result<DivergenceReport, SectionError> {
    crate::chart::ensure_same(law.chart(), section.chart())?;
    let grid = &section.grid;
    let k = grid.shape().len();
    if law.k() != k {
        return Err(SectionError::Arity { expected: k, found: law.k() });
    }
    grid.require_fine()?;
    let values: Vec<Vec<f64>> = grid.values().iter().map(|p| law.values(p)).collect::<Result<_, _>>()?;
    let columns: Vec<Vec<f64>> = (0..k).map(|a| values.iter().map(|v| v[a]).collect()).collect();
    let mut residual = Residual::zero();
    let mut t_witness = Vec::new();
    for flat in (0..grid.len()).filter(|&f| grid.is_interior(f)) {
        let div: f64 = (0..k).map(|a| grid.derivative(&columns[a], a, flat)).sum();
        if div.abs() > residual.max || residual.witness.is_empty() {
            residual = Residual { max: div.abs(), witness: grid.values()[flat].clone() };
            t_witness = grid.parameters(flat);
        }
    }
    let h2_scale = grid.steps().iter().fold(0.0, |m: f64, h| m.max(h * h));
    Ok(DivergenceReport { residual, t_witness, h2_scale })
}

/// Fourth-order re-check of `∂ψ/∂t^A = X_A(ψ)` at nodes at least two steps
/// from the boundary along the differentiated axis.
pub fn defining_equation_residual(x: &KVectorField, section: &SectionGrid) -> Result<Residual, SectionError> {
    let grid = &section.grid;
    let dim = section.chart.dim();
    let mut worst = Residual::zero();
    for (a, xa) in x.fields().iter().enumerate() {
        let (s, h, m) = (grid.stride(a), grid.steps()[a], grid.shape()[a]);
        for flat in 0..grid.len() {
            let j = grid.multi_index(flat)[a];
            if j < 2 || j + 2 >= m {
                continue;
            }
            let v = |o: isize| &grid.values()[(flat as isize + o * s as isize) as usize];
            let field = xa.at(&grid.values()[flat])?;
            let defect = (0..dim)
                .map(|c| {
                    let d = (-v(2)[c] + 8.0 * v(1)[c] - 8.0 * v(-1)[c] + v(-2)[c]) / (12.0 * h);
                    (d - field[c]).abs()
                })
                .fold(0.0, f64::max);
            worst.merge(Residual { max: defect, witness: grid.values()[flat].clone() });
        }
    }
    Ok(worst)
}
