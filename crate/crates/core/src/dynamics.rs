//! k-symplectic Hamiltonian and Lagrangian systems and their field equations.
//!
//! Both kinds share one geometric equation, `Σ_A i_{X_A} ω_A = dE`, where `E`
//! is the Hamiltonian `H` on the k-cotangent bundle or the Lagrangian energy
//! `E_L` on the k-tangent bundle. Solvers work pointwise.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::bundles::{BundleError, KCotangentChart, KTangentChart};
use crate::calculus::{exterior_derivative, interior_product, CalculusError, PForm, ScalarField, VectorField};
use crate::chart::{ensure_same, Chart, ChartError};
use crate::expr::{parse_with_params, Expr, ParseError};
use crate::linalg::min_norm_solve;
use crate::residual::Residual;

/// Regularity threshold on `|det Hess_v L|`.
pub const REGULARITY_TOL: f64 = 1e-10;
/// Largest accepted residual of a pointwise solve.
pub const SOLVE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error("operation requires a {expected} system, got {found}")]
    WrongKind { expected: SystemKind, found: SystemKind },
    #[error("singular fibre Hessian (det = {det:e}) at {point:?}")]
    SingularHessian { det: f64, point: Vec<f64> },
    #[error("field equations inconsistent at {point:?}: residual {residual:e}")]
    Inconsistent { residual: f64, point: Vec<f64> },
    #[error("a k-vector field needs at least one field")]
    EmptyTuple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemKind {
    Hamiltonian,
    Lagrangian,
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SystemKind::Hamiltonian => "hamiltonian",
            SystemKind::Lagrangian => "lagrangian",
        })
    }
}

/// An ordered tuple `(X_1, ..., X_k)` of vector fields on one chart.
#[derive(Debug, Clone, PartialEq)]
pub struct KVectorField {
    chart: Chart,
    fields: Vec<VectorField>,
}

impl KVectorField {
    pub fn new(fields: Vec<VectorField>) -> Result<Self, DynamicsError> {
        let chart = fields.first().ok_or(DynamicsError::EmptyTuple)?.chart().clone();
        for f in &fields[1..] {
            ensure_same(&chart, f.chart())?;
        }
        Ok(KVectorField { chart, fields })
    }

    /// The constant tuple `(Y, ..., Y)`.
    pub fn repeated(y: &VectorField, k: usize) -> Result<Self, DynamicsError> {
        KVectorField::new(vec![y.clone(); k])
    }

    pub fn zero(chart: Chart, k: usize) -> Result<Self, DynamicsError> {
        KVectorField::new(vec![VectorField::zero(chart); k])
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn k(&self) -> usize {
        self.fields.len()
    }

    pub fn fields(&self) -> &[VectorField] {
        &self.fields
    }

    pub fn at(&self, point: &[f64]) -> Result<Vec<Vec<f64>>, CalculusError> {
        self.fields.iter().map(|f| f.at(point)).collect()
    }
}

/// A Hamiltonian or Lagrangian k-symplectic system with its derived forms.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSystem {
    kind: SystemKind,
    function: ScalarField,
    thetas: Vec<PForm>,
    omegas: Vec<PForm>,
    energy: ScalarField,
    tangent: Option<KTangentChart>,
}

impl FieldSystem {
    /// Build from `H` on a k-cotangent chart or `L` on a k-tangent chart.
    pub fn hamiltonian(h: ScalarField) -> Result<Self, DynamicsError> {
        let chart = h.chart().clone();
        let bundle = KCotangentChart::new(chart.n(), chart.k())?;
        ensure_same(bundle.chart(), &chart)?;
        Ok(FieldSystem {
            kind: SystemKind::Hamiltonian,
            thetas: bundle.thetas().to_vec(),
            omegas: bundle.omegas().to_vec(),
            energy: h.clone(),
            function: h,
            tangent: None,
        })
    }

    pub fn lagrangian(l: ScalarField) -> Result<Self, DynamicsError> {
        let chart = l.chart().clone();
        let bundle = KTangentChart::new(chart.n(), chart.k())?;
        ensure_same(bundle.chart(), &chart)?;
        let dl = l.differential();
        let mut thetas = Vec::with_capacity(chart.k());
        let mut omegas = Vec::with_capacity(chart.k());
        for s in bundle.tangent_structures() {
            let theta = s.compose(&dl)?;
            omegas.push(exterior_derivative(&theta)?.scale(-1.0));
            thetas.push(theta);
        }
        let energy = (bundle.liouville().apply(l.expr()) - l.expr().clone()).simplify();
        Ok(FieldSystem {
            kind: SystemKind::Lagrangian,
            thetas,
            omegas,
            energy: ScalarField::new(chart, energy)?,
            function: l,
            tangent: Some(bundle),
        })
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn chart(&self) -> &Chart {
        self.function.chart()
    }

    pub fn n(&self) -> usize {
        self.chart().n()
    }

    pub fn k(&self) -> usize {
        self.chart().k()
    }

    /// `H` or `L`.
    pub fn function(&self) -> &ScalarField {
        &self.function
    }

    /// `θ_A` (canonical) or `(θ_L)_A = dL ∘ S^A`.
    pub fn thetas(&self) -> &[PForm] {
        &self.thetas
    }

    /// `ω_A` (canonical) or `(ω_L)_A = -d(θ_L)_A`.
    pub fn omegas(&self) -> &[PForm] {
        &self.omegas
    }

    /// Right-hand side of the field equation: `H` itself, or `E_L = Δ(L) - L`.
    pub fn energy(&self) -> &ScalarField {
        &self.energy
    }

    /// The bundle geometry for Lagrangian systems.
    pub fn tangent_bundle(&self) -> Option<&KTangentChart> {
        self.tangent.as_ref()
    }

    fn require(&self, kind: SystemKind) -> Result<(), DynamicsError> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(DynamicsError::WrongKind { expected: kind, found: self.kind })
        }
    }
}

/// Parse the model function on the bundle chart of `kind` and build the system.
pub fn build_system(
    kind: SystemKind,
    n: usize,
    k: usize,
    source: &str,
    params: &BTreeMap<String, f64>,
) -> Result<FieldSystem, DynamicsError> {
    let chart = match kind {
        SystemKind::Hamiltonian => crate::chart::ChartSpace::k_cotangent(n, k)?,
        SystemKind::Lagrangian => crate::chart::ChartSpace::k_tangent(n, k)?,
    };
    let f = ScalarField::new(chart.clone(), parse_with_params(source, &chart, params)?.simplify())?;
    match kind {
        SystemKind::Hamiltonian => FieldSystem::hamiltonian(f),
        SystemKind::Lagrangian => FieldSystem::lagrangian(f),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub regular: bool,
    pub min_abs_det: f64,
    pub witness: Vec<f64>,
}

/// Symbolic fibre Hessian `∂²L/∂v_A_i ∂v_B_j`, rows and columns in chart
/// order of the fibre coordinates.
fn fibre_hessian(sys: &FieldSystem) -> Vec<Vec<Expr>> {
    let chart = sys.chart();
    let fibre: Vec<usize> = (sys.n()..chart.dim()).collect();
    let l = sys.function.expr();
    fibre
        .iter()
        .map(|&r| {
            let dr = l.diff(r);
            fibre.iter().map(|&c| dr.diff(c)).collect()
        })
        .collect()
}

fn eval_matrix(chart: &Chart, m: &[Vec<Expr>], point: &[f64]) -> Result<DMatrix<f64>, CalculusError> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut out = DMatrix::zeros(rows, cols);
    for (r, row) in m.iter().enumerate() {
        for (c, e) in row.iter().enumerate() {
            out[(r, c)] = crate::calculus::eval_on(chart, e, point, "fibre Hessian")?;
        }
    }
    Ok(out)
}

/// Regular iff `|det Hess_v L| > REGULARITY_TOL` at every sample.
pub fn check_regularity(sys: &FieldSystem, points: &[Vec<f64>]) -> Result<RegularityReport, DynamicsError> {
    sys.require(SystemKind::Lagrangian)?;
    let hess = fibre_hessian(sys);
    let mut min_abs_det = f64::INFINITY;
    let mut witness = Vec::new();
    for p in points {
        sys.chart().check_point(p)?;
        let det = eval_matrix(sys.chart(), &hess, p)?.determinant().abs();
        if det < min_abs_det {
            min_abs_det = det;
            witness = p.clone();
        }
    }
    Ok(RegularityReport { regular: min_abs_det > REGULARITY_TOL, min_abs_det, witness })
}

/// Value of a k-vector field at one point, as `k` component vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionValue {
    pub components: Vec<Vec<f64>>,
    /// Sup-norm of `Σ_A i_{X_A} ω_A - dE` at the point.
    pub residual: f64,
    pub rank: usize,
}

/// `Σ_A i_{X_A} ω_A - dE` at `point`, for numeric field values `x`.
pub fn evolution_defect_at(sys: &FieldSystem, x: &[Vec<f64>], point: &[f64]) -> Result<Vec<f64>, DynamicsError> {
    let chart = sys.chart();
    chart.check_point(point)?;
    let mut out: Vec<f64> = (0..chart.dim())
        .map(|c| crate::calculus::eval_on(chart, &sys.energy.expr().diff(c), point, "energy differential"))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .map(|v| -v)
        .collect();
    for (omega, xa) in sys.omegas.iter().zip(x) {
        for (key, w) in omega.values_at(point)? {
            let (i, j) = (key[0], key[1]);
            out[j] += w * xa[i];
            out[i] -= w * xa[j];
        }
    }
    Ok(out)
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Minimum-norm solution of `Σ_A i_{X_A} ω_A = dH` at a point.
pub fn solve_evolution_hamiltonian(sys: &FieldSystem, point: &[f64]) -> Result<EvolutionValue, DynamicsError> {
    sys.require(SystemKind::Hamiltonian)?;
    let chart = sys.chart();
    chart.check_point(point)?;
    let (dim, k) = (chart.dim(), sys.k());
    // column A*dim + c holds the coefficients of i_{∂c} ω_A
    let mut m = DMatrix::zeros(dim, k * dim);
    for (a, omega) in sys.omegas.iter().enumerate() {
        for (key, w) in omega.values_at(point)? {
            let (i, j) = (key[0], key[1]);
            m[(j, a * dim + i)] += w;
            m[(i, a * dim + j)] -= w;
        }
    }
    let rhs = DVector::from_iterator(
        dim,
        (0..dim)
            .map(|c| crate::calculus::eval_on(chart, &sys.energy.expr().diff(c), point, "dH"))
            .collect::<Result<Vec<_>, _>>()?,
    );
    let ls = min_norm_solve(&m, &rhs);
    if ls.residual > SOLVE_TOL {
        return Err(DynamicsError::Inconsistent { residual: ls.residual, point: point.to_vec() });
    }
    let components = (0..k).map(|a| ls.solution.rows(a * dim, dim).iter().copied().collect()).collect();
    Ok(EvolutionValue { components, residual: ls.residual, rank: ls.rank })
}

/// SOPDE value at a point: `(Γ_A)^{x_i} = v_A_i` and the second-order
/// components `second[A][B][j] = (Γ_A)^j_B` (0-based), symmetric in `A, B`.
#[derive(Debug, Clone, PartialEq)]
pub struct SopdeValue {
    pub second: Vec<Vec<Vec<f64>>>,
    pub components: Vec<Vec<f64>>,
    /// Max defect of the Euler–Lagrange system at the point.
    pub residual: f64,
    pub rank: usize,
}

/// Minimum-norm symmetric SOPDE solving the Euler–Lagrange system at a point.
/// The norm minimized is that of the full `n k²` array `(Γ_A)^j_B`.
pub fn solve_evolution_lagrangian(sys: &FieldSystem, point: &[f64]) -> Result<SopdeValue, DynamicsError> {
    sys.require(SystemKind::Lagrangian)?;
    let chart = sys.chart().clone();
    chart.check_point(point)?;
    let (n, k, dim) = (sys.n(), sys.k(), chart.dim());
    let hess = eval_matrix(&chart, &fibre_hessian(sys), point)?;
    let det = hess.determinant();
    if det.abs() <= REGULARITY_TOL {
        return Err(DynamicsError::SingularHessian { det, point: point.to_vec() });
    }
    let l = sys.function.expr();
    let fib = |a: usize, i: usize| chart.fiber_index(a + 1, i + 1);
    let h = |a: usize, i: usize, b: usize, j: usize| hess[(fib(a, i) - n, fib(b, j) - n)];

    // unknowns: pairs A <= B, then j
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (a..k).map(move |b| (a, b))).collect();
    let mut m = DMatrix::zeros(n, pairs.len() * n);
    let mut rhs = DVector::zeros(n);
    for i in 0..n {
        let mut r = crate::calculus::eval_on(&chart, &l.diff(i), point, "dL/dx")?;
        for a in 0..k {
            let dv = l.diff(fib(a, i));
            for j in 0..n {
                let mixed = crate::calculus::eval_on(&chart, &dv.diff(j), point, "mixed Hessian")?;
                r -= mixed * point[fib(a, j)];
            }
        }
        rhs[i] = r;
        for (p, &(a, b)) in pairs.iter().enumerate() {
            let weight = if a == b { 1.0 } else { 2.0f64.sqrt() };
            for j in 0..n {
                let coeff = if a == b { h(a, i, a, j) } else { h(a, i, b, j) + h(b, i, a, j) };
                m[(i, p * n + j)] = coeff / weight;
            }
        }
    }
    let ls = min_norm_solve(&m, &rhs);
    if ls.residual > SOLVE_TOL {
        return Err(DynamicsError::Inconsistent { residual: ls.residual, point: point.to_vec() });
    }
    let mut second = vec![vec![vec![0.0; n]; k]; k];
    for (p, &(a, b)) in pairs.iter().enumerate() {
        let weight = if a == b { 1.0 } else { 2.0f64.sqrt() };
        for (j, &raw) in ls.solution.rows(p * n, n).iter().enumerate() {
            let u = raw / weight;
            second[a][b][j] = u;
            second[b][a][j] = u;
        }
    }
    let mut components = vec![vec![0.0; dim]; k];
    for (a, comp) in components.iter_mut().enumerate() {
        for i in 0..n {
            comp[i] = point[fib(a, i)];
        }
        for b in 0..k {
            for j in 0..n {
                comp[fib(b, j)] = second[a][b][j];
            }
        }
    }
    Ok(SopdeValue { second, components, residual: ls.residual, rank: ls.rank })
}

/// Max over samples of the sup-norm of `Σ_A i_{X_A} ω_A - dE`.
pub fn verify_evolution(sys: &FieldSystem, x: &KVectorField, points: &[Vec<f64>]) -> Result<Residual, DynamicsError> {
    ensure_same(sys.chart(), x.chart())?;
    if x.k() != sys.k() {
        return Err(CalculusError::Arity { expected: sys.k(), found: x.k() }.into());
    }
    let mut defect = sys.energy.differential().scale(-1.0);
    for (xa, omega) in x.fields().iter().zip(&sys.omegas) {
        defect = defect.add(&interior_product(xa, omega)?)?;
    }
    Ok(defect.max_over(points)?)
}

/// Sup-norm of the pointwise defect for numeric field values.
pub fn evolution_residual_at(sys: &FieldSystem, x: &[Vec<f64>], point: &[f64]) -> Result<f64, DynamicsError> {
    Ok(sup(&evolution_defect_at(sys, x, point)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;
    use crate::sampling::SampleSpec;

    fn lag(n: usize, k: usize, src: &str) -> FieldSystem {
        build_system(SystemKind::Lagrangian, n, k, src, &BTreeMap::new()).unwrap()
    }

    fn ham(n: usize, k: usize, src: &str) -> FieldSystem {
        build_system(SystemKind::Hamiltonian, n, k, src, &BTreeMap::new()).unwrap()
    }

    fn field(chart: &Chart, comps: &[&str]) -> VectorField {
        VectorField::new(chart.clone(), comps.iter().map(|s| parse_expression(s, chart).unwrap()).collect()).unwrap()
    }

    #[test]
    fn string_forms() {
        let mut params = BTreeMap::new();
        params.insert("sigma".to_string(), 2.0);
        params.insert("tau".to_string(), 3.0);
        let sys =
            build_system(SystemKind::Lagrangian, 1, 2, "0.5*(sigma*v_1_1^2 - tau*v_2_1^2)", &params).unwrap();
        // (ω_L)_1 = σ dx ∧ dv_1, (ω_L)_2 = -τ dx ∧ dv_2
        assert_eq!(sys.omegas()[0].get(&[0, 1]).as_num(), Some(2.0));
        assert_eq!(sys.omegas()[1].get(&[0, 2]).as_num(), Some(-3.0));
        assert_eq!(sys.omegas()[0].components().len(), 1);
        let p = [0.3, -0.7, 0.4];
        assert!((sys.energy().value(&p).unwrap() - sys.function().value(&p).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn unknown_parameter() {
        let err = build_system(SystemKind::Lagrangian, 1, 1, "m*v_1_1^2", &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, DynamicsError::Parse(ParseError::UnknownIdentifier { .. })));
    }

    #[test]
    fn regularity() {
        let pts = SampleSpec::default().draw(3);
        let r = check_regularity(&lag(1, 2, "0.5*(v_1_1^2 - v_2_1^2)"), &pts).unwrap();
        assert!(r.regular && (r.min_abs_det - 1.0).abs() < 1e-14);
        assert!(!check_regularity(&lag(1, 2, "v_1_1"), &pts).unwrap().regular);
        assert!(matches!(
            check_regularity(&ham(1, 1, "p_1_1"), &pts),
            Err(DynamicsError::WrongKind { .. })
        ));
    }

    #[test]
    fn classical_hamiltonian() {
        let sys = ham(1, 1, "p_1_1");
        let x = solve_evolution_hamiltonian(&sys, &[0.2, 0.4]).unwrap();
        assert!((x.components[0][0] - 1.0).abs() < 1e-15 && x.components[0][1].abs() < 1e-15);
        let sys = ham(1, 1, "0.5*(p_1_1^2 + x_1^2)");
        let x = solve_evolution_hamiltonian(&sys, &[0.3, -0.5]).unwrap();
        assert!((x.components[0][0] + 0.5).abs() < 1e-15 && (x.components[0][1] + 0.3).abs() < 1e-15);
        assert_eq!(x.rank, 2);
    }

    #[test]
    fn hdw_min_norm_structure() {
        let sys = ham(2, 2, "0.5*(p_1_1^2 - p_2_2^2) + x_1*p_2_1 + x_2^3");
        for p in SampleSpec::new(16, 3, 1.0).draw(6) {
            let x = solve_evolution_hamiltonian(&sys, &p).unwrap();
            assert!(x.residual <= 1e-12);
            let chart = sys.chart();
            for a in 1..=2 {
                for i in 1..=2 {
                    let dh = sys.function().partial(chart.fiber_index(a, i)).value(&p).unwrap();
                    assert!((x.components[a - 1][i - 1] - dh).abs() < 1e-12);
                }
            }
            // min-norm spreads -dH/dx_i equally over the copies
            for i in 1..=2 {
                let dh = sys.function().partial(i - 1).value(&p).unwrap();
                for a in 1..=2 {
                    assert!((x.components[a - 1][chart.fiber_index(a, i)] + dh / 2.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn lagrangian_solver() {
        let free = lag(1, 2, "0.5*(v_1_1^2 + v_2_1^2)");
        let g = solve_evolution_lagrangian(&free, &[0.1, 0.5, -0.2]).unwrap();
        assert_eq!(g.components, vec![vec![0.5, 0.0, 0.0], vec![-0.2, 0.0, 0.0]]);
        let kg = lag(1, 2, "0.5*(v_1_1^2 + v_2_1^2) - 0.5*x_1^2");
        let p = [0.6, 0.5, -0.2];
        let g = solve_evolution_lagrangian(&kg, &p).unwrap();
        assert!((g.second[0][0][0] + 0.3).abs() < 1e-15 && (g.second[1][1][0] + 0.3).abs() < 1e-15);
        assert!(g.second[0][1][0].abs() < 1e-15);
        assert!(evolution_residual_at(&kg, &g.components, &p).unwrap() < 1e-14);
        assert!(matches!(
            solve_evolution_lagrangian(&lag(1, 1, "v_1_1 + x_1"), &[0.0, 0.0]),
            Err(DynamicsError::SingularHessian { .. })
        ));
    }

    #[test]
    fn string_sopde() {
        let sys = lag(1, 2, "0.5*(v_1_1^2 - v_2_1^2)");
        let c = sys.chart().clone();
        let xi = KVectorField::new(vec![
            field(&c, &["v_1_1", "v_1_1^2 + v_2_1^2", "2*v_1_1*v_2_1"]),
            field(&c, &["v_2_1", "2*v_1_1*v_2_1", "v_1_1^2 + v_2_1^2"]),
        ])
        .unwrap();
        let pts = SampleSpec::default().draw(3);
        assert!(verify_evolution(&sys, &xi, &pts).unwrap().max <= 1e-12);
        let zero = KVectorField::zero(c.clone(), 2).unwrap();
        let konst = lag(1, 2, "3");
        assert_eq!(verify_evolution(&konst, &zero, &pts).unwrap().max, 0.0);
    }
}
