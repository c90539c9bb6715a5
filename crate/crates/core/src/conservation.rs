//! Conservation laws `Φ = (Φ_1, ..., Φ_k)` of k-vector fields: constructors
//! from symmetry data and from Cartan symmetries, and pointwise verification
//! of `Σ_A X_A(Φ_A) = 0`.

use std::fmt;

use thiserror::Error;

use crate::calculus::{
    interior_product, lie_derivative_form, potential_of_exact_one_form, CalculusError, PForm, Potential,
    ScalarField, VectorField,
};
use crate::chart::{ensure_same, Chart, ChartError};
use crate::dynamics::{FieldSystem, KVectorField};
use crate::expr::Expr;
use crate::residual::Residual;
use crate::symmetry::{is_cartan_symmetry, SymmetryError, SymmetryVerdict};

/// Step of the central differences applied to quadrature-backed components.
pub const FD_STEP: f64 = 1e-6;
/// `L_Y θ_A` below this sup-norm at every sample is treated as zero.
pub const VANISHING_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConservationError {
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error("not a Cartan symmetry: residual {max_residual:e} at {witness:?}")]
    NotCartan { max_residual: f64, witness: Vec<f64> },
    #[error("form {index} has degree {found}, expected {expected}")]
    Degree { index: usize, expected: usize, found: usize },
    #[error("expected {expected} components, got {found}")]
    TupleLength { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    BracketLaw,
    Noether,
    User,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::BracketLaw => "bracket-law",
            Provenance::Noether => "noether",
            Provenance::User => "user",
        })
    }
}

/// One component `Φ_A`: a symbolic field, or `θ_A(Y) - f_A` with `f_A`
/// evaluated by quadrature.
#[derive(Debug, Clone, PartialEq)]
pub enum LawComponent {
    Symbolic(ScalarField),
    Quadrature { theta_y: ScalarField, potential: Potential },
}

impl LawComponent {
    pub fn value(&self, p: &[f64]) -> Result<f64, CalculusError> {
        match self {
            LawComponent::Symbolic(f) => f.value(p),
            LawComponent::Quadrature { theta_y, potential } => Ok(theta_y.value(p)? - potential.value(p)?),
        }
    }

    /// `X(Φ_A)` at `p`.
    pub fn derivative_along(&self, x: &VectorField, p: &[f64]) -> Result<f64, CalculusError> {
        match self {
            LawComponent::Symbolic(f) => x.apply_scalar(f)?.value(p),
            LawComponent::Quadrature { theta_y, potential } => {
                let exact = x.apply_scalar(theta_y)?.value(p)?;
                let dir = x.at(p)?;
                let shifted = |s: f64| -> Vec<f64> { p.iter().zip(&dir).map(|(a, d)| a + s * d).collect() };
                let fd = (potential.value(&shifted(FD_STEP))? - potential.value(&shifted(-FD_STEP))?)
                    / (2.0 * FD_STEP);
                Ok(exact - fd)
            }
        }
    }

    /// `dΦ_A` at `p` as a dense covector.
    pub fn gradient(&self, p: &[f64]) -> Result<Vec<f64>, CalculusError> {
        let exact = |f: &ScalarField| -> Result<Vec<f64>, CalculusError> {
            (0..p.len()).map(|c| f.partial(c).value(p)).collect()
        };
        match self {
            LawComponent::Symbolic(f) => exact(f),
            LawComponent::Quadrature { theta_y, potential } => {
                let g = potential.gradient_fd(p, FD_STEP)?;
                Ok(exact(theta_y)?.iter().zip(g).map(|(a, b)| a - b).collect())
            }
        }
    }

    pub fn as_symbolic(&self) -> Option<&ScalarField> {
        match self {
            LawComponent::Symbolic(f) => Some(f),
            LawComponent::Quadrature { .. } => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            LawComponent::Symbolic(f) => f.source(),
            LawComponent::Quadrature { theta_y, potential } => {
                format!("{} - \u{222b}({})", theta_y.source(), potential.form().describe())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConservationLaw {
    chart: Chart,
    components: Vec<LawComponent>,
    provenance: Provenance,
    ingredients: Vec<String>,
}

impl ConservationLaw {
    /// A law given by explicit component expressions on `chart`.
    pub fn user(chart: Chart, components: Vec<Expr>) -> Result<Self, ConservationError> {
        let components = components
            .into_iter()
            .map(|e| Ok(LawComponent::Symbolic(ScalarField::new(chart.clone(), e)?)))
            .collect::<Result<_, CalculusError>>()?;
        Ok(ConservationLaw { chart, components, provenance: Provenance::User, ingredients: Vec::new() })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[LawComponent] {
        &self.components
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn ingredients(&self) -> &[String] {
        &self.ingredients
    }

    pub fn values(&self, p: &[f64]) -> Result<Vec<f64>, CalculusError> {
        self.components.iter().map(|c| c.value(p)).collect()
    }

    /// Symbolic components, when every component is symbolic.
    pub fn symbolic(&self) -> Option<Vec<&ScalarField>> {
        self.components.iter().map(LawComponent::as_symbolic).collect()
    }

    pub fn is_identically_zero(&self) -> bool {
        self.components.iter().all(|c| c.as_symbolic().is_some_and(|f| f.expr().is_zero()))
    }
}

/// `Φ_A = ω_A(S_1, ..., S_{p-1}, Y)`.
pub fn build_bracket_law(
    omegas: &[PForm],
    s: &[VectorField],
    y: &VectorField,
) -> Result<ConservationLaw, ConservationError> {
    let chart = y.chart().clone();
    let degree = s.len() + 1;
    let mut args: Vec<&VectorField> = s.iter().collect();
    args.push(y);
    let mut components = Vec::with_capacity(omegas.len());
    for (index, w) in omegas.iter().enumerate() {
        ensure_same(&chart, w.chart())?;
        if w.degree() != degree {
            return Err(ConservationError::Degree { index: index + 1, expected: degree, found: w.degree() });
        }
        components.push(LawComponent::Symbolic(w.contract(&args)?));
    }
    let mut ingredients: Vec<String> = s.iter().map(|f| format!("S = {}", f.describe())).collect();
    ingredients.push(format!("Y = {}", y.describe()));
    Ok(ConservationLaw { chart, components, provenance: Provenance::BracketLaw, ingredients })
}

/// Noether momenta `Φ_A = θ_A(Y) - f_A` with `df_A = L_Y θ_A` and
/// `f_A(base) = 0`. `Y` must pass the Cartan check at `tolerance` on `points`.
pub fn build_noether_law(
    sys: &FieldSystem,
    y: &VectorField,
    base_point: &[f64],
    points: &[Vec<f64>],
    tolerance: f64,
) -> Result<ConservationLaw, ConservationError> {
    let cartan = is_cartan_symmetry(sys, y, points, tolerance)?;
    if !cartan.holds {
        return Err(ConservationError::NotCartan { max_residual: cartan.max_residual, witness: cartan.witness });
    }
    let chart = sys.chart().clone();
    let mut components = Vec::with_capacity(sys.k());
    for theta in sys.thetas() {
        let theta_y = theta.contract(&[y])?;
        let lie = lie_derivative_form(y, theta)?;
        if lie.max_over(points)?.max <= VANISHING_TOL {
            components.push(LawComponent::Symbolic(theta_y));
        } else {
            let potential = potential_of_exact_one_form(&lie, base_point, points)?;
            components.push(LawComponent::Quadrature { theta_y, potential });
        }
    }
    let ingredients = vec![format!("Y = {}", y.describe()), format!("base = {base_point:?}")];
    Ok(ConservationLaw { chart, components, provenance: Provenance::Noether, ingredients })
}

/// `max |Σ_A X_A(Φ_A)|` over the samples.
pub fn verify_law_pointwise(
    x: &KVectorField,
    law: &ConservationLaw,
    points: &[Vec<f64>],
) -> Result<Residual, ConservationError> {
    ensure_same(x.chart(), law.chart())?;
    if x.k() != law.k() {
        return Err(ConservationError::TupleLength { expected: x.k(), found: law.k() });
    }
    Ok(Residual::over(points, |p| {
        let mut total = 0.0;
        for (xa, phi) in x.fields().iter().zip(law.components()) {
            total += phi.derivative_along(xa, p)?;
        }
        Ok::<_, CalculusError>(total.abs())
    })?)
}

/// Outcome of testing whether a law comes from a single Cartan symmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumConverse {
    /// `max |i_Y ω_A - dΦ_A|`.
    pub exactness: Residual,
    /// `max |Σ_A X_A(Φ_A)|`.
    pub conserved: Residual,
    pub cartan: SymmetryVerdict,
    pub tolerance: f64,
}

impl MomentumConverse {
    pub fn exactness_holds(&self) -> bool {
        self.exactness.within(self.tolerance)
    }

    pub fn conserved_holds(&self) -> bool {
        self.conserved.within(self.tolerance)
    }

    /// All three checks pass.
    pub fn noether_induced(&self) -> bool {
        self.exactness_holds() && self.conserved_holds() && self.cartan.holds
    }

    /// Given exactness, conservation holds exactly when `Y` is Cartan.
    pub fn biconditional_consistent(&self) -> bool {
        !self.exactness_holds() || self.conserved_holds() == self.cartan.holds
    }
}

pub fn check_momentum_converse(
    sys: &FieldSystem,
    y: &VectorField,
    law: &ConservationLaw,
    x: &KVectorField,
    points: &[Vec<f64>],
    tolerance: f64,
) -> Result<MomentumConverse, ConservationError> {
    ensure_same(sys.chart(), law.chart())?;
    if law.k() != sys.k() {
        return Err(ConservationError::TupleLength { expected: sys.k(), found: law.k() });
    }
    let contractions: Vec<PForm> =
        sys.omegas().iter().map(|w| interior_product(y, w)).collect::<Result<_, _>>()?;
    let exactness = Residual::over(points, |p| {
        let mut worst: f64 = 0.0;
        for (form, phi) in contractions.iter().zip(law.components()) {
            let mut dense = phi.gradient(p)?;
            dense.iter_mut().for_each(|g| *g = -*g);
            for (key, v) in form.values_at(p)? {
                dense[key[0]] += v;
            }
            worst = dense.iter().fold(worst, |m, d| m.max(d.abs()));
        }
        Ok::<_, CalculusError>(worst)
    })?;
    let conserved = verify_law_pointwise(x, law, points)?;
    let cartan = is_cartan_symmetry(sys, y, points, tolerance)?;
    Ok(MomentumConverse { exactness, conserved, cartan, tolerance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::ChartSpace;
    use crate::dynamics::{build_system, SystemKind};
    use crate::expr::parse_expression;
    use crate::sampling::SampleSpec;
    use std::collections::BTreeMap;

    fn field(chart: &Chart, comps: &[&str]) -> VectorField {
        VectorField::new(chart.clone(), comps.iter().map(|s| parse_expression(s, chart).unwrap()).collect()).unwrap()
    }

    fn exprs(chart: &Chart, srcs: &[&str]) -> Vec<Expr> {
        srcs.iter().map(|s| parse_expression(s, chart).unwrap()).collect()
    }

    fn string() -> (FieldSystem, KVectorField) {
        let sys = build_system(SystemKind::Lagrangian, 1, 2, "0.5*(v_1_1^2 - v_2_1^2)", &BTreeMap::new()).unwrap();
        let c = sys.chart().clone();
        let xi = KVectorField::new(vec![
            field(&c, &["v_1_1", "v_1_1^2 + v_2_1^2", "2*v_1_1*v_2_1"]),
            field(&c, &["v_2_1", "2*v_1_1*v_2_1", "v_1_1^2 + v_2_1^2"]),
        ])
        .unwrap();
        (sys, xi)
    }

    #[test]
    fn free_particle_bracket_law() {
        let c = ChartSpace::k_tangent(1, 2).unwrap();
        let omegas: Vec<PForm> = (1..=2)
            .map(|a| PForm::from_components(c.clone(), 2, [(vec![0, a], Expr::ONE)]).unwrap())
            .collect();
        let delta = field(&c, &["0", "v_1_1", "v_2_1"]);
        let ddx = field(&c, &["1", "0", "0"]);
        let law = build_bracket_law(&omegas, &[delta], &ddx).unwrap();
        let p = [0.2, -0.4, 0.9];
        assert_eq!(law.values(&p).unwrap(), vec![0.4, -0.9]);
        assert_eq!(law.provenance(), Provenance::BracketLaw);
        let degenerate = build_bracket_law(&omegas, std::slice::from_ref(&ddx), &ddx).unwrap();
        assert!(degenerate.is_identically_zero());
        assert!(matches!(build_bracket_law(&omegas, &[], &ddx), Err(ConservationError::Degree { .. })));
    }

    #[test]
    fn string_conservation_and_negative_control() {
        let (sys, xi) = string();
        let c = sys.chart().clone();
        let pts = SampleSpec::default().draw(3);
        let quadratic = ConservationLaw::user(c.clone(), exprs(&c, &["-2*v_1_1*v_2_1", "v_1_1^2 + v_2_1^2"])).unwrap();
        assert!(verify_law_pointwise(&xi, &quadratic, &pts).unwrap().max <= 1e-12);
        let h = sys.energy().expr().clone();
        let energy_tuple = ConservationLaw::user(c.clone(), vec![h.clone(), h]).unwrap();
        assert!(verify_law_pointwise(&xi, &energy_tuple, &pts).unwrap().max > 0.1);
        let konst = ConservationLaw::user(c.clone(), exprs(&c, &["3", "-1"])).unwrap();
        assert_eq!(verify_law_pointwise(&xi, &konst, &pts).unwrap().max, 0.0);
    }

    #[test]
    fn string_noether_and_converse() {
        let (sys, xi) = string();
        let c = sys.chart().clone();
        let pts = SampleSpec::default().draw(3);
        let ddx = field(&c, &["1", "0", "0"]);
        let law = build_noether_law(&sys, &ddx, &[0.0; 3], &pts, 1e-10).unwrap();
        let p = [0.1, 0.7, -0.3];
        assert_eq!(law.values(&p).unwrap(), vec![0.7, 0.3]);
        let mc = check_momentum_converse(&sys, &ddx, &law, &xi, &pts, 1e-9).unwrap();
        assert!(mc.noether_induced() && mc.biconditional_consistent());

        let quadratic = ConservationLaw::user(c.clone(), exprs(&c, &["-2*v_1_1*v_2_1", "v_1_1^2 + v_2_1^2"])).unwrap();
        let ansatze = [ddx.clone(), field(&c, &["0", "v_1_1", "v_2_1"]), xi.fields()[0].clone(), xi.fields()[1].clone()];
        for y in &ansatze {
            let mc = check_momentum_converse(&sys, y, &quadratic, &xi, &pts, 1e-9).unwrap();
            assert!(!mc.exactness_holds() && !mc.noether_induced());
            assert!(mc.conserved_holds());
        }
        let liouville = field(&c, &["0", "v_1_1", "v_2_1"]);
        assert!(matches!(
            build_noether_law(&sys, &liouville, &[0.0; 3], &pts, 1e-8),
            Err(ConservationError::NotCartan { .. })
        ));
    }

    #[test]
    fn oscillator_energy_by_quadrature() {
        let sys = build_system(SystemKind::Hamiltonian, 1, 1, "0.5*(p_1_1^2 + x_1^2)", &BTreeMap::new()).unwrap();
        let c = sys.chart().clone();
        let xh = field(&c, &["p_1_1", "-x_1"]);
        let pts = SampleSpec::default().draw(2);
        let law = build_noether_law(&sys, &xh, &[0.0, 0.0], &pts, 1e-10).unwrap();
        assert!(matches!(law.components()[0], LawComponent::Quadrature { .. }));
        for p in &pts {
            let h = sys.function().value(p).unwrap();
            assert!((law.values(p).unwrap()[0] - h).abs() < 1e-12);
        }
        let x = KVectorField::new(vec![xh.clone()]).unwrap();
        assert!(verify_law_pointwise(&x, &law, &pts).unwrap().max < 1e-8);
        let mc = check_momentum_converse(&sys, &xh, &law, &x, &pts, 1e-8).unwrap();
        assert!(mc.noether_induced());
    }
}
