//! Exterior calculus in a single global chart.
//!
//! Forms are stored sparsely, keyed by strictly increasing index tuples
//! `i_1 < ... < i_p`. Sign bookkeeping for unsorted tuples happens once, on
//! insertion.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::chart::{ensure_same, Chart, ChartError};
use crate::expr::{DomainError, Expr};
use crate::quadrature::gauss_legendre_64;
use crate::residual::Residual;

/// Closedness threshold for `potential_of_exact_one_form`.
pub const CLOSEDNESS_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CalculusError {
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error("expected {expected} components, got {found}")]
    Arity { expected: usize, found: usize },
    #[error("coordinate index {index} outside chart of dimension {dim}")]
    CoordinateOutOfRange { index: usize, dim: usize },
    #[error("exterior derivative of a {degree}-form on a {dim}-dimensional chart")]
    DegreeOverflow { degree: usize, dim: usize },
    #[error("interior product of a 0-form")]
    ZeroDegree,
    #[error("{context}: {kind:?} in `{subexpr}` at {point:?}")]
    Domain { context: String, kind: crate::expr::eval::DomainKind, subexpr: String, point: Vec<f64> },
    #[error("1-form is not closed: |dα| = {max_residual:e} at {witness:?}")]
    NotClosed { max_residual: f64, witness: Vec<f64> },
}

impl CalculusError {
    pub(crate) fn domain(chart: &Chart, context: &str, err: DomainError, point: &[f64]) -> Self {
        CalculusError::Domain {
            context: context.to_string(),
            kind: err.kind,
            subexpr: err.subexpr.to_source(chart),
            point: point.to_vec(),
        }
    }
}

fn check_vars(chart: &Chart, e: &Expr) -> Result<(), CalculusError> {
    match e.max_var() {
        Some(i) if i >= chart.dim() => Err(CalculusError::CoordinateOutOfRange { index: i, dim: chart.dim() }),
        _ => Ok(()),
    }
}

/// Evaluate with chart-aware error reporting.
pub(crate) fn eval_on(chart: &Chart, e: &Expr, point: &[f64], context: &str) -> Result<f64, CalculusError> {
    e.eval(point).map_err(|err| CalculusError::domain(chart, context, err, point))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    chart: Chart,
    expr: Expr,
}

impl ScalarField {
    pub fn new(chart: Chart, expr: Expr) -> Result<Self, CalculusError> {
        check_vars(&chart, &expr)?;
        Ok(ScalarField { chart, expr })
    }

    pub fn constant(chart: Chart, value: f64) -> Self {
        ScalarField { chart, expr: Expr::Num(value) }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn value(&self, point: &[f64]) -> Result<f64, CalculusError> {
        self.chart.check_point(point)?;
        eval_on(&self.chart, &self.expr, point, "scalar field")
    }

    pub fn partial(&self, index: usize) -> ScalarField {
        ScalarField { chart: self.chart.clone(), expr: self.expr.diff(index) }
    }

    /// `df` as a 1-form.
    pub fn differential(&self) -> PForm {
        let comps = (0..self.chart.dim()).map(|i| (vec![i], self.expr.diff(i)));
        PForm::from_sorted(self.chart.clone(), 1, comps)
    }

    pub fn to_form(&self) -> PForm {
        PForm::from_sorted(self.chart.clone(), 0, [(Vec::new(), self.expr.clone())])
    }

    pub fn source(&self) -> String {
        self.expr.to_source(&self.chart)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    chart: Chart,
    components: Vec<Expr>,
}

impl VectorField {
    pub fn new(chart: Chart, components: Vec<Expr>) -> Result<Self, CalculusError> {
        if components.len() != chart.dim() {
            return Err(CalculusError::Arity { expected: chart.dim(), found: components.len() });
        }
        for c in &components {
            check_vars(&chart, c)?;
        }
        Ok(VectorField { chart, components })
    }

    pub fn zero(chart: Chart) -> Self {
        let components = vec![Expr::ZERO; chart.dim()];
        VectorField { chart, components }
    }

    /// The coordinate field `∂/∂(coordinate index)`.
    pub fn coordinate(chart: Chart, index: usize) -> Self {
        let mut v = VectorField::zero(chart);
        v.components[index] = Expr::ONE;
        v
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn component(&self, index: usize) -> &Expr {
        &self.components[index]
    }

    /// `X(f) = X^i ∂f/∂x^i`, simplified.
    pub fn apply(&self, f: &Expr) -> Expr {
        Expr::sum(
            self.components
                .iter()
                .enumerate()
                .filter(|(i, c)| !c.is_zero() && f.depends_on(*i))
                .map(|(i, c)| c.clone() * f.diff(i)),
        )
    }

    pub fn apply_scalar(&self, f: &ScalarField) -> Result<ScalarField, CalculusError> {
        ensure_same(&self.chart, &f.chart)?;
        Ok(ScalarField { chart: self.chart.clone(), expr: self.apply(&f.expr) })
    }

    pub fn at(&self, point: &[f64]) -> Result<Vec<f64>, CalculusError> {
        self.chart.check_point(point)?;
        self.components.iter().map(|c| eval_on(&self.chart, c, point, "vector field")).collect()
    }

    pub fn scale(&self, factor: f64) -> VectorField {
        self.map(|c| (factor * c.clone()).simplify())
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> VectorField {
        VectorField { chart: self.chart.clone(), components: self.components.iter().map(f).collect() }
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField, CalculusError> {
        ensure_same(&self.chart, &other.chart)?;
        let components =
            self.components.iter().zip(&other.components).map(|(a, b)| (a.clone() + b.clone()).simplify()).collect();
        Ok(VectorField { chart: self.chart.clone(), components })
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField, CalculusError> {
        self.add(&other.scale(-1.0))
    }

    /// Sum of `f * X` for scalar expressions `f`.
    pub fn scaled_by(&self, f: &Expr) -> VectorField {
        self.map(|c| (f.clone() * c.clone()).simplify())
    }

    pub fn is_identically_zero(&self) -> bool {
        self.components.iter().all(Expr::is_zero)
    }

    pub fn describe(&self) -> String {
        let terms: Vec<String> = self
            .components
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("({})*d/d{}", c.to_source(&self.chart), self.chart.name(i)))
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

/// Lie bracket `[X, Y]^j = X(Y^j) - Y(X^j)`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField, CalculusError> {
    ensure_same(&x.chart, &y.chart)?;
    let components =
        (0..x.chart.dim()).map(|j| (x.apply(&y.components[j]) - y.apply(&x.components[j])).simplify()).collect();
    Ok(VectorField { chart: x.chart.clone(), components })
}

/// Sort `indices` in place and return the permutation sign, or `None` if an
/// index repeats.
fn sort_with_sign(indices: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    for i in 1..indices.len() {
        let mut j = i;
        while j > 0 && indices[j - 1] > indices[j] {
            indices.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if indices.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

/// All permutations of `0..p` with their signs.
fn permutations(p: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, sign: f64, out: &mut Vec<(Vec<usize>, f64)>) {
        if rest.is_empty() {
            out.push((prefix.clone(), sign));
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            prefix.push(v);
            // moving element i to the front of `rest` costs i transpositions
            rec(prefix, rest, if i % 2 == 0 { sign } else { -sign }, out);
            prefix.pop();
            rest.insert(i, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..p).collect(), 1.0, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct PForm {
    chart: Chart,
    degree: usize,
    components: BTreeMap<Vec<usize>, Expr>,
}

impl PForm {
    pub fn zero(chart: Chart, degree: usize) -> Self {
        PForm { chart, degree, components: BTreeMap::new() }
    }

    /// Build from possibly unsorted index tuples; repeated indices vanish and
    /// contributions to the same sorted key accumulate.
    pub fn from_components<I>(chart: Chart, degree: usize, comps: I) -> Result<Self, CalculusError>
    where
        I: IntoIterator<Item = (Vec<usize>, Expr)>,
    {
        let mut form = PForm::zero(chart, degree);
        for (mut key, e) in comps {
            if key.len() != degree {
                return Err(CalculusError::Arity { expected: degree, found: key.len() });
            }
            if let Some(&i) = key.iter().find(|&&i| i >= form.chart.dim()) {
                return Err(CalculusError::CoordinateOutOfRange { index: i, dim: form.chart.dim() });
            }
            check_vars(&form.chart, &e)?;
            if let Some(sign) = sort_with_sign(&mut key) {
                form.accumulate(key, if sign < 0.0 { -e } else { e });
            }
        }
        Ok(form)
    }

    fn from_sorted<I>(chart: Chart, degree: usize, comps: I) -> Self
    where
        I: IntoIterator<Item = (Vec<usize>, Expr)>,
    {
        let mut form = PForm::zero(chart, degree);
        for (key, e) in comps {
            form.accumulate(key, e);
        }
        form
    }

    fn accumulate(&mut self, key: Vec<usize>, e: Expr) {
        let entry = self.components.remove(&key).unwrap_or(Expr::ZERO);
        let total = (entry + e).simplify();
        if !total.is_zero() {
            self.components.insert(key, total);
        }
    }

    /// `dx^i` for coordinate index `i`.
    pub fn coordinate_one_form(chart: Chart, index: usize) -> Self {
        PForm::from_sorted(chart, 1, [(vec![index], Expr::ONE)])
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> &BTreeMap<Vec<usize>, Expr> {
        &self.components
    }

    /// Component on a sorted key (zero when absent).
    pub fn get(&self, key: &[usize]) -> Expr {
        self.components.get(key).cloned().unwrap_or(Expr::ZERO)
    }

    pub fn is_identically_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn scale(&self, factor: f64) -> PForm {
        PForm::from_sorted(
            self.chart.clone(),
            self.degree,
            self.components.iter().map(|(k, e)| (k.clone(), factor * e.clone())),
        )
    }

    pub fn add(&self, other: &PForm) -> Result<PForm, CalculusError> {
        ensure_same(&self.chart, &other.chart)?;
        if self.degree != other.degree {
            return Err(CalculusError::Arity { expected: self.degree, found: other.degree });
        }
        let mut out = self.clone();
        for (k, e) in &other.components {
            out.accumulate(k.clone(), e.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PForm) -> Result<PForm, CalculusError> {
        self.add(&other.scale(-1.0))
    }

    pub fn wedge(&self, other: &PForm) -> Result<PForm, CalculusError> {
        ensure_same(&self.chart, &other.chart)?;
        let mut comps = Vec::new();
        for (ka, ea) in &self.components {
            for (kb, eb) in &other.components {
                let mut key = ka.clone();
                key.extend_from_slice(kb);
                comps.push((key, ea.clone() * eb.clone()));
            }
        }
        PForm::from_components(self.chart.clone(), self.degree + other.degree, comps)
    }

    /// Component values at a point, keyed like `components()`.
    pub fn values_at(&self, point: &[f64]) -> Result<Vec<(Vec<usize>, f64)>, CalculusError> {
        self.chart.check_point(point)?;
        self.components
            .iter()
            .map(|(k, e)| Ok((k.clone(), eval_on(&self.chart, e, point, "form component")?)))
            .collect()
    }

    /// `max |ω_I(point)|` over stored components.
    pub fn sup_norm_at(&self, point: &[f64]) -> Result<f64, CalculusError> {
        Ok(self.values_at(point)?.into_iter().fold(0.0, |m, (_, v)| m.max(v.abs())))
    }

    pub fn max_over(&self, points: &[Vec<f64>]) -> Result<Residual, CalculusError> {
        Residual::over(points, |p| self.sup_norm_at(p))
    }

    /// Multilinear evaluation `ω(v_1, ..., v_p)` on tangent vectors at `point`.
    pub fn eval_on_vectors(&self, point: &[f64], vectors: &[Vec<f64>]) -> Result<f64, CalculusError> {
        if vectors.len() != self.degree {
            return Err(CalculusError::Arity { expected: self.degree, found: vectors.len() });
        }
        let perms = permutations(self.degree);
        let mut total = 0.0;
        for (key, value) in self.values_at(point)? {
            let det: f64 = perms
                .iter()
                .map(|(perm, sign)| sign * perm.iter().enumerate().map(|(r, &s)| vectors[r][key[s]]).product::<f64>())
                .sum();
            total += value * det;
        }
        Ok(total)
    }

    /// Symbolic contraction `ω(V_1, ..., V_p)`.
    pub fn contract(&self, fields: &[&VectorField]) -> Result<ScalarField, CalculusError> {
        if fields.len() != self.degree {
            return Err(CalculusError::Arity { expected: self.degree, found: fields.len() });
        }
        for f in fields {
            ensure_same(&self.chart, f.chart())?;
        }
        let perms = permutations(self.degree);
        let mut terms = Vec::new();
        for (key, value) in &self.components {
            for (perm, sign) in &perms {
                let mut term = Expr::Num(*sign) * value.clone();
                for (r, &s) in perm.iter().enumerate() {
                    term = term * fields[r].component(key[s]).clone();
                }
                let term = term.simplify();
                if !term.is_zero() {
                    terms.push(term);
                }
            }
        }
        ScalarField::new(self.chart.clone(), Expr::sum(terms))
    }

    pub fn describe(&self) -> String {
        if self.components.is_empty() {
            return "0".into();
        }
        self.components
            .iter()
            .map(|(k, e)| {
                let basis: Vec<String> = k.iter().map(|&i| format!("d{}", self.chart.name(i))).collect();
                if basis.is_empty() {
                    e.to_source(&self.chart)
                } else {
                    format!("({})*{}", e.to_source(&self.chart), basis.join("^"))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// `dω`, defined for `p < N`.
pub fn exterior_derivative(omega: &PForm) -> Result<PForm, CalculusError> {
    let dim = omega.chart.dim();
    if omega.degree >= dim {
        return Err(CalculusError::DegreeOverflow { degree: omega.degree, dim });
    }
    let mut out = PForm::zero(omega.chart.clone(), omega.degree + 1);
    for (key, e) in &omega.components {
        for j in 0..dim {
            if key.contains(&j) || !e.depends_on(j) {
                continue;
            }
            let r = key.iter().filter(|&&i| i < j).count();
            let mut new_key = key.clone();
            new_key.insert(r, j);
            let d = e.diff(j);
            out.accumulate(new_key, if r % 2 == 0 { d } else { -d });
        }
    }
    Ok(out)
}

/// `i_X ω`, defined for `p >= 1`.
pub fn interior_product(x: &VectorField, omega: &PForm) -> Result<PForm, CalculusError> {
    ensure_same(&x.chart, &omega.chart)?;
    if omega.degree == 0 {
        return Err(CalculusError::ZeroDegree);
    }
    let mut out = PForm::zero(omega.chart.clone(), omega.degree - 1);
    for (key, e) in &omega.components {
        for (r, &i) in key.iter().enumerate() {
            let coeff = &x.components[i];
            if coeff.is_zero() {
                continue;
            }
            let mut new_key = key.clone();
            new_key.remove(r);
            let term = coeff.clone() * e.clone();
            out.accumulate(new_key, if r % 2 == 0 { term } else { -term });
        }
    }
    Ok(out)
}

/// `L_X ω` by Cartan's formula `i_X dω + d i_X ω`; `X(f)` for 0-forms.
pub fn lie_derivative_form(x: &VectorField, omega: &PForm) -> Result<PForm, CalculusError> {
    ensure_same(&x.chart, &omega.chart)?;
    if omega.degree == 0 {
        let f = omega.get(&[]);
        return Ok(PForm::from_sorted(omega.chart.clone(), 0, [(Vec::new(), x.apply(&f))]));
    }
    let homotopy = exterior_derivative(&interior_product(x, omega)?)?;
    if omega.degree == omega.chart.dim() {
        // dω = 0 for top-degree forms
        return Ok(homotopy);
    }
    interior_product(x, &exterior_derivative(omega)?)?.add(&homotopy)
}

/// Numerical closedness test on a 1-form.
pub fn closedness_residual(alpha: &PForm, points: &[Vec<f64>]) -> Result<Residual, CalculusError> {
    if alpha.chart.dim() == 1 {
        return Ok(Residual { max: 0.0, witness: points.first().cloned().unwrap_or_default() });
    }
    exterior_derivative(alpha)?.max_over(points)
}

/// A potential `g` of a closed 1-form, `dg = α`, normalized by `g(base) = 0`
/// and evaluated by a radial line integral with the 64-point Gauss–Legendre
/// rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    alpha: PForm,
    base: Vec<f64>,
}

impl Potential {
    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn form(&self) -> &PForm {
        &self.alpha
    }

    pub fn value(&self, q: &[f64]) -> Result<f64, CalculusError> {
        let chart = &self.alpha.chart;
        chart.check_point(q)?;
        let disp: Vec<f64> = q.iter().zip(&self.base).map(|(a, b)| a - b).collect();
        if disp.iter().all(|&d| d == 0.0) {
            return Ok(0.0);
        }
        let mut point = vec![0.0; q.len()];
        let mut total = 0.0;
        for &(t, w) in gauss_legendre_64() {
            for (i, p) in point.iter_mut().enumerate() {
                *p = self.base[i] + t * disp[i];
            }
            let mut pairing = 0.0;
            for (key, e) in &self.alpha.components {
                pairing += eval_on(chart, e, &point, "potential integrand")? * disp[key[0]];
            }
            total += w * pairing;
        }
        Ok(total)
    }

    /// Central-difference gradient with step `h`.
    pub fn gradient_fd(&self, q: &[f64], h: f64) -> Result<Vec<f64>, CalculusError> {
        let mut grad = Vec::with_capacity(q.len());
        let mut probe = q.to_vec();
        for i in 0..q.len() {
            probe[i] = q[i] + h;
            let plus = self.value(&probe)?;
            probe[i] = q[i] - h;
            let minus = self.value(&probe)?;
            probe[i] = q[i];
            grad.push((plus - minus) / (2.0 * h));
        }
        Ok(grad)
    }
}

/// Poincaré-lemma potential of a closed 1-form. Closedness is checked at
/// `samples` with tolerance [`CLOSEDNESS_TOL`].
pub fn potential_of_exact_one_form(
    alpha: &PForm,
    base_point: &[f64],
    samples: &[Vec<f64>],
) -> Result<Potential, CalculusError> {
    if alpha.degree != 1 {
        return Err(CalculusError::Arity { expected: 1, found: alpha.degree });
    }
    alpha.chart.check_point(base_point)?;
    let closed = closedness_residual(alpha, samples)?;
    if closed.max > CLOSEDNESS_TOL {
        return Err(CalculusError::NotClosed { max_residual: closed.max, witness: closed.witness });
    }
    for e in alpha.components.values() {
        eval_on(&alpha.chart, e, base_point, "potential base point")?;
    }
    Ok(Potential { alpha: alpha.clone(), base: base_point.to_vec() })
}
