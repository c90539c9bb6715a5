use thiserror::Error;

use super::{Expr, Func};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    SqrtOfNegative,
    LogOfNonPositive,
    DivisionByZero,
    NonFinite,
}

/// Evaluation left the real domain of an operation. `subexpr` is the node
/// whose evaluation failed; render it with the owning chart for a readable
/// message.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("domain error ({kind:?}) evaluating {subexpr:?}")]
pub struct DomainError {
    pub kind: DomainKind,
    pub subexpr: Box<Expr>,
}

fn fail(kind: DomainKind, e: &Expr) -> DomainError {
    DomainError { kind, subexpr: Box::new(e.clone()) }
}

impl Expr {
    /// Evaluate at `point` (indexed like the chart). Coordinates past the end
    /// of `point` panic; callers validate dimensions at the field level.
    pub fn eval(&self, point: &[f64]) -> Result<f64, DomainError> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => point[*i],
            Expr::Neg(a) => -a.eval(point)?,
            Expr::Add(a, b) => a.eval(point)? + b.eval(point)?,
            Expr::Sub(a, b) => a.eval(point)? - b.eval(point)?,
            Expr::Mul(a, b) => a.eval(point)? * b.eval(point)?,
            Expr::Div(a, b) => {
                let num = a.eval(point)?;
                let den = b.eval(point)?;
                if den == 0.0 {
                    return Err(fail(DomainKind::DivisionByZero, self));
                }
                num / den
            }
            Expr::Pow(a, n) => {
                let base = a.eval(point)?;
                if base == 0.0 && *n < 0 {
                    return Err(fail(DomainKind::DivisionByZero, self));
                }
                base.powi(*n)
            }
            Expr::Call(func, a) => {
                let x = a.eval(point)?;
                match func {
                    Func::Sqrt if x < 0.0 => return Err(fail(DomainKind::SqrtOfNegative, self)),
                    Func::Sqrt => x.sqrt(),
                    Func::Log if x <= 0.0 => return Err(fail(DomainKind::LogOfNonPositive, self)),
                    Func::Log => x.ln(),
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(fail(DomainKind::NonFinite, self))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::ChartSpace;
    use crate::expr::{parse_expression, parse_with_params};
    use std::collections::BTreeMap;

    #[test]
    fn constant_anywhere() {
        assert_eq!(Expr::Num(3.0).eval(&[0.3, -7.0]).unwrap(), 3.0);
    }

    #[test]
    fn string_energy_vanishes_on_light_cone() {
        let c = ChartSpace::k_tangent(1, 2).unwrap();
        let params: BTreeMap<_, _> = [("s".into(), 1.0), ("t".into(), 1.0)].into_iter().collect();
        let e = parse_with_params("(1/2)*(s*v_1_1^2 - t*v_2_1^2)", &c, &params).unwrap();
        assert_eq!(e.eval(&[0.0, 1.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn domain_errors_name_the_subexpression() {
        let c = ChartSpace::base(1).unwrap();
        let e = parse_expression("1 + sqrt(x_1)", &c).unwrap();
        let err = e.eval(&[-1.0]).unwrap_err();
        assert_eq!(err.kind, DomainKind::SqrtOfNegative);
        assert_eq!(err.subexpr.to_source(&c), "sqrt(x_1)");
        let e = parse_expression("log(x_1)", &c).unwrap();
        assert_eq!(e.eval(&[0.0]).unwrap_err().kind, DomainKind::LogOfNonPositive);
        let e = parse_expression("1/x_1", &c).unwrap();
        assert_eq!(e.eval(&[0.0]).unwrap_err().kind, DomainKind::DivisionByZero);
        let e = parse_expression("x_1^-1", &c).unwrap();
        assert_eq!(e.eval(&[0.0]).unwrap_err().kind, DomainKind::DivisionByZero);
    }
}
