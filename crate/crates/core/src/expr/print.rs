use std::fmt;

use super::Expr;
use crate::chart::ChartSpace;

/// An expression paired with the chart that names its coordinates.
///
/// The output reparses to the same tree, so this doubles as the plain-text
/// serialization.
pub struct Rendered<'a> {
    expr: &'a Expr,
    chart: &'a ChartSpace,
}

impl Expr {
    pub fn render<'a>(&'a self, chart: &'a ChartSpace) -> Rendered<'a> {
        Rendered { expr: self, chart }
    }

    pub fn to_source(&self, chart: &ChartSpace) -> String {
        self.render(chart).to_string()
    }
}

impl fmt::Display for Rendered<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self.expr, self.chart, f)
    }
}

fn is_sum(e: &Expr) -> bool {
    matches!(e, Expr::Add(..) | Expr::Sub(..))
}

fn is_product(e: &Expr) -> bool {
    matches!(e, Expr::Mul(..) | Expr::Div(..))
}

fn parens(e: &Expr, chart: &ChartSpace, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.write_str("(")?;
    write_expr(e, chart, f)?;
    f.write_str(")")
}

fn write_expr(e: &Expr, chart: &ChartSpace, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Num(v) => write!(f, "{v}"),
        Expr::Var(i) => match chart.names().get(*i) {
            Some(name) => f.write_str(name),
            None => write!(f, "#{i}"),
        },
        Expr::Call(func, arg) => {
            f.write_str(func.name())?;
            parens(arg, chart, f)
        }
        Expr::Neg(a) => {
            f.write_str("-")?;
            match **a {
                Expr::Var(_) | Expr::Call(..) | Expr::Neg(_) => write_expr(a, chart, f),
                _ => parens(a, chart, f),
            }
        }
        Expr::Pow(a, n) => {
            match **a {
                Expr::Num(_) | Expr::Var(_) | Expr::Call(..) | Expr::Neg(_) => write_expr(a, chart, f)?,
                _ => parens(a, chart, f)?,
            }
            write!(f, "^{n}")
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            write_expr(a, chart, f)?;
            f.write_str(if matches!(e, Expr::Add(..)) { " + " } else { " - " })?;
            if is_sum(b) {
                parens(b, chart, f)
            } else {
                write_expr(b, chart, f)
            }
        }
        Expr::Mul(a, b) | Expr::Div(a, b) => {
            if is_sum(a) {
                parens(a, chart, f)?;
            } else {
                write_expr(a, chart, f)?;
            }
            f.write_str(if matches!(e, Expr::Mul(..)) { "*" } else { "/" })?;
            if is_sum(b) || is_product(b) {
                parens(b, chart, f)
            } else {
                write_expr(b, chart, f)
            }
        }
    }
}
