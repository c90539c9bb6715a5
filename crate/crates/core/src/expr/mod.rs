//! Scalar expressions over the coordinates of a chart.
//!
//! Expressions are plain trees. Coordinates are referenced by their index in
//! the owning [`ChartSpace`](crate::chart::ChartSpace); model parameters are
//! substituted as literals when the source is parsed, so an [`Expr`] never
//! carries free symbols other than coordinates.
//!
//! Differentiation is exact and symbolic, which lets the geometry layer take
//! derivatives to any order (Lie derivatives of Lagrangian 2-forms need third
//! derivatives of `L`). Simplification is deliberately shallow: constant
//! folding, `0`/`1` identities and a little constant hoisting. Equality of two
//! expressions is always checked pointwise, never structurally.

mod diff;
pub mod eval;
mod parse;
mod print;
mod simplify;

use std::ops;

pub use eval::DomainError;
pub use parse::{parse_expression, parse_with_params, ParseError};
pub use print::Rendered;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sqrt,
    Sin,
    Cos,
    Exp,
    Log,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Coordinate by chart index.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub const ZERO: Expr = Expr::Num(0.0);
    pub const ONE: Expr = Expr::Num(1.0);

    pub fn num(value: f64) -> Expr {
        Expr::Num(value)
    }

    pub fn var(index: usize) -> Expr {
        Expr::Var(index)
    }

    pub fn powi(self, exponent: i32) -> Expr {
        Expr::Pow(Box::new(self), exponent)
    }

    pub fn call(func: Func, arg: Expr) -> Expr {
        Expr::Call(func, Box::new(arg))
    }

    pub fn sqrt(self) -> Expr {
        Expr::call(Func::Sqrt, self)
    }

    pub fn as_num(&self) -> Option<f64> {
        match self {
            Expr::Num(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(v) if *v == 0.0)
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Num(v) if *v == 1.0)
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Num(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                match (a.max_var(), b.max_var()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
        }
    }

    pub fn depends_on(&self, index: usize) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var(i) => *i == index,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.depends_on(index),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.depends_on(index) || b.depends_on(index)
            }
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Var(_) => 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => 1 + a.node_count(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.node_count() + b.node_count()
            }
        }
    }

    /// Replace every coordinate `i` by `subst[i]`. Used to re-read base-chart
    /// expressions on a bundle chart (the base coordinates come first there).
    pub fn remap_vars(&self, map: &dyn Fn(usize) -> Expr) -> Expr {
        match self {
            Expr::Num(v) => Expr::Num(*v),
            Expr::Var(i) => map(*i),
            Expr::Neg(a) => Expr::Neg(Box::new(a.remap_vars(map))),
            Expr::Pow(a, n) => Expr::Pow(Box::new(a.remap_vars(map)), *n),
            Expr::Call(f, a) => Expr::Call(*f, Box::new(a.remap_vars(map))),
            Expr::Add(a, b) => Expr::Add(Box::new(a.remap_vars(map)), Box::new(b.remap_vars(map))),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.remap_vars(map)), Box::new(b.remap_vars(map))),
            Expr::Mul(a, b) => Expr::Mul(Box::new(a.remap_vars(map)), Box::new(b.remap_vars(map))),
            Expr::Div(a, b) => Expr::Div(Box::new(a.remap_vars(map)), Box::new(b.remap_vars(map))),
        }
    }

    /// Sum of an iterator of expressions, simplified.
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        terms.into_iter().fold(Expr::ZERO, |acc, t| (acc + t).simplify())
    }
}

impl From<f64> for Expr {
    fn from(v: f64) -> Self {
        Expr::Num(v)
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(rhs))
    }
}

impl ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(rhs))
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

impl ops::Mul<Expr> for f64 {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Num(self) * rhs
    }
}
