use super::{Expr, Func};

impl Expr {
    /// Exact partial derivative with respect to coordinate `index`, simplified.
    pub fn diff(&self, index: usize) -> Expr {
        raw(self, index).simplify()
    }
}

fn raw(e: &Expr, x: usize) -> Expr {
    if !e.depends_on(x) {
        return Expr::ZERO;
    }
    match e {
        Expr::Num(_) => Expr::ZERO,
        Expr::Var(i) => Expr::Num(if *i == x { 1.0 } else { 0.0 }),
        Expr::Neg(a) => -raw(a, x),
        Expr::Add(a, b) => raw(a, x) + raw(b, x),
        Expr::Sub(a, b) => raw(a, x) - raw(b, x),
        Expr::Mul(a, b) => raw(a, x) * (**b).clone() + (**a).clone() * raw(b, x),
        Expr::Div(a, b) => {
            raw(a, x) / (**b).clone() - (**a).clone() * raw(b, x) / (**b).clone().powi(2)
        }
        Expr::Pow(a, n) => Expr::Num(*n as f64) * (**a).clone().powi(n - 1) * raw(a, x),
        Expr::Call(f, a) => {
            let inner = raw(a, x);
            let a = (**a).clone();
            let outer = match f {
                Func::Sqrt => Expr::ONE / (Expr::Num(2.0) * a.sqrt()),
                Func::Sin => Expr::call(Func::Cos, a),
                Func::Cos => -Expr::call(Func::Sin, a),
                Func::Exp => Expr::call(Func::Exp, a),
                Func::Log => Expr::ONE / a,
            };
            outer * inner
        }
    }
}
