use super::{Expr, Func};

const MAX_PASSES: usize = 64;

impl Expr {
    /// Constant folding, `0`/`1` identities, sign normalisation, and hoisting
    /// of literal factors to the left of products. Iterated to a fixed point,
    /// so `simplify` is idempotent.
    pub fn simplify(&self) -> Expr {
        let mut current = pass(self);
        for _ in 0..MAX_PASSES {
            let next = pass(&current);
            if next == current {
                break;
            }
            current = next;
        }
        current
    }
}

fn num(v: f64) -> Expr {
    Expr::Num(v)
}

fn fold_call(f: Func, x: f64) -> Option<f64> {
    let v = match f {
        Func::Sqrt if x < 0.0 => return None,
        Func::Log if x <= 0.0 => return None,
        Func::Sqrt => x.sqrt(),
        Func::Log => x.ln(),
        Func::Sin => x.sin(),
        Func::Cos => x.cos(),
        Func::Exp => x.exp(),
    };
    v.is_finite().then_some(v)
}

fn pass(e: &Expr) -> Expr {
    match e {
        Expr::Num(_) | Expr::Var(_) => e.clone(),
        Expr::Neg(a) => neg(pass(a)),
        Expr::Add(a, b) => add(pass(a), pass(b)),
        Expr::Sub(a, b) => sub(pass(a), pass(b)),
        Expr::Mul(a, b) => mul(pass(a), pass(b)),
        Expr::Div(a, b) => div(pass(a), pass(b)),
        Expr::Pow(a, n) => pow(pass(a), *n),
        Expr::Call(f, a) => {
            let a = pass(a);
            if let Some(v) = a.as_num().and_then(|x| fold_call(*f, x)) {
                return num(v);
            }
            Expr::call(*f, a)
        }
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(c) => num(-c),
        Expr::Neg(x) => *x,
        Expr::Sub(x, y) => Expr::Sub(y, x),
        Expr::Mul(c, x) if c.as_num().is_some() => Expr::Mul(Box::new(num(-c.as_num().unwrap())), x),
        other => -other,
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => num(x + y),
        (a, b) if a.is_zero() => b,
        (a, b) if b.is_zero() => a,
        (a, Expr::Neg(y)) => a - *y,
        (a, Expr::Num(c)) if c < 0.0 => a - num(-c),
        (Expr::Neg(x), b) => b - *x,
        (a, b) if a == b => num(2.0) * a,
        (a, b) => a + b,
    }
}


fn sub(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => num(x - y),
        (a, b) if b.is_zero() => a,
        (a, b) if a.is_zero() => -b,
        (a, b) if a == b => num(0.0),
        (a, Expr::Neg(y)) => a + *y,
        (a, Expr::Num(c)) if c < 0.0 => a + num(-c),
        (a, b) => a - b,
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => num(x * y),
        (a, b) if a.is_zero() || b.is_zero() => num(0.0),
        (a, b) if a.is_one() => b,
        (a, b) if b.is_one() => a,
        (Expr::Num(-1.0), b) => -b,
        (a, Expr::Num(-1.0)) => -a,
        (a, Expr::Num(c)) => num(c) * a,
        (Expr::Num(c1), Expr::Mul(c2, y)) if c2.as_num().is_some() => num(c1 * c2.as_num().unwrap()) * *y,
        (Expr::Mul(c, x), b) if c.as_num().is_some() => *c * (*x * b),
        (a, Expr::Mul(c, y)) if c.as_num().is_some() && a.as_num().is_none() => *c * (a * *y),
        (Expr::Neg(x), b) => -(*x * b),
        (a, Expr::Neg(y)) => -(a * *y),
        (a, b) if a == b => a.powi(2),
        (Expr::Pow(x, m), b) if *x == b => pow_checked(*x, m.checked_add(1)),
        (a, Expr::Pow(y, m)) if *y == a => pow_checked(*y, m.checked_add(1)),
        (Expr::Pow(x, m), Expr::Pow(y, n)) if x == y => pow_checked(*x, m.checked_add(n)),
        (a, b) => a * b,
    }
}

fn pow_checked(base: Expr, exponent: Option<i32>) -> Expr {
    match exponent {
        Some(n) => base.powi(n),
        None => unreachable!("integer exponent overflow"),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) if y != 0.0 => num(x / y),
        (a, b) if a.is_zero() && !b.is_zero() => num(0.0),
        (a, b) if b.is_one() => a,
        (a, Expr::Num(-1.0)) => -a,
        (a, b) if a == b && !a.is_zero() => num(1.0),
        (Expr::Neg(x), b) => -(*x / b),
        (a, Expr::Neg(y)) => -(a / *y),
        (a, Expr::Num(c)) if c != 0.0 => num(1.0 / c) * a,
        (Expr::Mul(c, x), b) if c.as_num().is_some() => *c * (*x / b),
        (a, Expr::Mul(c, y)) if c.as_num().is_some_and(|d| d != 0.0) => {
            num(1.0 / c.as_num().unwrap()) * (a / *y)
        }
        (a, b) => a / b,
    }
}

fn pow(a: Expr, n: i32) -> Expr {
    if n == 0 {
        return num(1.0);
    }
    if n == 1 {
        return a;
    }
    match a {
        Expr::Num(c) if !(c == 0.0 && n < 0) => {
            let v = c.powi(n);
            if v.is_finite() {
                num(v)
            } else {
                num(c).powi(n)
            }
        }
        Expr::Pow(x, m) if m.checked_mul(n).is_some() => x.powi(m * n),
        Expr::Neg(x) if n % 2 == 0 => x.powi(n),
        Expr::Neg(x) => -(x.powi(n)),
        other => other.powi(n),
    }
}
