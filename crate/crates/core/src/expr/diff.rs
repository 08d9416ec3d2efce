//! Symbolic partial derivatives of expression trees.
//!
//! Used to reach derivative orders beyond what a single order-3 jet
//! carries: the jet of `∂X/∂u` needs fourth derivatives of `X`.

use super::ast::{Expr, Func};

/// Differentiation variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    U,
    V,
}

fn is_num(e: &Expr, x: f64) -> bool {
    matches!(e, Expr::Num(y) if *y == x)
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x + y),
        (a, b) if is_num(&b, 0.0) => a,
        (a, b) if is_num(&a, 0.0) => b,
        (a, b) => Expr::add(a, b),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x - y),
        (a, b) if is_num(&b, 0.0) => a,
        (a, b) if is_num(&a, 0.0) => neg(b),
        (a, b) => Expr::sub(a, b),
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(x) => Expr::Num(-x),
        Expr::Neg(inner) => *inner,
        a => Expr::neg(a),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x * y),
        (a, b) if is_num(&a, 0.0) || is_num(&b, 0.0) => Expr::Num(0.0),
        (a, b) if is_num(&a, 1.0) => b,
        (a, b) if is_num(&b, 1.0) => a,
        (a, b) => Expr::mul(a, b),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (a, _) if is_num(&a, 0.0) => Expr::Num(0.0),
        (a, b) if is_num(&b, 1.0) => a,
        (a, b) => Expr::div(a, b),
    }
}

fn pow(a: Expr, n: i32) -> Expr {
    match n {
        0 => Expr::Num(1.0),
        1 => a,
        n => Expr::pow(a, n),
    }
}

/// `∂e/∂var`, with trivial zero and one factors folded away.
pub fn derivative(e: &Expr, var: Var) -> Expr {
    let d = |a: &Expr| derivative(a, var);
    match e {
        Expr::Num(_) | Expr::Pi => Expr::Num(0.0),
        Expr::U => Expr::Num(if var == Var::U { 1.0 } else { 0.0 }),
        Expr::V => Expr::Num(if var == Var::V { 1.0 } else { 0.0 }),
        Expr::Neg(a) => neg(d(a)),
        Expr::Add(a, b) => add(d(a), d(b)),
        Expr::Sub(a, b) => sub(d(a), d(b)),
        Expr::Mul(a, b) => add(mul(d(a), (**b).clone()), mul((**a).clone(), d(b))),
        Expr::Div(a, b) => {
            let da = d(a);
            let db = d(b);
            if is_num(&db, 0.0) {
                div(da, (**b).clone())
            } else {
                div(
                    sub(mul(da, (**b).clone()), mul((**a).clone(), db)),
                    pow((**b).clone(), 2),
                )
            }
        }
        Expr::Pow(a, n) => {
            if *n == 0 {
                return Expr::Num(0.0);
            }
            mul(mul(Expr::Num(*n as f64), pow((**a).clone(), n - 1)), d(a))
        }
        Expr::Call(f, a) => {
            let da = d(a);
            if is_num(&da, 0.0) {
                return Expr::Num(0.0);
            }
            let a = (**a).clone();
            let outer = match f {
                Func::Sin => Expr::call(Func::Cos, a),
                Func::Cos => neg(Expr::call(Func::Sin, a)),
                Func::Tan => add(Expr::Num(1.0), pow(Expr::call(Func::Tan, a), 2)),
                Func::Exp => Expr::call(Func::Exp, a),
                Func::Log => return div(da, a),
                Func::Sqrt => {
                    return div(da, mul(Expr::Num(2.0), Expr::call(Func::Sqrt, a)));
                }
            };
            mul(outer, da)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{eval_f64, parse_expr};

    #[test]
    fn folds_trivial_factors() {
        let e = parse_expr("3*u^2 + v").unwrap();
        assert_eq!(derivative(&e, Var::V).to_string(), "1.0");
        assert_eq!(
            derivative(&parse_expr("sin(v)").unwrap(), Var::U),
            Expr::Num(0.0)
        );
    }

    #[test]
    fn matches_central_differences() {
        let cases = [
            "cos(u)*sin(v)",
            "exp(u*v)/(2 + sin(u))",
            "sqrt(1 + u^2)*log(2 + v^2) - tan(0.3*u)",
            "(u - v)^-2 + u^3*v",
        ];
        let (u, v, h) = (0.4, 1.1, 1e-6);
        for src in cases {
            let e = parse_expr(src).unwrap();
            let du = derivative(&e, Var::U);
            let dv = derivative(&e, Var::V);
            let fd_u =
                (eval_f64(&e, u + h, v).unwrap() - eval_f64(&e, u - h, v).unwrap()) / (2.0 * h);
            let fd_v =
                (eval_f64(&e, u, v + h).unwrap() - eval_f64(&e, u, v - h).unwrap()) / (2.0 * h);
            assert!(
                (eval_f64(&du, u, v).unwrap() - fd_u).abs() < 1e-6 * (1.0 + fd_u.abs()),
                "{src}"
            );
            assert!(
                (eval_f64(&dv, u, v).unwrap() - fd_v).abs() < 1e-6 * (1.0 + fd_v.abs()),
                "{src}"
            );
        }
    }
}
