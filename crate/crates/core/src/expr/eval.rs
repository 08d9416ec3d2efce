//! Pointwise and jet evaluation of expression trees.

use thiserror::Error;

use super::ast::{Expr, Func};
use crate::jet::Jet2;

/// Smallest magnitude accepted as a divisor.
pub const MIN_DIVISOR: f64 = 1e-300;

/// An operation was applied outside its domain.
#[derive(Clone, Debug, Error, PartialEq)]
#[error("{reason} in `{node}` at (u, v) = ({u}, {v})")]
pub struct DomainError {
    /// Printed form of the offending subexpression.
    pub node: String,
    pub reason: String,
    pub u: f64,
    pub v: f64,
}

fn domain_error(node: &Expr, reason: &str, u: f64, v: f64) -> DomainError {
    DomainError {
        node: node.to_string(),
        reason: reason.to_string(),
        u,
        v,
    }
}

/// Jet of `e` at `(u0, v0)`, exact to order 3.
pub fn eval_jet(e: &Expr, u0: f64, v0: f64) -> Result<Jet2, DomainError> {
    let var_u = Jet2::var_u(u0);
    let var_v = Jet2::var_v(v0);
    jet_rec(e, &var_u, &var_v, u0, v0)
}

fn jet_rec(e: &Expr, ju: &Jet2, jv: &Jet2, u0: f64, v0: f64) -> Result<Jet2, DomainError> {
    let rec = |a: &Expr| jet_rec(a, ju, jv, u0, v0);
    Ok(match e {
        Expr::Num(x) => Jet2::constant(*x),
        Expr::Pi => Jet2::constant(std::f64::consts::PI),
        Expr::U => *ju,
        Expr::V => *jv,
        Expr::Neg(a) => -rec(a)?,
        Expr::Add(a, b) => rec(a)? + rec(b)?,
        Expr::Sub(a, b) => rec(a)? - rec(b)?,
        Expr::Mul(a, b) => rec(a)? * rec(b)?,
        Expr::Div(a, b) => {
            let den = rec(b)?;
            if !(den.value().abs() >= MIN_DIVISOR) {
                return Err(domain_error(e, "division by zero", u0, v0));
            }
            rec(a)? * den.recip()
        }
        Expr::Pow(a, n) => {
            let base = rec(a)?;
            if *n < 0 && !(base.value().abs() >= MIN_DIVISOR) {
                return Err(domain_error(e, "negative power of zero", u0, v0));
            }
            base.powi(*n)
        }
        Expr::Call(f, a) => {
            let x = rec(a)?;
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => {
                    if x.value().cos().abs() < MIN_DIVISOR {
                        return Err(domain_error(e, "tangent pole", u0, v0));
                    }
                    x.tan()
                }
                Func::Exp => x.exp(),
                Func::Log => {
                    if !(x.value() > 0.0) {
                        return Err(domain_error(e, "logarithm of non-positive value", u0, v0));
                    }
                    x.ln()
                }
                Func::Sqrt => {
                    if !(x.value() > 0.0) {
                        return Err(domain_error(e, "square root of non-positive value", u0, v0));
                    }
                    x.sqrt()
                }
            }
        }
    })
}

/// Plain floating-point value of `e` at `(u, v)`.
///
/// Unlike [`eval_jet`], `sqrt(0)` is accepted here since no derivative is taken.
pub fn eval_f64(e: &Expr, u: f64, v: f64) -> Result<f64, DomainError> {
    let rec = |a: &Expr| eval_f64(a, u, v);
    Ok(match e {
        Expr::Num(x) => *x,
        Expr::Pi => std::f64::consts::PI,
        Expr::U => u,
        Expr::V => v,
        Expr::Neg(a) => -rec(a)?,
        Expr::Add(a, b) => rec(a)? + rec(b)?,
        Expr::Sub(a, b) => rec(a)? - rec(b)?,
        Expr::Mul(a, b) => rec(a)? * rec(b)?,
        Expr::Div(a, b) => {
            let den = rec(b)?;
            if !(den.abs() >= MIN_DIVISOR) {
                return Err(domain_error(e, "division by zero", u, v));
            }
            rec(a)? / den
        }
        Expr::Pow(a, n) => {
            let base = rec(a)?;
            if *n < 0 && !(base.abs() >= MIN_DIVISOR) {
                return Err(domain_error(e, "negative power of zero", u, v));
            }
            base.powi(*n)
        }
        Expr::Call(f, a) => {
            let x = rec(a)?;
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => {
                    if x.cos().abs() < MIN_DIVISOR {
                        return Err(domain_error(e, "tangent pole", u, v));
                    }
                    x.tan()
                }
                Func::Exp => x.exp(),
                Func::Log => {
                    if !(x > 0.0) {
                        return Err(domain_error(e, "logarithm of non-positive value", u, v));
                    }
                    x.ln()
                }
                Func::Sqrt => {
                    if !(x >= 0.0) {
                        return Err(domain_error(e, "square root of negative value", u, v));
                    }
                    x.sqrt()
                }
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    #[test]
    fn coordinate_jet() {
        let j = eval_jet(&Expr::U, 0.3, 0.7).unwrap();
        assert_eq!(j.value(), 0.3);
        assert_eq!(j.u(), 1.0);
        for s in 2..10 {
            assert_eq!(j.slots()[s], 0.0);
        }
    }

    #[test]
    fn sin_jet_slots() {
        let u0 = 0.9_f64;
        let j = eval_jet(&parse_expr("sin(u)").unwrap(), u0, -0.2).unwrap();
        let (s, c) = u0.sin_cos();
        let want = [s, c, 0.0, -s, 0.0, 0.0, -c, 0.0, 0.0, 0.0];
        for (got, want) in j.slots().iter().zip(want) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn value_matches_pointwise() {
        let e = parse_expr("exp(u*v)/(2 + sin(u)) - sqrt(1 + v^2)*log(3 + cos(v))").unwrap();
        for &(u, v) in &[(0.1, 0.2), (-1.3, 2.0), (3.0, -0.5)] {
            let j = eval_jet(&e, u, v).unwrap();
            assert!((j.value() - eval_f64(&e, u, v).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn domain_errors_name_the_node() {
        let e = parse_expr("1 + log(u - 1)").unwrap();
        let err = eval_jet(&e, 0.5, 0.0).unwrap_err();
        assert_eq!(err.node, "log(u - 1.0)");
        assert!(eval_f64(&e, 0.5, 0.0).is_err());

        let e = parse_expr("v/(u - u)").unwrap();
        assert!(eval_jet(&e, 1.0, 1.0).is_err());
        assert!(eval_jet(&parse_expr("sqrt(u)").unwrap(), 0.0, 0.0).is_err());
        assert_eq!(
            eval_f64(&parse_expr("sqrt(u)").unwrap(), 0.0, 0.0).unwrap(),
            0.0
        );
        assert!(eval_jet(&parse_expr("u^-1").unwrap(), 0.0, 0.0).is_err());
    }
}
