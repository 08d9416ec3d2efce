//! Expression language for surface and curve components.

mod ast;
mod diff;
mod eval;
mod parse;

pub use ast::{Expr, Func};
pub use diff::{derivative, Var};
pub use eval::{eval_f64, eval_jet, DomainError, MIN_DIVISOR};
pub use parse::{parse_expr, ParseError};
