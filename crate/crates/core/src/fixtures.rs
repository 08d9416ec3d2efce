//! Built-in surfaces.

use std::f64::consts::PI;

use crate::expr::{eval_jet, parse_expr, DomainError, ParseError};
use crate::jet::Jet2;
use crate::surface::{ExprVec3, InvariantField, SurfaceSpec};

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 3] = ["paper-example", "twisted-ruled", "cubic-degenerate"];

fn vec3(src: [&str; 3]) -> ExprVec3 {
    ExprVec3::parse(src).expect("built-in expressions parse")
}

/// `X = (sin u, cos u sin v, cos u cos v)` with `v = (1, sin v, cos v)`,
/// `w = (1, −sin v, −cos v)` on `[0, 2π]²`.
pub fn paper_example() -> SurfaceSpec {
    SurfaceSpec {
        name: "paper-example".into(),
        x: vec3(["sin(u)", "cos(u)*sin(v)", "cos(u)*cos(v)"]),
        v: vec3(["1", "sin(v)", "cos(v)"]),
        w: vec3(["1", "-sin(v)", "-cos(v)"]),
        u_range: (0.0, 2.0 * PI),
        v_range: (0.0, 2.0 * PI),
    }
}

/// The paper example with the parameters exchanged; its frame breaks the
/// `a₂ = b₂ = 0` normalization.
pub fn paper_example_swapped() -> SurfaceSpec {
    SurfaceSpec {
        name: "paper-example-swapped".into(),
        x: vec3(["sin(v)", "cos(v)*sin(u)", "cos(v)*cos(u)"]),
        v: vec3(["1", "sin(u)", "cos(u)"]),
        w: vec3(["1", "-sin(u)", "-cos(u)"]),
        u_range: (0.0, 2.0 * PI),
        v_range: (0.0, 2.0 * PI),
    }
}

/// A ruled surface `X = Y(u) + v(1 + u/10)·m(u)` over a rescaled,
/// rotating lightcone frame. Every basic invariant except `a₂`, `b₂` is
/// non-trivial.
pub fn twisted_ruled() -> SurfaceSpec {
    SurfaceSpec {
        name: "twisted-ruled".into(),
        x: vec3([
            "0.5*u^2",
            "u - (v + 0.1*u*v)*sin(u)",
            "0.2*u + (v + 0.1*u*v)*cos(u)",
        ]),
        v: vec3([
            "exp(0.2*sin(u))",
            "exp(0.2*sin(u))*cos(u)",
            "exp(0.2*sin(u))*sin(u)",
        ]),
        w: vec3([
            "exp(-0.2*sin(u))",
            "-exp(-0.2*sin(u))*cos(u)",
            "-exp(-0.2*sin(u))*sin(u)",
        ]),
        u_range: (-2.0, 2.0),
        v_range: (-1.0, 1.0),
    }
}

/// Constant frame `v = (1,1,0)`, `w = (1,−1,0)` with `a₁ = u³`, `b₁ = 1`,
/// `c₁ = 0`, `c₂ = 1`: a degenerate lightlike line along `u = 0`.
pub fn cubic_degenerate() -> SurfaceSpec {
    SurfaceSpec {
        name: "cubic-degenerate".into(),
        x: vec3(["0.25*u^4 + u", "0.25*u^4 - u", "v"]),
        v: vec3(["1", "1", "0"]),
        w: vec3(["1", "-1", "0"]),
        u_range: (-1.0, 1.0),
        v_range: (-1.0, 1.0),
    }
}

pub fn by_name(name: &str) -> Option<SurfaceSpec> {
    match name {
        "paper-example" => Some(paper_example()),
        "twisted-ruled" => Some(twisted_ruled()),
        "cubic-degenerate" => Some(cubic_degenerate()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::build_surface;

    #[test]
    fn named_fixtures_build() {
        for name in NAMES {
            let spec = by_name(name).unwrap();
            assert_eq!(spec.name, name);
            build_surface(spec).unwrap();
        }
        assert!(by_name("nope").is_none());
    }
}

/// An invariant field at `(u0, v0)` with `a₁`, `b₁`, `c₁`, `c₂` given as
/// expressions and every other invariant zero. Only the lightlike criteria
/// read it, so it need not come from an actual surface.
pub fn synthetic_field(
    a1: &str,
    b1: &str,
    c1: &str,
    c2: &str,
    u0: f64,
    v0: f64,
) -> Result<InvariantField, SyntheticError> {
    let jet =
        |src: &str| -> Result<Jet2, SyntheticError> { Ok(eval_jet(&parse_expr(src)?, u0, v0)?) };
    let zero = Jet2::constant(0.0);
    Ok(InvariantField {
        a1: jet(a1)?,
        b1: jet(b1)?,
        c1: jet(c1)?,
        a2: zero,
        b2: zero,
        c2: jet(c2)?,
        e1: zero,
        f1: zero,
        g1: zero,
        e2: zero,
        f2: zero,
        g2: zero,
    })
}

#[derive(Debug, thiserror::Error)]
pub enum SyntheticError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}
