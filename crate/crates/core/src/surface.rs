//! Lightcone framed surfaces: basic invariants, frame checks, integrability
//! residuals and pointwise stratification.
//!
//! A surface is given by `X(u,v)` together with a lightcone frame `(v, w)`
//! satisfying `⟨v,v⟩ = ⟨w,w⟩ = 0`, `⟨v,w⟩ = −2`. With `m = −½ v∧w` every
//! vector decomposes as `x = −½⟨x,w⟩ v − ½⟨x,v⟩ w + ⟨x,m⟩ m`, which is how
//! the twelve basic invariants are read off.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{derivative, eval_f64, eval_jet, parse_expr, DomainError, Expr, ParseError, Var};
use crate::jet::Jet2;
use crate::minkowski::{wedge, JVec3, MVec3, DEFAULT_REL_TOL};

/// Three component expressions of an ℝ³₁-valued map.
#[derive(Clone, Debug, PartialEq)]
pub struct ExprVec3 {
    pub x1: Expr,
    pub x2: Expr,
    pub x3: Expr,
}

impl ExprVec3 {
    pub fn new(x1: Expr, x2: Expr, x3: Expr) -> Self {
        ExprVec3 { x1, x2, x3 }
    }

    pub fn parse(src: [&str; 3]) -> Result<Self, ParseError> {
        Ok(ExprVec3::new(
            parse_expr(src[0])?,
            parse_expr(src[1])?,
            parse_expr(src[2])?,
        ))
    }

    pub fn components(&self) -> [&Expr; 3] {
        [&self.x1, &self.x2, &self.x3]
    }

    pub fn jet(&self, u: f64, v: f64) -> Result<JVec3, DomainError> {
        Ok(JVec3::new(
            eval_jet(&self.x1, u, v)?,
            eval_jet(&self.x2, u, v)?,
            eval_jet(&self.x3, u, v)?,
        ))
    }

    pub fn value(&self, u: f64, v: f64) -> Result<MVec3, DomainError> {
        Ok(MVec3::new(
            eval_f64(&self.x1, u, v)?,
            eval_f64(&self.x2, u, v)?,
            eval_f64(&self.x3, u, v)?,
        ))
    }

    pub fn derivative(&self, var: Var) -> ExprVec3 {
        ExprVec3::new(
            derivative(&self.x1, var),
            derivative(&self.x2, var),
            derivative(&self.x3, var),
        )
    }
}

/// An unvalidated surface description.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceSpec {
    pub name: String,
    pub x: ExprVec3,
    pub v: ExprVec3,
    pub w: ExprVec3,
    pub u_range: (f64, f64),
    pub v_range: (f64, f64),
}

/// The frame condition a surface failed at build time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameCondition {
    VLightlike,
    WLightlike,
    PairProduct,
    A2Vanishes,
    B2Vanishes,
}

impl fmt::Display for FrameCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameCondition::VLightlike => "<v,v> = 0",
            FrameCondition::WLightlike => "<w,w> = 0",
            FrameCondition::PairProduct => "<v,w> = -2",
            FrameCondition::A2Vanishes => "a2 = 0",
            FrameCondition::B2Vanishes => "b2 = 0",
        })
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SurfaceError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error(
        "frame condition `{condition}` violated at (u, v) = ({u}, {v}), residual {residual:e}"
    )]
    Validation {
        condition: FrameCondition,
        u: f64,
        v: f64,
        residual: f64,
    },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Build-time residual bound for the frame conditions.
pub const VALIDATION_TOL: f64 = 1e-8;
/// Probe grid side used by [`build_surface`].
pub const PROBE_SIDE: usize = 5;

/// A validated lightcone framed surface.
#[derive(Clone, Debug)]
pub struct SurfaceDef {
    spec: SurfaceSpec,
    x_u: ExprVec3,
    x_v: ExprVec3,
    rel_tol: f64,
}

/// Validates `spec` on a 5×5 probe grid and returns the surface.
pub fn build_surface(spec: SurfaceSpec) -> Result<SurfaceDef, SurfaceError> {
    for (axis, (lo, hi)) in [("u", spec.u_range), ("v", spec.v_range)] {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(SurfaceError::InvalidDomain(format!(
                "{axis} range [{lo}, {hi}]"
            )));
        }
    }
    let s = SurfaceDef::new_unchecked(spec);
    let (u0, u1) = s.spec.u_range;
    let (v0, v1) = s.spec.v_range;
    let n = PROBE_SIDE;
    for i in 0..n {
        for j in 0..n {
            let u = u0 + (u1 - u0) * i as f64 / (n - 1) as f64;
            let v = v0 + (v1 - v0) * j as f64 / (n - 1) as f64;
            s.check_frame_at(u, v)?;
        }
    }
    Ok(s)
}

impl SurfaceDef {
    /// Wraps a spec without running the frame checks.
    pub fn new_unchecked(spec: SurfaceSpec) -> Self {
        let x_u = spec.x.derivative(Var::U);
        let x_v = spec.x.derivative(Var::V);
        SurfaceDef {
            spec,
            x_u,
            x_v,
            rel_tol: DEFAULT_REL_TOL,
        }
    }

    /// Replaces the relative zero tolerance (default `1e-9`).
    pub fn with_tolerance(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn spec(&self) -> &SurfaceSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn u_range(&self) -> (f64, f64) {
        self.spec.u_range
    }

    pub fn v_range(&self) -> (f64, f64) {
        self.spec.v_range
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        let (u0, u1) = self.spec.u_range;
        let (v0, v1) = self.spec.v_range;
        let su = 1e-12 * (u1 - u0);
        let sv = 1e-12 * (v1 - v0);
        u >= u0 - su && u <= u1 + su && v >= v0 - sv && v <= v1 + sv
    }

    /// `X(u, v)`.
    pub fn position(&self, u: f64, v: f64) -> Result<MVec3, DomainError> {
        self.spec.x.value(u, v)
    }

    /// Frame vectors `(v, w, m)` at a point.
    pub fn frame(&self, u: f64, v: f64) -> Result<(MVec3, MVec3, MVec3), DomainError> {
        let fv = self.spec.v.value(u, v)?;
        let fw = self.spec.w.value(u, v)?;
        Ok((fv, fw, wedge(fv, fw).scale(-0.5)))
    }

    fn check_frame_at(&self, u: f64, v: f64) -> Result<(), SurfaceError> {
        let (fv, fw, m) = self.frame(u, v)?;
        let scale = (fv.max_abs() * fw.max_abs()).max(1.0);
        let fail = |condition, residual: f64| SurfaceError::Validation {
            condition,
            u,
            v,
            residual,
        };
        let checks = [
            (FrameCondition::VLightlike, fv.dot(fv)),
            (FrameCondition::WLightlike, fw.dot(fw)),
            (FrameCondition::PairProduct, fv.dot(fw) + 2.0),
        ];
        for (cond, r) in checks {
            if !(r.abs() <= VALIDATION_TOL * scale) {
                return Err(fail(cond, r));
            }
        }
        let x_v = self.x_v.value(u, v)?;
        let scale = (x_v.max_abs() * fv.max_abs().max(fw.max_abs()).max(m.max_abs())).max(1.0);
        let a2 = -0.5 * x_v.dot(fw);
        let b2 = -0.5 * x_v.dot(fv);
        if !(a2.abs() <= VALIDATION_TOL * scale) {
            return Err(fail(FrameCondition::A2Vanishes, a2));
        }
        if !(b2.abs() <= VALIDATION_TOL * scale) {
            return Err(fail(FrameCondition::B2Vanishes, b2));
        }
        Ok(())
    }

    /// Jets of the frame and of `X_u`, `X_v`, plus the basic invariants.
    pub fn point(&self, u: f64, v: f64) -> Result<SurfacePoint, DomainError> {
        let x = self.spec.x.value(u, v)?;
        let x_u = self.x_u.jet(u, v)?;
        let x_v = self.x_v.jet(u, v)?;
        let fv = self.spec.v.jet(u, v)?;
        let fw = self.spec.w.jet(u, v)?;
        let m = fv.wedge(&fw).scale(-0.5);
        let inv = InvariantField::from_frame(&x_u, &x_v, &fv, &fw, &m);
        Ok(SurfacePoint {
            u,
            v,
            x,
            x_u,
            x_v,
            frame_v: fv,
            frame_w: fw,
            frame_m: m,
            inv,
        })
    }
}

/// Everything the analysis modules need at one parameter point.
#[derive(Clone, Copy, Debug)]
pub struct SurfacePoint {
    pub u: f64,
    pub v: f64,
    pub x: MVec3,
    pub x_u: JVec3,
    pub x_v: JVec3,
    pub frame_v: JVec3,
    pub frame_w: JVec3,
    pub frame_m: JVec3,
    pub inv: InvariantField,
}

impl SurfacePoint {
    /// `n̂ = −a₁v + b₁w`.
    pub fn n_hat(&self) -> MVec3 {
        let (a1, b1) = (self.inv.a1.value(), self.inv.b1.value());
        self.frame_v.value().scale(-a1) + self.frame_w.value().scale(b1)
    }

    /// Jet of `n̂`.
    pub fn n_hat_jet(&self) -> JVec3 {
        self.frame_v.times(-self.inv.a1) + self.frame_w.times(self.inv.b1)
    }

    /// Pointwise zero tolerance.
    pub fn tol(&self, rel_tol: f64) -> f64 {
        self.inv.tol(rel_tol)
    }
}

/// The twelve basic invariants as jets.
///
/// Built from a surface, `a₁`, `b₁`, `c₁`, `c₂` (and `a₂`, `b₂`) carry order 3
/// and the frame invariants `e`, `f`, `g` carry order 2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvariantField {
    pub a1: Jet2,
    pub b1: Jet2,
    pub c1: Jet2,
    pub a2: Jet2,
    pub b2: Jet2,
    pub c2: Jet2,
    pub e1: Jet2,
    pub f1: Jet2,
    pub g1: Jet2,
    pub e2: Jet2,
    pub f2: Jet2,
    pub g2: Jet2,
}

impl InvariantField {
    pub fn from_frame(x_u: &JVec3, x_v: &JVec3, v: &JVec3, w: &JVec3, m: &JVec3) -> Self {
        let (w_u, w_v, v_u, v_v) = (w.du(), w.dv(), v.du(), v.dv());
        InvariantField {
            a1: x_u.dot(w).scale(-0.5),
            b1: x_u.dot(v).scale(-0.5),
            c1: x_u.dot(m),
            a2: x_v.dot(w).scale(-0.5),
            b2: x_v.dot(v).scale(-0.5),
            c2: x_v.dot(m),
            e1: v.dot(&w_u).scale(0.5),
            f1: w_u.dot(m).scale(0.5),
            g1: v_u.dot(m).scale(0.5),
            e2: v.dot(&w_v).scale(0.5),
            f2: w_v.dot(m).scale(0.5),
            g2: v_v.dot(m).scale(0.5),
        }
    }

    /// Value slots in the order `a₁ b₁ c₁ a₂ b₂ c₂ e₁ f₁ g₁ e₂ f₂ g₂`.
    pub fn values(&self) -> [f64; 12] {
        [
            self.a1, self.b1, self.c1, self.a2, self.b2, self.c2, self.e1, self.f1, self.g1,
            self.e2, self.f2, self.g2,
        ]
        .map(|j| j.value())
    }

    /// `λ̃ = −4a₁b₁`.
    pub fn lambda_tilde(&self) -> Jet2 {
        (self.a1 * self.b1).scale(-4.0)
    }

    /// Zero tolerance `rel·(1 + |a₁| + |b₁| + |c₂|)`.
    pub fn tol(&self, rel_tol: f64) -> f64 {
        rel_tol * (1.0 + self.a1.value().abs() + self.b1.value().abs() + self.c2.value().abs())
    }

    /// The six integrability residuals.
    pub fn integrability_residuals(&self) -> [f64; 6] {
        let v = |j: &Jet2| j.value();
        let (a1, b1, c1, c2) = (v(&self.a1), v(&self.b1), v(&self.c1), v(&self.c2));
        let (e1, f1, g1, e2, f2, g2) = (
            v(&self.e1),
            v(&self.f1),
            v(&self.g1),
            v(&self.e2),
            v(&self.f2),
            v(&self.g2),
        );
        [
            self.a1.v() - (-a1 * e2 + c2 * f1 - c1 * f2),
            self.b1.v() - (b1 * e2 + c2 * g1 - c1 * g2),
            (self.c1.v() - self.c2.u()) + 2.0 * (a1 * g2 + b1 * f2),
            (self.e1.v() - self.e2.u()) - 2.0 * (f1 * g2 - f2 * g1),
            (self.f1.v() - self.f2.u()) - (e1 * f2 - e2 * f1),
            (self.g1.v() - self.g2.u()) - (e2 * g1 - e1 * g2),
        ]
    }

    /// The invariants of the same surface with the frame roles of `v` and
    /// `w` exchanged (so `m` flips sign).
    pub fn swap_frame(&self) -> InvariantField {
        InvariantField {
            a1: self.b1,
            b1: self.a1,
            c1: -self.c1,
            a2: self.b2,
            b2: self.a2,
            c2: -self.c2,
            e1: -self.e1,
            f1: -self.g1,
            g1: -self.f1,
            e2: -self.e2,
            f2: -self.g2,
            g2: -self.f2,
        }
    }
}

/// Basic invariants at `(u0, v0)`.
pub fn invariants_at(s: &SurfaceDef, u0: f64, v0: f64) -> Result<InvariantField, DomainError> {
    Ok(s.point(u0, v0)?.inv)
}

/// The six integrability residuals at `(u0, v0)`.
pub fn integrability_residuals(s: &SurfaceDef, u0: f64, v0: f64) -> Result<[f64; 6], DomainError> {
    Ok(invariants_at(s, u0, v0)?.integrability_residuals())
}

/// Causal and singular type of a parameter point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StratumTag {
    Spacelike,
    Timelike,
    Lightlike,
    #[serde(rename = "singular_S1")]
    SingularS1,
    #[serde(rename = "singular_S2")]
    SingularS2,
    DegenerateOther,
}

impl StratumTag {
    pub fn as_str(self) -> &'static str {
        match self {
            StratumTag::Spacelike => "spacelike",
            StratumTag::Timelike => "timelike",
            StratumTag::Lightlike => "lightlike",
            StratumTag::SingularS1 => "singular_S1",
            StratumTag::SingularS2 => "singular_S2",
            StratumTag::DegenerateOther => "degenerate_other",
        }
    }
}

/// Which of `a₁`, `b₁` vanishes at a lightlike point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LightlikeBranch {
    A1Zero,
    B1Zero,
}

impl LightlikeBranch {
    pub fn of(inv: &InvariantField) -> Self {
        if inv.a1.value().abs() <= inv.b1.value().abs() {
            LightlikeBranch::A1Zero
        } else {
            LightlikeBranch::B1Zero
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointStratum {
    pub tag: StratumTag,
    pub lambda_tilde: f64,
}

/// Stratum of an invariant field against the zero tolerance `tol`.
pub fn stratify_invariants(inv: &InvariantField, tol: f64) -> PointStratum {
    let (a1, b1, c2) = (inv.a1.value(), inv.b1.value(), inv.c2.value());
    let lambda_tilde = -4.0 * a1 * b1;
    let ab = a1 * a1 + b1 * b1;
    let tag = if c2.abs() <= tol {
        if ab > tol {
            StratumTag::SingularS1
        } else {
            StratumTag::DegenerateOther
        }
    } else if ab <= tol {
        StratumTag::SingularS2
    } else if lambda_tilde > tol {
        StratumTag::Spacelike
    } else if lambda_tilde < -tol {
        StratumTag::Timelike
    } else {
        StratumTag::Lightlike
    };
    PointStratum { tag, lambda_tilde }
}

/// Stratum at `(u0, v0)`; `tol = None` uses the surface's relative default.
pub fn stratify(
    s: &SurfaceDef,
    u0: f64,
    v0: f64,
    tol: Option<f64>,
) -> Result<PointStratum, DomainError> {
    let inv = invariants_at(s, u0, v0)?;
    let tol = tol.unwrap_or_else(|| inv.tol(s.rel_tol));
    Ok(stratify_invariants(&inv, tol))
}

/// Max-norm residuals of `v∧m + v`, `w∧m − w`, `⟨m,m⟩ − 1`, `⟨n̂,n̂⟩ + λ̃`.
pub fn frame_identities(v: MVec3, w: MVec3, m: MVec3, n_hat: MVec3, lambda_tilde: f64) -> [f64; 4] {
    [
        (wedge(v, m) + v).max_abs(),
        (wedge(w, m) - w).max_abs(),
        (m.dot(m) - 1.0).abs(),
        (n_hat.dot(n_hat) + lambda_tilde).abs(),
    ]
}

/// [`frame_identities`] evaluated on the surface at `(u0, v0)`.
pub fn frame_identity_residuals(s: &SurfaceDef, u0: f64, v0: f64) -> Result<[f64; 4], DomainError> {
    let p = s.point(u0, v0)?;
    Ok(frame_identities(
        p.frame_v.value(),
        p.frame_w.value(),
        p.frame_m.value(),
        p.n_hat(),
        p.inv.lambda_tilde().value(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use std::f64::consts::PI;

    #[test]
    fn paper_example_builds() {
        let s = build_surface(fixtures::paper_example()).unwrap();
        assert_eq!(s.name(), "paper-example");
    }

    #[test]
    fn degenerate_pair_rejected() {
        let mut spec = fixtures::paper_example();
        spec.w = spec.v.clone();
        match build_surface(spec).unwrap_err() {
            SurfaceError::Validation {
                condition,
                residual,
                ..
            } => {
                assert_eq!(condition, FrameCondition::PairProduct);
                assert!((residual - 2.0).abs() < 1e-12);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn swapped_roles_violate_normalization() {
        match build_surface(fixtures::paper_example_swapped()).unwrap_err() {
            SurfaceError::Validation { condition, .. } => {
                assert!(matches!(
                    condition,
                    FrameCondition::A2Vanishes | FrameCondition::B2Vanishes
                ))
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn bad_domain_rejected() {
        let mut spec = fixtures::paper_example();
        spec.u_range = (1.0, 1.0);
        assert!(matches!(
            build_surface(spec),
            Err(SurfaceError::InvalidDomain(_))
        ));
    }

    #[test]
    fn paper_example_invariants() {
        let s = build_surface(fixtures::paper_example()).unwrap();
        for &(u, v) in &[(0.3, 1.7), (2.0, -0.4), (4.1, 5.5)] {
            let inv = invariants_at(&s, u, v).unwrap();
            let want = [
                -0.5 * (u.sin() - u.cos()),
                0.5 * (u.sin() + u.cos()),
                0.0,
                0.0,
                0.0,
                -u.cos(),
                0.0,
                0.0,
                0.0,
                0.0,
                0.5,
                -0.5,
            ];
            for (k, (got, want)) in inv.values().iter().zip(want).enumerate() {
                assert!((got - want).abs() < 1e-12, "invariant {k}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn paper_example_is_integrable() {
        let s = build_surface(fixtures::paper_example()).unwrap();
        for &(u, v) in &[(1.0, 2.0), (PI, 0.0)] {
            for r in integrability_residuals(&s, u, v).unwrap() {
                assert!(r.abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn perturbed_f2_breaks_third_condition() {
        let s = build_surface(fixtures::paper_example()).unwrap();
        let mut inv = invariants_at(&s, 1.0, 2.0).unwrap();
        inv.f2 = inv.f2 + 0.1;
        let r = inv.integrability_residuals();
        let want = 2.0 * inv.b1.value() * 0.1;
        assert!((r[2] - want).abs() < 1e-12);
    }

    #[test]
    fn paper_example_strata() {
        let s = build_surface(fixtures::paper_example()).unwrap();
        assert_eq!(
            stratify(&s, 5.0 * PI / 4.0, 0.3, None).unwrap().tag,
            StratumTag::Lightlike
        );
        assert_eq!(
            stratify(&s, PI / 2.0, 0.3, None).unwrap().tag,
            StratumTag::SingularS1
        );
        let t = stratify(&s, PI, 0.3, None).unwrap();
        assert_eq!(t.tag, StratumTag::Timelike);
        assert!((t.lambda_tilde + 1.0).abs() < 1e-12);
        assert_eq!(
            stratify(&s, 3.0 * PI / 4.0, 0.3, None).unwrap().tag,
            StratumTag::Lightlike
        );
        assert_eq!(
            stratify(&s, 0.1, 0.3, None).unwrap().tag,
            StratumTag::Timelike
        );
        assert_eq!(
            stratify(&s, 1.2, 0.3, None).unwrap().tag,
            StratumTag::Spacelike
        );
    }

    #[test]
    fn frame_identities_hold() {
        let s = build_surface(fixtures::paper_example()).unwrap();
        for r in frame_identity_residuals(&s, 0.7, 2.2).unwrap() {
            assert!(r <= 1e-10);
        }
        let (v, w, m) = s.frame(0.7, 2.2).unwrap();
        let r = frame_identities(v, w, m.scale(1.1), MVec3::ZERO, 0.0);
        assert!((r[2] - 0.21).abs() < 1e-12);
    }

    #[test]
    fn swap_frame_is_involution() {
        let s = build_surface(fixtures::twisted_ruled()).unwrap();
        let inv = invariants_at(&s, 0.4, 0.3).unwrap();
        assert_eq!(inv.swap_frame().swap_frame().values(), inv.values());
        for r in inv.swap_frame().integrability_residuals() {
            assert!(r.abs() < 1e-9);
        }
    }
}
