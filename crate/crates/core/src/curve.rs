//! Lightcone framed curves `(γ, ℓ⁺, ℓ⁻)` and the adapted-frame rescaling.
//!
//! Component expressions use `u` as the curve parameter `t`; `v` is unused
//! and evaluates to zero.

use thiserror::Error;

use crate::expr::DomainError;
use crate::minkowski::{CausalCharacter, JVec3, MVec3};
use crate::surface::ExprVec3;

/// Bound on the Δ₄ residuals accepted by [`curve_invariants`].
pub const FRAME_TOL: f64 = 1e-6;
/// Bound on the Δ₄ and span residuals checked by [`build_curve`].
pub const BUILD_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum CurveError {
    #[error("frame condition `{condition}` violated at t = {t}, residual {residual:e}")]
    FrameViolation {
        condition: &'static str,
        t: f64,
        residual: f64,
    },
    #[error("quadrature: {0}")]
    QuadratureError(String),
    #[error("invalid parameter interval [{0}, {1}]")]
    InvalidDomain(f64, f64),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FramedCurve {
    pub gamma: ExprVec3,
    pub lplus: ExprVec3,
    pub lminus: ExprVec3,
    pub t_range: (f64, f64),
}

/// Checks Δ₄ membership and `γ̇ ∈ span{ℓ⁺, ℓ⁻}` at nine sample parameters.
pub fn build_curve(c: FramedCurve) -> Result<FramedCurve, CurveError> {
    let (t0, t1) = c.t_range;
    if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
        return Err(CurveError::InvalidDomain(t0, t1));
    }
    for k in 0..9 {
        let t = t0 + (t1 - t0) * k as f64 / 8.0;
        let f = c.frame_jets(t)?;
        check_delta4(&f, t, BUILD_TOL)?;
        let n = f.lplus.wedge(&f.lminus).scale(-0.5).value();
        let r = f.gamma.du().value().dot(n);
        if !(r.abs() <= BUILD_TOL) {
            return Err(CurveError::FrameViolation {
                condition: "<gamma', n> = 0",
                t,
                residual: r,
            });
        }
    }
    Ok(c)
}

struct CurveJets {
    gamma: JVec3,
    lplus: JVec3,
    lminus: JVec3,
}

fn check_delta4(f: &CurveJets, t: f64, tol: f64) -> Result<(), CurveError> {
    let (p, m) = (f.lplus.value(), f.lminus.value());
    for (condition, r) in [
        ("<l+,l+> = 0", p.dot(p)),
        ("<l-,l-> = 0", m.dot(m)),
        ("<l+,l-> = -2", p.dot(m) + 2.0),
    ] {
        if !(r.abs() <= tol) {
            return Err(CurveError::FrameViolation {
                condition,
                t,
                residual: r,
            });
        }
    }
    Ok(())
}

impl FramedCurve {
    fn frame_jets(&self, t: f64) -> Result<CurveJets, DomainError> {
        Ok(CurveJets {
            gamma: self.gamma.jet(t, 0.0)?,
            lplus: self.lplus.jet(t, 0.0)?,
            lminus: self.lminus.jet(t, 0.0)?,
        })
    }

    /// `(γ, ℓ⁺, ℓ⁻)` at `t`.
    pub fn at(&self, t: f64) -> Result<(MVec3, MVec3, MVec3), DomainError> {
        Ok((
            self.gamma.value(t, 0.0)?,
            self.lplus.value(t, 0.0)?,
            self.lminus.value(t, 0.0)?,
        ))
    }

    /// `n = −½ ℓ⁺∧ℓ⁻` at `t`.
    pub fn normal(&self, t: f64) -> Result<MVec3, DomainError> {
        let (_, p, m) = self.at(t)?;
        Ok(p.wedge(m).scale(-0.5))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveInvariants {
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// Frame curvatures and velocity coefficients at `t`.
pub fn curve_invariants(c: &FramedCurve, t: f64) -> Result<CurveInvariants, CurveError> {
    let f = c.frame_jets(t)?;
    check_delta4(&f, t, FRAME_TOL)?;
    let n = f.lplus.wedge(&f.lminus).scale(-0.5);
    let (lp, lm) = (f.lplus.value(), f.lminus.value());
    let n_dot = n.du().value();
    let g_dot = f.gamma.du().value();
    Ok(CurveInvariants {
        kappa1: -0.5 * f.lplus.du().value().dot(lm),
        kappa2: -0.5 * n_dot.dot(lm),
        kappa3: -0.5 * n_dot.dot(lp),
        alpha: -0.5 * g_dot.dot(lm),
        beta: -0.5 * g_dot.dot(lp),
    })
}

/// Causal character of the curve at a point from the sign of `αβ`.
pub fn curve_causal_character(inv: &CurveInvariants, tol: f64) -> CausalCharacter {
    let ab = inv.alpha * inv.beta;
    if inv.alpha * inv.alpha + inv.beta * inv.beta <= tol {
        CausalCharacter::Zero
    } else if ab < -tol {
        CausalCharacter::Spacelike
    } else if ab > tol {
        CausalCharacter::Timelike
    } else {
        CausalCharacter::Lightlike
    }
}

/// A rescaled frame `ℓ̄⁺ = ℓ⁺/c`, `ℓ̄⁻ = c·ℓ⁻` with `c = exp(∫κ₁)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptedFrame {
    pub t: Vec<f64>,
    /// `c(t_k)`.
    pub c: Vec<f64>,
    pub lplus: Vec<MVec3>,
    pub lminus: Vec<MVec3>,
    /// `∫κ₁` from `t[0]` to `t[k]`.
    integral: Vec<f64>,
}

fn simpson_cell(c: &FramedCurve, a: f64, b: f64) -> Result<f64, CurveError> {
    let k = |t| curve_invariants(c, t).map(|i| i.kappa1);
    Ok((b - a) / 6.0 * (k(a)? + 4.0 * k(0.5 * (a + b))? + k(b)?))
}

/// Builds the adapted frame on `t_grid` by Simpson quadrature of `κ₁`
/// (one Simpson panel per grid cell, midpoint evaluated exactly).
pub fn adapted_rescale(c: &FramedCurve, t_grid: &[f64]) -> Result<AdaptedFrame, CurveError> {
    if t_grid.len() < 3 {
        return Err(CurveError::QuadratureError(format!(
            "grid has {} points, at least 3 are needed",
            t_grid.len()
        )));
    }
    if t_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(CurveError::QuadratureError(
            "grid is not strictly increasing".into(),
        ));
    }
    let mut integral = Vec::with_capacity(t_grid.len());
    integral.push(0.0);
    for w in t_grid.windows(2) {
        let last = *integral.last().unwrap();
        integral.push(last + simpson_cell(c, w[0], w[1])?);
    }
    let mut out = AdaptedFrame {
        t: t_grid.to_vec(),
        c: Vec::with_capacity(t_grid.len()),
        lplus: Vec::with_capacity(t_grid.len()),
        lminus: Vec::with_capacity(t_grid.len()),
        integral,
    };
    for (k, &t) in t_grid.iter().enumerate() {
        let ck = out.integral[k].exp();
        let (_, lp, lm) = c.at(t)?;
        out.c.push(ck);
        out.lplus.push(lp.scale(1.0 / ck));
        out.lminus.push(lm.scale(ck));
    }
    Ok(out)
}

impl AdaptedFrame {
    /// `c(t)` at any `t` inside the grid span, integrating from the nearest
    /// grid node at or below `t`.
    pub fn c_at(&self, curve: &FramedCurve, t: f64) -> Result<f64, CurveError> {
        let k = match self.t.partition_point(|&s| s <= t) {
            0 => 0,
            k => k - 1,
        };
        let base = self.integral[k];
        let extra = if t == self.t[k] {
            0.0
        } else {
            simpson_cell(curve, self.t[k], t)?
        };
        Ok((base + extra).exp())
    }

    /// `κ̄₁ = −½⟨dℓ̄⁺/dt, ℓ̄⁻⟩` at `t`, with the derivative taken by a
    /// five-point stencil of step `h`.
    pub fn kappa1_bar(&self, curve: &FramedCurve, t: f64, h: f64) -> Result<f64, CurveError> {
        let lbar = |s: f64| -> Result<MVec3, CurveError> {
            let (_, lp, _) = curve.at(s)?;
            Ok(lp.scale(1.0 / self.c_at(curve, s)?))
        };
        let d = (lbar(t - 2.0 * h)? - lbar(t + 2.0 * h)?
            + (lbar(t + h)? - lbar(t - h)?).scale(8.0))
        .scale(1.0 / (12.0 * h));
        let (_, _, lm) = curve.at(t)?;
        Ok(-0.5 * d.dot(lm.scale(self.c_at(curve, t)?)))
    }
}
