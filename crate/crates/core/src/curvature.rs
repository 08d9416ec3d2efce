//! Fundamental quantities, extended curvatures `K̂`, `Ĥ` and principal
//! curvatures of lightcone framed surfaces.
//!
//! With `X_u = a₁v + b₁w + c₁m` and `X_v = c₂m` the first fundamental form is
//! `E = Ẽ`, `F = c₂F̃`, `G = c₂²G̃` where `Ẽ = c₁² − 4a₁b₁`, `F̃ = c₁`, `G̃ = 1`,
//! and `n̂ = X_u∧m` is a normal field with `⟨n̂,n̂⟩ = −λ̃`.
//!
//! The raw numerators `K̂ᵣ = L̂N̂ − c₂M̂²` and `2Ĥᵣ = c₂L̂ − 2c₂M̂F̃ + N̂Ẽ` are
//! what the eigenvalue problem of the Weingarten map produces when the unit
//! normal is taken along `n̂`. The published `K̂`, `Ĥ` multiply both by
//! `sgn(c₂)`; the principal-curvature and focal quadratics below use the raw
//! pair, which agrees with the signed one wherever `c₂ > 0`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::DomainError;
use crate::jet::Jet2;
use crate::minkowski::{wedge, MVec3, DISC_CLAMP};
use crate::surface::{InvariantField, SurfaceDef, SurfacePoint};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum CurvatureError {
    #[error("lightlike point (lambda~ = {lambda_tilde:e})")]
    LightlikePoint { lambda_tilde: f64 },
    #[error("singular point (c2 = {c2:e})")]
    SingularPoint { c2: f64 },
    #[error("degenerate principal curvature at a singular point (H^ = {h_hat:e})")]
    DegeneratePrincipal { h_hat: f64 },
    #[error("principal curvatures are complex (discriminant {discriminant:e})")]
    ComplexPrincipal { discriminant: f64 },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Jets of the curvature numerators, shared with the focal sheets.
#[derive(Clone, Copy, Debug)]
pub struct CurvatureJets {
    pub lambda_tilde: Jet2,
    pub e_tilde: Jet2,
    pub l_hat: Jet2,
    pub m_hat: Jet2,
    pub n_hat: Jet2,
    /// `K̂ᵣ = L̂N̂ − c₂M̂²`.
    pub k_raw: Jet2,
    /// `Ĥᵣ = ½(c₂L̂ − 2c₂M̂F̃ + N̂Ẽ)`.
    pub h_raw: Jet2,
}

/// Curvature numerators of an invariant field. Derivatives of `a₁`, `b₁`
/// enter `L̂`, so the result is one order below the field.
pub fn curvature_jets(inv: &InvariantField) -> CurvatureJets {
    let InvariantField {
        a1,
        b1,
        c1,
        c2,
        e1,
        f1,
        g1,
        f2,
        g2,
        ..
    } = *inv;
    let lambda_tilde = (a1 * b1).scale(-4.0);
    let e_tilde = c1 * c1 + lambda_tilde;
    let l_hat =
        (a1 * (b1.du() - b1 * e1 + c1 * g1) - b1 * (a1.du() + a1 * e1 + c1 * f1)).scale(2.0);
    let m_hat = (a1 * g1 - b1 * f1).scale(2.0);
    let n_hat = (a1 * g2 - b1 * f2).scale(2.0);
    let k_raw = l_hat * n_hat - c2 * m_hat * m_hat;
    let h_raw = (c2 * l_hat - (c2 * m_hat * c1).scale(2.0) + n_hat * e_tilde).scale(0.5);
    CurvatureJets {
        lambda_tilde,
        e_tilde,
        l_hat,
        m_hat,
        n_hat,
        k_raw,
        h_raw,
    }
}

/// Pointwise curvature data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureBundle {
    pub e_tilde: f64,
    pub f_tilde: f64,
    pub g_tilde: f64,
    /// `n̂ = −a₁v + b₁w`.
    pub normal: MVec3,
    pub l_hat: f64,
    pub m_hat: f64,
    pub n_hat: f64,
    pub lambda_tilde: f64,
    /// `sgn(c₂)·K̂ᵣ`.
    pub k_hat: f64,
    /// `sgn(c₂)·Ĥᵣ`.
    pub h_hat: f64,
    pub k_hat_raw: f64,
    pub h_hat_raw: f64,
    /// `K̂/|λ̃|²`, present iff `|λ̃| > τ`.
    pub k: Option<f64>,
    /// `Ĥ/|λ̃|^{3/2}`, present iff `|λ̃| > τ`.
    pub h: Option<f64>,
    /// `+1` iff `c₂ ≥ 0`.
    pub sign: f64,
    pub c1: f64,
    pub c2: f64,
    /// Zero tolerance used for the optional fields.
    pub tol: f64,
}

/// Assembles the bundle from an invariant field and the frame vectors.
pub fn bundle_from_invariants(
    inv: &InvariantField,
    v: MVec3,
    w: MVec3,
    tol: f64,
) -> CurvatureBundle {
    let cj = curvature_jets(inv);
    let (a1, b1, c1, c2) = (
        inv.a1.value(),
        inv.b1.value(),
        inv.c1.value(),
        inv.c2.value(),
    );
    let sign = if c2 < 0.0 { -1.0 } else { 1.0 };
    let lambda_tilde = cj.lambda_tilde.value();
    let k_hat_raw = cj.k_raw.value();
    let h_hat_raw = cj.h_raw.value();
    let k_hat = sign * k_hat_raw;
    let h_hat = sign * h_hat_raw;
    let (k, h) = if lambda_tilde.abs() > tol {
        let l = lambda_tilde.abs();
        (Some(k_hat / (l * l)), Some(h_hat / (l * l.sqrt())))
    } else {
        (None, None)
    };
    CurvatureBundle {
        e_tilde: cj.e_tilde.value(),
        f_tilde: c1,
        g_tilde: 1.0,
        normal: v.scale(-a1) + w.scale(b1),
        l_hat: cj.l_hat.value(),
        m_hat: cj.m_hat.value(),
        n_hat: cj.n_hat.value(),
        lambda_tilde,
        k_hat,
        h_hat,
        k_hat_raw,
        h_hat_raw,
        k,
        h,
        sign,
        c1,
        c2,
        tol,
    }
}

/// Bundle at an already evaluated surface point.
pub fn bundle_at(p: &SurfacePoint, rel_tol: f64) -> CurvatureBundle {
    bundle_from_invariants(&p.inv, p.frame_v.value(), p.frame_w.value(), p.tol(rel_tol))
}

/// Curvature bundle at `(u0, v0)`.
pub fn curvature_bundle(s: &SurfaceDef, u0: f64, v0: f64) -> Result<CurvatureBundle, DomainError> {
    Ok(bundle_at(&s.point(u0, v0)?, s.rel_tol()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrincipalBranch {
    Regular,
    SingularLimit,
}

/// Rescaled principal curvatures `κ̂ᵢ = λ̃|λ̃|^{1/2}κᵢ` and principal vectors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrincipalData {
    pub kappa_hat: [f64; 2],
    /// `V̂ᵢ` in the `(∂u, ∂v)` basis.
    pub v_hat: [[f64; 2]; 2],
    pub branch: PrincipalBranch,
}

/// Principal data from a bundle.
///
/// Regular points solve `c₂κ̂² − 2Ĥᵣκ̂ + λ̃K̂ᵣ = 0`; at singular points
/// (`|c₂| ≤ τ`) the single limit value `K̂/(2Ĥ)` fills both slots.
pub fn principal_from_bundle(b: &CurvatureBundle) -> Result<PrincipalData, CurvatureError> {
    let tol = b.tol;
    if b.lambda_tilde.abs() <= tol {
        return Err(CurvatureError::LightlikePoint {
            lambda_tilde: b.lambda_tilde,
        });
    }
    let v_hat = |kappa: f64| {
        [
            b.lambda_tilde * b.n_hat - b.c2 * kappa * b.g_tilde,
            -b.lambda_tilde * b.m_hat + kappa * b.f_tilde,
        ]
    };
    if b.c2.abs() <= tol {
        if b.h_hat.abs() <= tol {
            return Err(CurvatureError::DegeneratePrincipal { h_hat: b.h_hat });
        }
        let kappa = b.k_hat / (2.0 * b.h_hat);
        return Ok(PrincipalData {
            kappa_hat: [kappa, kappa],
            v_hat: [v_hat(kappa), v_hat(kappa)],
            branch: PrincipalBranch::SingularLimit,
        });
    }
    let h = b.h_hat_raw;
    let cross = b.c2 * b.lambda_tilde * b.k_hat_raw;
    let mut disc = h * h - cross;
    if disc.abs() <= DISC_CLAMP * (h * h + cross.abs()) {
        disc = 0.0;
    }
    if disc < 0.0 {
        return Err(CurvatureError::ComplexPrincipal { discriminant: disc });
    }
    let r = disc.sqrt();
    let kappa = [(h + r) / b.c2, (h - r) / b.c2];
    Ok(PrincipalData {
        kappa_hat: kappa,
        v_hat: [v_hat(kappa[0]), v_hat(kappa[1])],
        branch: PrincipalBranch::Regular,
    })
}

/// Principal curvatures at `(u0, v0)`.
pub fn principal(s: &SurfaceDef, u0: f64, v0: f64) -> Result<PrincipalData, CurvatureError> {
    principal_from_bundle(&curvature_bundle(s, u0, v0)?)
}

/// Plain first and second fundamental forms `(E, F, G, L, M, N)` assembled
/// directly from the partials of `X`, with unit normal `sgn(c₂)·(X_u∧X_v)/‖X_u∧X_v‖`.
pub fn plain_fundamental_forms(p: &SurfacePoint) -> [f64; 6] {
    let xu = p.x_u.value();
    let xv = p.x_v.value();
    let xuu = p.x_u.partial(1, 0);
    let xuv = p.x_u.partial(0, 1);
    let xvv = p.x_v.partial(0, 1);
    let cross = wedge(xu, xv);
    let sign = if p.inv.c2.value() < 0.0 { -1.0 } else { 1.0 };
    let nu = cross.scale(sign / cross.norm());
    [
        xu.dot(xu),
        xu.dot(xv),
        xv.dot(xv),
        xuu.dot(nu),
        xuv.dot(nu),
        xvv.dot(nu),
    ]
}

/// Eigenvalues of `W = II·I⁻¹` by a direct 2×2 solve, ascending.
pub fn weingarten_eigenvalues(forms: [f64; 6]) -> Result<[f64; 2], CurvatureError> {
    let [e, f, g, l, m, n] = forms;
    let det_i = e * g - f * f;
    // W = II · I⁻¹ with I⁻¹ = [[g, −f], [−f, e]] / det I.
    let w11 = (l * g - m * f) / det_i;
    let w12 = (m * e - l * f) / det_i;
    let w21 = (m * g - n * f) / det_i;
    let w22 = (n * e - m * f) / det_i;
    let tr = w11 + w22;
    let det = w11 * w22 - w12 * w21;
    let disc = tr * tr / 4.0 - det;
    let scale = (tr * tr / 4.0).abs() + det.abs();
    let disc = if disc.abs() <= DISC_CLAMP * scale {
        0.0
    } else {
        disc
    };
    if disc < 0.0 {
        return Err(CurvatureError::ComplexPrincipal { discriminant: disc });
    }
    let r = disc.sqrt();
    Ok([tr / 2.0 - r, tr / 2.0 + r])
}

/// Independent check of [`principal`]: eigenvalues of the Weingarten matrix
/// built from the plain fundamental forms.
pub fn weingarten_oracle(s: &SurfaceDef, u0: f64, v0: f64) -> Result<[f64; 2], CurvatureError> {
    let p = s.point(u0, v0)?;
    let tol = p.tol(s.rel_tol());
    let lambda_tilde = p.inv.lambda_tilde().value();
    if lambda_tilde.abs() <= tol {
        return Err(CurvatureError::LightlikePoint { lambda_tilde });
    }
    let c2 = p.inv.c2.value();
    if c2.abs() <= tol {
        return Err(CurvatureError::SingularPoint { c2 });
    }
    weingarten_eigenvalues(plain_fundamental_forms(&p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::surface::build_surface;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn paper() -> SurfaceDef {
        build_surface(fixtures::paper_example()).unwrap()
    }

    #[test]
    fn closed_forms_on_timelike_band() {
        let s = paper();
        for k in 1..20 {
            let u = PI / 2.0 + PI * k as f64 / 20.0;
            let b = curvature_bundle(&s, u, 0.9).unwrap();
            assert!((b.lambda_tilde + (2.0 * u).cos()).abs() < 1e-12);
            assert!((b.k_hat + u.cos()).abs() < 1e-12);
            assert!((b.h_hat + u.sin().powi(2) * u.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn values_at_pi() {
        let b = curvature_bundle(&paper(), PI, 1.0).unwrap();
        assert!((b.k_hat - 1.0).abs() < 1e-12);
        assert!(b.h_hat.abs() < 1e-12);
        assert!((b.k.unwrap() - 1.0).abs() < 1e-12);
        assert!(b.h.unwrap().abs() < 1e-12);
    }

    #[test]
    fn lightlike_point_has_no_plain_curvature() {
        let b = curvature_bundle(&paper(), 5.0 * PI / 4.0, 0.0).unwrap();
        assert!(b.lambda_tilde.abs() < 1e-12);
        assert!((b.k_hat - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((b.h_hat - FRAC_1_SQRT_2 / 2.0).abs() < 1e-12);
        assert_eq!((b.k, b.h), (None, None));
    }

    #[test]
    fn principal_at_pi() {
        let s = paper();
        let p = principal(&s, PI, 0.4).unwrap();
        assert_eq!(p.branch, PrincipalBranch::Regular);
        let mut k = p.kappa_hat;
        k.sort_by(f64::total_cmp);
        assert!((k[0] + 1.0).abs() < 1e-12 && (k[1] - 1.0).abs() < 1e-12);
        let w = weingarten_oracle(&s, PI, 0.4).unwrap();
        assert!((w[0] + 1.0).abs() < 1e-12 && (w[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular_point_is_degenerate() {
        let err = principal(&paper(), PI / 2.0, 0.4).unwrap_err();
        assert!(matches!(err, CurvatureError::DegeneratePrincipal { .. }));
        assert!(matches!(
            principal(&paper(), PI / 4.0, 0.4).unwrap_err(),
            CurvatureError::LightlikePoint { .. }
        ));
    }

    #[test]
    fn repeated_root_when_discriminant_vanishes() {
        let mut b = curvature_bundle(&paper(), PI, 0.4).unwrap();
        b.h_hat_raw = 2.0;
        b.k_hat_raw = b.h_hat_raw * b.h_hat_raw / (b.c2 * b.lambda_tilde);
        let p = principal_from_bundle(&b).unwrap();
        assert_eq!(p.kappa_hat[0], p.kappa_hat[1]);
    }

    #[test]
    fn normal_properties() {
        let s = build_surface(fixtures::twisted_ruled()).unwrap();
        let p = s.point(0.7, -0.3).unwrap();
        let b = bundle_at(&p, s.rel_tol());
        assert!((b.lambda_tilde + b.normal.dot(b.normal)).abs() < 1e-10);
        assert!(b.normal.dot(p.x_u.value()).abs() < 1e-10);
        assert!(b.normal.dot(p.x_v.value()).abs() < 1e-10);
        let nh = wedge(p.x_u.value(), p.frame_m.value());
        assert!((nh - b.normal).max_abs() < 1e-10);
    }
    #[test]
    fn principal_matches_weingarten_oracle() {
        for spec in [fixtures::paper_example(), fixtures::twisted_ruled()] {
            let s = build_surface(spec).unwrap();
            let (u0, u1) = s.u_range();
            let (v0, v1) = s.v_range();
            let mut checked = 0;
            for i in 0..23 {
                for j in 0..7 {
                    let u = u0 + (u1 - u0) * (i as f64 + 0.37) / 23.0;
                    let v = v0 + (v1 - v0) * (j as f64 + 0.61) / 7.0;
                    let (Ok(p), Ok(w)) = (principal(&s, u, v), weingarten_oracle(&s, u, v)) else {
                        continue;
                    };
                    let lt = curvature_bundle(&s, u, v).unwrap().lambda_tilde;
                    let mut k = p.kappa_hat.map(|k| k / (lt * lt.abs().sqrt()));
                    k.sort_by(f64::total_cmp);
                    for (a, b) in k.iter().zip(w) {
                        assert!(
                            (a - b).abs() <= 1e-6 * (1.0 + b.abs()),
                            "{} at ({u}, {v}): {k:?} vs {w:?}",
                            s.name()
                        );
                    }
                    checked += 1;
                }
            }
            assert!(checked > 20, "{} checked only {checked}", s.name());
        }
    }
}
