//! Lightlike points: null vectors, the classification criteria, tracing of
//! the lightlike locus `λ̃ = 0` and numerical limit probes of `K`, `H`.
//!
//! The criteria are evaluated on jets. With `η = c₂∂u − c₁∂v` and `φ` the
//! vanishing one of `a₁`, `b₁` (`ψ` the other), `λ̃ = −4φψ` gives
//! `ηλ̃ = 4ψT₁`, `ηηλ̃ = 4ψT₂` once `T₁ = 0`, and `ηηηλ̃ = 4ψT₃` once
//! `T₁ = T₂ = 0`, where `T₁ = φᵥc₁ − φᵤc₂`, `T₂ = ηT₁`, `T₃ = ηT₂`.

use serde::Serialize;
use thiserror::Error;

use crate::curvature::curvature_bundle;
use crate::expr::{eval_f64, DomainError, Expr};
use crate::jet::Jet2;
use crate::surface::{
    invariants_at, stratify_invariants, InvariantField, LightlikeBranch, StratumTag, SurfaceDef,
};

/// Tolerance of the trace corrector along the gradient line.
pub const CORRECTOR_TOL: f64 = 1e-10;
/// Bound on `|λ̃|` at every emitted trace point.
pub const TRACE_LAMBDA_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum LightlikeError {
    #[error("({u}, {v}) is not lightlike (stratum {tag})", tag = tag.as_str())]
    NotLightlike { u: f64, v: f64, tag: StratumTag },
    #[error("no lightlike point within one step of ({u}, {v})")]
    SeedNotNearLocus { u: f64, v: f64 },
    #[error("gradient of lambda~ vanishes at ({u}, {v})")]
    DegenerateLocusPoint { u: f64, v: f64 },
    #[error("path point at t = {t} is not lightlike (stratum {tag})", tag = tag.as_str())]
    PathNotLightlikeAtTarget { t: f64, tag: StratumTag },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// `η = (η_u, η_v)` in the `(∂u, ∂v)` basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NullVector {
    pub eta_u: f64,
    pub eta_v: f64,
    /// `η₁²Ẽ + η₂²c₂² + 2η₁η₂c₁c₂`, the first fundamental form on `η`.
    pub residual: f64,
}

fn lightlike_point(s: &SurfaceDef, u: f64, v: f64) -> Result<InvariantField, LightlikeError> {
    let inv = invariants_at(s, u, v)?;
    let st = stratify_invariants(&inv, inv.tol(s.rel_tol()));
    if st.tag != StratumTag::Lightlike {
        return Err(LightlikeError::NotLightlike { u, v, tag: st.tag });
    }
    Ok(inv)
}

/// Null vector of an invariant field, without the stratum check.
pub fn null_vector_of(inv: &InvariantField) -> NullVector {
    let (a1, b1, c1, c2) = (
        inv.a1.value(),
        inv.b1.value(),
        inv.c1.value(),
        inv.c2.value(),
    );
    let (e1, e2) = (c2, -c1);
    let e_tilde = c1 * c1 - 4.0 * a1 * b1;
    let residual = e1 * e1 * e_tilde + e2 * e2 * c2 * c2 + 2.0 * e1 * e2 * c1 * c2;
    NullVector {
        eta_u: e1,
        eta_v: e2,
        residual,
    }
}

/// Null vector at a lightlike point.
pub fn null_vector(s: &SurfaceDef, u0: f64, v0: f64) -> Result<NullVector, LightlikeError> {
    Ok(null_vector_of(&lightlike_point(s, u0, v0)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KindTag {
    CuspidalEdge,
    Swallowtail,
    CuspidalButterfly,
    CuspidalLips,
    CuspidalBeaks,
    Undetermined,
}

impl KindTag {
    pub fn as_str(self) -> &'static str {
        match self {
            KindTag::CuspidalEdge => "cuspidal_edge",
            KindTag::Swallowtail => "swallowtail",
            KindTag::CuspidalButterfly => "cuspidal_butterfly",
            KindTag::CuspidalLips => "cuspidal_lips",
            KindTag::CuspidalBeaks => "cuspidal_beaks",
            KindTag::Undetermined => "undetermined",
        }
    }
}

/// Evaluated criterion quantities. The directional derivatives use the `η`
/// of the frame the criteria were evaluated in, which is `−η` on the `b₁ = 0`
/// branch; this flips the sign of the odd ones only.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witnesses {
    pub eta_lambda: f64,
    pub eta_eta_lambda: f64,
    pub eta3_lambda: f64,
    /// Determinant of the Hessian of `λ̃`.
    pub hessian_det: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    /// `φᵤᵤφᵥᵥ − φᵤᵥ²`.
    pub phi_hessian: f64,
    /// `2φᵤᵥc₁c₂ − φᵤᵤc₂² − φᵥᵥc₁²`.
    pub beaks: f64,
    /// `ψ`, the non-vanishing one of `a₁`, `b₁`.
    pub psi: f64,
    pub tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LightlikeKind {
    pub tag: KindTag,
    pub degenerate: bool,
    #[serde(skip)]
    pub branch: LightlikeBranch,
    pub witnesses: Witnesses,
}

/// `η f = c₂f_u − c₁f_v`.
fn eta(c1: Jet2, c2: Jet2, f: Jet2) -> Jet2 {
    c2 * f.du() - c1 * f.dv()
}

/// `T₃` expanded as a polynomial in the jet slots of `φ`, `c₁`, `c₂`. Equal to
/// `η T₂` identically; kept separate so the two can be checked against each
/// other.
pub fn t3_polynomial(phi: &Jet2, c1: &Jet2, c2: &Jet2) -> f64 {
    let p = |i, j| phi.get(i, j);
    let a = |i, j| c1.get(i, j);
    let b = |i, j| c2.get(i, j);
    let (c1, c2) = (a(0, 0), b(0, 0));
    let t1_u = p(0, 1) * a(1, 0) - p(2, 0) * c2 - p(1, 0) * b(1, 0) + p(1, 1) * c1;
    let t1_v = p(0, 2) * c1 + p(0, 1) * a(0, 1) - p(1, 0) * b(0, 1) - p(1, 1) * c2;
    let t1_uu = 2.0 * p(1, 1) * a(1, 0) + p(0, 1) * a(2, 0)
        - p(3, 0) * c2
        - 2.0 * p(2, 0) * b(1, 0)
        - p(1, 0) * b(2, 0)
        + p(2, 1) * c1;
    let t1_vv = p(0, 3) * c1 + 2.0 * p(0, 2) * a(0, 1) + p(0, 1) * a(0, 2)
        - 2.0 * p(1, 1) * b(0, 1)
        - p(1, 0) * b(0, 2)
        - p(1, 2) * c2;
    let t1_uv = p(1, 2) * c1 + p(0, 2) * a(1, 0) + p(1, 1) * a(0, 1) + p(0, 1) * a(1, 1)
        - p(2, 0) * b(0, 1)
        - p(1, 0) * b(1, 1)
        - p(2, 1) * c2
        - p(1, 1) * b(1, 0);
    (c2 * b(1, 0) - c1 * b(0, 1)) * t1_u
        + (c1 * a(0, 1) - c2 * a(1, 0)) * t1_v
        + c2 * c2 * t1_uu
        + c1 * c1 * t1_vv
        - 2.0 * c1 * c2 * t1_uv
}

/// Classifies a lightlike point from its invariant field; `rel_tol` sets the
/// degeneracy tolerance.
pub fn classify_invariants(inv: &InvariantField, rel_tol: f64) -> LightlikeKind {
    let branch = LightlikeBranch::of(inv);
    let field = match branch {
        LightlikeBranch::A1Zero => *inv,
        LightlikeBranch::B1Zero => inv.swap_frame(),
    };
    let (phi, psi, c1, c2) = (field.a1, field.b1, field.c1, field.c2);
    let tol = field.tol(rel_tol);

    let lambda = field.lambda_tilde();
    let d1 = eta(c1, c2, lambda);
    let d2 = eta(c1, c2, d1);
    let d3 = eta(c1, c2, d2);
    let hessian_det = lambda.uu() * lambda.vv() - lambda.uv() * lambda.uv();

    let t1 = phi.dv() * c1 - phi.du() * c2;
    let t2 = eta(c1, c2, t1);
    let t3 = t3_polynomial(&phi, &c1, &c2);

    let (cv1, cv2) = (c1.value(), c2.value());
    let phi_hessian = phi.uu() * phi.vv() - phi.uv() * phi.uv();
    let beaks = 2.0 * phi.uv() * cv1 * cv2 - phi.uu() * cv2 * cv2 - phi.vv() * cv1 * cv1;

    let psi_v = psi.value();
    let tau_cls = 1e-7 * (1.0 + psi_v.abs()) * (1.0 + cv1.abs() + cv2.abs()).powi(3);
    let degenerate = phi.value().abs() <= tol && phi.u().abs() <= tol && phi.v().abs() <= tol;
    let nonzero = |x: f64| x.abs() > tau_cls;
    let tag = if degenerate {
        if phi_hessian > tau_cls {
            KindTag::CuspidalLips
        } else if phi_hessian < -tau_cls && nonzero(beaks) {
            KindTag::CuspidalBeaks
        } else {
            KindTag::Undetermined
        }
    } else if nonzero(t1.value()) {
        KindTag::CuspidalEdge
    } else if nonzero(t2.value()) {
        KindTag::Swallowtail
    } else if nonzero(t3) {
        KindTag::CuspidalButterfly
    } else {
        KindTag::Undetermined
    };

    LightlikeKind {
        tag,
        degenerate,
        branch,
        witnesses: Witnesses {
            eta_lambda: d1.value(),
            eta_eta_lambda: d2.value(),
            eta3_lambda: d3.value(),
            hessian_det,
            t1: t1.value(),
            t2: t2.value(),
            t3,
            phi_hessian,
            beaks,
            psi: psi_v,
            tol: tau_cls,
        },
    }
}

/// Classifies the lightlike point `(u0, v0)`.
pub fn classify_lightlike(
    s: &SurfaceDef,
    u0: f64,
    v0: f64,
) -> Result<LightlikeKind, LightlikeError> {
    let inv = lightlike_point(s, u0, v0)?;
    Ok(classify_invariants(&inv, s.rel_tol()))
}

/// A traced piece of the lightlike locus.
#[derive(Clone, Debug, PartialEq)]
pub struct LocusTrace {
    pub points: Vec<(f64, f64)>,
    /// The march came back to its start.
    pub closed: bool,
}

struct Tracer<'a> {
    s: &'a SurfaceDef,
    step: f64,
}

impl Tracer<'_> {
    fn lambda(&self, u: f64, v: f64) -> Result<(Jet2, f64), DomainError> {
        let inv = invariants_at(self.s, u, v)?;
        Ok((inv.lambda_tilde(), inv.tol(self.s.rel_tol())))
    }

    /// Bisects `λ̃` along the gradient line through `p`, reaching at most
    /// `reach` away. `None` when no sign change is found.
    fn correct(&self, p: (f64, f64), reach: f64) -> Result<Option<(f64, f64)>, LightlikeError> {
        let (lam, tol) = self.lambda(p.0, p.1)?;
        let [gu, gv] = lam.gradient();
        let norm = gu.hypot(gv);
        if norm <= tol {
            return Err(LightlikeError::DegenerateLocusPoint { u: p.0, v: p.1 });
        }
        let dir = (gu / norm, gv / norm);
        let at = |t: f64| (p.0 + t * dir.0, p.1 + t * dir.1);
        let f = |t: f64| -> Result<f64, DomainError> {
            let q = at(t);
            Ok(self.lambda(q.0, q.1)?.0.value())
        };
        let f0 = lam.value();
        if f0 == 0.0 {
            return Ok(Some(p));
        }
        let guess = (-f0 / norm).clamp(-reach, reach);
        let mut r = (0.01 * self.step).min(reach);
        let bracket = loop {
            let (lo, hi) = ((guess - r).max(-reach), (guess + r).min(reach));
            let (flo, fhi) = (f(lo)?, f(hi)?);
            if flo == 0.0 {
                return Ok(Some(at(lo)));
            }
            if fhi == 0.0 {
                return Ok(Some(at(hi)));
            }
            if (flo < 0.0) != (fhi < 0.0) {
                break (lo, hi, flo);
            }
            if r >= 2.0 * reach {
                return Ok(None);
            }
            r *= 2.0;
        };
        let (mut lo, mut hi, flo) = bracket;
        let lo_neg = flo < 0.0;
        let mut best = (f64::INFINITY, 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let fm = f(mid)?;
            if fm.abs() < best.0 {
                best = (fm.abs(), mid);
            }
            if fm == 0.0 {
                break;
            }
            if (fm < 0.0) == lo_neg {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= CORRECTOR_TOL && best.0 <= TRACE_LAMBDA_TOL {
                break;
            }
            if hi - lo <= f64::EPSILON * (1.0 + mid.abs()) {
                break;
            }
        }
        Ok(Some(at(best.1)))
    }

    fn tangent(&self, p: (f64, f64)) -> Result<(f64, f64), LightlikeError> {
        let (lam, tol) = self.lambda(p.0, p.1)?;
        let [gu, gv] = lam.gradient();
        let norm = gu.hypot(gv);
        if norm <= tol {
            return Err(LightlikeError::DegenerateLocusPoint { u: p.0, v: p.1 });
        }
        Ok((-gv / norm, gu / norm))
    }

    /// Marches from `start` with initial orientation `sign`.
    fn march(
        &self,
        start: (f64, f64),
        sign: f64,
        max_steps: usize,
    ) -> Result<(Vec<(f64, f64)>, bool), LightlikeError> {
        let mut out = Vec::new();
        let mut p = start;
        let mut t = self.tangent(p)?;
        t = (sign * t.0, sign * t.1);
        for k in 0..max_steps {
            let pred = (p.0 + self.step * t.0, p.1 + self.step * t.1);
            let Some(q) = self.correct(pred, self.step)? else {
                break;
            };
            if !self.s.contains(q.0, q.1) {
                break;
            }
            if k >= 2 && (q.0 - start.0).hypot(q.1 - start.1) < 0.5 * self.step {
                return Ok((out, true));
            }
            let mut nt = self.tangent(q)?;
            if nt.0 * t.0 + nt.1 * t.1 < 0.0 {
                nt = (-nt.0, -nt.1);
            }
            out.push(q);
            p = q;
            t = nt;
        }
        Ok((out, false))
    }
}

/// Traces the lightlike locus through `seed` in both directions.
pub fn trace_lightlike_locus(
    s: &SurfaceDef,
    seed: (f64, f64),
    step: f64,
    max_steps: usize,
) -> Result<LocusTrace, LightlikeError> {
    let tracer = Tracer { s, step };
    let start = tracer
        .correct(seed, step)?
        .filter(|q| s.contains(q.0, q.1))
        .ok_or(LightlikeError::SeedNotNearLocus {
            u: seed.0,
            v: seed.1,
        })?;
    let (forward, closed) = tracer.march(start, 1.0, max_steps)?;
    let mut points = Vec::new();
    if !closed {
        let (mut backward, _) = tracer.march(start, -1.0, max_steps)?;
        backward.reverse();
        points.extend(backward);
    }
    points.push(start);
    points.extend(forward);
    Ok(LocusTrace { points, closed })
}

/// Geometric sampling toward a target parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeOptions {
    /// First offset; `t_k = t_target − δ₀rᵏ`. Negative values approach from
    /// above.
    pub delta0: f64,
    pub ratio: f64,
    pub samples: usize,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            delta0: 0.1,
            ratio: 0.5,
            samples: 24,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ConvergesToZero,
    ConvergesToNonzero,
    Diverges,
    Undetermined,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::ConvergesToZero => "converges-to-0",
            Verdict::ConvergesToNonzero => "converges-to-nonzero",
            Verdict::Diverges => "diverges",
            Verdict::Undetermined => "undetermined",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesVerdict {
    pub verdict: Verdict,
    /// Last sampled value for the converging verdicts.
    pub limit: Option<f64>,
}

/// Verdict on a sampled sequence; undefined samples are skipped.
pub fn judge(values: &[Option<f64>]) -> SeriesVerdict {
    let defined: Vec<f64> = values.iter().flatten().copied().collect();
    let undetermined = SeriesVerdict {
        verdict: Verdict::Undetermined,
        limit: None,
    };
    if defined.len() < 2 {
        return undetermined;
    }
    if defined.len() >= 5 {
        let tail = &defined[defined.len() - 5..];
        let growing = tail.windows(2).all(|w| w[1].abs() > w[0].abs());
        if growing && tail[4].abs() > 1e6 {
            return SeriesVerdict {
                verdict: Verdict::Diverges,
                limit: None,
            };
        }
    }
    let (prev, last) = (defined[defined.len() - 2], defined[defined.len() - 1]);
    if (last - prev).abs() <= 1e-6 * last.abs().max(1.0) {
        let verdict = if last.abs() <= 1e-6 {
            Verdict::ConvergesToZero
        } else {
            Verdict::ConvergesToNonzero
        };
        return SeriesVerdict {
            verdict,
            limit: Some(last),
        };
    }
    undetermined
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbeSample {
    pub t: f64,
    pub u: f64,
    pub v: f64,
    pub lambda_tilde: Option<f64>,
    pub k_hat: Option<f64>,
    pub h_hat: Option<f64>,
    pub k: Option<f64>,
    pub h: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub t_target: f64,
    pub samples: Vec<ProbeSample>,
    pub lambda_tilde: SeriesVerdict,
    pub k_hat: SeriesVerdict,
    pub h_hat: SeriesVerdict,
    pub k: SeriesVerdict,
    pub h: SeriesVerdict,
}

/// Samples `λ̃`, `K̂`, `Ĥ`, `K`, `H` along `t ↦ (u(t), v(t))` toward a lightlike
/// point. Path expressions use `u` as the variable `t`.
pub fn curvature_limit_probe(
    s: &SurfaceDef,
    path: (&Expr, &Expr),
    t_target: f64,
    opts: ProbeOptions,
) -> Result<ProbeReport, LightlikeError> {
    let at = |t: f64| -> Result<(f64, f64), DomainError> {
        Ok((eval_f64(path.0, t, 0.0)?, eval_f64(path.1, t, 0.0)?))
    };
    let (u, v) = at(t_target)?;
    let inv = invariants_at(s, u, v)?;
    let tag = stratify_invariants(&inv, inv.tol(s.rel_tol())).tag;
    if tag != StratumTag::Lightlike {
        return Err(LightlikeError::PathNotLightlikeAtTarget { t: t_target, tag });
    }
    let samples: Vec<ProbeSample> = (0..opts.samples)
        .map(|k| {
            let t = t_target - opts.delta0 * opts.ratio.powi(k as i32);
            let empty = |u, v| ProbeSample {
                t,
                u,
                v,
                lambda_tilde: None,
                k_hat: None,
                h_hat: None,
                k: None,
                h: None,
            };
            let Ok((u, v)) = at(t) else {
                return empty(f64::NAN, f64::NAN);
            };
            match curvature_bundle(s, u, v) {
                Ok(b) => ProbeSample {
                    t,
                    u,
                    v,
                    lambda_tilde: Some(b.lambda_tilde),
                    k_hat: Some(b.k_hat),
                    h_hat: Some(b.h_hat),
                    k: b.k,
                    h: b.h,
                },
                Err(_) => empty(u, v),
            }
        })
        .collect();
    let series =
        |f: fn(&ProbeSample) -> Option<f64>| judge(&samples.iter().map(f).collect::<Vec<_>>());
    Ok(ProbeReport {
        t_target,
        lambda_tilde: series(|p| p.lambda_tilde),
        k_hat: series(|p| p.k_hat),
        h_hat: series(|p| p.h_hat),
        k: series(|p| p.k),
        h: series(|p| p.h),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    use super::*;
    use crate::expr::parse_expr;
    use crate::fixtures::{self, synthetic_field};
    use crate::surface::build_surface;

    fn paper() -> SurfaceDef {
        build_surface(fixtures::paper_example()).unwrap()
    }

    fn classify_synthetic(a1: &str) -> LightlikeKind {
        let inv = synthetic_field(a1, "1", "0", "1", 0.0, 0.0).unwrap();
        classify_invariants(&inv, 1e-9)
    }

    #[test]
    fn null_vector_on_locus() {
        let s = paper();
        let n = null_vector(&s, 5.0 * PI / 4.0, 0.0).unwrap();
        assert!((n.eta_u - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(n.eta_v.abs() < 1e-12);
        assert!(n.residual.abs() <= 1e-10);
        assert!(matches!(
            null_vector(&s, PI, 0.0),
            Err(LightlikeError::NotLightlike {
                tag: StratumTag::Timelike,
                ..
            })
        ));
    }

    #[test]
    fn paper_locus_is_cuspidal_edge() {
        let s = paper();
        for u in [PI / 4.0, 3.0 * PI / 4.0, 5.0 * PI / 4.0, 7.0 * PI / 4.0] {
            let k = classify_lightlike(&s, u, 1.0).unwrap();
            assert_eq!(k.tag, KindTag::CuspidalEdge, "u = {u}");
            assert!(!k.degenerate);
            assert!(
                (k.witnesses.t1.abs() - 0.5).abs() < 1e-12,
                "{:?}",
                k.witnesses
            );
        }
        let k = classify_lightlike(&s, 5.0 * PI / 4.0, 0.3).unwrap();
        assert!((k.witnesses.t1 + 0.5).abs() < 1e-12);
        let w = k.witnesses;
        assert!((w.eta_lambda - 4.0 * w.psi * w.t1).abs() < 1e-12);
    }

    #[test]
    fn synthetic_kinds() {
        assert_eq!(classify_synthetic("v - u^2").tag, KindTag::Swallowtail);
        assert_eq!(
            classify_synthetic("v - u^3").tag,
            KindTag::CuspidalButterfly
        );
        assert_eq!(classify_synthetic("u^2 + v^2").tag, KindTag::CuspidalLips);
        let beaks = classify_synthetic("u^2 - v^2");
        assert_eq!(beaks.tag, KindTag::CuspidalBeaks);
        assert!(beaks.degenerate);
        assert_eq!(beaks.witnesses.phi_hessian, -4.0);
        assert_eq!(beaks.witnesses.beaks, -2.0);
        let und = classify_synthetic("u^2");
        assert_eq!(und.tag, KindTag::Undetermined);
        assert!(und.degenerate);
        assert_eq!(classify_synthetic("v - u^4").tag, KindTag::Undetermined);
    }

    #[test]
    fn witnesses_follow_the_expansions() {
        // Non-constant c's exercise every term of T₂ and T₃.
        let c1 = "0.3*u - 0.2*v^2 + 0.1*u*v";
        let c2 = "1 + 0.4*v + 0.2*u^2 - 0.1*u*v^2";
        let b1 = "1.5 + 0.2*u - 0.3*v";
        for a1 in ["0.7*v - 0.4*u + u^2*v - 0.5*v^3", "u*v + 0.3*u^3 - v^2*u"] {
            let inv = synthetic_field(a1, b1, c1, c2, 0.0, 0.0).unwrap();
            let k = classify_invariants(&inv, 1e-9);
            let w = k.witnesses;
            assert!((w.eta_lambda - 4.0 * w.psi * w.t1).abs() < 1e-12);
            // T₃ from the expanded polynomial equals η applied to T₂.
            let t2 = eta(inv.c1, inv.c2, inv.a1.dv() * inv.c1 - inv.a1.du() * inv.c2);
            let t3 = eta(inv.c1, inv.c2, t2).value();
            assert!((w.t3 - t3).abs() < 1e-12, "{} vs {}", w.t3, t3);
        }
    }

    #[test]
    fn degenerate_hessian_identity() {
        let inv =
            synthetic_field("u^2 - 0.5*u*v + 2*v^2", "0.8 + u", "0.2", "1.1", 0.0, 0.0).unwrap();
        let k = classify_invariants(&inv, 1e-9);
        let w = k.witnesses;
        assert!(k.degenerate);
        let expect = 16.0 * w.psi * w.psi * w.phi_hessian;
        assert!((w.hessian_det - expect).abs() <= 1e-12 * expect.abs());
        assert!((w.eta_eta_lambda - 4.0 * w.psi * w.beaks).abs() < 1e-12);
    }

    #[test]
    fn b1_branch_uses_swapped_frame() {
        // The mirror image of the beaks field on the other branch.
        let inv = synthetic_field("1", "u^2 - v^2", "0", "1", 0.0, 0.0).unwrap();
        let k = classify_invariants(&inv, 1e-9);
        assert_eq!(k.branch, LightlikeBranch::B1Zero);
        assert_eq!(k.tag, KindTag::CuspidalBeaks);
    }

    #[test]
    fn traces_straight_lines() {
        let s = paper();
        for u0 in [5.0 * PI / 4.0, 3.0 * PI / 4.0] {
            let tr = trace_lightlike_locus(&s, (u0 + 0.01, 1.0), 0.05, 500).unwrap();
            assert!(!tr.closed);
            assert!(tr.points.len() > 100);
            for &(u, v) in &tr.points {
                assert!((u - u0).abs() <= 1e-8, "u = {u}");
                let inv = invariants_at(&s, u, v).unwrap();
                assert!(inv.lambda_tilde().value().abs() <= TRACE_LAMBDA_TOL);
                let tag = stratify_invariants(&inv, inv.tol(s.rel_tol())).tag;
                assert_eq!(tag, StratumTag::Lightlike);
            }
            let vs: Vec<f64> = tr.points.iter().map(|p| p.1).collect();
            assert!(vs.windows(2).all(|w| w[1] > w[0]) || vs.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn seed_far_from_locus() {
        let s = paper();
        assert!(matches!(
            trace_lightlike_locus(&s, (0.1, 1.0), 0.05, 10),
            Err(LightlikeError::SeedNotNearLocus { .. })
        ));
    }

    #[test]
    fn probe_toward_lightlike_point() {
        let s = paper();
        let (pu, pv) = (parse_expr("u").unwrap(), parse_expr("0").unwrap());
        let r =
            curvature_limit_probe(&s, (&pu, &pv), 5.0 * PI / 4.0, ProbeOptions::default()).unwrap();
        assert_eq!(r.samples.len(), 24);
        assert_eq!(r.lambda_tilde.verdict, Verdict::ConvergesToZero);
        assert_eq!(r.k_hat.verdict, Verdict::ConvergesToNonzero);
        assert!((r.k_hat.limit.unwrap() - FRAC_1_SQRT_2).abs() < 1e-6);
        assert!((r.h_hat.limit.unwrap() - FRAC_1_SQRT_2 / 2.0).abs() < 1e-6);
        assert_eq!(r.k.verdict, Verdict::Diverges);
        assert_eq!(r.h.verdict, Verdict::Diverges);

        let err = curvature_limit_probe(&s, (&pu, &pv), PI, ProbeOptions::default()).unwrap_err();
        assert!(matches!(
            err,
            LightlikeError::PathNotLightlikeAtTarget { .. }
        ));
    }

    #[test]
    fn verdicts() {
        let v = |xs: &[f64]| judge(&xs.iter().map(|&x| Some(x)).collect::<Vec<_>>()).verdict;
        assert_eq!(v(&[1.0, 0.5, 1e-7, 1e-8]), Verdict::ConvergesToZero);
        assert_eq!(v(&[1.0, 2.0, 2.0]), Verdict::ConvergesToNonzero);
        assert_eq!(v(&[1e5, 1e6, 1e7, 1e8, 1e9]), Verdict::Diverges);
        assert_eq!(v(&[1.0, -1.0, 1.0]), Verdict::Undetermined);
        assert_eq!(judge(&[None, Some(1.0)]).verdict, Verdict::Undetermined);
    }
}
