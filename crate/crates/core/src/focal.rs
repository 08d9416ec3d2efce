//! Focal sheets `F = X − μn̂`.
//!
//! `μ` solves `K̂ᵣμ² + 2Ĥᵣμ + c₂λ̃ = 0` with the raw numerators of
//! [`crate::curvature`]. This is the equation `(d²ᵤᵥ)² − d²ᵤᵤd²ᵥᵥ = 0` for the
//! distance-squared family, whose determinant expands to
//! `−4c₂(K̂ᵣμ² + 2Ĥᵣμ + c₂λ̃)`; with the signed `K̂`, `Ĥ` the constant term
//! would pick up a spurious `sgn(c₂)`.

use serde::Serialize;
use thiserror::Error;

use crate::curvature::{bundle_from_invariants, curvature_jets, CurvatureBundle};
use crate::expr::DomainError;
use crate::jet::Jet2;
use crate::lightlike::classify_invariants;
use crate::minkowski::{MVec3, DISC_CLAMP};
use crate::surface::{
    stratify_invariants, InvariantField, LightlikeBranch, StratumTag, SurfaceDef, SurfacePoint,
};
use crate::sweep::{map_indexed, Execution, Grid};

/// Step of the finite-difference oracle.
pub const ORACLE_STEP: f64 = 1e-5;
/// Roots closer than this raise a branch cut.
pub const BRANCH_CUT_GAP: f64 = 1e-6;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum FocalError {
    #[error("no {branch} focal root at ({u}, {v})", branch = branch.as_str())]
    BranchUnavailable { u: f64, v: f64, branch: FocalBranch },
    #[error("double root at ({u}, {v}); mu has no derivatives there")]
    DoubleRootNoJet { u: f64, v: f64 },
    #[error("focal roots reorder inside the stencil around ({u}, {v})")]
    StencilCrossesBranchCut { u: f64, v: f64 },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Sheet selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FocalBranch {
    Plus,
    Minus,
}

impl FocalBranch {
    pub const BOTH: [FocalBranch; 2] = [FocalBranch::Plus, FocalBranch::Minus];

    pub fn as_str(self) -> &'static str {
        match self {
            FocalBranch::Plus => "plus",
            FocalBranch::Minus => "minus",
        }
    }

    fn index(self) -> usize {
        match self {
            FocalBranch::Plus => 0,
            FocalBranch::Minus => 1,
        }
    }
}

/// Which formula produced a root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootLabel {
    /// `−(Ĥᵣ + √D)/K̂ᵣ`.
    Plus,
    /// `−(Ĥᵣ − √D)/K̂ᵣ`.
    Minus,
    /// `−c₂λ̃/(2Ĥᵣ)` when `K̂ᵣ` vanishes.
    Linear,
}

impl RootLabel {
    fn serves(self, branch: FocalBranch) -> bool {
        matches!(
            (self, branch),
            (RootLabel::Linear, _)
                | (RootLabel::Plus, FocalBranch::Plus)
                | (RootLabel::Minus, FocalBranch::Minus)
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MuRoot {
    pub label: RootLabel,
    pub mu: f64,
    /// Order-2 jet of `μ`; `None` at a double root.
    pub jet: Option<Jet2>,
}

impl MuRoot {
    pub fn double_root(&self) -> bool {
        self.jet.is_none()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootsKind {
    Quadratic,
    Linear,
    /// `K̂ᵣ` and `Ĥᵣ` both vanish.
    Degenerate,
    /// Negative discriminant.
    Complex,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MuRoots {
    pub kind: RootsKind,
    pub roots: Vec<MuRoot>,
    pub k_raw: f64,
    pub h_raw: f64,
    /// `c₂λ̃`.
    pub constant: f64,
    pub discriminant: f64,
    pub tol: f64,
}

impl MuRoots {
    /// The root answering `branch`; the single linear root answers both.
    pub fn root(&self, branch: FocalBranch) -> Option<&MuRoot> {
        self.roots.iter().find(|r| r.label.serves(branch))
    }

    pub fn values(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.mu).collect()
    }

    /// `K̂ᵣμ² + 2Ĥᵣμ + c₂λ̃`.
    pub fn residual(&self, mu: f64) -> f64 {
        self.k_raw * mu * mu + 2.0 * self.h_raw * mu + self.constant
    }
}

/// Refines a root of `kμ² + 2hμ + c` into an order-2 jet by Newton steps in
/// jet arithmetic. Each step doubles the number of correct orders.
fn root_jet(k: Jet2, h: Jet2, c: Jet2, mu: f64, tol: f64) -> Option<Jet2> {
    let slope = 2.0 * k.value() * mu + 2.0 * h.value();
    if !(slope.abs() > tol) {
        return None;
    }
    let mut m = Jet2::constant(mu);
    for _ in 0..3 {
        let q = k * m * m + h * m * 2.0 + c;
        let dq = (k * m + h) * 2.0;
        m = m - q * dq.recip();
    }
    Some(m)
}

/// Roots of the focal quadratic for an invariant field.
pub fn mu_roots_of(inv: &InvariantField, rel_tol: f64) -> MuRoots {
    let cj = curvature_jets(inv);
    let k = cj.k_raw;
    let h = cj.h_raw;
    let c = (inv.c2 * cj.lambda_tilde).truncate(k.order());
    let (kv, hv, cv) = (k.value(), h.value(), c.value());
    let tol = inv.tol(rel_tol);
    let mut disc = hv * hv - cv * kv;
    let mut out = MuRoots {
        kind: RootsKind::Degenerate,
        roots: Vec::new(),
        k_raw: kv,
        h_raw: hv,
        constant: cv,
        discriminant: disc,
        tol,
    };
    if kv.abs() <= tol {
        if hv.abs() > tol {
            let mu = -cv / (2.0 * hv);
            let jet = root_jet(Jet2::constant(0.0), h, c, mu, tol);
            out.kind = RootsKind::Linear;
            out.roots.push(MuRoot {
                label: RootLabel::Linear,
                mu,
                jet,
            });
        }
        return out;
    }
    if disc.abs() <= DISC_CLAMP * (hv * hv + (cv * kv).abs()) {
        disc = 0.0;
    }
    out.discriminant = disc;
    if disc < 0.0 {
        out.kind = RootsKind::Complex;
        return out;
    }
    let sq = disc.sqrt();
    // q = −(h + sgn(h)√D) avoids cancellation; the roots are q/k and c/q.
    let q = -(hv + if hv >= 0.0 { sq } else { -sq });
    let (near, far) = if q == 0.0 {
        (0.0, 0.0)
    } else {
        (q / kv, cv / q)
    };
    let (plus, minus) = if hv >= 0.0 { (near, far) } else { (far, near) };
    out.kind = RootsKind::Quadratic;
    for (label, mu) in [(RootLabel::Plus, plus), (RootLabel::Minus, minus)] {
        let jet = if disc == 0.0 {
            None
        } else {
            root_jet(k, h, c, mu, tol)
        };
        out.roots.push(MuRoot { label, mu, jet });
    }
    out
}

/// Focal roots at `(u0, v0)`.
pub fn mu_roots(s: &SurfaceDef, u0: f64, v0: f64) -> Result<MuRoots, DomainError> {
    Ok(mu_roots_of(&s.point(u0, v0)?.inv, s.rel_tol()))
}

/// `(d²ᵤᵥ)² − d²ᵤᵤd²ᵥᵥ` for a candidate `μ`; zero exactly on the focal sheets.
pub fn distance_squared_degeneracy(inv: &InvariantField, mu: f64) -> f64 {
    let cj = curvature_jets(inv);
    let c1 = inv.c1.value();
    let c2 = inv.c2.value();
    let duu = 2.0 * (cj.e_tilde.value() + mu * cj.l_hat.value());
    let duv = 2.0 * c2 * (c1 + mu * cj.m_hat.value());
    let dvv = 2.0 * c2 * (c2 + mu * cj.n_hat.value());
    duv * duv - duu * dvv
}

/// Barred invariants from `μ`; `a₁`, `b₁` derivatives and `μ`'s own enter,
/// so the result sits one order below `μ`.
pub fn barred_field(inv: &InvariantField, mu: Jet2) -> InvariantField {
    let InvariantField {
        a1,
        b1,
        c1,
        c2,
        e1,
        f1,
        g1,
        e2,
        f2,
        g2,
        ..
    } = *inv;
    let one = Jet2::constant(1.0);
    InvariantField {
        a1: a1 * (one + mu * e1 + mu.du()) + mu * a1.du(),
        b1: b1 * (one + mu * e1 - mu.du()) - mu * b1.du(),
        c1: c1 + (mu * (a1 * g1 - b1 * f1)).scale(2.0),
        a2: a1 * (mu * e2 + mu.dv()) + mu * a1.dv(),
        b2: -(b1 * (-(mu * e2) + mu.dv())) - mu * b1.dv(),
        c2: c2 + (mu * (a1 * g2 - b1 * f2)).scale(2.0),
        ..*inv
    }
}

/// `(ā₁, b̄₁, c̄₁, ā₂, b̄₂, c̄₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BarredInvariants {
    pub a1: f64,
    pub b1: f64,
    pub c1: f64,
    pub a2: f64,
    pub b2: f64,
    pub c2: f64,
}

impl BarredInvariants {
    pub fn as_array(&self) -> [f64; 6] {
        [self.a1, self.b1, self.c1, self.a2, self.b2, self.c2]
    }

    fn of(f: &InvariantField) -> Self {
        BarredInvariants {
            a1: f.a1.value(),
            b1: f.b1.value(),
            c1: f.c1.value(),
            a2: f.a2.value(),
            b2: f.b2.value(),
            c2: f.c2.value(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FocalSheet {
    pub branch: FocalBranch,
    pub mu: f64,
    pub point: MVec3,
    pub inv: BarredInvariants,
    pub bundle: CurvatureBundle,
    /// Max difference to [`focal_invariant_oracle`], when it could run.
    pub oracle_residual: Option<f64>,
}

/// `F = X − μn̂`.
pub fn focal_point_at(p: &SurfacePoint, mu: f64) -> MVec3 {
    p.x - p.n_hat().scale(mu)
}

/// Sheet data at an evaluated point for a given root; no oracle.
pub fn sheet_at(
    p: &SurfacePoint,
    branch: FocalBranch,
    root: &MuRoot,
    rel_tol: f64,
) -> Result<FocalSheet, FocalError> {
    let jet = root
        .jet
        .ok_or(FocalError::DoubleRootNoJet { u: p.u, v: p.v })?;
    let bar = barred_field(&p.inv, jet);
    let bundle =
        bundle_from_invariants(&bar, p.frame_v.value(), p.frame_w.value(), bar.tol(rel_tol));
    Ok(FocalSheet {
        branch,
        mu: root.mu,
        point: focal_point_at(p, root.mu),
        inv: BarredInvariants::of(&bar),
        bundle,
        oracle_residual: None,
    })
}

fn branch_root(
    s: &SurfaceDef,
    u: f64,
    v: f64,
    branch: FocalBranch,
) -> Result<(SurfacePoint, MuRoot), FocalError> {
    let p = s.point(u, v)?;
    let roots = mu_roots_of(&p.inv, s.rel_tol());
    let root = *roots
        .root(branch)
        .ok_or(FocalError::BranchUnavailable { u, v, branch })?;
    Ok((p, root))
}

/// Focal point on `branch` at `(u0, v0)`.
pub fn focal_point(
    s: &SurfaceDef,
    u0: f64,
    v0: f64,
    branch: FocalBranch,
) -> Result<MVec3, FocalError> {
    let (p, root) = branch_root(s, u0, v0, branch)?;
    Ok(focal_point_at(&p, root.mu))
}

/// Barred invariants and curvatures on `branch`, with the oracle residual.
pub fn focal_invariants(
    s: &SurfaceDef,
    u0: f64,
    v0: f64,
    branch: FocalBranch,
) -> Result<FocalSheet, FocalError> {
    let (p, root) = branch_root(s, u0, v0, branch)?;
    let mut sheet = sheet_at(&p, branch, &root, s.rel_tol())?;
    sheet.oracle_residual = focal_invariant_oracle(s, u0, v0, branch).ok().map(|o| {
        o.as_array()
            .iter()
            .zip(sheet.inv.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    });
    Ok(sheet)
}

/// Curvature bundle of the sheet.
pub fn focal_curvatures(
    s: &SurfaceDef,
    u0: f64,
    v0: f64,
    branch: FocalBranch,
) -> Result<CurvatureBundle, FocalError> {
    let (p, root) = branch_root(s, u0, v0, branch)?;
    Ok(sheet_at(&p, branch, &root, s.rel_tol())?.bundle)
}

/// Barred invariants by central differences of `F` (step [`ORACLE_STEP`])
/// decomposed against the frame at the centre.
pub fn focal_invariant_oracle(
    s: &SurfaceDef,
    u0: f64,
    v0: f64,
    branch: FocalBranch,
) -> Result<BarredInvariants, FocalError> {
    let (_, centre) = branch_root(s, u0, v0, branch)?;
    let h = ORACLE_STEP;
    let grad = centre.jet.map(|j| j.gradient());
    let sample = |du: f64, dv: f64| -> Result<MVec3, FocalError> {
        let (u, v) = (u0 + du, v0 + dv);
        let p = s.point(u, v)?;
        let roots = mu_roots_of(&p.inv, s.rel_tol());
        let root = roots
            .root(branch)
            .ok_or(FocalError::StencilCrossesBranchCut { u: u0, v: v0 })?;
        let predicted = match grad {
            Some([gu, gv]) => centre.mu + gu * du + gv * dv,
            None => centre.mu,
        };
        let own = (root.mu - predicted).abs();
        if roots.roots.iter().any(|r| (r.mu - predicted).abs() < own) {
            return Err(FocalError::StencilCrossesBranchCut { u: u0, v: v0 });
        }
        Ok(focal_point_at(&p, root.mu))
    };
    let f_u = (sample(h, 0.0)? - sample(-h, 0.0)?).scale(0.5 / h);
    let f_v = (sample(0.0, h)? - sample(0.0, -h)?).scale(0.5 / h);
    let (fv, fw, m) = s.frame(u0, v0)?;
    Ok(BarredInvariants {
        a1: -0.5 * f_u.dot(fw),
        b1: -0.5 * f_u.dot(fv),
        c1: f_u.dot(m),
        a2: -0.5 * f_v.dot(fw),
        b2: -0.5 * f_v.dot(fv),
        c2: f_v.dot(m),
    })
}

/// Outcome of one relation check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckOutcome {
    NotApplicable,
    Holds,
    Fails,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationVerdict {
    pub outcome: CheckOutcome,
    /// The evaluated quantities, by name.
    pub values: Vec<(String, f64)>,
}

impl RelationVerdict {
    fn not_applicable() -> Self {
        RelationVerdict {
            outcome: CheckOutcome::NotApplicable,
            values: Vec::new(),
        }
    }

    fn decide(holds: bool, values: &[(&str, f64)]) -> Self {
        RelationVerdict {
            outcome: if holds {
                CheckOutcome::Holds
            } else {
                CheckOutcome::Fails
            },
            values: values.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

/// The four relations between strata of `X` and of its focal sheets.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationReport {
    /// Degenerate lightlike point of `X` ⇒ `ā₁ = 0` on the `μ → 0` branch.
    pub degenerate_lightlike: RelationVerdict,
    /// `a₁g₂ = b₁f₂` ⇒ (`c₂ = 0` ⇔ `c̄₂ = 0`) on every root.
    pub singular_iff: RelationVerdict,
    /// Lightlike, `Ĥ = 0`, `μ = 0`: `H̄̂ = 0` ⇔ `(μᵤ − 1)μᵤa₁ᵤ = 0`.
    pub mean_curvature: RelationVerdict,
    /// Lightlike, `K̂ = 0`, `μ = 0`: `K̄̂ = 0` ⇔ `(1 − μᵤ)μᵤa₁ᵤf₂ = 0`.
    pub gaussian_curvature: RelationVerdict,
}

/// Evaluates the relation checks at `(u0, v0)`.
pub fn relation_checks(s: &SurfaceDef, u0: f64, v0: f64) -> Result<RelationReport, DomainError> {
    let p = s.point(u0, v0)?;
    let inv = p.inv;
    let rel = s.rel_tol();
    let tol = inv.tol(rel);
    let roots = mu_roots_of(&inv, rel);
    let cj = curvature_jets(&inv);
    let lightlike = stratify_invariants(&inv, tol).tag == StratumTag::Lightlike;
    let zero_root = roots
        .roots
        .iter()
        .filter(|r| r.mu.abs() <= tol)
        .min_by(|a, b| a.mu.abs().total_cmp(&b.mu.abs()));
    let (a1, b1, c2) = (inv.a1.value(), inv.b1.value(), inv.c2.value());
    let (f2, g2) = (inv.f2.value(), inv.g2.value());

    let degenerate_lightlike = if lightlike && classify_invariants(&inv, rel).degenerate {
        let a_branch = LightlikeBranch::of(&inv) == LightlikeBranch::A1Zero;
        let phi_bar = match zero_root.and_then(|r| r.jet) {
            Some(mu) => {
                let bar = barred_field(&inv, mu);
                if a_branch {
                    bar.a1.value()
                } else {
                    bar.b1.value()
                }
            }
            // With μ = 0 the barred value is φ·(1 ± μᵤ), and φ vanishes.
            None => {
                if a_branch {
                    a1
                } else {
                    b1
                }
            }
        };
        RelationVerdict::decide(
            phi_bar.abs() <= tol,
            &[
                ("mu", zero_root.map_or(0.0, |r| r.mu)),
                ("phi_bar", phi_bar),
            ],
        )
    } else {
        RelationVerdict::not_applicable()
    };

    let twist = a1 * g2 - b1 * f2;
    let singular_iff = if twist.abs() <= tol && !roots.roots.is_empty() {
        let mut holds = true;
        let mut values = vec![("a1g2-b1f2", twist), ("c2", c2)];
        for r in &roots.roots {
            let c2_bar = c2 + 2.0 * r.mu * twist;
            holds &= (c2.abs() <= tol) == (c2_bar.abs() <= tol);
            values.push(("c2_bar", c2_bar));
        }
        RelationVerdict::decide(holds, &values)
    } else {
        RelationVerdict::not_applicable()
    };

    let a_branch = LightlikeBranch::of(&inv) == LightlikeBranch::A1Zero;
    let zero_jet = zero_root.and_then(|r| r.jet);
    let bar_bundle = zero_jet.map(|mu| {
        let bar = barred_field(&inv, mu);
        (
            bundle_from_invariants(&bar, p.frame_v.value(), p.frame_w.value(), bar.tol(rel)),
            mu,
        )
    });
    let a1u = inv.a1.u();
    let mean_curvature = match bar_bundle {
        Some((b, mu)) if lightlike && a_branch && cj.h_raw.value().abs() <= tol => {
            let mu_u = mu.u();
            let rhs = (mu_u - 1.0) * mu_u * a1u;
            RelationVerdict::decide(
                (b.h_hat.abs() <= b.tol) == (rhs.abs() <= tol),
                &[("H_bar_hat", b.h_hat), ("(mu_u-1)mu_u a1u", rhs)],
            )
        }
        _ => RelationVerdict::not_applicable(),
    };
    let gaussian_curvature = match bar_bundle {
        Some((b, mu)) if lightlike && a_branch && cj.k_raw.value().abs() <= tol => {
            let mu_u = mu.u();
            let rhs = (1.0 - mu_u) * mu_u * a1u * f2;
            RelationVerdict::decide(
                (b.k_hat.abs() <= b.tol) == (rhs.abs() <= tol),
                &[("K_bar_hat", b.k_hat), ("(1-mu_u)mu_u a1u f2", rhs)],
            )
        }
        _ => RelationVerdict::not_applicable(),
    };

    Ok(RelationReport {
        degenerate_lightlike,
        singular_iff,
        mean_curvature,
        gaussian_curvature,
    })
}

/// Roots at every grid node, assigned to two continuous sheets.
#[derive(Clone, Debug)]
pub struct BranchField {
    pub grid: Grid,
    /// Per node: the roots, or the evaluation error.
    pub roots: Vec<Result<MuRoots, DomainError>>,
    /// Per node and sheet (plus, minus): index into that node's roots.
    pub assign: Vec<[Option<usize>; 2]>,
    /// Nodes where the two roots come within [`BRANCH_CUT_GAP`].
    pub cut: Vec<bool>,
}

impl BranchField {
    pub fn root(&self, k: usize, branch: FocalBranch) -> Option<&MuRoot> {
        let idx = self.assign[k][branch.index()]?;
        self.roots[k].as_ref().ok().map(|r| &r.roots[idx])
    }

    pub fn mu(&self, k: usize, branch: FocalBranch) -> Option<f64> {
        self.root(k, branch).map(|r| r.mu)
    }
}

#[derive(Clone, Copy)]
struct Anchor {
    u: f64,
    v: f64,
    root: MuRoot,
}

impl Anchor {
    /// Second-order Taylor prediction of value and gradient at `(u, v)`.
    fn predict(&self, u: f64, v: f64) -> (f64, [f64; 2]) {
        let (du, dv) = (u - self.u, v - self.v);
        match self.root.jet {
            Some(j) => {
                let value = j.value()
                    + j.u() * du
                    + j.v() * dv
                    + 0.5 * (j.uu() * du * du + 2.0 * j.uv() * du * dv + j.vv() * dv * dv);
                let grad = [
                    j.u() + j.uu() * du + j.uv() * dv,
                    j.v() + j.uv() * du + j.vv() * dv,
                ];
                (value, grad)
            }
            None => (self.root.mu, [f64::NAN; 2]),
        }
    }
}

fn mismatch(root: &MuRoot, pred: (f64, [f64; 2]), h: f64) -> f64 {
    let mut cost = (root.mu - pred.0).abs();
    if let (Some(j), true) = (root.jet, pred.1[0].is_finite()) {
        let [gu, gv] = j.gradient();
        cost += h * ((gu - pred.1[0]).abs() + (gv - pred.1[1]).abs());
    }
    cost
}

/// Assigns the roots at one node given the last anchors of both sheets.
fn assign_node(
    roots: &MuRoots,
    u: f64,
    v: f64,
    anchors: &[Option<Anchor>; 2],
    h: f64,
) -> [Option<usize>; 2] {
    let preds = anchors.map(|a| a.map(|a| a.predict(u, v)));
    let cost = |i: usize, sheet: usize| match preds[sheet] {
        Some(p) => mismatch(&roots.roots[i], p, h),
        None => f64::INFINITY,
    };
    match roots.roots.len() {
        0 => [None, None],
        1 => {
            // With no anchors both costs are infinite and the root goes to sheet 0.
            if cost(0, 0) <= cost(0, 1) {
                [Some(0), None]
            } else {
                [None, Some(0)]
            }
        }
        _ => {
            let straight = cost(0, 0).min(1e300) + cost(1, 1).min(1e300);
            let crossed = cost(1, 0).min(1e300) + cost(0, 1).min(1e300);
            if crossed < straight {
                [Some(1), Some(0)]
            } else {
                [Some(0), Some(1)]
            }
        }
    }
}

/// Continues one line of nodes from the given anchors.
fn continue_line(
    nodes: &[(usize, f64, f64)],
    roots: &[Result<MuRoots, DomainError>],
    mut anchors: [Option<Anchor>; 2],
    h: f64,
) -> Vec<[Option<usize>; 2]> {
    nodes
        .iter()
        .map(|&(k, u, v)| {
            let Ok(r) = &roots[k] else {
                return [None, None];
            };
            let a = assign_node(r, u, v, &anchors, h);
            for sheet in 0..2 {
                if let Some(i) = a[sheet] {
                    anchors[sheet] = Some(Anchor {
                        u,
                        v,
                        root: r.roots[i],
                    });
                }
            }
            a
        })
        .collect()
}

/// Evaluates the roots on `grid` and continues both sheets: first down the
/// column `j = 0` from the first node, then along each row independently.
pub fn continue_branches(s: &SurfaceDef, grid: Grid, exec: Execution) -> BranchField {
    let roots: Vec<Result<MuRoots, DomainError>> = grid.map(exec, |u, v| mu_roots(s, u, v));
    let h = grid.step_u().abs().max(grid.step_v().abs());
    let column: Vec<(usize, f64, f64)> = (0..grid.nu)
        .map(|i| (grid.index(i, 0), grid.u(i), grid.v(0)))
        .collect();
    let col_assign = continue_line(&column, &roots, [None, None], h);

    // Anchors for each row: the most recent assigned root at or above it in
    // the seed column.
    let mut row_anchors = Vec::with_capacity(grid.nu);
    let mut last: [Option<Anchor>; 2] = [None, None];
    for (i, a) in col_assign.iter().enumerate() {
        let (k, u, v) = column[i];
        if let Ok(r) = &roots[k] {
            for sheet in 0..2 {
                if let Some(idx) = a[sheet] {
                    last[sheet] = Some(Anchor {
                        u,
                        v,
                        root: r.roots[idx],
                    });
                }
            }
        }
        row_anchors.push(last);
    }

    let rows: Vec<Vec<[Option<usize>; 2]>> = map_indexed(grid.nu, exec, |i| {
        let nodes: Vec<(usize, f64, f64)> = (1..grid.nv)
            .map(|j| (grid.index(i, j), grid.u(i), grid.v(j)))
            .collect();
        continue_line(&nodes, &roots, row_anchors[i], h)
    });

    let mut assign = vec![[None, None]; grid.len()];
    for (i, row) in rows.into_iter().enumerate() {
        assign[grid.index(i, 0)] = col_assign[i];
        for (j, a) in row.into_iter().enumerate() {
            assign[grid.index(i, j + 1)] = a;
        }
    }
    let cut = roots
        .iter()
        .map(|r| match r {
            Ok(r) if r.roots.len() == 2 => (r.roots[0].mu - r.roots[1].mu).abs() < BRANCH_CUT_GAP,
            _ => false,
        })
        .collect();
    BranchField {
        grid,
        roots,
        assign,
        cut,
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::fixtures;
    use crate::surface::build_surface;

    fn paper() -> SurfaceDef {
        build_surface(fixtures::paper_example()).unwrap()
    }

    fn sorted(mut xs: Vec<f64>) -> Vec<f64> {
        xs.sort_by(f64::total_cmp);
        xs
    }

    #[test]
    fn paper_roots() {
        let s = paper();
        for u in [0.3, 1.0, 2.0, 2.5, PI, 4.0, 4.5, 5.5] {
            let r = mu_roots(&s, u, 0.7).unwrap();
            assert_eq!(r.kind, RootsKind::Quadratic);
            let got = sorted(r.values());
            let want = sorted(vec![-1.0, (2.0 * u).cos()]);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-10, "u = {u}: {got:?} vs {want:?}");
            }
            for m in r.values() {
                assert!(r.residual(m).abs() < 1e-12);
                assert!(
                    distance_squared_degeneracy(&s.point(u, 0.7).unwrap().inv, m).abs() < 1e-10
                );
            }
        }
        let at_pi = sorted(mu_roots(&s, PI, 0.0).unwrap().values());
        assert!((at_pi[0] + 1.0).abs() < 1e-12 && (at_pi[1] - 1.0).abs() < 1e-12);
        let ll = sorted(mu_roots(&s, 5.0 * PI / 4.0, 0.0).unwrap().values());
        assert!((ll[0] + 1.0).abs() < 1e-12 && ll[1].abs() < 1e-12);
    }

    #[test]
    fn root_jets_match_closed_form() {
        let s = paper();
        let u = 2.0;
        let r = mu_roots(&s, u, 0.4).unwrap();
        let sheet2 = r.roots.iter().find(|x| (x.mu + 1.0).abs() > 1e-3).unwrap();
        let j = sheet2.jet.unwrap();
        assert!((j.u() + 2.0 * (2.0 * u).sin()).abs() < 1e-9);
        assert!((j.uu() + 4.0 * (2.0 * u).cos()).abs() < 1e-8);
        assert!(j.v().abs() < 1e-12);
    }

    #[test]
    fn sheets_match_closed_forms() {
        let s = paper();
        for u in [0.4, 1.2, 2.0, 2.9, 3.7, 4.2, 5.0] {
            let v = 0.9;
            let r = mu_roots(&s, u, v).unwrap();
            for root in &r.roots {
                let p = s.point(u, v).unwrap();
                let f = focal_point_at(&p, root.mu);
                let (su, cu) = u.sin_cos();
                let want = if (root.mu + 1.0).abs() < 1e-9 {
                    MVec3::new(2.0 * su, 0.0, 0.0)
                } else {
                    let c3 = 2.0 * cu.powi(3);
                    MVec3::new(2.0 * su.powi(3), c3 * v.sin(), c3 * v.cos())
                };
                assert!((f - want).max_abs() < 1e-10, "u = {u}: {f:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn barred_invariants_match_oracle() {
        let s = paper();
        for u in [PI / 3.0, 2.0, 2.8, 4.0] {
            for branch in FocalBranch::BOTH {
                let sheet = focal_invariants(&s, u, 0.5, branch).unwrap();
                assert!(sheet.oracle_residual.unwrap() < 1e-5, "{sheet:?}");
                let (su, cu) = u.sin_cos();
                let b = sheet.inv;
                if (sheet.mu + 1.0).abs() < 1e-9 {
                    assert!((b.a1 - cu).abs() < 1e-9 && (b.b1 - cu).abs() < 1e-9);
                    assert!(b.c2.abs() < 1e-9 && b.a2.abs() < 1e-9 && b.b2.abs() < 1e-9);
                } else {
                    assert!((b.a1 - 3.0 * su * cu * (su - cu)).abs() < 1e-9);
                    assert!((b.b1 - 3.0 * su * cu * (su + cu)).abs() < 1e-9);
                    assert!((b.c2 + 2.0 * cu.powi(3)).abs() < 1e-9);
                }
                let n = sheet.bundle.normal;
                assert!((sheet.bundle.lambda_tilde + n.dot(n)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn twisted_ruled_sheets_match_oracle() {
        let s = build_surface(fixtures::twisted_ruled()).unwrap();
        let mut checked = 0;
        for (u, v) in [(0.5, 0.2), (-1.0, 0.5), (1.5, -0.4), (-0.3, -0.8)] {
            for branch in FocalBranch::BOTH {
                let Ok(sheet) = focal_invariants(&s, u, v, branch) else {
                    continue;
                };
                if let Some(r) = sheet.oracle_residual {
                    assert!(r < 1e-5, "({u}, {v}) {branch:?}: {r}");
                    checked += 1;
                }
            }
        }
        assert!(checked >= 4);
    }

    #[test]
    fn continuation_follows_the_sheets() {
        let s = paper();
        let grid = Grid::new((0.0, 2.0 * PI), (0.0, 2.0 * PI), 40, 12);
        for exec in [Execution::Sequential, Execution::Parallel] {
            let field = continue_branches(&s, grid, exec);
            let mut kinds = [None::<bool>; 2];
            for k in 0..grid.len() {
                let (u, _) = grid.point(k);
                for (n, branch) in FocalBranch::BOTH.into_iter().enumerate() {
                    let mu = field.mu(k, branch).unwrap();
                    let is_one = (mu + 1.0).abs() < 1e-9;
                    let is_two = (mu - (2.0 * u).cos()).abs() < 1e-9;
                    assert!(is_one || is_two);
                    if is_one != is_two {
                        let prev = kinds[n].get_or_insert(is_one);
                        assert_eq!(*prev, is_one, "sheet {branch:?} jumps at u = {u}");
                    }
                }
            }
            assert_ne!(kinds[0], kinds[1]);
        }
    }

    #[test]
    fn relations() {
        let s = paper();
        let r = relation_checks(&s, 5.0 * PI / 4.0, 0.0).unwrap();
        assert_eq!(r.mean_curvature.outcome, CheckOutcome::NotApplicable);
        assert_eq!(r.gaussian_curvature.outcome, CheckOutcome::NotApplicable);

        let cubic = build_surface(fixtures::cubic_degenerate()).unwrap();
        let r = relation_checks(&cubic, 0.0, 0.3).unwrap();
        assert_eq!(r.degenerate_lightlike.outcome, CheckOutcome::Holds);
    }

    #[test]
    fn unavailable_branch() {
        let cubic = build_surface(fixtures::cubic_degenerate()).unwrap();
        let r = mu_roots(&cubic, 0.0, 0.0).unwrap();
        assert_eq!(r.kind, RootsKind::Degenerate);
        assert!(matches!(
            focal_point(&cubic, 0.0, 0.0, FocalBranch::Plus),
            Err(FocalError::BranchUnavailable { .. })
        ));
    }
}
