//! Per-gridpoint analysis report.

use serde::{Deserialize, Serialize};

use crate::curvature::{bundle_at, principal_from_bundle};
use crate::curve::{curve_causal_character, curve_invariants};
use crate::focal::{continue_branches, sheet_at, BranchField, FocalBranch, FocalError};
use crate::io::config::RunConfig;
use crate::io::num::serde_num;
use crate::lightlike::classify_invariants;
use crate::surface::{stratify_invariants, StratumTag};
use crate::sweep::{map_indexed, Execution};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub nu: usize,
    pub nv: usize,
    #[serde(with = "serde_num::vec")]
    pub u_range: Vec<f64>,
    #[serde(with = "serde_num::vec")]
    pub v_range: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KindRow {
    pub tag: String,
    pub degenerate: bool,
    #[serde(with = "serde_num")]
    pub eta_lambda: f64,
    #[serde(with = "serde_num")]
    pub eta_eta_lambda: f64,
    #[serde(with = "serde_num")]
    pub eta3_lambda: f64,
    #[serde(with = "serde_num")]
    pub hessian_det: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SheetRow {
    #[serde(with = "serde_num")]
    pub mu: f64,
    #[serde(with = "serde_num::vec")]
    pub point: Vec<f64>,
    #[serde(with = "serde_num::opt")]
    pub lambda_tilde: Option<f64>,
    #[serde(with = "serde_num::opt")]
    pub k_hat: Option<f64>,
    #[serde(with = "serde_num::opt")]
    pub h_hat: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    #[serde(with = "serde_num")]
    pub u: f64,
    #[serde(with = "serde_num")]
    pub v: f64,
    pub stratum: Option<StratumTag>,
    #[serde(with = "serde_num::opt")]
    pub lambda_tilde: Option<f64>,
    #[serde(rename = "K_hat", with = "serde_num::opt")]
    pub k_hat: Option<f64>,
    #[serde(rename = "H_hat", with = "serde_num::opt")]
    pub h_hat: Option<f64>,
    #[serde(rename = "K", with = "serde_num::opt")]
    pub k: Option<f64>,
    #[serde(rename = "H", with = "serde_num::opt")]
    pub h: Option<f64>,
    pub kappa_hat: Option<NumPair>,
    pub kind: Option<KindRow>,
    pub mu: Option<NumList>,
    pub branch_cut: bool,
    pub focal_plus: Option<SheetRow>,
    pub focal_minus: Option<SheetRow>,
    pub error: Option<String>,
}

/// A list of rounded numbers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NumList(#[serde(with = "serde_num::vec")] pub Vec<f64>);

pub type NumPair = NumList;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    #[serde(with = "serde_num")]
    pub t: f64,
    #[serde(with = "serde_num::opt")]
    pub kappa1: Option<f64>,
    #[serde(with = "serde_num::opt")]
    pub kappa2: Option<f64>,
    #[serde(with = "serde_num::opt")]
    pub kappa3: Option<f64>,
    #[serde(with = "serde_num::opt")]
    pub alpha: Option<f64>,
    #[serde(with = "serde_num::opt")]
    pub beta: Option<f64>,
    pub causal: Option<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub surface: String,
    pub config_hash: String,
    pub grid: GridInfo,
    #[serde(with = "serde_num")]
    pub rel_tol: f64,
    pub rows: Vec<ReportRow>,
    pub curve: Option<Vec<CurveRow>>,
}

/// Which row fields a report keeps; the rest are nulled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportView {
    Full,
    /// `u`, `v`, `stratum`, `lambda_tilde`, `kind`, `error`.
    Classify,
    /// `u`, `v`, `stratum`, `mu`, `branch_cut`, `focal_plus`, `focal_minus`, `error`.
    Focal,
}

impl Report {
    /// Nulls the fields outside `view`; `Classify` also clears `branch_cut`
    /// and drops the curve table.
    pub fn view(mut self, view: ReportView) -> Report {
        match view {
            ReportView::Full => {}
            ReportView::Classify => {
                for r in &mut self.rows {
                    (r.k_hat, r.h_hat, r.k, r.h, r.kappa_hat, r.mu) =
                        (None, None, None, None, None, None);
                    (r.focal_plus, r.focal_minus, r.branch_cut) = (None, None, false);
                }
                self.curve = None;
            }
            ReportView::Focal => {
                for r in &mut self.rows {
                    (r.lambda_tilde, r.k_hat, r.h_hat, r.k, r.h) = (None, None, None, None, None);
                    (r.kappa_hat, r.kind) = (None, None);
                }
                self.curve = None;
            }
        }
        self
    }

    /// Rows whose evaluation failed outright.
    pub fn error_count(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
            + self
                .curve
                .iter()
                .flatten()
                .filter(|r| r.error.is_some())
                .count()
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Report, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn sheet_row(
    field: &BranchField,
    cfg: &RunConfig,
    k: usize,
    branch: FocalBranch,
) -> Option<SheetRow> {
    if cfg.branch.is_some_and(|b| b != branch) {
        return None;
    }
    let root = field.root(k, branch)?;
    let (u, v) = field.grid.point(k);
    let p = cfg.surface.point(u, v).ok()?;
    match sheet_at(&p, branch, root, cfg.rel_tol) {
        Ok(sheet) => Some(SheetRow {
            mu: sheet.mu,
            point: sheet.point.to_array().to_vec(),
            lambda_tilde: Some(sheet.bundle.lambda_tilde),
            k_hat: Some(sheet.bundle.k_hat),
            h_hat: Some(sheet.bundle.h_hat),
        }),
        Err(FocalError::DoubleRootNoJet { .. }) => Some(SheetRow {
            mu: root.mu,
            point: crate::focal::focal_point_at(&p, root.mu)
                .to_array()
                .to_vec(),
            lambda_tilde: None,
            k_hat: None,
            h_hat: None,
        }),
        Err(_) => None,
    }
}

/// Runs every per-point analysis over the configured grid.
pub fn run_analyze(cfg: &RunConfig, exec: Execution) -> Report {
    let grid = cfg.grid;
    let s = &cfg.surface;
    let field = continue_branches(s, grid, exec);
    let rows = map_indexed(grid.len(), exec, |k| {
        let (u, v) = grid.point(k);
        let mut row = ReportRow {
            u,
            v,
            stratum: None,
            lambda_tilde: None,
            k_hat: None,
            h_hat: None,
            k: None,
            h: None,
            kappa_hat: None,
            kind: None,
            mu: None,
            branch_cut: field.cut[k],
            focal_plus: None,
            focal_minus: None,
            error: None,
        };
        let p = match s.point(u, v) {
            Ok(p) => p,
            Err(e) => {
                row.error = Some(e.to_string());
                return row;
            }
        };
        let tol = p.tol(cfg.rel_tol);
        let stratum = stratify_invariants(&p.inv, tol);
        row.stratum = Some(stratum.tag);
        let b = bundle_at(&p, cfg.rel_tol);
        row.lambda_tilde = Some(b.lambda_tilde);
        row.k_hat = Some(b.k_hat);
        row.h_hat = Some(b.h_hat);
        row.k = b.k;
        row.h = b.h;
        if !matches!(
            stratum.tag,
            StratumTag::Lightlike | StratumTag::DegenerateOther
        ) {
            row.kappa_hat = principal_from_bundle(&b)
                .ok()
                .map(|pd| NumList(pd.kappa_hat.to_vec()));
        }
        if stratum.tag == StratumTag::Lightlike {
            let kind = classify_invariants(&p.inv, cfg.rel_tol);
            row.kind = Some(KindRow {
                tag: kind.tag.as_str().to_string(),
                degenerate: kind.degenerate,
                eta_lambda: kind.witnesses.eta_lambda,
                eta_eta_lambda: kind.witnesses.eta_eta_lambda,
                eta3_lambda: kind.witnesses.eta3_lambda,
                hessian_det: kind.witnesses.hessian_det,
            });
        }
        if let Ok(roots) = &field.roots[k] {
            if !roots.roots.is_empty() {
                row.mu = Some(NumList(roots.values()));
            }
        }
        row.focal_plus = sheet_row(&field, cfg, k, FocalBranch::Plus);
        row.focal_minus = sheet_row(&field, cfg, k, FocalBranch::Minus);
        row
    });

    let curve = cfg.curve.as_ref().map(|c| {
        let (t0, t1) = c.t_range;
        let n = grid.nu;
        (0..n)
            .map(|i| {
                let t = if i + 1 == n {
                    t1
                } else {
                    t0 + (t1 - t0) * i as f64 / (n - 1) as f64
                };
                match curve_invariants(c, t) {
                    Ok(ci) => CurveRow {
                        t,
                        kappa1: Some(ci.kappa1),
                        kappa2: Some(ci.kappa2),
                        kappa3: Some(ci.kappa3),
                        alpha: Some(ci.alpha),
                        beta: Some(ci.beta),
                        causal: Some(
                            curve_causal_character(&ci, cfg.rel_tol)
                                .as_str()
                                .to_string(),
                        ),
                        error: None,
                    },
                    Err(e) => CurveRow {
                        t,
                        kappa1: None,
                        kappa2: None,
                        kappa3: None,
                        alpha: None,
                        beta: None,
                        causal: None,
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect()
    });

    Report {
        surface: s.name().to_string(),
        config_hash: cfg.fingerprint(),
        grid: GridInfo {
            nu: grid.nu,
            nv: grid.nv,
            u_range: vec![grid.u_range.0, grid.u_range.1],
            v_range: vec![grid.v_range.0, grid.v_range.1],
        },
        rel_tol: cfg.rel_tol,
        rows,
        curve,
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn small() -> RunConfig {
        RunConfig::builtin("paper-example")
            .unwrap()
            .with_grid(17, 5)
            .unwrap()
    }

    #[test]
    fn deterministic_and_round_trips() {
        let cfg = small();
        let a = run_analyze(&cfg, Execution::Parallel).to_json();
        let b = run_analyze(&cfg, Execution::Sequential).to_json();
        assert_eq!(a, b);
        let back = Report::from_json(&a).unwrap().to_json();
        assert_eq!(a, back);
    }

    #[test]
    fn rows_at_known_points() {
        let cfg = small();
        let r = run_analyze(&cfg, Execution::Parallel);
        assert_eq!(r.rows.len(), 17 * 5);
        assert_eq!(r.error_count(), 0);
        // u = π is row 8.
        let row = &r.rows[8 * 5];
        assert!((row.u - PI).abs() < 1e-12);
        assert_eq!(row.stratum, Some(StratumTag::Timelike));
        assert!((row.k.unwrap() - 1.0).abs() < 1e-9);
        assert!(row.h.unwrap().abs() < 1e-9);
        let json = r.to_json();
        assert!(!json.contains("NaN"));
    }

    #[test]
    fn views_null_other_fields() {
        let r = run_analyze(&small(), Execution::Parallel);
        let c = r.clone().view(ReportView::Classify);
        assert!(c
            .rows
            .iter()
            .all(|row| row.k_hat.is_none() && row.mu.is_none() && row.focal_plus.is_none()));
        assert!(c.rows.iter().all(|row| row.lambda_tilde.is_some()));
        let f = r.view(ReportView::Focal);
        assert!(f
            .rows
            .iter()
            .all(|row| row.lambda_tilde.is_none() && row.kind.is_none()));
        assert!(f.rows.iter().any(|row| row.focal_plus.is_some()));
    }

    #[test]
    fn lightlike_rows_carry_kind() {
        let cfg = RunConfig::builtin("paper-example")
            .unwrap()
            .with_grid(9, 3)
            .unwrap();
        let r = run_analyze(&cfg, Execution::Parallel);
        // u = π/4 is row 1 of a 9-node grid over [0, 2π].
        let row = &r.rows[3];
        assert_eq!(row.stratum, Some(StratumTag::Lightlike));
        assert_eq!(row.kind.as_ref().unwrap().tag, "cuspidal_edge");
        assert!(row.k.is_none() && row.h.is_none() && row.kappa_hat.is_none());
        let json = r.to_json();
        assert!(json.contains("\"K\": null"));
    }
}
