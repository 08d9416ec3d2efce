//! Probe CSV: `t,lambda_tilde,K_hat,H_hat,K,H`.

use crate::io::config::{ProbeConfig, RunConfig};
use crate::io::num::fmt_num;
use crate::lightlike::{curvature_limit_probe, LightlikeError, ProbeReport};

pub const CSV_HEADER: &str = "t,lambda_tilde,K_hat,H_hat,K,H";

/// CSV text of a probe report; undefined cells are empty.
pub fn probe_csv(r: &ProbeReport) -> String {
    let cell = |x: Option<f64>| x.and_then(fmt_num).unwrap_or_default();
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for s in &r.samples {
        let cells = [Some(s.t), s.lambda_tilde, s.k_hat, s.h_hat, s.k, s.h].map(cell);
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Runs the probe described by `probe` on the configured surface.
pub fn run_probe(
    cfg: &RunConfig,
    probe: &ProbeConfig,
) -> Result<(ProbeReport, String), LightlikeError> {
    let r = curvature_limit_probe(
        &cfg.surface,
        (&probe.u, &probe.v),
        probe.t_target,
        probe.options,
    )?;
    let csv = probe_csv(&r);
    Ok((r, csv))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::expr::parse_expr;
    use crate::lightlike::ProbeOptions;

    fn probe(t: f64) -> ProbeConfig {
        ProbeConfig {
            u: parse_expr("u").unwrap(),
            v: parse_expr("0").unwrap(),
            t_target: t,
            options: ProbeOptions::default(),
        }
    }

    #[test]
    fn csv_shape() {
        let cfg = RunConfig::builtin("paper-example").unwrap();
        let (r, csv) = run_probe(&cfg, &probe(1.25 * PI)).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), r.samples.len() + 1);
        let last: Vec<&str> = lines.last().unwrap().split(',').collect();
        assert_eq!(last.len(), 6);
        let k: f64 = last[4].parse().unwrap();
        assert!(k.abs() > 1e6);
        let k_hat: f64 = last[2].parse().unwrap();
        assert!((k_hat - 0.5f64.sqrt()).abs() < 1e-6);
        assert_eq!(csv, run_probe(&cfg, &probe(1.25 * PI)).unwrap().1);
    }

    #[test]
    fn non_lightlike_target() {
        let cfg = RunConfig::builtin("paper-example").unwrap();
        assert!(matches!(
            run_probe(&cfg, &probe(PI)),
            Err(LightlikeError::PathNotLightlikeAtTarget { .. })
        ));
    }
}
