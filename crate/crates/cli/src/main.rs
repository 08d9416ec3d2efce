//! `lightcone`: analysis of lightcone framed surfaces from the command line.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lightcone_core::expr::parse_expr;
use lightcone_core::focal::FocalBranch;
use lightcone_core::io::{
    export_mesh, load_config, run_analyze, run_probe, MeshKind, ProbeConfig, ReportView, RunConfig,
};
use lightcone_core::lightlike::ProbeOptions;
use lightcone_core::sweep::Execution;
use lightcone_core::verify;

const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERIC: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "lightcone",
    version,
    about = "Differential geometry of lightcone framed surfaces in Minkowski 3-space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full per-gridpoint report (JSON).
    Analyze(Common),
    /// Stratum and lightlike classification per gridpoint (JSON).
    Classify(Common),
    /// Focal roots and sheets per gridpoint (JSON).
    Focal(Common),
    /// Wavefront-style mesh of the surface or of a focal sheet.
    Mesh(Common),
    /// Curvature samples approaching a lightlike point (CSV).
    Probe {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        path: PathArgs,
    },
    /// Runs the acceptance suite and prints one PASS/FAIL line per criterion.
    Verify {
        /// Evaluate sweeps on one thread.
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long, value_name = "FILE", conflicts_with = "surface")]
    config: Option<PathBuf>,
    /// Built-in surface, used when no config is given.
    #[arg(long, value_name = "NAME", default_value = "paper-example")]
    surface: String,
    /// Grid size, e.g. 64x64.
    #[arg(long, value_name = "NUxNV", value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    /// Focal sheet to report or mesh.
    #[arg(long, value_enum)]
    branch: Option<BranchArg>,
    /// Relative tolerance.
    #[arg(long, value_name = "REL", env = "LIGHTCONE_TOL")]
    tol: Option<f64>,
    /// Output file; `-` or absent writes to stdout unless the config names one.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Exit 0 even when some points failed to evaluate.
    #[arg(long)]
    allow_partial: bool,
    /// Evaluate sweeps on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct PathArgs {
    /// u(t) of the probe path; `u` stands for t.
    #[arg(long, value_name = "EXPR", requires_all = ["path_v", "target"])]
    path_u: Option<String>,
    /// v(t) of the probe path.
    #[arg(long, value_name = "EXPR", requires_all = ["path_u", "target"])]
    path_v: Option<String>,
    /// Parameter value of the lightlike target.
    #[arg(long, value_name = "T", allow_negative_numbers = true)]
    target: Option<f64>,
    /// Number of samples.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BranchArg {
    Plus,
    Minus,
}

impl From<BranchArg> for FocalBranch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Plus => FocalBranch::Plus,
            BranchArg::Minus => FocalBranch::Minus,
        }
    }
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NUxNV, got `{s}`"))?;
    let n = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    Ok((n(a)?, n(b)?))
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

fn config_err(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        message: message.to_string(),
    }
}

fn numeric_err(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_NUMERIC,
        message: message.to_string(),
    }
}

impl Common {
    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    /// Config file, then `--grid`, `--tol` (or `LIGHTCONE_TOL`) and
    /// `--branch` on top.
    fn load(&self) -> Result<RunConfig, Failure> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
                load_config(&text).map_err(config_err)?
            }
            None => RunConfig::builtin(&self.surface).map_err(config_err)?,
        };
        if let Some((nu, nv)) = self.grid {
            cfg = cfg.with_grid(nu, nv).map_err(config_err)?;
        }
        if let Some(tol) = self.tol {
            cfg = cfg.with_tolerance(tol).map_err(config_err)?;
        }
        if let Some(b) = self.branch {
            cfg.branch = Some(b.into());
        }
        Ok(cfg)
    }

    fn write(&self, configured: Option<&Path>, text: &str) -> Result<(), Failure> {
        let target = self
            .out
            .as_deref()
            .or(configured)
            .filter(|p| *p != Path::new("-"));
        match target {
            Some(path) => {
                fs::write(path, text).map_err(|e| config_err(format!("{}: {e}", path.display())))
            }
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| config_err(format!("stdout: {e}"))),
        }
    }

    fn partial(&self, failed: usize, what: &str) -> Result<(), Failure> {
        if failed == 0 {
            return Ok(());
        }
        let message = format!("{failed} {what} failed to evaluate");
        if self.allow_partial {
            eprintln!("warning: {message}");
            Ok(())
        } else {
            Err(Failure {
                code: EXIT_PARTIAL,
                message,
            })
        }
    }
}

fn report(common: &Common, view: ReportView) -> Result<(), Failure> {
    let cfg = common.load()?;
    let r = run_analyze(&cfg, common.exec()).view(view);
    common.write(cfg.output.report.as_deref(), &r.to_json())?;
    common.partial(r.error_count(), "points")
}

fn mesh(common: &Common) -> Result<(), Failure> {
    let cfg = common.load()?;
    let m =
        export_mesh(&cfg, MeshKind::from_branch(cfg.branch), common.exec()).map_err(numeric_err)?;
    common.write(cfg.output.mesh.as_deref(), &m.text)?;
    common.partial(m.failed, "grid points")
}

fn probe(common: &Common, path: &PathArgs) -> Result<(), Failure> {
    let cfg = common.load()?;
    let mut pc = match (&path.path_u, &path.path_v, path.target) {
        (Some(u), Some(v), Some(t_target)) => ProbeConfig {
            u: parse_expr(u).map_err(|e| config_err(format!("--path-u: {e}")))?,
            v: parse_expr(v).map_err(|e| config_err(format!("--path-v: {e}")))?,
            t_target,
            options: cfg.probe.as_ref().map(|p| p.options).unwrap_or_default(),
        },
        _ => cfg.probe.clone().ok_or_else(|| {
            config_err("no probe: give --path-u, --path-v and --target or a [probe] section")
        })?,
    };
    if let Some(n) = path.samples {
        if n < 2 {
            return Err(config_err("--samples must be at least 2"));
        }
        pc.options = ProbeOptions {
            samples: n,
            ..pc.options
        };
    }
    let (r, csv) = run_probe(&cfg, &pc).map_err(numeric_err)?;
    common.write(cfg.output.probe.as_deref(), &csv)?;
    for (name, s) in [
        ("K_hat", &r.k_hat),
        ("H_hat", &r.h_hat),
        ("K", &r.k),
        ("H", &r.h),
    ] {
        match s.limit {
            Some(l) => eprintln!("{name}: {} ({l:e})", s.verdict.as_str()),
            None => eprintln!("{name}: {}", s.verdict.as_str()),
        }
    }
    Ok(())
}

fn run_verify(sequential: bool) -> Result<(), Failure> {
    let exec = if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let results = verify::run_all(exec);
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed == 0 {
        Ok(())
    } else {
        Err(numeric_err(format!(
            "{failed} of {} criteria failed",
            results.len()
        )))
    }
}

fn main() -> ExitCode {
    // Usage errors share the config exit status.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match &cli.command {
        Command::Analyze(c) => report(c, ReportView::Full),
        Command::Classify(c) => report(c, ReportView::Classify),
        Command::Focal(c) => report(c, ReportView::Focal),
        Command::Mesh(c) => mesh(c),
        Command::Probe { common, path } => probe(common, path),
        Command::Verify { sequential } => run_verify(*sequential),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
