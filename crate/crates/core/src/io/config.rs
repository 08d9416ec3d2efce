//! Run configuration: a TOML document with the sections `surface`, `grid`,
//! `tolerance`, `output`, `focal`, `probe` and `curve`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use sha2::{Digest, Sha256};
use thiserror::Error;
use toml::{Table, Value};

use crate::curve::{build_curve, FramedCurve};
use crate::expr::{eval_f64, parse_expr, Expr};
use crate::fixtures;
use crate::focal::FocalBranch;
use crate::io::num::fmt_num;
use crate::lightlike::ProbeOptions;
use crate::minkowski::DEFAULT_REL_TOL;
use crate::surface::{build_surface, ExprVec3, SurfaceDef, SurfaceSpec};
use crate::sweep::Grid;

/// Grid size used when the config has no `[grid]` section.
pub const DEFAULT_GRID: usize = 64;

#[derive(Clone, Debug, Error, PartialEq)]
#[error("config error{}: `{key}`: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
pub struct ConfigError {
    /// 1-based line of the offending key or of its section.
    pub line: Option<usize>,
    pub key: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceSource {
    Builtin(String),
    Inline,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeConfig {
    pub u: Expr,
    pub v: Expr,
    pub t_target: f64,
    pub options: ProbeOptions,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OutputPaths {
    pub report: Option<PathBuf>,
    pub mesh: Option<PathBuf>,
    pub probe: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub surface: SurfaceDef,
    pub source: SurfaceSource,
    pub grid: Grid,
    pub rel_tol: f64,
    pub output: OutputPaths,
    /// `None` reports both sheets.
    pub branch: Option<FocalBranch>,
    pub probe: Option<ProbeConfig>,
    pub curve: Option<FramedCurve>,
}

impl RunConfig {
    /// Config for a built-in surface over its whole domain.
    pub fn builtin(name: &str) -> Result<RunConfig, ConfigError> {
        load_config(&format!("surface = \"{name}\"\n"))
    }

    /// Replaces the grid size, keeping the ranges.
    pub fn with_grid(mut self, nu: usize, nv: usize) -> Result<RunConfig, ConfigError> {
        check_grid_size("grid.nu", nu, None)?;
        check_grid_size("grid.nv", nv, None)?;
        self.grid = Grid::new(self.grid.u_range, self.grid.v_range, nu, nv);
        Ok(self)
    }

    pub fn with_tolerance(mut self, rel_tol: f64) -> Result<RunConfig, ConfigError> {
        if !(rel_tol.is_finite() && rel_tol > 0.0) {
            return Err(ConfigError {
                line: None,
                key: "tolerance.rel".into(),
                message: format!("must be a positive number, got {rel_tol}"),
            });
        }
        self.rel_tol = rel_tol;
        self.surface = self.surface.with_tolerance(rel_tol);
        Ok(self)
    }

    /// Normalized text of everything that affects computed output (not the
    /// output paths).
    pub fn canonical(&self) -> String {
        let n = |x: f64| fmt_num(x).unwrap_or_else(|| "nan".into());
        let spec = self.surface.spec();
        let mut s = String::new();
        let _ = writeln!(s, "surface.name = {}", spec.name);
        for (label, e) in [("X", &spec.x), ("v", &spec.v), ("w", &spec.w)] {
            for (k, c) in e.components().iter().enumerate() {
                let _ = writeln!(s, "surface.{label}.x{} = {c}", k + 1);
            }
        }
        let _ = writeln!(
            s,
            "surface.u_range = {} {}",
            n(spec.u_range.0),
            n(spec.u_range.1)
        );
        let _ = writeln!(
            s,
            "surface.v_range = {} {}",
            n(spec.v_range.0),
            n(spec.v_range.1)
        );
        let g = &self.grid;
        let _ = writeln!(
            s,
            "grid = {} {} {} {} {} {}",
            g.nu,
            g.nv,
            n(g.u_range.0),
            n(g.u_range.1),
            n(g.v_range.0),
            n(g.v_range.1)
        );
        let _ = writeln!(s, "tolerance.rel = {}", n(self.rel_tol));
        if let Some(b) = self.branch {
            let _ = writeln!(s, "focal.branch = {}", b.as_str());
        }
        if let Some(p) = &self.probe {
            let o = p.options;
            let _ = writeln!(
                s,
                "probe = {} {} {} {} {} {}",
                p.u,
                p.v,
                n(p.t_target),
                o.samples,
                n(o.delta0),
                n(o.ratio)
            );
        }
        if let Some(c) = &self.curve {
            for (label, e) in [
                ("gamma", &c.gamma),
                ("lplus", &c.lplus),
                ("lminus", &c.lminus),
            ] {
                let [a, b, d] = e.components();
                let _ = writeln!(s, "curve.{label} = {a}; {b}; {d}");
            }
            let _ = writeln!(s, "curve.t_range = {} {}", n(c.t_range.0), n(c.t_range.1));
        }
        s
    }

    /// SHA-256 of [`RunConfig::canonical`], lowercase hex.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Line numbers of keys and section headers, keyed by dotted path.
struct Locator {
    lines: HashMap<String, usize>,
}

impl Locator {
    fn new(text: &str) -> Self {
        let mut lines = HashMap::new();
        let mut section = String::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.starts_with('[') {
                let name = line.trim_start_matches('[').split(']').next().unwrap_or("");
                section = normalize_key(name);
                lines.entry(section.clone()).or_insert(n + 1);
            } else if let Some((k, _)) = line.split_once('=') {
                if line.starts_with('#') {
                    continue;
                }
                let key = normalize_key(k);
                let full = if section.is_empty() {
                    key
                } else {
                    format!("{section}.{key}")
                };
                lines.entry(full).or_insert(n + 1);
            }
        }
        Locator { lines }
    }

    /// Line of `key`, else of its nearest enclosing table.
    fn line(&self, key: &str) -> Option<usize> {
        let mut k = key;
        loop {
            if let Some(&l) = self.lines.get(k) {
                return Some(l);
            }
            k = k.rsplit_once('.')?.0;
        }
    }
}

fn normalize_key(k: &str) -> String {
    k.split('.')
        .map(|p| p.trim().trim_matches('"').trim_matches('\''))
        .collect::<Vec<_>>()
        .join(".")
}

struct Ctx {
    loc: Locator,
}

impl Ctx {
    fn err(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            line: self.loc.line(key),
            key: key.to_string(),
            message: message.into(),
        }
    }

    fn table<'a>(
        &self,
        parent: &'a Table,
        prefix: &str,
        name: &str,
    ) -> Result<Option<&'a Table>, ConfigError> {
        let key = join(prefix, name);
        match parent.get(name) {
            None => Ok(None),
            Some(Value::Table(t)) => Ok(Some(t)),
            Some(_) => Err(self.err(&key, "expected a table")),
        }
    }

    fn only_keys(&self, t: &Table, prefix: &str, allowed: &[&str]) -> Result<(), ConfigError> {
        for k in t.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(self.err(
                    &join(prefix, k),
                    format!("unknown key; expected one of {}", allowed.join(", ")),
                ));
            }
        }
        Ok(())
    }

    /// A number given as a TOML number or as a constant expression string.
    fn number(&self, key: &str, v: &Value) -> Result<f64, ConfigError> {
        let x = match v {
            Value::Integer(i) => *i as f64,
            Value::Float(f) => *f,
            Value::String(s) => {
                let e = parse_expr(s).map_err(|e| self.err(key, e.to_string()))?;
                if !e.is_constant() {
                    return Err(self.err(key, "expression must not mention u or v"));
                }
                eval_f64(&e, 0.0, 0.0).map_err(|e| self.err(key, e.to_string()))?
            }
            _ => return Err(self.err(key, "expected a number or a constant expression string")),
        };
        if !x.is_finite() {
            return Err(self.err(key, "not a finite number"));
        }
        Ok(x)
    }

    fn opt_number(&self, t: &Table, prefix: &str, name: &str) -> Result<Option<f64>, ConfigError> {
        let key = join(prefix, name);
        t.get(name).map(|v| self.number(&key, v)).transpose()
    }

    fn opt_int(&self, t: &Table, prefix: &str, name: &str) -> Result<Option<i64>, ConfigError> {
        let key = join(prefix, name);
        match t.get(name) {
            None => Ok(None),
            Some(Value::Integer(i)) => Ok(Some(*i)),
            Some(_) => Err(self.err(&key, "expected an integer")),
        }
    }

    fn opt_str<'a>(
        &self,
        t: &'a Table,
        prefix: &str,
        name: &str,
    ) -> Result<Option<&'a str>, ConfigError> {
        let key = join(prefix, name);
        match t.get(name) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(_) => Err(self.err(&key, "expected a string")),
        }
    }

    fn range(
        &self,
        t: &Table,
        prefix: &str,
        name: &str,
    ) -> Result<Option<(f64, f64)>, ConfigError> {
        let key = join(prefix, name);
        let Some(v) = t.get(name) else {
            return Ok(None);
        };
        let Value::Array(a) = v else {
            return Err(self.err(&key, "expected a two-element array"));
        };
        if a.len() != 2 {
            return Err(self.err(&key, "expected a two-element array"));
        }
        let (lo, hi) = (self.number(&key, &a[0])?, self.number(&key, &a[1])?);
        if !(lo < hi) {
            return Err(self.err(&key, format!("empty range [{lo}, {hi}]")));
        }
        Ok(Some((lo, hi)))
    }

    fn expr(&self, key: &str, v: Option<&Value>) -> Result<Expr, ConfigError> {
        match v {
            None => Err(self.err(key, "missing")),
            Some(Value::String(s)) => parse_expr(s).map_err(|e| self.err(key, e.to_string())),
            Some(_) => Err(self.err(key, "expected a quoted expression")),
        }
    }

    /// A vector of three expressions: a table `x1`, `x2`, `x3` or an array.
    fn vec3(&self, parent: &Table, prefix: &str, name: &str) -> Result<ExprVec3, ConfigError> {
        let key = join(prefix, name);
        match parent.get(name) {
            None => Err(self.err(&key, "missing")),
            Some(Value::Table(t)) => {
                self.only_keys(t, &key, &["x1", "x2", "x3"])?;
                Ok(ExprVec3::new(
                    self.expr(&format!("{key}.x1"), t.get("x1"))?,
                    self.expr(&format!("{key}.x2"), t.get("x2"))?,
                    self.expr(&format!("{key}.x3"), t.get("x3"))?,
                ))
            }
            Some(Value::Array(a)) if a.len() == 3 => Ok(ExprVec3::new(
                self.expr(&format!("{key}.x1"), a.first())?,
                self.expr(&format!("{key}.x2"), a.get(1))?,
                self.expr(&format!("{key}.x3"), a.get(2))?,
            )),
            Some(_) => Err(self.err(
                &key,
                "expected a table with x1, x2, x3 or an array of three expressions",
            )),
        }
    }
}

fn join(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_string()
    } else {
        format!("{prefix}.{name}")
    }
}

fn check_grid_size(key: &str, n: usize, line: Option<usize>) -> Result<(), ConfigError> {
    if n < 2 {
        return Err(ConfigError {
            line,
            key: key.into(),
            message: format!("needs at least 2 nodes, got {n}"),
        });
    }
    Ok(())
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())]
        .bytes()
        .filter(|&b| b == b'\n')
        .count()
        + 1
}

fn builtin_spec(ctx: &Ctx, key: &str, name: &str) -> Result<SurfaceSpec, ConfigError> {
    fixtures::by_name(name).ok_or_else(|| {
        ctx.err(
            key,
            format!(
                "unknown built-in surface `{name}`; known: {}",
                fixtures::NAMES.join(", ")
            ),
        )
    })
}

/// Parses and validates a run configuration.
pub fn load_config(text: &str) -> Result<RunConfig, ConfigError> {
    let root: Table = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| line_of_offset(text, s.start));
        ConfigError {
            line,
            key: String::new(),
            message: e.message().to_string(),
        }
    })?;
    let ctx = Ctx {
        loc: Locator::new(text),
    };
    ctx.only_keys(
        &root,
        "",
        &[
            "surface",
            "grid",
            "tolerance",
            "output",
            "focal",
            "probe",
            "curve",
        ],
    )?;

    let (spec, source) = match root.get("surface") {
        None => return Err(ctx.err("surface", "missing")),
        Some(Value::String(name)) => (
            builtin_spec(&ctx, "surface", name)?,
            SurfaceSource::Builtin(name.clone()),
        ),
        Some(Value::Table(t)) => {
            if let Some(name) = ctx.opt_str(t, "surface", "builtin")? {
                ctx.only_keys(t, "surface", &["builtin", "u_range", "v_range"])?;
                let mut spec = builtin_spec(&ctx, "surface.builtin", name)?;
                if let Some(r) = ctx.range(t, "surface", "u_range")? {
                    spec.u_range = r;
                }
                if let Some(r) = ctx.range(t, "surface", "v_range")? {
                    spec.v_range = r;
                }
                (spec, SurfaceSource::Builtin(name.to_string()))
            } else {
                ctx.only_keys(t, "surface", &["name", "u_range", "v_range", "X", "v", "w"])?;
                let spec = SurfaceSpec {
                    name: ctx
                        .opt_str(t, "surface", "name")?
                        .unwrap_or("custom")
                        .to_string(),
                    x: ctx.vec3(t, "surface", "X")?,
                    v: ctx.vec3(t, "surface", "v")?,
                    w: ctx.vec3(t, "surface", "w")?,
                    u_range: ctx
                        .range(t, "surface", "u_range")?
                        .ok_or_else(|| ctx.err("surface.u_range", "missing"))?,
                    v_range: ctx
                        .range(t, "surface", "v_range")?
                        .ok_or_else(|| ctx.err("surface.v_range", "missing"))?,
                };
                (spec, SurfaceSource::Inline)
            }
        }
        Some(_) => return Err(ctx.err("surface", "expected a built-in name or a table")),
    };

    let mut rel_tol = DEFAULT_REL_TOL;
    if let Some(t) = ctx.table(&root, "", "tolerance")? {
        ctx.only_keys(t, "tolerance", &["rel"])?;
        if let Some(r) = ctx.opt_number(t, "tolerance", "rel")? {
            if r <= 0.0 {
                return Err(ctx.err("tolerance.rel", "must be positive"));
            }
            rel_tol = r;
        }
    }

    let surface = build_surface(spec.clone())
        .map_err(|e| ctx.err("surface", e.to_string()))?
        .with_tolerance(rel_tol);

    let (mut nu, mut nv) = (DEFAULT_GRID, DEFAULT_GRID);
    let (mut u_range, mut v_range) = (spec.u_range, spec.v_range);
    if let Some(t) = ctx.table(&root, "", "grid")? {
        ctx.only_keys(t, "grid", &["nu", "nv", "u_range", "v_range"])?;
        for (name, slot) in [("nu", &mut nu), ("nv", &mut nv)] {
            if let Some(n) = ctx.opt_int(t, "grid", name)? {
                let key = format!("grid.{name}");
                if n < 2 {
                    return Err(ctx.err(&key, format!("needs at least 2 nodes, got {n}")));
                }
                *slot = usize::try_from(n).map_err(|_| ctx.err(&key, "too large"))?;
            }
        }
        for (name, slot, domain) in [
            ("u_range", &mut u_range, spec.u_range),
            ("v_range", &mut v_range, spec.v_range),
        ] {
            if let Some(r) = ctx.range(t, "grid", name)? {
                if r.0 < domain.0 || r.1 > domain.1 {
                    return Err(ctx.err(
                        &format!("grid.{name}"),
                        format!(
                            "[{}, {}] is not inside the surface domain [{}, {}]",
                            r.0, r.1, domain.0, domain.1
                        ),
                    ));
                }
                *slot = r;
            }
        }
    }

    let mut output = OutputPaths::default();
    if let Some(t) = ctx.table(&root, "", "output")? {
        ctx.only_keys(t, "output", &["report", "mesh", "probe"])?;
        output.report = ctx.opt_str(t, "output", "report")?.map(PathBuf::from);
        output.mesh = ctx.opt_str(t, "output", "mesh")?.map(PathBuf::from);
        output.probe = ctx.opt_str(t, "output", "probe")?.map(PathBuf::from);
    }

    let mut branch = None;
    if let Some(t) = ctx.table(&root, "", "focal")? {
        ctx.only_keys(t, "focal", &["branch"])?;
        branch = match ctx.opt_str(t, "focal", "branch")? {
            None => None,
            Some(b) => Some(
                parse_branch(b)
                    .ok_or_else(|| ctx.err("focal.branch", "expected \"plus\" or \"minus\""))?,
            ),
        };
    }

    let probe = match ctx.table(&root, "", "probe")? {
        None => None,
        Some(t) => {
            ctx.only_keys(
                t,
                "probe",
                &["u", "v", "t_target", "samples", "delta0", "ratio"],
            )?;
            let mut options = ProbeOptions::default();
            if let Some(n) = ctx.opt_int(t, "probe", "samples")? {
                if n < 2 {
                    return Err(ctx.err("probe.samples", "needs at least 2 samples"));
                }
                options.samples = n as usize;
            }
            if let Some(d) = ctx.opt_number(t, "probe", "delta0")? {
                if d == 0.0 {
                    return Err(ctx.err("probe.delta0", "must be non-zero"));
                }
                options.delta0 = d;
            }
            if let Some(r) = ctx.opt_number(t, "probe", "ratio")? {
                if !(r > 0.0 && r < 1.0) {
                    return Err(ctx.err("probe.ratio", "must lie in (0, 1)"));
                }
                options.ratio = r;
            }
            Some(ProbeConfig {
                u: ctx.expr("probe.u", t.get("u"))?,
                v: ctx.expr("probe.v", t.get("v"))?,
                t_target: match t.get("t_target") {
                    Some(v) => ctx.number("probe.t_target", v)?,
                    None => return Err(ctx.err("probe.t_target", "missing")),
                },
                options,
            })
        }
    };

    let curve = match ctx.table(&root, "", "curve")? {
        None => None,
        Some(t) => {
            ctx.only_keys(t, "curve", &["gamma", "lplus", "lminus", "t_range"])?;
            let c = FramedCurve {
                gamma: ctx.vec3(t, "curve", "gamma")?,
                lplus: ctx.vec3(t, "curve", "lplus")?,
                lminus: ctx.vec3(t, "curve", "lminus")?,
                t_range: ctx
                    .range(t, "curve", "t_range")?
                    .ok_or_else(|| ctx.err("curve.t_range", "missing"))?,
            };
            Some(build_curve(c).map_err(|e| ctx.err("curve", e.to_string()))?)
        }
    };

    Ok(RunConfig {
        surface,
        source,
        grid: Grid::new(u_range, v_range, nu, nv),
        rel_tol,
        output,
        branch,
        probe,
        curve,
    })
}

pub fn parse_branch(s: &str) -> Option<FocalBranch> {
    match s {
        "plus" => Some(FocalBranch::Plus),
        "minus" => Some(FocalBranch::Minus),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    const INLINE: &str = r#"
[surface]
name = "sphere-band"
u_range = [0, "2*pi"]
v_range = [0, "2*pi"]

[surface.X]
x1 = "sin(u)"
x2 = "cos(u)*sin(v)"
x3 = "cos(u)*cos(v)"

[surface.v]
x1 = "1"
x2 = "sin(v)"
x3 = "cos(v)"

[surface.w]
x1 = "1"
x2 = "-sin(v)"
x3 = "-cos(v)"

[grid]
nu = 64
nv = 64
"#;

    #[test]
    fn builtin_name() {
        let c = load_config("surface = \"paper-example\"\n[grid]\nnu = 64\nnv = 64\n").unwrap();
        assert_eq!(c.source, SurfaceSource::Builtin("paper-example".into()));
        assert_eq!((c.grid.nu, c.grid.nv), (64, 64));
        assert!((c.grid.u_range.1 - 2.0 * PI).abs() < 1e-15);
        assert_eq!(c.rel_tol, DEFAULT_REL_TOL);
    }

    #[test]
    fn inline_surface_matches_builtin() {
        let a = load_config(INLINE).unwrap();
        let b = RunConfig::builtin("paper-example").unwrap();
        assert_eq!(a.surface.spec().x, b.surface.spec().x);
        assert_eq!(a.source, SurfaceSource::Inline);
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint(), load_config(INLINE).unwrap().fingerprint());
        assert_eq!(a.fingerprint().len(), 64);
    }

    #[test]
    fn missing_component_names_key_and_line() {
        let text = INLINE.replace("x3 = \"-cos(v)\"\n", "");
        let e = load_config(&text).unwrap_err();
        assert_eq!(e.key, "surface.w.x3");
        let header = text.lines().position(|l| l == "[surface.w]").unwrap() + 1;
        assert_eq!(e.line, Some(header));
    }

    #[test]
    fn grid_too_small() {
        let e = load_config("surface = \"paper-example\"\n[grid]\nnu = 1\nnv = 8\n").unwrap_err();
        assert_eq!(e.key, "grid.nu");
        assert_eq!(e.line, Some(3));
    }

    #[test]
    fn other_errors() {
        let e = load_config("surface = \"torus\"\n").unwrap_err();
        assert_eq!((e.key.as_str(), e.line), ("surface", Some(1)));
        let e = load_config("surface = \"paper-example\"\ncolour = 1\n").unwrap_err();
        assert_eq!((e.key.as_str(), e.line), ("colour", Some(2)));
        let e = load_config("surface = \"paper-example\"\n[grid]\nnu = 4\nnv = = 3\n").unwrap_err();
        assert_eq!(e.line, Some(4));
        let e =
            load_config("surface = \"paper-example\"\n[grid]\nu_range = [-1, 2]\n").unwrap_err();
        assert_eq!(e.key, "grid.u_range");
        let bad_frame = INLINE.replace("x2 = \"-sin(v)\"", "x2 = \"sin(v)\"");
        assert_eq!(load_config(&bad_frame).unwrap_err().key, "surface");
        let e = load_config(&INLINE.replace("\"sin(u)\"", "\"sin(u\"")).unwrap_err();
        assert_eq!(e.key, "surface.X.x1");
    }

    #[test]
    fn probe_and_curve_sections() {
        let text = r#"
surface = "paper-example"
[focal]
branch = "minus"
[probe]
u = "u"
v = "0"
t_target = "5*pi/4"
[curve]
gamma = ["0", "0", "0"]
lplus = ["1", "1", "0"]
lminus = ["1", "-1", "0"]
t_range = [0, 1]
"#;
        let c = load_config(text).unwrap();
        assert_eq!(c.branch, Some(FocalBranch::Minus));
        let p = c.probe.unwrap();
        assert!((p.t_target - 1.25 * PI).abs() < 1e-15);
        assert_eq!(p.options, ProbeOptions::default());
        assert!(c.curve.is_some());
    }

    #[test]
    fn overrides() {
        let c = RunConfig::builtin("paper-example").unwrap();
        let before = c.fingerprint();
        let c = c.with_grid(8, 9).unwrap().with_tolerance(1e-8).unwrap();
        assert_eq!((c.grid.nu, c.grid.nv), (8, 9));
        assert_eq!(c.surface.rel_tol(), 1e-8);
        assert_ne!(before, c.fingerprint());
        assert!(c.clone().with_grid(1, 4).is_err());
        assert!(c.with_tolerance(-1.0).is_err());
    }
}
