//! Configuration, reports, meshes and probe CSV.

pub mod config;
pub mod mesh;
pub mod num;
pub mod probe;
pub mod report;

pub use config::{load_config, parse_branch, ConfigError, ProbeConfig, RunConfig};
pub use mesh::{export_mesh, Mesh, MeshError, MeshKind};
pub use probe::{probe_csv, run_probe};
pub use report::{run_analyze, Report, ReportRow, ReportView};
