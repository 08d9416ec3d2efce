//! Wavefront-style quad meshes of the surface and its focal sheets.

use std::fmt::Write as _;

use thiserror::Error;

use crate::focal::{continue_branches, FocalBranch};
use crate::io::config::RunConfig;
use crate::io::num::fmt_num;
use crate::minkowski::MVec3;
use crate::sweep::Execution;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshKind {
    Base,
    FocalPlus,
    FocalMinus,
}

impl MeshKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MeshKind::Base => "base",
            MeshKind::FocalPlus => "focal_plus",
            MeshKind::FocalMinus => "focal_minus",
        }
    }

    pub fn from_branch(b: Option<FocalBranch>) -> MeshKind {
        match b {
            None => MeshKind::Base,
            Some(FocalBranch::Plus) => MeshKind::FocalPlus,
            Some(FocalBranch::Minus) => MeshKind::FocalMinus,
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum MeshError {
    #[error("mesh is empty: no grid point could be evaluated")]
    MeshEmpty,
}

/// Mesh with its vertex and face counts.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub text: String,
    pub vertices: usize,
    pub faces: usize,
    /// Grid points that produced no vertex.
    pub failed: usize,
}

/// Vertex positions per grid node, `None` where evaluation failed.
pub fn mesh_positions(cfg: &RunConfig, which: MeshKind, exec: Execution) -> Vec<Option<MVec3>> {
    let s = &cfg.surface;
    match which {
        MeshKind::Base => cfg.grid.map(exec, |u, v| s.position(u, v).ok()),
        MeshKind::FocalPlus | MeshKind::FocalMinus => {
            let branch = if which == MeshKind::FocalPlus {
                FocalBranch::Plus
            } else {
                FocalBranch::Minus
            };
            let field = continue_branches(s, cfg.grid, exec);
            crate::sweep::map_indexed(cfg.grid.len(), exec, |k| {
                let mu = field.mu(k, branch)?;
                let (u, v) = cfg.grid.point(k);
                let p = s.point(u, v).ok()?;
                Some(crate::focal::focal_point_at(&p, mu))
            })
        }
    }
}

/// Renders the mesh text for `which`.
pub fn export_mesh(cfg: &RunConfig, which: MeshKind, exec: Execution) -> Result<Mesh, MeshError> {
    let grid = cfg.grid;
    let pos = mesh_positions(cfg, which, exec);
    let mut index = vec![0usize; pos.len()];
    let mut next = 0;
    for (k, p) in pos.iter().enumerate() {
        if p.is_some_and(|p| p.to_array().iter().all(|x| x.is_finite())) {
            next += 1;
            index[k] = next;
        }
    }
    if next == 0 {
        return Err(MeshError::MeshEmpty);
    }
    let mut text = String::new();
    let _ = writeln!(text, "# lightcone mesh");
    let _ = writeln!(text, "# surface: {}", cfg.surface.name());
    let _ = writeln!(text, "# sheet: {}", which.as_str());
    let _ = writeln!(text, "# grid: {} x {}", grid.nu, grid.nv);
    let _ = writeln!(text, "# config: {}", cfg.fingerprint());
    for (k, p) in pos.iter().enumerate() {
        if index[k] > 0 {
            let [x, y, z] = p
                .expect("indexed vertex exists")
                .to_array()
                .map(|c| fmt_num(c).expect("finite"));
            let _ = writeln!(text, "v {x} {y} {z}");
        }
    }
    let mut faces = 0;
    for i in 0..grid.nu - 1 {
        for j in 0..grid.nv - 1 {
            let quad = [
                grid.index(i, j),
                grid.index(i + 1, j),
                grid.index(i + 1, j + 1),
                grid.index(i, j + 1),
            ]
            .map(|k| index[k]);
            if quad.iter().all(|&n| n > 0) {
                let _ = writeln!(text, "f {} {} {} {}", quad[0], quad[1], quad[2], quad[3]);
                faces += 1;
            }
        }
    }
    Ok(Mesh {
        text,
        vertices: next,
        faces,
        failed: pos.len() - next,
    })
}
