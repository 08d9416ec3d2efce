//! Data-parallel evaluation over index ranges and parameter grids.
//!
//! With the `parallel` feature (on by default) [`Execution::Parallel`] fans
//! out over rayon's global pool; without it every sweep runs sequentially.

/// How a sweep distributes its work.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// The mode a sweep will actually use in this build.
    pub fn effective(self) -> Execution {
        if cfg!(feature = "parallel") {
            self
        } else {
            Execution::Sequential
        }
    }
}

/// `[f(0), f(1), …, f(n-1)]`, in index order regardless of mode.
pub fn map_indexed<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec.effective() {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// A rectangular parameter grid with `nu × nv` nodes including the corners.
///
/// Nodes are stored row-major: row `i` holds `u_i`, column `j` holds `v_j`,
/// and the flat index is `i·nv + j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub u_range: (f64, f64),
    pub v_range: (f64, f64),
    pub nu: usize,
    pub nv: usize,
}

impl Grid {
    pub fn new(u_range: (f64, f64), v_range: (f64, f64), nu: usize, nv: usize) -> Self {
        assert!(nu >= 2 && nv >= 2, "grid needs at least 2 nodes per axis");
        Grid {
            u_range,
            v_range,
            nu,
            nv,
        }
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn u(&self, i: usize) -> f64 {
        lerp(self.u_range, i, self.nu)
    }

    pub fn v(&self, j: usize) -> f64 {
        lerp(self.v_range, j, self.nv)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nv + j
    }

    /// `(u, v)` of a flat index.
    pub fn point(&self, k: usize) -> (f64, f64) {
        (self.u(k / self.nv), self.v(k % self.nv))
    }

    pub fn step_u(&self) -> f64 {
        (self.u_range.1 - self.u_range.0) / (self.nu - 1) as f64
    }

    pub fn step_v(&self) -> f64 {
        (self.v_range.1 - self.v_range.0) / (self.nv - 1) as f64
    }

    /// Evaluates `f` at every node, row-major.
    pub fn map<T, F>(&self, exec: Execution, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(f64, f64) -> T + Sync + Send,
    {
        map_indexed(self.len(), exec, |k| {
            let (u, v) = self.point(k);
            f(u, v)
        })
    }
}

fn lerp(range: (f64, f64), i: usize, n: usize) -> f64 {
    if i + 1 == n {
        range.1
    } else {
        range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64
    }
}
