//! Uniform 1D mesh on (0,1) and the P1 finite element space over it.
//!
//! Nodal arrays always carry all `J + 1` values, boundary nodes included.
//! Members of the Dirichlet space have both end values equal to zero.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    cells: usize,
    h: f64,
    nodes: Vec<f64>,
}

impl Mesh1D {
    pub fn new(cells: usize) -> Result<Self> {
        if cells < 2 {
            return Err(Error::TooFewCells(cells));
        }
        let nodes = (0..=cells).map(|j| j as f64 / cells as f64).collect();
        Ok(Self {
            cells,
            h: 1.0 / cells as f64,
            nodes,
        })
    }

    /// Number of cells `J`.
    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.cells + 1
    }
}

/// Builds the uniform mesh with `cells` intervals, shared behind an `Arc`.
pub fn make_mesh(cells: usize) -> Result<Arc<Mesh1D>> {
    Mesh1D::new(cells).map(Arc::new)
}

/// Continuous piecewise-linear function given by its nodal values.
#[derive(Debug, Clone, PartialEq)]
pub struct FEFunction {
    mesh: Arc<Mesh1D>,
    values: Vec<f64>,
    dirichlet: bool,
}

impl FEFunction {
    pub fn new(mesh: Arc<Mesh1D>, values: Vec<f64>, dirichlet: bool) -> Result<Self> {
        if values.len() != mesh.node_count() {
            return Err(Error::LengthMismatch {
                expected: mesh.node_count(),
                found: values.len(),
            });
        }
        if dirichlet {
            let (first, last) = (values[0], values[values.len() - 1]);
            if first != 0.0 || last != 0.0 {
                return Err(Error::NonzeroBoundary { first, last });
            }
        }
        Ok(Self {
            mesh,
            values,
            dirichlet,
        })
    }

    /// Builds a Dirichlet function from interior values, padding the
    /// boundary zeros.
    pub fn from_interior(mesh: Arc<Mesh1D>, interior: &[f64]) -> Result<Self> {
        let expected = mesh.cells() - 1;
        if interior.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: interior.len(),
            });
        }
        let mut values = Vec::with_capacity(mesh.node_count());
        values.push(0.0);
        values.extend_from_slice(interior);
        values.push(0.0);
        Ok(Self {
            mesh,
            values,
            dirichlet: true,
        })
    }

    pub fn zeros(mesh: Arc<Mesh1D>, dirichlet: bool) -> Self {
        let values = vec![0.0; mesh.node_count()];
        Self {
            mesh,
            values,
            dirichlet,
        }
    }

    /// Nodal interpolant of `f`; with `dirichlet` the end values are
    /// overwritten by zero.
    pub fn interpolate<F: Fn(f64) -> f64>(f: F, mesh: Arc<Mesh1D>, dirichlet: bool) -> Self {
        let mut values: Vec<f64> = mesh.nodes().iter().map(|&x| f(x)).collect();
        if dirichlet {
            values[0] = 0.0;
            let last = values.len() - 1;
            values[last] = 0.0;
        }
        Self {
            mesh,
            values,
            dirichlet,
        }
    }

    pub fn mesh(&self) -> &Arc<Mesh1D> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interior(&self) -> &[f64] {
        &self.values[1..self.values.len() - 1]
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_dirichlet(&self) -> bool {
        self.dirichlet
    }

    /// Evaluates the piecewise-linear extension at `x ∈ [0,1]`.
    pub fn evaluate(&self, x: f64) -> f64 {
        let cells = self.mesh.cells();
        let s = (x.clamp(0.0, 1.0) * cells as f64).min(cells as f64);
        let cell = (s.floor() as usize).min(cells - 1);
        let t = s - cell as f64;
        (1.0 - t) * self.values[cell] + t * self.values[cell + 1]
    }

    /// Returns `a·self + b·other` on the common mesh. The result keeps the
    /// Dirichlet flag only if both operands carry it.
    pub fn axpby(&self, a: f64, other: &FEFunction, b: f64) -> Result<FEFunction> {
        same_mesh(self, other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(FEFunction {
            mesh: self.mesh.clone(),
            values,
            dirichlet: self.dirichlet && other.dirichlet,
        })
    }

    pub fn scaled(&self, a: f64) -> FEFunction {
        FEFunction {
            mesh: self.mesh.clone(),
            values: self.values.iter().map(|x| a * x).collect(),
            dirichlet: self.dirichlet,
        }
    }
}

/// Piecewise-constant field, one value per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellField {
    mesh: Arc<Mesh1D>,
    values: Vec<f64>,
}

impl CellField {
    pub fn mesh(&self) -> &Arc<Mesh1D> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

pub(crate) fn same_mesh(u: &FEFunction, v: &FEFunction) -> Result<()> {
    if Arc::ptr_eq(&u.mesh, &v.mesh) || u.mesh.cells == v.mesh.cells {
        Ok(())
    } else {
        Err(Error::MeshMismatch {
            left: u.mesh.cells,
            right: v.mesh.cells,
        })
    }
}

/// Mass-lumped (nodal quadrature) inner product `h Σ_{j=1}^{J-1} u_j v_j`.
///
/// Only interior nodes enter the sum, so for non-Dirichlet arguments the
/// boundary values are ignored.
pub fn lumped_inner(u: &FEFunction, v: &FEFunction) -> Result<f64> {
    same_mesh(u, v)?;
    Ok(u.mesh.h * dot(u.interior(), v.interior()))
}

pub fn lumped_norm_sq(u: &FEFunction) -> f64 {
    u.mesh.h * dot(u.interior(), u.interior())
}

/// Exact L² inner product of two piecewise-linear functions.
pub fn l2_inner(u: &FEFunction, v: &FEFunction) -> Result<f64> {
    same_mesh(u, v)?;
    let (a, b) = (&u.values, &v.values);
    let sum: f64 = (0..u.mesh.cells)
        .map(|k| {
            2.0 * a[k] * b[k] + a[k] * b[k + 1] + a[k + 1] * b[k] + 2.0 * a[k + 1] * b[k + 1]
        })
        .sum();
    Ok(u.mesh.h / 6.0 * sum)
}

/// Cellwise derivative `(v_j - v_{j-1}) / h`, stored at index `j - 1`.
pub fn gradient_cellwise(v: &FEFunction) -> CellField {
    CellField {
        mesh: v.mesh.clone(),
        values: cell_slopes(&v.values, v.mesh.h),
    }
}

pub(crate) fn cell_slopes(values: &[f64], h: f64) -> Vec<f64> {
    values.windows(2).map(|w| (w[1] - w[0]) / h).collect()
}

/// Mass-lumped discrete Laplacian: the second-difference stencil at interior
/// nodes and zero at both boundary nodes.
pub fn discrete_laplacian(v: &FEFunction) -> Result<FEFunction> {
    if !v.dirichlet {
        return Err(Error::NotDirichlet);
    }
    let h2 = v.mesh.h * v.mesh.h;
    let x = &v.values;
    let mut out = vec![0.0; x.len()];
    for j in 1..x.len() - 1 {
        out[j] = (x[j + 1] - 2.0 * x[j] + x[j - 1]) / h2;
    }
    Ok(FEFunction {
        mesh: v.mesh.clone(),
        values: out,
        dirichlet: true,
    })
}

// 3-point Gauss-Legendre on [-1, 1]; exact for polynomials of degree ≤ 5.
const GAUSS_POINTS: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GAUSS_WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

/// Lumped L² projection onto the Dirichlet space: interior value
/// `(1/h) ∫ w φ_j`, so that `⟨P w, v⟩_h = ∫ w v` for every `v` in the space.
/// Integrals use 3-point Gauss quadrature per cell.
pub fn lumped_projection<F: Fn(f64) -> f64>(w: F, mesh: Arc<Mesh1D>) -> FEFunction {
    let h = mesh.h;
    let nodes = mesh.nodes();
    let mut moments = vec![0.0; mesh.node_count()];
    for k in 0..mesh.cells {
        let (a, b) = (nodes[k], nodes[k + 1]);
        let (mid, half) = (0.5 * (a + b), 0.5 * h);
        for (xi, wt) in GAUSS_POINTS.iter().zip(GAUSS_WEIGHTS) {
            let x = mid + half * xi;
            let fx = w(x) * wt * half;
            // Hat functions of the two cell endpoints.
            let t = (x - a) / h;
            moments[k] += fx * (1.0 - t);
            moments[k + 1] += fx * t;
        }
    }
    let last = moments.len() - 1;
    moments[0] = 0.0;
    moments[last] = 0.0;
    for m in &mut moments[1..last] {
        *m /= h;
    }
    FEFunction {
        mesh,
        values: moments,
        dirichlet: true,
    }
}

/// How continuous data is mapped into the Dirichlet space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Projection {
    #[default]
    Lumped,
    Interpolate,
}

impl std::fmt::Display for Projection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Projection::Lumped => "lumped",
            Projection::Interpolate => "interpolate",
        })
    }
}

impl std::str::FromStr for Projection {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "lumped" => Ok(Projection::Lumped),
            "interpolate" => Ok(Projection::Interpolate),
            _ => Err(format!("unknown projection `{s}` (expected lumped or interpolate)")),
        }
    }
}

pub fn project<F: Fn(f64) -> f64>(w: F, mesh: Arc<Mesh1D>, kind: Projection) -> FEFunction {
    match kind {
        Projection::Lumped => lumped_projection(w, mesh),
        Projection::Interpolate => FEFunction::interpolate(w, mesh, true),
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
