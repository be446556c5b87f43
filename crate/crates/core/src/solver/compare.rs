//! Numerical zero maximum principle: u + v ≤ 0 on ∂K ⟹ u + v ≤ 0 on K for
//! u discrete F-subharmonic and v discrete F̃-subharmonic.

use serde::{Deserialize, Serialize};

use super::grid::{Grid, NodeKind};
use super::stencil::Stencil;
use crate::error::{Error, Result};
use crate::subequation::Subequation;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ComparisonStatus {
    Pass,
    /// u + v > 0 somewhere on ∂K, so the implication holds trivially.
    Vacuous {
        max_boundary: f64,
    },
    Fail {
        node: usize,
        x: Vec<f64>,
        value: f64,
    },
    /// `field` ("u" or "v") is not discrete subharmonic at `node`.
    Precondition {
        field: String,
        node: usize,
        x: Vec<f64>,
        rho: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    #[serde(flatten)]
    pub status: ComparisonStatus,
    pub interior_nodes: usize,
    pub band_nodes: usize,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        matches!(
            self.status,
            ComparisonStatus::Pass | ComparisonStatus::Vacuous { .. }
        )
    }
}

/// Interior nodes whose stencil touches a boundary node.
fn in_band(grid: &Grid, nbrs: &[usize]) -> bool {
    nbrs.iter().any(|&j| grid.kind(j) == NodeKind::Boundary)
}

/// First interior node (outside the boundary band when `skip_band`) where
/// the discrete jet of u has rho < −tol, with its rho.
pub fn subharmonic_violation(
    f: &Subequation,
    grid: &Grid,
    stencil: &Stencil,
    u: &[f64],
    tol: f64,
    skip_band: bool,
) -> Result<Option<(usize, f64)>> {
    for i in grid.nodes_of(NodeKind::Interior) {
        let nbrs = stencil.neighbors(grid, i)?;
        if skip_band && in_band(grid, &nbrs) {
            continue;
        }
        let (j0, dj) = stencil.affine_jet(u, &nbrs);
        let rho = f.rho(Some(&grid.coords(i)), &j0.add(&dj.scale(u[i])));
        if !(rho >= -tol) {
            return Ok(Some((i, rho)));
        }
    }
    Ok(None)
}

/// Checks the preconditions (discrete jets of u in F and of v in F̃ up to
/// `jet_tol`, boundary band excluded), then the zero maximum principle on
/// the grid mask with slack `value_tol`.
pub fn comparison_check(
    f: &Subequation,
    grid: &Grid,
    stencil: &Stencil,
    u: &[f64],
    v: &[f64],
    jet_tol: f64,
    value_tol: f64,
) -> Result<ComparisonReport> {
    if u.len() != grid.len() || v.len() != grid.len() {
        return Err(Error::Dimension {
            expected: grid.len(),
            got: u.len().min(v.len()),
        });
    }
    let interior = grid.nodes_of(NodeKind::Interior);
    let mut band_nodes = 0;
    for &i in &interior {
        if in_band(grid, &stencil.neighbors(grid, i)?) {
            band_nodes += 1;
        }
    }
    let report = |status| ComparisonReport {
        status,
        interior_nodes: interior.len(),
        band_nodes,
    };
    for (name, field, g) in [("u", u, f.clone()), ("v", v, f.dual())] {
        if let Some((node, rho)) = subharmonic_violation(&g, grid, stencil, field, jet_tol, true)? {
            return Ok(report(ComparisonStatus::Precondition {
                field: name.into(),
                node,
                x: grid.coords(node),
                rho,
            }));
        }
    }
    let max_boundary = grid
        .nodes_of(NodeKind::Boundary)
        .iter()
        .map(|&i| u[i] + v[i])
        .fold(f64::NEG_INFINITY, f64::max);
    if max_boundary > value_tol {
        return Ok(report(ComparisonStatus::Vacuous { max_boundary }));
    }
    let worst =
        interior
            .iter()
            .map(|&i| (i, u[i] + v[i]))
            .fold((usize::MAX, f64::NEG_INFINITY), |a, b| {
                if b.1 > a.1 {
                    b
                } else {
                    a
                }
            });
    if worst.1 > value_tol {
        return Ok(report(ComparisonStatus::Fail {
            node: worst.0,
            x: grid.coords(worst.0),
            value: worst.1,
        }));
    }
    Ok(report(ComparisonStatus::Pass))
}
