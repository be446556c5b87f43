//! Finite-difference 2-jets on a grid.
//!
//! Every component of the discrete jet is a fixed linear combination of
//! neighbor values plus a multiple of the center value, so with neighbors
//! frozen the jet is affine in the center value: J(r) = J₀ + r·dJ.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::grid::{Grid, NodeKind};
use crate::error::{Error, Result};
use crate::linalg::{Jet, SymMatrix};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StencilKind {
    /// Axis second differences and diagonal cross differences.
    #[default]
    Standard,
    /// Least-squares fit of the Hessian to directional second differences
    /// along (1,0), (0,1), (1,±1), (2,±1), (1,±2) in 2D; in 3D the axes,
    /// face diagonals and body diagonals.
    Wide,
}

/// Weights of one jet component: (offset id, weight) pairs and the center
/// weight.
#[derive(Clone, Debug, PartialEq)]
struct Combo {
    terms: Vec<(usize, f64)>,
    center: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stencil {
    n: usize,
    h: f64,
    kind: StencilKind,
    offsets: Vec<Vec<i64>>,
    p: Vec<Combo>,
    /// Upper-triangle order of SymMatrix storage.
    a: Vec<Combo>,
}

fn unit(n: usize, i: usize, s: i64) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = s;
    v
}

fn wide_directions(n: usize) -> Vec<Vec<i64>> {
    match n {
        1 => vec![vec![1]],
        2 => vec![
            vec![1, 0],
            vec![0, 1],
            vec![1, 1],
            vec![1, -1],
            vec![2, 1],
            vec![2, -1],
            vec![1, 2],
            vec![1, -2],
        ],
        _ => {
            let mut d = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                for s in [1, -1] {
                    let mut v = vec![0; 3];
                    v[i] = 1;
                    v[j] = s;
                    d.push(v);
                }
            }
            for s in [1, -1] {
                for t in [1, -1] {
                    d.push(vec![1, s, t]);
                }
            }
            d
        }
    }
}

impl Stencil {
    pub fn new(n: usize, h: f64, kind: StencilKind) -> Self {
        let mut offsets: Vec<Vec<i64>> = Vec::new();
        let id = |v: Vec<i64>, offsets: &mut Vec<Vec<i64>>| -> usize {
            if let Some(k) = offsets.iter().position(|o| *o == v) {
                k
            } else {
                offsets.push(v);
                offsets.len() - 1
            }
        };
        let h2 = h * h;
        let p = (0..n)
            .map(|i| Combo {
                terms: vec![
                    (id(unit(n, i, 1), &mut offsets), 0.5 / h),
                    (id(unit(n, i, -1), &mut offsets), -0.5 / h),
                ],
                center: 0.0,
            })
            .collect();
        let mut a = Vec::with_capacity(n * (n + 1) / 2);
        match kind {
            StencilKind::Standard => {
                for i in 0..n {
                    for j in i..n {
                        if i == j {
                            a.push(Combo {
                                terms: vec![
                                    (id(unit(n, i, 1), &mut offsets), 1.0 / h2),
                                    (id(unit(n, i, -1), &mut offsets), 1.0 / h2),
                                ],
                                center: -2.0 / h2,
                            });
                        } else {
                            let mut terms = Vec::new();
                            for (si, sj, w) in
                                [(1, 1, 1.0), (1, -1, -1.0), (-1, 1, -1.0), (-1, -1, 1.0)]
                            {
                                let mut v = vec![0; n];
                                v[i] = si;
                                v[j] = sj;
                                terms.push((id(v, &mut offsets), w / (4.0 * h2)));
                            }
                            a.push(Combo { terms, center: 0.0 });
                        }
                    }
                }
            }
            StencilKind::Wide => {
                let dirs = wide_directions(n);
                let m = n * (n + 1) / 2;
                // row for direction v/|v|: ê ᵗAê in the upper-triangle unknowns
                let design = DMatrix::from_fn(dirs.len(), m, |row, col| {
                    let v = &dirs[row];
                    let len2: f64 = v.iter().map(|x| (x * x) as f64).sum();
                    let mut k = 0;
                    for i in 0..n {
                        for j in i..n {
                            if k == col {
                                let c = (v[i] * v[j]) as f64 / len2;
                                return if i == j { c } else { 2.0 * c };
                            }
                            k += 1;
                        }
                    }
                    unreachable!()
                });
                let pinv = design
                    .clone()
                    .pseudo_inverse(1e-12)
                    .expect("design has full rank");
                for col in 0..m {
                    let mut terms = Vec::new();
                    let mut center = 0.0;
                    for (row, v) in dirs.iter().enumerate() {
                        let len2: f64 = v.iter().map(|x| (x * x) as f64).sum();
                        let w = pinv[(col, row)] / (h2 * len2);
                        if w == 0.0 {
                            continue;
                        }
                        let neg: Vec<i64> = v.iter().map(|x| -x).collect();
                        terms.push((id(v.clone(), &mut offsets), w));
                        terms.push((id(neg, &mut offsets), w));
                        center -= 2.0 * w;
                    }
                    a.push(Combo { terms, center });
                }
            }
        }
        Stencil {
            n,
            h,
            kind,
            offsets,
            p,
            a,
        }
    }

    pub fn kind(&self) -> StencilKind {
        self.kind
    }

    pub fn offsets(&self) -> &[Vec<i64>] {
        &self.offsets
    }

    /// Flat indices of the neighbors of `node` in offset order; errors if
    /// one is missing or outside the mask.
    pub fn neighbors(&self, grid: &Grid, node: usize) -> Result<Vec<usize>> {
        self.offsets
            .iter()
            .map(|o| match grid.neighbor(node, o) {
                Some(j) if grid.kind(j) != NodeKind::Outside => Ok(j),
                _ => Err(Error::Geometry(format!(
                    "stencil of node {node} leaves the mask"
                ))),
            })
            .collect()
    }

    /// Jet with center value 0 and the derivative dJ/dr.
    pub fn affine_jet(&self, u: &[f64], nbrs: &[usize]) -> (Jet, Jet) {
        let eval = |c: &Combo| c.terms.iter().map(|&(k, w)| w * u[nbrs[k]]).sum::<f64>();
        let p0: Vec<f64> = self.p.iter().map(eval).collect();
        let mut a0 = SymMatrix::zeros(self.n);
        let mut da = SymMatrix::zeros(self.n);
        let mut k = 0;
        for i in 0..self.n {
            for j in i..self.n {
                a0.set(i, j, eval(&self.a[k]));
                da.set(i, j, self.a[k].center);
                k += 1;
            }
        }
        (Jet::new(0.0, p0, a0), Jet::new(1.0, vec![0.0; self.n], da))
    }

    pub fn h(&self) -> f64 {
        self.h
    }
}

/// The discrete jet of u at an interior node.
pub fn discrete_jet(grid: &Grid, u: &[f64], node: usize, stencil: &Stencil) -> Result<Jet> {
    if grid.kind(node) != NodeKind::Interior {
        return Err(Error::InvalidParameter(format!(
            "node {node} is not interior"
        )));
    }
    let nbrs = stencil.neighbors(grid, node)?;
    let (j0, dj) = stencil.affine_jet(u, &nbrs);
    Ok(j0.add(&dj.scale(u[node])))
}
