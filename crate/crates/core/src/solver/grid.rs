//! Uniform lattices hℤⁿ restricted to a bounding box, with nodes classified
//! from a domain defining function.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeKind {
    /// ρ < 0.
    Interior,
    /// Outside Ω but reached by the stencil of an interior node; carries
    /// boundary data.
    Boundary,
    Outside,
}

pub const MAX_NODES: usize = 10_000_000;
const MAX_DOUBLINGS: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    n: usize,
    h: f64,
    lo: Vec<i64>,
    dims: Vec<usize>,
    kinds: Vec<NodeKind>,
}

impl Grid {
    /// Lattice nodes i·h in the box (extended by `reach` layers), classified
    /// by ρ and by the stencil `offsets`. Without a box, [−1, 1]ⁿ is doubled
    /// until the domain no longer touches its margin.
    pub fn new(
        n: usize,
        h: f64,
        rho: &dyn Fn(&[f64]) -> f64,
        bbox: Option<(&[f64], &[f64])>,
        offsets: &[Vec<i64>],
    ) -> Result<Grid> {
        if !(1..=3).contains(&n) {
            return Err(Error::InvalidParameter(format!(
                "grid solver supports n ∈ {{1, 2, 3}}, got {n}"
            )));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid spacing must be positive, got {h}"
            )));
        }
        let reach = offsets
            .iter()
            .flatten()
            .map(|v| v.unsigned_abs())
            .max()
            .unwrap_or(1) as i64;
        match bbox {
            Some((lo, hi)) => {
                if lo.len() != n || hi.len() != n || lo.iter().zip(hi).any(|(a, b)| !(a < b)) {
                    return Err(Error::InvalidParameter(
                        "bounding box must have lo < hi in every coordinate".into(),
                    ));
                }
                let g = Self::build(n, h, rho, lo, hi, reach, offsets)?;
                if g.touches_margin(reach) {
                    return Err(Error::InvalidParameter(
                        "domain extends past the bounding box".into(),
                    ));
                }
                Ok(g)
            }
            None => {
                let mut half = 1.0;
                for _ in 0..=MAX_DOUBLINGS {
                    let lo = vec![-half; n];
                    let hi = vec![half; n];
                    let g = Self::build(n, h, rho, &lo, &hi, reach, offsets)?;
                    if !g.touches_margin(reach) {
                        return Ok(g);
                    }
                    half *= 2.0;
                }
                Err(Error::InvalidParameter(
                    "domain does not fit in [−1024, 1024]ⁿ".into(),
                ))
            }
        }
    }

    fn build(
        n: usize,
        h: f64,
        rho: &dyn Fn(&[f64]) -> f64,
        lo: &[f64],
        hi: &[f64],
        reach: i64,
        offsets: &[Vec<i64>],
    ) -> Result<Grid> {
        let lo_i: Vec<i64> = lo
            .iter()
            .map(|v| (v / h - 1e-9).floor() as i64 - reach)
            .collect();
        let hi_i: Vec<i64> = hi
            .iter()
            .map(|v| (v / h + 1e-9).ceil() as i64 + reach)
            .collect();
        let dims: Vec<usize> = lo_i
            .iter()
            .zip(&hi_i)
            .map(|(a, b)| (b - a + 1) as usize)
            .collect();
        let total: usize = dims.iter().product();
        if total > MAX_NODES {
            return Err(Error::InvalidParameter(format!(
                "grid has {total} nodes, limit is {MAX_NODES}"
            )));
        }
        let mut g = Grid {
            n,
            h,
            lo: lo_i,
            dims,
            kinds: vec![NodeKind::Outside; total],
        };
        for idx in 0..total {
            if rho(&g.coords(idx)) < 0.0 {
                g.kinds[idx] = NodeKind::Interior;
            }
        }
        for idx in 0..total {
            if g.kinds[idx] != NodeKind::Interior {
                continue;
            }
            for off in offsets {
                for sign in [1, -1] {
                    let o: Vec<i64> = off.iter().map(|v| sign * v).collect();
                    if let Some(j) = g.neighbor(idx, &o) {
                        if g.kinds[j] == NodeKind::Outside {
                            g.kinds[j] = NodeKind::Boundary;
                        }
                    }
                }
            }
        }
        if !g.kinds.contains(&NodeKind::Interior) {
            return Err(Error::InvalidParameter(
                "no grid node lies inside the domain".into(),
            ));
        }
        Ok(g)
    }

    fn touches_margin(&self, reach: i64) -> bool {
        (0..self.kinds.len()).any(|idx| {
            self.kinds[idx] == NodeKind::Interior
                && self
                    .multi_index(idx)
                    .iter()
                    .zip(&self.dims)
                    .any(|(&i, &d)| i < reach || i >= d as i64 - reach)
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn kind(&self, idx: usize) -> NodeKind {
        self.kinds[idx]
    }

    pub fn kinds(&self) -> &[NodeKind] {
        &self.kinds
    }

    /// Local multi-index (0-based within the box), first axis fastest.
    pub fn multi_index(&self, mut idx: usize) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.n);
        for &d in &self.dims {
            out.push((idx % d) as i64);
            idx /= d;
        }
        out
    }

    pub fn flat_index(&self, local: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        let mut stride = 1usize;
        for (&i, &d) in local.iter().zip(&self.dims) {
            if i < 0 || i >= d as i64 {
                return None;
            }
            idx += i as usize * stride;
            stride *= d;
        }
        Some(idx)
    }

    pub fn neighbor(&self, idx: usize, offset: &[i64]) -> Option<usize> {
        let local: Vec<i64> = self
            .multi_index(idx)
            .iter()
            .zip(offset)
            .map(|(a, b)| a + b)
            .collect();
        self.flat_index(&local)
    }

    pub fn coords(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx)
            .iter()
            .zip(&self.lo)
            .map(|(i, l)| (i + l) as f64 * self.h)
            .collect()
    }

    /// Nearest node to x, if inside the box.
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        let local: Vec<i64> = x
            .iter()
            .zip(&self.lo)
            .map(|(v, l)| (v / self.h).round() as i64 - l)
            .collect();
        self.flat_index(&local)
    }

    pub fn nodes_of(&self, kind: NodeKind) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.kinds[i] == kind).collect()
    }

    /// Extent of the interior nodes along the longest axis.
    pub fn interior_extent(&self) -> f64 {
        let mut ext: f64 = 0.0;
        for d in 0..self.n {
            let vals: Vec<i64> = self
                .nodes_of(NodeKind::Interior)
                .iter()
                .map(|&i| self.multi_index(i)[d])
                .collect();
            let lo = vals.iter().min().copied().unwrap_or(0);
            let hi = vals.iter().max().copied().unwrap_or(0);
            ext = ext.max((hi - lo + 2) as f64 * self.h);
        }
        ext
    }

    /// A field holding f at interior and boundary nodes and NaN elsewhere.
    pub fn sample(&self, f: &dyn Fn(&[f64]) -> f64) -> Vec<f64> {
        (0..self.len())
            .map(|i| match self.kinds[i] {
                NodeKind::Outside => f64::NAN,
                _ => f(&self.coords(i)),
            })
            .collect()
    }
}
