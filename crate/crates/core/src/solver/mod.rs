//! Grid Perron solver for the Dirichlet problem of a subequation.
//!
//! Each sweep visits the interior nodes and sets u(node) to the largest r for
//! which the discrete jet (neighbors frozen) lies in F. By (P) and (N) the
//! defining function along that line is non-increasing in r, so the root is
//! bracketed and found by safeguarded regula falsi. Starting from the minimum
//! of the boundary data, plain Gauss–Seidel sweeps (ω = 1) increase
//! monotonically toward the discrete Perron function. Over-relaxation
//! (ω > 1) speeds up convergence for uniformly elliptic problems and falls
//! back to ω = 1 if the updates stop decreasing.

pub mod compare;
pub mod grid;
pub mod stencil;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use compare::{comparison_check, subharmonic_violation, ComparisonReport, ComparisonStatus};
pub use grid::{Grid, NodeKind};
pub use stencil::{discrete_jet, Stencil, StencilKind};

use crate::error::{Error, Result};
use crate::linalg::Jet;
use crate::subequation::{ScalarField, Subequation};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relaxation {
    /// Plain Gauss–Seidel, ω = 1.
    None,
    Fixed(f64),
    /// ω = 2/(1 + sin(πh/L)), L the interior extent.
    #[default]
    Auto,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ordering {
    /// Lexicographic, then reversed, alternating.
    #[default]
    Alternating,
    /// Multicolor: nodes of one color have disjoint stencils and are updated
    /// concurrently, colors always in the same order. The result does not
    /// depend on the thread count.
    Colored,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub max_sweeps: usize,
    /// Default 1e-10 times the boundary data range (at least 1e-10).
    pub sweep_tol: Option<f64>,
    /// Relative width of the final root bracket.
    pub bisection_tol: f64,
    pub stencil: StencilKind,
    pub relaxation: Relaxation,
    pub ordering: Ordering,
    /// Worker threads for colored sweeps; 0 means the rayon default.
    pub threads: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            max_sweeps: 100_000,
            sweep_tol: None,
            bisection_tol: 1e-14,
            stencil: StencilKind::Standard,
            relaxation: Relaxation::Auto,
            ordering: Ordering::Alternating,
            threads: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    /// Values at every grid node; NaN outside the mask.
    pub u: Vec<f64>,
    pub sweeps: usize,
    pub final_update: f64,
    /// max |rho_F(discrete jet)| over interior nodes.
    pub residual: f64,
    pub converged: bool,
    pub sweep_tol: f64,
    /// ω in use at the end of the run.
    pub omega: f64,
}

#[derive(Clone)]
pub struct GridProblem {
    grid: Arc<Grid>,
    stencil: Arc<Stencil>,
    bc: Vec<f64>,
    f: Subequation,
    params: SolverParams,
}

impl std::fmt::Debug for GridProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridProblem")
            .field("f", &self.f.label())
            .field("dims", &self.grid.dims())
            .field("h", &self.grid.h())
            .finish()
    }
}

impl GridProblem {
    /// Builds the grid on Ω = {domain < 0} (inside `bbox` if given, else an
    /// automatically sized box) and samples φ at the boundary nodes.
    pub fn new(
        f: Subequation,
        domain: &dyn Fn(&[f64]) -> f64,
        bbox: Option<(&[f64], &[f64])>,
        h: f64,
        phi: &dyn Fn(&[f64]) -> f64,
        params: SolverParams,
    ) -> Result<Self> {
        let stencil = Stencil::new(f.n(), h, params.stencil);
        let grid = Grid::new(f.n(), h, domain, bbox, stencil.offsets())?;
        Self::on_grid(f, Arc::new(grid), Arc::new(stencil), phi, params)
    }

    /// The rectangle ∏[lo_i, hi_i], whose faces are grid lines when the
    /// bounds are multiples of h.
    pub fn rectangle(
        f: Subequation,
        lo: &[f64],
        hi: &[f64],
        h: f64,
        phi: &dyn Fn(&[f64]) -> f64,
        params: SolverParams,
    ) -> Result<Self> {
        let tol = 1e-9 * h;
        let (lo_v, hi_v) = (lo.to_vec(), hi.to_vec());
        let rho = move |x: &[f64]| {
            x.iter()
                .zip(lo_v.iter().zip(&hi_v))
                .map(|(v, (a, b))| (a - v + tol).max(v - b + tol))
                .fold(f64::NEG_INFINITY, f64::max)
        };
        Self::new(f, &rho, Some((lo, hi)), h, phi, params)
    }

    pub fn on_grid(
        f: Subequation,
        grid: Arc<Grid>,
        stencil: Arc<Stencil>,
        phi: &dyn Fn(&[f64]) -> f64,
        params: SolverParams,
    ) -> Result<Self> {
        if f.n() != grid.n() {
            return Err(Error::Dimension {
                expected: grid.n(),
                got: f.n(),
            });
        }
        let mut bc = vec![f64::NAN; grid.len()];
        for i in grid.nodes_of(NodeKind::Boundary) {
            let v = phi(&grid.coords(i));
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "boundary value {v} at {:?} is not finite",
                    grid.coords(i)
                )));
            }
            bc[i] = v;
        }
        Ok(GridProblem {
            grid,
            stencil,
            bc,
            f,
            params,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn stencil(&self) -> &Arc<Stencil> {
        &self.stencil
    }

    pub fn subequation(&self) -> &Subequation {
        &self.f
    }

    pub fn params(&self) -> &SolverParams {
        &self.params
    }

    pub fn boundary_values(&self) -> &[f64] {
        &self.bc
    }

    /// The same grid with F and φ replaced by dual(F) and −φ.
    pub fn dual(&self) -> GridProblem {
        GridProblem {
            grid: self.grid.clone(),
            stencil: self.stencil.clone(),
            bc: self.bc.iter().map(|v| -v).collect(),
            f: self.f.dual(),
            params: self.params.clone(),
        }
    }

    fn data_range(&self) -> (f64, f64) {
        self.bc
            .iter()
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                (a.min(v), b.max(v))
            })
    }

    pub fn sweep_tol(&self) -> f64 {
        self.params.sweep_tol.unwrap_or_else(|| {
            let (lo, hi) = self.data_range();
            1e-10 * (hi - lo).max(1.0)
        })
    }
}

/// Contraction of successive sweep updates, as the largest of the last few
/// ratios. The distance to the fixed point is about update·q/(1 − q).
#[derive(Default)]
struct Rate {
    ratios: [f64; 4],
    len: usize,
}

impl Rate {
    fn push(&mut self, r: f64) {
        self.ratios[self.len % 4] = r;
        self.len += 1;
    }

    fn tail(&self, update: f64) -> f64 {
        if self.len < 4 {
            return f64::INFINITY;
        }
        let q = self.ratios.iter().fold(0.0f64, |a, &b| a.max(b)).min(0.999);
        update * q / (1.0 - q)
    }
}

/// Shrinks the over-relaxation, dropping to Gauss–Seidel once it is small.
fn damp(omega: f64) -> f64 {
    if omega > 1.1 {
        1.0 + 0.9 * (omega - 1.0)
    } else {
        1.0
    }
}

/// Largest r with g(r) ≥ 0 for non-increasing g. A secant step from
/// `guess` is tried first; otherwise the root is bracketed inside
/// [min − d, max + d] with d = 10, widened twice (d = 100, 1000).
fn largest_root(
    g: &mut dyn FnMut(f64) -> f64,
    guess: f64,
    lo0: f64,
    hi0: f64,
    rel_tol: f64,
    node: usize,
) -> Result<f64> {
    let ok = |v: f64| v >= 0.0;
    if guess.is_finite() {
        let d = 1e-3 * (1.0 + (hi0 - lo0).abs());
        let (g0, g1) = (g(guess), g(guess + d));
        if g0.is_finite() && g1.is_finite() && g0 > g1 {
            let m = guess + g0 * d / (g0 - g1);
            let tol = rel_tol * (1.0 + m.abs());
            if m.is_finite() {
                if ok(g(m)) {
                    if !ok(g(m + tol)) {
                        return Ok(m);
                    }
                } else if ok(g(m - tol)) {
                    return Ok(m - tol);
                }
            }
        }
    }
    let mut d = 10.0;
    let mut bracket = None;
    for _ in 0..3 {
        let (lo, hi) = (lo0 - d, hi0 + d);
        let (glo, ghi) = (g(lo), g(hi));
        if ok(glo) && !ok(ghi) {
            bracket = Some((lo, glo, hi, ghi));
            break;
        }
        d *= 10.0;
    }
    let (mut lo, mut glo, mut hi, mut ghi) = bracket.ok_or_else(|| Error::Bracket {
        node,
        msg: format!(
            "no sign change of rho in [{}, {}]",
            lo0 - d / 10.0,
            hi0 + d / 10.0
        ),
    })?;
    let mut side = 0i8;
    for _ in 0..200 {
        let tol = rel_tol * (1.0 + lo.abs().max(hi.abs()));
        if hi - lo <= tol {
            break;
        }
        let mut m = if glo.is_finite() && ghi.is_finite() && glo != ghi {
            lo + glo * (hi - lo) / (glo - ghi)
        } else {
            0.5 * (lo + hi)
        };
        if !(m > lo && m < hi) {
            m = 0.5 * (lo + hi);
        }
        let gm = g(m);
        if ok(gm) {
            lo = m;
            glo = gm;
            if side == 1 {
                ghi *= 0.5;
            }
            side = 1;
            // the root is usually just above an interpolated point
            let probe = m + tol;
            if probe < hi && !ok(g(probe)) {
                break;
            }
        } else {
            hi = m;
            ghi = gm;
            if side == -1 {
                glo *= 0.5;
            }
            side = -1;
            let probe = m - tol;
            if probe > lo {
                let gp = g(probe);
                if ok(gp) {
                    lo = probe;
                    break;
                }
            }
        }
    }
    Ok(lo)
}

struct NodeData {
    node: usize,
    nbrs: Vec<usize>,
    x: Vec<f64>,
    lo: f64,
    hi: f64,
}

struct Engine<'a> {
    p: &'a GridProblem,
    nodes: Vec<NodeData>,
    obstacle: Option<Vec<f64>>,
}

impl<'a> Engine<'a> {
    fn new(p: &'a GridProblem, obstacle: Option<&ScalarField>) -> Result<Self> {
        let interior = p.grid.nodes_of(NodeKind::Interior);
        let mut nodes = Vec::with_capacity(interior.len());
        for &i in &interior {
            nodes.push(NodeData {
                node: i,
                nbrs: p.stencil.neighbors(&p.grid, i)?,
                x: p.grid.coords(i),
                lo: 0.0,
                hi: 0.0,
            });
        }
        let obstacle = obstacle.map(|g| (0..p.grid.len()).map(|i| g(&p.grid.coords(i))).collect());
        Ok(Engine { p, nodes, obstacle })
    }

    fn target(&self, u: &[f64], k: usize) -> Result<f64> {
        let nd = &self.nodes[k];
        let (j0, dj) = self.p.stencil.affine_jet(u, &nd.nbrs);
        let f = &self.p.f;
        let x = Some(nd.x.as_slice());
        let a0 = j0.a.upper().to_vec();
        let da = dj.a.upper();
        let mut j = j0.clone();
        let mut g = |r: f64| {
            j.r = r;
            for ((v, a), d) in j.a.upper_mut().iter_mut().zip(&a0).zip(da) {
                *v = a + r * d;
            }
            let v = f.rho(x, &j);
            if v.is_nan() {
                -1.0
            } else {
                v
            }
        };
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &j in &nd.nbrs {
            lo = lo.min(u[j]);
            hi = hi.max(u[j]);
        }
        lo = lo.min(u[nd.node]).min(nd.lo);
        hi = hi.max(u[nd.node]).max(nd.hi);
        let mut r = largest_root(
            &mut g,
            u[nd.node],
            lo,
            hi,
            self.p.params.bisection_tol,
            nd.node,
        )?;
        if let Some(obs) = &self.obstacle {
            r = r.min(obs[nd.node]);
        }
        Ok(r)
    }

    fn relax(&self, old: f64, target: f64, omega: f64, node: usize) -> f64 {
        let mut v = old + omega * (target - old);
        if let Some(obs) = &self.obstacle {
            v = v.min(obs[node]);
        }
        v
    }

    fn colors(&self) -> Vec<Vec<usize>> {
        let grid = &self.p.grid;
        let reach = self
            .p
            .stencil
            .offsets()
            .iter()
            .flatten()
            .map(|v| v.unsigned_abs())
            .max()
            .unwrap_or(1) as i64;
        let m = reach + 1;
        let count = (m as usize).pow(grid.n() as u32);
        let mut out = vec![Vec::new(); count];
        for (k, nd) in self.nodes.iter().enumerate() {
            let c = grid
                .multi_index(nd.node)
                .iter()
                .rev()
                .fold(0i64, |acc, &i| acc * m + i.rem_euclid(m));
            out[c as usize].push(k);
        }
        out.retain(|c| !c.is_empty());
        out
    }

    fn run(&mut self) -> Result<SolveReport> {
        let p = self.p;
        let tol = p.sweep_tol();
        let (dmin, dmax) = p.data_range();
        let init = if dmin.is_finite() { dmin } else { 0.0 };
        let mut u = p.bc.clone();
        for nd in &mut self.nodes {
            u[nd.node] = init;
            nd.lo = dmin.min(init);
            nd.hi = dmax.max(init);
        }
        if let Some(obs) = &self.obstacle {
            for nd in &self.nodes {
                u[nd.node] = u[nd.node].min(obs[nd.node]);
            }
        }
        let start = u.clone();
        let mut omega = match p.params.relaxation {
            Relaxation::None => 1.0,
            Relaxation::Fixed(w) => {
                if !(w > 0.0 && w < 2.0) {
                    return Err(Error::InvalidParameter(format!(
                        "relaxation ω must lie in (0, 2), got {w}"
                    )));
                }
                w
            }
            Relaxation::Auto => {
                let ext = p.grid.interior_extent();
                2.0 / (1.0 + (std::f64::consts::PI * p.grid.h() / ext).sin())
            }
        };
        let colors = match p.params.ordering {
            Ordering::Colored => Some(self.colors()),
            Ordering::Alternating => None,
        };
        let pool = if p.params.threads > 0 && colors.is_some() {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(p.params.threads)
                    .build()
                    .map_err(|e| Error::InvalidParameter(e.to_string()))?,
            )
        } else {
            None
        };

        let mut best = f64::INFINITY;
        let mut since_best = 0usize;
        let mut sweeps = 0;
        let mut update = f64::INFINITY;
        let mut prev = f64::INFINITY;
        let mut rate = Rate::default();
        while sweeps < p.params.max_sweeps {
            let forward = sweeps % 2 == 0;
            let outcome = self.sweep(&mut u, colors.as_deref(), pool.as_ref(), forward, omega);
            sweeps += 1;
            update = match outcome {
                Ok(d) => d,
                // a root bracket lost during over-relaxation signals divergence
                Err(Error::Bracket { .. }) if omega > 1.0 => f64::NAN,
                Err(e) => return Err(e),
            };
            if !update.is_finite() {
                if omega == 1.0 {
                    return Err(Error::Diverged { sweeps });
                }
                omega = damp(omega);
                u = start.clone();
                best = f64::INFINITY;
                since_best = 0;
                prev = f64::INFINITY;
                rate = Rate::default();
                continue;
            }
            rate.push(update / prev);
            prev = update;
            if update <= tol && rate.tail(update) <= tol {
                break;
            }
            if update < 0.9 * best {
                best = update;
                since_best = 0;
            } else {
                since_best += 1;
                if omega != 1.0 && since_best > 200 {
                    omega = damp(omega);
                    since_best = 0;
                    best = update;
                    rate = Rate::default();
                }
            }
        }
        let residual = self.residual(&u);
        Ok(SolveReport {
            u,
            sweeps,
            final_update: update,
            residual,
            converged: update <= tol && rate.tail(update) <= tol,
            sweep_tol: tol,
            omega,
        })
    }

    fn sweep(
        &self,
        u: &mut [f64],
        colors: Option<&[Vec<usize>]>,
        pool: Option<&rayon::ThreadPool>,
        forward: bool,
        omega: f64,
    ) -> Result<f64> {
        let mut update: f64 = 0.0;
        match colors {
            None => {
                let n = self.nodes.len();
                for s in 0..n {
                    let k = if forward { s } else { n - 1 - s };
                    let node = self.nodes[k].node;
                    let t = self.target(u, k)?;
                    let new = self.relax(u[node], t, omega, node);
                    update = update.max((new - u[node]).abs());
                    u[node] = new;
                }
            }
            // a fixed color order; reversing it every sweep makes the
            // iteration symmetric and the SOR choice of ω then slows it down
            Some(colors) => {
                for color in colors {
                    let uref = &*u;
                    let compute = || -> Result<Vec<(usize, f64)>> {
                        color
                            .par_iter()
                            .map(|&k| {
                                let node = self.nodes[k].node;
                                let t = self.target(uref, k)?;
                                Ok((node, self.relax(uref[node], t, omega, node)))
                            })
                            .collect()
                    };
                    let news = match pool {
                        Some(pool) => pool.install(compute)?,
                        None => compute()?,
                    };
                    for (node, new) in news {
                        update = update.max((new - u[node]).abs());
                        u[node] = new;
                    }
                }
            }
        }
        Ok(update)
    }

    fn residual(&self, u: &[f64]) -> f64 {
        self.nodes
            .iter()
            .map(|nd| {
                let (j0, dj) = self.p.stencil.affine_jet(u, &nd.nbrs);
                let j = j0.add(&dj.scale(u[nd.node]));
                let v = self.p.f.rho(Some(&nd.x), &j);
                match &self.obstacle {
                    Some(obs) => (obs[nd.node] - u[nd.node]).min(v).abs(),
                    None => v.abs(),
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Discrete Perron function of F with boundary data φ.
pub fn perron_solve(p: &GridProblem) -> Result<SolveReport> {
    Engine::new(p, None)?.run()
}

/// Perron solve with the update capped by the obstacle g. Requires φ ≤ g at
/// every boundary node.
pub fn obstacle_solve(p: &GridProblem, g: &ScalarField) -> Result<SolveReport> {
    for i in p.grid.nodes_of(NodeKind::Boundary) {
        let x = p.grid.coords(i);
        if p.bc[i] > g(&x) {
            return Err(Error::InvalidParameter(format!(
                "boundary value {} exceeds the obstacle {} at {x:?}",
                p.bc[i],
                g(&x)
            )));
        }
    }
    Engine::new(p, Some(g))?.run()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BracketReport {
    /// U = perron_solve(F, φ).
    pub upper: SolveReport,
    /// Ũ = −perron_solve(dual F, −φ); `lower.u` is already negated.
    pub lower: SolveReport,
    /// max (Ũ − U) over interior nodes.
    pub max_excess: f64,
    /// max |U − Ũ| over interior nodes.
    pub max_gap: f64,
    /// Ũ ≤ U + 10·sweep_tol at every interior node.
    pub ordered: bool,
}

/// The pair U, Ũ with Ũ ≤ U expected.
pub fn dual_bracket_solve(p: &GridProblem) -> Result<BracketReport> {
    let upper = perron_solve(p)?;
    let mut lower = perron_solve(&p.dual())?;
    for v in &mut lower.u {
        *v = -*v;
    }
    let mut max_excess = f64::NEG_INFINITY;
    let mut max_gap: f64 = 0.0;
    for i in p.grid.nodes_of(NodeKind::Interior) {
        max_excess = max_excess.max(lower.u[i] - upper.u[i]);
        max_gap = max_gap.max((lower.u[i] - upper.u[i]).abs());
    }
    let tol = upper.sweep_tol.max(lower.sweep_tol);
    Ok(BracketReport {
        ordered: max_excess <= 10.0 * tol,
        upper,
        lower,
        max_excess,
        max_gap,
    })
}

/// max |u − exact| over interior nodes.
pub fn max_error(grid: &Grid, u: &[f64], exact: &dyn Fn(&[f64]) -> f64) -> f64 {
    grid.nodes_of(NodeKind::Interior)
        .iter()
        .map(|&i| (u[i] - exact(&grid.coords(i))).abs())
        .fold(0.0, f64::max)
}

/// The discrete jet at every interior node, for inspection.
pub fn jets(p: &GridProblem, u: &[f64]) -> Result<Vec<(usize, Jet)>> {
    p.grid
        .nodes_of(NodeKind::Interior)
        .into_iter()
        .map(|i| Ok((i, discrete_jet(&p.grid, u, i, &p.stencil)?)))
        .collect()
}
