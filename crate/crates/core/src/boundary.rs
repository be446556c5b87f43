//! Domains Ω = {ρ < 0}, second fundamental forms of ∂Ω and strict
//! F-convexity of boundary points.
//!
//! At a boundary point with outward normal ν and tangent frame t₁…t_{n−1},
//! the test jet is (λ, ν, t ννᵗ + Σ IIᵢⱼ tᵢtⱼᵗ). The boundary is strictly
//! F-convex there when these jets lie in the asymptotic interior of F_λ for
//! all large t.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr;
use crate::linalg::{Jet, SymMatrix};
use crate::sampling;
use crate::subequation::{asymptotic_interior_member, ScalarField, Subequation};

pub type VectorField = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type MatrixField = Arc<dyn Fn(&[f64]) -> SymMatrix + Send + Sync>;

pub const H_GEO: f64 = 1e-4;
pub const MIN_GRADIENT: f64 = 1e-6;
pub const ON_BOUNDARY_TOL: f64 = 1e-8;
/// Allowed disagreement between finite differences at h and h/2.
const RICHARDSON_TOL: f64 = 1e-4;

#[derive(Clone)]
pub struct DomainSpec {
    n: usize,
    rho: ScalarField,
    grad: Option<VectorField>,
    hess: Option<MatrixField>,
    h_geo: f64,
    label: String,
}

impl std::fmt::Debug for DomainSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DomainSpec")
            .field("n", &self.n)
            .field("label", &self.label)
            .field("analytic", &self.grad.is_some())
            .finish()
    }
}

fn shifted(x: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut y = x.to_vec();
    for &(i, d) in moves {
        y[i] += d;
    }
    y
}

impl DomainSpec {
    /// Geometry from central differences of ρ.
    pub fn new(n: usize, label: impl Into<String>, rho: ScalarField) -> Self {
        DomainSpec {
            n,
            rho,
            grad: None,
            hess: None,
            h_geo: H_GEO,
            label: label.into(),
        }
    }

    /// Parses ρ from the expression grammar of [`crate::expr`].
    pub fn from_expr(src: &str, n: usize) -> Result<Self> {
        Ok(Self::new(n, src, expr::parse_field(src, n)?))
    }

    pub fn with_analytic(mut self, grad: VectorField, hess: MatrixField) -> Self {
        self.grad = Some(grad);
        self.hess = Some(hess);
        self
    }

    pub fn with_step(mut self, h: f64) -> Self {
        self.h_geo = h;
        self
    }

    /// {|x| < radius}.
    pub fn ball(n: usize, radius: f64) -> Self {
        let r2 = radius * radius;
        DomainSpec::new(
            n,
            format!("ball:r={radius}"),
            Arc::new(move |x| x.iter().map(|v| v * v).sum::<f64>() - r2),
        )
        .with_analytic(
            Arc::new(|x| x.iter().map(|v| 2.0 * v).collect()),
            Arc::new(move |_| SymMatrix::scalar(n, 2.0)),
        )
    }

    /// {r1 < |x| < r2} via ρ = (|x| − r1)(|x| − r2).
    pub fn annulus(n: usize, r1: f64, r2: f64) -> Self {
        DomainSpec::new(
            n,
            format!("annulus:{r1}:{r2}"),
            Arc::new(move |x| {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                (r - r1) * (r - r2)
            }),
        )
    }

    /// A smooth star-shaped planar domain |x| < R(θ) with
    /// R(θ) = 1 + Σ_{k=1}^{4} (a_k cos kθ + b_k sin kθ), |a_k|, |b_k| ≤ 0.05.
    pub fn random_star(seed: u64) -> Self {
        let mut rng = sampling::rng(seed);
        let coeffs: Vec<(f64, f64)> = (1..=4)
            .map(|_| (rng.random_range(-0.05..0.05), rng.random_range(-0.05..0.05)))
            .collect();
        DomainSpec::new(
            2,
            format!("star:seed={seed}"),
            Arc::new(move |x| {
                let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
                let th = x[1].atan2(x[0]);
                let big_r = 1.0
                    + coeffs
                        .iter()
                        .enumerate()
                        .map(|(k, (a, b))| {
                            let k = (k + 1) as f64;
                            a * (k * th).cos() + b * (k * th).sin()
                        })
                        .sum::<f64>();
                r - big_r
            }),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rho(&self, x: &[f64]) -> f64 {
        (self.rho)(x)
    }

    pub fn rho_field(&self) -> ScalarField {
        self.rho.clone()
    }

    fn fd_gradient(&self, x: &[f64], h: f64) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                (self.rho(&shifted(x, &[(i, h)])) - self.rho(&shifted(x, &[(i, -h)]))) / (2.0 * h)
            })
            .collect()
    }

    fn fd_hessian(&self, x: &[f64], h: f64) -> SymMatrix {
        let f0 = self.rho(x);
        SymMatrix::from_fn(self.n, |i, j| {
            if i == j {
                (self.rho(&shifted(x, &[(i, h)])) - 2.0 * f0 + self.rho(&shifted(x, &[(i, -h)])))
                    / (h * h)
            } else {
                (self.rho(&shifted(x, &[(i, h), (j, h)]))
                    - self.rho(&shifted(x, &[(i, h), (j, -h)]))
                    - self.rho(&shifted(x, &[(i, -h), (j, h)]))
                    + self.rho(&shifted(x, &[(i, -h), (j, -h)])))
                    / (4.0 * h * h)
            }
        })
    }

    fn richardson(&self, coarse: &[f64], fine: &[f64], what: &str) -> Result<Vec<f64>> {
        let scale = 1.0 + fine.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let gap = coarse
            .iter()
            .zip(fine)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if !(gap <= RICHARDSON_TOL * scale) {
            return Err(Error::Geometry(format!(
                "{what} of {} unresolved at step {}: h vs h/2 differ by {gap:e}",
                self.label, self.h_geo
            )));
        }
        Ok(coarse
            .iter()
            .zip(fine)
            .map(|(c, f)| (4.0 * f - c) / 3.0)
            .collect())
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        if let Some(g) = &self.grad {
            return Ok(g(x));
        }
        let h = self.h_geo;
        self.richardson(
            &self.fd_gradient(x, h),
            &self.fd_gradient(x, h / 2.0),
            "gradient",
        )
    }

    pub fn hessian(&self, x: &[f64]) -> Result<SymMatrix> {
        if let Some(hs) = &self.hess {
            return Ok(hs(x));
        }
        let h = self.h_geo;
        let coarse = self.fd_hessian(x, h);
        let fine = self.fd_hessian(x, h / 2.0);
        let v = self.richardson(coarse.upper(), fine.upper(), "Hessian")?;
        let mut out = SymMatrix::zeros(self.n);
        let mut k = 0;
        for i in 0..self.n {
            for j in i..self.n {
                out.set(i, j, v[k]);
                k += 1;
            }
        }
        Ok(out)
    }

    /// The point where the ray center + s·dir (s > 0) leaves Ω, located by
    /// doubling and then bisection. Requires ρ(center) < 0.
    pub fn ray_exit(&self, center: &[f64], dir: &[f64]) -> Result<Vec<f64>> {
        let at = |s: f64| -> Vec<f64> { center.iter().zip(dir).map(|(c, d)| c + s * d).collect() };
        if !(self.rho(center) < 0.0) {
            return Err(Error::Geometry(format!(
                "center is not inside {}",
                self.label
            )));
        }
        let mut hi = 1.0;
        let mut tries = 0;
        while !(self.rho(&at(hi)) >= 0.0) {
            hi *= 2.0;
            tries += 1;
            if tries > 60 {
                return Err(Error::Geometry(format!(
                    "{} is unbounded along the ray",
                    self.label
                )));
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.rho(&at(mid)) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x_lo = at(lo);
        let x_hi = at(hi);
        Ok(if self.rho(&x_lo).abs() <= self.rho(&x_hi).abs() {
            x_lo
        } else {
            x_hi
        })
    }

    /// `k` boundary points along low-discrepancy rays from `center`.
    pub fn star_boundary_points(&self, center: &[f64], k: usize) -> Result<Vec<Vec<f64>>> {
        sampling::sphere_points(self.n, k)
            .iter()
            .map(|d| self.ray_exit(center, d))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryGeometry {
    pub x: Vec<f64>,
    /// Outward unit normal ∇ρ/|∇ρ|.
    pub nu: Vec<f64>,
    /// Orthonormal tangent frame, n − 1 vectors.
    pub frame: Vec<Vec<f64>>,
    /// Second fundamental form in the tangent frame.
    pub ii: SymMatrix,
}

impl BoundaryGeometry {
    /// II as an ambient matrix Σ IIᵢⱼ tᵢtⱼᵗ.
    pub fn ii_ambient(&self) -> SymMatrix {
        let n = self.nu.len();
        let k = self.frame.len();
        SymMatrix::from_fn(n, |a, b| {
            let mut s = 0.0;
            for i in 0..k {
                for j in 0..k {
                    s += self.ii.get(i, j) * self.frame[i][a] * self.frame[j][b];
                }
            }
            s
        })
    }

    /// The jet (λ, ν, t ννᵗ + II).
    pub fn jet(&self, lambda: f64, t: f64) -> Jet {
        let a = SymMatrix::outer(&self.nu).scale(t).add(&self.ii_ambient());
        Jet::new(lambda, self.nu.clone(), a)
    }

    pub fn principal_curvatures(&self) -> Vec<f64> {
        if self.ii.n() == 0 {
            vec![]
        } else {
            self.ii.eigenvalues()
        }
    }
}

/// ν and II = (tangential part of Hess ρ)/|∇ρ| at a boundary point.
pub fn second_fundamental_form(d: &DomainSpec, x: &[f64]) -> Result<BoundaryGeometry> {
    if x.len() != d.n {
        return Err(Error::Dimension {
            expected: d.n,
            got: x.len(),
        });
    }
    let r = d.rho(x);
    if !(r.abs() <= ON_BOUNDARY_TOL) {
        return Err(Error::Geometry(format!(
            "ρ(x) = {r:e} is not on the boundary"
        )));
    }
    let g = d.gradient(x)?;
    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm >= MIN_GRADIENT) {
        return Err(Error::Geometry(format!("|∇ρ| = {norm:e} is degenerate")));
    }
    let nu: Vec<f64> = g.iter().map(|v| v / norm).collect();
    let frame = sampling::orthonormal_complement(&nu);
    let hess = d.hessian(x)?;
    let k = frame.len();
    let ii = SymMatrix::from_fn(k, |i, j| {
        let hj = hess.mul_vec(&frame[j]);
        frame[i].iter().zip(&hj).map(|(a, b)| a * b).sum::<f64>() / norm
    });
    Ok(BoundaryGeometry {
        x: x.to_vec(),
        nu,
        frame,
        ii,
    })
}

pub const DEFAULT_T_MAX: f64 = 65536.0;
pub const STABLE_TAIL: usize = 4;
const PROBE_RADIUS: f64 = 1e-3;
const PROBE_TRIALS: usize = 16;

pub fn default_lambda_grid(scale: f64) -> Vec<f64> {
    [-2.0, -1.0, 0.0, 1.0, 2.0]
        .iter()
        .map(|v| v * scale)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaVerdict {
    pub lambda: f64,
    pub convex: bool,
    /// Smallest grid t from which every later grid point passed.
    pub stable_from: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityVerdict {
    pub x: Vec<f64>,
    pub per_lambda: Vec<LambdaVerdict>,
    pub overall: bool,
}

fn t_grid(t_max: f64) -> Vec<f64> {
    let mut out = vec![1.0];
    while *out.last().unwrap() * 2.0 <= t_max {
        out.push(out.last().unwrap() * 2.0);
    }
    out
}

fn lambda_verdict(
    g: &Subequation,
    geo: &BoundaryGeometry,
    lambda: f64,
    ts: &[f64],
) -> Result<LambdaVerdict> {
    let mut ok = Vec::with_capacity(ts.len());
    for &t in ts {
        ok.push(asymptotic_interior_member(
            g,
            Some(&geo.x),
            &geo.jet(lambda, t),
            1.0,
            PROBE_RADIUS,
            PROBE_TRIALS,
        )?);
    }
    let tail = STABLE_TAIL.min(ok.len());
    let convex = ok[ok.len() - tail..].iter().all(|&b| b);
    let stable_from = if convex {
        let first = ok.iter().rposition(|&b| !b).map_or(0, |i| i + 1);
        Some(ts[first])
    } else {
        None
    };
    Ok(LambdaVerdict {
        lambda,
        convex,
        stable_from,
    })
}

/// Strict F-convexity at boundary point x, per λ in `lambda_grid` (a single
/// verdict when F does not depend on r) on the t-grid 1, 2, 4, … ≤ `t_max`.
pub fn strict_convexity_test(
    f: &Subequation,
    d: &DomainSpec,
    x: &[f64],
    lambda_grid: &[f64],
    t_max: f64,
) -> Result<ConvexityVerdict> {
    if f.n() != d.n {
        return Err(Error::Dimension {
            expected: d.n,
            got: f.n(),
        });
    }
    if !(t_max >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "t_max must be ≥ 1, got {t_max}"
        )));
    }
    let geo = second_fundamental_form(d, x)?;
    let ts = t_grid(t_max);
    let per_lambda = if f.flags().reduced {
        vec![lambda_verdict(f, &geo, 0.0, &ts)?]
    } else {
        if lambda_grid.is_empty() {
            return Err(Error::InvalidParameter("empty λ grid".into()));
        }
        lambda_grid
            .iter()
            .map(|&l| lambda_verdict(&f.fix_value(l), &geo, l, &ts))
            .collect::<Result<Vec<_>>>()?
    };
    let overall = per_lambda.iter().all(|v| v.convex);
    Ok(ConvexityVerdict {
        x: x.to_vec(),
        per_lambda,
        overall,
    })
}

/// [`strict_convexity_test`] at each point, in parallel.
pub fn scan_boundary(
    f: &Subequation,
    d: &DomainSpec,
    points: &[Vec<f64>],
    lambda_grid: &[f64],
    t_max: f64,
) -> Result<Vec<ConvexityVerdict>> {
    points
        .par_iter()
        .map(|x| strict_convexity_test(f, d, x, lambda_grid, t_max))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sphere_has_unit_curvature() {
        let d = DomainSpec::new(
            3,
            "sphere",
            Arc::new(|x: &[f64]| x.iter().map(|v| v * v).sum::<f64>() - 1.0),
        );
        let x = [0.6, 0.0, 0.8];
        let geo = second_fundamental_form(&d, &x).unwrap();
        for (a, b) in geo.nu.iter().zip(&x) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
        for k in geo.principal_curvatures() {
            assert_abs_diff_eq!(k, 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn hyperplane_is_flat() {
        let d = DomainSpec::from_expr("x2", 2).unwrap();
        let geo = second_fundamental_form(&d, &[0.3, 0.0]).unwrap();
        assert_abs_diff_eq!(geo.ii.get(0, 0), 0.0, epsilon = 1e-8);
    }

    #[test]
    fn annulus_inner_trace() {
        let d = DomainSpec::annulus(2, 1.0, 2.0);
        let geo = second_fundamental_form(&d, &[0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(geo.ii.trace(), -1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(geo.nu[1], -1.0, epsilon = 1e-9);
    }

    #[test]
    fn off_boundary_rejected() {
        let d = DomainSpec::ball(2, 1.0);
        assert!(second_fundamental_form(&d, &[0.5, 0.0]).is_err());
    }

    #[test]
    fn ray_exit_hits_boundary() {
        let d = DomainSpec::random_star(3);
        for x in d.star_boundary_points(&[0.0, 0.0], 8).unwrap() {
            assert!(d.rho(&x).abs() <= ON_BOUNDARY_TOL);
        }
    }

    #[test]
    fn t_grid_shape() {
        let ts = t_grid(DEFAULT_T_MAX);
        assert_eq!(ts.len(), 17);
        assert_eq!(*ts.last().unwrap(), 65536.0);
    }
}
