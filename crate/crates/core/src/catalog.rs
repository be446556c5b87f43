//! Constructors for the named subequations and monotonicity cones.
//!
//! Every defining function is written so that Int F = {rho > 0}. Sets given
//! by several inequalities use the minimum of their constraint functions.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, binomial, check_ellipticity, elementary_symmetric, pucci_minus_values, ComplexStructure,
    Jet, FRAME_TOL,
};
use crate::sampling;
use crate::subequation::{Flags, ScalarField, Subequation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BranchKind {
    Real,
    Complex,
    Quaternionic,
}

impl BranchKind {
    pub fn name(self) -> &'static str {
        match self {
            BranchKind::Real => "real",
            BranchKind::Complex => "complex",
            BranchKind::Quaternionic => "quaternionic",
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

/// Λ_k^K = {λ_k(A_K) ≥ 0}. For K = ℂ, ℍ the dimension `n` is the complex
/// resp. quaternionic one and jets live on ℝ^{2n} resp. ℝ^{4n}.
pub fn make_branch(kind: BranchKind, k: usize, n: usize) -> Result<Subequation> {
    if n == 0 || k == 0 || k > n {
        return Err(invalid(format!("branch needs 1 ≤ k ≤ n, got k={k}, n={n}")));
    }
    let label = format!("branch:{}:k={k}:n={n}", kind.name());
    Ok(match kind {
        BranchKind::Real => Subequation::pure(n, label, true, move |a| a.eigenvalues()[k - 1]),
        BranchKind::Complex | BranchKind::Quaternionic => {
            let c = if kind == BranchKind::Complex {
                ComplexStructure::complex(n)?
            } else {
                ComplexStructure::quaternionic(n)?
            };
            let dim = c.ambient_dim();
            Subequation::pure(dim, label, true, move |a| match c.reduced_eigenvalues(a) {
                Ok(v) => v[k - 1],
                Err(_) => f64::NAN,
            })
        }
    })
}

/// Ascending sums λ_I = Σ_{i∈I} λ_i over all p-subsets I.
pub fn p_sums(values: &[f64], p: usize) -> Vec<f64> {
    fn rec(values: &[f64], p: usize, start: usize, acc: f64, out: &mut Vec<f64>) {
        if p == 0 {
            out.push(acc);
            return;
        }
        for i in start..=values.len() - p {
            rec(values, p - 1, i + 1, acc + values[i], out);
        }
    }
    let mut out = Vec::new();
    rec(values, p, 0, 0.0, &mut out);
    out.sort_by(f64::total_cmp);
    out
}

/// Λ_k(p): the k-th smallest p-fold eigenvalue sum is non-negative.
pub fn make_p_branch(p: usize, k: usize, n: usize) -> Result<Subequation> {
    let count = binomial(n, p) as usize;
    if p == 0 || p > n || k == 0 || k > count {
        return Err(invalid(format!(
            "p-branch needs 1 ≤ p ≤ n and 1 ≤ k ≤ C(n,p), got p={p}, k={k}, n={n}"
        )));
    }
    Ok(Subequation::pure(
        n,
        format!("pbranch:p={p}:k={k}:n={n}"),
        true,
        move |a| p_sums(&a.eigenvalues(), p)[k - 1],
    ))
}

/// λ₁ + … + λ_⌊p⌋ + (p − ⌊p⌋)·λ_{⌊p⌋+1} of ascending eigenvalues.
pub fn pcone_value(values: &[f64], p: f64) -> f64 {
    let whole = p.floor() as usize;
    let frac = p - whole as f64;
    let mut s: f64 = values[..whole].iter().sum();
    if frac > 0.0 {
        s += frac * values[whole];
    }
    s
}

/// 𝒫(p) for real 1 ≤ p ≤ n.
pub fn make_pcone(p: f64, n: usize) -> Result<Subequation> {
    if !(p >= 1.0 && p <= n as f64) {
        return Err(invalid(format!("pcone needs 1 ≤ p ≤ n, got p={p}, n={n}")));
    }
    Ok(Subequation::pure(
        n,
        format!("pcone:p={p}:n={n}"),
        true,
        move |a| pcone_value(&a.eigenvalues(), p),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Elliptic {
    Pucci { lam: f64, big_lam: f64 },
    Delta(f64),
}

/// The Pucci cone {𝒫⁻_{λ,Λ} ≥ 0} or 𝒫(δ) = {λ₁(A) + δ tr A ≥ 0}.
pub fn make_uniformly_elliptic(kind: Elliptic, n: usize) -> Result<Subequation> {
    match kind {
        Elliptic::Pucci { lam, big_lam } => {
            check_ellipticity(lam, big_lam)?;
            Ok(Subequation::pure(
                n,
                format!("pucci:lam={lam}:Lam={big_lam}:n={n}"),
                true,
                move |a| pucci_minus_values(&a.eigenvalues(), lam, big_lam),
            ))
        }
        Elliptic::Delta(d) => {
            if !(d > 0.0 && d.is_finite()) {
                return Err(invalid(format!("delta cone needs d > 0, got {d}")));
            }
            Ok(Subequation::pure(
                n,
                format!("delta:d={d}:n={n}"),
                true,
                move |a| a.min_eigenvalue() + d * a.trace(),
            ))
        }
    }
}

/// Elliptic regularization F(δ) = {A : A + δ (tr A) I ∈ F} of a pure
/// second-order F.
pub fn regularize(f: &Subequation, delta: f64) -> Result<Subequation> {
    if !f.flags().pure_second_order {
        return Err(invalid(format!("{} is not pure second order", f.label())));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(invalid(format!("regularization needs δ > 0, got {delta}")));
    }
    let rho = f.rho_fn();
    Ok(Subequation::new(
        f.n(),
        format!("reg:d={delta}:{}", f.label()),
        f.flags(),
        move |x, j| {
            let a = j.a.add_scalar(delta * j.a.trace());
            rho(x, &Jet::new(j.r, j.p.clone(), a))
        },
    ))
}

pub fn laplace(n: usize) -> Subequation {
    Subequation::pure(n, format!("laplace:n={n}"), true, |a| a.trace())
}

/// {σ_ℓ(A) ≥ 0, 1 ≤ ℓ ≤ k}, each σ_ℓ divided by C(n, ℓ).
pub fn sigma_cone(k: usize, n: usize) -> Result<Subequation> {
    if k == 0 || k > n {
        return Err(invalid(format!(
            "sigma cone needs 1 ≤ k ≤ n, got k={k}, n={n}"
        )));
    }
    Ok(Subequation::pure(
        n,
        format!("sigma:k={k}:n={n}"),
        true,
        move |a| {
            let e = elementary_symmetric(&a.eigenvalues());
            (1..=k)
                .map(|l| e[l] / binomial(n, l))
                .fold(f64::INFINITY, f64::min)
        },
    ))
}

/// {Σ arctan λᵢ(A) ≥ c} for |c| < nπ/2.
pub fn special_lagrangian(c: f64, n: usize) -> Result<Subequation> {
    let bound = n as f64 * std::f64::consts::FRAC_PI_2;
    if !(c.abs() < bound) {
        return Err(invalid(format!(
            "special Lagrangian needs |c| < nπ/2, got {c}"
        )));
    }
    Ok(Subequation::pure(
        n,
        format!("slag:c={c}:n={n}"),
        false,
        move |a| a.eigenvalues().iter().map(|l| l.atan()).sum::<f64>() - c,
    ))
}

/// {tr A + n ≥ e^r, A + I ⪰ 0}.
pub fn calabi_yau(n: usize) -> Subequation {
    let flags = Flags {
        pure_second_order: false,
        reduced: false,
        cone: false,
        x_dependent: false,
    };
    Subequation::new(n, format!("calabi_yau:n={n}"), flags, move |_, j| {
        let t = j.a.trace() + n as f64 - j.r.exp();
        t.min(j.a.min_eigenvalue() + 1.0)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum KExponent {
    Finite(f64),
    Infinity,
}

/// The k-Laplacian subequation, the closure of
/// {|p|² tr A + (k − 2) pᵗAp > 0} (k = ∞: {pᵗAp > 0}).
///
/// For p ≠ 0 the defining function is divided by |p|², which keeps its sign
/// and makes it homogeneous of degree 0 in p. On the fiber p = 0 the
/// closure contains A exactly when some unit e gives
/// tr A + (k − 2)⟨Ae, e⟩ ≥ 0, so there rho is the largest eigenvalue of
/// (tr A) I + (k − 2) A (resp. λ_max(A) for k = ∞).
pub fn k_laplacian(k: KExponent, n: usize) -> Result<Subequation> {
    if let KExponent::Finite(k) = k {
        if !(k >= 1.0 && k.is_finite()) {
            return Err(invalid(format!("k-Laplacian needs k ≥ 1, got {k}")));
        }
    }
    let label = match k {
        KExponent::Finite(k) => format!("klap:k={k}:n={n}"),
        KExponent::Infinity => format!("klap:k=inf:n={n}"),
    };
    let flags = Flags {
        pure_second_order: false,
        reduced: true,
        cone: true,
        x_dependent: false,
    };
    Ok(Subequation::new(n, label, flags, move |_, j| {
        let norm = j.p_norm();
        if norm > 0.0 {
            let u: Vec<f64> = j.p.iter().map(|x| x / norm).collect();
            let q = j.a.quad(&u);
            match k {
                KExponent::Finite(k) => j.a.trace() + (k - 2.0) * q,
                KExponent::Infinity => q,
            }
        } else {
            match k {
                KExponent::Finite(k) => {
                    let ev = j.a.eigenvalues();
                    let extreme = if k >= 2.0 { ev[n - 1] } else { ev[0] };
                    j.a.trace() + (k - 2.0) * extreme
                }
                KExponent::Infinity => j.a.max_eigenvalue(),
            }
        }
    }))
}

/// A finite list of orthonormal p-frames standing in for a compact set of
/// p-planes. Minima over the list over-approximate F(𝐆).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrassmannSet {
    p: usize,
    n: usize,
    frames: Vec<Vec<Vec<f64>>>,
}

impl GrassmannSet {
    pub fn new(frames: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let first = frames
            .first()
            .ok_or_else(|| invalid("empty Grassmann set"))?;
        let p = first.len();
        let n = first.first().map(|v| v.len()).unwrap_or(0);
        if p == 0 || n == 0 || p > n {
            return Err(invalid("frames must hold 1 ≤ p ≤ n vectors"));
        }
        for f in &frames {
            if f.len() != p || f.iter().any(|v| v.len() != n) {
                return Err(invalid("frames must share p and n"));
            }
            let d = linalg::orthonormality_defect(f);
            if d > FRAME_TOL {
                return Err(Error::NotOrthonormal(d));
            }
        }
        Ok(GrassmannSet { p, n, frames })
    }

    /// The default sample of G(p, ℝⁿ).
    pub fn full(p: usize, n: usize) -> Result<Self> {
        if p == 0 || p > n {
            return Err(invalid(format!(
                "G(p, ℝⁿ) needs 1 ≤ p ≤ n, got p={p}, n={n}"
            )));
        }
        Self::new(sampling::grassmann_frames(
            n,
            p,
            sampling::DEFAULT_FRAME_COUNT,
        ))
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn frames(&self) -> &[Vec<Vec<f64>>] {
        &self.frames
    }
}

/// F(𝐆) = {tr_W A ≥ 0 for all W ∈ 𝐆}.
pub fn geometric(g: GrassmannSet) -> Subequation {
    let n = g.n;
    let label = format!("geometric:p={}:n={n}:frames={}", g.p, g.frames.len());
    let g = Arc::new(g);
    Subequation::pure(n, label, true, move |a| {
        g.frames
            .iter()
            .map(|f| f.iter().map(|w| a.quad(w)).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    })
}

/// A convex cone 𝒟 ⊂ ℝⁿ with non-empty interior, given by generators, plus
/// the slope γ used by case (4) of [`MonotonicityCase`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionalCone {
    generators: Vec<Vec<f64>>,
    facets: Vec<Vec<f64>>,
    pub gamma: f64,
}

fn null_vector(rows: &[&Vec<f64>], n: usize) -> Vec<f64> {
    // generalized cross product: cofactors of the (n−1)×n matrix
    (0..n)
        .map(|col| {
            let sub = DMatrix::from_fn(n - 1, n - 1, |i, j| {
                rows[i][if j < col { j } else { j + 1 }]
            });
            let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
            sign * sub.determinant()
        })
        .collect()
}

/// All m-element subsets of {0, …, k − 1}, in lexicographic order.
pub(crate) fn combinations(k: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, k: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            cur.push(i);
            rec(i + 1, k, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, k, m, &mut Vec::new(), &mut out);
    out
}

impl DirectionalCone {
    /// Normalizes the generators and computes the inward unit facet normals
    /// of their conic hull.
    pub fn new(generators: Vec<Vec<f64>>, gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(invalid(format!("gamma must be ≥ 0, got {gamma}")));
        }
        let n = generators.first().map(|g| g.len()).unwrap_or(0);
        if n == 0 || generators.iter().any(|g| g.len() != n) {
            return Err(invalid(
                "generators must be non-empty vectors of equal length",
            ));
        }
        let mut gens = Vec::new();
        for g in generators {
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-12 {
                return Err(invalid("zero generator"));
            }
            gens.push(g.iter().map(|x| x / norm).collect::<Vec<f64>>());
        }
        let rank = DMatrix::from_fn(gens.len(), n, |i, j| gens[i][j]).rank(1e-10);
        if rank < n {
            return Err(invalid(
                "generators do not span ℝⁿ; the cone has empty interior",
            ));
        }
        let tol = 1e-12;
        let mut facets: Vec<Vec<f64>> = Vec::new();
        if n == 1 {
            let pos = gens.iter().all(|g| g[0] > 0.0);
            let neg = gens.iter().all(|g| g[0] < 0.0);
            if pos {
                facets.push(vec![1.0]);
            } else if neg {
                facets.push(vec![-1.0]);
            }
        } else {
            for subset in combinations(gens.len(), n - 1) {
                let rows: Vec<&Vec<f64>> = subset.iter().map(|&i| &gens[i]).collect();
                let nu = null_vector(&rows, n);
                let norm = nu.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm < 1e-10 {
                    continue;
                }
                let nu: Vec<f64> = nu.iter().map(|x| x / norm).collect();
                let dots: Vec<f64> = gens
                    .iter()
                    .map(|g| g.iter().zip(&nu).map(|(a, b)| a * b).sum())
                    .collect();
                let oriented = if dots.iter().all(|&d| d >= -tol) {
                    nu
                } else if dots.iter().all(|&d| d <= tol) {
                    nu.iter().map(|x| -x).collect()
                } else {
                    continue;
                };
                let dup = facets
                    .iter()
                    .any(|f| f.iter().zip(&oriented).all(|(a, b)| (a - b).abs() < 1e-9));
                if !dup {
                    facets.push(oriented);
                }
            }
        }
        let cone = DirectionalCone {
            generators: gens,
            facets,
            gamma,
        };
        let centroid: Vec<f64> = (0..n)
            .map(|i| {
                cone.generators.iter().map(|g| g[i]).sum::<f64>() / cone.generators.len() as f64
            })
            .collect();
        if cone.margin(&centroid) <= 1e-9 {
            return Err(invalid(
                "the generator centroid is not interior; the cone has empty interior",
            ));
        }
        Ok(cone)
    }

    pub fn n(&self) -> usize {
        self.generators[0].len()
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    /// Unit centroid of the generators, an interior direction.
    pub fn axis(&self) -> Vec<f64> {
        let n = self.n();
        let c: Vec<f64> = (0..n)
            .map(|i| self.generators.iter().map(|g| g[i]).sum())
            .collect();
        let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        c.into_iter().map(|x| x / norm).collect()
    }

    /// min over facets of ⟨ν, p⟩: ≥ 0 on 𝒟 and > 0 on its interior. A cone
    /// with no facets is all of ℝⁿ and has margin +∞.
    pub fn margin(&self, p: &[f64]) -> f64 {
        self.facets
            .iter()
            .map(|f| f.iter().zip(p).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Six monotonicity cones, numbered as in the `mcone:case=` names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum MonotonicityCase {
    /// ℝ × ℝⁿ × 𝒫.
    Case1,
    /// ℝ₋ × ℝⁿ × 𝒫.
    Case2,
    /// ℝ₋ × 𝒟 × 𝒫.
    Case3(DirectionalCone),
    /// {r ≤ −γ|p|, p ∈ 𝒟, A ⪰ 0}.
    Case4(DirectionalCone),
    /// ℝ × {⟨Ae, e⟩ − λ|⟨p, e⟩| ≥ 0 for all unit e}.
    Case5 { lambda: f64 },
    /// ℝ × {A − (|p|/R) I ⪰ 0}.
    Case6 { radius: f64 },
}

pub const CASE5_DIRECTIONS: usize = 64;

pub fn make_monotonicity_cone(case: MonotonicityCase, n: usize) -> Result<Subequation> {
    let flags = |pure: bool, reduced: bool| Flags {
        pure_second_order: pure,
        reduced,
        cone: true,
        x_dependent: false,
    };
    let check_dim = |d: &DirectionalCone| -> Result<()> {
        if d.n() != n {
            return Err(Error::Dimension {
                expected: n,
                got: d.n(),
            });
        }
        Ok(())
    };
    Ok(match case {
        MonotonicityCase::Case1 => Subequation::new(
            n,
            format!("mcone:case=1:n={n}"),
            flags(true, true),
            |_, j| j.a.min_eigenvalue(),
        ),
        MonotonicityCase::Case2 => Subequation::new(
            n,
            format!("mcone:case=2:n={n}"),
            flags(false, false),
            |_, j| (-j.r).min(j.a.min_eigenvalue()),
        ),
        MonotonicityCase::Case3(d) => {
            check_dim(&d)?;
            Subequation::new(
                n,
                format!("mcone:case=3:n={n}"),
                flags(false, false),
                move |_, j| (-j.r).min(d.margin(&j.p)).min(j.a.min_eigenvalue()),
            )
        }
        MonotonicityCase::Case4(d) => {
            check_dim(&d)?;
            if !(d.gamma > 0.0) {
                return Err(invalid("case (4) needs gamma > 0"));
            }
            let gamma = d.gamma;
            Subequation::new(
                n,
                format!("mcone:case=4:gamma={gamma}:n={n}"),
                flags(false, false),
                move |_, j| {
                    (-j.r - gamma * j.p_norm())
                        .min(d.margin(&j.p))
                        .min(j.a.min_eigenvalue())
                },
            )
        }
        MonotonicityCase::Case5 { lambda } => {
            if !(lambda >= 0.0 && lambda.is_finite()) {
                return Err(invalid(format!("case (5) needs lambda ≥ 0, got {lambda}")));
            }
            let dirs = sampling::probe_directions(n, CASE5_DIRECTIONS);
            Subequation::new(
                n,
                format!("mcone:case=5:lambda={lambda}:n={n}"),
                flags(false, true),
                move |_, j| {
                    dirs.iter()
                        .map(|e| {
                            let pe: f64 = j.p.iter().zip(e).map(|(a, b)| a * b).sum();
                            j.a.quad(e) - lambda * pe.abs()
                        })
                        .fold(f64::INFINITY, f64::min)
                },
            )
        }
        MonotonicityCase::Case6 { radius } => {
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(invalid(format!("case (6) needs R > 0, got {radius}")));
            }
            Subequation::new(
                n,
                format!("mcone:case=6:R={radius}:n={n}"),
                flags(false, true),
                move |_, j| j.a.min_eigenvalue() - j.p_norm() / radius,
            )
        }
    })
}

/// The obstacle subequation H = {r ≤ g(x)} ∩ F for a reduced F.
pub fn make_obstacle(f: &Subequation, g: ScalarField) -> Result<Subequation> {
    if !f.flags().reduced {
        return Err(invalid(format!(
            "{} depends on r; the obstacle needs a reduced F",
            f.label()
        )));
    }
    let rho = f.rho_fn();
    let flags = Flags {
        pure_second_order: false,
        reduced: false,
        cone: false,
        x_dependent: true,
    };
    Ok(Subequation::new(
        f.n(),
        format!("obstacle({})", f.label()),
        flags,
        move |x, j| match x {
            Some(x) => (g(x) - j.r).min(rho(Some(x), j)),
            None => f64::NAN,
        },
    ))
}

/// The reduced part ℝ₋ × M₀ of a monotonicity cone ℝ × M₀ (its r-constraint
/// becomes r ≤ 0).
pub fn negative_part(m: &Subequation) -> Result<Subequation> {
    if !m.flags().reduced || !m.flags().cone {
        return Err(invalid(format!(
            "{} is not an r-independent cone",
            m.label()
        )));
    }
    let rho = m.rho_fn();
    let flags = Flags {
        pure_second_order: false,
        reduced: false,
        ..m.flags()
    };
    Ok(Subequation::new(
        m.n(),
        format!("neg({})", m.label()),
        flags,
        move |x, j| (-j.r).min(rho(x, j)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;
    use crate::subequation::Class;

    fn h(d: &[f64]) -> Jet {
        Jet::hessian(SymMatrix::from_diag(d))
    }

    #[test]
    fn real_branch_one_is_psd() {
        let f = make_branch(BranchKind::Real, 1, 2).unwrap();
        assert!(f.member(None, &h(&[0.0, 3.0])).is_member());
        assert!(!f.member(None, &h(&[-0.1, 3.0])).is_member());
        let f2 = make_branch(BranchKind::Real, 2, 2).unwrap();
        assert_eq!(f2.member(None, &h(&[-3.0, -1.0])).class, Class::Outside);
    }

    #[test]
    fn complex_branch_margin() {
        let f = make_branch(BranchKind::Complex, 1, 1).unwrap();
        assert_eq!(f.n(), 2);
        let m = f.member(None, &h(&[2.0, 0.0]));
        assert_eq!(m.class, Class::Inside);
        assert!((m.margin - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bad_branch_params() {
        assert!(make_branch(BranchKind::Real, 0, 2).is_err());
        assert!(make_branch(BranchKind::Real, 3, 2).is_err());
    }

    #[test]
    fn pcone_examples() {
        let f = make_pcone(1.5, 3).unwrap();
        assert!((f.rho(None, &h(&[-1.0, 1.0, 1.0])) + 0.5).abs() < 1e-14);
        assert!((f.rho(None, &h(&[-0.4, 1.0, 1.0])) - 0.1).abs() < 1e-14);
        let full = make_pcone(3.0, 3).unwrap();
        let a = h(&[-1.0, 0.25, 2.0]);
        assert!((full.rho(None, &a) - a.a.trace()).abs() < 1e-14);
        assert!(make_pcone(0.5, 3).is_err());
        assert!(make_pcone(3.5, 3).is_err());
    }

    #[test]
    fn p_sums_small() {
        assert_eq!(p_sums(&[1.0, 2.0, 4.0], 2), vec![3.0, 5.0, 6.0]);
    }

    #[test]
    fn pucci_boundary() {
        let f = make_uniformly_elliptic(
            Elliptic::Pucci {
                lam: 1.0,
                big_lam: 2.0,
            },
            2,
        )
        .unwrap();
        assert_eq!(f.member(None, &h(&[2.0, -1.0])).class, Class::Boundary);
        assert!(make_uniformly_elliptic(
            Elliptic::Pucci {
                lam: 2.0,
                big_lam: 1.0
            },
            2
        )
        .is_err());
        assert!(make_uniformly_elliptic(Elliptic::Delta(0.0), 2).is_err());
    }

    #[test]
    fn slag_odd() {
        let f = special_lagrangian(0.0, 2).unwrap();
        assert_eq!(f.member(None, &h(&[1.0, -1.0])).class, Class::Boundary);
        assert!(special_lagrangian(4.0, 2).is_err());
    }

    #[test]
    fn geometric_x_axis_is_uxx() {
        let g = GrassmannSet::new(vec![vec![vec![1.0, 0.0]]]).unwrap();
        let f = geometric(g);
        let a = SymMatrix::from_rows(&[vec![0.7, 3.0], vec![3.0, -9.0]]).unwrap();
        assert_eq!(f.rho(None, &Jet::hessian(a)), 0.7);
    }

    #[test]
    fn wedge_cone_facets() {
        let d = DirectionalCone::new(vec![vec![1.0, 1.0], vec![1.0, -1.0]], 1.0).unwrap();
        assert!(d.margin(&[1.0, 0.0]) > 0.0);
        assert!(d.margin(&[1.0, 1.0]).abs() < 1e-12);
        assert!(d.margin(&[0.0, 1.0]) < 0.0);
        assert!(DirectionalCone::new(vec![vec![1.0, 0.0], vec![-1.0, 0.0]], 1.0).is_err());
    }

    #[test]
    fn case4_example() {
        let d = DirectionalCone::new(vec![vec![1.0, 1.0], vec![1.0, -1.0]], 1.0).unwrap();
        let m = make_monotonicity_cone(MonotonicityCase::Case4(d), 2).unwrap();
        let j = Jet::new(-2.0, vec![1.0, 0.0], SymMatrix::identity(2));
        assert_eq!(m.member(None, &j).class, Class::Inside);
    }

    #[test]
    fn obstacle_caps_r() {
        let f = make_branch(BranchKind::Real, 1, 1).unwrap();
        let g: ScalarField = Arc::new(|x: &[f64]| x[0]);
        let hsub = make_obstacle(&f, g).unwrap();
        let j = Jet::new(0.5, vec![0.0], SymMatrix::identity(1));
        assert!(hsub.member(Some(&[1.0]), &j).is_member());
        assert!(!hsub.member(Some(&[0.0]), &j).is_member());
        assert!(make_obstacle(&calabi_yau(1), Arc::new(|_: &[f64]| 0.0)).is_err());
    }

    #[test]
    fn k_laplacian_fiber_at_zero_gradient() {
        let f = k_laplacian(KExponent::Finite(1.0), 2).unwrap();
        // A = −I: tr A + (k−2)⟨Ae,e⟩ = −2 + 1 < 0 for every e
        assert!(!f
            .member(None, &Jet::hessian(SymMatrix::scalar(2, -1.0)))
            .is_member());
        // A = diag(1, −1.5): e = e₁ gives −0.5 − 1 < 0, e = e₂ gives −0.5 + 1.5 > 0
        assert!(f.member(None, &h(&[1.0, -1.5])).is_member());
    }
}
