//! Affine automorphisms of jet space,
//! Ψ(r, p, A) = (r, g p, h A hᵗ + L(p)) + S,
//! and the transforms of subequations they induce.
//!
//! The coefficients g, h, L, S may depend on x. A constant map keeps its
//! coefficients as values, so composing and inverting it is done once. An
//! x-dependent map is a closure that produces coefficients on demand.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{ComplexStructure, Jet, SymMatrix};
use crate::subequation::{Flags, ScalarField, Subequation};

/// Maps whose g or h has a condition number above this are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Coefficients of the map at one point. `l[i]` is L(e_i).
#[derive(Clone, Debug, PartialEq)]
pub struct JetMapParts {
    pub g: DMatrix<f64>,
    pub h: DMatrix<f64>,
    pub l: Vec<SymMatrix>,
    pub s: Jet,
}

pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

impl JetMapParts {
    pub fn identity(n: usize) -> Self {
        JetMapParts {
            g: DMatrix::identity(n, n),
            h: DMatrix::identity(n, n),
            l: vec![SymMatrix::zeros(n); n],
            s: Jet::zero(n),
        }
    }

    pub fn n(&self) -> usize {
        self.g.nrows()
    }

    fn validate(&self) -> Result<()> {
        let n = self.n();
        let shapes_ok = self.g.ncols() == n
            && self.h.nrows() == n
            && self.h.ncols() == n
            && self.l.len() == n
            && self.l.iter().all(|m| m.n() == n)
            && self.s.n() == n;
        if !shapes_ok {
            return Err(Error::InvalidParameter(
                "jet map coefficients have mismatched sizes".into(),
            ));
        }
        for m in [&self.g, &self.h] {
            let c = condition_number(m);
            if !(c.is_finite() && c <= MAX_CONDITION) {
                return Err(Error::Singular);
            }
        }
        Ok(())
    }

    fn l_of(&self, p: &[f64]) -> SymMatrix {
        let mut out = SymMatrix::zeros(self.n());
        for (pi, li) in p.iter().zip(&self.l) {
            if *pi != 0.0 {
                out = out.add(&li.scale(*pi));
            }
        }
        out
    }

    /// The linear part Φ applied to J.
    pub fn linear(&self, j: &Jet) -> Jet {
        let n = self.n();
        let gp: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|k| self.g[(i, k)] * j.p[k]).sum())
            .collect();
        let a = j.a.conjugate(&self.h).add(&self.l_of(&j.p));
        Jet::new(j.r, gp, a)
    }

    pub fn apply(&self, j: &Jet) -> Jet {
        self.linear(j).add(&self.s)
    }

    /// self ∘ first.
    pub fn after(&self, first: &JetMapParts) -> JetMapParts {
        let n = self.n();
        let l = (0..n)
            .map(|i| {
                let gi: Vec<f64> = (0..n).map(|k| first.g[(k, i)]).collect();
                first.l[i].conjugate(&self.h).add(&self.l_of(&gi))
            })
            .collect();
        JetMapParts {
            g: &self.g * &first.g,
            h: &self.h * &first.h,
            l,
            s: self.linear(&first.s).add(&self.s),
        }
    }

    pub fn inverse(&self) -> Result<JetMapParts> {
        self.validate()?;
        let n = self.n();
        let gi = self.g.clone().try_inverse().ok_or(Error::Singular)?;
        let hi = self.h.clone().try_inverse().ok_or(Error::Singular)?;
        let l = (0..n)
            .map(|i| {
                let col: Vec<f64> = (0..n).map(|k| gi[(k, i)]).collect();
                self.l_of(&col).conjugate(&hi).scale(-1.0)
            })
            .collect();
        let lin = JetMapParts {
            g: gi,
            h: hi,
            l,
            s: Jet::zero(n),
        };
        let s = lin.linear(&self.s).neg();
        Ok(JetMapParts { s, ..lin })
    }

    /// Condition numbers of g and h.
    pub fn conditioning(&self) -> (f64, f64) {
        (condition_number(&self.g), condition_number(&self.h))
    }
}

type PartsFn = Arc<dyn Fn(&[f64]) -> Result<JetMapParts> + Send + Sync>;

#[derive(Clone)]
enum Coeffs {
    Const(JetMapParts),
    Var(PartsFn),
}

#[derive(Clone)]
pub struct AffineJetMap {
    n: usize,
    coeffs: Coeffs,
    /// L ≡ 0 for every x.
    l_free: bool,
    /// S ≡ 0 for every x.
    s_free: bool,
    /// S has zero r and p components for every x.
    s_hessian_only: bool,
    label: String,
}

impl std::fmt::Debug for AffineJetMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AffineJetMap")
            .field("n", &self.n)
            .field("label", &self.label)
            .field("x_dependent", &self.is_x_dependent())
            .finish()
    }
}

impl AffineJetMap {
    pub fn identity(n: usize) -> Self {
        AffineJetMap {
            n,
            coeffs: Coeffs::Const(JetMapParts::identity(n)),
            l_free: true,
            s_free: true,
            s_hessian_only: true,
            label: "id".into(),
        }
    }

    /// A map with constant coefficients; fails if g or h is singular.
    pub fn constant(parts: JetMapParts, label: impl Into<String>) -> Result<Self> {
        parts.validate()?;
        let l_free = parts.l.iter().all(|m| m.upper().iter().all(|&v| v == 0.0));
        let s_free = parts.s == Jet::zero(parts.n());
        let s_hessian_only = parts.s.r == 0.0 && parts.s.p.iter().all(|&v| v == 0.0);
        Ok(AffineJetMap {
            n: parts.n(),
            coeffs: Coeffs::Const(parts),
            l_free,
            s_free,
            s_hessian_only,
            label: label.into(),
        })
    }

    /// An x-dependent map. The flags describe what is known to vanish for
    /// every x; they are used to decide which structure a transformed
    /// subequation keeps.
    pub fn from_fn(
        n: usize,
        label: impl Into<String>,
        l_free: bool,
        s_hessian_only: bool,
        f: impl Fn(&[f64]) -> Result<JetMapParts> + Send + Sync + 'static,
    ) -> Self {
        AffineJetMap {
            n,
            coeffs: Coeffs::Var(Arc::new(f)),
            l_free,
            s_free: false,
            s_hessian_only,
            label: label.into(),
        }
    }

    /// S(x) = (0, 0, −f(x) I): A ↦ A − f(x) I.
    pub fn hessian_shift(n: usize, f: ScalarField) -> Self {
        Self::from_fn(n, "shift:-f*I", true, true, move |x| {
            let mut parts = JetMapParts::identity(n);
            parts.s = Jet::hessian(SymMatrix::scalar(n, -f(x)));
            Ok(parts)
        })
    }

    /// A ↦ η(x)² A, i.e. h = η(x) I.
    pub fn hessian_scaling(n: usize, eta: ScalarField) -> Self {
        Self::from_fn(n, "scale:eta^2", true, true, move |x| {
            let e = eta(x);
            if !(e.is_finite() && e != 0.0) {
                return Err(Error::Singular);
            }
            let mut parts = JetMapParts::identity(n);
            parts.h = DMatrix::identity(n, n) * e;
            Ok(parts)
        })
    }

    /// (r, p, A) ↦ (r, p, h²A + (h² − 1) I) on ℂᵐ = ℝ²ᵐ with
    /// h = f(x)^{−1/(2m)}; requires f > 0.
    pub fn calabi_yau(m: usize, f: ScalarField) -> Self {
        let n = 2 * m;
        Self::from_fn(n, "calabi-yau", true, true, move |x| {
            let fx = f(x);
            if !(fx > 0.0 && fx.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "f(x) = {fx} must be positive"
                )));
            }
            let h = fx.powf(-1.0 / (2 * m) as f64);
            let mut parts = JetMapParts::identity(n);
            parts.h = DMatrix::identity(n, n) * h;
            parts.s = Jet::hessian(SymMatrix::scalar(n, h * h - 1.0));
            Ok(parts)
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_x_dependent(&self) -> bool {
        matches!(self.coeffs, Coeffs::Var(_))
    }

    /// Coefficients at x. `x` may be `None` only for constant maps.
    pub fn parts(&self, x: Option<&[f64]>) -> Result<JetMapParts> {
        match (&self.coeffs, x) {
            (Coeffs::Const(p), _) => Ok(p.clone()),
            (Coeffs::Var(f), Some(x)) => {
                let p = f(x)?;
                p.validate()?;
                Ok(p)
            }
            (Coeffs::Var(_), None) => Err(Error::InvalidParameter(format!(
                "{} depends on x but no point was given",
                self.label
            ))),
        }
    }

    pub fn apply(&self, x: Option<&[f64]>, j: &Jet) -> Result<Jet> {
        if j.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: j.n(),
            });
        }
        Ok(self.parts(x)?.apply(j))
    }

    /// Condition numbers (g, h) at x.
    pub fn conditioning(&self, x: Option<&[f64]>) -> Result<(f64, f64)> {
        Ok(self.parts(x)?.conditioning())
    }
}

/// Ψ₂ ∘ Ψ₁.
pub fn compose(psi2: &AffineJetMap, psi1: &AffineJetMap) -> Result<AffineJetMap> {
    if psi2.n != psi1.n {
        return Err(Error::Dimension {
            expected: psi2.n,
            got: psi1.n,
        });
    }
    let label = format!("{}∘{}", psi2.label, psi1.label);
    let coeffs = match (&psi2.coeffs, &psi1.coeffs) {
        (Coeffs::Const(a), Coeffs::Const(b)) => Coeffs::Const(a.after(b)),
        _ => {
            let (a, b) = (psi2.clone(), psi1.clone());
            Coeffs::Var(Arc::new(move |x| {
                Ok(a.parts(Some(x))?.after(&b.parts(Some(x))?))
            }))
        }
    };
    Ok(AffineJetMap {
        n: psi1.n,
        coeffs,
        l_free: psi1.l_free && psi2.l_free,
        s_free: psi1.s_free && psi2.s_free,
        s_hessian_only: psi1.s_hessian_only && psi2.s_hessian_only,
        label,
    })
}

pub fn invert(psi: &AffineJetMap) -> Result<AffineJetMap> {
    let coeffs = match &psi.coeffs {
        Coeffs::Const(p) => Coeffs::Const(p.inverse()?),
        Coeffs::Var(f) => {
            let f = f.clone();
            Coeffs::Var(Arc::new(move |x| f(x)?.inverse()))
        }
    };
    Ok(AffineJetMap {
        coeffs,
        label: format!("inv({})", psi.label),
        ..psi.clone()
    })
}

/// The image Ψ(F) = {J : Ψ⁻¹(J) ∈ F}. Points where the coefficients are
/// undefined give rho = NaN, which classifies as outside.
pub fn transform_subequation(f: &Subequation, psi: &AffineJetMap) -> Result<Subequation> {
    if f.n() != psi.n {
        return Err(Error::Dimension {
            expected: f.n(),
            got: psi.n,
        });
    }
    let inv = invert(psi)?;
    let ff = f.flags();
    let flags = Flags {
        pure_second_order: ff.pure_second_order && psi.l_free,
        reduced: ff.reduced && psi.s_hessian_only,
        cone: ff.cone && psi.s_free,
        x_dependent: ff.x_dependent || psi.is_x_dependent(),
    };
    let rho = f.rho_fn();
    let label = format!("{}[{}]", psi.label, f.label());
    Ok(Subequation::new(
        f.n(),
        label,
        flags,
        move |x, j| match inv.parts(x) {
            Ok(p) => rho(x, &p.apply(j)),
            Err(_) => f64::NAN,
        },
    ))
}

/// Pulls F back along Ψ: {J : Ψ(J) ∈ F}.
pub fn pullback_subequation(f: &Subequation, psi: &AffineJetMap) -> Result<Subequation> {
    transform_subequation(f, &invert(psi)?)
}

/// {λ_k(A) ≥ f(x)}: the real branch Λ_k pulled back along A ↦ A − f(x) I.
pub fn inhomogeneous_branch(k: usize, n: usize, f: ScalarField) -> Result<Subequation> {
    let branch = crate::catalog::make_branch(crate::catalog::BranchKind::Real, k, n)?;
    let g = pullback_subequation(&branch, &AffineJetMap::hessian_shift(n, f))?;
    Ok(g.with_label(format!("inhom:branch:k={k}:n={n}")))
}

/// {det A ≥ 1, A ⪰ 0} as min(∏λᵢ − 1, λ₁).
pub fn monge_ampere_unit(n: usize) -> Subequation {
    Subequation::pure(n, format!("ma1:n={n}"), false, |a| {
        let ev = a.eigenvalues();
        (ev.iter().product::<f64>() - 1.0).min(ev[0])
    })
}

/// {det A ≥ f(x), A ⪰ 0} obtained from the unit equation by the scaling
/// A ↦ η² A with η = f^{−1/(2n)}; requires f > 0.
pub fn monge_ampere(n: usize, f: ScalarField) -> Result<Subequation> {
    let eta: ScalarField = Arc::new(move |x| f(x).powf(-1.0 / (2 * n) as f64));
    let g = pullback_subequation(
        &monge_ampere_unit(n),
        &AffineJetMap::hessian_scaling(n, eta),
    )?;
    Ok(g.with_label(format!("ma:n={n}")))
}

/// {det_ℂ(A_ℂ + I) ≥ 1, A_ℂ + I ⪰ 0} on ℝ²ᵐ, A_ℂ the complex-hermitian part.
pub fn complex_det_unit(m: usize) -> Result<Subequation> {
    let c = ComplexStructure::complex(m)?;
    Ok(Subequation::pure(
        2 * m,
        format!("cdet1:m={m}"),
        false,
        move |a| match c.reduced_eigenvalues(a) {
            Ok(ev) => (ev.iter().map(|l| l + 1.0).product::<f64>() - 1.0).min(ev[0] + 1.0),
            Err(_) => f64::NAN,
        },
    ))
}

/// {det_ℂ(A_ℂ + I) ≥ f(x), A_ℂ + I ⪰ 0}: the unit equation pulled back along
/// the Calabi–Yau map. The determinant on the left is over ℂᵐ.
pub fn calabi_yau_det(m: usize, f: ScalarField) -> Result<Subequation> {
    let g = pullback_subequation(&complex_det_unit(m)?, &AffineJetMap::calabi_yau(m, f))?;
    Ok(g.with_label(format!("calabi-yau:m={m}")))
}
