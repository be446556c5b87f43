//! The subequation abstraction: a closed set F = {rho ≥ 0} of 2-jets with
//! Int F = {rho > 0}, its Dirichlet dual, and membership tests.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Jet, SymMatrix};
use crate::sampling::{self, SampleBox};

/// Defining function rho(x, J). `x` is `None` for constant-coefficient
/// callers.
pub type Rho = Arc<dyn Fn(Option<&[f64]>, &Jet) -> f64 + Send + Sync>;

/// A scalar function of position.
pub type ScalarField = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

pub const EPS_B: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    pub pure_second_order: bool,
    pub reduced: bool,
    pub cone: bool,
    pub x_dependent: bool,
}

impl Flags {
    /// Flags of a constant-coefficient pure second-order set.
    pub fn pure(cone: bool) -> Self {
        Flags {
            pure_second_order: true,
            reduced: true,
            cone,
            x_dependent: false,
        }
    }
}

#[derive(Clone)]
pub struct Subequation {
    n: usize,
    rho: Rho,
    flags: Flags,
    label: String,
}

impl fmt::Debug for Subequation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Subequation")
            .field("n", &self.n)
            .field("label", &self.label)
            .field("flags", &self.flags)
            .finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Class {
    Inside,
    Boundary,
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub class: Class,
    pub margin: f64,
}

impl Membership {
    pub fn classify(rho: f64, eps_b: f64) -> Self {
        let class = if rho.is_nan() || rho < -eps_b {
            Class::Outside
        } else if rho > eps_b {
            Class::Inside
        } else {
            Class::Boundary
        };
        Membership { class, margin: rho }
    }

    /// Inside or on the boundary band.
    pub fn is_member(&self) -> bool {
        self.class != Class::Outside
    }
}

impl Subequation {
    pub fn new(
        n: usize,
        label: impl Into<String>,
        flags: Flags,
        rho: impl Fn(Option<&[f64]>, &Jet) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Subequation {
            n,
            rho: Arc::new(rho),
            flags,
            label: label.into(),
        }
    }

    /// A constant-coefficient pure second-order set {f(A) ≥ 0}.
    pub fn pure(
        n: usize,
        label: impl Into<String>,
        cone: bool,
        f: impl Fn(&SymMatrix) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(n, label, Flags::pure(cone), move |_, j| f(&j.a))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_flags(mut self, flags: Flags) -> Self {
        self.flags = flags;
        self
    }

    pub fn rho_fn(&self) -> Rho {
        self.rho.clone()
    }

    #[inline]
    pub fn rho(&self, x: Option<&[f64]>, j: &Jet) -> f64 {
        (self.rho)(x, j)
    }

    pub fn member(&self, x: Option<&[f64]>, j: &Jet) -> Membership {
        self.member_with_band(x, j, EPS_B)
    }

    pub fn member_with_band(&self, x: Option<&[f64]>, j: &Jet, eps_b: f64) -> Membership {
        debug_assert_eq!(j.n(), self.n, "jet dimension differs from subequation");
        Membership::classify(self.rho(x, j), eps_b)
    }

    /// The Dirichlet dual, rhõ(x, J) = −rho(x, −J).
    pub fn dual(&self) -> Subequation {
        let rho = self.rho.clone();
        Subequation {
            n: self.n,
            rho: Arc::new(move |x, j| -rho(x, &j.neg())),
            flags: self.flags,
            label: format!("dual({})", self.label),
        }
    }

    /// The translate F + J₀.
    pub fn shift(&self, j0: &Jet) -> Subequation {
        let rho = self.rho.clone();
        let j0 = j0.clone();
        let flags = Flags {
            cone: false,
            ..self.flags
        };
        Subequation {
            n: self.n,
            rho: Arc::new(move |x, j| rho(x, &j.sub(&j0))),
            flags,
            label: format!("shift({})", self.label),
        }
    }

    /// The reduced fiber F_λ = {(p, A) : (λ, p, A) ∈ F}.
    pub fn fix_value(&self, lambda: f64) -> Subequation {
        let rho = self.rho.clone();
        let flags = Flags {
            reduced: true,
            ..self.flags
        };
        Subequation {
            n: self.n,
            rho: Arc::new(move |x, j| {
                let mut j = j.clone();
                j.r = lambda;
                rho(x, &j)
            }),
            flags,
            label: format!("{}[r={lambda}]", self.label),
        }
    }
}

/// Block-weighted Euclidean norm on jets with the Frobenius norm on A.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JetNorm {
    pub w_r: f64,
    pub w_p: f64,
    pub w_a: f64,
}

impl Default for JetNorm {
    fn default() -> Self {
        JetNorm {
            w_r: 1.0,
            w_p: 1.0,
            w_a: 1.0,
        }
    }
}

impl JetNorm {
    pub fn norm(&self, j: &Jet) -> f64 {
        let p2: f64 = j.p.iter().map(|x| x * x).sum();
        let a = j.a.frobenius();
        (self.w_r * self.w_r * j.r * j.r + self.w_p * self.w_p * p2 + self.w_a * self.w_a * a * a)
            .sqrt()
    }

    /// Maps a unit vector of ℝ^{1+n+n(n+1)/2} to a jet of norm 1.
    pub fn unit_jet(&self, n: usize, v: &[f64]) -> Jet {
        let r = v[0] / self.w_r;
        let p: Vec<f64> = v[1..=n].iter().map(|x| x / self.w_p).collect();
        let mut a = SymMatrix::zeros(n);
        let mut k = n + 1;
        for i in 0..n {
            for j in i..n {
                let scale = if i == j {
                    1.0
                } else {
                    std::f64::consts::FRAC_1_SQRT_2
                };
                a.set(i, j, v[k] * scale / self.w_a);
                k += 1;
            }
        }
        Jet::new(r, p, a)
    }
}

pub fn jet_space_dim(n: usize) -> usize {
    1 + n + n * (n + 1) / 2
}

pub const STRICT_SAMPLES: usize = 64;

/// Sampled test of dist(J, ∼F_x) ≥ c: the center must be inside and rho must
/// be non-negative at 64 low-discrepancy points of the c-sphere. The test is
/// conservative near curved boundaries and may miss thin excursions of ∼F.
pub fn strict_member(f: &Subequation, x: Option<&[f64]>, j: &Jet, c: f64, norm: &JetNorm) -> bool {
    assert!(c >= 0.0, "strictness radius must be non-negative");
    if c == 0.0 {
        return f.member(x, j).is_member();
    }
    if f.member(x, j).class != Class::Inside {
        return false;
    }
    let n = f.n();
    sampling::sphere_points(jet_space_dim(n), STRICT_SAMPLES)
        .iter()
        .all(|v| f.rho(x, &j.add(&norm.unit_jet(n, v).scale(c))) >= 0.0)
}

/// Sampled test of J ∈ F⃗ (the asymptotic interior): t·J' ∈ F for J' in the
/// `radius`-ball around J and t on a 16-point geometric grid in
/// [t0, 10³·t0]. Cones short-circuit to J ∈ Int F.
pub fn asymptotic_interior_member(
    f: &Subequation,
    x: Option<&[f64]>,
    j: &Jet,
    t0: f64,
    radius: f64,
    trials: usize,
) -> Result<bool> {
    if !f.flags().reduced {
        return Err(Error::InvalidParameter(format!(
            "{} depends on r; fix r first",
            f.label()
        )));
    }
    if !(radius > 0.0 && t0 > 0.0) {
        return Err(Error::InvalidParameter(
            "radius and t0 must be positive".into(),
        ));
    }
    if f.flags().cone {
        return Ok(f.member(x, j).class == Class::Inside);
    }
    let n = f.n();
    let norm = JetNorm::default();
    let mut probes = vec![j.clone()];
    for v in sampling::sphere_points(jet_space_dim(n), trials) {
        probes.push(j.add(&norm.unit_jet(n, &v).scale(radius)));
    }
    const T_POINTS: usize = 16;
    let ratio = 1000f64.powf(1.0 / (T_POINTS - 1) as f64);
    for probe in &probes {
        let mut t = t0;
        for _ in 0..T_POINTS {
            if f.rho(x, &probe.scale(t)) < 0.0 {
                return Ok(false);
            }
            t *= ratio;
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RegistrationReport {
    pub label: String,
    pub boundary_points: usize,
    pub failures: usize,
}

/// Spot check of the contract Int F = {rho > 0}: boundary points located by
/// bisection between sampled members and non-members must have points with
/// rho > 0 within jet distance 1e-3.
pub fn registration_check(
    f: &Subequation,
    pairs: usize,
    seed: u64,
    b: &SampleBox,
) -> Result<RegistrationReport> {
    let n = f.n();
    let mut rng = sampling::rng(seed);
    let mut report = RegistrationReport {
        label: f.label().to_string(),
        ..Default::default()
    };
    let norm = JetNorm::default();
    let mut draws = 0usize;
    while report.boundary_points < pairs {
        if draws > sampling::MAX_DRAWS {
            return Err(Error::SamplerExhausted {
                label: f.label().to_string(),
                draws,
            });
        }
        draws += 2;
        let x = sample_x(f, b, &mut rng);
        let xs = x.as_deref();
        let j_in = sampling::random_jet(n, b, &mut rng);
        let j_out = sampling::random_jet(n, b, &mut rng);
        let (j_in, j_out) = match (f.rho(xs, &j_in) > 0.0, f.rho(xs, &j_out) > 0.0) {
            (true, false) => (j_in, j_out),
            (false, true) => (j_out, j_in),
            _ => continue,
        };
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let at = |s: f64| j_in.scale(1.0 - s).add(&j_out.scale(s));
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if f.rho(xs, &at(mid)) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let jb = at(hi);
        report.boundary_points += 1;
        let step = 1e-3;
        let toward_in = j_in.sub(&jb);
        let d = norm.norm(&toward_in);
        let mut candidates = vec![jb.add(&Jet::hessian(SymMatrix::scalar(
            n,
            step / (n as f64).sqrt(),
        )))];
        candidates.push(jb.add(&Jet::new(-step, vec![0.0; n], SymMatrix::zeros(n))));
        if d > 0.0 {
            candidates.push(jb.add(&toward_in.scale(step.min(d) / d)));
        }
        if !candidates.iter().any(|c| f.rho(xs, c) > 0.0) {
            report.failures += 1;
        }
    }
    Ok(report)
}

pub(crate) fn sample_x(
    f: &Subequation,
    b: &SampleBox,
    rng: &mut sampling::SeededRng,
) -> Option<Vec<f64>> {
    if !f.flags().x_dependent {
        return None;
    }
    let n = f.n();
    Some(match &b.x_box {
        Some((lo, hi)) => sampling::random_point(lo, hi, rng),
        None => sampling::random_point(&vec![-1.0; n], &vec![1.0; n], rng),
    })
}
